//! Exact linear algebra over ℚ(i): kernels of coefficient matrices.

use crate::scalar::GaussRat;

/// Basis of the null space of the matrix given by `rows` (each of length
/// `ncols`), computed by exact Gauss–Jordan elimination. The basis vectors
/// carry 1 in their free coordinate, so the result is deterministic.
pub fn kernel_basis(rows: &[Vec<GaussRat>], ncols: usize) -> Vec<Vec<GaussRat>> {
    let mut m: Vec<Vec<GaussRat>> = rows.to_vec();
    for row in &m {
        assert_eq!(row.len(), ncols, "ragged matrix");
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let Some(r) = (next_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next_row, r);
        let inv = m[next_row][col].inv().expect("pivot is nonzero");
        for j in col..ncols {
            m[next_row][j] = &m[next_row][j] * &inv;
        }
        for r2 in 0..m.len() {
            if r2 != next_row && !m[r2][col].is_zero() {
                let factor = m[r2][col].clone();
                for j in col..ncols {
                    m[r2][j] = &m[r2][j] - &(&factor * &m[next_row][j]);
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == m.len() {
            break;
        }
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![GaussRat::zero(); ncols];
        v[free] = GaussRat::one();
        for &(r, c) in &pivots {
            v[c] = -&m[r][free];
        }
        basis.push(v);
    }
    basis
}
