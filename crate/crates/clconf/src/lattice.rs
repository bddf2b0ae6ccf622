//! Finitely generated additive subgroups of ℚ(i) and homomorphisms on them.
//!
//! A group Δ ⊆ ℚ(i) generated by finitely many elements is free abelian of
//! rank 1 or 2. We store a canonical ℤ-basis so that every element is a pair
//! of integer coordinates, group equality is basis equality, and membership
//! testing is exact.

use crate::scalar::GaussRat;
use itertools::Itertools;
use num::integer::Integer;
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("the generators span only the trivial group")]
    EmptyGroup,
    #[error("rank mismatch: expected {expected} coordinates, found {found}")]
    RankMismatch { expected: usize, found: usize },
}

/// A group element as integer coordinates in the lattice's canonical basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeltaElt {
    coords: Vec<i64>,
}

impl DeltaElt {
    pub fn new(coords: Vec<i64>) -> Self {
        DeltaElt { coords }
    }

    pub fn zero(rank: usize) -> Self {
        DeltaElt::new(vec![0; rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

fn zip_coords(a: &DeltaElt, b: &DeltaElt, op: impl Fn(i64, i64) -> Option<i64>) -> DeltaElt {
    assert_eq!(a.rank(), b.rank(), "mixed lattice ranks");
    DeltaElt::new(
        a.coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| op(x, y).expect("coordinate exceeds i64 range"))
            .collect(),
    )
}

impl Add for &DeltaElt {
    type Output = DeltaElt;
    fn add(self, rhs: &DeltaElt) -> DeltaElt {
        zip_coords(self, rhs, i64::checked_add)
    }
}

impl Sub for &DeltaElt {
    type Output = DeltaElt;
    fn sub(self, rhs: &DeltaElt) -> DeltaElt {
        zip_coords(self, rhs, i64::checked_sub)
    }
}

impl Neg for &DeltaElt {
    type Output = DeltaElt;
    fn neg(self) -> DeltaElt {
        DeltaElt::new(
            self.coords
                .iter()
                .map(|&c| c.checked_neg().expect("coordinate exceeds i64 range"))
                .collect(),
        )
    }
}

impl fmt::Display for DeltaElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().join(","))
    }
}

impl fmt::Debug for DeltaElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Row Hermite normal form of an integer matrix with two columns. Rows are
/// basis vectors; the result is the unique canonical basis of the row span.
fn row_hnf(mut rows: Vec<[BigInt; 2]>) -> Vec<[BigInt; 2]> {
    rows.retain(|r| !r[0].is_zero() || !r[1].is_zero());
    let mut basis: Vec<[BigInt; 2]> = Vec::new();
    for col in 0..2 {
        loop {
            let mut live: Vec<usize> = (0..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .collect();
            let Some(&first) = live.first() else { break };
            if live.len() == 1 {
                let mut pivot = rows.remove(first);
                if pivot[col].is_negative() {
                    pivot = [-&pivot[0], -&pivot[1]];
                }
                basis.push(pivot);
                break;
            }
            // Euclidean step: reduce every live row by the one with the
            // smallest entry in this column.
            live.sort_by_key(|&i| rows[i][col].abs());
            let p = live[0];
            for &j in &live[1..] {
                let q = &rows[j][col] / &rows[p][col];
                rows[j] = [&rows[j][0] - &q * &rows[p][0], &rows[j][1] - &q * &rows[p][1]];
            }
        }
    }
    if basis.len() == 2 {
        // Reduce the entry above the second pivot into [0, pivot).
        let q = basis[0][1].mod_floor(&basis[1][1]);
        basis[0][1] = q;
    }
    basis
}

fn lcm_denominator(values: &[GaussRat]) -> BigInt {
    let mut d = BigInt::from(1);
    for v in values {
        d = d.lcm(v.re().denom());
        d = d.lcm(v.im().denom());
    }
    d
}

/// Convert an exact rational to `i64` if it is an integer; `None` otherwise.
fn rational_to_i64(r: &BigRational) -> Option<i64> {
    if !r.is_integer() {
        return None;
    }
    Some(
        r.to_integer()
            .to_i64()
            .expect("coordinate exceeds i64 range"),
    )
}

/// A finitely generated subgroup Δ ⊆ ℚ(i) with its canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaLattice {
    basis: Vec<GaussRat>,
}

impl DeltaLattice {
    /// Build the group generated by `generators`, dropping zeros. Errors if
    /// the group is trivial.
    pub fn from_generators(generators: &[GaussRat]) -> Result<Self, LatticeError> {
        let nonzero: Vec<GaussRat> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
        if nonzero.is_empty() {
            return Err(LatticeError::EmptyGroup);
        }
        let d = lcm_denominator(&nonzero);
        let rows: Vec<[BigInt; 2]> = nonzero
            .iter()
            .map(|g| {
                [
                    (g.re() * BigRational::from_integer(d.clone())).to_integer(),
                    (g.im() * BigRational::from_integer(d.clone())).to_integer(),
                ]
            })
            .collect();
        let d_rat = BigRational::from_integer(d);
        let basis = row_hnf(rows)
            .into_iter()
            .map(|row| {
                GaussRat::new(
                    BigRational::from_integer(row[0].clone()) / &d_rat,
                    BigRational::from_integer(row[1].clone()) / &d_rat,
                )
            })
            .collect();
        Ok(DeltaLattice { basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GaussRat] {
        &self.basis
    }

    /// The scalar value Σ coordsᵢ · basisᵢ of a group element.
    pub fn value(&self, e: &DeltaElt) -> GaussRat {
        assert_eq!(e.rank(), self.rank(), "element from a different lattice");
        let mut acc = GaussRat::zero();
        for (c, b) in e.coords().iter().zip(&self.basis) {
            acc = &acc + &(&GaussRat::from_int(*c) * b);
        }
        acc
    }

    /// Membership test: the coordinates of `x` if `x ∈ Δ`, else `None`.
    pub fn contains(&self, x: &GaussRat) -> Option<DeltaElt> {
        match self.basis.len() {
            1 => {
                let b = &self.basis[0];
                let n = if !b.re().is_zero() {
                    rational_to_i64(&(x.re() / b.re()))?
                } else {
                    if !x.re().is_zero() {
                        return None;
                    }
                    rational_to_i64(&(x.im() / b.im()))?
                };
                let elt = DeltaElt::new(vec![n]);
                (self.value(&elt) == *x).then_some(elt)
            }
            2 => {
                // Basis is upper triangular from the Hermite form:
                // b₁ = (p, s), b₂ = (0, q) with p, q > 0.
                let (b1, b2) = (&self.basis[0], &self.basis[1]);
                let m = rational_to_i64(&(x.re() / b1.re()))?;
                let rest = x.im() - BigRational::from_integer(m.into()) * b1.im();
                let n = rational_to_i64(&(rest / b2.im()))?;
                Some(DeltaElt::new(vec![m, n]))
            }
            r => unreachable!("lattice of rank {r}"),
        }
    }

    /// All elements whose coordinates lie in `[-w, w]`, in lexicographic
    /// order.
    pub fn window(&self, w: i64) -> Vec<DeltaElt> {
        assert!(w >= 0, "negative window bound");
        (0..self.rank())
            .map(|_| -w..=w)
            .multi_cartesian_product()
            .map(DeltaElt::new)
            .collect()
    }
}

/// An additive homomorphism Δ → ℂ given by its values on the canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    on_basis: Vec<GaussRat>,
}

impl GroupHom {
    pub fn new(on_basis: Vec<GaussRat>) -> Self {
        GroupHom { on_basis }
    }

    pub fn zero(rank: usize) -> Self {
        GroupHom::new(vec![GaussRat::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.on_basis.len()
    }

    pub fn on_basis(&self) -> &[GaussRat] {
        &self.on_basis
    }

    pub fn is_zero(&self) -> bool {
        self.on_basis.iter().all(GaussRat::is_zero)
    }

    /// Evaluate on an element of matching rank. Use [`hom_eval`] when the
    /// ranks are not known to agree.
    pub fn eval(&self, e: &DeltaElt) -> GaussRat {
        assert_eq!(e.rank(), self.rank(), "element from a different lattice");
        let mut acc = GaussRat::zero();
        for (c, v) in e.coords().iter().zip(&self.on_basis) {
            acc = &acc + &(&GaussRat::from_int(*c) * v);
        }
        acc
    }
}

/// Evaluate a homomorphism, checking that the element has the right rank.
pub fn hom_eval(hom: &GroupHom, e: &DeltaElt) -> Result<GaussRat, LatticeError> {
    if hom.rank() != e.rank() {
        return Err(LatticeError::RankMismatch {
            expected: hom.rank(),
            found: e.rank(),
        });
    }
    Ok(hom.eval(e))
}

/// The admissibility report for a parameter triple (Δ, b, φ).
///
/// A triple is admissible when `b ≠ 0`, `2b ∉ Δ` (which forces `b ∉ Δ`), and
/// φ is defined on the whole basis. Whether `3b ∈ Δ` — and the value of
/// `φ(3b)` when it is — does not affect admissibility but decides which
/// central extensions exist, so the report records it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamCheck {
    pub b_nonzero: bool,
    pub two_b_outside: bool,
    pub hom_rank_ok: bool,
    pub three_b: Option<DeltaElt>,
    pub phi_three_b: Option<GaussRat>,
}

impl ParamCheck {
    pub fn is_valid(&self) -> bool {
        self.b_nonzero && self.two_b_outside && self.hom_rank_ok
    }
}

pub fn validate_clb_params(lattice: &DeltaLattice, b: &GaussRat, phi: &GroupHom) -> ParamCheck {
    let two_b = &GaussRat::from_int(2) * b;
    let three_b_val = &GaussRat::from_int(3) * b;
    let hom_rank_ok = phi.rank() == lattice.rank();
    let three_b = lattice.contains(&three_b_val);
    let phi_three_b = if hom_rank_ok {
        three_b.as_ref().map(|e| phi.eval(e))
    } else {
        None
    };
    ParamCheck {
        b_nonzero: !b.is_zero(),
        two_b_outside: lattice.contains(&two_b).is_none(),
        hom_rank_ok,
        three_b,
        phi_three_b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn lat(gens: &[&str]) -> DeltaLattice {
        let gens: Vec<GaussRat> = gens.iter().map(|s| g(s)).collect();
        DeltaLattice::from_generators(&gens).unwrap()
    }

    #[test]
    fn integers_have_unit_basis() {
        let z = lat(&["1"]);
        assert_eq!(z.rank(), 1);
        assert_eq!(z.basis(), &[g("1")]);
        assert_eq!(lat(&["2", "3"]).basis(), &[g("1")]);
        assert_eq!(lat(&["-4", "6"]).basis(), &[g("2")]);
    }

    #[test]
    fn rational_generators_use_common_denominator() {
        assert_eq!(lat(&["1/2", "1/3"]).basis(), &[g("1/6")]);
        assert_eq!(lat(&["2/3"]).basis(), &[g("2/3")]);
    }

    #[test]
    fn gaussian_integers() {
        let zi = lat(&["1", "1*i"]);
        assert_eq!(zi.rank(), 2);
        assert_eq!(zi.basis(), &[g("1"), g("1*i")]);
        // Presentation independence.
        assert_eq!(lat(&["1+1*i", "1", "3*i"]), zi);
        assert_eq!(lat(&["2*i", "3*i"]).basis(), &[g("1*i")]);
    }

    #[test]
    fn membership_and_value_round_trip() {
        let z = lat(&["1/3"]);
        assert_eq!(z.contains(&g("2")), Some(DeltaElt::new(vec![6])));
        assert_eq!(z.contains(&g("1/2")), None);
        assert_eq!(z.contains(&g("1*i")), None);

        let zi = lat(&["1", "1*i"]);
        let e = zi.contains(&g("2-1*i")).unwrap();
        assert_eq!(e, DeltaElt::new(vec![2, -1]));
        assert_eq!(zi.value(&e), g("2-1*i"));
        assert_eq!(zi.contains(&g("1/2")), None);
    }

    #[test]
    fn trivial_group_is_rejected() {
        assert_eq!(
            DeltaLattice::from_generators(&[]),
            Err(LatticeError::EmptyGroup)
        );
        assert_eq!(
            DeltaLattice::from_generators(&[GaussRat::zero()]),
            Err(LatticeError::EmptyGroup)
        );
    }

    #[test]
    fn window_is_lex_sorted() {
        let z = lat(&["1"]);
        let w: Vec<Vec<i64>> = z.window(1).iter().map(|e| e.coords().to_vec()).collect();
        assert_eq!(w, vec![vec![-1], vec![0], vec![1]]);

        let zi = lat(&["1", "1*i"]);
        let w2 = zi.window(1);
        assert_eq!(w2.len(), 9);
        assert_eq!(w2[0], DeltaElt::new(vec![-1, -1]));
        assert_eq!(w2[8], DeltaElt::new(vec![1, 1]));
        assert!(w2.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn elt_arithmetic() {
        let a = DeltaElt::new(vec![2, -1]);
        let b = DeltaElt::new(vec![1, 1]);
        assert_eq!(&a + &b, DeltaElt::new(vec![3, 0]));
        assert_eq!(&a - &b, DeltaElt::new(vec![1, -2]));
        assert_eq!(-&a, DeltaElt::new(vec![-2, 1]));
        assert_eq!(a.to_string(), "(2,-1)");
    }

    #[test]
    fn hom_evaluation() {
        let phi = GroupHom::new(vec![g("1/2")]);
        assert_eq!(hom_eval(&phi, &DeltaElt::new(vec![4])).unwrap(), g("2"));
        assert_eq!(
            hom_eval(&phi, &DeltaElt::new(vec![1, 0])),
            Err(LatticeError::RankMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn parameter_validation() {
        // Δ = ℤ, b = 1/3, φ(n) = n/2: admissible, with 3b = 1 ∈ Δ.
        let z = lat(&["1"]);
        let phi = GroupHom::new(vec![g("1/2")]);
        let report = validate_clb_params(&z, &g("1/3"), &phi);
        assert!(report.is_valid());
        assert_eq!(report.three_b, Some(DeltaElt::new(vec![1])));
        assert_eq!(report.phi_three_b, Some(g("1/2")));

        // b = 1/2 puts 2b = 1 inside ℤ: inadmissible.
        let bad = validate_clb_params(&z, &g("1/2"), &phi);
        assert!(!bad.is_valid());
        assert!(!bad.two_b_outside);

        // b = 0 is never admissible.
        assert!(!validate_clb_params(&z, &GaussRat::zero(), &phi).b_nonzero);

        // Δ = ℤ⊕ℤi, b = 1/3, φ(m+ni) = n: 3b = 1 and φ(3b) = 0.
        let zi = lat(&["1", "1*i"]);
        let phi2 = GroupHom::new(vec![g("0"), g("1")]);
        let report2 = validate_clb_params(&zi, &g("1/3"), &phi2);
        assert!(report2.is_valid());
        assert_eq!(report2.three_b, Some(DeltaElt::new(vec![1, 0])));
        assert_eq!(report2.phi_three_b, Some(GaussRat::zero()));

        // A hom of the wrong rank is flagged.
        assert!(!validate_clb_params(&zi, &g("1/3"), &phi).hom_rank_ok);
    }
}
