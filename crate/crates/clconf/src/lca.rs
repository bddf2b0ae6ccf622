//! Graded Lie conformal algebras with diagonal structure constants.
//!
//! A bracket table assigns to each pair of grading indices (α, β) the
//! structure polynomial p_{α,β}(λ, ∂) of [x_α λ x_β] = p_{α,β}(λ, ∂) x_{α+β}.
//! The bracket of arbitrary elements f(∂)x_α, g(∂)x_β follows by
//! sesquilinearity: f(−λ)·g(λ+∂)·p_{α,β}(λ,∂). The axiom verifiers reduce
//! skew-symmetry and Jacobi to exact polynomial identities and hand back the
//! residual as a witness on failure.

use crate::lattice::{DeltaElt, DeltaLattice};
use crate::poly::{Poly, Var};
use crate::scalar::GaussRat;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Outcome of an exact check: either clean, or failing with the residual
/// object that should have been zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult<W> {
    Pass,
    Fail(W),
}

impl<W> CheckResult<W> {
    pub fn passed(&self) -> bool {
        matches!(self, CheckResult::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            CheckResult::Pass => None,
            CheckResult::Fail(w) => Some(w),
        }
    }
}

impl CheckResult<Poly> {
    /// Pass exactly when the residual vanishes.
    pub fn from_residual(residual: Poly) -> Self {
        if residual.is_zero() {
            CheckResult::Pass
        } else {
            CheckResult::Fail(residual)
        }
    }
}

/// Structure-constant rule (α, β) ↦ p_{α,β}(λ, ∂). Must be a pure function;
/// sweeps evaluate it from many threads.
pub type PairRule = Arc<dyn Fn(&DeltaElt, &DeltaElt) -> Poly + Send + Sync>;

#[derive(Clone)]
pub struct BracketTable {
    lattice: DeltaLattice,
    rule: PairRule,
}

impl BracketTable {
    pub fn new(lattice: DeltaLattice, rule: PairRule) -> Self {
        BracketTable { lattice, rule }
    }

    pub fn lattice(&self) -> &DeltaLattice {
        &self.lattice
    }

    /// The structure polynomial p_{α,β}(λ, ∂).
    pub fn structure_poly(&self, alpha: &DeltaElt, beta: &DeltaElt) -> Poly {
        (self.rule)(alpha, beta)
    }
}

/// A finitely supported element Σ f_α(∂) x_α.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LcaElement {
    components: BTreeMap<DeltaElt, Poly>,
}

fn assert_del_only(f: &Poly) {
    assert!(
        f.degree_in(Var::L).unwrap_or(0) == 0 && f.degree_in(Var::M).unwrap_or(0) == 0,
        "component coefficients must be polynomials in ∂ alone"
    );
}

impl LcaElement {
    pub fn zero() -> Self {
        LcaElement::default()
    }

    /// The basis vector x_α.
    pub fn basis(alpha: DeltaElt) -> Self {
        LcaElement::with_coeff(alpha, Poly::one())
    }

    /// The element f(∂) x_α.
    pub fn with_coeff(alpha: DeltaElt, f: Poly) -> Self {
        let mut e = LcaElement::zero();
        e.add_component(alpha, f);
        e
    }

    pub fn add_component(&mut self, alpha: DeltaElt, f: Poly) {
        assert_del_only(&f);
        let entry = self.components.remove(&alpha).unwrap_or_else(Poly::zero);
        let sum = &entry + &f;
        if !sum.is_zero() {
            self.components.insert(alpha, sum);
        }
    }

    pub fn components(&self) -> &BTreeMap<DeltaElt, Poly> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scale(&self, c: &GaussRat) -> LcaElement {
        if c.is_zero() {
            return LcaElement::zero();
        }
        LcaElement {
            components: self
                .components
                .iter()
                .map(|(a, f)| (a.clone(), f.scale(c)))
                .collect(),
        }
    }
}

/// λ-bracket of two elements; the value at each grading index is a
/// polynomial in (λ, ∂).
pub fn bracket(
    t: &BracketTable,
    a: &LcaElement,
    b: &LcaElement,
) -> BTreeMap<DeltaElt, Poly> {
    let lam_plus_del = &Poly::var(Var::L) + &Poly::var(Var::D);
    let mut out: BTreeMap<DeltaElt, Poly> = BTreeMap::new();
    for (alpha, f) in a.components() {
        assert_eq!(alpha.rank(), t.lattice.rank(), "element over a different lattice");
        // f(∂) acts as f(−λ) on the left of the bracket.
        let f_neg = f.substitute(Var::D, &-Poly::var(Var::L));
        for (beta, g) in b.components() {
            let g_shift = g.substitute(Var::D, &lam_plus_del);
            let p = t.structure_poly(alpha, beta);
            let contrib = &(&f_neg * &g_shift) * &p;
            if contrib.is_zero() {
                continue;
            }
            let target = alpha + beta;
            let entry = out.remove(&target).unwrap_or_else(Poly::zero);
            let sum = &entry + &contrib;
            if !sum.is_zero() {
                out.insert(target, sum);
            }
        }
    }
    out
}

fn factorial(n: u32) -> GaussRat {
    let mut acc = GaussRat::one();
    for k in 2..=n as i64 {
        acc = &acc * &GaussRat::from_int(k);
    }
    acc
}

/// The n-th products x_α (n) x_β for n = 0, 1, …, read off from
/// p_{α,β} = Σ λⁿ/n! · (x_α (n) x_β). Empty when the bracket vanishes.
pub fn nth_products(t: &BracketTable, alpha: &DeltaElt, beta: &DeltaElt) -> Vec<Poly> {
    let p = t.structure_poly(alpha, beta);
    let Some(top) = p.degree_in(Var::L) else {
        return Vec::new();
    };
    (0..=top)
        .map(|n| p.coeff_of(Var::L, n).scale(&factorial(n)))
        .collect()
}

/// Skew-symmetry at one pair: p_{α,β}(λ,∂) + p_{β,α}(−λ−∂, ∂) must vanish.
pub fn check_skew(t: &BracketTable, alpha: &DeltaElt, beta: &DeltaElt) -> CheckResult<Poly> {
    let flip = &-&Poly::var(Var::L) - &Poly::var(Var::D);
    let residual = &t.structure_poly(alpha, beta)
        + &t.structure_poly(beta, alpha).substitute(Var::L, &flip);
    CheckResult::from_residual(residual)
}

/// Jacobi at one triple, as the single graded component identity
/// p_{β,γ}(μ, λ+∂)·p_{α,β+γ}(λ, ∂)
///   − p_{α,β}(λ, −λ−μ)·p_{α+β,γ}(λ+μ, ∂)
///   − p_{α,γ}(λ, μ+∂)·p_{β,α+γ}(μ, ∂) = 0 in ℂ[λ, μ, ∂].
pub fn check_jacobi(
    t: &BracketTable,
    alpha: &DeltaElt,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> CheckResult<Poly> {
    let lam = Poly::var(Var::L);
    let mu = Poly::var(Var::M);
    let del = Poly::var(Var::D);

    // p_{β,γ}(μ, λ+∂): λ ↦ μ and ∂ ↦ λ+∂ simultaneously.
    let lhs = t
        .structure_poly(beta, gamma)
        .subst_all(&[mu.clone(), mu.clone(), &lam + &del])
        * t.structure_poly(alpha, &(beta + gamma));

    let inner = t
        .structure_poly(alpha, beta)
        .substitute(Var::D, &(&-&lam - &mu));
    let first = inner
        * t.structure_poly(&(alpha + beta), gamma)
            .substitute(Var::L, &(&lam + &mu));

    let second = t
        .structure_poly(alpha, gamma)
        .substitute(Var::D, &(&mu + &del))
        * t.structure_poly(beta, &(alpha + gamma))
            .substitute(Var::L, &mu);

    CheckResult::from_residual(&(&lhs - &first) - &second)
}

/// Run a pair check over the square of a window, in parallel; results come
/// back in lexicographic (α, β) order.
pub fn sweep_pairs<W, F>(
    window: &[DeltaElt],
    check: F,
) -> Vec<(DeltaElt, DeltaElt, CheckResult<W>)>
where
    W: Send,
    F: Fn(&DeltaElt, &DeltaElt) -> CheckResult<W> + Sync,
{
    let n = window.len();
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (&window[k / n], &window[k % n]);
            (a.clone(), b.clone(), check(a, b))
        })
        .collect()
}

/// Run a triple check over the cube of a window, in parallel; results come
/// back in lexicographic (α, β, γ) order.
pub fn sweep_triples<W, F>(
    window: &[DeltaElt],
    check: F,
) -> Vec<(DeltaElt, DeltaElt, DeltaElt, CheckResult<W>)>
where
    W: Send,
    F: Fn(&DeltaElt, &DeltaElt, &DeltaElt) -> CheckResult<W> + Sync,
{
    let n = window.len();
    (0..n * n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b, c) = (&window[k / (n * n)], &window[(k / n) % n], &window[k % n]);
            (a.clone(), b.clone(), c.clone(), check(a, b, c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DeltaLattice;

    fn g(s: &str) -> GaussRat {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn e(n: i64) -> DeltaElt {
        DeltaElt::new(vec![n])
    }

    /// Test table over Δ = ℤ with b = 1/3, φ(n) = n/2:
    /// p_{α,β} = (α+b)∂ + (α+β+2b)λ + 3(φ(α)β − φ(β)α) + (φ(α) − φ(β)).
    fn table() -> BracketTable {
        let lattice = DeltaLattice::from_generators(&[g("1")]).unwrap();
        let b = g("1/3");
        let rule: PairRule = Arc::new(move |al: &DeltaElt, be: &DeltaElt| {
            let (a, be_) = (
                GaussRat::from_int(al.coords()[0]),
                GaussRat::from_int(be.coords()[0]),
            );
            let phi = |x: &GaussRat| x * &GaussRat::rat(1, 2);
            let scal = &(&b.inv().unwrap()
                * &(&(&phi(&a) * &be_) - &(&phi(&be_) * &a)))
                + &(&phi(&a) - &phi(&be_));
            let del_c = &a + &b;
            let lam_c = &(&a + &be_) + &(&GaussRat::from_int(2) * &b);
            &(&Poly::var(Var::D).scale(&del_c) + &Poly::var(Var::L).scale(&lam_c))
                + &Poly::constant(scal)
        });
        BracketTable::new(lattice, rule)
    }

    #[test]
    fn bracket_on_basis_vectors() {
        let t = table();
        let out = bracket(&t, &LcaElement::basis(e(1)), &LcaElement::basis(e(2)));
        assert_eq!(out.len(), 1);
        assert_eq!(out[&e(3)], p("4/3*D + 11/3*L + -1/2"));
    }

    #[test]
    fn bracket_respects_sesquilinearity() {
        let t = table();
        let base = p("4/3*D + 11/3*L + -1/2");
        let da = LcaElement::with_coeff(e(1), Poly::var(Var::D));
        let out = bracket(&t, &da, &LcaElement::basis(e(2)));
        assert_eq!(out[&e(3)], &-&Poly::var(Var::L) * &base);

        let db = LcaElement::with_coeff(e(2), Poly::var(Var::D));
        let out2 = bracket(&t, &LcaElement::basis(e(1)), &db);
        assert_eq!(
            out2[&e(3)],
            &(&Poly::var(Var::L) + &Poly::var(Var::D)) * &base
        );
    }

    #[test]
    fn nth_products_extraction() {
        let t = table();
        assert_eq!(
            nth_products(&t, &e(1), &e(2)),
            vec![p("4/3*D + -1/2"), p("11/3")]
        );
        assert_eq!(nth_products(&t, &e(0), &e(0)), vec![p("1/3*D"), p("2/3")]);

        let trivial = BracketTable::new(
            t.lattice().clone(),
            Arc::new(|_: &DeltaElt, _: &DeltaElt| Poly::zero()),
        );
        assert_eq!(nth_products(&trivial, &e(1), &e(2)), Vec::<Poly>::new());
    }

    #[test]
    fn skew_holds_on_good_table() {
        let t = table();
        assert!(check_skew(&t, &e(0), &e(0)).passed());
        assert!(check_skew(&t, &e(1), &e(2)).passed());
        for (a, b, res) in sweep_pairs(&t.lattice().window(3), |a, b| check_skew(&t, a, b)) {
            assert!(res.passed(), "skew failed at ({a}, {b})");
        }
    }

    #[test]
    fn skew_catches_dropped_lambda_coefficient() {
        // λ-coefficient weakened from α+β+2b to α+β+b: the residual is b∂.
        let t = table();
        let inner = t.clone();
        let broken = BracketTable::new(
            t.lattice().clone(),
            Arc::new(move |a: &DeltaElt, b: &DeltaElt| {
                &inner.structure_poly(a, b) - &Poly::var(Var::L).scale(&g("1/3"))
            }),
        );
        let res = check_skew(&broken, &e(1), &e(2));
        assert_eq!(res.witness(), Some(&p("1/3*D")));
    }

    #[test]
    fn jacobi_holds_on_good_table() {
        let t = table();
        assert!(check_jacobi(&t, &e(0), &e(0), &e(0)).passed());
        assert!(check_jacobi(&t, &e(1), &e(2), &e(-1)).passed());
        for (a, b, c, res) in
            sweep_triples(&t.lattice().window(2), |a, b, c| check_jacobi(&t, a, b, c))
        {
            assert!(res.passed(), "jacobi failed at ({a}, {b}, {c})");
        }
    }

    #[test]
    fn jacobi_catches_doubled_constant() {
        let t = table();
        let inner = t.clone();
        let doubled = BracketTable::new(
            t.lattice().clone(),
            Arc::new(move |a: &DeltaElt, b: &DeltaElt| {
                let p = inner.structure_poly(a, b);
                if a == &DeltaElt::new(vec![1]) && b == &DeltaElt::new(vec![2]) {
                    p.scale(&GaussRat::from_int(2))
                } else {
                    p
                }
            }),
        );
        let res = check_jacobi(&doubled, &e(1), &e(2), &e(-1));
        assert!(!res.passed());
        assert!(!res.witness().unwrap().is_zero());
    }

    #[test]
    fn degree_bounds_on_family_table() {
        let t = table();
        for a in t.lattice().window(3) {
            for b in t.lattice().window(3) {
                let q = t.structure_poly(&a, &b);
                assert!(q.degree_in(Var::L).unwrap_or(0) <= 1);
                assert!(q.degree_in(Var::D).unwrap_or(0) <= 1);
                assert_eq!(q.degree_in(Var::M).unwrap_or(0), 0);
            }
        }
    }
}
