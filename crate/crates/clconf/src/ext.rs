//! Central extensions of CL(b, φ) by a one-dimensional center ℂ𝔠.
//!
//! A cocycle assigns to each pair of grading indices a polynomial in λ; the
//! extended bracket is [x_α λ x_β]^ = p_{α,β}(λ,∂)x_{α+β} + c(α,β)(λ)𝔠 with
//! ∂𝔠 = 0. The classified nontrivial cocycles are supported on the diagonal
//! α+β = −3b and given there by an additive g with g(3b) = 0; everything
//! else is a coboundary. This module builds both kinds, verifies the cocycle
//! conditions, decomposes arbitrary window-valid cocycles back into
//! (g, Φ)-form, decides equivalence, and extends the coefficient algebra.

use crate::clb::{clb_bracket, coeff_bracket, ClbAlgebra, CoeffElt};
use crate::lattice::{DeltaElt, GroupHom};
use crate::lca::CheckResult;
use crate::poly::{Poly, Var};
use crate::scalar::GaussRat;
use std::fmt;
use std::sync::Arc;

/// Total rule (α, β) ↦ c(α,β)(λ), a polynomial in λ only.
pub type CocycleRule = Arc<dyn Fn(&DeltaElt, &DeltaElt) -> Poly + Send + Sync>;

/// Total rule σ ↦ Φ(σ) for coboundary data.
pub type ScalarRule = Arc<dyn Fn(&DeltaElt) -> GaussRat + Send + Sync>;

#[derive(Clone)]
pub struct Cocycle {
    rule: CocycleRule,
    degree_bound: u32,
}

impl fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cocycle")
            .field("degree_bound", &self.degree_bound)
            .finish_non_exhaustive()
    }
}

impl Cocycle {
    pub fn new(rule: CocycleRule, degree_bound: u32) -> Self {
        Cocycle { rule, degree_bound }
    }

    pub fn zero() -> Self {
        Cocycle::new(Arc::new(|_: &DeltaElt, _: &DeltaElt| Poly::zero()), 0)
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    /// Evaluate the rule; the output must mention λ only.
    pub fn eval(&self, alpha: &DeltaElt, beta: &DeltaElt) -> Poly {
        let out = (self.rule)(alpha, beta);
        assert!(
            out.degree_in(Var::M).unwrap_or(0) == 0 && out.degree_in(Var::D).unwrap_or(0) == 0,
            "cocycle values must be polynomials in λ alone"
        );
        out
    }

    /// Pointwise sum; the bound is the max of the two bounds.
    pub fn add(&self, other: &Cocycle) -> Cocycle {
        let (a, b) = (self.rule.clone(), other.rule.clone());
        Cocycle::new(
            Arc::new(move |x: &DeltaElt, y: &DeltaElt| &a(x, y) + &b(x, y)),
            self.degree_bound.max(other.degree_bound),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonicalizeError {
    #[error("not a cocycle: {condition} fails at {instance} with residual {witness}")]
    InvalidCocycle {
        condition: &'static str,
        instance: String,
        witness: String,
    },
    #[error("not canonicalizable: {0}")]
    NotCanonicalizable(String),
}

/// The extension R ⊕ ℂ𝔠 of a base algebra by a cocycle. When the cocycle
/// came from a classified g, the hom is kept for the coefficient-algebra
/// extension.
#[derive(Clone)]
pub struct ExtendedAlgebra {
    base: ClbAlgebra,
    cocycle: Cocycle,
    g: Option<GroupHom>,
}

impl ExtendedAlgebra {
    pub fn new(base: ClbAlgebra, cocycle: Cocycle) -> Self {
        ExtendedAlgebra {
            base,
            cocycle,
            g: None,
        }
    }

    /// Build the classified extension from its defining hom.
    pub fn from_g(base: ClbAlgebra, g: GroupHom) -> Result<Self, ExtError> {
        let cocycle = cocycle_from_g(&base, &g)?;
        Ok(ExtendedAlgebra {
            base,
            cocycle,
            g: Some(g),
        })
    }

    pub fn base(&self) -> &ClbAlgebra {
        &self.base
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn g(&self) -> Option<&GroupHom> {
        self.g.as_ref()
    }
}

/// The classified cocycle c(α,β) = g(α)·[α+β = −3b]. Nonzero g requires
/// 3b ∈ Δ, φ(3b) = 0 and g(3b) = 0; the zero hom is always admissible (the
/// trivial extension).
pub fn cocycle_from_g(algebra: &ClbAlgebra, g: &GroupHom) -> Result<Cocycle, ExtError> {
    if g.rank() != algebra.lattice().rank() {
        return Err(ExtError::PreconditionViolated(format!(
            "g has {} basis values but the lattice has rank {}",
            g.rank(),
            algebra.lattice().rank()
        )));
    }
    let minus_three_b = algebra.minus_three_b();
    if !g.is_zero() {
        let Some(ref m3b) = minus_three_b else {
            return Err(ExtError::PreconditionViolated("3b ∉ Δ".to_string()));
        };
        let three_b = -m3b;
        let phi_3b = algebra.phi_at(&three_b);
        if !phi_3b.is_zero() {
            return Err(ExtError::PreconditionViolated(format!(
                "φ(3b) = {phi_3b} ≠ 0"
            )));
        }
        let g_3b = g.eval(&three_b);
        if !g_3b.is_zero() {
            return Err(ExtError::PreconditionViolated(format!(
                "g(3b) = {g_3b} ≠ 0"
            )));
        }
    }
    let g = g.clone();
    let rule: CocycleRule = Arc::new(move |alpha: &DeltaElt, beta: &DeltaElt| {
        match &minus_three_b {
            Some(m3b) if &(alpha + beta) == m3b => Poly::constant(g.eval(alpha)),
            _ => Poly::zero(),
        }
    });
    Ok(Cocycle::new(rule, 0))
}

/// The coboundary of Φ: c(α,β)(λ) = λ·Φ(a∗b) + Φ([b,a]) with a∗b the
/// symmetrized Novikov product, which works out to
/// ((α+β+2b)λ + s(α,β))·Φ(α+β).
pub fn coboundary(algebra: &ClbAlgebra, phi: ScalarRule) -> Cocycle {
    let algebra = algebra.clone();
    let rule: CocycleRule = Arc::new(move |alpha: &DeltaElt, beta: &DeltaElt| {
        let sum = alpha + beta;
        let scale = phi(&sum);
        if scale.is_zero() {
            return Poly::zero();
        }
        let lam_c = &algebra.value(&sum) + &(&GaussRat::from_int(2) * algebra.b());
        (&Poly::var(Var::L).scale(&lam_c) + &Poly::constant(algebra.s_term(alpha, beta)))
            .scale(&scale)
    });
    Cocycle::new(rule, 1)
}

/// Per-condition outcome of the cocycle check on a triple: skew-symmetry of
/// the pair (α, β) and Jacobi-compatibility of the triple, both as exact
/// identities (skew in λ, compatibility in λ and μ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleCheck {
    pub skew: CheckResult<Poly>,
    pub compat: CheckResult<Poly>,
}

impl CocycleCheck {
    pub fn passed(&self) -> bool {
        self.skew.passed() && self.compat.passed()
    }
}

/// Skew-symmetry residual c(α,β)(λ) + c(β,α)(−λ).
pub fn cocycle_skew_residual(c: &Cocycle, alpha: &DeltaElt, beta: &DeltaElt) -> Poly {
    &c.eval(alpha, beta) + &c.eval(beta, alpha).substitute(Var::L, &-Poly::var(Var::L))
}

/// Jacobi-compatibility residual
/// p_{β,γ}(μ,λ)·c(α,β+γ)(λ) − p_{α,γ}(λ,μ)·c(β,α+γ)(μ)
///   − p_{α,β}(λ,−λ−μ)·c(α+β,γ)(λ+μ) in ℂ[λ,μ].
pub fn cocycle_compat_residual(
    algebra: &ClbAlgebra,
    c: &Cocycle,
    alpha: &DeltaElt,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> Poly {
    let lam = Poly::var(Var::L);
    let mu = Poly::var(Var::M);

    // p_{β,γ}(μ, λ): λ ↦ μ and ∂ ↦ λ simultaneously.
    let t1 = clb_bracket(algebra, beta, gamma).subst_all(&[mu.clone(), mu.clone(), lam.clone()])
        * c.eval(alpha, &(beta + gamma));
    let t2 = clb_bracket(algebra, alpha, gamma).substitute(Var::D, &mu)
        * c.eval(beta, &(alpha + gamma)).substitute(Var::L, &mu);
    let t3 = clb_bracket(algebra, alpha, beta).substitute(Var::D, &(&-&lam - &mu))
        * c.eval(&(alpha + beta), gamma).substitute(Var::L, &(&lam + &mu));
    &(&t1 - &t2) - &t3
}

/// Both cocycle conditions at one triple. The ∂-rules are enforced by
/// representation (values are λ-polynomials on basis pairs), so only skew
/// and compatibility need checking.
pub fn check_cocycle(
    algebra: &ClbAlgebra,
    c: &Cocycle,
    alpha: &DeltaElt,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> CocycleCheck {
    CocycleCheck {
        skew: CheckResult::from_residual(cocycle_skew_residual(c, alpha, beta)),
        compat: CheckResult::from_residual(cocycle_compat_residual(
            algebra, c, alpha, beta, gamma,
        )),
    }
}

/// Valid cocycles have λ-degree at most 3; flags a pair that exceeds it.
pub fn check_degree_bound(c: &Cocycle, alpha: &DeltaElt, beta: &DeltaElt) -> CheckResult<Poly> {
    let value = c.eval(alpha, beta);
    if value.degree_in(Var::L).unwrap_or(0) <= 3 {
        CheckResult::Pass
    } else {
        CheckResult::Fail(value)
    }
}

/// Jacobi identity of the extended bracket at one triple: the base component
/// is the ordinary Jacobi residual, the 𝔠-component is the cocycle
/// compatibility residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtJacobi {
    pub base: CheckResult<Poly>,
    pub central: CheckResult<Poly>,
}

impl ExtJacobi {
    pub fn passed(&self) -> bool {
        self.base.passed() && self.central.passed()
    }
}

pub fn extended_jacobi(
    ext: &ExtendedAlgebra,
    alpha: &DeltaElt,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> ExtJacobi {
    let table = ext.base().bracket_table();
    ExtJacobi {
        base: crate::lca::check_jacobi(&table, alpha, beta, gamma),
        central: CheckResult::from_residual(cocycle_compat_residual(
            ext.base(),
            ext.cocycle(),
            alpha,
            beta,
            gamma,
        )),
    }
}

/// The canonical decomposition of a window-valid cocycle:
/// c = coboundary(Φ) + cocycle_from_g(g).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// The diagonal hom, given on the lattice basis.
    pub g: GroupHom,
    /// Φ on the sum window (all α+β with α, β in the window), in order.
    pub phi: Vec<(DeltaElt, GaussRat)>,
}

fn constant_part(p: &Poly) -> GaussRat {
    p.coeff([0, 0, 0])
}

/// Decompose a cocycle into (g, Φ) over the window of coordinate bound `w`.
///
/// Steps: verify the cocycle conditions on every window pair/triple
/// (`InvalidCocycle` otherwise); require λ-degree ≤ 1; read the λ-part as
/// f(α+β) by evaluating at (0, α+β) and set Φ(σ) = f(σ)/(σ+2b) — the
/// denominator cannot vanish because 2b ∉ Δ; extract g from the constant
/// residual on the −3b diagonal at the lattice basis; finally reassemble and
/// compare against the input on every window pair. Any shape violation is
/// reported as `NotCanonicalizable` with a diagnostic.
pub fn canonicalize_cocycle(
    algebra: &ClbAlgebra,
    c: &Cocycle,
    w: i64,
) -> Result<CanonicalForm, CanonicalizeError> {
    let window = algebra.lattice().window(w);

    for alpha in &window {
        for beta in &window {
            let skew = cocycle_skew_residual(c, alpha, beta);
            if !skew.is_zero() {
                return Err(CanonicalizeError::InvalidCocycle {
                    condition: "skew-symmetry",
                    instance: format!("({alpha}, {beta})"),
                    witness: skew.to_string(),
                });
            }
        }
    }
    for result in crate::lca::sweep_triples(&window, |a, b, g| {
        CheckResult::from_residual(cocycle_compat_residual(algebra, c, a, b, g))
    }) {
        let (alpha, beta, gamma, res) = result;
        if let Some(witness) = res.witness() {
            return Err(CanonicalizeError::InvalidCocycle {
                condition: "compatibility",
                instance: format!("({alpha}, {beta}, {gamma})"),
                witness: witness.to_string(),
            });
        }
    }

    for alpha in &window {
        for beta in &window {
            let deg = c.eval(alpha, beta).degree_in(Var::L).unwrap_or(0);
            if deg > 1 {
                return Err(CanonicalizeError::NotCanonicalizable(format!(
                    "λ-degree {deg} at ({alpha}, {beta}) exceeds the classified shape"
                )));
            }
        }
    }

    let rank = algebra.lattice().rank();
    let f = {
        let c = c.clone();
        let zero = DeltaElt::zero(rank);
        move |sigma: &DeltaElt| constant_part(&c.eval(&zero, sigma).coeff_of(Var::L, 1))
    };
    for alpha in &window {
        for beta in &window {
            let lam_part = constant_part(&c.eval(alpha, beta).coeff_of(Var::L, 1));
            let expected = f(&(alpha + beta));
            if lam_part != expected {
                return Err(CanonicalizeError::NotCanonicalizable(format!(
                    "λ-part at ({alpha}, {beta}) is {lam_part}, but depends on the pair, not the sum (f(α+β) = {expected})"
                )));
            }
        }
    }

    let phi_at = {
        let algebra = algebra.clone();
        let f = f.clone();
        move |sigma: &DeltaElt| {
            let denom = &algebra.value(sigma) + &(&GaussRat::from_int(2) * algebra.b());
            &f(sigma) / &denom
        }
    };

    // Constant residual after removing the coboundary: must live on the
    // −3b diagonal and be additive there.
    let residual = |alpha: &DeltaElt, beta: &DeltaElt| {
        let c0 = constant_part(&c.eval(alpha, beta));
        &c0 - &(&algebra.s_term(alpha, beta) * &phi_at(&(alpha + beta)))
    };

    let minus_three_b = algebra.minus_three_b();
    let g_on_basis: Vec<GaussRat> = match &minus_three_b {
        Some(m3b) => (0..rank)
            .map(|k| {
                let mut coords = vec![0i64; rank];
                coords[k] = 1;
                let basis_elt = DeltaElt::new(coords);
                residual(&basis_elt, &(m3b - &basis_elt))
            })
            .collect(),
        None => vec![GaussRat::zero(); rank],
    };
    let g = GroupHom::new(g_on_basis);

    if let Some(m3b) = &minus_three_b {
        let three_b = -m3b;
        let g_3b = g.eval(&three_b);
        if !g_3b.is_zero() {
            return Err(CanonicalizeError::NotCanonicalizable(format!(
                "diagonal residual gives g(3b) = {g_3b} ≠ 0"
            )));
        }
        if !g.is_zero() && !algebra.phi_at(&three_b).is_zero() {
            return Err(CanonicalizeError::NotCanonicalizable(
                "nonzero diagonal residual although φ(3b) ≠ 0".to_string(),
            ));
        }
    }

    let phi_rule: ScalarRule = Arc::new(phi_at.clone());
    let rebuilt = coboundary(algebra, phi_rule).add(
        &cocycle_from_g(algebra, &g)
            .map_err(|e| CanonicalizeError::NotCanonicalizable(e.to_string()))?,
    );
    for alpha in &window {
        for beta in &window {
            let diff = &c.eval(alpha, beta) - &rebuilt.eval(alpha, beta);
            if !diff.is_zero() {
                return Err(CanonicalizeError::NotCanonicalizable(format!(
                    "off the classified shape at ({alpha}, {beta}): residual {diff}"
                )));
            }
        }
    }

    let phi_table = algebra
        .lattice()
        .window(2 * w)
        .into_iter()
        .map(|sigma| {
            let value = phi_at(&sigma);
            (sigma, value)
        })
        .collect();
    Ok(CanonicalForm { g, phi: phi_table })
}

/// Decide whether the extensions for g1 and g2 are equivalent, i.e. whether
/// g1 = g2 + k·φ for a single scalar k across the whole basis; returns the k.
pub fn cocycles_equivalent(
    algebra: &ClbAlgebra,
    g1: &GroupHom,
    g2: &GroupHom,
) -> Option<GaussRat> {
    let rank = algebra.lattice().rank();
    assert!(
        g1.rank() == rank && g2.rank() == rank,
        "homs over a different lattice"
    );
    let phi = algebra.phi();
    let diff: Vec<GaussRat> = (0..rank)
        .map(|k| &g1.on_basis()[k] - &g2.on_basis()[k])
        .collect();
    let k = match (0..rank).find(|&k| !phi.on_basis()[k].is_zero()) {
        Some(k) => &diff[k] / &phi.on_basis()[k],
        None => GaussRat::zero(),
    };
    let consistent = (0..rank).all(|j| diff[j] == &k * &phi.on_basis()[j]);
    consistent.then_some(k)
}

/// An element of the extended coefficient algebra: a base combination plus a
/// multiple of the central symbol 𝔠₋₁.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtCoeffElt {
    pub base: CoeffElt,
    pub central: GaussRat,
}

impl ExtCoeffElt {
    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.central.is_zero()
    }
}

impl fmt::Display for ExtCoeffElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.central.is_zero() {
            return write!(f, "{}", self.base);
        }
        let central = if self.central.is_rational() {
            format!("{}*c(-1)", self.central)
        } else {
            format!("({})*c(-1)", self.central)
        };
        if self.base.is_zero() {
            write!(f, "{central}")
        } else {
            write!(f, "{} + {central}", self.base)
        }
    }
}

/// The coefficient-algebra bracket of the classified extension:
/// the base bracket plus g(α)·[α+β = −3b]·[i+j = −1]·𝔠₋₁.
///
/// Panics if the extension was not built through [`ExtendedAlgebra::from_g`].
pub fn coeff_extension_bracket(
    ext: &ExtendedAlgebra,
    (alpha, i): (&DeltaElt, i64),
    (beta, j): (&DeltaElt, i64),
) -> ExtCoeffElt {
    let g = ext
        .g()
        .expect("coefficient extension requires an extension built from g");
    let base = coeff_bracket(ext.base(), (alpha, i), (beta, j));
    let central = match ext.base().minus_three_b() {
        Some(m3b) if alpha + beta == m3b && i + j == -1 => g.eval(alpha),
        _ => GaussRat::zero(),
    };
    ExtCoeffElt { base, central }
}

/// Bilinear extension of the extended coefficient bracket. The central
/// symbol never brackets back, so only base×base terms contribute.
pub fn ext_coeff_bracket_elts(ext: &ExtendedAlgebra, a: &CoeffElt, b: &CoeffElt) -> ExtCoeffElt {
    let mut base = CoeffElt::zero();
    let mut central = GaussRat::zero();
    for ((alpha, i), ca) in a.terms() {
        for ((beta, j), cb) in b.terms() {
            let piece = coeff_extension_bracket(ext, (alpha, *i), (beta, *j));
            let weight = ca * cb;
            base = base.add(&piece.base.scale(&weight));
            central = &central + &(&piece.central * &weight);
        }
    }
    ExtCoeffElt { base, central }
}

/// Jacobi identity of the extended coefficient algebra on a triple of basis
/// symbols, including the central parts.
pub fn check_ext_coeff_jacobi(
    ext: &ExtendedAlgebra,
    a: (&DeltaElt, i64),
    b: (&DeltaElt, i64),
    c: (&DeltaElt, i64),
) -> CheckResult<ExtCoeffElt> {
    let a_elt = CoeffElt::basis(a.0.clone(), a.1);
    let b_elt = CoeffElt::basis(b.0.clone(), b.1);
    let c_elt = CoeffElt::basis(c.0.clone(), c.1);
    let ab = coeff_extension_bracket(ext, a, b);
    let ac = coeff_extension_bracket(ext, a, c);
    let bc = coeff_extension_bracket(ext, b, c);
    let t1 = ext_coeff_bracket_elts(ext, &a_elt, &bc.base);
    let t2 = ext_coeff_bracket_elts(ext, &ab.base, &c_elt);
    let t3 = ext_coeff_bracket_elts(ext, &b_elt, &ac.base);
    let residual = ExtCoeffElt {
        base: t1.base.sub(&t2.base).sub(&t3.base),
        central: &(&t1.central - &t2.central) - &t3.central,
    };
    if residual.is_zero() {
        CheckResult::Pass
    } else {
        CheckResult::Fail(residual)
    }
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

    fn c1() -> ClbAlgebra {
        let lattice = DeltaLattice::from_generators(&[g("1")]).unwrap();
        ClbAlgebra::new(lattice, g("1/3"), GroupHom::new(vec![g("1/2")])).unwrap()
    }

    fn c2() -> ClbAlgebra {
        let lattice = DeltaLattice::from_generators(&[g("1"), g("1*i")]).unwrap();
        ClbAlgebra::new(lattice, g("1/3"), GroupHom::new(vec![g("0"), g("1")])).unwrap()
    }

    fn e(n: i64) -> DeltaElt {
        DeltaElt::new(vec![n])
    }

    fn e2(m: i64, n: i64) -> DeltaElt {
        DeltaElt::new(vec![m, n])
    }

    /// g(m+ni) = 2n on the rank-2 config.
    fn g2n() -> GroupHom {
        GroupHom::new(vec![g("0"), g("2")])
    }

    #[test]
    fn from_g_values() {
        let a = c2();
        let c = cocycle_from_g(&a, &g2n()).unwrap();
        assert_eq!(c.eval(&e2(0, 1), &e2(-1, -1)), p("2"));
        assert_eq!(c.eval(&e2(1, 0), &e2(0, 0)), Poly::zero());
    }

    #[test]
    fn from_g_preconditions() {
        // φ(3b) = 1/2 ≠ 0 on the rank-1 config: nonzero g rejected.
        let a = c1();
        let err = cocycle_from_g(&a, &GroupHom::new(vec![g("1")])).unwrap_err();
        assert!(err.to_string().contains("φ(3b)"), "got {err}");
        assert!(cocycle_from_g(&a, &GroupHom::zero(1)).is_ok());

        // 3b ∉ Δ: nonzero g rejected.
        let lattice = DeltaLattice::from_generators(&[g("1")]).unwrap();
        let a5 = ClbAlgebra::new(lattice, g("1/5"), GroupHom::new(vec![g("0")])).unwrap();
        let err = cocycle_from_g(&a5, &GroupHom::new(vec![g("1")])).unwrap_err();
        assert!(err.to_string().contains("3b ∉ Δ"), "got {err}");

        // g(3b) ≠ 0 rejected: φ ≡ 0 keeps φ(3b) = 0, g(1) = 1 ≠ 0 at 3b = 1.
        let lattice = DeltaLattice::from_generators(&[g("1")]).unwrap();
        let a0 = ClbAlgebra::new(lattice, g("1/3"), GroupHom::zero(1)).unwrap();
        let err = cocycle_from_g(&a0, &GroupHom::new(vec![g("1")])).unwrap_err();
        assert!(err.to_string().contains("g(3b)"), "got {err}");
    }

    #[test]
    fn classified_cocycle_passes_conditions() {
        let a = c2();
        let c = cocycle_from_g(&a, &g2n()).unwrap();
        // A triple summing to −3b = −1 and one that does not.
        assert!(check_cocycle(&a, &c, &e2(0, 1), &e2(0, -1), &e2(-1, 0)).passed());
        assert!(check_cocycle(&a, &c, &e2(1, 0), &e2(0, 0), &e2(0, 1)).passed());
        for alpha in a.lattice().window(1) {
            for beta in a.lattice().window(1) {
                for gamma in a.lattice().window(1) {
                    let chk = check_cocycle(&a, &c, &alpha, &beta, &gamma);
                    assert!(chk.passed(), "failed at ({alpha}, {beta}, {gamma})");
                }
            }
        }
    }

    #[test]
    fn non_additive_diagonal_table_fails() {
        // h(m+ni) = n² is not additive; the triple (i, i, −1−2i) sums to −3b.
        let a = c2();
        let m3b = a.minus_three_b().unwrap();
        let rule: CocycleRule = Arc::new(move |alpha: &DeltaElt, beta: &DeltaElt| {
            if &(alpha + beta) == &m3b {
                let n = alpha.coords()[1];
                Poly::constant(GaussRat::from_int(n * n))
            } else {
                Poly::zero()
            }
        });
        let c = Cocycle::new(rule, 0);
        let chk = check_cocycle(&a, &c, &e2(0, 1), &e2(0, 1), &e2(-1, -2));
        assert!(!chk.passed());
        assert!(chk.skew.witness().is_some() || chk.compat.witness().is_some());
    }

    #[test]
    fn coboundary_values() {
        let a = c1();
        let delta3: ScalarRule = Arc::new(|sigma: &DeltaElt| {
            if sigma == &DeltaElt::new(vec![3]) {
                GaussRat::one()
            } else {
                GaussRat::zero()
            }
        });
        let c = coboundary(&a, delta3);
        assert_eq!(c.eval(&e(1), &e(2)), p("11/3*L + -1/2"));
        assert_eq!(c.eval(&e(1), &e(1)), Poly::zero());

        let zero_rule: ScalarRule = Arc::new(|_: &DeltaElt| GaussRat::zero());
        assert_eq!(coboundary(&a, zero_rule).eval(&e(1), &e(2)), Poly::zero());

        // Φ(σ) = f(σ)/(σ+2b) with f(σ) = σ makes the λ-part exactly (α+β)λ.
        let inner = a.clone();
        let linear: ScalarRule = Arc::new(move |sigma: &DeltaElt| {
            let v = inner.value(sigma);
            &v / &(&v + &(&GaussRat::from_int(2) * inner.b()))
        });
        let c = coboundary(&a, linear);
        assert_eq!(
            c.eval(&e(1), &e(2)).coeff_of(Var::L, 1),
            Poly::constant(g("3"))
        );
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let a = c1();
        let inner = a.clone();
        let phi: ScalarRule = Arc::new(move |sigma: &DeltaElt| {
            let v = inner.value(sigma);
            &v / &(&v + &(&GaussRat::from_int(2) * inner.b()))
        });
        let c = coboundary(&a, phi);
        for alpha in a.lattice().window(2) {
            for beta in a.lattice().window(2) {
                for gamma in a.lattice().window(2) {
                    let chk = check_cocycle(&a, &c, &alpha, &beta, &gamma);
                    assert!(chk.passed(), "failed at ({alpha}, {beta}, {gamma})");
                }
            }
        }
        assert!(check_degree_bound(&c, &e(1), &e(2)).passed());
    }

    #[test]
    fn extended_jacobi_holds() {
        let ext = ExtendedAlgebra::from_g(c2(), g2n()).unwrap();
        for alpha in ext.base().lattice().window(1) {
            for beta in ext.base().lattice().window(1) {
                for gamma in ext.base().lattice().window(1) {
                    let chk = extended_jacobi(&ext, &alpha, &beta, &gamma);
                    assert!(chk.passed(), "failed at ({alpha}, {beta}, {gamma})");
                }
            }
        }
    }

    #[test]
    fn canonicalize_fixed_point() {
        let a = c2();
        let c = cocycle_from_g(&a, &g2n()).unwrap();
        let form = canonicalize_cocycle(&a, &c, 2).unwrap();
        assert_eq!(form.g, g2n());
        assert!(form.phi.iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn canonicalize_round_trip() {
        let a = c2();
        // Arbitrary Φ₀ (no additivity required): Φ₀(m+ni) = m − n + mn.
        let phi0: ScalarRule = Arc::new(|sigma: &DeltaElt| {
            let (m, n) = (sigma.coords()[0], sigma.coords()[1]);
            GaussRat::from_int(m - n + m * n)
        });
        let c = coboundary(&a, phi0.clone()).add(&cocycle_from_g(&a, &g2n()).unwrap());
        let form = canonicalize_cocycle(&a, &c, 2).unwrap();
        assert_eq!(form.g, g2n());
        assert_eq!(cocycles_equivalent(&a, &form.g, &g2n()), Some(g("0")));
        for (sigma, value) in &form.phi {
            assert_eq!(value, &phi0(sigma), "Φ mismatch at {sigma}");
        }
    }

    #[test]
    fn canonicalize_pure_coboundary_on_rank_one() {
        let a = c1();
        let phi0: ScalarRule =
            Arc::new(|sigma: &DeltaElt| GaussRat::from_int(sigma.coords()[0] * 2 - 1));
        let c = coboundary(&a, phi0.clone());
        let form = canonicalize_cocycle(&a, &c, 3).unwrap();
        assert!(form.g.is_zero());
        for (sigma, value) in &form.phi {
            assert_eq!(value, &phi0(sigma));
        }
    }

    #[test]
    fn canonicalize_rejects_non_cocycles() {
        let a = c1();
        let rule: CocycleRule = Arc::new(|_: &DeltaElt, _: &DeltaElt| Poly::one());
        let err = canonicalize_cocycle(&a, &Cocycle::new(rule, 0), 1).unwrap_err();
        assert!(matches!(err, CanonicalizeError::InvalidCocycle { .. }));
    }

    #[test]
    fn equivalence_solving() {
        let a = c2();
        let g3n = GroupHom::new(vec![g("0"), g("3")]);
        assert_eq!(cocycles_equivalent(&a, &g2n(), &g2n()), Some(g("0")));
        assert_eq!(cocycles_equivalent(&a, &g3n, &g2n()), Some(g("1")));
        // Extra dependence on the first coordinate, where φ vanishes: no k.
        let g_bad = GroupHom::new(vec![g("1"), g("0")]);
        assert_eq!(cocycles_equivalent(&a, &g_bad, &GroupHom::zero(2)), None);
    }

    #[test]
    fn coefficient_extension() {
        let ext = ExtendedAlgebra::from_g(c2(), g2n()).unwrap();
        let alpha = e2(0, 1);
        let beta = e2(-1, -1);
        let out = coeff_extension_bracket(&ext, (&alpha, 0), (&beta, -1));
        assert_eq!(out.central, g("2"));
        assert_eq!(
            out.base,
            coeff_bracket(ext.base(), (&alpha, 0), (&beta, -1))
        );

        assert!(coeff_extension_bracket(&ext, (&alpha, 0), (&beta, 0))
            .central
            .is_zero());
        assert!(
            coeff_extension_bracket(&ext, (&e2(1, 0), 0), (&e2(2, 0), -1))
                .central
                .is_zero()
        );
    }

    #[test]
    fn extended_coeff_jacobi_samples() {
        let ext = ExtendedAlgebra::from_g(c2(), g2n()).unwrap();
        for (a, i, b, j, c, k) in [
            ((0, 1), 0, (0, -1), 2, (-1, 0), -3),
            ((0, 1), 1, (-1, -2), -1, (0, 1), -1),
            ((1, 1), -2, (-1, 0), 1, (-1, -1), 0),
        ] {
            let (aa, bb, cc) = (e2(a.0, a.1), e2(b.0, b.1), e2(c.0, c.1));
            let res = check_ext_coeff_jacobi(&ext, (&aa, i), (&bb, j), (&cc, k));
            assert!(res.passed(), "failed at {aa},{i} {bb},{j} {cc},{k}");
        }
    }
}
