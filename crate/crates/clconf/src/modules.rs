//! Free intermediate series modules over CL(b, φ).
//!
//! A module table assigns to each pair (β, γ) the structure polynomial
//! f_{β,γ}(λ,∂) of the diagonal action x_β λ M_γ = f_{β,γ}(λ,∂)M_{β+γ}.
//! The classified actions come in three families — two anchored at a
//! distinguished degree γ₀ and one parameterized by (c, e) — built from a
//! q-sequence and the m-sequence m_σ = c − φ(σ)/b. This module constructs
//! the families, verifies the module identity, classifies structure
//! polynomials into the four admissible shapes, normalizes gauges, and sets
//! up the degree-bounded obstruction systems showing finite modules over
//! the coefficient algebras are trivial.

use crate::clb::{clb_bracket, ClbAlgebra};
use crate::lattice::{DeltaElt, DeltaLattice};
use crate::lca::CheckResult;
use crate::linalg::kernel_basis;
use crate::poly::{Poly, Var};
use crate::scalar::GaussRat;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Total rule (β, γ) ↦ f_{β,γ}(λ,∂).
pub type ModuleRule = Arc<dyn Fn(&DeltaElt, &DeltaElt) -> Poly + Send + Sync>;

#[derive(Clone)]
pub struct ModuleTable {
    lattice: DeltaLattice,
    rule: ModuleRule,
}

impl fmt::Debug for ModuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleTable").finish_non_exhaustive()
    }
}

impl ModuleTable {
    pub fn new(lattice: DeltaLattice, rule: ModuleRule) -> Self {
        ModuleTable { lattice, rule }
    }

    pub fn lattice(&self) -> &DeltaLattice {
        &self.lattice
    }

    /// The structure polynomial f_{β,γ}(λ, ∂); never mentions μ.
    pub fn action_poly(&self, beta: &DeltaElt, gamma: &DeltaElt) -> Poly {
        let out = (self.rule)(beta, gamma);
        assert!(
            out.degree_in(Var::M).unwrap_or(0) == 0,
            "module structure polynomials live in ℂ[λ,∂]"
        );
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    A1,
    A2,
    Ce,
}

/// Parameters of one classified family. The anchor γ₀ matters for A1/A2;
/// the extra scalar e only for CE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub gamma0: DeltaElt,
    pub c: GaussRat,
    pub e: GaussRat,
}

impl FamilySpec {
    pub fn a1(gamma0: DeltaElt, c: GaussRat) -> Self {
        FamilySpec {
            kind: FamilyKind::A1,
            gamma0,
            c,
            e: GaussRat::zero(),
        }
    }

    pub fn a2(gamma0: DeltaElt, c: GaussRat) -> Self {
        FamilySpec {
            kind: FamilyKind::A2,
            gamma0,
            c,
            e: GaussRat::zero(),
        }
    }

    pub fn ce(rank: usize, c: GaussRat, e: GaussRat) -> Self {
        FamilySpec {
            kind: FamilyKind::Ce,
            gamma0: DeltaElt::zero(rank),
            c,
            e,
        }
    }

    /// The family's q-sequence. A1 anchors q_{γ₀} = 0 with
    /// q_σ = 1 + (σ−γ₀)/b elsewhere; A2 anchors q_{γ₀} = 1 with
    /// q_σ = (σ−γ₀)/b elsewhere; CE has q_σ = e + σ/b throughout.
    pub fn q_value(&self, algebra: &ClbAlgebra, sigma: &DeltaElt) -> GaussRat {
        let b = algebra.b();
        match self.kind {
            FamilyKind::A1 => {
                if sigma == &self.gamma0 {
                    GaussRat::zero()
                } else {
                    &GaussRat::one() + &(&algebra.value(&(sigma - &self.gamma0)) / b)
                }
            }
            FamilyKind::A2 => {
                if sigma == &self.gamma0 {
                    GaussRat::one()
                } else {
                    &algebra.value(&(sigma - &self.gamma0)) / b
                }
            }
            FamilyKind::Ce => &self.e + &(&algebra.value(sigma) / b),
        }
    }

    /// m_σ = c − φ(σ)/b.
    pub fn m_value(&self, algebra: &ClbAlgebra, sigma: &DeltaElt) -> GaussRat {
        &self.c - &(&algebra.phi_at(sigma) / algebra.b())
    }
}

/// The x₀-action data of a rank-one factor: x₀ acts by b(∂ + qλ + m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1VirasoroData {
    pub q: GaussRat,
    pub m: GaussRat,
}

impl Rank1VirasoroData {
    pub fn new(q: GaussRat, m: GaussRat) -> Self {
        Rank1VirasoroData { q, m }
    }

    /// The action polynomial b(∂ + qλ + m).
    pub fn action_poly(&self, b: &GaussRat) -> Poly {
        (&(&Poly::var(Var::D) + &Poly::var(Var::L).scale(&self.q))
            + &Poly::constant(self.m.clone()))
        .scale(b)
    }
}

/// The structure polynomial of the family action at (β, γ), with the
/// normalization c_{β,γ} = β+b. Dispatch between the case arms is by exact
/// equality tests on the q-sequence.
pub fn family_action(
    algebra: &ClbAlgebra,
    fam: &FamilySpec,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> Poly {
    let b = algebra.b();
    let lam = Poly::var(Var::L);
    let del = Poly::var(Var::D);
    let sum = beta + gamma;
    let q_sum = fam.q_value(algebra, &sum);
    let m_sum = fam.m_value(algebra, &sum);

    if beta.is_zero() {
        // x₀ acts by b(∂ + q_γ λ + m_γ); here γ = β+γ.
        return (&(&del + &lam.scale(&q_sum)) + &Poly::constant(m_sum)).scale(b);
    }

    let beta_v = algebra.value(beta);
    let cb = &beta_v + b;
    let phi_b = algebra.phi_at(beta);
    let q_g = fam.q_value(algebra, gamma);
    let beta_over_b = &beta_v / b;
    let one = GaussRat::one();

    let h1 = || Poly::constant(cb.clone());
    let h2 = || {
        let q_scaled = &(b / &cb) * &q_sum;
        let const_c = &m_sum + &(&(&phi_b / &cb) * &q_sum);
        (&(&del + &lam.scale(&q_scaled)) + &Poly::constant(const_c)).scale(&cb)
    };
    let h3 = || {
        let left = &del + &Poly::constant(m_sum.clone());
        let right = &(&del + &lam.scale(&(b / &cb)))
            + &Poly::constant(&m_sum + &(&phi_b / &cb));
        (&left * &right).scale(&cb)
    };
    let h4 = || {
        let two = GaussRat::from_int(2);
        let two_beta_b = &(&two * &beta_v) + b;
        let a_coef = &two_beta_b / &cb;
        let b_coef = &(&two_beta_b * &phi_b) / &(b * &cb);
        let e_coef = &beta_v / &cb;
        let f_coef = &phi_b / b;
        let left = &del + &Poly::constant(m_sum.clone());
        let right = &(&del + &lam.scale(&a_coef)) + &Poly::constant(&m_sum + &b_coef);
        let square = &lam + &Poly::constant(f_coef);
        let quad = &(&left * &right) + &(&square * &square).scale(&e_coef);
        quad.scale(&cb)
    };

    match fam.kind {
        FamilyKind::A1 => {
            if q_sum.is_zero() && q_g == &one - &beta_over_b {
                h3()
            } else if q_g.is_zero() && q_sum == &one + &beta_over_b {
                h1()
            } else {
                h2()
            }
        }
        FamilyKind::A2 => {
            if q_sum == one && q_g == -&beta_over_b {
                h1()
            } else if q_sum == beta_over_b && q_g == one {
                h4()
            } else {
                h2()
            }
        }
        FamilyKind::Ce => h2(),
    }
}

/// The whole family as a table.
pub fn family_table(algebra: &ClbAlgebra, fam: &FamilySpec) -> ModuleTable {
    let algebra_own = algebra.clone();
    let fam = fam.clone();
    ModuleTable::new(
        algebra.lattice().clone(),
        Arc::new(move |beta: &DeltaElt, gamma: &DeltaElt| {
            family_action(&algebra_own, &fam, beta, gamma)
        }),
    )
}

/// The module identity at one triple, as the exact residual
/// p_{α,β}(λ,−λ−μ)·f_{α+β,γ}(λ+μ,∂) − f_{β,γ}(μ,λ+∂)·f_{α,β+γ}(λ,∂)
///   + f_{α,γ}(λ,μ+∂)·f_{β,α+γ}(μ,∂) in ℂ[λ,μ,∂].
pub fn check_module_identity(
    algebra: &ClbAlgebra,
    m: &ModuleTable,
    alpha: &DeltaElt,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> CheckResult<Poly> {
    let lam = Poly::var(Var::L);
    let mu = Poly::var(Var::M);
    let del = Poly::var(Var::D);

    let prefactor = clb_bracket(algebra, alpha, beta).substitute(Var::D, &(&-&lam - &mu));
    let lhs = &prefactor
        * &m.action_poly(&(alpha + beta), gamma)
            .substitute(Var::L, &(&lam + &mu));
    let t1 = m
        .action_poly(beta, gamma)
        .subst_all(&[mu.clone(), mu.clone(), &lam + &del])
        * m.action_poly(alpha, &(beta + gamma));
    let t2 = m
        .action_poly(alpha, gamma)
        .substitute(Var::D, &(&mu + &del))
        * m.action_poly(beta, &(alpha + gamma)).substitute(Var::L, &mu);
    CheckResult::from_residual(&(&lhs - &t1) + &t2)
}

/// The q-values a classifier needs about the pair (β, γ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QContext {
    pub q_gamma: GaussRat,
    pub q_beta_gamma: GaussRat,
}

impl QContext {
    pub fn from_family(
        algebra: &ClbAlgebra,
        fam: &FamilySpec,
        beta: &DeltaElt,
        gamma: &DeltaElt,
    ) -> Self {
        QContext {
            q_gamma: fam.q_value(algebra, gamma),
            q_beta_gamma: fam.q_value(algebra, &(beta + gamma)),
        }
    }
}

/// The four admissible shapes of a structure polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HForm {
    H1,
    H2,
    H3,
    H4,
}

impl fmt::Display for HForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            HForm::H1 => "h1",
            HForm::H2 => "h2",
            HForm::H3 => "h3",
            HForm::H4 => "h4",
        };
        write!(f, "{tag}")
    }
}

/// Match a structure polynomial against the four parametric shapes, solving
/// for the leading constant and checking the q-constraints from the context.
/// Total degree ≥ 3 or the zero polynomial match nothing.
pub fn classify_constant(
    algebra: &ClbAlgebra,
    f: &Poly,
    beta: &DeltaElt,
    ctx: &QContext,
) -> Option<HForm> {
    assert!(
        f.degree_in(Var::M).unwrap_or(0) == 0,
        "structure polynomials live in ℂ[λ,∂]"
    );
    if f.is_zero() || f.total_degree().unwrap_or(0) >= 3 {
        return None;
    }

    let b = algebra.b();
    let beta_v = algebra.value(beta);
    let cb = &beta_v + b;
    let phi_b = algebra.phi_at(beta);
    let beta_over_b = &beta_v / b;
    let one = GaussRat::one();
    let q_diff = &ctx.q_beta_gamma - &ctx.q_gamma;
    let beta_nonzero = !beta.is_zero();
    let coeff = |el: u32, ed: u32| f.coeff([el, 0, ed]);

    match f.degree_in(Var::D).unwrap_or(0) {
        0 => {
            let constant_shape = f.degree_in(Var::L).unwrap_or(0) == 0;
            let q_ok = q_diff == &beta_over_b + &one;
            (constant_shape && q_ok && beta_nonzero).then_some(HForm::H1)
        }
        1 => {
            // c·(∂ + (b/(β+b))q_{β+γ}λ + m + (φ(β)/(β+b))q_{β+γ}); m free.
            let c = coeff(0, 1);
            let shape_ok = coeff(1, 1).is_zero() && coeff(2, 0).is_zero();
            let lam_ok = coeff(1, 0) == &c * &(&(b / &cb) * &ctx.q_beta_gamma);
            let q_ok = q_diff == beta_over_b;
            (shape_ok && lam_ok && q_ok).then_some(HForm::H2)
        }
        2 => {
            let c = coeff(0, 2);
            let m_from = |shift: &GaussRat| {
                // ∂-coefficient is c(2m + shift).
                &(&(&coeff(0, 1) / &c) - shift) / &GaussRat::from_int(2)
            };

            // c(∂+m)(∂ + (b/(β+b))λ + m + φ(β)/(β+b))
            let h3_match = || {
                let shift = &phi_b / &cb;
                let m = m_from(&shift);
                coeff(2, 0).is_zero()
                    && coeff(1, 1) == &c * &(b / &cb)
                    && coeff(1, 0) == &c * &(&m * &(b / &cb))
                    && coeff(0, 0) == &c * &(&(&m * &m) + &(&m * &shift))
                    && ctx.q_beta_gamma.is_zero()
                    && ctx.q_gamma == &one - &beta_over_b
            };

            // c((∂+m)(∂+Aλ+m+B) + E(λ+F)²) with A=(2β+b)/(β+b),
            // B=A·φ(β)/b=(2β+b)φ(β)/(b(β+b)), E=β/(β+b), F=φ(β)/b.
            let h4_match = || {
                let two = GaussRat::from_int(2);
                let two_beta_b = &(&two * &beta_v) + b;
                let a_coef = &two_beta_b / &cb;
                let b_coef = &(&two_beta_b * &phi_b) / &(b * &cb);
                let e_coef = &beta_v / &cb;
                let f_coef = &phi_b / b;
                let m = m_from(&b_coef);
                coeff(2, 0) == &c * &e_coef
                    && coeff(1, 1) == &c * &a_coef
                    && coeff(1, 0) == &c * &(&(&m * &a_coef) + &(&(&two * &e_coef) * &f_coef))
                    && coeff(0, 0)
                        == &c
                            * &(&(&(&m * &m) + &(&m * &b_coef))
                                + &(&e_coef * &(&f_coef * &f_coef)))
                    && ctx.q_beta_gamma == beta_over_b
                    && ctx.q_gamma == one
            };

            if !beta_nonzero {
                None
            } else if h3_match() {
                Some(HForm::H3)
            } else if h4_match() {
                Some(HForm::H4)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The composition rule for gauge constants:
/// c_{α+β,γ} = ((α+β+b)/((α+b)(β+b)))·c_{β,γ}·c_{α,β+γ}, exactly.
pub fn check_coes<F>(
    algebra: &ClbAlgebra,
    ctable: F,
    alpha: &DeltaElt,
    beta: &DeltaElt,
    gamma: &DeltaElt,
) -> CheckResult<GaussRat>
where
    F: Fn(&DeltaElt, &DeltaElt) -> GaussRat,
{
    let b = algebra.b();
    let sum_v = &algebra.value(&(alpha + beta)) + b;
    let denom = &(&algebra.value(alpha) + b) * &(&algebra.value(beta) + b);
    let expected = &(&sum_v / &denom) * &(&ctable(beta, gamma) * &ctable(alpha, &(beta + gamma)));
    let residual = &ctable(&(alpha + beta), gamma) - &expected;
    if residual.is_zero() {
        CheckResult::Pass
    } else {
        CheckResult::Fail(residual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("zero gauge scale at {0}")]
pub struct ZeroScale(pub DeltaElt);

/// Rescale a module table by the basis change M′_γ = (e_γ/(γ+b))M_γ:
/// f′_{β,γ} = f_{β,γ}·(e_{β+γ}/(β+γ+b))·((γ+b)/e_γ). Degrees missing from
/// the table default to e_γ = γ+b (no rescaling there); explicit zero
/// entries are rejected.
pub fn gauge_transform(
    algebra: &ClbAlgebra,
    m: &ModuleTable,
    e_table: &BTreeMap<DeltaElt, GaussRat>,
) -> Result<ModuleTable, ZeroScale> {
    for (sigma, value) in e_table {
        if value.is_zero() {
            return Err(ZeroScale(sigma.clone()));
        }
    }
    let algebra = algebra.clone();
    let table = e_table.clone();
    let inner = m.rule.clone();
    let rule: ModuleRule = Arc::new(move |beta: &DeltaElt, gamma: &DeltaElt| {
        let e_at = |sigma: &DeltaElt| {
            table
                .get(sigma)
                .cloned()
                .unwrap_or_else(|| &algebra.value(sigma) + algebra.b())
        };
        let sum = beta + gamma;
        let num = &e_at(&sum) * &(&algebra.value(gamma) + algebra.b());
        let den = &(&algebra.value(&sum) + algebra.b()) * &e_at(gamma);
        inner(beta, gamma).scale(&(&num / &den))
    });
    Ok(ModuleTable::new(m.lattice.clone(), rule))
}

/// Which degree-bounded linear system to set up: both composition factors
/// rank-one free, trivial source factor, or trivial target factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructionVariant {
    VirSourceTarget,
    TrivialSource,
    TrivialTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ObstructionError {
    #[error("α must be nonzero")]
    ZeroAlpha,
    #[error("i must be positive")]
    NonPositiveIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub dimension: usize,
    pub basis: Vec<Poly>,
}

/// Exact solution space of the constraint an action polynomial p of total
/// degree ≤ d would have to satisfy, with K(λ,μ) = (iα+b)μ − bλ − iφ(α):
///
/// - `VirSourceTarget`: b·p(λ,μ+∂)(∂+qμ+m) − K·p(λ+μ,∂)
///   − b(∂+λ+qμ+m)p(λ,∂) = 0;
/// - `TrivialSource`: K·p(λ+μ,∂) − b·p(λ,μ+∂)(∂+qμ+m) = 0;
/// - `TrivialTarget`: K·p(λ+μ) = 0 with p ∈ ℂ[λ].
///
/// A trivial kernel (dimension 0) means no nonzero action exists at this
/// degree bound.
pub fn finite_module_obstruction(
    algebra: &ClbAlgebra,
    vir: &Rank1VirasoroData,
    alpha: &DeltaElt,
    i: i64,
    degree_bound: u32,
    variant: ObstructionVariant,
) -> Result<ObstructionReport, ObstructionError> {
    if alpha.is_zero() {
        return Err(ObstructionError::ZeroAlpha);
    }
    if i <= 0 {
        return Err(ObstructionError::NonPositiveIndex);
    }

    let b = algebra.b();
    let i_scalar = GaussRat::from_int(i);
    let i_alpha = &i_scalar * &algebra.value(alpha);
    let i_phi = &i_scalar * &algebra.phi_at(alpha);
    let lam = Poly::var(Var::L);
    let mu = Poly::var(Var::M);
    let del = Poly::var(Var::D);

    let k_form = &(&mu.scale(&(&i_alpha + b)) - &lam.scale(b)) - &Poly::constant(i_phi);
    // x₀ acts through (∂ + qμ + m) on the target side.
    let op = &(&del + &mu.scale(&vir.q)) + &Poly::constant(vir.m.clone());

    let monomials: Vec<[u32; 3]> = match variant {
        ObstructionVariant::TrivialTarget => {
            (0..=degree_bound).map(|a| [a, 0, 0]).collect()
        }
        _ => {
            let mut keys = Vec::new();
            for a in 0..=degree_bound {
                for c in 0..=(degree_bound - a) {
                    keys.push([a, 0, c]);
                }
            }
            keys
        }
    };

    let residual_of = |p: &Poly| -> Poly {
        let shifted_d = p.substitute(Var::D, &(&mu + &del));
        let shifted_l = p.substitute(Var::L, &(&lam + &mu));
        match variant {
            ObstructionVariant::VirSourceTarget => {
                let source_op = &op + &lam;
                &(&(&shifted_d * &op).scale(b) - &(&k_form * &shifted_l))
                    - &(&source_op * p).scale(b)
            }
            ObstructionVariant::TrivialSource => {
                &(&k_form * &shifted_l) - &(&shifted_d * &op).scale(b)
            }
            ObstructionVariant::TrivialTarget => &k_form * &shifted_l,
        }
    };

    let residuals: Vec<Poly> = monomials
        .iter()
        .map(|&key| residual_of(&Poly::monomial(GaussRat::one(), key)))
        .collect();

    let mut constraint_keys: BTreeSet<[u32; 3]> = BTreeSet::new();
    for r in &residuals {
        for (key, _) in r.iter() {
            constraint_keys.insert(*key);
        }
    }
    let rows: Vec<Vec<GaussRat>> = constraint_keys
        .iter()
        .map(|&key| residuals.iter().map(|r| r.coeff(key)).collect())
        .collect();

    let kernel = kernel_basis(&rows, monomials.len());
    let basis = kernel
        .iter()
        .map(|v| {
            let mut p = Poly::zero();
            for (coeff, &key) in v.iter().zip(monomials.iter()) {
                if !coeff.is_zero() {
                    p = &p + &Poly::monomial(coeff.clone(), key);
                }
            }
            p
        })
        .collect();
    Ok(ObstructionReport {
        dimension: kernel.len(),
        basis,
    })
}
