//! Exact symbolic verification engine for the graded Lie conformal algebras
//! CL(b, φ), their coefficient Lie algebras, central extensions, conformal
//! derivations, and rank-one intermediate series modules.
//!
//! Everything is computed over ℚ(i) with arbitrary-precision rationals;
//! every check is an exact polynomial identity and every verifier returns
//! the offending residual as a witness when it fails.

pub mod cder;
pub mod clb;
pub mod ext;
pub mod lattice;
pub mod lca;
pub mod linalg;
pub mod modules;
pub mod poly;
pub mod scalar;

pub use cder::{ad, check_derivation, inner_decompose, ConformalDerivation, DerError, DerRule};
pub use clb::{
    check_coeff_consistency, check_coeff_jacobi, check_gd_axioms, check_gd_axioms_with,
    clb_bracket, coeff_bracket, coeff_bracket_elts, gd_products, quadratic_bracket_from_gd,
    ClbAlgebra, ClbError, CoeffElt, GdAxioms,
};
pub use ext::{
    canonicalize_cocycle, check_cocycle, check_degree_bound, check_ext_coeff_jacobi, coboundary,
    cocycle_compat_residual, cocycle_from_g, cocycle_skew_residual, cocycles_equivalent,
    coeff_extension_bracket, ext_coeff_bracket_elts, extended_jacobi, CanonicalForm,
    CanonicalizeError, Cocycle, CocycleCheck, CocycleRule, ExtCoeffElt, ExtError, ExtJacobi,
    ExtendedAlgebra, ScalarRule,
};
pub use lattice::{
    hom_eval, validate_clb_params, DeltaElt, DeltaLattice, GroupHom, LatticeError, ParamCheck,
};
pub use lca::{
    bracket, check_jacobi, check_skew, nth_products, sweep_pairs, sweep_triples, BracketTable,
    CheckResult, LcaElement, PairRule,
};
pub use linalg::kernel_basis;
pub use modules::{
    check_coes, check_module_identity, classify_constant, family_action, family_table,
    finite_module_obstruction, gauge_transform, FamilyKind, FamilySpec, HForm, ModuleRule,
    ModuleTable, ObstructionError, ObstructionReport, ObstructionVariant, QContext,
    Rank1VirasoroData, ZeroScale,
};
pub use poly::{DivByZero, ParsePolyError, Poly, Var};
pub use scalar::{GaussRat, ParseScalarError};
