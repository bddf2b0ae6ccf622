//! One runner per subcommand. Every runner returns a [`Report`]; check
//! failures are recorded (and drive exit code 1), while configuration and
//! input problems surface as [`CliError`] (exit code 2).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use clconf::{
    canonicalize_cocycle, check_coeff_consistency, check_coeff_jacobi, check_degree_bound,
    check_derivation, check_gd_axioms, check_jacobi, check_module_identity, check_skew,
    classify_constant, clb_bracket, cocycle_compat_residual, cocycle_from_g,
    cocycle_skew_residual, cocycles_equivalent, family_table, finite_module_obstruction,
    gauge_transform, inner_decompose, quadratic_bracket_from_gd, sweep_pairs, sweep_triples,
    validate_clb_params, CanonicalizeError, CheckResult, ClbAlgebra, Cocycle, DeltaElt, DerError,
    ExtError, ModuleTable, ObstructionVariant, QContext, Rank1VirasoroData,
};

use crate::config::{
    self, build_algebra, build_family, build_hom, build_lattice, parse_scalar, resolve, Config,
};
use crate::inputs;
use crate::report::Report;
use crate::CliError;

pub struct Invocation<'a> {
    pub cfg: &'a Config,
    pub config_path: &'a Path,
    pub window: i64,
    pub index_window: i64,
    pub seed: u64,
}

impl Invocation<'_> {
    fn algebra(&self) -> Result<ClbAlgebra, CliError> {
        build_algebra(self.cfg)
    }

    fn resolve(&self, rel: &Path) -> std::path::PathBuf {
        resolve(self.config_path, rel)
    }
}

fn pair_inst(a: &DeltaElt, b: &DeltaElt) -> String {
    format!("{a}, {b}")
}

fn triple_inst(a: &DeltaElt, b: &DeltaElt, c: &DeltaElt) -> String {
    format!("{a}, {b}, {c}")
}

// ----------------------------------------------------------------- validate

pub fn validate(inv: &Invocation) -> Result<Report, CliError> {
    let lattice = build_lattice(inv.cfg)?;
    let b = parse_scalar(&inv.cfg.b, "b")?;
    let phi = build_hom(&inv.cfg.phi, "φ basis value")?;
    let check = validate_clb_params(&lattice, &b, &phi);
    if !check.is_valid() {
        let mut faults = Vec::new();
        if !check.b_nonzero {
            faults.push("b = 0".to_string());
        }
        if !check.two_b_outside {
            faults.push("2b ∈ Δ".to_string());
        }
        if !check.hom_rank_ok {
            faults.push(format!(
                "φ has {} basis values but the lattice has rank {}",
                phi.rank(),
                lattice.rank()
            ));
        }
        return Err(CliError::Config(format!(
            "invalid parameters: {}",
            faults.join("; ")
        )));
    }
    let mut report = Report::new("validate", inv.window);
    report.push(
        "params",
        format!("b={b}, rank={}", lattice.rank()),
        None,
    );
    match (&check.three_b, &check.phi_three_b) {
        (Some(e), Some(v)) => {
            report.set_result("three_b", e.to_string());
            report.set_result("phi_three_b", v.to_string());
        }
        _ => {
            report.set_result("three_b", "outside Δ".to_string());
        }
    }
    Ok(report)
}

// -------------------------------------------------------------- lca sweeps

pub fn skew(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let t = a.bracket_table();
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("skew", inv.window);
    for (x, y, res) in sweep_pairs(&window, |x, y| check_skew(&t, x, y)) {
        report.push("skew", pair_inst(&x, &y), res.witness().map(|w| w.to_string()));
    }
    Ok(report)
}

pub fn jacobi(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let t = a.bracket_table();
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("jacobi", inv.window);
    for (x, y, z, res) in sweep_triples(&window, |x, y, z| check_jacobi(&t, x, y, z)) {
        report.push(
            "jacobi",
            triple_inst(&x, &y, &z),
            res.witness().map(|w| w.to_string()),
        );
    }
    Ok(report)
}

// ---------------------------------------------------------------- gd layer

pub fn gd(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("gd", inv.window);
    let check = |x: &DeltaElt, y: &DeltaElt, z: &DeltaElt| {
        let axioms = check_gd_axioms(&a, x, y, z);
        if axioms.passed() {
            return CheckResult::Pass;
        }
        let mut parts = Vec::new();
        if let Some(w) = axioms.left_symmetry.witness() {
            parts.push(format!("left-symmetry: {w}"));
        }
        if let Some(w) = axioms.right_commutativity.witness() {
            parts.push(format!("right-commutativity: {w}"));
        }
        if let Some(w) = axioms.compatibility.witness() {
            parts.push(format!("compatibility: {w}"));
        }
        CheckResult::Fail(parts.join("; "))
    };
    for (x, y, z, res) in sweep_triples(&window, check) {
        report.push("gd", triple_inst(&x, &y, &z), res.witness().cloned());
    }
    Ok(report)
}

pub fn quadratic(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("quadratic", inv.window);
    let check = |x: &DeltaElt, y: &DeltaElt| {
        CheckResult::from_residual(&quadratic_bracket_from_gd(&a, x, y) - &clb_bracket(&a, x, y))
    };
    for (x, y, res) in sweep_pairs(&window, check) {
        report.push(
            "quadratic",
            pair_inst(&x, &y),
            res.witness().map(|w| w.to_string()),
        );
    }
    Ok(report)
}

// ------------------------------------------------------- coefficient layer

pub fn coeff(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let window = a.lattice().window(inv.window);
    let iw = inv.index_window;
    let mut report = Report::new("coeff", inv.window);
    report.index_window = Some(iw);

    let mut combos = Vec::new();
    for x in &window {
        for i in -iw..=iw {
            for y in &window {
                for j in -iw..=iw {
                    combos.push((x.clone(), i, y.clone(), j));
                }
            }
        }
    }
    let results: Vec<_> = combos
        .par_iter()
        .map(|(x, i, y, j)| check_coeff_consistency(&a, (x, *i), (y, *j)))
        .collect();
    for ((x, i, y, j), res) in combos.iter().zip(results) {
        report.push(
            "coeff-consistency",
            format!("x({x},{i}), x({y},{j})"),
            res.witness().map(|w| w.to_string()),
        );
    }

    let samples = inv.cfg.coeff_jacobi_samples.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(inv.seed);
    let mut draws = Vec::new();
    for _ in 0..samples {
        let pick = |rng: &mut ChaCha8Rng| window[rng.gen_range(0..window.len())].clone();
        let idx = |rng: &mut ChaCha8Rng| rng.gen_range(-iw..=iw);
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let (i, j, k) = (idx(&mut rng), idx(&mut rng), idx(&mut rng));
        draws.push((x, i, y, j, z, k));
    }
    let results: Vec<_> = draws
        .par_iter()
        .map(|(x, i, y, j, z, k)| check_coeff_jacobi(&a, (x, *i), (y, *j), (z, *k)))
        .collect();
    for ((x, i, y, j, z, k), res) in draws.iter().zip(results) {
        report.push(
            "coeff-jacobi-sample",
            format!("x({x},{i}), x({y},{j}), x({z},{k})"),
            res.witness().map(|w| w.to_string()),
        );
    }
    Ok(report)
}

// ------------------------------------------------------- central extensions

enum CocycleBuild {
    Ready(Cocycle),
    /// The classified construction was rejected; carries the reason.
    Rejected(String),
}

fn build_cocycle(inv: &Invocation, a: &ClbAlgebra) -> Result<CocycleBuild, CliError> {
    let from_file = match &inv.cfg.cocycle_file {
        Some(path) => Some(inputs::load_cocycle(
            &inv.resolve(path),
            a.lattice().rank(),
        )?),
        None => None,
    };
    let from_hom = match &inv.cfg.g {
        Some(section) => {
            let hom = build_hom(section, "g basis value")?;
            match cocycle_from_g(a, &hom) {
                Ok(c) => Some(c),
                Err(ExtError::PreconditionViolated(msg)) => {
                    return Ok(CocycleBuild::Rejected(msg));
                }
            }
        }
        None => None,
    };
    match (from_file, from_hom) {
        (Some(f), Some(h)) => Ok(CocycleBuild::Ready(f.add(&h))),
        (Some(f), None) => Ok(CocycleBuild::Ready(f)),
        (None, Some(h)) => Ok(CocycleBuild::Ready(h)),
        (None, None) => Err(CliError::Config(
            "this command needs a cocycle: configure g.on_basis and/or cocycle_file".into(),
        )),
    }
}

pub fn ext_check(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let mut report = Report::new("ext-check", inv.window);
    let cocycle = match build_cocycle(inv, &a)? {
        CocycleBuild::Ready(c) => c,
        CocycleBuild::Rejected(msg) => {
            report.push("from-g-preconditions", "g".into(), Some(msg));
            return Ok(report);
        }
    };
    let window = a.lattice().window(inv.window);
    for (x, y, res) in sweep_pairs(&window, |x, y| {
        CheckResult::from_residual(cocycle_skew_residual(&cocycle, x, y))
    }) {
        report.push(
            "cocycle-skew",
            pair_inst(&x, &y),
            res.witness().map(|w| w.to_string()),
        );
    }
    for (x, y, res) in sweep_pairs(&window, |x, y| check_degree_bound(&cocycle, x, y)) {
        report.push(
            "cocycle-degree",
            pair_inst(&x, &y),
            res.witness().map(|w| w.to_string()),
        );
    }
    for (x, y, z, res) in sweep_triples(&window, |x, y, z| {
        CheckResult::from_residual(cocycle_compat_residual(&a, &cocycle, x, y, z))
    }) {
        report.push(
            "cocycle-compat",
            triple_inst(&x, &y, &z),
            res.witness().map(|w| w.to_string()),
        );
    }
    Ok(report)
}

pub fn ext_canonicalize(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let mut report = Report::new("ext-canonicalize", inv.window);
    let cocycle = match build_cocycle(inv, &a)? {
        CocycleBuild::Ready(c) => c,
        CocycleBuild::Rejected(msg) => {
            report.push("from-g-preconditions", "g".into(), Some(msg));
            return Ok(report);
        }
    };
    match canonicalize_cocycle(&a, &cocycle, inv.window) {
        Ok(form) => {
            report.push("canonicalize", format!("window {}", inv.window), None);
            for (k, value) in form.g.on_basis().iter().enumerate() {
                report.set_result(&format!("g[{k}]"), value.to_string());
            }
            for (sigma, value) in &form.phi {
                report.set_result(&format!("phi[{sigma}]"), value.to_string());
            }
        }
        Err(CanonicalizeError::InvalidCocycle {
            condition,
            instance,
            witness,
        }) => {
            report.push(
                "canonicalize-input",
                format!("{condition} at {instance}"),
                Some(witness),
            );
        }
        Err(CanonicalizeError::NotCanonicalizable(msg)) => {
            report.push(
                "canonicalize",
                format!("window {}", inv.window),
                Some(msg),
            );
        }
    }
    Ok(report)
}

pub fn ext_equiv(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let g1 = build_hom(
        inv.cfg
            .g
            .as_ref()
            .ok_or_else(|| CliError::Config("ext-equiv needs g.on_basis".into()))?,
        "g basis value",
    )?;
    let g2 = build_hom(
        inv.cfg
            .g2
            .as_ref()
            .ok_or_else(|| CliError::Config("ext-equiv needs g2.on_basis".into()))?,
        "g2 basis value",
    )?;
    let mut report = Report::new("ext-equiv", inv.window);
    match cocycles_equivalent(&a, &g1, &g2) {
        Some(k) => {
            report.push("equivalent", "g, g2".into(), None);
            report.set_result("k", k.to_string());
        }
        None => {
            report.push(
                "equivalent",
                "g, g2".into(),
                Some("no scalar k with g − g2 = k·φ on the basis".into()),
            );
        }
    }
    Ok(report)
}

// ------------------------------------------------------------- derivations

fn load_derivation(inv: &Invocation, a: &ClbAlgebra) -> Result<clconf::ConformalDerivation, CliError> {
    let path = inv
        .cfg
        .derivation_file
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs derivation_file".into()))?;
    inputs::load_derivation(&inv.resolve(path), a.lattice().rank())
}

pub fn der_check(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let d = load_derivation(inv, &a)?;
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("der-check", inv.window);
    for (x, y, res) in sweep_pairs(&window, |x, y| check_derivation(&a, &d, x, y)) {
        report.push(
            "derivation",
            pair_inst(&x, &y),
            res.witness()
                .map(|(delta, w)| format!("degree {delta}: {w}")),
        );
    }
    Ok(report)
}

pub fn der_inner(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let d = load_derivation(inv, &a)?;
    let mut report = Report::new("der-inner", inv.window);
    match inner_decompose(&a, &d, inv.window) {
        Ok(gen) => {
            report.push("inner", format!("window {}", inv.window), None);
            for (delta, f) in gen.components() {
                report.set_result(&format!("g[{delta}]"), f.to_string());
            }
        }
        Err(DerError::InvalidDerivation {
            alpha,
            beta,
            delta,
            witness,
        }) => {
            report.push(
                "derivation",
                pair_inst(&alpha, &beta),
                Some(format!("degree {delta}: {witness}")),
            );
        }
        Err(DerError::NotInner(msg)) => {
            report.push("inner", format!("window {}", inv.window), Some(msg));
        }
    }
    Ok(report)
}

// ----------------------------------------------------------------- modules

fn build_module(inv: &Invocation, a: &ClbAlgebra) -> Result<ModuleTable, CliError> {
    if let Some(path) = &inv.cfg.module_file {
        return inputs::load_module(&inv.resolve(path), a.lattice());
    }
    if let Some(section) = &inv.cfg.family {
        let fam = build_family(a, section)?;
        return Ok(family_table(a, &fam));
    }
    Err(CliError::Config(
        "this command needs a module: configure family or module_file".into(),
    ))
}

pub fn mod_check(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let table = build_module(inv, &a)?;
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("mod-check", inv.window);
    for (x, y, z, res) in
        sweep_triples(&window, |x, y, z| check_module_identity(&a, &table, x, y, z))
    {
        report.push(
            "module-identity",
            triple_inst(&x, &y, &z),
            res.witness().map(|w| w.to_string()),
        );
    }
    Ok(report)
}

pub fn mod_classify(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let section = inv
        .cfg
        .family
        .as_ref()
        .ok_or_else(|| CliError::Config("mod-classify needs family".into()))?;
    let fam = build_family(&a, section)?;
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("mod-classify", inv.window);
    for beta in &window {
        for gamma in &window {
            let f = clconf::family_action(&a, &fam, beta, gamma);
            let ctx = QContext::from_family(&a, &fam, beta, gamma);
            match classify_constant(&a, &f, beta, &ctx) {
                Some(tag) => {
                    report.push("classify", pair_inst(beta, gamma), None);
                    report.set_result(&format!("tag[{beta}, {gamma}]"), tag.to_string());
                }
                None => {
                    report.push(
                        "classify",
                        pair_inst(beta, gamma),
                        Some("no admissible shape".into()),
                    );
                }
            }
        }
    }
    Ok(report)
}

pub fn mod_gauge(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let table = build_module(inv, &a)?;
    let scales = match &inv.cfg.gauge_file {
        Some(path) => inputs::load_gauge(&inv.resolve(path), a.lattice().rank())?,
        None => config::seeded_scale_table(&a.lattice().window(3 * inv.window), inv.seed),
    };
    let transformed =
        gauge_transform(&a, &table, &scales).map_err(|e| CliError::Input(e.to_string()))?;
    let window = a.lattice().window(inv.window);
    let mut report = Report::new("mod-gauge", inv.window);
    for (x, y, z, res) in sweep_triples(&window, |x, y, z| {
        check_module_identity(&a, &transformed, x, y, z)
    }) {
        report.push(
            "gauge-identity",
            triple_inst(&x, &y, &z),
            res.witness().map(|w| w.to_string()),
        );
    }
    Ok(report)
}

// ------------------------------------------------------------- obstruction

fn parse_variant(name: &str) -> Result<ObstructionVariant, CliError> {
    match name {
        "vir-source-target" => Ok(ObstructionVariant::VirSourceTarget),
        "trivial-source" => Ok(ObstructionVariant::TrivialSource),
        "trivial-target" => Ok(ObstructionVariant::TrivialTarget),
        other => Err(CliError::Config(format!(
            "unknown obstruction variant {other:?}"
        ))),
    }
}

fn variant_name(v: ObstructionVariant) -> &'static str {
    match v {
        ObstructionVariant::VirSourceTarget => "vir-source-target",
        ObstructionVariant::TrivialSource => "trivial-source",
        ObstructionVariant::TrivialTarget => "trivial-target",
    }
}

pub fn finite_obstruct(inv: &Invocation) -> Result<Report, CliError> {
    let a = inv.algebra()?;
    let rank = a.lattice().rank();
    let section = inv.cfg.obstruction.as_ref();

    let parse_list = |items: &Option<Vec<String>>, defaults: &[&str], what: &str| {
        let texts: Vec<String> = match items {
            Some(v) => v.clone(),
            None => defaults.iter().map(|s| s.to_string()).collect(),
        };
        texts
            .iter()
            .map(|s| parse_scalar(s, what))
            .collect::<Result<Vec<_>, _>>()
    };
    let qs = parse_list(
        &section.and_then(|s| s.qs.clone()),
        &["-1", "1/2", "1"],
        "obstruction q",
    )?;
    let ms = parse_list(
        &section.and_then(|s| s.ms.clone()),
        &["-1/2", "0", "1/2"],
        "obstruction m",
    )?;
    let alphas: Vec<DeltaElt> = match section.and_then(|s| s.alphas.clone()) {
        Some(list) => list
            .iter()
            .map(|coords| config::elt_from_coords(coords, rank, "obstruction α"))
            .collect::<Result<Vec<_>, _>>()?,
        None => (0..rank)
            .map(|k| {
                let mut coords = vec![0i64; rank];
                coords[k] = 1;
                DeltaElt::new(coords)
            })
            .collect(),
    };
    let indices = section
        .and_then(|s| s.indices.clone())
        .unwrap_or_else(|| vec![3, 4, 5]);
    let degree_bound = section.and_then(|s| s.degree_bound).unwrap_or(4);
    let variants: Vec<ObstructionVariant> = match section.and_then(|s| s.variants.clone()) {
        Some(names) => names
            .iter()
            .map(|n| parse_variant(n))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![
            ObstructionVariant::VirSourceTarget,
            ObstructionVariant::TrivialTarget,
        ],
    };

    let mut report = Report::new("finite-obstruct", inv.window);
    for q in &qs {
        for m in &ms {
            let vir = Rank1VirasoroData::new(q.clone(), m.clone());
            for alpha in &alphas {
                for i in &indices {
                    for &variant in &variants {
                        let kernel =
                            finite_module_obstruction(&a, &vir, alpha, *i, degree_bound, variant)
                                .map_err(|e| CliError::Config(e.to_string()))?;
                        let instance = format!(
                            "q={q}, m={m}, α={alpha}, i={i}, d={degree_bound}, {}",
                            variant_name(variant)
                        );
                        let witness = if kernel.dimension == 0 {
                            None
                        } else {
                            let basis: Vec<String> =
                                kernel.basis.iter().map(|p| p.to_string()).collect();
                            Some(format!(
                                "kernel dimension {}: {}",
                                kernel.dimension,
                                basis.join("; ")
                            ))
                        };
                        report.set_result(
                            &format!("dim[{instance}]"),
                            kernel.dimension.to_string(),
                        );
                        report.push("obstruction-kernel", instance, witness);
                    }
                }
            }
        }
    }
    Ok(report)
}
