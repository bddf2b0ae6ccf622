//! Configuration loading: a strict JSON schema (unknown keys rejected) that
//! describes the lattice, the algebra parameters, sweep windows, and the
//! optional objects a command may need.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use clconf::{ClbAlgebra, DeltaElt, DeltaLattice, FamilySpec, GaussRat, GroupHom};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub delta: DeltaSection,
    pub b: String,
    pub phi: HomSection,
    pub window: i64,
    pub coeff_index_window: i64,
    #[serde(default)]
    pub g: Option<HomSection>,
    #[serde(default)]
    pub g2: Option<HomSection>,
    #[serde(default)]
    pub family: Option<FamilySection>,
    #[serde(default)]
    pub cocycle_file: Option<PathBuf>,
    #[serde(default)]
    pub derivation_file: Option<PathBuf>,
    #[serde(default)]
    pub module_file: Option<PathBuf>,
    #[serde(default)]
    pub gauge_file: Option<PathBuf>,
    #[serde(default)]
    pub coeff_jacobi_samples: Option<u64>,
    #[serde(default)]
    pub obstruction: Option<ObstructionSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSection {
    pub generators: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSection {
    pub on_basis: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    /// One of "ce", "a1", "a2".
    pub kind: String,
    /// Anchor coordinates; required for a1/a2, ignored for ce.
    #[serde(default)]
    pub gamma0: Option<Vec<i64>>,
    pub c: String,
    /// The e-parameter of the ce family; ignored for a1/a2.
    #[serde(default)]
    pub e: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstructionSection {
    #[serde(default)]
    pub qs: Option<Vec<String>>,
    #[serde(default)]
    pub ms: Option<Vec<String>>,
    #[serde(default)]
    pub alphas: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub indices: Option<Vec<i64>>,
    #[serde(default)]
    pub degree_bound: Option<u32>,
    /// Any of "vir-source-target", "trivial-source", "trivial-target".
    #[serde(default)]
    pub variants: Option<Vec<String>>,
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: Config = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
    if cfg.window < 1 {
        return Err(CliError::Config(format!(
            "window must be ≥ 1, got {}",
            cfg.window
        )));
    }
    if cfg.coeff_index_window < 0 {
        return Err(CliError::Config(format!(
            "coeff_index_window must be ≥ 0, got {}",
            cfg.coeff_index_window
        )));
    }
    Ok(cfg)
}

pub fn parse_scalar(text: &str, what: &str) -> Result<GaussRat, CliError> {
    text.parse()
        .map_err(|e| CliError::Config(format!("invalid {what} {text:?}: {e}")))
}

pub fn build_lattice(cfg: &Config) -> Result<DeltaLattice, CliError> {
    let gens = cfg
        .delta
        .generators
        .iter()
        .map(|s| parse_scalar(s, "lattice generator"))
        .collect::<Result<Vec<_>, _>>()?;
    DeltaLattice::from_generators(&gens)
        .map_err(|e| CliError::Config(format!("invalid lattice: {e}")))
}

pub fn build_hom(section: &HomSection, what: &str) -> Result<GroupHom, CliError> {
    let values = section
        .on_basis
        .iter()
        .map(|s| parse_scalar(s, what))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupHom::new(values))
}

pub fn build_algebra(cfg: &Config) -> Result<ClbAlgebra, CliError> {
    let lattice = build_lattice(cfg)?;
    let b = parse_scalar(&cfg.b, "b")?;
    let phi = build_hom(&cfg.phi, "φ basis value")?;
    ClbAlgebra::new(lattice, b, phi).map_err(|e| CliError::Config(e.to_string()))
}

pub fn build_family(
    algebra: &ClbAlgebra,
    section: &FamilySection,
) -> Result<FamilySpec, CliError> {
    let rank = algebra.lattice().rank();
    let c = parse_scalar(&section.c, "family parameter c")?;
    let gamma0 = || -> Result<DeltaElt, CliError> {
        let coords = section.gamma0.clone().ok_or_else(|| {
            CliError::Config(format!("family kind {:?} requires gamma0", section.kind))
        })?;
        if coords.len() != rank {
            return Err(CliError::Config(format!(
                "gamma0 has {} coordinates but the lattice has rank {rank}",
                coords.len()
            )));
        }
        Ok(DeltaElt::new(coords))
    };
    match section.kind.as_str() {
        "ce" => {
            let e = section
                .e
                .as_deref()
                .ok_or_else(|| CliError::Config("ce family requires e".into()))?;
            Ok(FamilySpec::ce(rank, c, parse_scalar(e, "family parameter e")?))
        }
        "a1" => Ok(FamilySpec::a1(gamma0()?, c)),
        "a2" => Ok(FamilySpec::a2(gamma0()?, c)),
        other => Err(CliError::Config(format!(
            "unknown family kind {other:?}; expected \"ce\", \"a1\", or \"a2\""
        ))),
    }
}

/// Resolve a path from the config relative to the config file's directory.
pub fn resolve(base: &Path, rel: &Path) -> PathBuf {
    if rel.is_absolute() {
        rel.to_path_buf()
    } else {
        base.parent().unwrap_or_else(|| Path::new(".")).join(rel)
    }
}

/// Parsed element coordinates with rank validation.
pub fn elt_from_coords(coords: &[i64], rank: usize, what: &str) -> Result<DeltaElt, CliError> {
    if coords.len() != rank {
        return Err(CliError::Input(format!(
            "{what} has {} coordinates but the lattice has rank {rank}",
            coords.len()
        )));
    }
    Ok(DeltaElt::new(coords.to_vec()))
}

/// A deterministic pseudo-random nonzero scale table over the given support,
/// used by mod-gauge when no explicit table is supplied.
pub fn seeded_scale_table(
    support: &[DeltaElt],
    seed: u64,
) -> BTreeMap<DeltaElt, GaussRat> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    support
        .iter()
        .map(|sigma| {
            let num = rng.gen_range(1..=9i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
            let den = rng.gen_range(1..=4i64);
            let im = if rng.gen_bool(0.25) {
                &GaussRat::rat(rng.gen_range(1..=3i64), 1) * &GaussRat::i()
            } else {
                GaussRat::zero()
            };
            (sigma.clone(), &GaussRat::rat(num, den) + &im)
        })
        .collect()
}
