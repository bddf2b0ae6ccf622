//! Loaders for the table file formats. All tables are finite JSON listings
//! with zero-outside semantics: entries not listed evaluate to zero (for the
//! gauge table: to the identity scale).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use clconf::{
    Cocycle, CocycleRule, ConformalDerivation, DeltaElt, DerRule, GaussRat, ModuleRule,
    ModuleTable, Poly, Var,
};

use crate::config::elt_from_coords;
use crate::CliError;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed table file {}: {e}", path.display())))
}

fn parse_poly(text: &str, path: &Path) -> Result<Poly, CliError> {
    text.parse().map_err(|e| {
        CliError::Input(format!(
            "invalid polynomial {text:?} in {}: {e}",
            path.display()
        ))
    })
}

fn reject_var(p: &Poly, var: Var, context: &str, path: &Path) -> Result<(), CliError> {
    if p.degree_in(var).unwrap_or(0) > 0 {
        return Err(CliError::Input(format!(
            "{context} in {} must not involve the variable {var:?}",
            path.display()
        )));
    }
    Ok(())
}

/// Cocycle file: `[[αcoords, βcoords, "poly in L"], ...]`.
pub fn load_cocycle(path: &Path, rank: usize) -> Result<Cocycle, CliError> {
    let raw: Vec<(Vec<i64>, Vec<i64>, String)> = read_json(path)?;
    let mut table: BTreeMap<(DeltaElt, DeltaElt), Poly> = BTreeMap::new();
    for (a, b, text) in raw {
        let alpha = elt_from_coords(&a, rank, "cocycle α")?;
        let beta = elt_from_coords(&b, rank, "cocycle β")?;
        let p = parse_poly(&text, path)?;
        reject_var(&p, Var::M, "cocycle entry", path)?;
        reject_var(&p, Var::D, "cocycle entry", path)?;
        table.insert((alpha, beta), p);
    }
    let rule: CocycleRule = Arc::new(move |alpha: &DeltaElt, beta: &DeltaElt| {
        table
            .get(&(alpha.clone(), beta.clone()))
            .cloned()
            .unwrap_or_else(Poly::zero)
    });
    Ok(Cocycle::new(rule, 3))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivationEntry {
    delta: Vec<i64>,
    entries: Vec<(Vec<i64>, String)>,
}

/// Derivation file: `[{"delta": coords, "entries": [[βcoords, "poly"], ...]}, ...]`.
pub fn load_derivation(path: &Path, rank: usize) -> Result<ConformalDerivation, CliError> {
    let raw: Vec<DerivationEntry> = read_json(path)?;
    let mut rules: BTreeMap<DeltaElt, DerRule> = BTreeMap::new();
    for item in raw {
        let delta = elt_from_coords(&item.delta, rank, "derivation degree δ")?;
        let mut table: BTreeMap<DeltaElt, Poly> = BTreeMap::new();
        for (b, text) in item.entries {
            let beta = elt_from_coords(&b, rank, "derivation β")?;
            let p = parse_poly(&text, path)?;
            reject_var(&p, Var::M, "derivation entry", path)?;
            table.insert(beta, p);
        }
        rules.insert(
            delta,
            Arc::new(move |beta: &DeltaElt| {
                table.get(beta).cloned().unwrap_or_else(Poly::zero)
            }),
        );
    }
    Ok(ConformalDerivation::new(rules))
}

/// Module file: `[[βcoords, γcoords, "poly"], ...]`.
pub fn load_module(
    path: &Path,
    lattice: &clconf::DeltaLattice,
) -> Result<ModuleTable, CliError> {
    let rank = lattice.rank();
    let raw: Vec<(Vec<i64>, Vec<i64>, String)> = read_json(path)?;
    let mut table: BTreeMap<(DeltaElt, DeltaElt), Poly> = BTreeMap::new();
    for (b, c, text) in raw {
        let beta = elt_from_coords(&b, rank, "module β")?;
        let gamma = elt_from_coords(&c, rank, "module γ")?;
        let p = parse_poly(&text, path)?;
        reject_var(&p, Var::M, "module entry", path)?;
        table.insert((beta, gamma), p);
    }
    let rule: ModuleRule = Arc::new(move |beta: &DeltaElt, gamma: &DeltaElt| {
        table
            .get(&(beta.clone(), gamma.clone()))
            .cloned()
            .unwrap_or_else(Poly::zero)
    });
    Ok(ModuleTable::new(lattice.clone(), rule))
}

/// Gauge file: `[[σcoords, "scalar"], ...]`; unlisted elements scale by the
/// identity.
pub fn load_gauge(path: &Path, rank: usize) -> Result<BTreeMap<DeltaElt, GaussRat>, CliError> {
    let raw: Vec<(Vec<i64>, String)> = read_json(path)?;
    let mut table = BTreeMap::new();
    for (s, text) in raw {
        let sigma = elt_from_coords(&s, rank, "gauge σ")?;
        let value: GaussRat = text.parse().map_err(|e| {
            CliError::Input(format!("invalid scalar {text:?} in {}: {e}", path.display()))
        })?;
        table.insert(sigma, value);
    }
    Ok(table)
}
