//! Sparse exact polynomials in the three formal variables λ, μ, ∂ over ℚ(i).
//!
//! The λ-calculus only ever needs these three variables, so exponent keys are
//! flat `[u32; 3]` triples `(e_λ, e_μ, e_∂)`. In text form the variables are
//! written `L`, `M`, `D`.

use crate::scalar::{GaussRat, ParseScalarError};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// One of the three formal variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// λ — the bracket variable.
    L,
    /// μ — the second bracket variable in Jacobi-type identities.
    M,
    /// ∂ — the translation generator.
    D,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::L, Var::M, Var::D];

    fn idx(self) -> usize {
        match self {
            Var::L => 0,
            Var::M => 1,
            Var::D => 2,
        }
    }

    fn letter(self) -> char {
        match self {
            Var::L => 'L',
            Var::M => 'M',
            Var::D => 'D',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("division by the zero polynomial")]
pub struct DivByZero;

/// A polynomial in λ, μ, ∂. No zero coefficients are stored, so structural
/// equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<[u32; 3], GaussRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        Poly::monomial(c, [0, 0, 0])
    }

    pub fn var(v: Var) -> Self {
        let mut key = [0, 0, 0];
        key[v.idx()] = 1;
        Poly::monomial(GaussRat::one(), key)
    }

    pub fn monomial(c: GaussRat, key: [u32; 3]) -> Self {
        let mut p = Poly::zero();
        p.add_term(key, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32; 3], &GaussRat)> {
        self.terms.iter()
    }

    /// The coefficient of the monomial with the given exponents (zero if
    /// absent).
    pub fn coeff(&self, key: [u32; 3]) -> GaussRat {
        self.terms.get(&key).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|k| k[v.idx()]).max()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.iter().sum()).max()
    }

    fn add_term(&mut self, key: [u32; 3], c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        let mut out = Poly::zero();
        for (key, v) in &self.terms {
            out.add_term(*key, c * v);
        }
        out
    }

    /// Replace `var` by `repl` in one simultaneous pass; the other variables
    /// are untouched. `repl` may itself contain `var`.
    pub fn substitute(&self, var: Var, repl: &Poly) -> Poly {
        let mut images = [Poly::var(Var::L), Poly::var(Var::M), Poly::var(Var::D)];
        images[var.idx()] = repl.clone();
        self.subst_all(&images)
    }

    /// Replace every variable at once: λ ↦ images[0], μ ↦ images[1],
    /// ∂ ↦ images[2]. Simultaneous, so swaps like (λ, ∂) ↦ (∂, λ) are safe.
    pub fn subst_all(&self, images: &[Poly; 3]) -> Poly {
        // Power tables keep repeated substitution cheap.
        let mut maxes = [0u32; 3];
        for key in self.terms.keys() {
            for v in 0..3 {
                maxes[v] = maxes[v].max(key[v]);
            }
        }
        let powers: Vec<Vec<Poly>> = (0..3)
            .map(|v| {
                let mut table = vec![Poly::one()];
                for k in 0..maxes[v] as usize {
                    table.push(&table[k] * &images[v]);
                }
                table
            })
            .collect();
        let mut acc = Poly::zero();
        for (key, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for v in 0..3 {
                term = &term * &powers[v][key[v] as usize];
            }
            acc = &acc + &term;
        }
        acc
    }

    /// The coefficient of `var^k`, as a polynomial in the other variables.
    pub fn coeff_of(&self, var: Var, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (key, c) in &self.terms {
            if key[var.idx()] == k {
                let mut reduced = *key;
                reduced[var.idx()] = 0;
                out.add_term(reduced, c.clone());
            }
        }
        out
    }

    fn leading(&self) -> Option<(&[u32; 3], &GaussRat)> {
        self.terms.iter().next_back()
    }

    /// Exact division: `Some(r)` with `self = q·r` when `q` divides exactly,
    /// `None` otherwise. Long division on leading terms in lexicographic
    /// order; any failing step certifies non-divisibility.
    pub fn div_exact(&self, q: &Poly) -> Result<Option<Poly>, DivByZero> {
        let (qkey, qc) = q.leading().ok_or(DivByZero)?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rkey, rc)) = rem.leading() {
            let mut step = [0u32; 3];
            for v in 0..3 {
                match rkey[v].checked_sub(qkey[v]) {
                    Some(d) => step[v] = d,
                    None => return Ok(None),
                }
            }
            let coeff = rc / qc;
            let term = Poly::monomial(coeff, step);
            rem = &rem - &(&term * q);
            quot = &quot + &term;
        }
        Ok(Some(quot))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (key, c) in &rhs.terms {
            out.add_term(*key, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (key, c) in &rhs.terms {
            out.add_term(*key, -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let key = [ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]];
                out.add_term(key, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($($t:ident :: $f:ident),*) => {$(
        impl $t for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                $t::$f(&self, &rhs)
            }
        }
    )*};
}
forward_owned_binop!(Add::add, Sub::sub, Mul::mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

fn fmt_vars(key: &[u32; 3]) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        let e = key[v.idx()];
        match e {
            0 => {}
            1 => parts.push(v.letter().to_string()),
            _ => parts.push(format!("{}^{}", v.letter(), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Canonical term order: (e_∂, e_μ, e_λ) descending, matching the
        // report convention `4/3*D + 11/3*L + -1/2`.
        let mut keys: Vec<&[u32; 3]> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k[2], k[1], k[0])));
        let rendered: Vec<String> = keys
            .into_iter()
            .map(|key| {
                let c = &self.terms[key];
                let vars = fmt_vars(key);
                if vars.is_empty() {
                    c.to_string()
                } else if c.is_rational() {
                    format!("{c}*{vars}")
                } else {
                    // Complex coefficients are parenthesized so the `*i`
                    // marker cannot be confused with a variable factor.
                    format!("({c})*{vars}")
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid polynomial text `{0}`")]
pub struct ParsePolyError(pub String);

impl From<ParseScalarError> for ParsePolyError {
    fn from(e: ParseScalarError) -> Self {
        ParsePolyError(e.0)
    }
}

fn parse_var_factors(s: &str, err: impl Fn() -> ParsePolyError) -> Result<[u32; 3], ParsePolyError> {
    let mut key = [0u32; 3];
    for factor in s.split('*') {
        let mut chars = factor.chars();
        let var = match chars.next() {
            Some('L') => Var::L,
            Some('M') => Var::M,
            Some('D') => Var::D,
            _ => return Err(err()),
        };
        let rest = chars.as_str();
        let exp: u32 = if rest.is_empty() {
            1
        } else {
            let digits = rest.strip_prefix('^').ok_or_else(&err)?;
            digits.parse().map_err(|_| err())?
        };
        key[var.idx()] += exp;
    }
    Ok(key)
}

fn parse_term(s: &str) -> Result<(GaussRat, [u32; 3]), ParsePolyError> {
    let s = s.trim();
    let err = || ParsePolyError(s.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some(rest) = s.strip_prefix('(') {
        let (coeff, tail) = rest.split_once(')').ok_or_else(err)?;
        let coeff: GaussRat = coeff.parse()?;
        if tail.is_empty() {
            return Ok((coeff, [0, 0, 0]));
        }
        let vars = tail.strip_prefix('*').ok_or_else(err)?;
        return Ok((coeff, parse_var_factors(vars, err)?));
    }
    if s.starts_with(['L', 'M', 'D']) {
        return Ok((GaussRat::one(), parse_var_factors(s, err)?));
    }
    // Split at the first `*` directly followed by a variable letter; a `*i`
    // stays with the coefficient.
    let split = s.as_bytes().windows(2).position(|w| {
        w[0] == b'*' && matches!(w[1], b'L' | b'M' | b'D')
    });
    match split {
        Some(idx) => {
            let coeff: GaussRat = s[..idx].parse()?;
            Ok((coeff, parse_var_factors(&s[idx + 1..], err)?))
        }
        None => Ok((s.parse::<GaussRat>()?, [0, 0, 0])),
    }
}

impl FromStr for Poly {
    type Err = ParsePolyError;

    /// Parses the canonical text form: terms joined by ` + `, each
    /// `COEF`, `COEF*VARS`, or bare `VARS` with `VARS` like `L^2*D`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut out = Poly::zero();
        for term in s.split(" + ") {
            let (c, key) = parse_term(term)?;
            out.add_term(key, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_cancels_exactly() {
        let lam = Poly::var(Var::L);
        let del = Poly::var(Var::D);
        assert_eq!(&(&lam + &del) + &-&lam, del);
        assert_eq!(
            &(&lam + &del) * &(&lam - &del),
            &(&lam * &lam) - &(&del * &del)
        );
        let three_lm = Poly::monomial(GaussRat::from_int(3), [1, 1, 0]);
        assert_eq!(
            three_lm.scale(&GaussRat::rat(1, 3)),
            Poly::monomial(GaussRat::one(), [1, 1, 0])
        );
    }

    #[test]
    fn substitution() {
        let lam_sq = p("1*L^2");
        assert_eq!(
            lam_sq.substitute(Var::L, &p("-1*L + -1*D")),
            p("1*D^2 + 2*L*D + 1*L^2")
        );
        assert_eq!(
            p("1*D + 1*M").substitute(Var::D, &p("1*D + 1*L")),
            p("1*D + 1*M + 1*L")
        );
        // f₀(λ, −λ)-style sign flip with b = 1/3, φ(α) = 1/2.
        assert_eq!(
            p("1/3*L + 1/2").substitute(Var::L, &-&Poly::var(Var::L)),
            p("-1/3*L + 1/2")
        );
    }

    #[test]
    fn simultaneous_swap() {
        let q = p("1*L + 2*D");
        let images = [Poly::var(Var::D), Poly::var(Var::M), Poly::var(Var::L)];
        assert_eq!(q.subst_all(&images), p("1*D + 2*L"));
    }

    #[test]
    fn exact_division() {
        let d = p("1/3*L + 1/2");
        assert_eq!(d.div_exact(&d), Ok(Some(Poly::one())));
        assert_eq!(
            p("1*L^2 + -1*D^2").div_exact(&p("1*L + 1*D")),
            Ok(Some(p("1*L + -1*D")))
        );
        assert_eq!(p("1*L + 1").div_exact(&p("1*L + 1*D")), Ok(None));
        assert_eq!(p("1*L").div_exact(&Poly::zero()), Err(DivByZero));
        // Quotients can need interior terms, not just leading ones.
        let a = p("1*L^2 + 3*L + 2");
        let b = p("1*L + 1");
        assert_eq!(a.div_exact(&b), Ok(Some(p("1*L + 2"))));
    }

    #[test]
    fn coefficient_extraction() {
        let q = p("1*L^2*D + 3*L");
        assert_eq!(q.coeff_of(Var::L, 1), p("3"));
        assert_eq!(q.coeff_of(Var::L, 2), p("1*D"));
        assert_eq!(p("1*M^3").coeff_of(Var::L, 0), p("1*M^3"));
        assert_eq!(q.coeff_of(Var::M, 1), Poly::zero());
    }

    #[test]
    fn degrees() {
        let q = p("1*L^2*D + 3*M");
        assert_eq!(q.degree_in(Var::L), Some(2));
        assert_eq!(q.degree_in(Var::D), Some(1));
        assert_eq!(q.total_degree(), Some(3));
        assert_eq!(Poly::zero().degree_in(Var::L), None);
        assert_eq!(Poly::zero().total_degree(), None);
    }

    #[test]
    fn display_canonical_order() {
        let q = &(&Poly::var(Var::D).scale(&GaussRat::rat(4, 3))
            + &Poly::var(Var::L).scale(&GaussRat::rat(11, 3)))
            + &Poly::constant(GaussRat::rat(-1, 2));
        assert_eq!(q.to_string(), "4/3*D + 11/3*L + -1/2");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn text_round_trip() {
        for s in [
            "0",
            "4/3*D + 11/3*L + -1/2",
            "1*L^2*D + -1/2*M",
            "(1+2*i)*M + 3*i",
            "1*D^3 + 1*M^2*D + 1*L*M*D",
        ] {
            assert_eq!(p(s).to_string(), s, "round trip of {s:?}");
        }
        // Bare variables are accepted on input.
        assert_eq!(p("L^2*D + M"), p("1*L^2*D + 1*M"));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["1*", "*L", "1L", "L^", "1 - 2", "(1+2*i", "Q", "1*L^x"] {
            assert!(s.parse::<Poly>().is_err(), "accepted {s:?}");
        }
    }
}
