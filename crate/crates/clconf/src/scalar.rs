//! Exact Gaussian-rational scalars: the computable coefficient field ℚ(i).

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// An element `re + im*i` of ℚ(i). Both parts are kept reduced with positive
/// denominator, so structural equality is field equality and no rounding ever
/// occurs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// The rational p/q as a scalar. Panics if `q == 0`.
    pub fn rat(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        GaussRat::new(
            BigRational::new(p.into(), q.into()),
            BigRational::zero(),
        )
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn zero() -> Self {
        GaussRat::from_int(0)
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    /// True if the imaginary part vanishes.
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat::new(&self.re / &norm, -(&self.im / &norm)))
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: &GaussRat) -> GaussRat {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned_binop {
    ($($t:ident :: $f:ident),*) => {$(
        impl $t for GaussRat {
            type Output = GaussRat;
            fn $f(self, rhs: GaussRat) -> GaussRat {
                $t::$f(&self, &rhs)
            }
        }
    )*};
}
forward_owned_binop!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Error for text that does not match the scalar grammar
/// `RAT := [+-]? INT ("/" POSINT)?`, `GAUSS := RAT | RAT [+-] RAT "*i" | RAT "*i"`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid scalar `{0}`")]
pub struct ParseScalarError(pub String);

fn parse_rat(s: &str) -> Result<BigRational, ParseScalarError> {
    let err = || ParseScalarError(s.to_string());
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer = BigInt::from_str(numer).map_err(|_| err())?;
    let denom = match denom {
        Some(d) => {
            // POSINT: no sign allowed on the denominator.
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let d = BigInt::from_str(d).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            d
        }
        None => BigInt::one(),
    };
    Ok(BigRational::new(numer, denom))
}

impl FromStr for GaussRat {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let Some(body) = trimmed.strip_suffix("*i") else {
            return Ok(GaussRat::new(parse_rat(trimmed)?, BigRational::zero()));
        };
        // Split `RAT [+-] RAT` at a sign that follows a digit; a leading sign
        // or the sign of the lone imaginary coefficient never matches.
        let split = body
            .char_indices()
            .skip(1)
            .find(|&(idx, c)| {
                (c == '+' || c == '-')
                    && body.as_bytes()[idx - 1].is_ascii_digit()
            })
            .map(|(idx, _)| idx);
        match split {
            Some(idx) => Ok(GaussRat::new(
                parse_rat(&body[..idx])?,
                parse_rat(&body[idx..])?,
            )),
            None => Ok(GaussRat::new(BigRational::zero(), parse_rat(body)?)),
        }
    }
}
