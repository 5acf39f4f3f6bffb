use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A Lebesgue or summability exponent in `[1, ∞]`.
///
/// `∞` is stored as `f64::INFINITY`; every other value is finite and `>= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::Parameter(format!("exponent must lie in [1, inf], got {value}")));
        }
        Ok(Exponent(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        if self.is_infinite() {
            Exponent::ONE
        } else if self.0 == 1.0 {
            Exponent::INFINITY
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    /// `(Σ w_i |x_i|^p)^{1/p}`, or `max |x_i|` when `p = ∞` (weights ignored).
    pub fn weighted_norm<I>(self, terms: I) -> f64
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        if self.is_infinite() {
            terms.into_iter().fold(0.0, |m, (_, x)| m.max(x.abs()))
        } else if self.0 == 1.0 {
            terms.into_iter().map(|(w, x)| w * x.abs()).sum()
        } else if self.0 == 2.0 {
            terms.into_iter().map(|(w, x)| w * x * x).sum::<f64>().sqrt()
        } else {
            let p = self.0;
            terms
                .into_iter()
                .map(|(w, x)| w * x.abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        }
    }

    /// Unweighted ℓ^p norm.
    pub fn seq_norm<I>(self, terms: I) -> f64
    where
        I: IntoIterator<Item = f64>,
    {
        self.weighted_norm(terms.into_iter().map(|x| (1.0, x)))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("cannot parse exponent {s:?}")))
                .and_then(Exponent::new),
        }
    }
}
