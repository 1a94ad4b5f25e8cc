//! Exact rational parameters (γ, ε, α, β) carried as `p/q` strings.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigUint;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced rational number. Serializes as the string `"p/q"` (or `"p"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `2/3 + ε/(9 + 9ε)`, the sequence density used with the order 3+ε construction.
    pub fn gamma_for_epsilon(eps: Rational) -> Rational {
        let e = eps.0;
        let nine = Ratio::from_integer(9);
        Rational(Ratio::new(2, 3) + e / (nine + nine * e))
    }
}

impl From<Ratio<i64>> for Rational {
    fn from(r: Ratio<i64>) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `floor(n^e)` for a rational exponent `e = a/b` with `0 <= e`, computed exactly:
/// the result `t` satisfies `t^b <= n^a < (t+1)^b`.
pub fn floor_rational_power(n: u64, e: Rational) -> u64 {
    assert!(e.numer() >= 0, "negative exponent");
    if n <= 1 || e.numer() == 0 {
        return if e.numer() == 0 { 1 } else { n };
    }
    let a = e.numer() as u32;
    let b = e.denom() as u32;
    let target = BigUint::from(n).pow(a);
    let fits = |t: u64| BigUint::from(t).pow(b) <= target;
    let guess = (n as f64).powf(e.to_f64()).floor();
    let mut t = if guess.is_finite() && guess >= 0.0 { guess as u64 } else { 0 };
    while t > 0 && !fits(t) {
        t -= 1;
    }
    while fits(t + 1) {
        t += 1;
    }
    t
}

/// Exact `n^e` as `f64` when the rational exponent is an integer, `powf` otherwise.
pub fn pow_f64(x: f64, e: Rational) -> f64 {
    if e.denom() == 1 {
        if let Some(k) = e.numer().to_i32() {
            return x.powi(k);
        }
    }
    x.powf(e.to_f64())
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational(Ratio::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational(Ratio::one())
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}
