//! Finite and infinite power sums with certified tails.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Parameters of the two-variable sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumSpec {
    pub alpha: Rational,
    pub beta: Rational,
    pub n: u64,
    pub m: u64,
    /// Target absolute error for infinite sums.
    pub tail_tolerance: f64,
}

impl SumSpec {
    pub fn new(alpha: Rational, beta: Rational, n: u64, m: u64, tail_tolerance: f64) -> Result<Self> {
        let one = Rational::from_integer(1);
        if alpha >= one || beta >= one {
            return Err(Error::InvalidParameter("alpha and beta must be below 1".into()));
        }
        if n == 0 {
            return Err(Error::Range("n must be positive".into()));
        }
        if tail_tolerance.is_nan() || tail_tolerance <= 0.0 {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(SumSpec {
            alpha,
            beta,
            n,
            m,
            tail_tolerance,
        })
    }
}

/// `Σ x^-α y^-β` over `x, y > m`, `x + y = n`, compensated.
pub fn sigma(spec: &SumSpec) -> f64 {
    sigma_f64(spec.alpha.to_f64(), spec.beta.to_f64(), spec.n, spec.m)
}

pub fn sigma_f64(alpha: f64, beta: f64, n: u64, m: u64) -> f64 {
    let mut acc = Accum::default();
    if n > 2 * m + 1 {
        for x in m + 1..n - m {
            acc.add((x as f64).powf(-alpha) * ((n - x) as f64).powf(-beta));
        }
    }
    acc.value()
}

/// Plain left-to-right summation, used to cross-check precision.
pub fn sigma_naive(alpha: f64, beta: f64, n: u64, m: u64) -> f64 {
    let mut s = 0.0;
    if n > 2 * m + 1 {
        for x in m + 1..n - m {
            s += (x as f64).powf(-alpha) * ((n - x) as f64).powf(-beta);
        }
    }
    s
}

/// A value with a rigorous absolute error bound (up to float rounding).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: f64,
    pub error: f64,
    /// Last index summed explicitly.
    pub cutoff: u64,
    /// The crude majorant `Y^(1-s)/(s-1)` for the same cutoff.
    pub crude_tail: f64,
}

/// `f(t) = t^-s Π (1 + c_i/t)^-e_i` with `s > 1`, `c_i >= 0`, `|e_i| < 1`
/// (or `e_i = 1`), at most two factors.
#[derive(Clone, Debug)]
struct PowerSeries {
    s: f64,
    factors: Vec<(f64, f64)>,
}

const TERMS: usize = 60;

impl PowerSeries {
    fn eval(&self, t: f64) -> f64 {
        let mut v = t.powf(-self.s);
        for &(c, e) in &self.factors {
            v *= (1.0 + c / t).powf(-e);
        }
        v
    }

    fn cmax(&self) -> f64 {
        self.factors.iter().map(|f| f.0).fold(0.0, f64::max)
    }

    /// Coefficients `d_j` of `Π (1 + c_i u)^-e_i = Σ d_j u^j`.
    fn coefficients(&self) -> Vec<f64> {
        let mut d = vec![0.0; TERMS];
        d[0] = 1.0;
        for &(c, e) in &self.factors {
            let mut b = vec![0.0; TERMS];
            b[0] = 1.0;
            for j in 1..TERMS {
                b[j] = b[j - 1] * (-e - (j - 1) as f64) / j as f64 * c;
            }
            let mut next = vec![0.0; TERMS];
            for i in 0..TERMS {
                for j in 0..TERMS - i {
                    next[i + j] += d[i] * b[j];
                }
            }
            d = next;
        }
        d
    }

    /// `∫_a^∞ f` and a bound on the truncation error, for `a >= 2 cmax`.
    fn integral(&self, a: f64, coeffs: &[f64]) -> (f64, f64) {
        let mut acc = Accum::default();
        for (j, &dj) in coeffs.iter().enumerate() {
            let k = self.s + j as f64 - 1.0;
            acc.add(dj * a.powf(-k) / k);
        }
        let rho = self.cmax() / a;
        // |d_j| <= (j+1)^(r-1) cmax^j and (j+1)/(s+j-1) <= 2 for j >= 1, r <= 2
        let rem = 2.0 * a.powf(1.0 - self.s) * rho.powi(TERMS as i32) / (1.0 - rho);
        (acc.value(), rem)
    }

    /// `Σ_{t >= start} f(t)` to absolute error `tol`.
    fn sum_from(&self, start: u64, tol: f64) -> Result<Certified> {
        assert!(self.factors.len() <= 2 && self.s > 1.0);
        let coeffs = self.coefficients();
        let mut y = start.max((2.0 * self.cmax()).ceil() as u64 + 1).max(64);
        let mut acc = Accum::default();
        let mut next = start;
        loop {
            while next <= y {
                acc.add(self.eval(next as f64));
                next += 1;
            }
            let yf = y as f64;
            let (i_y, r1) = self.integral(yf, &coeffs);
            let (i_mid, r2) = self.integral(yf + 0.5, &coeffs);
            let lower = i_y - self.eval(yf) / 2.0 - r1;
            let upper = i_mid + r2;
            let err = (upper - lower) / 2.0;
            if err <= tol {
                return Ok(Certified {
                    value: acc.value() + (upper + lower) / 2.0,
                    error: err,
                    cutoff: y,
                    crude_tail: yf.powf(1.0 - self.s) / (self.s - 1.0),
                });
            }
            if y > (1u64 << 40) {
                return Err(Error::NonConvergent(format!("tail error {err:e} above {tol:e}")));
            }
            y *= 2;
        }
    }
}

/// `Σ x^-α y^-β` over `x, y > m`, `x - y = n`.
pub fn tau(spec: &SumSpec) -> Result<Certified> {
    let (a, b) = (spec.alpha.to_f64(), spec.beta.to_f64());
    tau_f64(a, b, spec.n, spec.m, spec.tail_tolerance)
}

pub fn tau_f64(alpha: f64, beta: f64, n: u64, m: u64, tol: f64) -> Result<Certified> {
    if alpha + beta <= 1.0 {
        return Err(Error::NonConvergent(format!("alpha + beta = {} <= 1", alpha + beta)));
    }
    // y^-β (y + n)^-α = y^-(α+β) (1 + n/y)^-α
    let f = PowerSeries {
        s: alpha + beta,
        factors: vec![(n as f64, alpha)],
    };
    f.sum_from(m + 1, tol)
}

/// `Σ_{x>=1} x^-γ (x+a)^-γ (x+b)^(1-2γ)`.
pub fn abab_series(gamma: f64, a: u64, b: u64, tol: f64) -> Result<Certified> {
    let s = 4.0 * gamma - 1.0;
    if s <= 1.0 {
        return Err(Error::NonConvergent(format!("tail exponent 4γ - 1 = {s} <= 1")));
    }
    let f = PowerSeries {
        s,
        factors: vec![(a as f64, gamma), (b as f64, 2.0 * gamma - 1.0)],
    };
    f.sum_from(1, tol)
}
