//! Small-scale exact number theory: primality, generators, CRT flattening of
//! `Z_{p-1} x Z_p`, modular square roots and the prime search used by the
//! Erdős–Turán decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let (a, b) = (a % m, b % m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p` (Fermat). `a` must be nonzero mod `p`.
pub fn inv_mod_prime(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

// Deterministic for every n < 2^64 (Jim Sinclair's seven-base set).
const MR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Exact primality test (deterministic Miller–Rabin).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &base in &MR_BASES {
        let a = base % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` by trial division, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of `g` modulo the prime `p`.
pub fn multiplicative_order(g: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if g.is_multiple_of(p) {
        return Err(Error::Range(format!("{g} is not a unit mod {p}")));
    }
    let mut order = p - 1;
    for q in prime_factors(p - 1) {
        while order.is_multiple_of(q) && pow_mod(g, order / q, p) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

fn generates(g: u64, p: u64, factors: &[u64]) -> bool {
    !g.is_multiple_of(p) && factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)
}

/// True iff `g` has order exactly `p - 1` modulo the prime `p`.
pub fn is_generator(g: u64, p: u64) -> bool {
    if !is_prime(p) || g == 0 || g >= p {
        return false;
    }
    if p == 2 {
        return g == 1;
    }
    generates(g, p, &prime_factors(p - 1))
}

/// Smallest generator of `F_p^*`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| generates(g, p, &factors))
        .ok_or(Error::NotPrime(p))
}

/// The unique `t` in `[0, (p-1)p)` with `t = u (mod p-1)` and `t = v (mod p)`.
pub fn crt_flatten(u: u64, v: u64, p: u64) -> Result<u64> {
    if p < 2 {
        return Err(Error::Range(format!("modulus p = {p} too small")));
    }
    if u >= p - 1 || v >= p {
        return Err(Error::Range(format!(
            "({u}, {v}) outside Z_{} x Z_{p}",
            p - 1
        )));
    }
    // p = 1 (mod p-1), so t = v + p*k needs v + k = u (mod p-1).
    let k = sub_mod(u, v, p - 1);
    Ok(v + p * k)
}

/// Inverse of [`crt_flatten`].
pub fn crt_split(t: u64, p: u64) -> (u64, u64) {
    (t % (p - 1), t % p)
}

/// Euler's criterion: true iff `a` is a nonzero square mod the odd prime `p`.
pub fn is_quadratic_residue(a: u64, p: u64) -> bool {
    let a = a % p;
    a != 0 && pow_mod(a, (p - 1) / 2, p) == 1
}

/// A square root of `a` mod the odd prime `p` (Tonelli–Shanks), if one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if !is_quadratic_residue(a, p) {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| !is_quadratic_residue(z, p))?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Smallest prime `p >= 7`, `p = 1 (mod 3)`, with `4p^2 < n < 5p^2`.
pub fn find_basis_prime(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Range(format!("N = {n} must be at least 2")));
    }
    let n = n as u128;
    let mut p = 7u64;
    while 4 * (p as u128).pow(2) < n {
        let sq = (p as u128).pow(2);
        if p % 3 == 1 && n < 5 * sq && is_prime(p) {
            return Ok(p);
        }
        p += 1;
    }
    Err(Error::PrimeNotFound(n as u64))
}

/// A prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// A prime together with a generator of its multiplicative group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorPair {
    p: u64,
    g: u64,
}

impl GeneratorPair {
    pub fn new(p: u64, g: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !is_generator(g, p) {
            return Err(Error::NotGenerator { p, g });
        }
        Ok(GeneratorPair { p, g })
    }

    /// The pair `(p, smallest generator)`.
    pub fn smallest(p: u64) -> Result<Self> {
        Ok(GeneratorPair {
            p,
            g: primitive_root(p)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn g(&self) -> u64 {
        self.g
    }
}
