//! Exact cyclic convolution powers via a three-prime number-theoretic transform
//! recombined with Garner's algorithm.

use crate::error::{Error, Result};

const P1: u64 = 998_244_353;
const P2: u64 = 167_772_161;
const P3: u64 = 469_762_049;
const ROOT: u64 = 3;
/// Largest transform length supported by all three primes.
const MAX_LEN: usize = 1 << 23;

fn pw(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn ntt<const M: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pw(ROOT, (M - 1) / len as u64, M);
        if invert {
            w = pw(w, M - 2, M);
        }
        let half = len / 2;
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % M;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * tw[k] % M;
                lo[k] = if u + v >= M { u + v - M } else { u + v };
                hi[k] = if u >= v { u - v } else { u + M - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pw(n as u64, M - 2, M);
        for x in a.iter_mut() {
            *x = *x * inv_n % M;
        }
    }
}

/// `IDFT(DFT(a)^h)` modulo `M` for a power-of-two length.
fn power_mod<const M: u64>(input: &[u128], len: usize, h: u32) -> Vec<u64> {
    let mut a = vec![0u64; len];
    for (dst, &x) in a.iter_mut().zip(input) {
        *dst = (x % M as u128) as u64;
    }
    ntt::<M>(&mut a, false);
    for x in a.iter_mut() {
        *x = pw(*x, h as u64, M);
    }
    ntt::<M>(&mut a, true);
    a
}

fn product_mod<const M: u64>(x: &[u128], y: &[u128], len: usize) -> Vec<u64> {
    let load = |src: &[u128]| {
        let mut a = vec![0u64; len];
        for (dst, &v) in a.iter_mut().zip(src) {
            *dst = (v % M as u128) as u64;
        }
        ntt::<M>(&mut a, false);
        a
    };
    let (mut a, b) = rayon::join(|| load(x), || load(y));
    for (u, v) in a.iter_mut().zip(&b) {
        *u = *u * v % M;
    }
    ntt::<M>(&mut a, true);
    a
}

/// Recombines residues mod `P1, P2, P3` into the unique value below `P1·P2·P3`.
fn garner(r1: u64, r2: u64, r3: u64) -> u128 {
    let inv_p1_mod_p2 = pw(P1 % P2, P2 - 2, P2);
    let p1p2_mod_p3 = (P1 % P3) * (P2 % P3) % P3;
    let inv_p1p2_mod_p3 = pw(p1p2_mod_p3, P3 - 2, P3);
    let x1 = r1;
    let x2 = ((r2 + P2 - x1 % P2) % P2) * inv_p1_mod_p2 % P2;
    let partial = (x1 + x2 % P3 * (P1 % P3)) % P3;
    let x3 = ((r3 + P3 - partial) % P3) * inv_p1p2_mod_p3 % P3;
    x1 as u128 + x2 as u128 * P1 as u128 + x3 as u128 * (P1 as u128 * P2 as u128)
}

fn recombine(a: Vec<u64>, b: Vec<u64>, c: Vec<u64>) -> Vec<u128> {
    a.into_iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| garner(x, y, z))
        .collect()
}

fn three_prime_power(input: &[u128], len: usize, h: u32) -> Vec<u128> {
    let ((a, b), c) = rayon::join(
        || rayon::join(|| power_mod::<P1>(input, len, h), || power_mod::<P2>(input, len, h)),
        || power_mod::<P3>(input, len, h),
    );
    recombine(a, b, c)
}

fn three_prime_product(x: &[u128], y: &[u128], len: usize) -> Vec<u128> {
    let ((a, b), c) = rayon::join(
        || rayon::join(|| product_mod::<P1>(x, y, len), || product_mod::<P2>(x, y, len)),
        || product_mod::<P3>(x, y, len),
    );
    recombine(a, b, c)
}

fn fold(linear: &[u128], n: usize) -> Vec<u128> {
    let mut out = vec![0u128; n];
    for (i, &v) in linear.iter().enumerate() {
        out[i % n] += v;
    }
    out
}

/// Ordered `h`-fold representation counts over `Z_n`: entry `t` is the number of
/// tuples `(a_1, …, a_h) ∈ A^h` with `a_1 + … + a_h ≡ t (mod n)`.
///
/// Fails with `EngineUnavailable` when the counts could exceed the CRT headroom
/// or the required transform is too long.
pub fn cyclic_power_counts(elements: &[u64], n: u64, h: u32) -> Result<Vec<u128>> {
    if n == 0 || h == 0 {
        return Err(Error::InvalidParameter("modulus and arity must be positive".into()));
    }
    let headroom = P1 as u128 * P2 as u128 * P3 as u128;
    let k = elements.len() as u128;
    let mut bound: u128 = 1;
    for _ in 0..h {
        bound = bound
            .checked_mul(k.max(1))
            .filter(|&b| b < headroom)
            .ok_or_else(|| Error::EngineUnavailable(format!("|A|^{h} exceeds transform headroom")))?;
    }
    let nu = n as usize;
    let mut ind = vec![0u128; nu];
    for &e in elements {
        ind[(e % n) as usize] = 1;
    }
    if h == 1 {
        return Ok(ind);
    }
    if nu.is_power_of_two() && nu <= MAX_LEN {
        return Ok(three_prime_power(&ind, nu, h));
    }
    let linear_len = (h as u128) * (nu as u128 - 1) + 1;
    if linear_len <= MAX_LEN as u128 {
        let len = (linear_len as usize).next_power_of_two();
        let lin = three_prime_power(&ind, len, h);
        return Ok(fold(&lin[..linear_len as usize], nu));
    }
    let step_len = 2 * nu - 1;
    if step_len > MAX_LEN {
        return Err(Error::EngineUnavailable(format!("modulus {n} too large for transform")));
    }
    let len = step_len.next_power_of_two();
    let mut cur = ind.clone();
    for _ in 1..h {
        let lin = three_prime_product(&cur, &ind, len);
        cur = fold(&lin[..step_len], nu);
    }
    Ok(cur)
}
