//! Constructive decompositions: three and four distinct summands in Ruzsa's
//! group and three Erdős–Turán summands in `Z_N` via the quadric lift.

use serde::{Deserialize, Serialize};

use crate::curve::{enumerate_quadric, QuadricParams};
use crate::error::{Error, Result};
use crate::numbertheory::{crt_flatten, crt_split, find_basis_prime, is_generator, is_prime, mul_mod};
use crate::sidon::erdos_turan_element;

/// Powers of `g` and their inverse map, built once per `(p, g)`.
#[derive(Clone, Debug)]
pub struct DlogTable {
    p: u64,
    g: u64,
    pow: Vec<u64>,
    log: Vec<u64>,
}

const NO_LOG: u64 = u64::MAX;

impl DlogTable {
    pub fn new(p: u64, g: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !is_generator(g, p) {
            return Err(Error::NotGenerator { p, g });
        }
        let mut pow = Vec::with_capacity((p - 1) as usize);
        let mut log = vec![NO_LOG; p as usize];
        let mut cur = 1 % p;
        for x in 0..p - 1 {
            pow.push(cur);
            log[cur as usize] = x;
            cur = mul_mod(cur, g, p);
        }
        Ok(DlogTable { p, g, pow, log })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn pow(&self, x: u64) -> u64 {
        self.pow[(x % (self.p - 1)) as usize]
    }

    /// Discrete log of a nonzero residue.
    pub fn log(&self, v: u64) -> Option<u64> {
        Some(self.log[(v % self.p) as usize]).filter(|&l| l != NO_LOG)
    }

    /// The Ruzsa element with first coordinate `x`, flattened.
    pub fn element(&self, x: u64) -> u64 {
        crt_flatten(x % (self.p - 1), self.pow(x), self.p).expect("in range")
    }

    fn check_target(&self, a: u64, b: u64) -> Result<()> {
        if a >= self.p - 1 || b >= self.p {
            return Err(Error::Range(format!(
                "target ({a}, {b}) outside Z_{} x Z_{}",
                self.p - 1,
                self.p
            )));
        }
        Ok(())
    }

    /// First `(x1, x2, x3)` in lexicographic order solving the triple system.
    fn search3(&self, a: u64, b: u64, distinct: bool, avoid_zero: bool) -> Option<[u64; 3]> {
        let q = self.p - 1;
        let p = self.p;
        for x1 in 0..q {
            for x2 in 0..q {
                let partial = (self.pow(x1) + self.pow(x2)) % p;
                let need = (b + 2 * p - partial) % p;
                let Some(x3) = self.log(need) else { continue };
                if (x1 + x2 + x3) % q != a {
                    continue;
                }
                if distinct && (x1 == x2 || x1 == x3 || x2 == x3) {
                    continue;
                }
                if avoid_zero && (x1 == 0 || x2 == 0 || x3 == 0) {
                    continue;
                }
                return Some([x1, x2, x3]);
            }
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Ruzsa,
    ErdosTuran,
}

/// Search strategy for the `Z_N` decomposer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Only quadric points inside the narrow box around the lift.
    Box,
    /// Every quadric point, accepting exact lifts.
    Exhaustive,
}

/// `n ≡ r1 + 2p·r2 (mod N)` with `K <= r1, r2 <= (5p-1)/2 + K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftTarget {
    pub p: u64,
    pub k: u64,
    pub r1: u64,
    pub r2: u64,
    pub n: u64,
    pub modulus: u64,
}

impl LiftTarget {
    pub fn upper(&self) -> u64 {
        (5 * self.p - 1) / 2 + self.k
    }

    pub fn verify(&self) -> bool {
        let u = self.upper();
        self.k == self.p.div_ceil(4)
            && (self.k..=u).contains(&self.r1)
            && (self.k..=u).contains(&self.r2)
            && (self.r1 + 2 * self.p * self.r2) % self.modulus == self.n
    }
}

/// Exact identities behind a decomposition, replayable without search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// First coordinates `x_i` of the summands.
    pub coords: Vec<u64>,
    /// Generator for Ruzsa decompositions.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lift: Option<LiftTarget>,
    pub distinct: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub target: u64,
    pub modulus: u64,
    pub parts: Vec<u64>,
    pub construction: Construction,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<SearchMode>,
    pub certificate: Certificate,
}

impl Decomposition {
    /// Re-checks membership, the sum, distinctness and (for lifts) the integer identities.
    pub fn replay(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidParameter(format!("replay failed: {m}")));
        let c = &self.certificate;
        if c.coords.len() != self.parts.len() {
            return fail("coordinate count");
        }
        let p = self.p;
        match self.construction {
            Construction::Ruzsa => {
                let g = c.g.ok_or_else(|| Error::InvalidParameter("missing generator".into()))?;
                let t = DlogTable::new(p, g)?;
                if self.modulus != (p - 1) * p {
                    return fail("modulus");
                }
                for (&x, &part) in c.coords.iter().zip(&self.parts) {
                    if x >= p - 1 || t.element(x) != part {
                        return fail("part not in set");
                    }
                }
            }
            Construction::ErdosTuran => {
                for (&x, &part) in c.coords.iter().zip(&self.parts) {
                    if x >= p || erdos_turan_element(x, p) != part {
                        return fail("part not in set");
                    }
                }
                if let Some(l) = &c.lift {
                    if !l.verify() || l.n != self.target || l.modulus != self.modulus {
                        return fail("lift");
                    }
                    let s1: u64 = c.coords.iter().sum();
                    let s2: u64 = c.coords.iter().map(|&x| mul_mod(x, x, p)).sum();
                    if s1 != l.r1 || s2 != l.r2 {
                        return fail("integer identities");
                    }
                }
            }
        }
        let sum = self.parts.iter().fold(0u64, |acc, &x| (acc + x) % self.modulus);
        if sum != self.target % self.modulus {
            return fail("sum");
        }
        if c.distinct {
            let mut s = self.parts.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != self.parts.len() {
                return fail("distinctness");
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("decomposition serializes")
    }
}

fn ruzsa_decomposition(t: &DlogTable, target: u64, coords: Vec<u64>, distinct: bool) -> Decomposition {
    Decomposition {
        target,
        modulus: (t.p - 1) * t.p,
        parts: coords.iter().map(|&x| t.element(x)).collect(),
        construction: Construction::Ruzsa,
        p: t.p,
        mode: None,
        certificate: Certificate {
            coords,
            g: Some(t.g),
            lift: None,
            distinct,
        },
    }
}

/// `(a, b)` as a sum of three Ruzsa elements, lexicographically first in the logs.
pub fn decompose3_ruzsa_with(t: &DlogTable, a: u64, b: u64, require_distinct: bool) -> Result<Decomposition> {
    t.check_target(a, b)?;
    let target = crt_flatten(a, b, t.p)?;
    let xs = t
        .search3(a, b, require_distinct, false)
        .ok_or_else(|| Error::NoRepresentation(format!("({a}, {b}) mod p = {}", t.p)))?;
    Ok(ruzsa_decomposition(t, target, xs.to_vec(), require_distinct))
}

pub fn decompose3_ruzsa(p: u64, g: u64, a: u64, b: u64, require_distinct: bool) -> Result<Decomposition> {
    decompose3_ruzsa_with(&DlogTable::new(p, g)?, a, b, require_distinct)
}

/// Four pairwise-distinct Ruzsa elements: `(0, 1)` plus three more avoiding it,
/// falling back to a full search over triples plus a solved fourth summand.
pub fn decompose4_ruzsa_with(t: &DlogTable, a: u64, b: u64) -> Result<Decomposition> {
    t.check_target(a, b)?;
    let p = t.p;
    let q = p - 1;
    let target = crt_flatten(a, b, p)?;
    if let Some([x1, x2, x3]) = t.search3(a, (b + p - 1) % p, true, true) {
        return Ok(ruzsa_decomposition(t, target, vec![x1, x2, x3, 0], true));
    }
    for x1 in 0..q {
        for x2 in x1 + 1..q {
            for x3 in x2 + 1..q {
                let partial = (t.pow(x1) + t.pow(x2) + t.pow(x3)) % p;
                let Some(x4) = t.log((b + 3 * p - partial) % p) else { continue };
                if (x1 + x2 + x3 + x4) % q == a && x4 != x1 && x4 != x2 && x4 != x3 {
                    return Ok(ruzsa_decomposition(t, target, vec![x1, x2, x3, x4], true));
                }
            }
        }
    }
    Err(Error::NoRepresentation(format!("({a}, {b}) mod p = {p}, four terms")))
}

pub fn decompose4_ruzsa(p: u64, g: u64, a: u64, b: u64) -> Result<Decomposition> {
    decompose4_ruzsa_with(&DlogTable::new(p, g)?, a, b)
}

/// Splits a flattened residue of `Z_{(p-1)p}` into `(a, b)`.
pub fn ruzsa_target(t: u64, p: u64) -> Result<(u64, u64)> {
    if t >= (p - 1) * p {
        return Err(Error::Range(format!("{t} outside Z_{}", (p - 1) * p)));
    }
    Ok(crt_split(t, p))
}

/// Smallest integer lift `L >= K + 2pK` of `n`, split as `r1 + 2p·r2`.
pub fn lift_to_interval(n: u64, modulus: u64, p: u64) -> Result<LiftTarget> {
    if !is_prime(p) || p % 3 != 1 || p < 7 {
        return Err(Error::Range(format!("{p} is not a prime >= 7 with p = 1 mod 3")));
    }
    let pp = p * p;
    if !(4 * pp < modulus && modulus < 5 * pp) {
        return Err(Error::Range(format!("need 4p^2 < N < 5p^2, got p = {p}, N = {modulus}")));
    }
    if n >= modulus {
        return Err(Error::Range(format!("{n} outside Z_{modulus}")));
    }
    let k = p.div_ceil(4);
    let upper = (5 * p - 1) / 2 + k;
    let low = k + 2 * p * k;
    let l = low + (n + modulus - low % modulus) % modulus;
    let r2 = ((l - k) / (2 * p)).min(upper);
    let r1 = l - 2 * p * r2;
    let lt = LiftTarget {
        p,
        k,
        r1,
        r2,
        n,
        modulus,
    };
    if !lt.verify() {
        return Err(Error::Range(format!("{n} not covered by the lift interval")));
    }
    Ok(lt)
}

/// `4|3y - r| <= K`, i.e. `|y/p - r/(3p)| <= K/(12p)`.
fn in_box(y: u64, r: u64, k: u64) -> bool {
    4 * (3 * y).abs_diff(r) <= k
}

/// Sum of three Erdős–Turán elements congruent to `n (mod N)`.
pub fn decompose3_zn(n: u64, modulus: u64, mode: SearchMode) -> Result<Decomposition> {
    let p = find_basis_prime(modulus)?;
    let lift = lift_to_interval(n, modulus, p)?;
    let (r1, r2, k) = (lift.r1, lift.r2, lift.k);
    let sols = enumerate_quadric(&QuadricParams::new(p, r1, r2)?);
    for &(x1, x2) in &sols.points {
        let (q1, q2) = (mul_mod(x1, x1, p), mul_mod(x2, x2, p));
        if mode == SearchMode::Box && !(in_box(x1, r1, k) && in_box(x2, r1, k) && in_box(q1, r2, k) && in_box(q2, r2, k)) {
            continue;
        }
        let x3 = (2 * p + r1 % p - x1 - x2) % p;
        let q3 = mul_mod(x3, x3, p);
        if x1 + x2 + x3 != r1 || q1 + q2 + q3 != r2 {
            continue;
        }
        let coords = vec![x1, x2, x3];
        return Ok(Decomposition {
            target: n,
            modulus,
            parts: coords.iter().map(|&x| erdos_turan_element(x, p)).collect(),
            construction: Construction::ErdosTuran,
            p,
            mode: Some(mode),
            certificate: Certificate {
                coords,
                g: None,
                lift: Some(lift),
                distinct: false,
            },
        });
    }
    Err(Error::NoRepresentation(format!("n = {n} mod {modulus}: (r1, r2) = ({r1}, {r2})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ruzsa_three_example() {
        let d = decompose3_ruzsa(7, 3, 0, 0, true).unwrap();
        let mut logs = d.certificate.coords.clone();
        logs.sort_unstable();
        assert_eq!(logs, vec![0, 2, 4]);
        d.replay().unwrap();
        assert_eq!(d.target, 0);
    }

    #[test]
    fn ruzsa_four_small_prime_matches_subset_oracle() {
        // Z_42 has only 15 four-element subsets of the Ruzsa set, so most
        // targets, (0, 1) included, have no representation.
        let s = crate::sidon::ruzsa_set(7, 3).unwrap();
        let e = s.elements();
        let mut reachable = std::collections::BTreeSet::new();
        for i in 0..6 {
            for j in i + 1..6 {
                for k in j + 1..6 {
                    for l in k + 1..6 {
                        reachable.insert((e[i] + e[j] + e[k] + e[l]) % 42);
                    }
                }
            }
        }
        let t = DlogTable::new(7, 3).unwrap();
        for a in 0..6 {
            for b in 0..7 {
                let target = crt_flatten(a, b, 7).unwrap();
                match decompose4_ruzsa_with(&t, a, b) {
                    Ok(d) => {
                        d.replay().unwrap();
                        assert!(reachable.contains(&target));
                    }
                    Err(Error::NoRepresentation(_)) => assert!(!reachable.contains(&target)),
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(matches!(decompose4_ruzsa(7, 3, 0, 1), Err(Error::NoRepresentation(_))));
    }

    #[test]
    fn ruzsa_four_uses_fixed_summand_when_possible() {
        let d = decompose4_ruzsa(23, 5, 3, 7).unwrap();
        d.replay().unwrap();
        assert_eq!(d.parts.len(), 4);
        assert_eq!(*d.certificate.coords.last().unwrap(), 0);
    }

    #[test]
    fn lift_example() {
        let l = lift_to_interval(0, 700, 13).unwrap();
        assert_eq!((l.r1, l.r2, l.k), (24, 26, 4));
        assert!(l.verify());
        assert!(lift_to_interval(0, 1000, 13).is_err());
        assert!(lift_to_interval(0, 700, 11).is_err());
    }

    #[test]
    fn lift_is_total() {
        for modulus in [700u64, 750, 800] {
            for n in 0..modulus {
                assert!(lift_to_interval(n, modulus, 13).unwrap().verify());
            }
        }
    }

    #[test]
    fn box_success_implies_exhaustive_success() {
        for n in 0..700 {
            if let Ok(d) = decompose3_zn(n, 700, SearchMode::Box) {
                d.replay().unwrap();
                assert!(decompose3_zn(n, 700, SearchMode::Exhaustive).is_ok());
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let d = decompose3_ruzsa(7, 3, 0, 0, true).unwrap();
        let back: Decomposition = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["construction"], "ruzsa");
    }

    #[test]
    fn tampered_certificate_fails_replay() {
        let mut d = decompose3_ruzsa(7, 3, 0, 0, true).unwrap();
        d.parts[0] = (d.parts[0] + 1) % 42;
        assert!(d.replay().is_err());
    }
}
