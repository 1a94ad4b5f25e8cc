//! Sidon sets in `Z_N` and `Z`: the Erdős–Turán and Ruzsa constructions,
//! exact Sidon / `B_2[g]` / basis-of-order-h verification, and representation
//! profiles backed by a brute-force and an exact convolution engine.

mod ntt;
mod profile;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbertheory::{crt_flatten, is_generator, is_prime, pow_mod};

pub use ntt::cyclic_power_counts;
pub use profile::{rep_profile, Convention, DistinctFlag, Engine, RepProfile};

/// Ambient group for sums: residues mod `N`, or plain integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Cyclic(u64),
    Integer,
}

impl Mode {
    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        match *self {
            Mode::Cyclic(n) => x % n,
            Mode::Integer => x,
        }
    }
}

/// A finite subset of `Z_N`: sorted distinct residues plus the modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModSet {
    modulus: u64,
    elements: Vec<u64>,
}

#[derive(Deserialize)]
struct RawModSet {
    modulus: u64,
    elements: Vec<u64>,
}

impl<'de> Deserialize<'de> for ModSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawModSet::deserialize(d)?;
        ModSet::new(raw.modulus, raw.elements).map_err(serde::de::Error::custom)
    }
}

impl ModSet {
    /// Builds a set from residues; rejects duplicates and out-of-range values.
    pub fn new(modulus: u64, mut elements: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Range("modulus must be positive".into()));
        }
        elements.sort_unstable();
        for w in elements.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!("duplicate element {}", w[0])));
            }
        }
        if let Some(&last) = elements.last() {
            if last >= modulus {
                return Err(Error::Range(format!("element {last} not below modulus {modulus}")));
            }
        }
        Ok(ModSet { modulus, elements })
    }

    /// Reduces arbitrary integers mod `modulus`, dropping repeats.
    pub fn from_residues(modulus: u64, values: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Range("modulus must be positive".into()));
        }
        let mut v: Vec<u64> = values.into_iter().map(|x| x % modulus).collect();
        v.sort_unstable();
        v.dedup();
        Ok(ModSet { modulus, elements: v })
    }

    /// All of `Z_N`.
    pub fn full(modulus: u64) -> Result<Self> {
        ModSet::new(modulus, (0..modulus).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.modulus)).is_ok()
    }

    /// Membership table indexed by residue.
    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.modulus as usize];
        for &e in &self.elements {
            v[e as usize] = true;
        }
        v
    }

    /// Plain-text form: `mod N` then one element per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("mod {}\n", self.modulus);
        for e in &self.elements {
            let _ = writeln!(s, "{e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let modulus = head
            .strip_prefix("mod")
            .map(str::trim)
            .and_then(|m| m.parse::<u64>().ok())
            .ok_or_else(|| Error::Parse(format!("expected `mod N`, found {head:?}")))?;
        let elements = lines
            .map(|l| l.parse::<u64>().map_err(|_| Error::Parse(format!("bad element {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        ModSet::new(modulus, elements)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ModSet serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Parses either serialization, sniffing the first non-blank character.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            ModSet::from_json(text)
        } else {
            ModSet::from_text(text)
        }
    }

    pub fn is_sidon(&self) -> SidonWitness {
        is_sidon(&self.elements, Mode::Cyclic(self.modulus))
    }
}

/// `{x + (x^2 mod p)·2p : 0 <= x < p}`, an integer Sidon set inside `[0, 2p^2)`.
/// Returned as a set mod `2p^2`.
pub fn erdos_turan_set(p: u64) -> Result<ModSet> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let elements = (0..p).map(|x| erdos_turan_element(x, p)).collect();
    ModSet::new(2 * p * p, elements)
}

#[inline]
pub fn erdos_turan_element(x: u64, p: u64) -> u64 {
    x + (x * x % p) * 2 * p
}

/// Ruzsa's set `{(x, g^x) : 0 <= x <= p-2}` flattened into `Z_{(p-1)p}` by CRT.
pub fn ruzsa_set(p: u64, g: u64) -> Result<ModSet> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !is_generator(g, p) {
        return Err(Error::NotGenerator { p, g });
    }
    let elements = (0..p - 1)
        .map(|x| crt_flatten(x, pow_mod(g, x, p), p))
        .collect::<Result<Vec<_>>>()?;
    ModSet::new((p - 1) * p, elements)
}

/// Outcome of a Sidon test; a failing verdict carries a colliding quadruple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidonWitness {
    pub verdict: bool,
    /// `(a, a', a'', a''')` with `a + a' = a'' + a'''` and `{a, a'} != {a'', a'''}`.
    pub collision: Option<[u64; 4]>,
}

// Dense tables up to this many sum slots, hash map beyond.
const DENSE_LIMIT: u64 = 1 << 26;

enum SumTable {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

const EMPTY: u32 = u32::MAX;

impl SumTable {
    fn new(range: u64) -> Self {
        if range <= DENSE_LIMIT {
            SumTable::Dense(vec![EMPTY; range as usize])
        } else {
            SumTable::Sparse(HashMap::new())
        }
    }

    fn get(&self, s: u64) -> Option<u32> {
        match self {
            SumTable::Dense(v) => Some(v[s as usize]).filter(|&x| x != EMPTY),
            SumTable::Sparse(m) => m.get(&s).copied(),
        }
    }

    fn set(&mut self, s: u64, val: u32) {
        match self {
            SumTable::Dense(v) => v[s as usize] = val,
            SumTable::Sparse(m) => {
                m.insert(s, val);
            }
        }
    }
}

fn sorted_distinct(elements: &[u64], mode: Mode) -> Vec<u64> {
    let mut v: Vec<u64> = elements.iter().map(|&x| mode.reduce(x)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn sum_range(elements: &[u64], mode: Mode) -> u64 {
    match mode {
        Mode::Cyclic(n) => n,
        Mode::Integer => elements.last().map_or(1, |&m| 2 * m + 1),
    }
}

/// True iff all sums `a + a'` (`a <= a'`) are distinct in the ambient group.
pub fn is_sidon(elements: &[u64], mode: Mode) -> SidonWitness {
    let v = sorted_distinct(elements, mode);
    let k = v.len();
    let mut table = SumTable::new(sum_range(&v, mode));
    for i in 0..k {
        for j in i..k {
            let s = match mode {
                Mode::Cyclic(n) => (v[i] + v[j]) % n,
                Mode::Integer => v[i] + v[j],
            };
            let code = (i * k + j) as u32;
            match table.get(s) {
                Some(prev) => {
                    let (pi, pj) = (prev as usize / k, prev as usize % k);
                    return SidonWitness {
                        verdict: false,
                        collision: Some([v[pi], v[pj], v[i], v[j]]),
                    };
                }
                None => table.set(s, code),
            }
        }
    }
    SidonWitness {
        verdict: true,
        collision: None,
    }
}

/// Largest number of unordered pairs `{a, a'}` sharing one sum.
pub fn b2g_bound(elements: &[u64], mode: Mode) -> u64 {
    let v = sorted_distinct(elements, mode);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for i in 0..v.len() {
        for j in i..v.len() {
            let s = match mode {
                Mode::Cyclic(n) => (v[i] + v[j]) % n,
                Mode::Integer => v[i] + v[j],
            };
            *counts.entry(s).or_default() += 1;
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Coverage verdict of a basis check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisReport {
    pub is_basis: bool,
    pub uncovered: Vec<u64>,
}

/// Does every residue of `Z_N` arise as a sum of `h` elements of `set`?
///
/// `DistinctFlag::Pairwise` forbids repeated summands.
pub fn basis_order_check(set: &ModSet, h: usize, distinct: DistinctFlag) -> Result<BasisReport> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    let n = set.modulus();
    let covered: Vec<bool> = match distinct {
        DistinctFlag::None => {
            // iterated sumset on bitmaps
            let mut cur = set.indicator();
            for _ in 1..h {
                let mut next = vec![false; n as usize];
                for (s, _) in cur.iter().enumerate().filter(|(_, &b)| b) {
                    for &a in set.elements() {
                        next[((s as u64 + a) % n) as usize] = true;
                    }
                }
                cur = next;
            }
            cur
        }
        DistinctFlag::Pairwise => {
            let profile = rep_profile(
                set.elements(),
                h,
                Mode::Cyclic(n),
                Convention::Unordered,
                DistinctFlag::Pairwise,
                Engine::BruteForce,
            )?;
            let mut c = vec![false; n as usize];
            for (&t, &cnt) in profile.counts() {
                if cnt > 0 {
                    c[t as usize] = true;
                }
            }
            c
        }
    };
    let uncovered: Vec<u64> = (0..n).filter(|&r| !covered[r as usize]).collect();
    Ok(BasisReport {
        is_basis: uncovered.is_empty(),
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbertheory::primitive_root;

    fn set(n: u64, e: &[u64]) -> ModSet {
        ModSet::new(n, e.to_vec()).unwrap()
    }

    #[test]
    fn erdos_turan_examples() {
        assert_eq!(erdos_turan_set(3).unwrap().elements(), &[0, 7, 8]);
        assert_eq!(erdos_turan_set(5).unwrap().elements(), &[0, 11, 14, 42, 43]);
        assert_eq!(erdos_turan_set(2), Err(Error::NotOddPrime(2)));
        assert_eq!(erdos_turan_set(9), Err(Error::NotOddPrime(9)));
    }

    #[test]
    fn ruzsa_examples() {
        assert_eq!(ruzsa_set(5, 2).unwrap().elements(), &[3, 14, 16, 17]);
        assert_eq!(ruzsa_set(3, 2).unwrap().elements(), &[4, 5]);
        let r = ruzsa_set(7, 5).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!(r.modulus(), 42);
        assert_eq!(ruzsa_set(7, 2), Err(Error::NotGenerator { p: 7, g: 2 }));
    }

    #[test]
    fn sidon_examples() {
        assert!(is_sidon(&[0, 1, 3], Mode::Cyclic(7)).verdict);
        let w = is_sidon(&[1, 2, 3, 4], Mode::Integer);
        assert!(!w.verdict);
        let [a, b, c, d] = w.collision.unwrap();
        assert_eq!(a + b, c + d);
        assert_ne!((a.min(b), a.max(b)), (c.min(d), d.max(c)));
        assert!(is_sidon(&[], Mode::Integer).verdict);
        assert!(is_sidon(&[], Mode::Cyclic(5)).verdict);
    }

    #[test]
    fn sidon_detects_doubled_element() {
        // 1 + 3 = 2 + 2
        let w = is_sidon(&[1, 2, 3], Mode::Integer);
        assert_eq!(w.collision, Some([1, 3, 2, 2]));
    }

    #[test]
    fn b2g_examples() {
        assert_eq!(b2g_bound(&[1, 2, 3, 4], Mode::Integer), 2);
        assert_eq!(b2g_bound(&[], Mode::Integer), 0);
        assert_eq!(b2g_bound(&[0, 1, 3], Mode::Cyclic(7)), 1);
    }

    #[test]
    fn basis_examples() {
        let s = set(7, &[0, 1, 3]);
        let r2 = basis_order_check(&s, 2, DistinctFlag::None).unwrap();
        assert!(!r2.is_basis);
        assert_eq!(r2.uncovered, vec![5]);
        assert!(basis_order_check(&s, 3, DistinctFlag::None).unwrap().is_basis);
        assert!(basis_order_check(&ModSet::full(9).unwrap(), 1, DistinctFlag::None)
            .unwrap()
            .is_basis);
    }

    #[test]
    fn erdos_turan_sets_are_sidon_in_integers() {
        for p in (3..=211).filter(|&p| is_prime(p)) {
            let s = erdos_turan_set(p).unwrap();
            assert_eq!(s.len() as u64, p);
            assert!(s.elements().iter().all(|&x| x < 2 * p * p));
            assert!(is_sidon(s.elements(), Mode::Integer).verdict, "p = {p}");
        }
    }

    #[test]
    fn ruzsa_sets_are_sidon_mod_n() {
        for p in (3..=61).filter(|&p| is_prime(p)) {
            let g = primitive_root(p).unwrap();
            assert!(ruzsa_set(p, g).unwrap().is_sidon().verdict, "p = {p}");
        }
    }

    #[test]
    fn erdos_turan_embeds_into_large_cyclic_groups() {
        for p in [3u64, 5, 7, 11, 13, 31] {
            let s = erdos_turan_set(p).unwrap();
            for n in [4 * p * p + 1, 4 * p * p + 7, 5 * p * p] {
                assert!(is_sidon(s.elements(), Mode::Cyclic(n)).verdict);
            }
        }
    }

    #[test]
    fn no_small_sidon_basis_of_order_two() {
        for n in 4..=12u64 {
            for mask in 0u32..(1 << n) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let e: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let s = ModSet::new(n, e).unwrap();
                if s.is_sidon().verdict {
                    assert!(!basis_order_check(&s, 2, DistinctFlag::None).unwrap().is_basis);
                }
            }
        }
    }

    #[test]
    fn serialization_formats() {
        let s = set(7, &[0, 1, 3]);
        assert_eq!(s.to_json(), r#"{"modulus":7,"elements":[0,1,3]}"#);
        assert_eq!(s.to_text(), "mod 7\n0\n1\n3\n");
        assert_eq!(ModSet::parse(&s.to_json()).unwrap(), s);
        assert_eq!(ModSet::parse(&s.to_text()).unwrap(), s);
        assert!(ModSet::parse(r#"{"modulus":7,"elements":[0,9]}"#).is_err());
        assert!(ModSet::parse("7\n1\n").is_err());
    }

    #[test]
    fn modset_rejects_bad_input() {
        assert!(ModSet::new(5, vec![1, 1]).is_err());
        assert!(ModSet::new(5, vec![5]).is_err());
        assert!(ModSet::new(0, vec![]).is_err());
        assert_eq!(ModSet::from_residues(5, [6, 1, 11]).unwrap().elements(), &[1]);
    }
}
