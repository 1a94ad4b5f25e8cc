//! Exact first and second moments of the representation counts in the
//! random model, by nested summation over admissible integers.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::Accum;
use crate::deletion::r_threshold;
use crate::random_model::{inclusion_probability, SampleConfig};
use crate::rational::Rational;

/// Moments of `|Q_n(A)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QStats {
    pub n: u64,
    /// `μ = E|Q_n(A)|`.
    pub mean: f64,
    /// Janson `Δ`, summed over ordered pairs `ω ≠ ω'` sharing an element.
    pub delta: f64,
    pub variance: f64,
}

struct Table {
    prob: Vec<f64>,
    res: Vec<u64>,
    adm: Vec<u64>,
    modulus: u64,
}

impl Table {
    fn new(n: u64, cfg: &SampleConfig) -> Self {
        let prob: Vec<f64> = (0..=n).map(|x| inclusion_probability(x, cfg)).collect();
        let modulus = cfg.modulus();
        Table {
            res: (0..=n).map(|x| x % modulus).collect(),
            adm: (1..=n).filter(|&x| prob[x as usize] > 0.0).collect(),
            prob,
            modulus,
        }
    }

    #[inline]
    fn apart(&self, x: u64, y: u64) -> bool {
        x != y && (self.modulus == 1 || self.res[x as usize] != self.res[y as usize])
    }

    #[inline]
    fn q(&self, x: u64) -> f64 {
        self.prob[x as usize]
    }
}

/// Exact `μ`, `Δ` and variance of `|Q_n(A)|`.
pub fn q_stats(n: u64, cfg: &SampleConfig) -> QStats {
    let t = Table::new(n, cfg);
    // first moment and Σ P(ω)^2 over x1 < x2 < x3
    let parts: Vec<(f64, f64)> = t
        .adm
        .par_iter()
        .enumerate()
        .map(|(i, &x1)| {
            let mut s = Accum::default();
            let mut s2 = Accum::default();
            if 3 * x1 < n {
                for &x2 in &t.adm[i + 1..] {
                    if x1 + 2 * x2 >= n {
                        break;
                    }
                    let x3 = n - x1 - x2;
                    let p3 = t.q(x3);
                    if p3 > 0.0 && t.apart(x1, x2) && t.apart(x1, x3) && t.apart(x2, x3) {
                        let w = t.q(x1) * t.q(x2) * p3;
                        s.add(w);
                        s2.add(w * w);
                    }
                }
            }
            (s.value(), s2.value())
        })
        .collect();
    let mut mean = Accum::default();
    let mut sq = Accum::default();
    for (a, b) in parts {
        mean.add(a);
        sq.add(b);
    }
    // for each shared element x: Σ f(π) and Σ f(π)^2 over pairs π = {y < z}
    let shared: Vec<(f64, f64)> = t
        .adm
        .par_iter()
        .map(|&x| {
            let mut s1 = Accum::default();
            let mut s2 = Accum::default();
            if x < n {
                let rest = n - x;
                for &y in &t.adm {
                    if 2 * y >= rest {
                        break;
                    }
                    let z = rest - y;
                    let pz = t.q(z);
                    if pz > 0.0 && t.apart(x, y) && t.apart(x, z) && t.apart(y, z) {
                        let f = t.q(y) * pz;
                        s1.add(f);
                        s2.add(f * f);
                    }
                }
            }
            let (a, b) = (s1.value(), s2.value());
            let qx = t.q(x);
            let pairs = a * a - b;
            (qx * pairs, (qx - qx * qx) * pairs)
        })
        .collect();
    let mut delta = Accum::default();
    let mut cov = Accum::default();
    for (d, c) in shared {
        delta.add(d);
        cov.add(c);
    }
    let mu = mean.value();
    QStats {
        n,
        mean: mu,
        delta: delta.value(),
        variance: mu - sq.value() + cov.value(),
    }
}

pub fn exact_expectation_q(n: u64, cfg: &SampleConfig) -> f64 {
    q_stats(n, cfg).mean
}

pub fn exact_delta_q(n: u64, cfg: &SampleConfig) -> f64 {
    q_stats(n, cfg).delta
}

pub fn exact_variance_q(n: u64, cfg: &SampleConfig) -> f64 {
    q_stats(n, cfg).variance
}

/// `E|R_n(A)|` and `Δ(R_n)` by explicit enumeration of the members.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RStats {
    pub n: u64,
    pub threshold: u64,
    pub members: u64,
    pub mean: f64,
    pub delta: f64,
}

/// Meant for small `n`: all candidate 4-sets are held in memory.
pub fn r_stats(n: u64, cfg: &SampleConfig, epsilon: Rational) -> RStats {
    let t = Table::new(n, cfg);
    let thr = r_threshold(n, epsilon);
    let mut members: Vec<[u64; 4]> = Vec::new();
    for (i, &x1) in t.adm.iter().enumerate() {
        if x1 > thr || 4 * x1 >= n {
            break;
        }
        for (j, &x2) in t.adm.iter().enumerate().skip(i + 1) {
            if x1 + 3 * x2 >= n {
                break;
            }
            for &x3 in &t.adm[j + 1..] {
                if x1 + x2 + 2 * x3 >= n {
                    break;
                }
                let x4 = n - x1 - x2 - x3;
                let w = [x1, x2, x3, x4];
                let spread = (0..4).all(|a| (a + 1..4).all(|b| t.apart(w[a], w[b])));
                if t.q(x4) > 0.0 && spread {
                    members.push(w);
                }
            }
        }
    }
    let prob = |w: &[u64; 4]| w.iter().map(|&x| t.q(x)).product::<f64>();
    let mut mean = Accum::default();
    let mut by_elem: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, w) in members.iter().enumerate() {
        mean.add(prob(w));
        for &x in w {
            by_elem.entry(x).or_default().push(i);
        }
    }
    let mut delta = Accum::default();
    for (i, w) in members.iter().enumerate() {
        let mut near: Vec<usize> = w.iter().flat_map(|x| by_elem[x].iter().copied()).filter(|&j| j != i).collect();
        near.sort_unstable();
        near.dedup();
        for j in near {
            let shared: f64 = w.iter().filter(|x| members[j].contains(x)).map(|&x| t.q(x)).product();
            delta.add(prob(w) * prob(&members[j]) / shared);
        }
    }
    RStats {
        n,
        threshold: thr,
        members: members.len() as u64,
        mean: mean.value(),
        delta: delta.value(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sidon::{ruzsa_set, ModSet};

    fn cfg(residues: ModSet, m: u64) -> SampleConfig {
        SampleConfig::new("7/11".parse().unwrap(), m, residues, 1_000_000, 1).unwrap()
    }

    /// Direct enumeration over all triples and all pairs of triples.
    fn oracle(n: u64, c: &SampleConfig) -> (f64, f64, f64) {
        let nm = c.modulus();
        let ok = |a: u64, b: u64| a != b && (nm == 1 || a % nm != b % nm);
        let mut sets = Vec::new();
        for x1 in 1..n {
            for x2 in x1 + 1..n {
                if x1 + x2 >= n {
                    break;
                }
                let x3 = n - x1 - x2;
                if x3 > x2 && ok(x1, x2) && ok(x1, x3) && ok(x2, x3) {
                    let w = [x1, x2, x3];
                    let p: f64 = w.iter().map(|&x| inclusion_probability(x, c)).product();
                    if p > 0.0 {
                        sets.push((w, p));
                    }
                }
            }
        }
        let mean: f64 = sets.iter().map(|s| s.1).sum();
        let mut delta = 0.0;
        let mut var: f64 = sets.iter().map(|s| s.1 * (1.0 - s.1)).sum();
        for (i, (a, pa)) in sets.iter().enumerate() {
            for (j, (b, pb)) in sets.iter().enumerate() {
                let common: Vec<u64> = a.iter().copied().filter(|x| b.contains(x)).collect();
                if i == j || common.is_empty() {
                    continue;
                }
                let pc: f64 = common.iter().map(|&x| inclusion_probability(x, c)).product();
                let joint = pa * pb / pc;
                delta += joint;
                var += joint - pa * pb;
            }
        }
        (mean, delta, var)
    }

    #[test]
    fn matches_brute_force_oracle() {
        let configs = [
            cfg(ModSet::full(7).unwrap(), 2),
            cfg(ModSet::full(1).unwrap(), 0),
            cfg(ruzsa_set(5, 2).unwrap(), 1),
            cfg(ModSet::new(10, vec![1, 3, 4, 8]).unwrap(), 3),
        ];
        for c in &configs {
            for n in [10u64, 37, 60, 91] {
                let s = q_stats(n, c);
                let (m, d, v) = oracle(n, c);
                assert!((s.mean - m).abs() <= 1e-12 * m.max(1.0), "{n}");
                assert!((s.delta - d).abs() <= 1e-12 * d.max(1.0), "{n}");
                assert!((s.variance - v).abs() <= 1e-12 * v.max(1.0), "{n}");
            }
        }
    }

    #[test]
    fn empty_below_three_m() {
        let c = cfg(ModSet::full(7).unwrap(), 100);
        for n in [1u64, 50, 300, 303] {
            let s = q_stats(n, &c);
            assert_eq!((s.mean, s.delta), (0.0, 0.0));
        }
        assert!(q_stats(320, &c).mean > 0.0);
    }

    #[test]
    fn r_stats_against_family_enumeration() {
        // E(R_n) is a sum over the same sets that enumerate_family lists for A = admissible
        use crate::deletion::{enumerate_family, FamilyKind, FamilySpec};
        use crate::random_model::IntSeq;
        let c = cfg(ModSet::full(7).unwrap(), 0);
        let eps: Rational = "1/2".parse().unwrap();
        let n = 120;
        let full = IntSeq::new((1..=n).filter(|&x| c.is_admissible(x)).collect(), n).unwrap();
        let fam = enumerate_family(&full, &FamilySpec::new(FamilyKind::R, n, 7, Some(eps)).unwrap()).unwrap();
        let s = r_stats(n, &c, eps);
        assert_eq!(s.members, fam.len() as u64);
        let want: f64 = fam
            .members()
            .iter()
            .map(|w| w.iter().map(|&x| inclusion_probability(x, &c)).product::<f64>())
            .sum();
        assert!((s.mean - want).abs() < 1e-12);
        assert!(s.delta > 0.0);
    }
}
