use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ntt::cyclic_power_counts;
use super::Mode;
use crate::error::{Error, Result};

/// Whether representations are counted as ordered tuples or as multisets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Unordered,
    Ordered,
}

/// Restriction on summands. `Pairwise` forbids any two summands being equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistinctFlag {
    #[default]
    None,
    Pairwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    BruteForce,
    Convolution,
}

/// Exact representation counts `target -> count`; zero counts are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepProfile {
    pub arity: usize,
    pub mode: Mode,
    pub convention: Convention,
    pub distinct: DistinctFlag,
    counts: BTreeMap<u64, u64>,
}

impl RepProfile {
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn get(&self, target: u64) -> u64 {
        self.counts.get(&target).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }

    pub fn max_count(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }
}

/// Counts representations of every target as a sum of `h` elements of `elements`.
///
/// The convolution engine only handles cyclic mode with ordered tuples and no
/// distinctness restriction.
pub fn rep_profile(
    elements: &[u64],
    h: usize,
    mode: Mode,
    convention: Convention,
    distinct: DistinctFlag,
    engine: Engine,
) -> Result<RepProfile> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    if let Mode::Cyclic(0) = mode {
        return Err(Error::Range("modulus must be positive".into()));
    }
    let mut v: Vec<u64> = elements.iter().map(|&x| mode.reduce(x)).collect();
    v.sort_unstable();
    v.dedup();
    let counts = match engine {
        Engine::BruteForce => brute_force(&v, h, mode, convention, distinct)?,
        Engine::Convolution => {
            let n = match mode {
                Mode::Cyclic(n) if convention == Convention::Ordered && distinct == DistinctFlag::None => n,
                _ => {
                    return Err(Error::EngineUnavailable(
                        "convolution needs cyclic mode, ordered tuples and no distinctness".into(),
                    ))
                }
            };
            let h32 = u32::try_from(h).map_err(|_| Error::EngineUnavailable("arity too large".into()))?;
            let raw = cyclic_power_counts(&v, n, h32)?;
            let mut m = BTreeMap::new();
            for (t, c) in raw.into_iter().enumerate() {
                if c > 0 {
                    let c = u64::try_from(c).map_err(|_| Error::EngineUnavailable("count overflow".into()))?;
                    m.insert(t as u64, c);
                }
            }
            m
        }
    };
    Ok(RepProfile {
        arity: h,
        mode,
        convention,
        distinct,
        counts,
    })
}

// Dense accumulation up to this many targets.
const DENSE_TARGETS: u64 = 1 << 25;

fn brute_force(
    v: &[u64],
    h: usize,
    mode: Mode,
    convention: Convention,
    distinct: DistinctFlag,
) -> Result<BTreeMap<u64, u64>> {
    let k = v.len();
    if k == 0 {
        return Ok(BTreeMap::new());
    }
    let span = match mode {
        Mode::Cyclic(n) => n,
        Mode::Integer => v[k - 1]
            .checked_mul(h as u64)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(|| Error::Range("integer sums overflow".into()))?,
    };
    let walker = Walker {
        v,
        h,
        mode,
        convention,
        distinct,
    };
    let chunks: Vec<Vec<(u64, u64)>> = (0..k)
        .into_par_iter()
        .map(|first| {
            let mut acc = Acc::new(span);
            let mut used = vec![false; k];
            used[first] = true;
            walker.descend(1, first, mode.reduce(v[first]), &mut used, &mut acc);
            acc.into_pairs()
        })
        .collect();
    let mut out = BTreeMap::new();
    for chunk in chunks {
        for (t, c) in chunk {
            let e = out.entry(t).or_insert(0u64);
            *e = e.checked_add(c).ok_or_else(|| Error::Range("count overflow".into()))?;
        }
    }
    Ok(out)
}

struct Walker<'a> {
    v: &'a [u64],
    h: usize,
    mode: Mode,
    convention: Convention,
    distinct: DistinctFlag,
}

impl Walker<'_> {
    fn descend(&self, depth: usize, last: usize, sum: u64, used: &mut [bool], acc: &mut Acc) {
        if depth == self.h {
            acc.add(sum);
            return;
        }
        let start = match (self.convention, self.distinct) {
            (Convention::Unordered, DistinctFlag::None) => last,
            (Convention::Unordered, DistinctFlag::Pairwise) => last + 1,
            (Convention::Ordered, _) => 0,
        };
        for i in start..self.v.len() {
            let ordered_pairwise = self.convention == Convention::Ordered && self.distinct == DistinctFlag::Pairwise;
            if ordered_pairwise && used[i] {
                continue;
            }
            let s = match self.mode {
                Mode::Cyclic(n) => (sum + self.v[i]) % n,
                Mode::Integer => sum + self.v[i],
            };
            used[i] = true;
            self.descend(depth + 1, i, s, used, acc);
            used[i] = false;
        }
    }
}

enum Acc {
    Dense(Vec<u64>),
    Sparse(BTreeMap<u64, u64>),
}

impl Acc {
    fn new(span: u64) -> Self {
        if span <= DENSE_TARGETS {
            Acc::Dense(vec![0; span as usize])
        } else {
            Acc::Sparse(BTreeMap::new())
        }
    }

    #[inline]
    fn add(&mut self, t: u64) {
        match self {
            Acc::Dense(d) => d[t as usize] += 1,
            Acc::Sparse(m) => *m.entry(t).or_default() += 1,
        }
    }

    fn into_pairs(self) -> Vec<(u64, u64)> {
        match self {
            Acc::Dense(d) => d
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c > 0)
                .map(|(t, c)| (t as u64, c))
                .collect(),
            Acc::Sparse(m) => m.into_iter().collect(),
        }
    }
}
