//! Classical and vectorial sunflowers. Coordinate positions are 1-based.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::deletion::find_kdsv;

/// Erdős–Rado bound `h!(k-1)^h`; larger families must contain `k` petals.
pub fn classical_bound(h: u32, k: u64) -> u128 {
    let fact: u128 = (1..=h as u128).product();
    fact * (k.saturating_sub(1) as u128).pow(h)
}

/// `h!((h^2-h+1)k)^h`; larger families must contain a vectorial sunflower of `k` petals.
pub fn vectorial_bound(h: u32, k: u64) -> u128 {
    let fact: u128 = (1..=h as u128).product();
    let hh = (h * h - h + 1) as u128;
    fact * (hh * k as u128).pow(h)
}

/// `{h·x_i + i : i = 1..h}`, sorted; `(v - 1) mod h + 1` recovers the position.
pub fn set_h_embed(x: &[u64]) -> Vec<u64> {
    let h = x.len() as u64;
    let mut s: Vec<u64> = x.iter().zip(1..).map(|(&xi, i)| h * xi + i).collect();
    s.sort_unstable();
    s
}

fn position(v: u64, h: u64) -> usize {
    ((v - 1) % h + 1) as usize
}

/// Do `members` form a vectorial sunflower of type `i_set`?
pub fn is_vectorial_sunflower(members: &[Vec<u64>], i_set: &[usize]) -> bool {
    let Some(h) = members.first().map(Vec::len) else { return true };
    if members.iter().any(|m| m.len() != h) || i_set.iter().any(|&i| i == 0 || i > h) {
        return false;
    }
    let distinct: BTreeSet<&Vec<u64>> = members.iter().collect();
    if distinct.len() != members.len() {
        return false;
    }
    let in_i: Vec<bool> = (1..=h).map(|i| i_set.contains(&i)).collect();
    for &i in i_set {
        if members.iter().any(|m| m[i - 1] != members[0][i - 1]) {
            return false;
        }
    }
    let reduced: Vec<Vec<u64>> = members
        .iter()
        .map(|m| m.iter().zip(&in_i).filter(|(_, &skip)| !skip).map(|(&v, _)| v).collect())
        .collect();
    if reduced.iter().collect::<BTreeSet<_>>().len() != reduced.len() {
        return false;
    }
    let mut seen: BTreeMap<u64, usize> = BTreeMap::new();
    for (j, r) in reduced.iter().enumerate() {
        for &v in r {
            if let Some(&other) = seen.get(&v) {
                if other != j {
                    return false;
                }
            }
            seen.insert(v, j);
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalSunflower {
    pub core: Vec<u64>,
    /// Indices into the input family.
    pub petals: Vec<usize>,
}

/// Recursive Erdős–Rado search: a maximal disjoint subfamily, else branch on
/// the most frequent element of its union (ties to the smallest value).
pub fn find_classical_sunflower(sets: &[Vec<u64>], k: usize) -> Option<ClassicalSunflower> {
    if k == 0 {
        return Some(ClassicalSunflower {
            core: Vec::new(),
            petals: Vec::new(),
        });
    }
    let norm: Vec<BTreeSet<u64>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    let idx: Vec<usize> = (0..sets.len()).collect();
    classical_rec(&norm, idx, BTreeSet::new(), k)
}

fn classical_rec(sets: &[BTreeSet<u64>], idx: Vec<usize>, core: BTreeSet<u64>, k: usize) -> Option<ClassicalSunflower> {
    let mut chosen = Vec::new();
    let mut union: BTreeSet<u64> = BTreeSet::new();
    for &i in &idx {
        let residual = sets[i].difference(&core);
        let r: Vec<u64> = residual.copied().collect();
        if r.iter().all(|x| !union.contains(x)) {
            union.extend(r);
            chosen.push(i);
            if chosen.len() == k {
                return Some(ClassicalSunflower {
                    core: core.into_iter().collect(),
                    petals: chosen,
                });
            }
        }
    }
    let mut freq: BTreeMap<u64, usize> = BTreeMap::new();
    for &i in &idx {
        for x in sets[i].difference(&core) {
            if union.contains(x) {
                *freq.entry(*x).or_default() += 1;
            }
        }
    }
    // max count, smallest value on ties
    let (&u, &cnt) = freq.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))?;
    if cnt < k {
        return None;
    }
    let next: Vec<usize> = idx.into_iter().filter(|&i| sets[i].contains(&u)).collect();
    let mut core = core;
    core.insert(u);
    classical_rec(sets, next, core, k)
}

/// A vectorial sunflower: member indices, its type `I` and the shared values on `I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SunflowerCert {
    pub petal_indices: Vec<usize>,
    pub type_set: Vec<usize>,
    pub core_values: Vec<u64>,
    /// `constructive` or `exhaustive`.
    pub method: String,
}

impl SunflowerCert {
    pub fn verify(&self, members: &[Vec<u64>]) -> bool {
        if self.petal_indices.iter().any(|&i| i >= members.len()) {
            return false;
        }
        let petals: Vec<Vec<u64>> = self.petal_indices.iter().map(|&i| members[i].clone()).collect();
        let core_ok = petals.first().is_none_or(|p| {
            self.type_set.len() == self.core_values.len()
                && self.type_set.iter().zip(&self.core_values).all(|(&i, &v)| p.get(i.wrapping_sub(1)) == Some(&v))
        });
        core_ok && is_vectorial_sunflower(&petals, &self.type_set)
    }
}

fn make_cert(members: &[Vec<u64>], petals: Vec<usize>, type_set: Vec<usize>, method: &str) -> SunflowerCert {
    let core_values = match petals.first() {
        Some(&p) => type_set.iter().map(|&i| members[p][i - 1]).collect(),
        None => Vec::new(),
    };
    SunflowerCert {
        petal_indices: petals,
        type_set,
        core_values,
        method: method.to_string(),
    }
}

/// Constructive finder through the set embedding, with an exact search over
/// all types as fallback. Members must be distinct tuples of one arity.
pub fn find_vectorial_sunflower(members: &[Vec<u64>], k: usize) -> Option<SunflowerCert> {
    let h = members.first().map(Vec::len)?;
    if k == 0 {
        return Some(make_cert(members, Vec::new(), Vec::new(), "constructive"));
    }
    constructive(members, h, k)
        .or_else(|| exhaustive(members, h, k))
        .filter(|c| c.verify(members))
}

fn constructive(members: &[Vec<u64>], h: usize, k: usize) -> Option<SunflowerCert> {
    let hu = h as u64;
    let petals_needed = (h * h - h + 1) * (k - 1) + 1;
    let embedded: Vec<Vec<u64>> = members.iter().map(|m| set_h_embed(m)).collect();
    let sf = find_classical_sunflower(&embedded, petals_needed)?;
    let mut type_set: Vec<usize> = sf.core.iter().map(|&v| position(v, hu)).collect();
    type_set.sort_unstable();
    let free: Vec<usize> = (1..=h).filter(|i| !type_set.contains(i)).collect();
    let mut remaining = sf.petals.clone();
    remaining.sort_by(|&a, &b| members[a].cmp(&members[b]));
    let mut selected = Vec::new();
    while !remaining.is_empty() && selected.len() < k {
        let x = remaining.remove(0);
        selected.push(x);
        let xv = &members[x];
        remaining.retain(|&y| {
            let yv = &members[y];
            !free
                .iter()
                .any(|&i| free.iter().any(|&j| j != i && xv[i - 1] == yv[j - 1]))
        });
    }
    if selected.len() < k {
        return None;
    }
    Some(make_cert(members, selected, type_set, "constructive"))
}

fn exhaustive(members: &[Vec<u64>], h: usize, k: usize) -> Option<SunflowerCert> {
    if h >= usize::BITS as usize {
        return None;
    }
    let mut types: Vec<Vec<usize>> = (0u64..(1 << h))
        .map(|mask| (1..=h).filter(|i| mask >> (i - 1) & 1 == 1).collect())
        .collect();
    types.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    for t in types {
        if t.len() == h && k > 1 {
            continue;
        }
        let mut groups: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for (j, m) in members.iter().enumerate() {
            let key: Vec<u64> = t.iter().map(|&i| m[i - 1]).collect();
            groups.entry(key).or_default().push(j);
        }
        for idx in groups.values() {
            if idx.len() < k {
                continue;
            }
            let reduced: Vec<Vec<u64>> = idx
                .iter()
                .map(|&j| (1..=h).filter(|i| !t.contains(i)).map(|i| members[j][i - 1]).collect())
                .collect();
            if let Some(found) = find_kdsv(&reduced, k) {
                let petals: Vec<usize> = found
                    .iter()
                    .map(|r| idx[reduced.iter().position(|x| x == r).expect("member of group")])
                    .collect();
                return Some(make_cert(members, petals, t, "exhaustive"));
            }
        }
    }
    None
}
