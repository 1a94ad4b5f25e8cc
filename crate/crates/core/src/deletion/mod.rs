//! Representation families over a finite sequence, the two lifting processes
//! and the destruction audit.

mod family;
mod lift;

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use family::{enumerate_family, r_threshold};
pub use lift::{
    b2_2_lift, b2_2_lift_report, destruction_audit, destruction_audit_with, sidon_lift, sidon_lift_report, AuditMode,
    AuditReport, LiftKind, LiftReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    Q,
    R,
    T,
    B,
    U2,
    U3,
    V2,
    V3,
    W,
    #[serde(rename = "custom")]
    Custom,
}

impl FamilyKind {
    /// Tuple length of members.
    pub fn arity(&self) -> Option<usize> {
        use FamilyKind::*;
        match self {
            Q => Some(3),
            R => Some(4),
            T => Some(8),
            B => Some(7),
            U2 | V2 => Some(2),
            U3 | V3 => Some(3),
            W => Some(5),
            Custom => None,
        }
    }

    /// Q and R are families of sets; the rest are vectors.
    pub fn is_set_family(&self) -> bool {
        matches!(self, FamilyKind::Q | FamilyKind::R)
    }

    pub fn convention(&self) -> &'static str {
        if self.is_set_family() {
            "unordered"
        } else {
            "ordered"
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        use FamilyKind::*;
        Ok(match s.to_ascii_uppercase().as_str() {
            "Q" => Q,
            "R" => R,
            "T" => T,
            "B" => B,
            "U2" => U2,
            "U3" => U3,
            "V2" => V2,
            "V3" => V3,
            "W" => W,
            "CUSTOM" => Custom,
            _ => return Err(Error::UnsupportedKind(s.to_string())),
        })
    }
}

/// Which family to enumerate: `target` is `n` for Q/R/T/B and `r` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub target: u64,
    /// `1` switches the residue conditions off.
    pub modulus: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<Rational>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, target: u64, modulus: u64, epsilon: Option<Rational>) -> Result<Self> {
        let s = FamilySpec {
            kind,
            target,
            modulus,
            epsilon,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulus == 0 {
            return Err(Error::Range("modulus must be positive".into()));
        }
        let needs = matches!(self.kind, FamilyKind::R | FamilyKind::B);
        match (needs, self.epsilon) {
            (true, None) => Err(Error::InvalidParameter(format!("{:?} needs epsilon", self.kind))),
            (false, Some(_)) => Err(Error::InvalidParameter(format!("{:?} takes no epsilon", self.kind))),
            (true, Some(e)) if !(e.is_positive() && e.numer() < e.denom()) => {
                Err(Error::InvalidParameter(format!("epsilon = {e} not in (0, 1)")))
            }
            _ => Ok(()),
        }
    }
}

/// Distinct tuples of uniform arity, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorFamily {
    pub kind: FamilyKind,
    pub arity: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<u64>,
    members: Vec<Vec<u64>>,
}

impl VectorFamily {
    pub fn new(kind: FamilyKind, arity: usize, mut members: Vec<Vec<u64>>) -> Result<Self> {
        if let Some(a) = kind.arity() {
            if a != arity {
                return Err(Error::InvalidParameter(format!("{kind:?} has arity {a}, not {arity}")));
            }
        }
        if let Some(bad) = members.iter().find(|m| m.len() != arity) {
            return Err(Error::InvalidParameter(format!("tuple {bad:?} does not have arity {arity}")));
        }
        members.sort();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate tuple".into()));
        }
        Ok(VectorFamily {
            kind,
            arity,
            target: None,
            members,
        })
    }

    /// A custom family, arity taken from the first member.
    pub fn custom(members: Vec<Vec<u64>>) -> Result<Self> {
        let arity = members.first().map_or(0, Vec::len);
        VectorFamily::new(FamilyKind::Custom, arity, members)
    }

    pub fn members(&self) -> &[Vec<u64>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// One JSON object per line: `{"kind", "target", "tuple"}`.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for m in &self.members {
            let line = serde_json::json!({ "kind": self.kind, "target": self.target, "tuple": m });
            let _ = writeln!(s, "{line}");
        }
        s
    }
}

/// `k` members with pairwise disjoint coordinate sets, first in lexicographic
/// search order, or `None` when no such selection exists.
pub fn find_kdsv(members: &[Vec<u64>], k: usize) -> Option<Vec<Vec<u64>>> {
    if k == 0 {
        return Some(Vec::new());
    }
    let sets: Vec<Vec<u64>> = members
        .iter()
        .map(|m| {
            let mut s = m.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let mut chosen = Vec::with_capacity(k);
    let mut used: HashSet<u64> = HashSet::new();
    if kdsv_search(&sets, k, 0, &mut chosen, &mut used) {
        Some(chosen.iter().map(|&i| members[i].clone()).collect())
    } else {
        None
    }
}

fn kdsv_search(sets: &[Vec<u64>], k: usize, from: usize, chosen: &mut Vec<usize>, used: &mut HashSet<u64>) -> bool {
    if chosen.len() == k {
        return true;
    }
    if sets.len() - from < k - chosen.len() {
        return false;
    }
    for i in from..sets.len() {
        if sets[i].iter().any(|x| used.contains(x)) {
            continue;
        }
        chosen.push(i);
        used.extend(sets[i].iter().copied());
        if kdsv_search(sets, k, i + 1, chosen, used) {
            return true;
        }
        for x in &sets[i] {
            used.remove(x);
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kdsv_examples() {
        assert!(find_kdsv(&[vec![1, 2], vec![3, 4]], 2).is_some());
        assert!(find_kdsv(&[vec![1, 2], vec![2, 3]], 2).is_none());
        // greedy first choice blocks, backtracking recovers
        let f = vec![vec![1, 5], vec![1, 2], vec![5, 6]];
        assert_eq!(find_kdsv(&f, 2), Some(vec![vec![1, 2], vec![5, 6]]));
    }

    #[test]
    fn spec_validation() {
        let half = Some("1/2".parse().unwrap());
        assert!(FamilySpec::new(FamilyKind::R, 10, 7, None).is_err());
        assert!(FamilySpec::new(FamilyKind::Q, 10, 7, half).is_err());
        assert!(FamilySpec::new(FamilyKind::B, 10, 7, Some("3/2".parse().unwrap())).is_err());
        assert!(FamilySpec::new(FamilyKind::B, 10, 7, half).is_ok());
        assert!(FamilySpec::new(FamilyKind::Q, 10, 0, None).is_err());
    }

    #[test]
    fn family_validation_and_export() {
        assert!(VectorFamily::custom(vec![vec![1, 2], vec![1, 2]]).is_err());
        assert!(VectorFamily::custom(vec![vec![1, 2], vec![1]]).is_err());
        let f = VectorFamily::custom(vec![vec![3, 4], vec![1, 2]]).unwrap();
        assert_eq!(f.members()[0], vec![1, 2]);
        let text = f.to_json_lines();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["tuple"], serde_json::json!([3, 4]));
        assert_eq!(v["kind"], "custom");
        assert_eq!(FamilyKind::parse("u2").unwrap(), FamilyKind::U2);
        assert!(matches!(FamilyKind::parse("Z"), Err(Error::UnsupportedKind(_))));
    }
}
