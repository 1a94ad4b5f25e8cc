use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{enumerate_family, FamilyKind, FamilySpec};
use crate::error::{Error, Result};
use crate::random_model::IntSeq;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    /// Remove `a` whenever `a + a' = a'' + a'''` with `{a, a'} != {a'', a'''}`.
    Sidon,
    /// Remove `a1` whenever `a1 + a2 = a3 + a4 = a5 + a6` with three distinct pairs.
    B22,
}

impl LiftKind {
    /// Number of distinct pairs sharing a sum that triggers removal.
    fn pairs_needed(&self) -> usize {
        match self {
            LiftKind::Sidon => 2,
            LiftKind::B22 => 3,
        }
    }
}

/// Lifted sequence plus one witness per removed element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    pub kind: LiftKind,
    pub kept: IntSeq,
    /// `removed -> witness`: the element, its partner, then the other pairs.
    pub witnesses: BTreeMap<u64, Vec<u64>>,
    /// Passes performed; `1` unless iterated to a fixpoint.
    pub passes: usize,
}

impl LiftReport {
    /// Replays each witness against `original`: membership, equal sums and
    /// pairwise distinct pairs.
    pub fn verify(&self, original: &IntSeq) -> bool {
        let need = self.kind.pairs_needed();
        if self.passes != 1 {
            // later passes reference intermediate sequences
            return self.kept.elements().iter().all(|&x| original.contains(x));
        }
        self.witnesses.iter().all(|(&a, w)| {
            if w.len() != 2 * need || w[0] != a || !w.iter().all(|&x| original.contains(x)) {
                return false;
            }
            let pairs: Vec<(u64, u64)> = w.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
            let s = pairs[0].0 + pairs[0].1;
            let distinct = pairs.iter().collect::<BTreeSet<_>>().len() == need;
            distinct && pairs.iter().all(|p| p.0 + p.1 == s) && !self.kept.contains(a)
        })
    }
}

fn one_pass(a: &IntSeq, kind: LiftKind) -> (IntSeq, BTreeMap<u64, Vec<u64>>) {
    let v = a.elements();
    let mut sums: Vec<(u64, u64, u64)> = Vec::with_capacity(v.len() * (v.len() + 1) / 2);
    for (i, &x) in v.iter().enumerate() {
        for &y in &v[i..] {
            sums.push((x + y, x, y));
        }
    }
    sums.sort_unstable();
    let need = kind.pairs_needed();
    let mut witnesses: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for group in sums.chunk_by(|p, q| p.0 == q.0) {
        if group.len() < need {
            continue;
        }
        for (gi, &(_, x, y)) in group.iter().enumerate() {
            let others: Vec<u64> = group
                .iter()
                .enumerate()
                .filter(|&(gj, _)| gj != gi)
                .take(need - 1)
                .flat_map(|(_, &(_, u, w))| [u, w])
                .collect();
            for (e, partner) in [(x, y), (y, x)] {
                witnesses.entry(e).or_insert_with(|| {
                    let mut w = vec![e, partner];
                    w.extend(&others);
                    w
                });
            }
        }
    }
    let kept = a.filter(|x| !witnesses.contains_key(&x));
    (kept, witnesses)
}

fn lift(a: &IntSeq, kind: LiftKind, fixpoint: bool) -> LiftReport {
    let (mut kept, mut witnesses) = one_pass(a, kind);
    let mut passes = 1;
    if fixpoint {
        loop {
            let (next, w) = one_pass(&kept, kind);
            if w.is_empty() {
                break;
            }
            passes += 1;
            for (k, v) in w {
                witnesses.entry(k).or_insert(v);
            }
            kept = next;
        }
    }
    LiftReport {
        kind,
        kept,
        witnesses,
        passes,
    }
}

/// Single-pass Sidon lifting against the original sequence.
pub fn sidon_lift(a: &IntSeq) -> IntSeq {
    lift(a, LiftKind::Sidon, false).kept
}

pub fn sidon_lift_report(a: &IntSeq, fixpoint: bool) -> LiftReport {
    lift(a, LiftKind::Sidon, fixpoint)
}

/// Single-pass `B_2[2]` lifting against the original sequence.
pub fn b2_2_lift(a: &IntSeq) -> IntSeq {
    lift(a, LiftKind::B22, false).kept
}

pub fn b2_2_lift_report(a: &IntSeq, fixpoint: bool) -> LiftReport {
    lift(a, LiftKind::B22, fixpoint)
}

/// `B22` pairs `Q_n` with `T_n`; `Sidon` pairs `R_n` with `B_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum AuditMode {
    B22,
    Sidon { epsilon: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub n: u64,
    pub modulus: u64,
    /// `|Q_n(A)|` or `|R_n(A)|` (unordered sets).
    pub before: u64,
    /// Same family over the lifted sequence.
    pub after: u64,
    /// `|T_n(A)|` or `|B_n(A)|` (ordered tuples).
    pub obstruction: u64,
    pub holds: bool,
}

/// Checks `after >= before - obstruction` for one `n`.
pub fn destruction_audit(a: &IntSeq, n: u64, modulus: u64, mode: AuditMode) -> Result<AuditReport> {
    let lifted = match mode {
        AuditMode::B22 => b2_2_lift(a),
        AuditMode::Sidon { .. } => sidon_lift(a),
    };
    destruction_audit_with(a, &lifted, n, modulus, mode)
}

/// As [`destruction_audit`] with a precomputed lifted sequence.
pub fn destruction_audit_with(a: &IntSeq, lifted: &IntSeq, n: u64, modulus: u64, mode: AuditMode) -> Result<AuditReport> {
    if lifted.elements().iter().any(|&x| !a.contains(x)) {
        return Err(Error::InvalidParameter("lifted sequence is not a subsequence".into()));
    }
    let (fam, obs, eps) = match mode {
        AuditMode::B22 => (FamilyKind::Q, FamilyKind::T, None),
        AuditMode::Sidon { epsilon } => (FamilyKind::R, FamilyKind::B, Some(epsilon)),
    };
    let fspec = FamilySpec::new(fam, n, modulus, eps)?;
    let ospec = FamilySpec::new(obs, n, modulus, eps)?;
    let before = enumerate_family(a, &fspec)?.len() as u64;
    let after = enumerate_family(lifted, &fspec)?.len() as u64;
    let obstruction = enumerate_family(a, &ospec)?.len() as u64;
    Ok(AuditReport {
        mode,
        n,
        modulus,
        before,
        after,
        obstruction,
        holds: after + obstruction >= before,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sidon::{b2g_bound, is_sidon, Mode};

    fn seq(v: &[u64]) -> IntSeq {
        IntSeq::from_elements(v.to_vec()).unwrap()
    }

    #[test]
    fn sidon_lift_examples() {
        assert_eq!(sidon_lift(&seq(&[1, 2, 4])).elements(), &[1, 2, 4]);
        assert!(sidon_lift(&seq(&[1, 2, 3, 4])).is_empty());
        assert!(sidon_lift(&seq(&[])).is_empty());
    }

    #[test]
    fn b22_lift_examples() {
        assert!(b2_2_lift(&seq(&[1, 2, 3, 4, 5, 6])).is_empty());
        let sidon = seq(&[1, 2, 5, 11, 24]);
        assert!(is_sidon(sidon.elements(), Mode::Integer).verdict);
        assert_eq!(b2_2_lift(&sidon), sidon.filter(|_| true));
        assert!(b2_2_lift(&seq(&[])).is_empty());
    }

    #[test]
    fn witnesses_replay() {
        let a = seq(&[1, 2, 3, 5, 8, 13, 21, 22, 30, 31, 40]);
        for r in [sidon_lift_report(&a, false), b2_2_lift_report(&a, false)] {
            assert!(r.verify(&a));
            assert_eq!(r.kept.len() + r.witnesses.len(), a.len());
        }
    }

    #[test]
    fn lifted_outputs_have_the_target_property() {
        let a = seq(&(1..60).filter(|x| x % 3 != 1).collect::<Vec<_>>());
        let s = sidon_lift(&a);
        assert!(is_sidon(s.elements(), Mode::Integer).verdict);
        assert!(b2g_bound(b2_2_lift(&a).elements(), Mode::Integer) <= 2);
        let fx = sidon_lift_report(&a, true);
        assert!(is_sidon(fx.kept.elements(), Mode::Integer).verdict);
    }

    #[test]
    fn fixpoint_keeps_more_than_nothing_sometimes() {
        // 1 + 4 = 2 + 3 removes all four; 10 stays either way
        let a = seq(&[1, 2, 3, 4, 10]);
        let one = sidon_lift_report(&a, false);
        let fix = sidon_lift_report(&a, true);
        assert_eq!(one.kept.elements(), &[10]);
        assert_eq!(fix.kept.elements(), &[10]);
        assert_eq!(fix.passes, 1);
    }

    #[test]
    fn audit_examples() {
        let empty = destruction_audit(&seq(&[]), 30, 1, AuditMode::B22).unwrap();
        assert_eq!((empty.before, empty.after, empty.obstruction, empty.holds), (0, 0, 0, true));
        let sidon = seq(&[1, 2, 5, 11, 24, 37]);
        for n in 8..80 {
            let r = destruction_audit(&sidon, n, 1, AuditMode::B22).unwrap();
            assert_eq!(r.before, r.after);
            assert!(r.holds);
        }
    }
}
