use std::collections::HashSet;

use super::{FamilyKind, FamilySpec, VectorFamily};
use crate::error::{Error, Result};
use crate::random_model::IntSeq;
use crate::rational::{floor_rational_power, Rational};

struct Members<'a> {
    v: &'a [u64],
    set: HashSet<u64>,
    n: u64,
}

impl<'a> Members<'a> {
    fn new(a: &'a IntSeq, n: u64) -> Self {
        Members {
            v: a.elements(),
            set: a.elements().iter().copied().collect(),
            n,
        }
    }

    #[inline]
    fn has(&self, x: u64) -> bool {
        self.set.contains(&x)
    }

    #[inline]
    fn same(&self, a: u64, b: u64) -> bool {
        a % self.n == b % self.n
    }

    /// Pairwise incongruent (for `N = 1`: pairwise distinct).
    fn spread(&self, xs: &[u64]) -> bool {
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                if xs[i] == xs[j] || (self.n > 1 && self.same(xs[i], xs[j])) {
                    return false;
                }
            }
        }
        true
    }

    /// Ordered `(a, b)` in `A^2` with `a + b = s`, `a ≡ ra`, `b ≡ rb (mod N)`.
    fn pairs_with(&self, s: u64, ra: u64, rb: u64) -> Vec<(u64, u64)> {
        self.v
            .iter()
            .take_while(|&&a| a < s)
            .filter(|&&a| self.same(a, ra) && self.has(s - a) && self.same(s - a, rb))
            .map(|&a| (a, s - a))
            .collect()
    }

    fn q_sets(&self, n: u64) -> Vec<[u64; 3]> {
        let mut out = Vec::new();
        for (i, &x1) in self.v.iter().enumerate() {
            if 3 * x1 >= n {
                break;
            }
            for &x2 in &self.v[i + 1..] {
                if x1 + 2 * x2 >= n {
                    break;
                }
                let x3 = n - x1 - x2;
                if self.has(x3) && self.spread(&[x1, x2, x3]) {
                    out.push([x1, x2, x3]);
                }
            }
        }
        out
    }

    fn r_sets(&self, n: u64, thr: u64) -> Vec<[u64; 4]> {
        let mut out = Vec::new();
        for (i, &x1) in self.v.iter().enumerate() {
            if x1 > thr || 4 * x1 >= n {
                break;
            }
            for (j, &x2) in self.v.iter().enumerate().skip(i + 1) {
                if x1 + 3 * x2 >= n {
                    break;
                }
                for &x3 in &self.v[j + 1..] {
                    if x1 + x2 + 2 * x3 >= n {
                        break;
                    }
                    let x4 = n - x1 - x2 - x3;
                    if self.has(x4) && self.spread(&[x1, x2, x3, x4]) {
                        out.push([x1, x2, x3, x4]);
                    }
                }
            }
        }
        out
    }
}

fn unordered(a: u64, b: u64) -> (u64, u64) {
    (a.min(b), a.max(b))
}

/// `floor(n^ε)`, exact.
pub fn r_threshold(n: u64, eps: Rational) -> u64 {
    floor_rational_power(n, eps)
}

fn permutations<const K: usize>(xs: [u64; K]) -> Vec<[u64; K]> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..K).collect();
    loop {
        out.push(std::array::from_fn(|i| xs[idx[i]]));
        // next lexicographic permutation of indices
        let Some(i) = (0..K.saturating_sub(1)).rev().find(|&i| idx[i] < idx[i + 1]) else { break };
        let j = (i + 1..K).rev().find(|&j| idx[j] > idx[i]).expect("successor exists");
        idx.swap(i, j);
        idx[i + 1..].reverse();
    }
    out
}

/// All members of the requested family with every coordinate in `a`.
pub fn enumerate_family(a: &IntSeq, spec: &FamilySpec) -> Result<VectorFamily> {
    spec.validate()?;
    let kind = spec.kind;
    let arity = kind.arity().ok_or_else(|| Error::UnsupportedKind("custom families are not enumerated".into()))?;
    let m = Members::new(a, spec.modulus);
    let t = spec.target;
    let mut out: Vec<Vec<u64>> = Vec::new();
    match kind {
        FamilyKind::Q => out.extend(m.q_sets(t).into_iter().map(|s| s.to_vec())),
        FamilyKind::R => {
            let thr = r_threshold(t, spec.epsilon.expect("validated"));
            out.extend(m.r_sets(t, thr).into_iter().map(|s| s.to_vec()));
        }
        FamilyKind::T => {
            for set in m.q_sets(t) {
                for [x1, x2, x3] in permutations(set) {
                    for &x4 in m.v {
                        let s = x1 + x4;
                        let base = unordered(x1, x4);
                        let pairs = m.pairs_with(s, x1, x4);
                        for &(x5, x6) in &pairs {
                            let p56 = unordered(x5, x6);
                            if p56 == base {
                                continue;
                            }
                            for &(x7, x8) in &pairs {
                                let p78 = unordered(x7, x8);
                                if p78 != base && p78 != p56 {
                                    out.push(vec![x1, x2, x3, x4, x5, x6, x7, x8]);
                                }
                            }
                        }
                    }
                }
            }
        }
        FamilyKind::B => {
            let thr = r_threshold(t, spec.epsilon.expect("validated"));
            for set in m.r_sets(t, thr) {
                for [x1, x2, x3, x4] in permutations(set) {
                    for &x5 in m.v {
                        let base = unordered(x1, x5);
                        for (x6, x7) in m.pairs_with(x1 + x5, x1, x5) {
                            if unordered(x6, x7) != base {
                                out.push(vec![x1, x2, x3, x4, x5, x6, x7]);
                            }
                        }
                    }
                }
            }
        }
        FamilyKind::U2 => {
            for &x1 in m.v.iter().take_while(|&&x| x < t) {
                let x2 = t - x1;
                if x1 != x2 && m.has(x2) {
                    out.push(vec![x1, x2]);
                }
            }
        }
        FamilyKind::V2 => {
            for &x1 in m.v.iter().filter(|&&x| x > t) {
                let x2 = x1 - t;
                if x1 != x2 && m.has(x2) {
                    out.push(vec![x1, x2]);
                }
            }
        }
        FamilyKind::U3 => {
            for &x1 in m.v.iter().take_while(|&&x| x < t) {
                for &x2 in m.v.iter().take_while(|&&x| x1 + x < t) {
                    let x3 = t - x1 - x2;
                    if x1 != x2 && x1 != x3 && x2 != x3 && m.has(x3) {
                        out.push(vec![x1, x2, x3]);
                    }
                }
            }
        }
        FamilyKind::V3 => {
            for &x1 in m.v {
                for &x2 in m.v {
                    if x1 + x2 <= t {
                        continue;
                    }
                    let x3 = x1 + x2 - t;
                    if x1 != x2 && x1 != x3 && x2 != x3 && m.has(x3) {
                        out.push(vec![x1, x2, x3]);
                    }
                }
            }
        }
        FamilyKind::W => {
            for &x4 in m.v {
                let s = t + x4;
                let pairs: Vec<(u64, u64)> = m
                    .v
                    .iter()
                    .take_while(|&&x| x < s)
                    .filter(|&&x| m.has(s - x))
                    .map(|&x| (x, s - x))
                    .collect();
                for &(x5, x6) in &pairs {
                    for &(x7, x8) in &pairs {
                        let xs = [x4, x5, x6, x7, x8];
                        let distinct = (0..5).all(|i| (i + 1..5).all(|j| xs[i] != xs[j]));
                        if distinct {
                            out.push(xs.to_vec());
                        }
                    }
                }
            }
        }
        FamilyKind::Custom => unreachable!("custom has no arity"),
    }
    let mut fam = VectorFamily::new(kind, arity, out)?;
    fam.target = Some(t);
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> IntSeq {
        IntSeq::from_elements(v.to_vec()).unwrap()
    }

    fn spec(kind: FamilyKind, t: u64, n: u64) -> FamilySpec {
        let eps = matches!(kind, FamilyKind::R | FamilyKind::B).then(|| "1/2".parse().unwrap());
        FamilySpec::new(kind, t, n, eps).unwrap()
    }

    #[test]
    fn u2_example() {
        let f = enumerate_family(&seq(&[1, 2, 4]), &spec(FamilyKind::U2, 6, 1)).unwrap();
        assert_eq!(f.members(), &[vec![2, 4], vec![4, 2]]);
    }

    #[test]
    fn empty_sequence_gives_empty_families() {
        let a = seq(&[]);
        for kind in [
            FamilyKind::Q,
            FamilyKind::R,
            FamilyKind::T,
            FamilyKind::B,
            FamilyKind::U2,
            FamilyKind::U3,
            FamilyKind::V2,
            FamilyKind::V3,
            FamilyKind::W,
        ] {
            assert!(enumerate_family(&a, &spec(kind, 10, 3)).unwrap().is_empty());
        }
    }

    #[test]
    fn custom_kind_is_unsupported() {
        let s = FamilySpec::new(FamilyKind::Custom, 3, 1, None).unwrap();
        assert!(matches!(enumerate_family(&seq(&[1]), &s), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn t_example_contains_witness() {
        let a = seq(&[1, 2, 3, 4, 5, 6]);
        let f = enumerate_family(&a, &spec(FamilyKind::T, 6, 1)).unwrap();
        assert!(f.members().contains(&vec![1, 2, 3, 6, 2, 5, 3, 4]));
    }

    fn brute_t(a: &[u64], n: u64, modn: u64) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let same = |x: u64, y: u64| x % modn == y % modn;
        let un = |x: u64, y: u64| (x.min(y), x.max(y));
        for &x1 in a {
            for &x2 in a {
                for &x3 in a {
                    if x1 + x2 + x3 != n || x1 == x2 || x1 == x3 || x2 == x3 {
                        continue;
                    }
                    if modn > 1 && (same(x1, x2) || same(x1, x3) || same(x2, x3)) {
                        continue;
                    }
                    for &x4 in a {
                        for &x5 in a {
                            for &x6 in a {
                                for &x7 in a {
                                    for &x8 in a {
                                        let eq = x1 + x4 == x5 + x6 && x5 + x6 == x7 + x8;
                                        let (p, q, r) = (un(x1, x4), un(x5, x6), un(x7, x8));
                                        let neq = p != q && q != r && p != r;
                                        let cong = same(x1, x5) && same(x5, x7) && same(x4, x6) && same(x6, x8);
                                        if eq && neq && cong {
                                            out.push(vec![x1, x2, x3, x4, x5, x6, x7, x8]);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn t_matches_brute_force() {
        let a = [1u64, 2, 3, 4, 5, 6, 8];
        for (n, modn) in [(6u64, 1u64), (9, 1), (12, 1), (12, 2), (15, 3)] {
            let f = enumerate_family(&seq(&a), &spec(FamilyKind::T, n, modn)).unwrap();
            assert_eq!(f.members(), &brute_t(&a, n, modn)[..], "n = {n}, N = {modn}");
        }
    }

    #[test]
    fn b_matches_brute_force() {
        let a = [1u64, 2, 3, 4, 5, 7, 9];
        let n = 20;
        let thr = r_threshold(n, "1/2".parse().unwrap());
        let same = |x: u64, y: u64| x % 2 == y % 2;
        let mut want = Vec::new();
        for &x1 in &a {
            for &x2 in &a {
                for &x3 in &a {
                    for &x4 in &a {
                        let xs = [x1, x2, x3, x4];
                        let spread = (0..4).all(|i| (i + 1..4).all(|j| !same(xs[i], xs[j])));
                        if x1 + x2 + x3 + x4 != n || !spread || *xs.iter().min().unwrap() > thr {
                            continue;
                        }
                        for &x5 in &a {
                            for &x6 in &a {
                                for &x7 in &a {
                                    let ok = x1 + x5 == x6 + x7
                                        && (x1.min(x5), x1.max(x5)) != (x6.min(x7), x6.max(x7))
                                        && same(x1, x6)
                                        && same(x5, x7);
                                    if ok {
                                        want.push(vec![x1, x2, x3, x4, x5, x6, x7]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        want.sort();
        let f = enumerate_family(&seq(&a), &spec(FamilyKind::B, n, 2)).unwrap();
        assert_eq!(f.members(), &want[..]);
    }

    #[test]
    fn q_r_and_small_families_match_brute_force() {
        let a = [1u64, 2, 3, 5, 6, 8, 11, 13];
        let s = seq(&a);
        for n in 10..40 {
            let q = enumerate_family(&s, &spec(FamilyKind::Q, n, 3)).unwrap();
            let mut want = Vec::new();
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in a.iter().enumerate().skip(i + 1) {
                    for &z in &a[j + 1..] {
                        if x + y + z == n && x % 3 != y % 3 && x % 3 != z % 3 && y % 3 != z % 3 {
                            want.push(vec![x, y, z]);
                        }
                    }
                }
            }
            assert_eq!(q.members(), &want[..]);

            let v3 = enumerate_family(&s, &spec(FamilyKind::V3, n % 7 + 1, 1)).unwrap();
            let r = n % 7 + 1;
            let mut want = Vec::new();
            for &x in &a {
                for &y in &a {
                    for &z in &a {
                        if x + y == z + r && x != y && y != z && x != z {
                            want.push(vec![x, y, z]);
                        }
                    }
                }
            }
            want.sort();
            assert_eq!(v3.members(), &want[..]);

            let w = enumerate_family(&s, &spec(FamilyKind::W, r, 1)).unwrap();
            for m in w.members() {
                assert_eq!(m[1] + m[2], m[3] + m[4]);
                assert_eq!(m[1] + m[2], m[0] + r);
            }
        }
    }

    #[test]
    fn r_threshold_is_inclusive() {
        // n = 100, ε = 1/2: threshold 10, so min = 10 is allowed
        let a = seq(&[10, 20, 31, 39, 11]);
        let f = enumerate_family(&a, &spec(FamilyKind::R, 100, 1)).unwrap();
        assert_eq!(f.members(), &[vec![10, 20, 31, 39]]);
        let f = enumerate_family(&seq(&[11, 20, 30, 39]), &spec(FamilyKind::R, 100, 1)).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn permutations_are_complete() {
        let p = permutations([1u64, 2, 3, 4]);
        assert_eq!(p.len(), 24);
        let mut q = p.clone();
        q.sort();
        q.dedup();
        assert_eq!(q.len(), 24);
    }
}
