//! Point counts on `U^2 = 4V^3 + (bV + λ)^2`, the triple-representation
//! identity in Ruzsa's group, the quadric `x1^2 + x2^2 + (x1 + x2 - r1)^2 = r2`
//! and dyadic coverage of its torus image.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbertheory::{is_generator, is_prime, is_quadratic_residue, mul_mod, pow_mod, sqrt_mod};
use crate::sidon::DistinctFlag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveParams {
    p: u64,
    b: u64,
    lambda: u64,
}

impl CurveParams {
    pub fn new(p: u64, b: u64, lambda: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if b >= p || lambda >= p {
            return Err(Error::Range(format!("b and lambda must lie in [0, {p})")));
        }
        if lambda == 0 {
            return Err(Error::InvalidParameter("lambda must be nonzero".into()));
        }
        Ok(CurveParams { p, b, lambda })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn b(&self) -> u64 {
        self.b
    }
    pub fn lambda(&self) -> u64 {
        self.lambda
    }
}

/// Number of `(U, V)` with `V != 0` on the curve.
pub fn curve_point_count(cp: &CurveParams) -> u64 {
    let p = cp.p;
    (1..p)
        .into_par_iter()
        .map(|v| {
            let v3 = mul_mod(mul_mod(v, v, p), v, p);
            let lin = (mul_mod(cp.b, v, p) + cp.lambda) % p;
            let rhs = (mul_mod(4, v3, p) + mul_mod(lin, lin, p)) % p;
            if rhs == 0 {
                1
            } else if is_quadratic_residue(rhs, p) {
                2
            } else {
                0
            }
        })
        .sum()
}

/// `curve_point_count - p`.
pub fn hasse_gap(cp: &CurveParams) -> i64 {
    curve_point_count(cp) as i64 - cp.p as i64
}

/// Allowed `|hasse_gap|`: `2⌈√p⌉ + 4`, a testing constant.
pub fn hasse_slack(p: u64) -> i64 {
    let mut s = (p as f64).sqrt() as u64;
    while s * s < p {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= p {
        s -= 1;
    }
    2 * s as i64 + 4
}

/// Validated inputs for counting over the Ruzsa group `Z_{p-1} x Z_p`.
#[derive(Clone, Debug)]
struct PowTable {
    p: u64,
    pow: Vec<u64>,
}

impl PowTable {
    fn new(p: u64, g: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !is_generator(g, p) {
            return Err(Error::NotGenerator { p, g });
        }
        let mut pow = Vec::with_capacity((p - 1) as usize);
        let mut cur = 1 % p;
        for _ in 0..p - 1 {
            pow.push(cur);
            cur = mul_mod(cur, g, p);
        }
        Ok(PowTable { p, pow })
    }

    fn check_target(&self, a: u64, b: u64) -> Result<()> {
        if a >= self.p - 1 || b >= self.p {
            return Err(Error::Range(format!("target ({a}, {b}) outside Z_{} x Z_{}", self.p - 1, self.p)));
        }
        Ok(())
    }

    /// Visits every ordered solution `(x1, x2, x3)` of the triple system.
    fn for_each_triple(&self, a: u64, b: u64, mut f: impl FnMut(u64, u64, u64)) {
        let q = self.p - 1;
        let p = self.p;
        for x1 in 0..q {
            let s1 = self.pow[x1 as usize];
            for x2 in 0..q {
                let x3 = (2 * q + a - x1 - x2) % q;
                let s = (s1 + self.pow[x2 as usize] + self.pow[x3 as usize]) % p;
                if s == b {
                    f(x1, x2, x3);
                }
            }
        }
    }
}

/// Ordered `(x1, x2, x3) ∈ [0, p-1)^3` with `Σx ≡ a (mod p-1)` and `Σg^x ≡ b (mod p)`.
pub fn triple_rep_count(p: u64, g: u64, a: u64, b: u64, distinct: DistinctFlag) -> Result<u64> {
    let t = PowTable::new(p, g)?;
    t.check_target(a, b)?;
    let mut n = 0;
    t.for_each_triple(a, b, |x1, x2, x3| {
        if distinct == DistinctFlag::None || (x1 != x2 && x1 != x3 && x2 != x3) {
            n += 1;
        }
    });
    Ok(n)
}

/// Ordered solutions of the triple system with some `x_i = x_j`, `i != j`.
pub fn repeated_coordinate_count(p: u64, g: u64, a: u64, b: u64) -> Result<u64> {
    let t = PowTable::new(p, g)?;
    t.check_target(a, b)?;
    let mut n = 0;
    t.for_each_triple(a, b, |x1, x2, x3| {
        if x1 == x2 || x1 == x3 || x2 == x3 {
            n += 1;
        }
    });
    Ok(n)
}

/// Four-term counts for the target `(a, b)` with `s4 = (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourTermCounts {
    /// Pairwise-distinct ordered triples for the shifted target `(a, b - 1)`.
    pub shifted_distinct: u64,
    /// Those whose coordinates avoid `0`, hence giving four distinct summands.
    pub valid: u64,
    /// `shifted_distinct - valid`: triples using `x_i = 0` for some `i`.
    pub special: u64,
}

pub fn four_term_counts(p: u64, g: u64, a: u64, b: u64) -> Result<FourTermCounts> {
    let t = PowTable::new(p, g)?;
    t.check_target(a, b)?;
    let shifted = (b + p - 1) % p;
    let (mut all, mut valid) = (0, 0);
    t.for_each_triple(a, shifted, |x1, x2, x3| {
        if x1 != x2 && x1 != x3 && x2 != x3 {
            all += 1;
            if x1 != 0 && x2 != 0 && x3 != 0 {
                valid += 1;
            }
        }
    });
    Ok(FourTermCounts {
        shifted_distinct: all,
        valid,
        special: all - valid,
    })
}

/// Parameters of the quadric `x1^2 + x2^2 + (x1 + x2 - r1)^2 ≡ r2 (mod p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricParams {
    p: u64,
    r1: u64,
    r2: u64,
}

impl QuadricParams {
    /// Requires `p ≡ 1 (mod 3)`.
    pub fn new(p: u64, r1: u64, r2: u64) -> Result<Self> {
        if p % 3 != 1 {
            return Err(Error::InvalidParameter(format!("{p} is not 1 mod 3")));
        }
        Self::any_prime(p, r1, r2)
    }

    /// Any odd prime; used for coverage sweeps outside the `1 mod 3` class.
    pub fn any_prime(p: u64, r1: u64, r2: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(QuadricParams { p, r1, r2 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn r1(&self) -> u64 {
        self.r1
    }
    pub fn r2(&self) -> u64 {
        self.r2
    }

    /// `6 r2 ≡ 2 r1^2 (mod p)`: the conic splits into two lines.
    pub fn is_reducible(&self) -> bool {
        let p = self.p;
        let r1 = self.r1 % p;
        mul_mod(6, self.r2 % p, p) == mul_mod(2, mul_mod(r1, r1, p), p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricSolutions {
    pub params: QuadricParams,
    pub reducible: bool,
    pub points: Vec<(u64, u64)>,
}

/// All `(x1, x2) ∈ [0, p)^2` on the quadric, sorted.
pub fn enumerate_quadric(qp: &QuadricParams) -> QuadricSolutions {
    let p = qp.p;
    let r1 = qp.r1 % p;
    let r2 = qp.r2 % p;
    let inv4 = pow_mod(4, p - 2, p);
    let mut points: Vec<(u64, u64)> = (0..p)
        .into_par_iter()
        .flat_map_iter(|x1| {
            // 2 x2^2 + 2c x2 + (c^2 + x1^2 - r2) = 0 with c = x1 - r1
            let c = (x1 + p - r1) % p;
            let c2 = mul_mod(c, c, p);
            let x12 = mul_mod(x1, x1, p);
            let disc = (mul_mod(8, r2, p) + 2 * p - mul_mod(4, c2, p) - mul_mod(8, x12, p)) % p;
            let mut out = Vec::new();
            if let Some(s) = sqrt_mod(disc, p) {
                let neg2c = (p - mul_mod(2, c, p)) % p;
                let r_a = mul_mod((neg2c + s) % p, inv4, p);
                let r_b = mul_mod((neg2c + p - s) % p, inv4, p);
                out.push((x1, r_a));
                if r_b != r_a {
                    out.push((x1, r_b));
                }
            }
            out
        })
        .collect();
    points.sort_unstable();
    QuadricSolutions {
        params: *qp,
        reducible: qp.is_reducible(),
        points,
    }
}

/// Points in `[0,1)^4` with a shared denominator; stores numerators only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCloud {
    pub denominator: u64,
    pub points: Vec<[u64; 4]>,
}

impl TorusCloud {
    pub fn new(denominator: u64, points: Vec<[u64; 4]>) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Range("denominator must be positive".into()));
        }
        if points.iter().flatten().any(|&c| c >= denominator) {
            return Err(Error::Range("coordinate outside [0, 1)".into()));
        }
        Ok(TorusCloud { denominator, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(x1/p, x2/p, (x1^2)_p/p, (x2^2)_p/p)` for each quadric solution.
pub fn torus_points(qp: &QuadricParams) -> TorusCloud {
    let p = qp.p;
    let sols = enumerate_quadric(qp);
    let points = sols
        .points
        .iter()
        .map(|&(x1, x2)| [x1, x2, mul_mod(x1, x1, p), mul_mod(x2, x2, p)])
        .collect();
    TorusCloud { denominator: p, points }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub empty_boxes: u64,
    pub total: u64,
}

impl Coverage {
    pub fn empty_fraction(&self) -> f64 {
        self.empty_boxes as f64 / self.total as f64
    }
}

/// Counts dyadic boxes of side `2^-k` in `[0,1)^4` holding no cloud point.
pub fn dyadic_box_coverage(cloud: &TorusCloud, k: u32) -> Result<Coverage> {
    if k == 0 || 4 * k > 32 {
        return Err(Error::Range(format!("level {k} outside [1, 8]")));
    }
    let side = 1u64 << k;
    let total = 1u64 << (4 * k);
    let mut hit = vec![false; total as usize];
    let d = cloud.denominator as u128;
    for pt in &cloud.points {
        let mut idx = 0u64;
        for &c in pt {
            let cell = ((c as u128 * side as u128) / d) as u64;
            idx = idx * side + cell;
        }
        hit[idx as usize] = true;
    }
    let filled = hit.iter().filter(|&&h| h).count() as u64;
    Ok(Coverage {
        empty_boxes: total - filled,
        total,
    })
}

#[derive(Serialize)]
struct CloudMeta {
    p: u64,
    r1: u64,
    r2: u64,
    reducible: bool,
    points: usize,
}

/// CSV with a `# {json}` metadata line and columns `c1..c4` written as `num/den`.
pub fn torus_csv(qp: &QuadricParams, cloud: &TorusCloud) -> String {
    let meta = CloudMeta {
        p: qp.p,
        r1: qp.r1,
        r2: qp.r2,
        reducible: qp.is_reducible(),
        points: cloud.len(),
    };
    let mut s = format!("# {}\nc1,c2,c3,c4\n", serde_json::to_string(&meta).expect("metadata serializes"));
    let d = cloud.denominator;
    for pt in &cloud.points {
        let _ = writeln!(s, "{}/{d},{}/{d},{}/{d},{}/{d}", pt[0], pt[1], pt[2], pt[3]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbertheory::primitive_root;

    #[test]
    fn point_count_examples() {
        let cp = CurveParams::new(7, 0, 1).unwrap();
        assert_eq!(curve_point_count(&cp), 6);
        assert_eq!(hasse_gap(&cp), -1);
        // p = 3: V = 1 gives 4 + 1 = 2 (non-residue), V = 2 gives 32 + 1 = 0.
        assert_eq!(curve_point_count(&CurveParams::new(3, 0, 1).unwrap()), 1);
        assert!(CurveParams::new(7, 0, 0).is_err());
        assert!(CurveParams::new(8, 0, 1).is_err());
    }

    #[test]
    fn triple_examples() {
        assert_eq!(triple_rep_count(7, 3, 0, 0, DistinctFlag::None).unwrap(), 6);
        assert_eq!(triple_rep_count(7, 3, 0, 0, DistinctFlag::Pairwise).unwrap(), 6);
        assert_eq!(repeated_coordinate_count(7, 3, 0, 0).unwrap(), 0);
        assert!(triple_rep_count(7, 2, 0, 0, DistinctFlag::None).is_err());
        assert!(triple_rep_count(7, 3, 6, 0, DistinctFlag::None).is_err());
    }

    #[test]
    fn repeated_count_small_case_matches_brute_force() {
        // p = 5, g = 2, a = 0, b = 3
        let pw = [1u64, 2, 4, 3];
        let mut n = 0;
        for x1 in 0..4 {
            for x2 in 0..4 {
                for x3 in 0..4 {
                    let ok = (x1 + x2 + x3) % 4 == 0 && (pw[x1] + pw[x2] + pw[x3]) % 5 == 3;
                    if ok && (x1 == x2 || x2 == x3 || x1 == x3) {
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(repeated_coordinate_count(5, 2, 0, 3).unwrap(), n);
    }

    #[test]
    fn quadric_examples() {
        let q = QuadricParams::new(7, 0, 1).unwrap();
        let s = enumerate_quadric(&q);
        assert!(s.points.contains(&(0, 2)) && s.points.contains(&(0, 5)));
        for &(a, b) in &s.points {
            assert!(s.points.contains(&(b, a)));
        }
        let cloud = torus_points(&q);
        assert_eq!(cloud.len(), s.points.len());
        let i = s.points.iter().position(|&x| x == (0, 2)).unwrap();
        assert_eq!(cloud.points[i], [0, 2, 0, 4]);
        assert_eq!(cloud.denominator, 7);
        assert!(QuadricParams::new(11, 0, 1).is_err());
        assert!(QuadricParams::any_prime(11, 0, 1).is_ok());
    }

    #[test]
    fn quadric_matches_brute_force() {
        for p in [7u64, 13, 19, 31, 37] {
            for r1 in 0..p {
                for r2 in [0, 1, 5, p - 1] {
                    let q = QuadricParams::new(p, r1, r2).unwrap();
                    let mut want = Vec::new();
                    for x1 in 0..p {
                        for x2 in 0..p {
                            let t = x1 + x2 + 2 * p - r1 % p;
                            if (x1 * x1 + x2 * x2 + t * t) % p == r2 % p {
                                want.push((x1, x2));
                            }
                        }
                    }
                    assert_eq!(enumerate_quadric(&q).points, want);
                }
            }
        }
    }

    #[test]
    fn quadric_size_p13() {
        let q = QuadricParams::new(13, 1, 5).unwrap();
        let s = enumerate_quadric(&q);
        let slack = hasse_slack(13) as usize;
        if s.reducible {
            assert!(s.points.len() <= 2 * 13);
        } else {
            assert!(s.points.len() + slack >= 13 && s.points.len() <= 13 + slack);
        }
    }

    #[test]
    fn coverage_examples() {
        let empty = TorusCloud::new(7, vec![]).unwrap();
        assert_eq!(dyadic_box_coverage(&empty, 1).unwrap(), Coverage { empty_boxes: 16, total: 16 });
        let mut centers = Vec::new();
        for m in 0..16u64 {
            centers.push([0, 1, 2, 3].map(|i| if m >> i & 1 == 1 { 3 } else { 1 }));
        }
        let full = TorusCloud::new(4, centers).unwrap();
        assert_eq!(dyadic_box_coverage(&full, 1).unwrap(), Coverage { empty_boxes: 0, total: 16 });
    }

    #[test]
    fn csv_has_header_and_rows() {
        let q = QuadricParams::new(7, 0, 1).unwrap();
        let cloud = torus_points(&q);
        let csv = torus_csv(&q, &cloud);
        let mut lines = csv.lines();
        let head: serde_json::Value = serde_json::from_str(lines.next().unwrap().trim_start_matches("# ")).unwrap();
        assert_eq!(head["p"], 7);
        assert_eq!(head["reducible"], false);
        assert_eq!(lines.next(), Some("c1,c2,c3,c4"));
        assert_eq!(lines.count(), cloud.len());
        assert!(csv.contains("0/7,2/7,0/7,4/7"));
    }

    #[test]
    fn four_term_special_small() {
        let g = primitive_root(13).unwrap();
        for a in 0..12 {
            for b in 0..13 {
                let c = four_term_counts(13, g, a, b).unwrap();
                assert!(c.special <= 6);
            }
        }
    }
}
