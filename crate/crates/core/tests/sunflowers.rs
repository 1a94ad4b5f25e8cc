use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sidon_core::sunflower::*;

/// Independent check: distinct members, equal on `type_set`, and value sets
/// off `type_set` pairwise disjoint.
fn independent_check(family: &[Vec<u64>], petals: &[usize], type_set: &[usize]) -> bool {
    let h = family[0].len();
    let ps: Vec<&Vec<u64>> = petals.iter().map(|&i| &family[i]).collect();
    if ps.iter().collect::<BTreeSet<_>>().len() != ps.len() {
        return false;
    }
    let off: Vec<usize> = (0..h).filter(|i| !type_set.contains(&(i + 1))).collect();
    for a in 0..ps.len() {
        for b in a + 1..ps.len() {
            if type_set.iter().any(|&i| ps[a][i - 1] != ps[b][i - 1]) {
                return false;
            }
            let va: BTreeSet<u64> = off.iter().map(|&i| ps[a][i]).collect();
            if off.iter().any(|&i| va.contains(&ps[b][i])) {
                return false;
            }
        }
    }
    true
}

/// Does some pair of members form a two-petal sunflower of some proper type?
fn has_pair_sunflower(family: &[Vec<u64>]) -> bool {
    let h = family.first().map_or(0, Vec::len);
    let types: Vec<Vec<usize>> =
        (0u32..(1 << h) - 1).map(|mask| (1..=h).filter(|i| mask >> (i - 1) & 1 == 1).collect()).collect();
    (0..family.len()).any(|a| {
        (a + 1..family.len()).any(|b| types.iter().any(|t| independent_check(family, &[a, b], t)))
    })
}

fn random_family(rng: &mut ChaCha8Rng, size: usize, h: usize, hi: u64) -> Vec<Vec<u64>> {
    let mut seen = BTreeSet::new();
    while seen.len() < size {
        seen.insert((0..h).map(|_| rng.gen_range(1..=hi)).collect::<Vec<u64>>());
    }
    let mut v: Vec<Vec<u64>> = seen.into_iter().collect();
    v.shuffle(rng);
    v
}

#[test]
fn tiny_exhaustive_oracle() {
    let all: Vec<Vec<u64>> = (1..=4).flat_map(|a| (1..=4).map(move |b| vec![a, b])).collect();
    let mut with = 0;
    let mut without = 0;
    for mask in 1u32..(1 << 16) {
        if mask.count_ones() > 12 {
            continue;
        }
        let fam: Vec<Vec<u64>> = (0..16).filter(|i| mask >> i & 1 == 1).map(|i| all[i].clone()).collect();
        let expected = has_pair_sunflower(&fam);
        let found = find_vectorial_sunflower(&fam, 2);
        assert_eq!(found.is_some(), expected, "family {fam:?}");
        if let Some(c) = found {
            assert!(c.verify(&fam));
            assert!(independent_check(&fam, &c.petal_indices, &c.type_set));
            with += 1;
        } else {
            without += 1;
        }
    }
    assert!(with > 0 && without > 0);
}

#[test]
fn families_above_the_bound_have_sunflowers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (h, k, hi, reps) in [(2usize, 2u64, 40u64, 40), (2, 3, 40, 10), (3, 2, 40, 2)] {
        let size = vectorial_bound(h as u32, k) as usize + 1;
        for _ in 0..reps {
            let fam = random_family(&mut rng, size, h, hi);
            let c = find_vectorial_sunflower(&fam, k as usize).expect("bound guarantees a sunflower");
            assert_eq!(c.petal_indices.len(), k as usize);
            assert!(independent_check(&fam, &c.petal_indices, &c.type_set));
            assert!(c.type_set.len() < h);
        }
    }
}

#[test]
fn classical_finder_above_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (h, k) in [(2u32, 3u64), (3, 3)] {
        let size = classical_bound(h, k) as usize + 1;
        for _ in 0..20 {
            let mut sets = BTreeSet::new();
            while sets.len() < size {
                let mut s: Vec<u64> = Vec::new();
                while s.len() < h as usize {
                    let x = rng.gen_range(1..=12);
                    if !s.contains(&x) {
                        s.push(x);
                    }
                }
                s.sort_unstable();
                sets.insert(s);
            }
            let sets: Vec<Vec<u64>> = sets.into_iter().collect();
            let sf = find_classical_sunflower(&sets, k as usize).expect("bound guarantees a sunflower");
            assert_eq!(sf.petals.len(), k as usize);
            let core: BTreeSet<u64> = sf.core.iter().copied().collect();
            for (i, &a) in sf.petals.iter().enumerate() {
                for &b in &sf.petals[i + 1..] {
                    let sa: BTreeSet<u64> = sets[a].iter().copied().collect();
                    let sb: BTreeSet<u64> = sets[b].iter().copied().collect();
                    assert_eq!(sa.intersection(&sb).copied().collect::<BTreeSet<_>>(), core);
                }
            }
        }
    }
}

#[test]
fn embedding_is_injective_on_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fam = random_family(&mut rng, 200, 3, 9);
    let images: BTreeSet<Vec<u64>> = fam.iter().map(|t| set_h_embed(t)).collect();
    assert_eq!(images.len(), fam.len());
    assert_eq!(vectorial_bound(2, 2), 72);
    assert_eq!(vectorial_bound(3, 2), 16464);
}
