//! Random generators of valid `l`-Oddtown families, used by property tests,
//! the acceptance suite and the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{verify_family, SetFamily, MAX_GROUND};

/// Disjoint blocks of random sizes not divisible by `l`, placed on a random
/// permutation of `[n]`. Some elements may stay uncovered.
pub fn disjoint_blocks<R: Rng + ?Sized>(n: usize, modulus: u64, rng: &mut R) -> SetFamily {
    let l = modulus as usize;
    let mut elements: Vec<usize> = (0..n).collect();
    elements.shuffle(rng);
    let mut sets = Vec::new();
    let mut rest = &elements[..];
    while !rest.is_empty() {
        let max = rest.len().min(2 * l + 1);
        let size = rng.random_range(1..=max);
        if size % l == 0 {
            if rng.random_bool(0.5) {
                rest = &rest[1..];
            }
            continue;
        }
        let (block, tail) = rest.split_at(size);
        sets.push(block.iter().fold(0u64, |m, &e| m | 1 << e));
        rest = tail;
    }
    SetFamily::new(n, sets).expect("disjoint nonempty blocks are distinct")
}

/// Random subsets kept whenever they are compatible with everything accepted
/// so far.
pub fn greedy_random<R: Rng + ?Sized>(n: usize, modulus: u64, attempts: usize, rng: &mut R) -> SetFamily {
    let mut sets: Vec<u64> = Vec::new();
    for _ in 0..attempts {
        let density = rng.random_range(0.05..0.6);
        let s = (0..n).filter(|_| rng.random_bool(density)).fold(0u64, |m, e| m | 1 << e);
        let ok = !(s.count_ones() as u64).is_multiple_of(modulus)
            && !sets.contains(&s)
            && sets.iter().all(|&t| ((s & t).count_ones() as u64).is_multiple_of(modulus));
        if ok {
            sets.push(s);
        }
    }
    SetFamily::new(n, sets).expect("accepted sets are distinct")
}

/// Appends `groups` batches of `l` fresh ground elements, each added to a
/// random subfamily. Sizes and intersections change by multiples of `l`, so
/// validity is preserved.
pub fn add_shared_groups<R: Rng + ?Sized>(base: &SetFamily, modulus: u64, groups: usize, rng: &mut R) -> SetFamily {
    let l = modulus as usize;
    let n = base.n() + groups * l;
    assert!(n <= MAX_GROUND, "ground set too large");
    let mut sets = base.sets().to_vec();
    for g in 0..groups {
        let group = (0..l).fold(0u64, |m, k| m | 1 << (base.n() + g * l + k));
        for s in sets.iter_mut() {
            if rng.random_bool(0.5) {
                *s |= group;
            }
        }
    }
    SetFamily::new(n, sets).expect("adding the same group to distinct sets keeps them distinct")
}

/// A valid `l`-Oddtown on exactly `n` elements built from one of the
/// generators above.
pub fn random_oddtown<R: Rng + ?Sized>(n: usize, modulus: u64, rng: &mut R) -> SetFamily {
    let l = modulus as usize;
    let groups = if n > l { rng.random_range(0..=(n - 1) / l) } else { 0 };
    let base_n = n - groups * l;
    let base = match rng.random_range(0..3) {
        0 => disjoint_blocks(base_n, modulus, rng),
        1 => greedy_random(base_n, modulus, 4 * base_n + 8, rng),
        _ => {
            let blocks = disjoint_blocks(base_n, modulus, rng);
            extend_greedily(&blocks, modulus, 2 * base_n, rng)
        }
    };
    let family = add_shared_groups(&base, modulus, groups, rng);
    debug_assert!(verify_family(&family, modulus).unwrap().is_valid());
    family
}

/// Tries random unions of existing sets' elements plus uncovered elements.
fn extend_greedily<R: Rng + ?Sized>(base: &SetFamily, modulus: u64, attempts: usize, rng: &mut R) -> SetFamily {
    let mut sets = base.sets().to_vec();
    let n = base.n();
    for _ in 0..attempts {
        let s = (0..n).filter(|_| rng.random_bool(0.3)).fold(0u64, |m, e| m | 1 << e);
        let ok = !(s.count_ones() as u64).is_multiple_of(modulus)
            && !sets.contains(&s)
            && sets.iter().all(|&t| ((s & t).count_ones() as u64).is_multiple_of(modulus));
        if ok {
            sets.push(s);
        }
    }
    SetFamily::new(n, sets).expect("accepted sets are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_produce_valid_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for l in [2u64, 3, 6, 12, 15] {
            for n in 1..=24 {
                for _ in 0..5 {
                    let f = random_oddtown(n, l, &mut rng);
                    assert_eq!(f.n(), n);
                    assert!(verify_family(&f, l).unwrap().is_valid(), "{f:?} mod {l}");
                }
            }
        }
    }

    #[test]
    fn shared_groups_create_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let base = crate::oddtown::singleton_family(4).unwrap();
        let overlapping = (0..20).any(|_| {
            let f = add_shared_groups(&base, 6, 2, &mut rng);
            f.sets().iter().enumerate().any(|(i, a)| f.sets()[i + 1..].iter().any(|b| a & b != 0))
        });
        assert!(overlapping);
    }
}
