//! Set families modulo `l`: verification, the per-prime split, incidence
//! matrices, good/bad prime classification, support reduction and
//! certificates.

mod certificate;
mod family;
pub mod generate;

pub use certificate::{certify, BadPairData, Certificate, DiCase, OverallBounds, PrimeRecord};
pub use family::{ground_mask, mask_elements, FamilyJson, SetFamily, MAX_GROUND};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modlinalg::ModMatrix;
use crate::numtheory::{factorize, Factorization, PrimePower};

/// Outcome of checking the two Oddtown conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid { reason: InvalidReason },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvalidReason {
    /// `|A|` is divisible by `l`.
    SizeDivisible { set: Vec<usize>, size: usize },
    /// `|A & B|` is not divisible by `l`.
    IntersectionNotDivisible { first: Vec<usize>, second: Vec<usize>, size: usize },
}

impl std::fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvalidReason::SizeDivisible { set, size } => write!(f, "set {set:?} has size {size}, divisible by the modulus"),
            InvalidReason::IntersectionNotDivisible { first, second, size } => {
                write!(f, "sets {first:?} and {second:?} meet in {size} elements, not divisible by the modulus")
            }
        }
    }
}

fn check_modulus(modulus: u64) -> Result<()> {
    if modulus < 2 {
        Err(Error::InvalidModulus(modulus))
    } else {
        Ok(())
    }
}

/// Checks that every set size is nonzero mod `l` and every pairwise
/// intersection size is zero mod `l`. Reports the first offending set or pair
/// in canonical order.
pub fn verify_family(family: &SetFamily, modulus: u64) -> Result<Verdict> {
    check_modulus(modulus)?;
    let sets = family.sets();
    for &a in sets {
        let size = a.count_ones() as u64;
        if size.is_multiple_of(modulus) {
            let reason = InvalidReason::SizeDivisible { set: mask_elements(a), size: size as usize };
            return Ok(Verdict::Invalid { reason });
        }
    }
    for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            let size = (a & b).count_ones() as u64;
            if !size.is_multiple_of(modulus) {
                let reason = InvalidReason::IntersectionNotDivisible {
                    first: mask_elements(a),
                    second: mask_elements(b),
                    size: size as usize,
                };
                return Ok(Verdict::Invalid { reason });
            }
        }
    }
    Ok(Verdict::Valid)
}

/// Splits a family by whether `|A|` is divisible by `p^a`: the first part
/// holds the sets whose size is not divisible.
pub fn split_by(family: &SetFamily, factor: &PrimePower) -> (SetFamily, SetFamily) {
    let q = factor.value();
    let not_divisible = family.filter(|s| !(s.count_ones() as u64).is_multiple_of(q));
    let divisible = family.filter(|s| (s.count_ones() as u64).is_multiple_of(q));
    (not_divisible, divisible)
}

/// [`split_by`] for the `index`-th prime factor (0-based, increasing primes).
pub fn split(family: &SetFamily, modulus: u64, index: usize) -> Result<(SetFamily, SetFamily)> {
    let f = factorize(modulus)?;
    let factor = f.factors.get(index).ok_or(Error::BadPrimeIndex { index, omega: f.omega() })?;
    Ok(split_by(family, factor))
}

/// `|F| x n` 0–1 matrix whose rows are the characteristic vectors.
pub fn incidence_matrix(family: &SetFamily) -> ModMatrix {
    let sets = family.sets();
    ModMatrix::binary(sets.len(), family.n(), |i, j| sets[i] >> j & 1 == 1)
}

/// Columns grouped into equality classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnClasses {
    /// First column of each class, in original order.
    pub matrix: ModMatrix,
    /// Partition of the column indices; class `k` is represented by column
    /// `k` of `matrix`.
    pub classes: Vec<Vec<usize>>,
}

pub fn dedup_columns(m: &ModMatrix) -> ColumnClasses {
    let mut index: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for j in 0..m.cols() {
        let col = m.column(j);
        match index.get(&col) {
            Some(&k) => classes[k].push(j),
            None => {
                index.insert(col, classes.len());
                classes.push(vec![j]);
            }
        }
    }
    let keep: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let matrix = m.select_columns(&keep);
    debug_assert!(
        !crate::numtheory::is_prime(m.modulus())
            || crate::modlinalg::rank_mod_p(m, m.modulus()).ok() == crate::modlinalg::rank_mod_p(&matrix, m.modulus()).ok()
    );
    ColumnClasses { matrix, classes }
}

/// Good/bad status of an odd prime factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeClass {
    pub index: usize,
    pub prime: u64,
    pub exponent: u32,
    /// Distinct columns of the incidence matrix of the sets whose size is
    /// divisible by `p^a`; zero when there are no such sets.
    pub distinct_columns: usize,
    /// `n^0.4`.
    pub threshold: f64,
    pub good: bool,
}

/// Number of distinct columns of the incidence matrix, zero for an empty family.
pub fn distinct_column_count(family: &SetFamily) -> usize {
    if family.is_empty() {
        return 0;
    }
    dedup_columns(&incidence_matrix(family)).classes.len()
}

/// An odd prime `p_i` is good when the sets with size divisible by `p_i^a_i`
/// have at least `n^0.4` distinct incidence columns (ties count as good).
pub fn classify_primes(family: &SetFamily, modulus: u64) -> Result<Vec<PrimeClass>> {
    let f = factorize(modulus)?;
    Ok(classify_with(family, &f))
}

pub(crate) fn classify_with(family: &SetFamily, f: &Factorization) -> Vec<PrimeClass> {
    let threshold = (family.n() as f64).powf(0.4);
    f.factors
        .iter()
        .enumerate()
        .filter(|(_, pp)| pp.prime != 2)
        .map(|(index, pp)| {
            let (_, divisible) = split_by(family, pp);
            let distinct_columns = distinct_column_count(&divisible);
            PrimeClass {
                index,
                prime: pp.prime,
                exponent: pp.exponent,
                distinct_columns,
                threshold,
                good: distinct_columns as f64 >= threshold,
            }
        })
        .collect()
}

/// Result of [`support_reduce`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReduction {
    pub family: SetFamily,
    /// Deleted ground elements, 1-based, increasing.
    pub deleted: Vec<usize>,
    /// Elements grouped by the exact collection of sets containing them.
    pub classes: Vec<Vec<usize>>,
}

impl SupportReduction {
    /// Ground elements that remain.
    pub fn support_size(&self) -> usize {
        self.family.n() - self.deleted.len()
    }
}

/// Removes `floor(|S| / l) * l` elements from every class `S` of ground
/// elements lying in exactly the same sets, keeping the smallest elements of
/// each class. Set sizes and pairwise intersection sizes are preserved mod `l`.
///
/// Fails only if two sets would coincide afterwards, which cannot happen for a
/// valid Oddtown.
pub fn support_reduce(family: &SetFamily, modulus: u64) -> Result<SupportReduction> {
    check_modulus(modulus)?;
    let l = modulus as usize;
    let sets = family.sets();
    let mut by_signature: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for e in 0..family.n() {
        let signature: Vec<bool> = sets.iter().map(|s| s >> e & 1 == 1).collect();
        by_signature.entry(signature).or_default().push(e);
    }
    let mut classes: Vec<Vec<usize>> = by_signature.into_values().collect();
    classes.sort();

    let mut removed = 0u64;
    let mut deleted = Vec::new();
    for class in &classes {
        let drop = class.len() / l * l;
        for &e in &class[class.len() - drop..] {
            removed |= 1 << e;
            deleted.push(e + 1);
        }
    }
    deleted.sort_unstable();

    let reduced: Vec<u64> = sets.iter().map(|s| s & !removed).collect();
    for (i, (&a, &b)) in sets.iter().zip(&reduced).enumerate() {
        assert_eq!(a.count_ones() as usize % l, b.count_ones() as usize % l);
        for (&c, &d) in sets[i + 1..].iter().zip(&reduced[i + 1..]) {
            assert_eq!((a & c).count_ones() as usize % l, (b & d).count_ones() as usize % l);
        }
    }
    let family = SetFamily::new(family.n(), reduced)
        .map_err(|_| Error::InvalidFamily("support reduction merged two sets".into()))?;
    let classes = classes.into_iter().map(|c| c.into_iter().map(|e| e + 1).collect()).collect();
    Ok(SupportReduction { family, deleted, classes })
}

/// `{{1}, {2}, ..., {n}}`.
pub fn singleton_family(n: usize) -> Result<SetFamily> {
    if n == 0 {
        return Err(Error::InvalidArgument("singleton family needs n >= 1".into()));
    }
    SetFamily::new(n, (0..n).map(|e| 1u64 << e).collect())
}
