use std::collections::HashMap;

use num_rational::BigRational;
use serde::Serialize;

use super::{classify_with, distinct_column_count, incidence_matrix, split_by, verify_family, SetFamily, Verdict};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::modlinalg::rank_mod_p;
use crate::numtheory::{bound_table, factorize, Bound, BOUND_SLACK};
use crate::par;

/// Every per-prime inequality evaluated on a concrete valid family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub modulus: u64,
    pub n: usize,
    pub family_size: usize,
    pub omega: usize,
    pub primes: Vec<PrimeRecord>,
    /// Data about pairs of bad odd primes (the bad-prime lemma).
    pub bad_pairs: Vec<BadPairData>,
    pub overall: OverallBounds,
    /// Conjunction of every `*_ok` flag that is a theorem at all `n`.
    pub all_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeRecord {
    pub index: usize,
    pub prime: u64,
    pub exponent: u32,
    pub prime_power: u64,
    /// Sets whose size is not divisible by `p^a`.
    pub size_a: usize,
    /// Sets whose size is divisible by `p^a`.
    pub size_a_prime: usize,
    /// Rank over `F_p` of the incidence matrix of the divisible part.
    pub dim: usize,
    /// Same rank after deleting repeated columns.
    pub d: usize,
    pub distinct_columns: usize,
    /// `(n - size_a) / 2`.
    #[serde(serialize_with = "exact::ser_ratio")]
    pub eq3_bound: Rational,
    /// `size_a <= n`.
    pub prime_power_ok: bool,
    /// `dim <= (n - size_a) / 2`.
    pub eq3_ok: bool,
    /// `size_a_prime <= 2^((n - size_a) / 2)`.
    pub eq4_ok: bool,
    /// Good/bad status; `None` for `p = 2`.
    pub good: Option<bool>,
    /// Which of the three rank regimes `d` falls into (odd primes only).
    pub cases: Vec<DiCase>,
}

/// The three regimes for the rank `d` of the divisible part at an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiCase {
    /// `d <= 36 log p`.
    SmallRank,
    /// `d >= (1 + 1/(36 p^2)) (log |A'| - 2)`.
    EntropyGain,
    /// `d >= 3 log(n^0.4)`.
    ManyColumns,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BadPairData {
    pub first_prime: u64,
    pub second_prime: u64,
    /// Sets lying in both non-divisible parts.
    pub common_sets: usize,
    /// Largest set of ground elements whose incidence columns agree in both
    /// divisible parts.
    pub largest_common_class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverallBounds {
    pub trivial: u64,
    pub trivial_ok: bool,
    /// Fails for some small `n` (three singletons with `l = 6` exceed it);
    /// reported for information, not part of `all_ok`.
    pub szegedy: Bound,
    pub szegedy_ok: bool,
    pub thm11: Bound,
    pub thm11_ok: bool,
    /// Asymptotic in `n`; reported for information, not part of `all_ok`.
    pub thm12: Bound,
    pub thm12_ok: bool,
    #[serde(serialize_with = "exact::ser_big_rational")]
    pub epsilon: BigRational,
}

/// Certifies a valid `l`-Oddtown. Invalid families are rejected with the
/// verification witness.
pub fn certify(family: &SetFamily, modulus: u64) -> Result<Certificate> {
    let f = factorize(modulus)?;
    if let Verdict::Invalid { reason } = verify_family(family, modulus)? {
        return Err(Error::NotOddtown(reason.to_string()));
    }
    let n = family.n();
    if n == 0 {
        return Err(Error::InvalidArgument("ground set size n must be at least 1".into()));
    }
    let classes = classify_with(family, &f);
    let log_n = (n as f64).log2();

    let primes: Vec<PrimeRecord> = par::map_slice(&f.factors, |pp| {
        let (a, a_prime) = split_by(family, pp);
        let p = pp.prime;
        let incidence = incidence_matrix(&a_prime);
        let dim = rank_mod_p(&incidence, p).expect("prime factor is prime");
        let dedup = super::dedup_columns(&incidence);
        let d = rank_mod_p(&dedup.matrix, p).expect("prime factor is prime");
        let deficit = n as i64 - a.len() as i64;
        let eq4_ok = if deficit < 0 {
            a_prime.is_empty()
        } else {
            (a_prime.len() as u128).pow(2) <= 1u128 << deficit
        };
        let (good, cases) = if p == 2 {
            (None, Vec::new())
        } else {
            let good = classes.iter().find(|c| c.prime == p).map(|c| c.good);
            (good, rank_cases(d, p, a_prime.len(), log_n))
        };
        PrimeRecord {
            index: f.factors.iter().position(|x| x == pp).unwrap_or(0),
            prime: p,
            exponent: pp.exponent,
            prime_power: pp.value(),
            size_a: a.len(),
            size_a_prime: a_prime.len(),
            dim,
            d,
            distinct_columns: distinct_column_count(&a_prime),
            eq3_bound: Rational::new(deficit, 2),
            prime_power_ok: a.len() <= n,
            eq3_ok: 2 * dim as i64 <= deficit,
            eq4_ok,
            good,
            cases,
        }
    });

    let bad: Vec<_> = classes.iter().filter(|c| !c.good).collect();
    let mut bad_pairs = Vec::new();
    for (i, x) in bad.iter().enumerate() {
        for y in &bad[i + 1..] {
            let (ax, ax_prime) = split_by(family, &f.factors[x.index]);
            let (ay, ay_prime) = split_by(family, &f.factors[y.index]);
            let common_sets = ax.sets().iter().filter(|s| ay.contains(**s)).count();
            bad_pairs.push(BadPairData {
                first_prime: x.prime,
                second_prime: y.prime,
                common_sets,
                largest_common_class: largest_common_class(&ax_prime, &ay_prime),
            });
        }
    }

    let table = bound_table(modulus, n as u64)?;
    let size = family.len();
    let overall = OverallBounds {
        trivial: table.trivial,
        trivial_ok: size as u64 <= table.trivial,
        szegedy: table.szegedy,
        szegedy_ok: table.szegedy.admits(size),
        thm11: table.thm11,
        thm11_ok: table.thm11.admits(size),
        thm12: table.thm12,
        thm12_ok: table.thm12.admits(size),
        epsilon: table.epsilon,
    };
    let all_ok = primes.iter().all(|r| r.prime_power_ok && r.eq3_ok && r.eq4_ok)
        && overall.trivial_ok
        && overall.thm11_ok;

    Ok(Certificate { modulus, n, family_size: size, omega: f.omega(), primes, bad_pairs, overall, all_ok })
}

fn rank_cases(d: usize, p: u64, size_a_prime: usize, log_n: f64) -> Vec<DiCase> {
    let d = d as f64;
    let pf = p as f64;
    let mut cases = Vec::new();
    if d <= 36.0 * pf.log2() + BOUND_SLACK {
        cases.push(DiCase::SmallRank);
    }
    if size_a_prime > 0 && d + BOUND_SLACK >= (1.0 + 1.0 / (36.0 * pf * pf)) * ((size_a_prime as f64).log2() - 2.0) {
        cases.push(DiCase::EntropyGain);
    }
    if d + BOUND_SLACK >= 1.2 * log_n {
        cases.push(DiCase::ManyColumns);
    }
    cases
}

fn largest_common_class(first: &SetFamily, second: &SetFamily) -> usize {
    let mut counts: HashMap<(Vec<bool>, Vec<bool>), usize> = HashMap::new();
    for e in 0..first.n() {
        let col = |f: &SetFamily| f.sets().iter().map(|s| s >> e & 1 == 1).collect::<Vec<_>>();
        *counts.entry((col(first), col(second))).or_default() += 1;
    }
    counts.into_values().max().unwrap_or(0)
}
