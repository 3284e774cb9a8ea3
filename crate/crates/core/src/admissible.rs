//! σ-admissible column submatrices.
//!
//! A matrix `S` over `F_p` with rows `r_1..r_d` is σ-admissible when every
//! nonzero `xi` has `sum_i <r_i, xi>^2 > σ`, inner products centered in
//! `(-p/2, p/2]`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::fourier::{centered, point_of_index};
use crate::modlinalg::{add_mod, mul_mod, ModMatrix};
use crate::numtheory::{binary_entropy, is_prime, BOUND_SLACK};
use crate::par;

/// Default cap on `p^c'` for the exhaustive scan over `xi`.
pub const ADMISSIBLE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibleResult {
    /// Selected columns of `L`, 0-based, in selection order.
    pub column_indices: Vec<usize>,
    pub c_prime: usize,
    #[serde(serialize_with = "exact::ser_ratio")]
    pub sigma: Rational,
    pub bound: f64,
}

fn exceeds(sum: u64, sigma: &Rational) -> bool {
    (sum as i128) * (*sigma.denom() as i128) > *sigma.numer() as i128
}

fn scan_size(p: u64, c: usize, budget: u64) -> Result<u64> {
    match p.checked_pow(c as u32) {
        Some(s) if s <= budget => Ok(s),
        _ => Err(Error::budget("vectors xi in F_p^c'", (p as f64).powi(c as i32), budget)),
    }
}

/// `sum_i centered(<col combination>_i)^2` for the combination `sum_j xi_j w_j`.
fn square_sum(columns: &[Vec<u64>], xi: &[u64], p: u64, d: usize) -> u64 {
    (0..d)
        .map(|i| {
            let s = columns.iter().zip(xi).fold(0, |acc, (w, &t)| add_mod(acc, mul_mod(w[i], t, p), p));
            centered(s, p).pow(2) as u64
        })
        .sum()
}

fn prime_of(s: &ModMatrix) -> Result<u64> {
    let p = s.modulus();
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exhaustive check over all nonzero `xi in F_p^c'`.
pub fn is_admissible(s: &ModMatrix, sigma: &Rational) -> Result<bool> {
    is_admissible_within(s, sigma, ADMISSIBLE_BUDGET)
}

pub fn is_admissible_within(s: &ModMatrix, sigma: &Rational, budget: u64) -> Result<bool> {
    let p = prime_of(s)?;
    let columns: Vec<Vec<u64>> = (0..s.cols()).map(|j| s.column(j)).collect();
    admissible_columns(&columns, p, s.rows(), sigma, budget)
}

fn admissible_columns(columns: &[Vec<u64>], p: u64, d: usize, sigma: &Rational, budget: u64) -> Result<bool> {
    let total = scan_size(p, columns.len(), budget)?;
    Ok(par::all_range(1..total, |k| {
        let xi = point_of_index(k as usize, p, columns.len());
        exceeds(square_sum(columns, &xi, p, d), sigma)
    }))
}

/// Whether `selected + [w]` stays admissible, given that `selected` already is:
/// only `xi` with a nonzero last coordinate need checking.
fn extension_admissible(selected: &[Vec<u64>], w: &[u64], p: u64, d: usize, sigma: &Rational, budget: u64) -> Result<bool> {
    let base = scan_size(p, selected.len(), budget)?;
    if base.saturating_mul(p) > budget {
        return Err(Error::budget("vectors xi in F_p^c'", (p as f64).powi(selected.len() as i32 + 1), budget));
    }
    let mut columns = selected.to_vec();
    columns.push(w.to_vec());
    let c = columns.len();
    Ok(par::all_range(0..base * (p - 1), |k| {
        let mut xi = point_of_index((k / (p - 1)) as usize, p, c - 1);
        xi.push(k % (p - 1) + 1);
        exceeds(square_sum(&columns, &xi, p, d), sigma)
    }))
}

/// First-fit maximal σ-admissible column submatrix of `L`.
///
/// # Panics
/// If the result fails the admissibility, maximality or size checks.
pub fn greedy_admissible_submatrix(l: &ModMatrix, sigma: &Rational) -> Result<AdmissibleResult> {
    greedy_admissible_submatrix_within(l, sigma, ADMISSIBLE_BUDGET)
}

pub fn greedy_admissible_submatrix_within(l: &ModMatrix, sigma: &Rational, budget: u64) -> Result<AdmissibleResult> {
    let p = prime_of(l)?;
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    l.ensure_distinct_columns()?;
    let (d, c) = l.shape();
    let bound = if c == 0 || d == 0 { f64::NEG_INFINITY } else { lemma42_bound(c, d, sigma, p)? };

    let mut chosen = Vec::new();
    let mut selected: Vec<Vec<u64>> = Vec::new();
    for j in 0..c {
        let w = l.column(j);
        if extension_admissible(&selected, &w, p, d, sigma, budget)? {
            chosen.push(j);
            selected.push(w);
        }
    }

    assert!(admissible_columns(&selected, p, d, sigma, budget)?, "greedy output not admissible");
    for j in (0..c).filter(|j| !chosen.contains(j)) {
        assert!(
            !extension_admissible(&selected, &l.column(j), p, d, sigma, budget)?,
            "greedy output not maximal: column {j} extends it"
        );
    }
    assert!(chosen.len() as f64 >= bound - BOUND_SLACK, "greedy output below the counting bound");

    Ok(AdmissibleResult { c_prime: chosen.len(), column_indices: chosen, sigma: *sigma, bound })
}

/// `(1/log p)(log c - σ - (σ+d) H(σ/(σ+d))) - 1`, logs base 2.
pub fn lemma42_bound(c: usize, d: usize, sigma: &Rational, p: u64) -> Result<f64> {
    if c == 0 || d == 0 {
        return Err(Error::InvalidArgument("lemma42_bound needs c >= 1 and d >= 1".into()));
    }
    if *sigma < Rational::zero() {
        return Err(Error::InvalidArgument(format!("sigma must be non-negative, got {sigma}")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    let s = exact::rational_to_f64(sigma);
    let d = d as f64;
    let h = binary_entropy(s / (s + d))?;
    Ok(((c as f64).log2() - s - (s + d) * h) / (p as f64).log2() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareSumCount {
    /// Integer vectors in `Z^d` with `sum x_i^2 <= σ`.
    pub count: u128,
    /// `2^σ * C(floor(σ) + d, d)`.
    pub bound: f64,
}

/// Exact count of lattice points in the ball `sum x_i^2 <= σ`.
///
/// # Panics
/// If the count exceeds `2^σ C(floor(σ)+d, d)`.
pub fn count_bounded_square_sum(d: usize, sigma: &Rational) -> Result<SquareSumCount> {
    if *sigma < Rational::zero() {
        return Err(Error::InvalidArgument(format!("sigma must be non-negative, got {sigma}")));
    }
    let cap = sigma.floor().to_integer();
    let cap = usize::try_from(cap).map_err(|_| Error::budget("square-sum radius", cap as f64, u32::MAX as u64))?;
    if cap > 1 << 20 {
        return Err(Error::budget("square-sum radius", cap as f64, 1 << 20));
    }
    // ways[s] = vectors in the current dimension with square sum exactly s
    let mut ways = vec![0u128; cap + 1];
    ways[0] = 1;
    let squares: Vec<usize> = (0..).map(|x: usize| x * x).take_while(|&q| q <= cap).collect();
    for _ in 0..d {
        let mut next = vec![0u128; cap + 1];
        for (s, &w) in ways.iter().enumerate().filter(|(_, w)| **w > 0) {
            for (x, &q) in squares.iter().enumerate() {
                if s + q > cap {
                    break;
                }
                let mult = if x == 0 { 1 } else { 2 };
                next[s + q] = w
                    .checked_mul(mult)
                    .and_then(|m| next[s + q].checked_add(m))
                    .ok_or_else(|| Error::budget("square-sum count", f64::INFINITY, u64::MAX))?;
            }
        }
        ways = next;
    }
    let count = ways.iter().sum();
    let bound = 2f64.powf(exact::rational_to_f64(sigma)) * binomial(cap + d, d);
    assert!(count as f64 <= bound * (1.0 + 1e-12), "square-sum count above bound");
    Ok(SquareSumCount { count, bound })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modlinalg::all_columns_matrix;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn all_of_f3_squared() -> ModMatrix {
        let cols: Vec<Vec<u64>> = (0..9).map(|k| point_of_index(k, 3, 2)).collect();
        let rows: Vec<Vec<u64>> = (0..2).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        ModMatrix::from_rows(3, 9, &rows).unwrap()
    }

    #[test]
    fn admissible_examples() {
        assert!(is_admissible(&ModMatrix::identity(2, 3), &r(1, 2)).unwrap());
        let zero = ModMatrix::zeros(3, 1, 5);
        assert!(!is_admissible(&zero, &r(0, 1)).unwrap());
        assert!(!is_admissible(&zero, &r(7, 3)).unwrap());
        let ones = ModMatrix::from_rows(3, 1, &[vec![1], vec![1]]).unwrap();
        assert!(is_admissible(&ones, &r(1, 2)).unwrap());
        assert!(is_admissible(&ones, &r(19, 10)).unwrap());
        assert!(!is_admissible(&ones, &r(2, 1)).unwrap());
        // no columns: nothing to check
        assert!(is_admissible(&ModMatrix::zeros(2, 0, 3), &r(100, 1)).unwrap());
    }

    #[test]
    fn admissible_budget() {
        let wide = ModMatrix::zeros(1, 13, 3);
        assert_eq!(is_admissible(&wide, &r(0, 1)).unwrap_err().kind(), crate::ErrorKind::Resource);
        assert_eq!(is_admissible(&ModMatrix::identity(2, 4), &r(0, 1)).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn greedy_examples() {
        let res = greedy_admissible_submatrix(&all_of_f3_squared(), &r(1, 2)).unwrap();
        assert_eq!(res.c_prime, 2);
        // column 0 is zero, column 1 is (0,1), column 2 = 2*(0,1), column 3 = (1,0)
        assert_eq!(res.column_indices, vec![1, 3]);

        let res = greedy_admissible_submatrix(&ModMatrix::identity(2, 3), &r(3, 1)).unwrap();
        assert_eq!(res.c_prime, 0);
        assert!(res.column_indices.is_empty());
    }

    #[test]
    fn greedy_rejects() {
        let dup = ModMatrix::from_rows(3, 2, &[vec![1, 1]]).unwrap();
        assert_eq!(greedy_admissible_submatrix(&dup, &r(1, 2)).unwrap_err(), Error::DuplicateColumns(0, 1));
        assert_eq!(
            greedy_admissible_submatrix(&ModMatrix::identity(2, 2), &r(1, 2)).unwrap_err(),
            Error::EvenPrime(2)
        );
    }

    #[test]
    fn below_one_means_independent() {
        let m = all_columns_matrix(3).unwrap().with_modulus(5).unwrap();
        let res = greedy_admissible_submatrix(&m, &r(1, 2)).unwrap();
        assert_eq!(res.c_prime, 3);
        let rank = crate::modlinalg::rank_mod_p(&m.select_columns(&res.column_indices), 5).unwrap();
        assert_eq!(rank, 3);
    }

    #[test]
    fn bound_examples() {
        let b = lemma42_bound(9, 2, &r(1, 2), 3).unwrap();
        assert!((b - (-0.454183)).abs() < 1e-5, "{b}");
        let b = lemma42_bound(27, 5, &r(0, 1), 3).unwrap();
        assert!((b - 2.0).abs() < 1e-12);
        assert!(lemma42_bound(0, 2, &r(1, 2), 3).is_err());
        assert!(lemma42_bound(4, 2, &r(-1, 2), 3).is_err());
        assert!(lemma42_bound(4, 2, &r(1, 2), 9).is_err());
    }

    #[test]
    fn bound_at_sigma_d_over_36() {
        // 1/36 + 37/36 H(1/37) <= 1/4
        let lhs = 1.0 / 36.0 + 37.0 / 36.0 * binary_entropy(1.0 / 37.0).unwrap();
        assert!(lhs <= 0.25);
        for p in [3u64, 5, 7] {
            for d in [36usize, 72, 144] {
                let c = 1usize << (d / 3).min(60);
                let b = lemma42_bound(c, d, &r(d as i64, 36), p).unwrap();
                assert!(b >= d as f64 / (12.0 * (p as f64).log2()) - 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn square_sum_examples() {
        let s = count_bounded_square_sum(1, &r(1, 1)).unwrap();
        assert_eq!((s.count, s.bound), (3, 4.0));
        let s = count_bounded_square_sum(2, &r(0, 1)).unwrap();
        assert_eq!((s.count, s.bound), (1, 1.0));
        let s = count_bounded_square_sum(2, &r(2, 1)).unwrap();
        assert_eq!((s.count, s.bound), (9, 24.0));
        assert!(count_bounded_square_sum(2, &r(-1, 1)).is_err());
    }

    #[test]
    fn square_sum_matches_brute_force() {
        for d in 0..=4usize {
            for num in 0..=12i64 {
                let sigma = r(num, 2);
                let m = 3i64;
                let total = (2 * m + 1).pow(d as u32);
                let brute = (0..total)
                    .filter(|&k| {
                        let mut k = k;
                        let mut s = 0;
                        for _ in 0..d {
                            let x = k % (2 * m + 1) - m;
                            k /= 2 * m + 1;
                            s += x * x;
                        }
                        2 * s <= num
                    })
                    .count() as u128;
                assert_eq!(count_bounded_square_sum(d, &sigma).unwrap().count, brute, "d={d} sigma={sigma}");
            }
        }
    }
}
