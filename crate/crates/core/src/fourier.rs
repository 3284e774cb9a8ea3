//! Fourier analysis on `F_p^c` of the law of `L^T v`, `v` uniform on
//! `{0,1}^d`.
//!
//! Probabilities are exact dyadic rationals. Only spectra use floating point;
//! comparisons against them use [`SPECTRUM_TOL`].

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::modlinalg::{add_mod, mul_mod, sub_mod, ModMatrix};
use crate::numtheory::is_prime;
use crate::par;

/// Comparison tolerance for floating-point spectra.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// Default cap on `2^d` when enumerating `v`.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;
/// Default cap on `p^c`, the size of a pmf or spectrum.
pub const SPECTRUM_BUDGET: u64 = 1_000_000;

pub type Prob = Ratio<u64>;

/// Representative of `x mod p` in `(-p/2, p/2]`.
pub fn centered(x: u64, p: u64) -> i64 {
    let r = x % p;
    if 2 * r > p {
        r as i64 - p as i64
    } else {
        r as i64
    }
}

/// `<x, xi>` reduced to its centered representative.
pub fn centered_inner(x: &[u64], xi: &[u64], p: u64) -> Result<i64> {
    if x.len() != xi.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), actual: xi.len() });
    }
    let s = x.iter().zip(xi).fold(0u64, |acc, (&a, &b)| add_mod(acc, mul_mod(a % p, b % p, p), p));
    Ok(centered(s, p))
}

/// Index of a point of `F_p^c`, first coordinate most significant.
pub fn point_index(x: &[u64], p: u64) -> usize {
    x.iter().fold(0usize, |acc, &d| acc * p as usize + (d % p) as usize)
}

pub fn point_of_index(mut index: usize, p: u64, c: usize) -> Vec<u64> {
    let mut x = vec![0; c];
    for slot in x.iter_mut().rev() {
        *slot = (index % p as usize) as u64;
        index /= p as usize;
    }
    x
}

fn space_size(p: u64, c: usize, budget: u64) -> Result<usize> {
    match (p as u128).checked_pow(c as u32) {
        Some(s) if s <= budget as u128 => Ok(s as usize),
        _ => Err(Error::budget("points of F_p^c", (p as f64).powi(c as i32), budget)),
    }
}

fn field_prime(l: &ModMatrix) -> Result<u64> {
    let p = l.modulus();
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

fn odd_field_prime(l: &ModMatrix) -> Result<u64> {
    let p = field_prime(l)?;
    if p == 2 {
        return Err(Error::EvenPrime(p));
    }
    Ok(p)
}

/// Probability mass function on `F_p^c`, indexed by [`point_index`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pmf {
    p: u64,
    c: usize,
    mass: Vec<Prob>,
}

#[derive(Serialize)]
struct PmfEntry {
    x: Vec<u64>,
    #[serde(serialize_with = "exact::ser_ratio")]
    mass: Prob,
}

impl Serialize for Pmf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let support: Vec<PmfEntry> = self
            .mass
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, &mass)| PmfEntry { x: point_of_index(i, self.p, self.c), mass })
            .collect();
        let mut st = s.serialize_struct("Pmf", 3)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("support", &support)?;
        st.end()
    }
}

impl Pmf {
    pub fn new(p: u64, c: usize, mass: Vec<Prob>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let size = space_size(p, c, u64::MAX)?;
        if mass.len() != size {
            return Err(Error::DimensionMismatch { expected: size, actual: mass.len() });
        }
        let total = mass.iter().fold(Prob::zero(), |a, &b| a + b);
        if total != Prob::one() {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { p, c, mass })
    }

    pub fn point_mass(p: u64, x: &[u64]) -> Result<Self> {
        let size = space_size(p, x.len(), SPECTRUM_BUDGET)?;
        let mut mass = vec![Prob::zero(); size];
        mass[point_index(x, p)] = Prob::one();
        Self::new(p, x.len(), mass)
    }

    /// Law of `v * row` for a single uniform bit `v`: half at `0`, half at `row`.
    pub fn of_row(p: u64, row: &[u64]) -> Result<Self> {
        let size = space_size(p, row.len(), SPECTRUM_BUDGET)?;
        let mut mass = vec![Prob::zero(); size];
        let half = Prob::new(1, 2);
        mass[0] += half;
        mass[point_index(row, p)] += half;
        Self::new(p, row.len(), mass)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn masses(&self) -> &[Prob] {
        &self.mass
    }

    pub fn mass(&self, x: &[u64]) -> Prob {
        self.mass[point_index(x, self.p)]
    }

    /// Law of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Pmf) -> Result<Pmf> {
        if self.p != other.p || self.c != other.c {
            return Err(Error::InvalidArgument("convolving pmfs on different spaces".into()));
        }
        let (p, c) = (self.p, self.c);
        let mut mass = vec![Prob::zero(); self.mass.len()];
        for (i, &a) in self.mass.iter().enumerate().filter(|(_, m)| !m.is_zero()) {
            let x = point_of_index(i, p, c);
            for (j, &b) in other.mass.iter().enumerate().filter(|(_, m)| !m.is_zero()) {
                let y = point_of_index(j, p, c);
                let sum: Vec<u64> = x.iter().zip(&y).map(|(&u, &v)| add_mod(u, v, p)).collect();
                mass[point_index(&sum, p)] += a * b;
            }
        }
        Pmf::new(p, c, mass)
    }

    /// `sum_x f(x)^2`.
    pub fn collision_probability(&self) -> Ratio<u128> {
        self.mass.iter().fold(Ratio::<u128>::zero(), |acc, m| {
            let m = Ratio::new(*m.numer() as u128, *m.denom() as u128);
            acc + m * m
        })
    }
}

/// Visits `L^T v` for `v` in Gray-code order over the index range `range`;
/// `visit` sees the current digits.
fn for_each_image(l: &ModMatrix, p: u64, range: std::ops::Range<u64>, mut visit: impl FnMut(&[u64])) {
    let c = l.cols();
    let gray = |i: u64| i ^ (i >> 1);
    let mut x = vec![0u64; c];
    let start = gray(range.start);
    for j in 0..l.rows() {
        if start >> j & 1 == 1 {
            for (s, &r) in x.iter_mut().zip(l.row(j)) {
                *s = add_mod(*s, r, p);
            }
        }
    }
    let first = range.start;
    for i in range {
        if i != first {
            let j = (i.trailing_zeros()) as usize;
            let adding = gray(i) >> j & 1 == 1;
            for (s, &r) in x.iter_mut().zip(l.row(j)) {
                *s = if adding { add_mod(*s, r, p) } else { sub_mod(*s, r, p) };
            }
        }
        visit(&x);
    }
}

fn enumeration_size(d: usize, budget: u64) -> Result<u64> {
    if d >= 63 || 1u64 << d > budget {
        return Err(Error::budget("0-1 vectors v (2^d)", 2f64.powi(d as i32), budget));
    }
    Ok(1u64 << d)
}

/// Exact law of `L^T v` for `v` uniform on `{0,1}^d`, `L` a `d x c` matrix
/// over `F_p`.
pub fn pmf_of_linear_image(l: &ModMatrix) -> Result<Pmf> {
    pmf_of_linear_image_within(l, ENUMERATION_BUDGET, SPECTRUM_BUDGET)
}

pub fn pmf_of_linear_image_within(l: &ModMatrix, enum_budget: u64, space_budget: u64) -> Result<Pmf> {
    let p = field_prime(l)?;
    let d = l.rows();
    let total = enumeration_size(d, enum_budget)?;
    let size = space_size(p, l.cols(), space_budget)?;
    let chunk = (total / 16).max(1 << 12);
    let counts = par::fold_ranges(
        0..total,
        chunk,
        || vec![0u64; size],
        |hist, sub| for_each_image(l, p, sub, |x| hist[point_index(x, p)] += 1),
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let mass = counts.into_iter().map(|k| Prob::new(k, total)).collect();
    Pmf::new(p, l.cols(), mass)
}

/// Complex spectrum on `F_p^c`, indexed by [`point_index`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub p: u64,
    pub c: usize,
    #[serde(serialize_with = "exact::ser_complex_vec")]
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn value(&self, xi: &[u64]) -> Complex64 {
        self.values[point_index(xi, self.p)]
    }

    /// Inverse transform `p^-c sum_xi F(xi) e^{2 pi i <x,xi>/p}`.
    pub fn inverse(&self) -> Vec<Complex64> {
        let (p, c) = (self.p, self.c);
        let roots = roots_of_unity(p, 1.0);
        let points: Vec<Vec<u64>> = (0..self.values.len()).map(|i| point_of_index(i, p, c)).collect();
        let scale = 1.0 / self.values.len() as f64;
        par::map_slice(&points, |x| {
            let sum: Complex64 = points
                .iter()
                .zip(&self.values)
                .map(|(xi, &v)| v * roots[inner_mod(x, xi, p) as usize])
                .sum();
            sum * scale
        })
    }
}

fn roots_of_unity(p: u64, sign: f64) -> Vec<Complex64> {
    (0..p).map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / p as f64)).collect()
}

fn inner_mod(x: &[u64], y: &[u64], p: u64) -> u64 {
    x.iter().zip(y).fold(0, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, p), p))
}

/// Direct-summation transform `f^(xi) = sum_x f(x) e^{-2 pi i <x,xi>/p}`.
pub fn dft(f: &Pmf) -> Result<Spectrum> {
    dft_within(f, SPECTRUM_BUDGET)
}

pub fn dft_within(f: &Pmf, budget: u64) -> Result<Spectrum> {
    let (p, c) = (f.p, f.c);
    let size = space_size(p, c, budget)?;
    let roots = roots_of_unity(p, -1.0);
    let support: Vec<(Vec<u64>, f64)> = f
        .mass
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .map(|(i, m)| (point_of_index(i, p, c), *m.numer() as f64 / *m.denom() as f64))
        .collect();
    let values = par::map_range(0..size as u64, |k| {
        let xi = point_of_index(k as usize, p, c);
        support.iter().map(|(x, m)| roots[inner_mod(x, &xi, p) as usize] * *m).sum()
    });
    Ok(Spectrum { p, c, values })
}

/// `prod_j (1 + e^{-2 pi i <r_j, xi>/p}) / 2` over the rows `r_j` of `L`.
pub fn product_formula(l: &ModMatrix, xi: &[u64]) -> Result<Complex64> {
    let p = field_prime(l)?;
    if xi.len() != l.cols() {
        return Err(Error::DimensionMismatch { expected: l.cols(), actual: xi.len() });
    }
    let roots = roots_of_unity(p, -1.0);
    Ok(l.row_iter().map(|r| (Complex64::one() + roots[inner_mod(r, xi, p) as usize]) * 0.5).product())
}

/// [`product_formula`] at every `xi`.
pub fn product_formula_spectrum(l: &ModMatrix) -> Result<Spectrum> {
    let p = field_prime(l)?;
    let c = l.cols();
    let size = space_size(p, c, SPECTRUM_BUDGET)?;
    let values = par::map_range(0..size as u64, |k| {
        product_formula(l, &point_of_index(k as usize, p, c)).expect("shape checked")
    });
    Ok(Spectrum { p, c, values })
}

/// `sigma(xi) = sum_j <r_j, xi>^2` with centered inner products.
pub fn sigma_stat(l: &ModMatrix, xi: &[u64]) -> Result<u64> {
    let p = l.modulus();
    if xi.len() != l.cols() {
        return Err(Error::DimensionMismatch { expected: l.cols(), actual: xi.len() });
    }
    Ok(l.row_iter().map(|r| centered(inner_mod(r, xi, p), p).pow(2) as u64).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop43Entry {
    pub xi: Vec<u64>,
    pub abs_fhat: f64,
    pub sigma: u64,
    /// `exp(-pi^2 sigma / (2 p^2))`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop43Report {
    pub p: u64,
    pub d: usize,
    pub c: usize,
    /// `max_xi |f^(xi)| - exp(-pi^2 sigma(xi) / (2 p^2))`.
    pub max_violation: f64,
    pub worst_xi: Vec<u64>,
    pub entries: Vec<Prop43Entry>,
}

impl Prop43Report {
    pub fn holds(&self) -> bool {
        self.max_violation <= SPECTRUM_TOL
    }
}

/// Evaluates `|f^(xi)|` against `exp(-pi^2 sigma(xi) / 2p^2)` at every `xi`
/// for a matrix over an odd prime field with distinct columns.
pub fn prop43_check(l: &ModMatrix) -> Result<Prop43Report> {
    prop43_check_within(l, ENUMERATION_BUDGET, SPECTRUM_BUDGET)
}

pub fn prop43_check_within(l: &ModMatrix, enum_budget: u64, space_budget: u64) -> Result<Prop43Report> {
    let p = odd_field_prime(l)?;
    l.ensure_distinct_columns()?;
    let spectrum = dft_within(&pmf_of_linear_image_within(l, enum_budget, space_budget)?, space_budget)?;
    let c = l.cols();
    let pf = p as f64;
    let entries = par::map_range(0..spectrum.values.len() as u64, |k| {
        let xi = point_of_index(k as usize, p, c);
        let sigma = sigma_stat(l, &xi).expect("shape checked");
        Prop43Entry {
            abs_fhat: spectrum.values[k as usize].norm(),
            bound: (-PI * PI * sigma as f64 / (2.0 * pf * pf)).exp(),
            sigma,
            xi,
        }
    });
    let (worst, max_violation) = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (i, e.abs_fhat - e.bound))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(Prop43Report { p, d: l.rows(), c, max_violation, worst_xi: entries[worst].xi.clone(), entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma41Report {
    pub p: u64,
    pub d: usize,
    pub c: usize,
    /// `P[L^T v in {0,1}^c]`, exact.
    #[serde(serialize_with = "exact::ser_ratio")]
    pub prob: Prob,
    /// `3 * 2^(-d / 36p^2)`.
    pub bound: f64,
    /// `36 log p <= d <= 3 log c`.
    pub preconditions_met: bool,
}

/// Exact probability that `L^T v` is a 0–1 vector.
///
/// # Panics
/// If the preconditions hold and the probability exceeds the bound.
pub fn lemma41_probability(l: &ModMatrix) -> Result<Lemma41Report> {
    lemma41_probability_within(l, ENUMERATION_BUDGET)
}

pub fn lemma41_probability_within(l: &ModMatrix, budget: u64) -> Result<Lemma41Report> {
    let p = odd_field_prime(l)?;
    l.ensure_distinct_columns()?;
    let (d, c) = l.shape();
    let total = enumeration_size(d, budget)?;
    let hits = par::fold_ranges(
        0..total,
        1 << 12,
        || 0u64,
        |n, sub| for_each_image(l, p, sub, |x| *n += x.iter().all(|&e| e <= 1) as u64),
        |a, b| a + b,
    );
    let prob = Prob::new(hits, total);
    let pf = p as f64;
    let bound = 3.0 * 2f64.powf(-(d as f64) / (36.0 * pf * pf));
    let preconditions_met = c > 0 && 36.0 * pf.log2() <= d as f64 && d as f64 <= 3.0 * (c as f64).log2();
    if preconditions_met {
        assert!(exact::rational_to_f64(&Ratio::new(hits as i64, total as i64)) <= bound, "probability above bound");
    }
    Ok(Lemma41Report { p, d, c, prob, bound, preconditions_met })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    /// `sqrt(q (1 - q) / samples)` at the estimate `q`.
    pub std_error: f64,
}

/// Sampling estimate of the same probability. Samples are drawn in fixed
/// blocks, each from its own ChaCha stream, so the result depends only on
/// `seed`.
pub fn lemma41_monte_carlo(l: &ModMatrix, samples: u64, seed: u64) -> Result<MonteCarlo> {
    let p = field_prime(l)?;
    let d = l.rows();
    if d > 64 {
        return Err(Error::InvalidArgument("at most 64 rows supported for sampling".into()));
    }
    const BLOCK: u64 = 4096;
    let blocks = samples.div_ceil(BLOCK);
    let hits = par::fold_chunks(
        0..blocks,
        1,
        || 0u64,
        |acc, b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut x = vec![0u64; l.cols()];
            for _ in 0..count {
                let v: u64 = rng.random();
                x.iter_mut().for_each(|s| *s = 0);
                for j in 0..d {
                    if v >> j & 1 == 1 {
                        for (s, &r) in x.iter_mut().zip(l.row(j)) {
                            *s = add_mod(*s, r, p);
                        }
                    }
                }
                *acc += x.iter().all(|&e| e <= 1) as u64;
            }
        },
        |a, b| a + b,
    );
    let estimate = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    let std_error = if samples == 0 { 0.0 } else { (estimate * (1.0 - estimate) / samples as f64).sqrt() };
    Ok(MonteCarlo { samples, hits, estimate, std_error })
}
