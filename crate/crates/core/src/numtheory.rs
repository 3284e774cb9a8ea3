//! Factorization of the modulus and the closed-form bounds on Oddtown sizes.
//!
//! All logarithms are base 2. Bounds that involve `log2 n` are real numbers; a
//! family size is an integer, so every applicable bound also carries the
//! largest integer it admits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;

/// Slack used whenever a real-valued bound is compared with an integer.
pub const BOUND_SLACK: f64 = 1e-12;

/// Prime-power decomposition `l = p_1^a_1 * ... * p_w^a_w` with `p_1 < ... < p_w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub modulus: u64,
    pub factors: Vec<PrimePower>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    /// `p^a`.
    pub fn value(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

impl Factorization {
    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|f| f.exponent == 1)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// Odd primes dividing the modulus, in increasing order.
    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|f| f.prime).filter(|&p| p != 2)
    }

    /// Recomposes the modulus from its factors.
    pub fn product(&self) -> u64 {
        self.factors.iter().map(PrimePower::value).product()
    }
}

/// Trial division; moduli in this crate are small.
pub fn factorize(modulus: u64) -> Result<Factorization> {
    if modulus < 2 {
        return Err(Error::InvalidModulus(modulus));
    }
    let mut rest = modulus;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let mut exponent = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                exponent += 1;
            }
            factors.push(PrimePower { prime: p, exponent });
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push(PrimePower { prime: rest, exponent: 1 });
    }
    Ok(Factorization { modulus, factors })
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `(1/20) * sum of p^-2` over the odd primes dividing `modulus`, skipping the
/// smallest odd prime. Zero when fewer than two odd primes divide it.
pub fn epsilon_of(modulus: u64) -> Result<BigRational> {
    let f = factorize(modulus)?;
    Ok(epsilon_of_factorization(&f))
}

pub fn epsilon_of_factorization(f: &Factorization) -> BigRational {
    let sum = f
        .odd_primes()
        .skip(1)
        .map(|p| BigRational::new(BigInt::one(), BigInt::from(p) * BigInt::from(p)))
        .fold(BigRational::zero(), |acc, x| acc + x);
    sum / BigRational::from_integer(BigInt::from(20))
}

/// A bound that may not apply to a given modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Bound {
    NotApplicable,
    Applicable {
        /// Real value of the closed form.
        value: f64,
        /// Largest family size the bound permits.
        floor: i64,
    },
}

impl Bound {
    fn real(value: f64) -> Self {
        Bound::Applicable { value, floor: (value + BOUND_SLACK).floor() as i64 }
    }

    pub fn floor(&self) -> Option<i64> {
        match *self {
            Bound::Applicable { floor, .. } => Some(floor),
            Bound::NotApplicable => None,
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Bound::Applicable { value, .. } => Some(value),
            Bound::NotApplicable => None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self, Bound::Applicable { .. })
    }

    /// Whether a family of `size` sets respects this bound. Vacuously true
    /// when not applicable.
    pub fn admits(&self, size: usize) -> bool {
        self.floor().is_none_or(|f| size as i64 <= f)
    }
}

/// Every closed-form upper bound on the largest Oddtown for a given `(l, n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub modulus: u64,
    pub n: u64,
    pub omega: usize,
    /// `omega * n`.
    pub trivial: u64,
    /// `omega*n - omega*log n`, square-free moduli only.
    pub szegedy: Bound,
    /// `omega*n - 2*omega*log n + 11`, needs at least two prime factors.
    pub thm11: Bound,
    /// `omega*n - (2*omega + eps)*log n`, needs two odd prime factors and only
    /// holds asymptotically in `n`.
    pub thm12: Bound,
    #[serde(serialize_with = "exact::ser_big_rational")]
    pub epsilon: BigRational,
}

pub fn bound_table(modulus: u64, n: u64) -> Result<BoundReport> {
    let f = factorize(modulus)?;
    if n == 0 {
        return Err(Error::InvalidArgument("ground set size n must be at least 1".into()));
    }
    let omega = f.omega();
    let w = omega as f64;
    let nf = n as f64;
    let log_n = nf.log2();
    let epsilon = epsilon_of_factorization(&f);

    let szegedy = if f.is_square_free() { Bound::real(w * nf - w * log_n) } else { Bound::NotApplicable };
    let thm11 = if omega >= 2 { Bound::real(w * nf - 2.0 * w * log_n + 11.0) } else { Bound::NotApplicable };
    let thm12 = if f.odd_primes().count() >= 2 {
        let eps = exact::big_rational_to_f64(&epsilon);
        Bound::real(w * nf - (2.0 * w + eps) * log_n)
    } else {
        Bound::NotApplicable
    };

    Ok(BoundReport { modulus, n, omega, trivial: omega as u64 * n, szegedy, thm11, thm12, epsilon })
}

/// Base-2 binary entropy with `H(0) = H(1) = 0`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("entropy argument {q} outside [0, 1]")));
    }
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    Ok(term(q) + term(1.0 - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(prime: u64, exponent: u32) -> PrimePower {
        PrimePower { prime, exponent }
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(12).unwrap();
        assert_eq!(f.factors, vec![pp(2, 2), pp(3, 1)]);
        assert_eq!(f.omega(), 2);
        assert_eq!(factorize(6).unwrap().factors, vec![pp(2, 1), pp(3, 1)]);
        let f = factorize(360).unwrap();
        assert_eq!(f.factors, vec![pp(2, 3), pp(3, 2), pp(5, 1)]);
        assert_eq!(f.omega(), 3);
        assert_eq!(factorize(97).unwrap().factors, vec![pp(97, 1)]);
    }

    #[test]
    fn factorize_rejects_small() {
        assert_eq!(factorize(1), Err(Error::InvalidModulus(1)));
        assert_eq!(factorize(0), Err(Error::InvalidModulus(0)));
    }

    #[test]
    fn factorize_recomposes_exhaustively() {
        for l in 2..=1_000_000u64 {
            let f = factorize(l).unwrap();
            assert_eq!(f.product(), l);
            assert!(f.factors.windows(2).all(|w| w[0].prime < w[1].prime));
            assert!(f.factors.iter().all(|x| x.exponent >= 1));
        }
    }

    #[test]
    fn factors_are_prime() {
        for l in 2..=5000u64 {
            assert!(factorize(l).unwrap().factors.iter().all(|f| is_prime(f.prime)));
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_of(15).unwrap(), rat(1, 500));
        assert_eq!(epsilon_of(105).unwrap(), rat(37, 12250));
        assert_eq!(epsilon_of(12).unwrap(), rat(0, 1));
        assert_eq!(epsilon_of(5).unwrap(), rat(0, 1));
    }

    #[test]
    fn epsilon_positive_iff_two_odd_primes() {
        for l in 2..=3000u64 {
            let f = factorize(l).unwrap();
            let positive = epsilon_of(l).unwrap() > BigRational::zero();
            assert_eq!(positive, f.odd_primes().count() >= 2, "l = {l}");
        }
    }

    #[test]
    fn bound_table_six() {
        let r = bound_table(6, 1024).unwrap();
        assert_eq!(r.trivial, 2048);
        assert_eq!(r.szegedy.floor(), Some(2028));
        assert_eq!(r.thm11.floor(), Some(2019));
        assert_eq!(r.thm12, Bound::NotApplicable);
    }

    #[test]
    fn bound_table_prime_power() {
        let r = bound_table(4, 100).unwrap();
        assert_eq!(r.omega, 1);
        assert_eq!(r.trivial, 100);
        assert!(!r.thm11.is_applicable());
        assert!(!r.thm12.is_applicable());
        assert!(!r.szegedy.is_applicable());
    }

    #[test]
    fn bound_table_fifteen() {
        let n = 1u64 << 20;
        let r = bound_table(15, n).unwrap();
        let expected = 2.0 * n as f64 - (4.0 + 1.0 / 500.0) * 20.0;
        assert!((r.thm12.value().unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn bound_table_rejects_zero_n() {
        assert!(bound_table(6, 0).is_err());
        assert!(bound_table(1, 5).is_err());
    }

    #[test]
    fn bound_relations() {
        for l in [6u64, 10, 12, 15, 30, 36, 105, 210] {
            let f = factorize(l).unwrap();
            for n in [2u64, 3, 10, 100, 1000, 1 << 16] {
                let r = bound_table(l, n).unwrap();
                let t11 = r.thm11.value().unwrap();
                assert!(t11 <= r.trivial as f64 + 11.0 + BOUND_SLACK);
                if f.is_square_free() {
                    assert!(t11 <= r.szegedy.value().unwrap() + 11.0 + BOUND_SLACK);
                }
                if let Some(t12) = r.thm12.value() {
                    let eps = exact::big_rational_to_f64(&r.epsilon);
                    if eps * (n as f64).log2() > 11.0 {
                        assert!(t12 < t11);
                    }
                }
            }
        }
    }

    #[test]
    fn entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let h = binary_entropy(1.0 / 37.0).unwrap();
        assert!((h - 0.17925).abs() < 5e-5, "{h}");
        assert!(1.0 / 36.0 + 37.0 / 36.0 * h <= 0.25);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    proptest::proptest! {
        #[test]
        fn entropy_symmetric(num in 0u32..=1000, den in 1u32..=1000) {
            let q = (num.min(den)) as f64 / den as f64;
            let a = binary_entropy(q).unwrap();
            let b = binary_entropy(1.0 - q).unwrap();
            proptest::prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn entropy_concave(a in 0.0f64..=1.0, b in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            let mid = t * a + (1.0 - t) * b;
            let lhs = binary_entropy(mid).unwrap();
            let rhs = t * binary_entropy(a).unwrap() + (1.0 - t) * binary_entropy(b).unwrap();
            proptest::prop_assert!(lhs + 1e-12 >= rhs);
        }
    }
}
