//! Exact-number helpers shared by the report types: rationals render as
//! `"num/den"` strings, complex values as `[re, im]` pairs.

use std::fmt::Display;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn ratio_string<T: Clone + Display + num_traits::One + PartialEq>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ser_ratio<S, T>(r: &Ratio<T>, s: S) -> std::result::Result<S::Ok, S::Error>
where
    S: Serializer,
    T: Clone + Display + num_traits::One + PartialEq,
{
    s.serialize_str(&ratio_string(r))
}

pub fn ser_big_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

pub fn ser_complex_vec<S: Serializer>(zs: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

pub fn big_rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = text.split_once('/') {
        let n = i64::from_str(n.trim()).map_err(|_| bad())?;
        let d = i64::from_str(d.trim()).map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" { 0 } else { i64::from_str(int).map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let frac_part = i64::from_str(frac).map_err(|_| bad())?;
        let num = int_part.abs() * den + frac_part;
        return Ok(Rational::new(if negative { -num } else { num }, den));
    }
    i64::from_str(text).map(Rational::from_integer).map_err(|_| bad())
}
