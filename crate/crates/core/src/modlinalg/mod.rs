//! Exact linear algebra over `F_p` and `Z/p^a Z`.
//!
//! No floating point anywhere in this module. Pivots are chosen as the first
//! nonzero entry scanning columns left to right and rows top to bottom; pivot
//! columns are reported, never permuted into place.

mod arith;
mod construct;
mod matrix;
mod ortho;

pub use arith::{add_mod, dot_mod, inv_mod, mul_mod, reduce_signed, sub_mod};
pub use construct::{all_columns_matrix, all_columns_matrix_within, block_construction, block_construction_within};
pub use matrix::ModMatrix;
pub use ortho::{lemma21_verify, normalize_instance, Lemma21Report, NormalizedInstance, OrthoInstance};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::is_prime;
use crate::par;

/// Default cap on `p^rank` for [`count_01_in_rowspace`].
pub const ROWSPACE_BUDGET: u64 = 10_000_000;

/// Default cap on the number of entries of constructed matrices.
pub const CONSTRUCTION_BUDGET: u64 = 1 << 24;

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rref {
    pub matrix: ModMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Row-reduces `m` over `F_p`. Entries are read as integers and reduced mod `p`.
pub fn rref_mod_p(m: &ModMatrix, p: u64) -> Result<Rref> {
    check_prime(p)?;
    let mut a = m.with_modulus(p)?;
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(src) = (r..rows).find(|&i| a.get(i, c) != 0) else {
            continue;
        };
        if src != r {
            for j in 0..cols {
                let (x, y) = (a.get(r, j), a.get(src, j));
                a.set(r, j, y);
                a.set(src, j, x);
            }
        }
        let inv = inv_mod(a.get(r, c), p).expect("nonzero element of a prime field is invertible");
        for j in c..cols {
            let x = mul_mod(a.get(r, j), inv, p);
            a.set(r, j, x);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c);
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let x = sub_mod(a.get(i, j), mul_mod(factor, a.get(r, j), p), p);
                a.set(i, j, x);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(Rref { matrix: a, pivots })
}

pub fn rank_mod_p(m: &ModMatrix, p: u64) -> Result<usize> {
    Ok(rref_mod_p(m, p)?.rank())
}

/// Number of 0–1 vectors in the row space of `m` over `F_p`, found by walking
/// every vector of the row space.
pub fn count_01_in_rowspace(m: &ModMatrix, p: u64) -> Result<u64> {
    count_01_in_rowspace_within(m, p, ROWSPACE_BUDGET)
}

pub fn count_01_in_rowspace_within(m: &ModMatrix, p: u64, budget: u64) -> Result<u64> {
    let rref = rref_mod_p(m, p)?;
    let d = rref.rank();
    let total = (p as u128).checked_pow(d as u32).filter(|&t| t <= budget as u128);
    let Some(total) = total else {
        return Err(Error::budget("row space enumeration (p^rank)", (p as f64).powi(d as i32), budget));
    };
    let total = total as u64;
    let basis: Vec<&[u64]> = (0..d).map(|i| rref.matrix.row(i)).collect();
    let cols = m.cols();

    let count = par::fold_chunks(
        0..total,
        1 << 12,
        || (0u64, vec![0u64; cols]),
        |(count, scratch), index| {
            scratch.iter_mut().for_each(|x| *x = 0);
            let mut rest = index;
            for row in &basis {
                let coeff = rest % p;
                rest /= p;
                if coeff != 0 {
                    for (s, &x) in scratch.iter_mut().zip(row.iter()) {
                        *s = add_mod(*s, mul_mod(coeff, x, p), p);
                    }
                }
            }
            if scratch.iter().all(|&x| x <= 1) {
                *count += 1;
            }
        },
        |(a, s), (b, _)| (a + b, s),
    )
    .0;
    assert!(count <= 1u64 << d.min(63), "row space of rank {d} holds {count} 0-1 vectors");
    Ok(count)
}

/// A basis of the row space of a 0–1 matrix whose restriction to
/// `pivot_cols` is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowSpaceBasis {
    /// `d x c` matrix over `F_p`, `d` the rank.
    pub basis: ModMatrix,
    pub pivot_cols: Vec<usize>,
    /// For each input row, the 0–1 vector `v` with `row = v^T basis`.
    pub coefficients: Vec<Vec<u8>>,
}

impl RowSpaceBasis {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

/// Normalizes the row space of a 0–1 matrix with distinct rows so that the
/// basis is the identity on its pivot columns; every original row is then a
/// 0–1 combination of basis rows.
pub fn row_space_normalize(m: &ModMatrix, p: u64) -> Result<RowSpaceBasis> {
    check_prime(p)?;
    m.ensure_binary()?;
    if let Some((a, b)) = m.duplicate_rows() {
        return Err(Error::DuplicateRows(a, b));
    }
    let rref = rref_mod_p(m, p)?;
    let d = rref.rank();
    let idx: Vec<usize> = (0..d).collect();
    let basis = rref.matrix.select_rows(&idx);
    let pivot_cols = rref.pivots;

    for (s, &col) in pivot_cols.iter().enumerate() {
        for t in 0..d {
            assert_eq!(basis.get(t, col), (s == t) as u64, "basis is not the identity on pivot columns");
        }
    }

    let mut coefficients = Vec::with_capacity(m.rows());
    for row in m.row_iter() {
        let v: Vec<u8> = pivot_cols.iter().map(|&c| row[c] as u8).collect();
        let mut combo = vec![0u64; m.cols()];
        for (t, &bit) in v.iter().enumerate() {
            if bit == 1 {
                for (x, &b) in combo.iter_mut().zip(basis.row(t)) {
                    *x = add_mod(*x, b, p);
                }
            }
        }
        let reduced: Vec<u64> = row.iter().map(|&x| x % p).collect();
        assert_eq!(combo, reduced, "row is not a 0-1 combination of the normalized basis");
        coefficients.push(v);
    }

    if m.duplicate_columns().is_none() {
        assert!(basis.duplicate_columns().is_none(), "row operations merged distinct columns");
    }
    Ok(RowSpaceBasis { basis, pivot_cols, coefficients })
}
