use super::{ModMatrix, CONSTRUCTION_BUDGET};
use crate::error::{Error, Result};

/// The `n x 2^n` 0–1 matrix whose columns list `{0,1}^n` in lexicographic
/// order (row 0 is the most significant bit).
pub fn all_columns_matrix(n: usize) -> Result<ModMatrix> {
    all_columns_matrix_within(n, CONSTRUCTION_BUDGET)
}

pub fn all_columns_matrix_within(n: usize, budget: u64) -> Result<ModMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("all-columns matrix needs n >= 1".into()));
    }
    let entries = (n as f64) * 2f64.powi(n as i32);
    if n >= 58 || entries > budget as f64 {
        return Err(Error::budget("all-columns matrix entries", entries, budget));
    }
    Ok(ModMatrix::binary(n, 1 << n, |i, j| (j >> (n - 1 - i)) & 1 == 1))
}

/// The block matrix `[[M_a^T, 0], [0, M_b]]` of shape `(2^a + b) x (a + 2^b)`,
/// where `M_k` is [`all_columns_matrix`]`(k)`. Its rank is `a + b` over every
/// prime field.
pub fn block_construction(a: usize, b: usize) -> Result<ModMatrix> {
    block_construction_within(a, b, CONSTRUCTION_BUDGET)
}

pub fn block_construction_within(a: usize, b: usize, budget: u64) -> Result<ModMatrix> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument("block construction needs a, b >= 1".into()));
    }
    let rows = 2f64.powi(a as i32) + b as f64;
    let cols = a as f64 + 2f64.powi(b as i32);
    if a >= 58 || b >= 58 || rows * cols > budget as f64 {
        return Err(Error::budget("block construction entries", rows * cols, budget));
    }
    let top = all_columns_matrix(a)?.transpose();
    let bottom = all_columns_matrix(b)?;
    let (rows, cols) = (top.rows() + bottom.rows(), top.cols() + bottom.cols());
    Ok(ModMatrix::binary(rows, cols, |i, j| {
        if i < top.rows() {
            j < top.cols() && top.get(i, j) == 1
        } else {
            j >= top.cols() && bottom.get(i - top.rows(), j - top.cols()) == 1
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modlinalg::rank_mod_p;

    #[test]
    fn all_columns_small() {
        assert_eq!(all_columns_matrix(1).unwrap(), ModMatrix::binary(1, 2, |_, j| j == 1));
        let m = all_columns_matrix(2).unwrap();
        assert_eq!(m.row(0), &[0, 0, 1, 1]);
        assert_eq!(m.row(1), &[0, 1, 0, 1]);
        assert_eq!(rank_mod_p(&all_columns_matrix(3).unwrap(), 2).unwrap(), 3);
        assert!(all_columns_matrix(0).is_err());
        assert!(all_columns_matrix_within(20, 1000).is_err());
    }

    #[test]
    fn block_shapes() {
        let m = block_construction(2, 2).unwrap();
        assert_eq!(m.shape(), (6, 6));
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 4);

        let m = block_construction(1, 1).unwrap();
        assert_eq!(m.shape(), (3, 3));
        assert_eq!(m.row(0), &[0, 0, 0]);
        assert_eq!(m.row(1), &[1, 0, 0]);
        assert_eq!(m.row(2), &[0, 0, 1]);
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 2);

        let m = block_construction(2, 3).unwrap();
        assert_eq!(m.shape(), (7, 10));
        for p in [2, 3, 5] {
            assert_eq!(rank_mod_p(&m, p).unwrap(), 5);
        }
        assert!(m.duplicate_rows().is_none());
        assert!(m.duplicate_columns().is_none());
    }

    #[test]
    fn block_errors() {
        assert!(block_construction(0, 2).is_err());
        assert_eq!(block_construction_within(10, 10, 1000).unwrap_err().kind(), crate::ErrorKind::Resource);
    }
}
