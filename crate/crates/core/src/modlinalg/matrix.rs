use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::arith::reduce_signed;
use crate::error::{Error, Result};

/// Dense row-major matrix with entries reduced into `[0, modulus)`.
///
/// 0–1 matrices built by this crate (incidence matrices, constructions) carry
/// modulus 2; rank routines reinterpret the integer entries modulo whatever
/// prime they are asked about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl ModMatrix {
    /// Builds a matrix from row-major data, reducing every entry mod `modulus`.
    pub fn new(rows: usize, cols: usize, modulus: u64, data: Vec<u64>) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        let data = data.into_iter().map(|x| x % modulus).collect();
        Ok(Self { rows, cols, modulus, data })
    }

    pub fn from_signed(rows: usize, cols: usize, modulus: u64, data: &[i64]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidModulus(modulus));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        let data = data.iter().map(|&x| reduce_signed(x, modulus)).collect();
        Ok(Self { rows, cols, modulus, data })
    }

    /// Builds a `rows.len() x cols` matrix; every row must have `cols` entries.
    pub fn from_rows(modulus: u64, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, modulus, data)
    }

    /// # Panics
    /// If `modulus < 2`.
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        Self { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    /// # Panics
    /// If `modulus < 2`.
    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// A 0–1 matrix (modulus 2) whose `(i, j)` entry is `bit(i, j)`.
    pub fn binary(rows: usize, cols: usize, bit: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(bit(i, j) as u64);
            }
        }
        Self { rows, cols, modulus: 2, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: u64) {
        self.data[i * self.cols + j] = value % self.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Same integer entries reinterpreted modulo `modulus`.
    pub fn with_modulus(&self, modulus: u64) -> Result<Self> {
        Self::new(self.rows, self.cols, modulus, self.data.clone())
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(cols.iter().map(|&j| row[j]));
        }
        Self { rows: self.rows, cols: cols.len(), modulus: self.modulus, data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: rows.len(), cols: self.cols, modulus: self.modulus, data }
    }

    /// Checks that every entry is 0 or 1.
    pub fn ensure_binary(&self) -> Result<()> {
        for i in 0..self.rows {
            for (j, &value) in self.row(i).iter().enumerate() {
                if value > 1 {
                    return Err(Error::NotBinary { row: i, col: j, value });
                }
            }
        }
        Ok(())
    }

    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&x| x <= 1)
    }

    /// First pair `(i, j)`, `i < j`, of equal rows.
    pub fn duplicate_rows(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<&[u64], usize> = HashMap::with_capacity(self.rows);
        for i in 0..self.rows {
            if let Some(&first) = seen.get(self.row(i)) {
                return Some((first, i));
            }
            seen.insert(self.row(i), i);
        }
        None
    }

    /// First pair `(i, j)`, `i < j`, of equal columns.
    pub fn duplicate_columns(&self) -> Option<(usize, usize)> {
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(self.cols);
        for j in 0..self.cols {
            let col = self.column(j);
            if let Some(&first) = seen.get(&col) {
                return Some((first, j));
            }
            seen.insert(col, j);
        }
        None
    }

    pub fn ensure_distinct_columns(&self) -> Result<()> {
        match self.duplicate_columns() {
            Some((a, b)) => Err(Error::DuplicateColumns(a, b)),
            None => Ok(()),
        }
    }

    /// Serializes to the matrix CSV format: a `# mod m rows r cols c` header
    /// followed by one comma-separated line per row.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# mod {} rows {} cols {}\n", self.modulus, self.rows, self.cols);
        for row in self.row_iter() {
            let mut first = true;
            for x in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{x}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the matrix CSV format. Entries may be any decimal integers and are
    /// reduced modulo the header's modulus.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let (modulus, rows, cols) = parse_header(header)?;
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen_rows = 0;
        for (k, line) in lines.enumerate() {
            let before = data.len();
            for field in line.split(',') {
                let x: i64 = field
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: bad entry {field:?}", k + 1)))?;
                data.push(x);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!("row {} has {} entries, expected {cols}", k + 1, data.len() - before)));
            }
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(Error::Parse(format!("header declares {rows} rows, found {seen_rows}")));
        }
        Self::from_signed(rows, cols, modulus, &data)
    }
}

fn parse_header(line: &str) -> Result<(u64, usize, usize)> {
    let bad = || Error::Parse(format!("bad matrix header {line:?}, expected `# mod m rows r cols c`"));
    let fields: Vec<&str> = line.trim_start_matches('#').split_whitespace().collect();
    match fields.as_slice() {
        ["mod", m, "rows", r, "cols", c] => Ok((
            m.parse().map_err(|_| bad())?,
            r.parse().map_err(|_| bad())?,
            c.parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}
