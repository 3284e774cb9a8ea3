//! Achievable `(log r / d, log c / d)` points for 0–1 matrices with distinct
//! rows and columns, `d` the rank over `F_p`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modlinalg::{block_construction, rank_mod_p, ModMatrix};
use crate::numtheory::is_prime;
use crate::par;

/// Default cap on the number of matrices visited by an exhaustive scan.
pub const FIGURE_BUDGET: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Scan,
    Block,
}

impl PointKind {
    fn as_str(self) -> &'static str {
        match self {
            PointKind::Scan => "scan",
            PointKind::Block => "block",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigurePoint {
    pub x: f64,
    pub y: f64,
    pub r: usize,
    pub c: usize,
    pub d: usize,
    pub kind: PointKind,
}

impl FigurePoint {
    fn new(r: usize, c: usize, d: usize, kind: PointKind) -> Self {
        let d_f = d as f64;
        FigurePoint { x: (r as f64).log2() / d_f, y: (c as f64).log2() / d_f, r, c, d, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    /// Every set of `r` distinct rows in `{0,1}^c`.
    Exhaustive,
    /// `samples` random matrices per shape.
    Sampled { samples: u64, seed: u64 },
}

fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn rank_of_rows(rows: &[u64], c: usize, p: u64) -> Option<usize> {
    let m = ModMatrix::binary(rows.len(), c, |i, j| rows[i] >> j & 1 == 1);
    m.duplicate_columns().is_none().then(|| rank_mod_p(&m.with_modulus(p).expect("prime"), p).expect("prime"))
}

/// Advances `idx` to the next increasing `k`-subset of `0..n`.
fn next_combination(idx: &mut [u64], n: u64) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - (k - i) as u64 {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// One point per achieved `(r, c, d)` with `r <= max_r`, `c <= max_c`, `d >= 1`.
pub fn figure_region_scan(max_r: usize, max_c: usize, p: u64, mode: ScanMode) -> Result<Vec<FigurePoint>> {
    figure_region_scan_within(max_r, max_c, p, mode, FIGURE_BUDGET)
}

pub fn figure_region_scan_within(
    max_r: usize,
    max_c: usize,
    p: u64,
    mode: ScanMode,
    budget: u64,
) -> Result<Vec<FigurePoint>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if max_r == 0 || max_c == 0 || max_c > 30 {
        return Err(Error::InvalidArgument(format!("need 1 <= max_r and 1 <= max_c <= 30, got {max_r}, {max_c}")));
    }
    let shapes: Vec<(usize, usize)> = (1..=max_r)
        .flat_map(|r| (1..=max_c).map(move |c| (r, c)))
        .filter(|&(r, c)| r as u64 <= 1 << c)
        .collect();
    let found: Vec<BTreeSet<usize>> = match mode {
        ScanMode::Exhaustive => {
            let total: f64 = shapes.iter().map(|&(r, c)| binom(1 << c, r as u64)).sum();
            if total > budget as f64 {
                return Err(Error::budget("matrices in exhaustive scan", total, budget));
            }
            par::map_slice(&shapes, |&(r, c)| {
                let mut ranks = BTreeSet::new();
                let mut rows: Vec<u64> = (0..r as u64).collect();
                loop {
                    if let Some(d) = rank_of_rows(&rows, c, p) {
                        ranks.insert(d);
                    }
                    if !next_combination(&mut rows, 1 << c) {
                        break;
                    }
                }
                ranks
            })
        }
        ScanMode::Sampled { samples, seed } => {
            let total = samples as f64 * shapes.len() as f64;
            if total > budget as f64 {
                return Err(Error::budget("matrices in sampled scan", total, budget));
            }
            let indexed: Vec<(usize, (usize, usize))> = shapes.iter().copied().enumerate().collect();
            par::map_slice(&indexed, |&(k, (r, c))| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let mut ranks = BTreeSet::new();
                for _ in 0..samples {
                    let mut rows = BTreeSet::new();
                    while rows.len() < r {
                        rows.insert(rng.random_range(0..1u64 << c));
                    }
                    let rows: Vec<u64> = rows.into_iter().collect();
                    if let Some(d) = rank_of_rows(&rows, c, p) {
                        ranks.insert(d);
                    }
                }
                ranks
            })
        }
    };
    Ok(shapes
        .iter()
        .zip(found)
        .flat_map(|(&(r, c), ranks)| {
            ranks.into_iter().filter(|&d| d > 0).map(move |d| FigurePoint::new(r, c, d, PointKind::Scan))
        })
        .collect())
}

/// Points of the block construction for `1 <= a, b <= max_block`, with the
/// rank recomputed over `F_p`.
pub fn block_points(max_block: usize, p: u64) -> Result<Vec<FigurePoint>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut points = Vec::new();
    for a in 1..=max_block {
        for b in 1..=max_block {
            let m = block_construction(a, b)?;
            let d = rank_mod_p(&m.with_modulus(p)?, p)?;
            debug_assert_eq!(d, a + b);
            points.push(FigurePoint::new(m.rows(), m.cols(), d, PointKind::Block));
        }
    }
    Ok(points)
}

/// `x,y,r,c,d,kind` rows with shortest round-trip decimals.
pub fn figure_csv(points: &[FigurePoint]) -> String {
    let mut out = String::from("x,y,r,c,d,kind\n");
    for pt in points {
        out.push_str(&format!("{},{},{},{},{},{}\n", pt.x, pt.y, pt.r, pt.c, pt.d, pt.kind.as_str()));
    }
    out
}
