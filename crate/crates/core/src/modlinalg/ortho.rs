//! Orthogonality configurations modulo a prime power and the dimension bound
//! on the isotropic part.
//!
//! An instance is a list `u_1..u_{n-k}` of vectors with non-isotropic,
//! pairwise orthogonal members, plus vectors `v_1..v_m` orthogonal to each
//! other, to themselves and to every `u_i`, all modulo `p^a`. The span of the
//! `v_j mod p` then has dimension at most `k/2`.

use serde::Serialize;

use super::arith::{dot_mod, inv_mod, mul_mod, reduce_signed, sub_mod};
use super::{rank_mod_p, ModMatrix};
use crate::error::{Error, Result};
use crate::numtheory::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthoInstance {
    p: u64,
    alpha: u32,
    n: usize,
    u: Vec<Vec<i64>>,
    v: Vec<Vec<i64>>,
}

impl OrthoInstance {
    /// Validates the shape and every congruence; the error names the first
    /// violated condition (indices 1-based).
    pub fn new(p: u64, alpha: u32, n: usize, u: Vec<Vec<i64>>, v: Vec<Vec<i64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if alpha == 0 {
            return Err(Error::InvalidInstance("exponent must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(alpha).filter(|&q| q < 1 << 62);
        if q.is_none() {
            return Err(Error::InvalidInstance(format!("{p}^{alpha} is too large")));
        }
        if u.len() > n {
            return Err(Error::InvalidInstance(format!("{} u-vectors exceed dimension n = {n}", u.len())));
        }
        for (name, vs) in [("u", &u), ("v", &v)] {
            if let Some((i, x)) = vs.iter().enumerate().find(|(_, x)| x.len() != n) {
                return Err(Error::InvalidInstance(format!("{name}_{} has length {}, expected {n}", i + 1, x.len())));
            }
        }
        let inst = Self { p, alpha, n, u, v };
        inst.check_congruences()?;
        Ok(inst)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> &[Vec<i64>] {
        &self.u
    }

    pub fn v(&self) -> &[Vec<i64>] {
        &self.v
    }

    /// `n - |U|`.
    pub fn k(&self) -> usize {
        self.n - self.u.len()
    }

    /// `p^alpha`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.alpha)
    }

    fn residues(&self, vs: &[Vec<i64>]) -> Vec<Vec<u64>> {
        let q = self.modulus();
        vs.iter().map(|x| x.iter().map(|&e| reduce_signed(e, q)).collect()).collect()
    }

    fn check_congruences(&self) -> Result<()> {
        let q = self.modulus();
        let u = self.residues(&self.u);
        let v = self.residues(&self.v);
        let fail = |what: String, value: u64| Err(Error::InvalidInstance(format!("{what} = {value} (mod {q})")));
        for (i, a) in u.iter().enumerate() {
            let s = dot_mod(a, a, q);
            if s == 0 {
                return fail(format!("u_{0}.u_{0} must be nonzero but", i + 1), s);
            }
            for (j, b) in u.iter().enumerate().skip(i + 1) {
                let s = dot_mod(a, b, q);
                if s != 0 {
                    return fail(format!("u_{}.u_{} must vanish but", i + 1, j + 1), s);
                }
            }
            for (j, b) in v.iter().enumerate() {
                let s = dot_mod(a, b, q);
                if s != 0 {
                    return fail(format!("u_{}.v_{} must vanish but", i + 1, j + 1), s);
                }
            }
        }
        for (i, a) in v.iter().enumerate() {
            for (j, b) in v.iter().enumerate().skip(i) {
                let s = dot_mod(a, b, q);
                if s != 0 {
                    return fail(format!("v_{}.v_{} must vanish but", i + 1, j + 1), s);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma21Report {
    /// Dimension over `F_p` of the span of the `v_j mod p`.
    pub dim: usize,
    pub k: usize,
    /// `dim <= k/2`.
    pub holds: bool,
}

/// Computes the dimension of the isotropic span by rank over `F_p`.
///
/// A valid instance always satisfies the bound; debug builds panic if it does
/// not.
pub fn lemma21_verify(inst: &OrthoInstance) -> Result<Lemma21Report> {
    let rows: Vec<Vec<u64>> = inst.v.iter().map(|x| x.iter().map(|&e| reduce_signed(e, inst.p)).collect()).collect();
    let m = ModMatrix::from_rows(inst.p, inst.n, &rows)?;
    let dim = rank_mod_p(&m, inst.p)?;
    let k = inst.k();
    let holds = 2 * dim <= k;
    debug_assert!(holds, "dimension bound violated: dim {dim} > k/2 = {k}/2 for a valid instance");
    Ok(Lemma21Report { dim, k, holds })
}

/// An instance rewritten by the three dimension-preserving moves (adding a
/// `v_j`, scaling by a unit, adding multiples of `p^a`) into normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizedInstance {
    pub modulus: u64,
    /// Coordinate `pivot_coords[s]` of `v[t]` is `1` if `s = t`, else `0`.
    pub pivot_coords: Vec<usize>,
    /// Coordinates outside `pivot_coords`, increasing.
    pub rest_coords: Vec<usize>,
    /// Basis of the isotropic part, residues mod `p^a`, full length `n`.
    pub v: Vec<Vec<u64>>,
    /// The `u_i` with every pivot coordinate cleared, full length `n`.
    pub u: Vec<Vec<u64>>,
    /// Projections of `v` and `u` onto `rest_coords`.
    pub v_rest: Vec<Vec<u64>>,
    pub u_rest: Vec<Vec<u64>>,
}

/// Replays the normalization moves over `Z/p^a Z`.
///
/// The vectors `v_j` whose reductions mod `p` are dependent are discarded; the
/// rest are eliminated using unit pivots so that they restrict to the
/// identity on `pivot_coords`. Each `u_i` then has its pivot coordinates
/// cleared by subtracting multiples of the `v_s`.
pub fn normalize_instance(inst: &OrthoInstance) -> NormalizedInstance {
    let p = inst.p;
    let q = inst.modulus();
    let n = inst.n;
    let mut rows = inst.residues(&inst.v);
    let mut pivot_rows: Vec<usize> = Vec::new();
    let mut pivot_coords = Vec::new();

    for col in 0..n {
        let Some(r) = (0..rows.len()).find(|r| !pivot_rows.contains(r) && !rows[*r][col].is_multiple_of(p)) else {
            continue;
        };
        let inv = inv_mod(rows[r][col], q).expect("entries coprime to p are units mod p^a");
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x, inv, q);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (x, &y) in row.iter_mut().zip(&pivot) {
                *x = sub_mod(*x, mul_mod(factor, y, q), q);
            }
        }
        pivot_rows.push(r);
        pivot_coords.push(col);
    }

    let v: Vec<Vec<u64>> = pivot_rows.iter().map(|&r| rows[r].clone()).collect();
    let mut u = inst.residues(&inst.u);
    for ui in u.iter_mut() {
        for (vs, &col) in v.iter().zip(&pivot_coords) {
            let factor = ui[col];
            if factor != 0 {
                for (x, &y) in ui.iter_mut().zip(vs) {
                    *x = sub_mod(*x, mul_mod(factor, y, q), q);
                }
            }
        }
    }

    let rest_coords: Vec<usize> = (0..n).filter(|c| !pivot_coords.contains(c)).collect();
    let project = |xs: &[Vec<u64>]| -> Vec<Vec<u64>> {
        xs.iter().map(|x| rest_coords.iter().map(|&c| x[c]).collect()).collect()
    };
    NormalizedInstance {
        modulus: q,
        v_rest: project(&v),
        u_rest: project(&u),
        pivot_coords,
        rest_coords,
        v,
        u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vec<i64> {
        let mut x = vec![0; n];
        x[i] = 1;
        x
    }

    #[test]
    fn empty_v() {
        let inst = OrthoInstance::new(3, 1, 2, vec![vec![1, 0]], vec![]).unwrap();
        let r = lemma21_verify(&inst).unwrap();
        assert_eq!(r, Lemma21Report { dim: 0, k: 1, holds: true });
    }

    #[test]
    fn single_isotropic_vector() {
        let u = vec![e(5, 2), e(5, 3), e(5, 4)];
        let inst = OrthoInstance::new(5, 1, 5, u, vec![vec![1, 2, 0, 0, 0]]).unwrap();
        let r = lemma21_verify(&inst).unwrap();
        assert_eq!(r, Lemma21Report { dim: 1, k: 2, holds: true });
    }

    #[test]
    fn violated_condition_is_reported() {
        let u = vec![e(5, 2), e(5, 3), e(5, 4), vec![1, 1, 0, 0, 0]];
        let err = OrthoInstance::new(5, 1, 5, u, vec![vec![1, 2, 0, 0, 0]]).unwrap_err();
        match err {
            Error::InvalidInstance(msg) => assert!(msg.contains("u_4.v_1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_errors() {
        assert!(OrthoInstance::new(4, 1, 1, vec![], vec![]).is_err());
        assert!(OrthoInstance::new(3, 0, 1, vec![], vec![]).is_err());
        assert!(OrthoInstance::new(3, 1, 1, vec![vec![1], vec![1]], vec![]).is_err());
        assert!(OrthoInstance::new(3, 1, 2, vec![vec![1]], vec![]).is_err());
        // u.u = 3 vanishes mod 3
        assert!(OrthoInstance::new(3, 1, 3, vec![vec![1, 1, 1]], vec![]).is_err());
        // v.v = 2 does not vanish
        assert!(OrthoInstance::new(3, 1, 2, vec![], vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn prime_power_instance() {
        // 1 + 7^2 = 50 vanishes mod 25; (1,7) is isotropic over Z/25
        let v = vec![vec![1, 7, 0], vec![2, 14, 0], vec![25, 0, 0]];
        let inst = OrthoInstance::new(5, 2, 3, vec![e(3, 2)], v).unwrap();
        let r = lemma21_verify(&inst).unwrap();
        assert_eq!(r, Lemma21Report { dim: 1, k: 2, holds: true });
        let norm = normalize_instance(&inst);
        assert_eq!(norm.pivot_coords, vec![0]);
        assert_eq!(norm.v, vec![vec![1, 7, 0]]);
        assert_eq!(norm.v_rest, vec![vec![7, 0]]);
        assert_eq!(dot_mod(&norm.v_rest[0], &norm.v_rest[0], 25), 24);
    }

    #[test]
    fn large_entries_are_exact() {
        let big = 3i64.pow(30);
        let inst = OrthoInstance::new(3, 2, 4, vec![vec![1 + big, 0, 0, 0]], vec![vec![0, big, 0, -big]]).unwrap();
        assert_eq!(lemma21_verify(&inst).unwrap().dim, 0);
    }
}
