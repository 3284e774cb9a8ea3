use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set; members are stored as `u64` bitmasks.
pub const MAX_GROUND: usize = 64;

/// A family of distinct subsets of `[n] = {1, ..., n}`.
///
/// Bit `e - 1` of a mask marks element `e`. Sets are kept sorted by mask so
/// that equal families compare equal and every derived output is
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: usize,
    sets: Vec<u64>,
}

/// JSON shape of a family: `{"n": 4, "sets": [[1], [2, 3]]}` with 1-based
/// elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn new(n: usize, mut sets: Vec<u64>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::InvalidFamily(format!("ground set size {n} exceeds {MAX_GROUND}")));
        }
        let universe = ground_mask(n);
        if let Some(s) = sets.iter().find(|&&s| s & !universe != 0) {
            return Err(Error::InvalidFamily(format!("set {:?} is not a subset of [{n}]", mask_elements(*s))));
        }
        sets.sort_unstable();
        if let Some(w) = sets.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidFamily(format!("set {:?} appears twice", mask_elements(w[0]))));
        }
        Ok(Self { n, sets })
    }

    /// Builds a family from 1-based element lists.
    pub fn from_elements(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(sets.len());
        for set in sets {
            let mut mask = 0u64;
            for &e in set {
                if e == 0 || e > n || e > MAX_GROUND {
                    return Err(Error::InvalidFamily(format!("element {e} outside [1, {n}]")));
                }
                let bit = 1u64 << (e - 1);
                if mask & bit != 0 {
                    return Err(Error::InvalidFamily(format!("element {e} repeated in {set:?}")));
                }
                mask |= bit;
            }
            masks.push(mask);
        }
        Self::new(n, masks)
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("empty family is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: u64) -> bool {
        self.sets.binary_search(&set).is_ok()
    }

    /// Subfamily of the sets satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> Self {
        Self { n: self.n, sets: self.sets.iter().copied().filter(|&s| keep(s)).collect() }
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson { n: self.n, sets: self.sets.iter().map(|&s| mask_elements(s)).collect() }
    }

    pub fn from_json(json: &FamilyJson) -> Result<Self> {
        Self::from_elements(json.n, &json.sets)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: FamilyJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

impl Serialize for SetFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

pub fn ground_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// 1-based elements of a mask, increasing.
pub fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}
