//! Targets G given as digit-restriction trees: level j keeps the digits `D_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::space::{Cube, DigitSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// G = X.
    Full,
    /// Middle-third Cantor set; needs base 3.
    Cantor,
    /// Alphabets repeated cyclically: level j uses `pattern[(j-1) % len]`.
    Pattern { pattern: Vec<Vec<u8>> },
    /// Level j keeps the first `sizes[(j-1) % len]` digits of the space alphabet.
    Moran { sizes: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSet {
    base: u32,
    pattern: Vec<Vec<u8>>,
}

impl TargetSet {
    pub fn new<Q: ExactScalar>(space: &DigitSpace<Q>, pattern: Vec<Vec<u8>>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::invalid("target pattern needs at least one level"));
        }
        let mut pattern = pattern;
        for level in pattern.iter_mut() {
            level.sort_unstable();
            level.dedup();
            if level.iter().any(|&d| !space.contains_digit(d)) {
                return Err(Error::invalid("target digit outside the space alphabet"));
            }
        }
        Ok(TargetSet { base: space.base(), pattern })
    }

    pub fn full<Q: ExactScalar>(space: &DigitSpace<Q>) -> Self {
        TargetSet { base: space.base(), pattern: vec![space.alphabet().to_vec()] }
    }

    pub fn from_spec<Q: ExactScalar>(spec: &TargetSpec, space: &DigitSpace<Q>) -> Result<Self> {
        match spec {
            TargetSpec::Full => Ok(Self::full(space)),
            TargetSpec::Cantor => {
                if space.base() != 3 {
                    return Err(Error::invalid("the Cantor target needs base 3"));
                }
                Self::new(space, vec![vec![0, 2]])
            }
            TargetSpec::Pattern { pattern } => Self::new(space, pattern.clone()),
            TargetSpec::Moran { sizes } => {
                let alphabet = space.alphabet();
                if sizes.iter().any(|&n| n > alphabet.len()) {
                    return Err(Error::invalid("Moran size exceeds the alphabet"));
                }
                Self::new(space, sizes.iter().map(|&n| alphabet[..n].to_vec()).collect())
            }
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Alphabet `D_j` for level `j ≥ 1`.
    pub fn digits_at(&self, j: u32) -> &[u8] {
        &self.pattern[(j as usize - 1) % self.pattern.len()]
    }

    /// Whether the cube survives in the tree, i.e. meets G in its interior.
    pub fn contains_cube(&self, cube: &Cube) -> bool {
        cube.prefix(self.base)
            .iter()
            .enumerate()
            .all(|(i, d)| self.digits_at(i as u32 + 1).binary_search(d).is_ok())
    }

    /// `N_k = Π_{j≤k} |D_j|`.
    pub fn count_at(&self, k: u32) -> u64 {
        (1..=k).map(|j| self.digits_at(j).len() as u64).product()
    }

    pub fn is_empty_at(&self, k: u32) -> bool {
        (1..=k).any(|j| self.digits_at(j).is_empty())
    }

    /// Surviving cubes at level k in index order.
    pub fn cubes_at(&self, k: u32) -> Vec<Cube> {
        let mut level = vec![Cube::ROOT];
        for j in 1..=k {
            let digits = self.digits_at(j);
            level = level.iter().flat_map(|c| digits.iter().map(move |&d| c.child(self.base, d))).collect();
        }
        level
    }

    /// `(Σ_{j≤k} log|D_j|) / (k log m)`.
    pub fn cesaro_exponent(&self, k: u32) -> f64 {
        if self.is_empty_at(k) {
            return f64::NEG_INFINITY;
        }
        let total: f64 = (1..=k).map(|j| (self.digits_at(j).len() as f64).ln()).sum();
        total / (k as f64 * (self.base as f64).ln())
    }

    /// Exponent averaged over one period of the pattern.
    pub fn period_dimension(&self) -> f64 {
        self.cesaro_exponent(self.pattern.len() as u32)
    }

    /// Lower and upper Cesàro proxies over levels `⌈k/2⌉..=k`: (dim_H, dim_P).
    pub fn dims(&self, k: u32) -> (f64, f64) {
        if self.is_empty_at(k) {
            return (f64::NEG_INFINITY, f64::NEG_INFINITY);
        }
        let values: Vec<f64> = (k.div_ceil(2).max(1)..=k).map(|j| self.cesaro_exponent(j)).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}
