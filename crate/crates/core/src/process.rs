//! Shift orbits of a μ-random point: ξ_n is the seed expansion shifted by n-1 digits.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::trial_seed;
use crate::scalar::ExactScalar;
use crate::space::{Cube, DigitSpace, Point, SpaceSpec};

pub const ORBIT_CSV_SCHEMA: &str = "# schema: covset-orbit v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemPreset {
    /// Doubling map on [0,1].
    Base2,
    /// Tripling map on the middle-third Cantor set.
    Base3Cantor,
    /// Full base-m shift.
    BaseMFull(u32),
}

impl SystemPreset {
    pub fn spec(self) -> SpaceSpec {
        let (base, alphabet) = match self {
            SystemPreset::Base2 => (2, vec![0, 1]),
            SystemPreset::Base3Cantor => (3, vec![0, 2]),
            SystemPreset::BaseMFull(m) => (m, (0..m as u8).collect()),
        };
        SpaceSpec { base, alphabet, depth_cap: None }
    }
}

/// Memoized i.i.d. uniform digit stream over the alphabet.
#[derive(Clone, Debug)]
pub struct OrbitSource<Q> {
    space: DigitSpace<Q>,
    seed: u64,
    rng: ChaCha8Rng,
    digits: Vec<u8>,
}

impl<Q: ExactScalar> OrbitSource<Q> {
    pub fn new(space: DigitSpace<Q>, seed: u64) -> Self {
        OrbitSource { space, seed, rng: ChaCha8Rng::seed_from_u64(seed), digits: Vec::new() }
    }

    /// Stream that starts with `prefix` and continues at random.
    pub fn with_prefix(space: DigitSpace<Q>, seed: u64, prefix: &[u8]) -> Result<Self> {
        if prefix.iter().any(|&d| !space.contains_digit(d)) {
            return Err(Error::invalid("prefix digit outside the alphabet"));
        }
        let mut src = Self::new(space, seed);
        src.digits = prefix.to_vec();
        Ok(src)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn space(&self) -> &DigitSpace<Q> {
        &self.space
    }

    fn extend_to(&mut self, len: usize) {
        let alphabet = self.space.alphabet();
        while self.digits.len() < len {
            let d = alphabet[self.rng.gen_range(0..alphabet.len())];
            self.digits.push(d);
        }
    }

    /// Digits of ξ_n truncated to `depth`.
    pub fn orbit_digits(&mut self, n: u64, depth: u32) -> Result<&[u8]> {
        if n == 0 {
            return Err(Error::invalid("orbit index starts at 1"));
        }
        self.space.check_depth(depth)?;
        let start = (n - 1) as usize;
        self.extend_to(start + depth as usize);
        Ok(&self.digits[start..start + depth as usize])
    }

    pub fn orbit_point(&mut self, n: u64, depth: u32) -> Result<Point<Q>> {
        let digits = self.orbit_digits(n, depth)?.to_vec();
        self.space.point(&digits)
    }

    pub fn write_csv<W: Write>(&mut self, n_max: u64, depth: u32, mut out: W) -> Result<()> {
        writeln!(out, "{ORBIT_CSV_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "value", "approx"])?;
        for n in 1..=n_max {
            let p = self.orbit_point(n, depth)?;
            w.write_record([n.to_string(), p.value.to_string(), format!("{:.17}", p.value.to_f64())])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn in_cube(digits: &[u8], cube: &Cube, base: u32) -> bool {
    cube.prefix(base) == digits[..cube.level as usize]
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingRow {
    pub offset: u64,
    /// Trials with ξ_{n+1} in the conditioning cube.
    pub conditioned: u64,
    pub joint: u64,
    /// Unconditional frequency of ξ_1 in A.
    pub frequency_a: f64,
    pub measure_a: f64,
    /// `|P(ξ_1 ∈ A | ξ_{n+1} ∈ D) − μ(A)|`.
    pub estimate: f64,
    /// Three binomial standard deviations at the conditioned sample size.
    pub noise: f64,
}

/// Empirical dependence of `ξ_1 ∈ A` on `ξ_{n+1} ∈ D` over independent seeds.
pub fn mixing_diagnostic<Q: ExactScalar>(
    space: &DigitSpace<Q>,
    master_seed: u64,
    a: &Cube,
    d: &Cube,
    offsets: &[u64],
    trials: usize,
) -> Result<Vec<MixingRow>> {
    if trials < 1000 {
        return Err(Error::invalid("mixing diagnostic needs at least 1000 trials"));
    }
    let m = space.base();
    let measure_a = (space.alphabet().len() as f64).powi(-(a.level as i32));
    let depth = a.level.max(d.level);
    let mut rows: Vec<MixingRow> = offsets
        .iter()
        .map(|&offset| MixingRow {
            offset,
            conditioned: 0,
            joint: 0,
            frequency_a: 0.0,
            measure_a,
            estimate: 0.0,
            noise: 0.0,
        })
        .collect();
    let mut hits_a = 0u64;
    for t in 0..trials {
        let mut src = OrbitSource::new(space.clone(), trial_seed(master_seed, t as u64));
        let first_in_a = in_cube(src.orbit_digits(1, depth)?, a, m);
        hits_a += first_in_a as u64;
        for row in rows.iter_mut() {
            if in_cube(src.orbit_digits(row.offset + 1, depth)?, d, m) {
                row.conditioned += 1;
                row.joint += first_in_a as u64;
            }
        }
    }
    for row in rows.iter_mut() {
        if row.conditioned == 0 {
            return Err(Error::InsufficientSamples { trials });
        }
        let c = row.conditioned as f64;
        row.frequency_a = hits_a as f64 / trials as f64;
        row.estimate = (row.joint as f64 / c - measure_a).abs();
        row.noise = 3.0 * (measure_a * (1.0 - measure_a) / c).sqrt();
    }
    Ok(rows)
}
