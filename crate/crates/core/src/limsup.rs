//! Limsup random fractals built from independently retained cubes, and
//! fractal percolation.
//!
//! Retention indicators are drawn from counter-addressed uniforms keyed by
//! (level, cube or group index), so sampling only the cubes of G gives the
//! same indicators as sampling the whole level.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{hit_probability, HitProbability};
use crate::rng::{trial_seed, CounterUniform};
use crate::scalar::ExactScalar;
use crate::space::{cubes_at_level, Cube, DigitSpace};
use crate::target::TargetSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProbabilityField {
    /// `P_n(Q) = m^(-n γ)`.
    Constant { gamma: f64 },
    /// `m^(-n γ1)` on cubes whose last digit is the smallest letter,
    /// `m^(-n γ2)` on the rest.
    TwoLevel { gamma1: f64, gamma2: f64 },
}

impl ProbabilityField {
    /// (γ1, γ2): largest and smallest exponent.
    pub fn exponents(&self) -> (f64, f64) {
        match *self {
            ProbabilityField::Constant { gamma } => (gamma, gamma),
            ProbabilityField::TwoLevel { gamma1, gamma2 } => (gamma1, gamma2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Dependence {
    Independent,
    /// Consecutive siblings, `size` at a time, share one uniform.
    SiblingGroups { size: u32 },
}

#[derive(Clone, Debug)]
pub struct LimsupModel<Q> {
    pub space: DigitSpace<Q>,
    pub depth: u32,
    pub field: ProbabilityField,
    pub dependence: Dependence,
    /// Count a retained cube as a hit when its doubled interval meets a cube of G.
    pub doubled: bool,
}

impl<Q: ExactScalar> LimsupModel<Q> {
    pub fn new(space: DigitSpace<Q>, depth: u32, field: ProbabilityField) -> Result<Self> {
        space.check_depth(depth)?;
        let (g1, g2) = field.exponents();
        if !(g2 >= 0.0 && g1 >= g2 && g1.is_finite()) {
            return Err(Error::invalid("exponents must satisfy 0 <= gamma2 <= gamma1"));
        }
        Ok(LimsupModel { space, depth, field, dependence: Dependence::Independent, doubled: false })
    }

    pub fn with_dependence(mut self, dependence: Dependence) -> Result<Self> {
        if let Dependence::SiblingGroups { size } = dependence {
            if size == 0 || self.space.alphabet().len() % size as usize != 0 {
                return Err(Error::UnsupportedModel(format!(
                    "sibling groups of {size} do not tile an alphabet of {}",
                    self.space.alphabet().len()
                )));
            }
        }
        self.dependence = dependence;
        Ok(self)
    }

    pub fn with_doubling(mut self, doubled: bool) -> Self {
        self.doubled = doubled;
        self
    }

    fn exponent_of(&self, cube: &Cube) -> f64 {
        match self.field {
            ProbabilityField::Constant { gamma } => gamma,
            ProbabilityField::TwoLevel { gamma1, gamma2 } => {
                if cube.last_digit(self.space.base()) == Some(self.space.alphabet()[0]) {
                    gamma1
                } else {
                    gamma2
                }
            }
        }
    }

    /// `P_n(Q)` for a level-n cube.
    pub fn probability(&self, cube: &Cube) -> f64 {
        (self.space.base() as f64).powf(-(cube.level as f64) * self.exponent_of(cube))
    }

    /// Min and max of `-log_m P_n(Q) / n` over the level-n cubes.
    pub fn exponent_range(&self, n: u32) -> (f64, f64) {
        let m = self.space.base();
        let ln_m = (m as f64).ln();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &d in self.space.alphabet() {
            let cube = Cube { level: n, index: d as u64 };
            let e = -self.probability(&cube).ln() / ln_m / n as f64;
            lo = lo.min(e);
            hi = hi.max(e);
        }
        (lo, hi)
    }

    /// Address of the uniform that drives `Z_n(Q)`.
    fn draw_index(&self, cube: &Cube) -> u64 {
        match self.dependence {
            Dependence::Independent => cube.index,
            Dependence::SiblingGroups { size } => {
                let m = self.space.base() as u64;
                let pos = self.space.alphabet().iter().position(|&d| d as u64 == cube.index % m).unwrap_or(0) as u64;
                let groups = self.space.alphabet().len() as u64 / size as u64;
                (cube.index / m) * groups + pos / size as u64
            }
        }
    }

    /// `Z_n(Q)` for each cube, all from the stream of `seed`.
    pub fn retained(&self, cubes: &[Cube], seed: u64) -> Vec<bool> {
        let mut u = CounterUniform::new(seed);
        cubes.iter().map(|c| u.uniform(c.level as u64, self.draw_index(c)) < self.probability(c)).collect()
    }

    /// Covariance of two indicators under the declared joint law.
    fn covariance(&self, a: &Cube, b: &Cube) -> f64 {
        let (pa, pb) = (self.probability(a), self.probability(b));
        if a.level == b.level && self.draw_index(a) == self.draw_index(b) {
            pa.min(pb) - pa * pb
        } else {
            0.0
        }
    }
}

/// Candidate cubes whose retention counts as meeting G at level n.
fn hit_candidates<Q: ExactScalar>(model: &LimsupModel<Q>, g: &TargetSet, n: u32) -> Vec<Cube> {
    let g_cubes = g.cubes_at(n);
    if !model.doubled {
        return g_cubes;
    }
    let m = model.space.base() as u64;
    let top = m.pow(n);
    let mut ids: Vec<u64> = g_cubes
        .iter()
        .flat_map(|c| [c.index.wrapping_sub(1), c.index, c.index + 1])
        .filter(|&i| i < top)
        .filter(|&i| Cube { level: n, index: i }.prefix(m as u32).iter().all(|&d| model.space.contains_digit(d)))
        .collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter().map(|index| Cube { level: n, index }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LimsupHits {
    pub estimate: HitProbability,
    pub flags: Vec<bool>,
    pub seeds: Vec<u64>,
    /// Retained candidate cubes per trial and level `1..=N`.
    pub survivors: Vec<Vec<u64>>,
}

/// Retained cubes of G per level `1..=N` for one seed.
pub fn limsup_stage_counts<Q: ExactScalar>(model: &LimsupModel<Q>, g: &TargetSet, seed: u64) -> Vec<u64> {
    (1..=model.depth)
        .map(|n| model.retained(&hit_candidates(model, g, n), seed).iter().filter(|&&z| z).count() as u64)
        .collect()
}

pub fn sample_limsup_hits<Q: ExactScalar>(
    model: &LimsupModel<Q>,
    g: &TargetSet,
    trials: usize,
    master_seed: u64,
    k_min: u32,
) -> Result<LimsupHits> {
    if trials < 100 {
        return Err(Error::invalid("limsup hitting needs at least 100 trials"));
    }
    if g.is_empty_at(model.depth) {
        return Err(Error::DegenerateTarget { depth: model.depth });
    }
    if k_min < 1 || k_min > model.depth {
        return Err(Error::invalid("tail window outside the sampled levels"));
    }
    let candidates: Vec<Vec<Cube>> = (1..=model.depth).map(|n| hit_candidates(model, g, n)).collect();
    let seeds: Vec<u64> = (0..trials as u64).map(|t| trial_seed(master_seed, t)).collect();
    let survivors: Vec<Vec<u64>> = seeds
        .par_iter()
        .map(|&seed| {
            candidates.iter().map(|c| model.retained(c, seed).iter().filter(|&&z| z).count() as u64).collect()
        })
        .collect();
    let flags: Vec<bool> = survivors.iter().map(|s| s[k_min as usize - 1..].iter().all(|&c| c > 0)).collect();
    Ok(LimsupHits { estimate: hit_probability(&flags)?, flags, seeds, survivors })
}

/// `f(n, ε)`: the cube itself plus the level-n cubes whose covariance with it
/// reaches `ε P P'`, maximized over cubes.
pub fn correlation_profile<Q: ExactScalar>(model: &LimsupModel<Q>, eps: f64, n: u32) -> Result<u64> {
    if !(eps > 0.0) || n == 0 {
        return Err(Error::invalid("need eps > 0 and n >= 1"));
    }
    match model.dependence {
        Dependence::Independent => Ok(1),
        Dependence::SiblingGroups { .. } => {
            // One parent suffices: the joint law of siblings is the same under every parent.
            let m = model.space.base();
            let parent = Cube { level: n - 1, index: 0 };
            let siblings: Vec<Cube> = model.space.alphabet().iter().map(|&d| parent.child(m, d)).collect();
            let best = siblings
                .iter()
                .map(|a| {
                    siblings
                        .iter()
                        .filter(|b| *b != a)
                        .filter(|b| model.covariance(a, b) >= eps * model.probability(a) * model.probability(b))
                        .count() as u64
                })
                .max()
                .unwrap_or(0);
            Ok(1 + best)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Retention {
    Direct { p: f64 },
    /// `p = 2^-t`.
    Bits { t: f64 },
    /// `p = m^-t`, one unit per m-ary level.
    Levels { t: f64 },
}

impl Retention {
    pub fn probability(&self, base: u32) -> f64 {
        match *self {
            Retention::Direct { p } => p,
            Retention::Bits { t } => 2f64.powf(-t),
            Retention::Levels { t } => (base as f64).powf(-t),
        }
    }

    /// Retention exponent in units of m-ary levels, `-log_m p`.
    pub fn exponent(&self, base: u32) -> f64 {
        -self.probability(base).ln() / (base as f64).ln()
    }
}

#[derive(Clone, Debug)]
pub struct PercolationRun<Q> {
    pub space: DigitSpace<Q>,
    pub p: f64,
    pub depth: u32,
    pub target: Option<TargetSet>,
}

impl<Q: ExactScalar> PercolationRun<Q> {
    pub fn new(space: DigitSpace<Q>, retention: Retention, depth: u32, target: Option<TargetSet>) -> Result<Self> {
        let p = retention.probability(space.base());
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid(format!("retention probability {p} outside (0, 1]")));
        }
        space.check_depth(depth)?;
        Ok(PercolationRun { space, p, depth, target })
    }

    fn digits_at(&self, j: u32) -> &[u8] {
        match &self.target {
            Some(g) => g.digits_at(j),
            None => self.space.alphabet(),
        }
    }
}

/// Surviving cube indices per level `0..=N`, restricted to G when a target is set.
pub fn percolation_subtree<Q: ExactScalar>(run: &PercolationRun<Q>, seed: u64) -> Vec<Vec<u64>> {
    let m = run.space.base() as u64;
    let mut u = CounterUniform::new(seed);
    let mut levels = vec![vec![0u64]];
    for n in 1..=run.depth {
        let digits = run.digits_at(n);
        let next: Vec<u64> = levels[n as usize - 1]
            .iter()
            .flat_map(|&i| digits.iter().map(move |&d| i * m + d as u64))
            .filter(|&c| u.uniform(n as u64, c) < run.p)
            .collect();
        levels.push(next);
    }
    levels
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PercolationOutcome {
    pub survivors: Vec<u64>,
    pub hit: Option<bool>,
}

pub fn percolation_sample<Q: ExactScalar>(run: &PercolationRun<Q>, seed: u64) -> PercolationOutcome {
    let levels = percolation_subtree(run, seed);
    let survivors: Vec<u64> = levels.iter().map(|l| l.len() as u64).collect();
    let hit = run.target.as_ref().map(|_| *survivors.last().unwrap() > 0);
    PercolationOutcome { survivors, hit }
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionHits {
    pub estimate: HitProbability,
    pub copies: u32,
    /// Hit frequency of a single copy.
    pub single_copy: f64,
    /// `1 - (1 - q)^copies` with the single-copy estimate q.
    pub predicted: f64,
    /// `(1 - q)^copies`, the miss probability left by truncating the union.
    pub residual: f64,
    pub flags: Vec<bool>,
    pub seeds: Vec<u64>,
    /// Surviving target cubes per trial and level `0..=N`, summed over copies.
    pub survivors: Vec<Vec<u64>>,
}

/// Hit frequency of the union of `copies` independent percolation sets with G.
pub fn percolation_union_hits<Q: ExactScalar>(
    run: &PercolationRun<Q>,
    copies: u32,
    trials: usize,
    master_seed: u64,
) -> Result<UnionHits> {
    if copies < 1 {
        return Err(Error::invalid("need at least one copy"));
    }
    if run.target.is_none() {
        return Err(Error::invalid("union hitting needs a target"));
    }
    let seeds: Vec<u64> = (0..trials as u64).map(|t| trial_seed(master_seed, t)).collect();
    let per_trial: Vec<(u64, Vec<u64>)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut hit_copies = 0u64;
            let mut survivors = vec![0u64; run.depth as usize + 1];
            for c in 0..copies as u64 {
                let out = percolation_sample(run, trial_seed(seed, c));
                hit_copies += (*out.survivors.last().unwrap() > 0) as u64;
                survivors.iter_mut().zip(&out.survivors).for_each(|(a, b)| *a += b);
            }
            (hit_copies, survivors)
        })
        .collect();
    let flags: Vec<bool> = per_trial.iter().map(|&(h, _)| h > 0).collect();
    let q = per_trial.iter().map(|&(h, _)| h).sum::<u64>() as f64 / (trials as f64 * copies as f64);
    let residual = (1.0 - q).powi(copies as i32);
    Ok(UnionHits {
        estimate: hit_probability(&flags)?,
        copies,
        single_copy: q,
        predicted: 1.0 - residual,
        residual,
        flags,
        seeds,
        survivors: per_trial.into_iter().map(|(_, s)| s).collect(),
    })
}

/// Exhaustive level-n sampler over every cube of X.
pub fn sample_full_level<Q: ExactScalar>(model: &LimsupModel<Q>, n: u32, seed: u64) -> Result<Vec<(Cube, bool)>> {
    let cubes = cubes_at_level(&model.space, n)?;
    let z = model.retained(&cubes, seed);
    Ok(cubes.into_iter().zip(z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn binary() -> DigitSpace<Rational> {
        DigitSpace::full(2).unwrap()
    }

    #[test]
    fn certain_retention_always_hits() {
        let model = LimsupModel::new(binary(), 10, ProbabilityField::Constant { gamma: 0.0 }).unwrap();
        let g = TargetSet::full(&model.space);
        let hits = sample_limsup_hits(&model, &g, 100, 1, 3).unwrap();
        assert_eq!(hits.estimate.p_hat, 1.0);
    }

    #[test]
    fn thin_target_escapes_steep_field() {
        // dim G = 1/2 < gamma2 = 0.8: expected hits per level 2^{-0.3 n}
        let space = binary();
        let g = TargetSet::new(&space, vec![vec![0, 1], vec![0]]).unwrap();
        let model = LimsupModel::new(space, 14, ProbabilityField::TwoLevel { gamma1: 0.9, gamma2: 0.8 }).unwrap();
        let hits = sample_limsup_hits(&model, &g, 200, 2, 10).unwrap();
        let expected_tail: f64 = (10..=14).map(|n| g.count_at(n) as f64 * 2f64.powf(-0.8 * n as f64)).product();
        assert!(expected_tail < 0.1);
        assert!(hits.estimate.p_hat <= 0.1, "{}", hits.estimate.p_hat);
    }

    #[test]
    fn fat_target_is_hit() {
        let space = binary();
        let g = TargetSet::full(&space);
        let model = LimsupModel::new(space, 14, ProbabilityField::Constant { gamma: 0.5 }).unwrap();
        let hits = sample_limsup_hits(&model, &g, 200, 3, 5).unwrap();
        assert!(hits.estimate.p_hat >= 0.9);
    }

    #[test]
    fn degenerate_target_rejected() {
        let space = binary();
        let g = TargetSet::new(&space, vec![vec![0], vec![]]).unwrap();
        let model = LimsupModel::new(space, 6, ProbabilityField::Constant { gamma: 0.2 }).unwrap();
        assert!(matches!(sample_limsup_hits(&model, &g, 100, 0, 3), Err(Error::DegenerateTarget { .. })));
    }

    #[test]
    fn exponent_diagnostics_match_field() {
        let space = DigitSpace::<Rational>::full(3).unwrap();
        let model = LimsupModel::new(space, 12, ProbabilityField::TwoLevel { gamma1: 0.7, gamma2: 0.25 }).unwrap();
        for n in [1, 5, 12] {
            let (lo, hi) = model.exponent_range(n);
            assert!((lo - 0.25).abs() < 1e-9 && (hi - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn pruned_sampling_matches_full_level() {
        let space = DigitSpace::<Rational>::full(3).unwrap();
        let g = TargetSet::new(&space, vec![vec![0, 2], vec![1]]).unwrap();
        for dependence in [Dependence::Independent, Dependence::SiblingGroups { size: 3 }] {
            let model = LimsupModel::new(space.clone(), 6, ProbabilityField::TwoLevel { gamma1: 0.6, gamma2: 0.2 })
                .unwrap()
                .with_dependence(dependence)
                .unwrap();
            for seed in 0..20 {
                for n in 1..=6 {
                    let full = sample_full_level(&model, n, seed).unwrap();
                    let restricted: Vec<bool> = full.iter().filter(|(c, _)| g.contains_cube(c)).map(|(_, z)| *z).collect();
                    assert_eq!(model.retained(&g.cubes_at(n), seed), restricted);
                }
            }
        }
    }

    #[test]
    fn correlation_profiles() {
        let space = binary();
        let field = ProbabilityField::Constant { gamma: 0.5 };
        let indep = LimsupModel::new(space.clone(), 8, field.clone()).unwrap();
        assert_eq!(correlation_profile(&indep, 0.01, 6).unwrap(), 1);
        let pairs = indep.clone().with_dependence(Dependence::SiblingGroups { size: 2 }).unwrap();
        let p = 2f64.powf(-0.5 * 6.0);
        assert_eq!(correlation_profile(&pairs, 0.5 * (1.0 - p) / p, 6).unwrap(), 2);
        assert_eq!(correlation_profile(&pairs, 2.0 * (1.0 - p) / p, 6).unwrap(), 1);
        assert!(matches!(
            indep.with_dependence(Dependence::SiblingGroups { size: 3 }),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn doubled_intervals_admit_neighbours() {
        let space = binary();
        let g = TargetSet::new(&space, vec![vec![0]]).unwrap();
        let model = LimsupModel::new(space, 4, ProbabilityField::Constant { gamma: 0.0 }).unwrap();
        assert_eq!(hit_candidates(&model, &g, 4).len(), 1);
        let doubled = model.with_doubling(true);
        let ids: Vec<u64> = hit_candidates(&doubled, &g, 4).iter().map(|c| c.index).collect();
        assert_eq!(ids, vec![0, 1]);
    }

    #[test]
    fn percolation_certain_retention() {
        let space = DigitSpace::<Rational>::cantor();
        let run = PercolationRun::new(space, Retention::Direct { p: 1.0 }, 8, None).unwrap();
        let out = percolation_sample(&run, 4);
        assert_eq!(out.survivors, (0..=8).map(|n| 2u64.pow(n)).collect::<Vec<_>>());
        assert_eq!(out.hit, None);
    }

    #[test]
    fn percolation_subtree_closed_under_parents() {
        let run = PercolationRun::new(binary(), Retention::Direct { p: 0.7 }, 12, None).unwrap();
        for seed in 0..50 {
            let levels = percolation_subtree(&run, seed);
            for n in 1..levels.len() {
                for &c in &levels[n] {
                    assert!(levels[n - 1].binary_search(&(c / 2)).is_ok());
                }
            }
        }
    }

    #[test]
    fn critical_mean_is_one() {
        let run = PercolationRun::new(binary(), Retention::Bits { t: 1.0 }, 12, None).unwrap();
        let runs = 10_000u64;
        let totals: Vec<f64> = (0..runs).map(|s| *percolation_sample(&run, trial_seed(8, s)).survivors.last().unwrap() as f64).collect();
        let mean = totals.iter().sum::<f64>() / runs as f64;
        let var = totals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
        assert!((mean - 1.0).abs() <= 3.0 * (var / runs as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn survivor_martingale() {
        let p = 0.6;
        let run = PercolationRun::new(binary(), Retention::Direct { p }, 12, None).unwrap();
        let runs = 10_000u64;
        let samples: Vec<Vec<u64>> = (0..runs).map(|s| percolation_sample(&run, trial_seed(21, s)).survivors).collect();
        for n in 0..=12usize {
            let scale = (2.0 * p).powi(n as i32);
            let xs: Vec<f64> = samples.iter().map(|s| s[n] as f64 / scale).collect();
            let mean = xs.iter().sum::<f64>() / runs as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
            assert!((mean - 1.0).abs() <= 3.0 * (var / runs as f64).sqrt() + 1e-12, "n {n}: {mean}");
        }
    }

    #[test]
    fn subcritical_extinction() {
        let p = 0.3;
        let run = PercolationRun::new(binary(), Retention::Direct { p }, 20, None).unwrap();
        // extinction probability by generation 20 from iterating the offspring generating function
        let mut q = 0.0f64;
        for _ in 0..20 {
            q = (1.0 - p + p * q).powi(2);
        }
        let runs = 2000u64;
        let extinct = (0..runs).filter(|&s| *percolation_sample(&run, trial_seed(5, s)).survivors.last().unwrap() == 0).count();
        let freq = extinct as f64 / runs as f64;
        assert!(freq >= 0.99);
        assert!((freq - q).abs() <= 3.0 * (q * (1.0 - q) / runs as f64).sqrt() + 1e-3);
    }

    #[test]
    fn union_hits_regimes() {
        let space = binary();
        let full = TargetSet::full(&space);
        let certain = PercolationRun::new(space.clone(), Retention::Direct { p: 1.0 }, 10, Some(full.clone())).unwrap();
        assert_eq!(percolation_union_hits(&certain, 1, 50, 0).unwrap().estimate.p_hat, 1.0);

        let fat = PercolationRun::new(space.clone(), Retention::Bits { t: 0.5 }, 14, Some(full)).unwrap();
        let one = percolation_union_hits(&fat, 1, 200, 1).unwrap();
        let many = percolation_union_hits(&fat, 32, 200, 1).unwrap();
        assert!(many.estimate.p_hat >= one.estimate.p_hat);
        assert!(many.estimate.p_hat >= 0.95);

        let thin_g = TargetSet::new(&space, vec![vec![0, 1], vec![0]]).unwrap();
        let thin = PercolationRun::new(space, Retention::Bits { t: 1.3 }, 14, Some(thin_g.clone())).unwrap();
        let expected = thin_g.count_at(14) as f64 * 2f64.powf(-1.3 * 14.0);
        assert!(32.0 * expected < 0.05);
        for copies in [1, 8, 32] {
            assert!(percolation_union_hits(&thin, copies, 200, 2).unwrap().estimate.p_hat <= 0.05);
        }
    }

    #[test]
    fn retention_transforms() {
        assert_eq!(Retention::Bits { t: 1.0 }.probability(3), 0.5);
        assert!((Retention::Levels { t: 0.5 }.probability(4) - 0.5).abs() < 1e-15);
        assert!((Retention::Bits { t: 1.0 }.exponent(2) - 1.0).abs() < 1e-15);
    }
}
