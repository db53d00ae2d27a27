//! Box-dimension regression, intersection-dimension predictions and
//! Wilson intervals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimEstimate<F> {
    pub slope: F,
    pub intercept: F,
    pub stderr: F,
    pub r2: F,
    pub window: (u32, u32),
    /// Points used in the fit, `(k, N_k)`.
    pub counts: Vec<(u32, u64)>,
    /// Max over the window of `log N_k / (k log m)`.
    pub suffix_max: F,
}

/// Window dropping the 3 coarsest and the finest level of `1..=k_max`.
pub fn default_dim_window(k_max: u32) -> (u32, u32) {
    (4.min(k_max), k_max.saturating_sub(1).max(1))
}

/// Least-squares slope of `ln N_k` against `k ln m` over the window,
/// skipping levels with `N_k = 0`.
pub fn box_dimension<F: Real>(counts: &[(u32, u64)], base: u32, window: (u32, u32)) -> Result<DimEstimate<F>> {
    let (k1, k2) = window;
    let pts: Vec<(u32, u64)> = counts.iter().copied().filter(|&(k, n)| k1 <= k && k <= k2 && n >= 1).collect();
    if pts.len() < 5 {
        return Err(Error::InsufficientData(format!("{} usable levels in [{k1}, {k2}], need 5", pts.len())));
    }
    let ln_m = F::lit(base as f64).ln();
    let xy: Vec<(F, F)> =
        pts.iter().map(|&(k, n)| (F::lit(k as f64) * ln_m, F::lit(n as f64).ln())).collect();
    let n = F::lit(xy.len() as f64);
    let mx = xy.iter().fold(F::zero(), |a, p| a + p.0) / n;
    let my = xy.iter().fold(F::zero(), |a, p| a + p.1) / n;
    let sxx = xy.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    let sxy = xy.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let syy = xy.iter().fold(F::zero(), |a, p| a + (p.1 - my) * (p.1 - my));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = xy.iter().fold(F::zero(), |a, p| {
        let r = p.1 - intercept - slope * p.0;
        a + r * r
    });
    let dof = F::lit(xy.len() as f64 - 2.0);
    let stderr = (sse / dof / sxx).sqrt();
    let r2 = if syy > F::zero() { F::one() - sse / syy } else { F::one() };
    let suffix_max = xy.iter().fold(F::neg_infinity(), |a, p| a.max(p.1 / p.0));
    Ok(DimEstimate { slope, intercept, stderr, r2, window, counts: pts, suffix_max })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// The intersection is empty almost surely.
    Empty,
    /// Packing and Hausdorff dimension of G straddle `s - α`.
    IndeterminateCritical,
    Bounds,
    Exact,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Empty => "Empty",
            Regime::IndeterminateCritical => "Indeterminate (critical)",
            Regime::Bounds => "Bounds",
            Regime::Exact => "Exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub regime: Regime,
    /// Interval for `dim_H(E ∩ G)`; `-inf` for an empty intersection.
    pub dim_h: (f64, f64),
    /// `dim_P(E ∩ G)` under the block condition.
    pub dim_p: Option<f64>,
    pub s: f64,
    pub alpha: f64,
    pub dim_h_g: f64,
    pub dim_p_g: f64,
}

const TIE: f64 = 1e-12;

pub fn predict(s: f64, alpha: f64, dim_h_g: f64, dim_p_g: f64) -> Result<Prediction> {
    if !(alpha > 0.0) {
        return Err(Error::OutOfTheory(format!("index {alpha} must be positive")));
    }
    if alpha >= s {
        return Err(Error::OutOfTheory(format!("index {alpha} must be below the space dimension {s}")));
    }
    let critical = s - alpha;
    let base = Prediction { regime: Regime::Empty, dim_h: (f64::NEG_INFINITY, f64::NEG_INFINITY), dim_p: None, s, alpha, dim_h_g, dim_p_g };
    if dim_p_g < critical {
        return Ok(base);
    }
    let upper = dim_p_g + alpha - s;
    let dim_p = (dim_p_g > critical).then_some(dim_p_g);
    if dim_h_g <= critical {
        return Ok(Prediction { regime: Regime::IndeterminateCritical, dim_h: (f64::NEG_INFINITY, upper), dim_p, ..base });
    }
    let lower = dim_h_g + alpha - s;
    let regime = if (dim_p_g - dim_h_g).abs() <= TIE { Regime::Exact } else { Regime::Bounds };
    Ok(Prediction { regime, dim_h: (lower, upper), dim_p, ..base })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitProbability {
    pub trials: usize,
    pub hits: usize,
    pub p_hat: f64,
    pub lower: f64,
    pub upper: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

pub fn wilson(hits: usize, trials: usize) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lower = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let upper = if hits == trials { 1.0 } else { (center + half).min(1.0) };
    (lower, upper)
}

pub fn hit_probability(flags: &[bool]) -> Result<HitProbability> {
    if flags.is_empty() {
        return Err(Error::InsufficientData("no trials".into()));
    }
    let hits = flags.iter().filter(|&&f| f).count();
    let (lower, upper) = wilson(hits, flags.len());
    Ok(HitProbability { trials: flags.len(), hits, p_hat: hits as f64 / flags.len() as f64, lower, upper })
}
