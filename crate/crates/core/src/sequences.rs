//! Radius sequences, scale blocks, sparse index families and the
//! Besicovitch–Taylor index.
//!
//! Block k collects the indices n with `ℓ_n ∈ [b^(k-1), b^(k-2))`, `b = 1/m`.
//! Because radii are non-increasing, every block is a contiguous index range
//! and is stored as one.

use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{pow_i128, ExactScalar};

pub const BLOCK_CSV_SCHEMA: &str = "# schema: covset-blocks v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `ℓ_n = n^(-1/alpha0)` rounded down to the m-adic grid.
    PowerLaw { alpha0: f64 },
    /// Block sizes `n_1, n_2, …`; every radius in block k equals `b^(k-1)`.
    BlockProfile { counts: Vec<u64> },
    /// Finite list of radii written as rationals, e.g. `"1/8"`.
    ExplicitList { radii: Vec<String> },
}

#[derive(Clone, Debug)]
enum Kind<Q> {
    PowerLaw { alpha0: f64, base: u32, precision: u32 },
    BlockProfile { base: u32, counts: Vec<u64> },
    Explicit(Vec<Q>),
}

#[derive(Clone, Debug)]
pub struct RadiusSequence<Q> {
    kind: Kind<Q>,
}

/// Largest index the power-law search will visit.
const INDEX_LIMIT: u64 = 1 << 62;

impl<Q: ExactScalar> RadiusSequence<Q> {
    /// Radii on the grid `m^-precision`.
    pub fn power_law(alpha0: f64, base: u32, precision: u32) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(Error::invalid("alpha0 must be positive"));
        }
        if base < 2 || (base as f64).ln() * precision as f64 > 120.0 * 2f64.ln() {
            return Err(Error::Resource(format!("grid m^-{precision} too fine for base {base}")));
        }
        Ok(RadiusSequence { kind: Kind::PowerLaw { alpha0, base, precision } })
    }

    pub fn block_profile(base: u32, counts: Vec<u64>) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid("base must be at least 2"));
        }
        Ok(RadiusSequence { kind: Kind::BlockProfile { base, counts } })
    }

    pub fn explicit(radii: Vec<Q>) -> Result<Self> {
        if radii.iter().any(|r| *r <= Q::zero()) {
            return Err(Error::invalid("radii must be positive"));
        }
        if radii.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("radii must be non-increasing"));
        }
        Ok(RadiusSequence { kind: Kind::Explicit(radii) })
    }

    pub fn from_spec(spec: &SequenceSpec, base: u32, precision: u32) -> Result<Self> {
        match spec {
            SequenceSpec::PowerLaw { alpha0 } => Self::power_law(*alpha0, base, precision),
            SequenceSpec::BlockProfile { counts } => Self::block_profile(base, counts.clone()),
            SequenceSpec::ExplicitList { radii } => {
                let parsed = radii.iter().map(|r| parse_rational::<Q>(r)).collect::<Result<Vec<_>>>()?;
                Self::explicit(parsed)
            }
        }
    }

    /// Exponent of a power law, when the sequence is one.
    pub fn analytic_index(&self) -> Option<f64> {
        match self.kind {
            Kind::PowerLaw { alpha0, .. } => Some(alpha0),
            _ => None,
        }
    }

    fn grid_base(&self) -> Option<u32> {
        match self.kind {
            Kind::PowerLaw { base, .. } | Kind::BlockProfile { base, .. } => Some(base),
            Kind::Explicit(_) => None,
        }
    }

    /// Numerator of ℓ_n on the grid `m^-precision`.
    fn grid_numerator(n: u64, alpha0: f64, base: u32, precision: u32) -> u128 {
        let top = pow_i128(base, precision) as u128;
        let scale = (n as f64).powf(-1.0 / alpha0);
        if scale >= 1.0 {
            return top;
        }
        ((top as f64 * scale).floor() as u128).min(top)
    }

    /// `ℓ_n` for `n ≥ 1`; `None` past the end of a finite sequence.
    pub fn radius(&self, n: u64) -> Option<Q> {
        if n == 0 {
            return None;
        }
        match &self.kind {
            Kind::PowerLaw { alpha0, base, precision } => {
                let u = Self::grid_numerator(n, *alpha0, *base, *precision);
                Some(Q::from_scaled(u as i128, *base, *precision))
            }
            Kind::BlockProfile { base, counts } => {
                let mut end = 0u64;
                for (i, &c) in counts.iter().enumerate() {
                    end += c;
                    if n <= end {
                        return Some(Q::inv_pow(*base, i as u32));
                    }
                }
                None
            }
            Kind::Explicit(list) => list.get(n as usize - 1).cloned(),
        }
    }

    /// `#{n : ℓ_n ≥ m^-j}` for `j ≥ -1`.
    fn count_at_least(&self, base: u32, j: i32) -> Result<u64> {
        match &self.kind {
            Kind::PowerLaw { alpha0, precision, .. } => {
                if j < 0 {
                    return Ok(0);
                }
                let j = j as u32;
                if j > *precision {
                    return Err(Error::Resource(format!("block threshold below grid m^-{precision}")));
                }
                let threshold = pow_i128(base, precision - j) as u128;
                let above = |n: u64| Self::grid_numerator(n, *alpha0, base, *precision) >= threshold;
                let mut hi = ((j as f64 * alpha0 * (base as f64).ln()).exp().ceil() as u64).saturating_add(2);
                while above(hi) {
                    hi = hi.checked_mul(2).filter(|&h| h < INDEX_LIMIT).ok_or_else(|| {
                        Error::Resource("power-law block exceeds the index budget".into())
                    })?;
                }
                if hi >= INDEX_LIMIT {
                    return Err(Error::Resource("power-law block exceeds the index budget".into()));
                }
                let (mut lo, mut hi) = (0u64, hi);
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if above(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(lo)
            }
            Kind::BlockProfile { counts, .. } => {
                let upto = (j + 1).max(0) as usize;
                if upto > counts.len() {
                    return Err(Error::Truncated { block: upto as u32 });
                }
                Ok(counts[..upto].iter().sum())
            }
            Kind::Explicit(list) => {
                let threshold = if j >= 0 { Q::inv_pow(base, j as u32) } else { Q::from_i128(base as i128) };
                Ok(list.iter().take_while(|r| **r >= threshold).count() as u64)
            }
        }
    }
}

pub fn parse_rational<Q: ExactScalar>(text: &str) -> Result<Q> {
    let bad = || Error::invalid(format!("cannot parse rational `{text}`"));
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), "1"),
    };
    let num: i128 = num.parse().map_err(|_| bad())?;
    let den: i128 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Q::from_ratio(num, den))
}

#[derive(Clone, Debug)]
pub struct BlockTable<Q> {
    base: u32,
    k_max: u32,
    /// Block k occupies `starts[k-1]..starts[k]` (1-based indices n).
    starts: Vec<u64>,
    gap_c: Option<Q>,
}

/// Splits the index range of `seq` into the blocks `1..=k_max` for `b = 1/base`.
pub fn block_counts<Q: ExactScalar>(seq: &RadiusSequence<Q>, base: u32, k_max: u32) -> Result<BlockTable<Q>> {
    if k_max < 3 {
        return Err(Error::invalid("K must be at least 3"));
    }
    if let Some(b) = seq.grid_base() {
        if b != base {
            return Err(Error::invalid(format!("sequence built for base {b}, table requested base {base}")));
        }
    }
    let starts = (-1..k_max as i32)
        .map(|j| seq.count_at_least(base, j).map(|c| c + 1))
        .collect::<Result<Vec<u64>>>()?;
    Ok(BlockTable { base, k_max, starts, gap_c: None })
}

impl<Q: ExactScalar> BlockTable<Q> {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn scale_b(&self) -> Q {
        Q::from_ratio(1, self.base as i128)
    }

    /// Whether `b ≥ 1/3`, outside the range assumed by the block condition.
    pub fn coarse_scale(&self) -> bool {
        self.base <= 3
    }

    /// Indices of block k.
    pub fn range(&self, k: u32) -> Range<u64> {
        assert!((1..=self.k_max).contains(&k), "block {k} outside 1..={}", self.k_max);
        self.starts[k as usize - 1]..self.starts[k as usize]
    }

    pub fn count(&self, k: u32) -> u64 {
        let r = self.range(k);
        r.end - r.start
    }

    pub fn counts(&self) -> Vec<u64> {
        (1..=self.k_max).map(|k| self.count(k)).collect()
    }

    /// Total length of the blocked index range.
    pub fn total(&self) -> u64 {
        self.starts[self.k_max as usize] - self.starts[0]
    }

    pub fn gap_constant(&self) -> Option<&Q> {
        self.gap_c.as_ref()
    }

    /// `⌈c·k⌉`, or 1 before a gap constant is set.
    pub fn gap(&self, k: u32) -> u64 {
        match &self.gap_c {
            Some(c) => (c.clone() * Q::from_i128(k as i128)).ceil_scaled(2, 0).max(1) as u64,
            None => 1,
        }
    }

    /// Size of the sparse subfamily of block k.
    pub fn m_k(&self, k: u32) -> u64 {
        self.count(k).div_ceil(self.gap(k))
    }

    /// Sparse subfamily of block k: every `gap(k)`-th index from the start.
    pub fn selected(&self, k: u32) -> impl Iterator<Item = u64> {
        self.range(k).step_by(self.gap(k) as usize)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{BLOCK_CSV_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "n_k", "m_k", "log_ratio"])?;
        let ln_m = (self.base as f64).ln();
        for k in 1..=self.k_max {
            let n = self.count(k);
            let ratio = if n > 0 { format!("{:.12}", (n as f64).ln() / ln_m / k as f64) } else { String::new() };
            w.write_record([k.to_string(), n.to_string(), self.m_k(k).to_string(), ratio])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Attaches the gap constant `c`; block k keeps indices spaced by `⌈c·k⌉`.
pub fn sparse_indices<Q: ExactScalar>(table: &BlockTable<Q>, c: Q) -> Result<BlockTable<Q>> {
    if c <= Q::zero() {
        return Err(Error::invalid("gap constant must be positive"));
    }
    Ok(BlockTable { gap_c: Some(c), ..table.clone() })
}

/// Left-to-right greedy choice of indices spaced at least `gap` apart.
pub fn greedy_select(indices: &[u64], gap: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &i in indices {
        if out.last().map_or(true, |&last| i >= last + gap) {
            out.push(i);
        }
    }
    out
}

/// Gap constant `2(s - α)` for the digit process, on a 1/1000 grid, at least 1/10.
pub fn default_gap_constant<Q: ExactScalar>(s: f64, alpha: f64) -> Q {
    let c = (2.0 * (s - alpha)).max(0.1);
    Q::from_ratio((c * 1000.0).ceil() as i128, 1000)
}

fn log_count(table_base: u32, n: u64) -> f64 {
    (n as f64).ln() / (table_base as f64).ln()
}

/// Least-squares intercept of `log_{1/b} n_k` on k over the nonempty blocks of a window.
fn window_intercept<Q: ExactScalar>(table: &BlockTable<Q>, ks: Range<u32>) -> f64 {
    let pts: Vec<(f64, f64)> = ks
        .filter(|&k| table.count(k) > 0)
        .map(|k| (k as f64, log_count(table.base, table.count(k))))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    my - sxy / sxx * mx
}

#[derive(Clone, Debug, Serialize)]
pub struct BtIndex {
    /// Trailing-window max of `(log_{1/b} n_k - a)/k`.
    pub estimate: f64,
    /// Fitted `a` removing the constant-factor bias.
    pub intercept: f64,
    /// Trailing-window max of `log_{1/b} n_k / k`.
    pub raw: f64,
    pub window: (u32, u32),
}

pub fn bt_index_detail<Q: ExactScalar>(table: &BlockTable<Q>, window: u32) -> Result<BtIndex> {
    if window < 3 || window > table.k_max {
        return Err(Error::invalid(format!("window {window} outside 3..={}", table.k_max)));
    }
    let first = table.k_max - window + 1;
    let ks = first..table.k_max + 1;
    let a = window_intercept(table, ks.clone());
    let mut estimate = f64::NEG_INFINITY;
    let mut raw = f64::NEG_INFINITY;
    for k in ks {
        let n = table.count(k);
        if n == 0 {
            continue;
        }
        let y = log_count(table.base, n);
        estimate = estimate.max((y - a) / k as f64);
        raw = raw.max(y / k as f64);
    }
    if estimate == f64::NEG_INFINITY {
        return Err(Error::UndefinedEstimate);
    }
    Ok(BtIndex { estimate, intercept: a, raw, window: (first, table.k_max) })
}

pub fn bt_index_estimate<Q: ExactScalar>(table: &BlockTable<Q>, window: u32) -> Result<f64> {
    bt_index_detail(table, window).map(|b| b.estimate)
}

/// Half the table depth, at least 3.
pub fn default_window(k_max: u32) -> u32 {
    (k_max / 2).max(3).min(k_max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionC {
    pub holds_on_prefix: bool,
    pub witness: Vec<u32>,
    /// Largest consecutive ratio among witness blocks in the upper half.
    pub max_ratio: f64,
    pub intercept: f64,
}

/// Prefix check of the block condition: the witness blocks realize `alpha`
/// and fill the upper half `[⌈K/2⌉, K]` with ratios at most `1 + tol`.
pub fn condition_c_check<Q: ExactScalar>(table: &BlockTable<Q>, alpha: f64, tol: f64) -> Result<ConditionC> {
    if !(alpha > 0.0) || !(tol > 0.0) {
        return Err(Error::invalid("alpha and tol must be positive"));
    }
    let k_max = table.k_max;
    let a = window_intercept(table, k_max - default_window(k_max) + 1..k_max + 1);
    let witness: Vec<u32> = (1..=k_max)
        .filter(|&k| {
            let n = table.count(k);
            n > 0 && ((log_count(table.base, n) - a) / k as f64 - alpha).abs() <= tol
        })
        .collect();
    let half = k_max.div_ceil(2);
    let tail: Vec<u32> = witness.iter().copied().filter(|&k| k >= half).collect();
    let within = |num: u32, den: u32| num as f64 <= (1.0 + tol) * den as f64 + 1e-9;
    let mut max_ratio = f64::INFINITY;
    let mut holds = false;
    if let (Some(&first), Some(&last)) = (tail.first(), tail.last()) {
        max_ratio = tail.windows(2).map(|w| w[1] as f64 / w[0] as f64).fold(1.0, f64::max);
        holds = within(first, half) && within(k_max, last) && tail.windows(2).all(|w| within(w[1], w[0]));
    }
    Ok(ConditionC { holds_on_prefix: holds, witness, max_ratio, intercept: a })
}
