//! Validation and execution of experiment configs.

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{DimSource, ExperimentConfig, ExperimentKind};
use crate::covering::{hit_target, limsup_cube_counts, simulate_cover, tail_start, MIN_TAIL_START};
use crate::error::{Error, Result};
use crate::estimator::{box_dimension, default_dim_window, hit_probability, predict, Prediction};
use crate::limsup::{limsup_stage_counts, percolation_union_hits, sample_limsup_hits, LimsupModel, PercolationRun};
use crate::process::OrbitSource;
use crate::rng::trial_seed;
use crate::sequences::{
    bt_index_detail, block_counts, condition_c_check, default_gap_constant, default_window, sparse_indices,
    RadiusSequence,
};
use crate::space::{nesting_family_report, DigitSpace};
use crate::target::{TargetSet, TargetSpec};
use crate::{Blocks, Radii, Rational, Space, Trace};

/// One CSV file produced by an experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvFile {
    pub name: &'static str,
    pub body: Vec<u8>,
}

/// Everything an experiment produces, before it touches the filesystem.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub kind: ExperimentKind,
    pub results: Value,
    pub prediction: Value,
    /// Name and value of the quantity checked against `options.expect`.
    pub headline: (&'static str, f64),
    pub passed: bool,
    pub csv: Vec<CsvFile>,
}

/// Validated inputs shared by every trial.
pub struct Prepared {
    pub config: ExperimentConfig,
    pub space: Space,
    pub target: TargetSet,
    pub sequence: Option<(Radii, Blocks)>,
    /// Index used for gap selection and predictions.
    pub alpha: Option<f64>,
}

/// Attaches a field path to argument errors; resource errors pass through.
fn at(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) | Error::OutOfTheory(m) | Error::UnsupportedModel(m) => Error::config(path, m),
        Error::Truncated { block } => Error::config(path, format!("sequence ends before block {block}")),
        other => other,
    }
}

fn needs_sequence(cfg: &ExperimentConfig) -> bool {
    match cfg.kind {
        ExperimentKind::BtIndex | ExperimentKind::CoverSim | ExperimentKind::HitProb => true,
        ExperimentKind::DimEst => cfg.options.source == DimSource::Cover,
        _ => false,
    }
}

fn uses_cover(cfg: &ExperimentConfig) -> bool {
    needs_sequence(cfg) && cfg.kind != ExperimentKind::BtIndex
}

pub fn prepare(config: ExperimentConfig) -> Result<Prepared> {
    let spec = config.space.resolve()?;
    let space: Space = DigitSpace::from_spec(&spec).map_err(|e| at("space", e))?;
    if config.trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    if config.jobs == Some(0) {
        return Err(Error::config("jobs", "must be at least 1"));
    }
    if config.depth == 0 {
        return Err(Error::config("depth", "must be at least 1"));
    }
    if config.kind != ExperimentKind::BtIndex {
        space.check_depth(if uses_cover(&config) { config.depth + 2 } else { config.depth })?;
    }
    let target = TargetSet::from_spec(config.target.as_ref().unwrap_or(&TargetSpec::Full), &space)
        .map_err(|e| at("target", e))?;
    let opts = &config.options;

    let mut alpha = opts.alpha;
    let sequence = if needs_sequence(&config) {
        let spec = config.sequence.as_ref().ok_or_else(|| Error::config("sequence", "missing"))?;
        let seq: Radii = RadiusSequence::from_spec(spec, space.base(), config.depth + 2).map_err(|e| at("sequence", e))?;
        let table = block_counts(&seq, space.base(), config.depth).map_err(|e| at("depth", e))?;
        if alpha.is_none() {
            alpha = match seq.analytic_index() {
                Some(a) => Some(a),
                None => {
                    let w = opts.bt_window.unwrap_or_else(|| default_window(config.depth));
                    Some(bt_index_detail(&table, w).map_err(|e| at("options.bt_window", e))?.estimate)
                }
            };
        }
        let c = default_gap_constant(space.dim(), alpha.unwrap_or(0.0));
        let table = sparse_indices(&table, c).map_err(|e| at("sequence", e))?;
        Some((seq, table))
    } else {
        None
    };

    if let Some(w) = opts.bt_window {
        if w < 3 || w > config.depth {
            return Err(Error::config("options.bt_window", format!("must lie in 3..={}", config.depth)));
        }
    }
    if matches!(config.kind, ExperimentKind::HitProb | ExperimentKind::LimsupHit) {
        let k_min = opts.k_min.unwrap_or_else(|| tail_start(config.depth));
        if k_min < MIN_TAIL_START || k_min > config.depth {
            return Err(Error::config("options.k_min", format!("must lie in {MIN_TAIL_START}..={}", config.depth)));
        }
    }
    if config.kind == ExperimentKind::DimEst {
        let (k1, k2) = opts.window.unwrap_or_else(|| default_dim_window(config.depth));
        if k1 > k2 || k2 > config.depth || k2 - k1 < 4 {
            return Err(Error::config("options.window", "needs at least 5 levels inside 1..=depth"));
        }
    }
    let needs_field = config.kind == ExperimentKind::LimsupHit
        || (config.kind == ExperimentKind::DimEst && opts.source == DimSource::Limsup);
    if needs_field {
        limsup_model(&space, &config)?;
        if config.kind == ExperimentKind::LimsupHit && config.trials < 100 {
            return Err(Error::config("trials", "limsup hitting needs at least 100"));
        }
    }
    if config.kind == ExperimentKind::Percolate {
        let r = opts.retention.ok_or_else(|| Error::config("options.retention", "missing"))?;
        PercolationRun::new(space.clone(), r, config.depth, None).map_err(|e| at("options.retention", e))?;
        if opts.copies == 0 {
            return Err(Error::config("options.copies", "must be at least 1"));
        }
    }
    if let Some((lo, hi)) = opts.expect {
        if !(lo <= hi) {
            return Err(Error::config("options.expect", "lower end exceeds upper end"));
        }
    }
    Ok(Prepared { config, space, target, sequence, alpha })
}

fn limsup_model(space: &Space, cfg: &ExperimentConfig) -> Result<LimsupModel<Rational>> {
    let field = cfg.options.field.clone().ok_or_else(|| Error::config("options.field", "missing"))?;
    let model = LimsupModel::new(space.clone(), cfg.depth, field).map_err(|e| at("options.field", e))?;
    let model = match cfg.options.dependence {
        Some(d) => model.with_dependence(d).map_err(|e| at("options.dependence", e))?,
        None => model,
    };
    Ok(model.with_doubling(cfg.options.doubled))
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Resource(e.to_string()))
}

fn csv_body(schema: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut out = format!("# schema: {schema}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    Ok(out)
}

fn prediction_value(p: Result<Prediction>, s: f64, alpha: f64, g: (f64, f64)) -> Value {
    match p {
        Ok(p) => json!({ "regime": p.regime.label(), "detail": p }),
        Err(e) => json!({ "error": e.to_string(), "s": s, "alpha": alpha, "dim_h_g": g.0, "dim_p_g": g.1 }),
    }
}

/// Hitting prediction for sets of codimension between `lo` and `hi`.
fn threshold_value(s: f64, lo: f64, hi: f64, g: (f64, f64)) -> Value {
    let regime = if g.0 > hi {
        "hit"
    } else if g.1 < lo {
        "miss"
    } else {
        "indeterminate"
    };
    json!({
        "regime": regime,
        "codimension": [lo, hi],
        "dim_h_g": g.0,
        "dim_p_g": g.1,
        "intersection": prediction_value(predict(s, s - hi, g.0, g.1), s, s - hi, g),
    })
}

struct Stats {
    mean: f64,
    sd: f64,
    lower: f64,
    upper: f64,
    n: usize,
}

fn stats(values: &[f64]) -> Stats {
    let n = values.len();
    if n == 0 {
        return Stats { mean: f64::NAN, sd: f64::NAN, lower: f64::NAN, upper: f64::NAN, n };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let half = 1.959_963_984_540_054 * sd / (n as f64).sqrt();
    Stats { mean, sd, lower: mean - half, upper: mean + half, n }
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12}")
    } else {
        String::new()
    }
}

impl Prepared {
    fn dims_g(&self) -> (f64, f64) {
        self.target.dims(self.config.depth)
    }

    fn standard_prediction(&self) -> Value {
        let s = self.space.dim();
        let alpha = self.alpha.unwrap_or(f64::NAN);
        let g = self.dims_g();
        prediction_value(predict(s, alpha, g.0, g.1), s, alpha, g)
    }

    fn cover_trial(&self, seed: u64) -> Result<Trace> {
        let (seq, table) = self.sequence.as_ref().expect("validated");
        let mut src = OrbitSource::new(self.space.clone(), seed);
        simulate_cover(seq, table, &mut src, self.config.depth)
    }

    fn seeds(&self) -> Vec<u64> {
        (0..self.config.trials as u64).map(|t| trial_seed(self.config.seed, t)).collect()
    }

    pub fn execute(&self) -> Result<Outcome> {
        let pool = pool(self.config.jobs)?;
        let mut out = pool.install(|| match self.config.kind {
            ExperimentKind::NestingCheck => self.nesting(),
            ExperimentKind::BtIndex => self.bt_index(),
            ExperimentKind::CoverSim => self.cover_sim(),
            ExperimentKind::HitProb => self.hit_prob(),
            ExperimentKind::DimEst => self.dim_est(),
            ExperimentKind::Percolate => self.percolate(),
            ExperimentKind::LimsupHit => self.limsup_hit(),
        })?;
        if let Some((lo, hi)) = self.config.options.expect {
            let v = out.headline.1;
            out.passed &= lo <= v && v <= hi;
        }
        Ok(out)
    }

    fn outcome(&self, results: Value, prediction: Value, headline: (&'static str, f64), csv: Vec<CsvFile>) -> Outcome {
        Outcome { kind: self.config.kind, results, prediction, headline, passed: true, csv }
    }

    fn nesting(&self) -> Result<Outcome> {
        let s = self.space.dim();
        let prediction = json!({ "dim": s, "c1": self.space.c1(), "count_bracket": "lower <= count <= upper" });
        match nesting_family_report(&self.space, self.config.depth) {
            Ok(report) => {
                let rows = report
                    .levels
                    .iter()
                    .map(|l| vec![l.level.to_string(), l.count.to_string(), fmt(l.lower), fmt(l.upper)]);
                let body = csv_body("covset-nesting v1", &["level", "count", "lower", "upper"], rows)?;
                let levels = report.levels.len() as f64;
                let results = json!({ "pass": true, "report": report });
                Ok(self.outcome(results, prediction, ("levels", levels), vec![CsvFile { name: "trials.csv", body }]))
            }
            Err(e @ Error::Nesting { .. }) => {
                let body = csv_body("covset-nesting v1", &["level", "count", "lower", "upper"], Vec::new())?;
                let results = json!({ "pass": false, "failure": e.to_string() });
                let mut o = self.outcome(results, prediction, ("levels", 0.0), vec![CsvFile { name: "trials.csv", body }]);
                o.passed = false;
                Ok(o)
            }
            Err(e) => Err(e),
        }
    }

    fn bt_index(&self) -> Result<Outcome> {
        let (seq, table) = self.sequence.as_ref().expect("validated");
        let w = self.config.options.bt_window.unwrap_or_else(|| default_window(self.config.depth));
        let bt = bt_index_detail(table, w)?;
        let alpha = seq.analytic_index().unwrap_or(bt.estimate);
        let cc = condition_c_check(table, alpha, self.config.options.tol)?;
        let mut body = Vec::new();
        table.write_csv(&mut body)?;
        let results = json!({
            "bt_index": bt,
            "condition_c": cc,
            "tol": self.config.options.tol,
            "coarse_scale": table.coarse_scale(),
            "total_indices": table.total(),
        });
        let prediction = json!({ "analytic_index": seq.analytic_index(), "intersection": self.standard_prediction() });
        Ok(self.outcome(results, prediction, ("estimate", bt.estimate), vec![CsvFile { name: "trials.csv", body }]))
    }

    fn cover_sim(&self) -> Result<Outcome> {
        let k_max = self.config.depth;
        let g = &self.target;
        let seeds = self.seeds();
        let rows: Vec<Vec<[u64; 5]>> = seeds
            .par_iter()
            .map(|&seed| {
                let trace = self.cover_trial(seed)?;
                Ok((1..=k_max)
                    .map(|k| {
                        let b = trace.block(k);
                        let in_g = |ids: &[u64]| {
                            ids.iter().filter(|&&i| g.contains_cube(&crate::space::Cube { level: k, index: i })).count()
                                as u64
                        };
                        [b.n_k, b.m_k, in_g(&b.all.contained), in_g(&b.all.meeting), trace.s_k(g, k)]
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mut means = vec![[0f64; 3]; k_max as usize];
        for trial in &rows {
            for (acc, r) in means.iter_mut().zip(trial) {
                acc[0] += r[2] as f64;
                acc[1] += r[3] as f64;
                acc[2] += r[4] as f64;
            }
        }
        let n = rows.len() as f64;
        let per_level: Vec<Value> = means
            .iter()
            .enumerate()
            .map(|(i, a)| {
                json!({ "k": i + 1, "contained_g": a[0] / n, "meeting_g": a[1] / n, "s_k": a[2] / n })
            })
            .collect();
        let headline = means.last().map_or(0.0, |a| a[2] / n);
        let csv_rows = rows.iter().enumerate().flat_map(|(t, trial)| {
            let seed = seeds[t];
            trial.iter().enumerate().map(move |(i, r)| {
                let mut row = vec![t.to_string(), seed.to_string(), (i + 1).to_string()];
                row.extend(r.iter().map(|v| v.to_string()));
                row
            })
        });
        let body = csv_body(
            "covset-cover v1",
            &["trial", "seed", "k", "n_k", "m_k", "contained_g", "meeting_g", "s_k"],
            csv_rows,
        )?;
        let results = json!({ "levels": per_level });
        Ok(self.outcome(results, self.standard_prediction(), ("mean_s_K", headline), vec![CsvFile { name: "trials.csv", body }]))
    }

    fn hit_prob(&self) -> Result<Outcome> {
        let k_max = self.config.depth;
        let k_min = self.config.options.k_min.unwrap_or_else(|| tail_start(k_max));
        let g = &self.target;
        let seeds = self.seeds();
        let trials: Vec<(bool, u64)> = seeds
            .par_iter()
            .map(|&seed| {
                let trace = self.cover_trial(seed)?;
                let hit = hit_target(&trace, g, k_min, k_max)?;
                let weakest = (k_min..=k_max)
                    .map(|k| {
                        trace.block(k).all.contained.iter().filter(|&&i| g.contains_cube(&crate::space::Cube { level: k, index: i })).count() as u64
                    })
                    .min()
                    .unwrap_or(0);
                Ok((hit, weakest))
            })
            .collect::<Result<_>>()?;
        let flags: Vec<bool> = trials.iter().map(|t| t.0).collect();
        let est = hit_probability(&flags)?;
        let rows = trials
            .iter()
            .enumerate()
            .map(|(t, &(hit, weakest))| vec![t.to_string(), seeds[t].to_string(), (hit as u8).to_string(), weakest.to_string()]);
        let body = csv_body("covset-hits v1", &["trial", "seed", "hit", "min_tail_contained"], rows)?;
        let results = json!({ "hits": est, "k_min": k_min, "k_max": k_max });
        Ok(self.outcome(results, self.standard_prediction(), ("frequency", est.p_hat), vec![CsvFile { name: "trials.csv", body }]))
    }

    fn dim_est(&self) -> Result<Outcome> {
        let cfg = &self.config;
        let window = cfg.options.window.unwrap_or_else(|| default_dim_window(cfg.depth));
        let base = self.space.base();
        let g = &self.target;
        let seeds = self.seeds();
        let (counts, predicted, prediction): (Vec<Vec<u64>>, f64, Value) = match cfg.options.source {
            DimSource::Cover => {
                let counts = seeds
                    .par_iter()
                    .map(|&seed| {
                        let trace = self.cover_trial(seed)?;
                        Ok(limsup_cube_counts(&trace, g, cfg.options.m0).into_iter().map(|r| r.stage).collect())
                    })
                    .collect::<Result<_>>()?;
                let prediction = self.standard_prediction();
                let s = self.space.dim();
                let (h, p) = self.dims_g();
                let predicted = match predict(s, self.alpha.unwrap_or(f64::NAN), h, p) {
                    Ok(pr) if pr.regime != crate::estimator::Regime::Empty => pr.dim_h.0,
                    _ => f64::NAN,
                };
                (counts, predicted, prediction)
            }
            DimSource::Limsup => {
                let model = limsup_model(&self.space, cfg)?;
                let counts = seeds.par_iter().map(|&seed| limsup_stage_counts(&model, g, seed)).collect();
                let (g1, g2) = model.field.exponents();
                let s = self.space.dim();
                let (h, _) = self.dims_g();
                let prediction = json!({
                    "limsup_dim": [s - g1, s - g2],
                    "intersection": threshold_value(s, g2, g1, self.dims_g()),
                });
                (counts, h - g1, prediction)
            }
        };
        let fits: Vec<Option<crate::BoxEstimate>> = counts
            .iter()
            .map(|c| {
                let pts: Vec<(u32, u64)> = c.iter().enumerate().map(|(i, &n)| (i as u32 + 1, n)).collect();
                box_dimension::<f64>(&pts, base, window).ok()
            })
            .collect();
        let slopes: Vec<f64> = fits.iter().flatten().map(|f| f.slope).collect();
        let st = stats(&slopes);
        let trial_rows = fits.iter().enumerate().map(|(t, f)| {
            let (slope, intercept, r2) = f.as_ref().map_or((f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.intercept, f.r2));
            vec![t.to_string(), seeds[t].to_string(), fmt(slope), fmt(intercept), fmt(r2)]
        });
        let body = csv_body("covset-dim v1", &["trial", "seed", "slope", "intercept", "r2"], trial_rows)?;
        let count_rows = counts.iter().enumerate().flat_map(|(t, c)| {
            c.iter().enumerate().map(move |(i, n)| vec![t.to_string(), (i + 1).to_string(), n.to_string()])
        });
        let counts_body = csv_body("covset-counts v1", &["trial", "k", "count"], count_rows)?;
        let results = json!({
            "mean_slope": st.mean,
            "sd": st.sd,
            "ci95": [st.lower, st.upper],
            "fitted_trials": st.n,
            "window": window,
            "predicted": predicted,
        });
        Ok(self.outcome(
            results,
            prediction,
            ("mean_slope", st.mean),
            vec![CsvFile { name: "trials.csv", body }, CsvFile { name: "counts.csv", body: counts_body }],
        ))
    }

    fn percolate(&self) -> Result<Outcome> {
        let cfg = &self.config;
        let retention = cfg.options.retention.expect("validated");
        let run = PercolationRun::new(self.space.clone(), retention, cfg.depth, Some(self.target.clone()))?;
        let union = percolation_union_hits(&run, cfg.options.copies, cfg.trials, cfg.seed)?;
        let rows = union.survivors.iter().enumerate().flat_map(|(t, levels)| {
            let hit = union.flags[t] as u8;
            levels.iter().enumerate().map(move |(n, s)| vec![t.to_string(), n.to_string(), s.to_string(), hit.to_string()])
        });
        let body = csv_body("covset-percolation v1", &["trial", "level", "survivors", "hit"], rows)?;
        let t = retention.exponent(self.space.base());
        let results = json!({
            "hits": union.estimate,
            "p": run.p,
            "exponent": t,
            "copies": union.copies,
            "single_copy": union.single_copy,
            "predicted_union": union.predicted,
            "residual": union.residual,
        });
        let prediction = threshold_value(self.space.dim(), t, t, self.dims_g());
        Ok(self.outcome(results, prediction, ("frequency", union.estimate.p_hat), vec![CsvFile { name: "trials.csv", body }]))
    }

    fn limsup_hit(&self) -> Result<Outcome> {
        let cfg = &self.config;
        let model = limsup_model(&self.space, cfg)?;
        let k_min = cfg.options.k_min.unwrap_or_else(|| tail_start(cfg.depth));
        let hits = sample_limsup_hits(&model, &self.target, cfg.trials, cfg.seed, k_min)?;
        let rows = hits.survivors.iter().enumerate().flat_map(|(t, levels)| {
            let hit = hits.flags[t] as u8;
            levels
                .iter()
                .enumerate()
                .map(move |(i, s)| vec![t.to_string(), (i + 1).to_string(), s.to_string(), hit.to_string()])
        });
        let body = csv_body("covset-limsup v1", &["trial", "level", "survivors", "hit"], rows)?;
        let (g1, g2) = model.field.exponents();
        let results = json!({ "hits": hits.estimate, "k_min": k_min, "gamma": [g1, g2], "doubled": model.doubled });
        let prediction = threshold_value(self.space.dim(), g2, g1, self.dims_g());
        Ok(self.outcome(results, prediction, ("frequency", hits.estimate.p_hat), vec![CsvFile { name: "trials.csv", body }]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    #[test]
    fn nesting_check_passes() {
        let p = prepare(cfg("kind = \"nesting-check\"\ndepth = 8\n[space]\nbase = 3\nalphabet = [0, 2]\n")).unwrap();
        let out = p.execute().unwrap();
        assert!(out.passed);
        assert_eq!(out.headline.1, 9.0);
        let text = String::from_utf8(out.csv[0].body.clone()).unwrap();
        assert!(text.starts_with("# schema: covset-nesting v1\nlevel,count,lower,upper\n"));
    }

    #[test]
    fn bt_index_recovers_power_law() {
        let p = prepare(cfg(
            "kind = \"bt-index\"\ndepth = 40\n[space]\npreset = \"base2\"\n[sequence]\nkind = \"power-law\"\nalpha0 = 0.4\n",
        ))
        .unwrap();
        let out = p.execute().unwrap();
        assert!((0.38..=0.42).contains(&out.headline.1), "{}", out.headline.1);
    }

    #[test]
    fn validation_names_fields() {
        let missing = prepare(cfg("kind = \"hit-prob\"\ndepth = 8\n[space]\nbase = 3\n"));
        assert!(matches!(missing, Err(Error::Config { ref path, .. }) if path == "sequence"));
        let bad_kmin = prepare(cfg(
            "kind = \"hit-prob\"\ndepth = 8\n[space]\nbase = 3\n[sequence]\nkind = \"power-law\"\nalpha0 = 0.5\n[options]\nk_min = 2\n",
        ));
        assert!(matches!(bad_kmin, Err(Error::Config { ref path, .. }) if path == "options.k_min"));
        let no_field = prepare(cfg("kind = \"limsup-hit\"\ndepth = 8\n[space]\nbase = 2\n"));
        assert!(matches!(no_field, Err(Error::Config { ref path, .. }) if path == "options.field"));
        let groups = prepare(cfg(
            "kind = \"limsup-hit\"\ndepth = 8\n[space]\nbase = 3\n[options]\nfield = { kind = \"constant\", gamma = 0.2 }\ndependence = { kind = \"sibling-groups\", size = 2 }\n",
        ));
        assert!(matches!(groups, Err(Error::Config { ref path, .. }) if path == "options.dependence"));
    }

    #[test]
    fn depth_cap_is_a_resource_error() {
        let err = prepare(cfg(
            "kind = \"hit-prob\"\ndepth = 15\n[space]\nbase = 3\n[sequence]\nkind = \"power-law\"\nalpha0 = 0.5\n",
        ));
        assert!(matches!(err, Err(Error::DepthCap { requested: 17, cap: 16 })));
    }

    #[test]
    fn expect_range_controls_pass() {
        let text = "kind = \"bt-index\"\ndepth = 30\n[space]\npreset = \"base2\"\n[sequence]\nkind = \"power-law\"\nalpha0 = 0.4\n[options]\nexpect = [0.9, 1.0]\n";
        assert!(!prepare(cfg(text)).unwrap().execute().unwrap().passed);
    }

    #[test]
    fn stats_of_constant_sample() {
        let s = stats(&[0.5; 10]);
        assert_eq!((s.mean, s.sd, s.lower, s.upper, s.n), (0.5, 0.0, 0.5, 0.5, 10));
        assert!(stats(&[]).mean.is_nan());
    }
}
