//! Reproducible experiments.
//!
//! An [`ExperimentConfig`] fully determines a run. Samples are indexed,
//! every sample draws from `derive_seed(seed, index)`, and results are
//! gathered in index order, so a report does not depend on the number of
//! worker threads. Reports carry their per-sample records, so
//! [`ExperimentReport::reaudit`] can recompute every summary and flag.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{ball_volume, c_sigma_lower, log_ball_volume, pair_constants, rho_r};
use crate::ensembles::{fock_truncation, sample_fock, Estimate, KostlanBasis};
use crate::optimize::golden_section_min;
use crate::pairs::{product_pair, sphere_pair, PairKind, RegularPair};
use crate::rng::derive_seed;
use crate::zeroset::{compact_component_in_ball, projective_root_count, sphere_components, Field};
use crate::{Error, LogReal, Result};

/// Two-sided 95% normal quantile used for Wilson intervals.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Largest tolerated fraction of ambiguous (excluded) samples.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KostlanRoots,
    KostlanCurves,
    SupNorm,
    LocalPresence,
    BettiBound,
}

/// Riemannian volumes of the real loci used to turn densities into counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeConvention {
    /// `Vol_h(RP^1)`.
    pub rp1: f64,
    /// `Vol_h(RP^2)`.
    pub rp2: f64,
    pub note: String,
}

impl Default for VolumeConvention {
    /// The round metric scaled so that `RP^1` has length `sqrt(pi)` (then the
    /// Kostlan root density is `sqrt(d) / Vol_h(RP^1)`); with the same
    /// scaling `RP^2` has area `2 pi / pi = 2`.
    fn default() -> Self {
        VolumeConvention {
            rp1: std::f64::consts::PI.sqrt(),
            rp2: 2.0,
            note: "Vol_h(RP^1) = sqrt(pi), Vol_h(RP^2) = 2".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Dimension of the real locus (or of the flat model).
    pub n: usize,
    /// Kostlan degrees; one entry except for curve scans.
    #[serde(default)]
    pub degrees: Vec<u32>,
    /// Fock truncation degree; chosen by the tail rule when absent.
    pub truncation: Option<u32>,
    /// Ball radius for flat-model experiments.
    pub radius: Option<f64>,
    /// Pair whose ball hosts the local-presence event.
    pub pair: Option<PairKind>,
    /// Betti index for the catalog bound.
    pub betti_index: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub resolution: usize,
    /// Extra grid doublings allowed for ambiguous samples.
    pub max_depth: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    #[serde(default)]
    pub volume: VolumeConvention,
}

impl ExperimentConfig {
    fn base(experiment: ExperimentKind, n: usize, samples: u64, seed: u64) -> Self {
        ExperimentConfig {
            experiment,
            n,
            degrees: Vec::new(),
            truncation: None,
            radius: None,
            pair: None,
            betti_index: None,
            samples,
            seed,
            resolution: 0,
            max_depth: 0,
            output: None,
            workers: 0,
            volume: VolumeConvention::default(),
        }
    }

    pub fn kostlan_roots(d: u32, samples: u64, seed: u64) -> Self {
        ExperimentConfig {
            degrees: vec![d],
            ..Self::base(ExperimentKind::KostlanRoots, 1, samples, seed)
        }
    }

    pub fn kostlan_curves(degrees: &[u32], samples: u64, seed: u64, resolution: usize) -> Self {
        ExperimentConfig {
            degrees: degrees.to_vec(),
            resolution,
            max_depth: 6,
            ..Self::base(ExperimentKind::KostlanCurves, 2, samples, seed)
        }
    }

    pub fn sup_norm(radius: f64, n: usize, samples: u64, seed: u64) -> Self {
        ExperimentConfig {
            radius: Some(radius),
            resolution: 256,
            ..Self::base(ExperimentKind::SupNorm, n, samples, seed)
        }
    }

    pub fn local_presence(pair: PairKind, samples: u64, seed: u64, resolution: usize) -> Self {
        ExperimentConfig {
            pair: Some(pair),
            resolution,
            max_depth: 5,
            ..Self::base(ExperimentKind::LocalPresence, 2, samples, seed)
        }
    }

    pub fn betti_bound(n: usize, i: usize) -> Self {
        ExperimentConfig {
            betti_index: Some(i),
            ..Self::base(ExperimentKind::BettiBound, n, 0, 0)
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// One sample's contribution to one series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub series: String,
    pub index: u64,
    pub seed: u64,
    pub value: f64,
    /// Dropped from the statistics because the zero set was ambiguous.
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub series: String,
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: LogReal, rhs: LogReal) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Gt => lhs > rhs,
        }
    }
}

/// `lhs relation rhs`, with `satisfied` derived from the stored numbers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub lhs: LogReal,
    pub relation: Relation,
    pub rhs: LogReal,
    pub satisfied: bool,
    /// Reported for information; does not fail the run.
    #[serde(default)]
    pub exploratory: bool,
}

impl Comparison {
    pub fn new(name: impl Into<String>, lhs: LogReal, relation: Relation, rhs: LogReal) -> Self {
        Comparison {
            name: name.into(),
            lhs,
            relation,
            rhs,
            satisfied: relation.holds(lhs, rhs),
            exploratory: false,
        }
    }

    fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }
}

/// A surface in the catalog sum of the Betti bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogTerm {
    pub surface: String,
    pub betti: u64,
    pub c_lower: LogReal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<SampleRecord>,
    pub summaries: Vec<Summary>,
    pub comparisons: Vec<Comparison>,
    pub excluded: u64,
    /// More than [`MAX_EXCLUDED_FRACTION`] of the samples were ambiguous.
    pub excessive_exclusions: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub catalog: Vec<CatalogTerm>,
    #[serde(default)]
    pub notes: Vec<String>,
    /// The only field allowed to differ between identical runs.
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    fn new(config: &ExperimentConfig, records: Vec<SampleRecord>) -> Result<Self> {
        let summaries = summarize(&records)?;
        let excluded = records.iter().filter(|r| r.excluded).count() as u64;
        let total = records.len().max(1) as f64;
        Ok(ExperimentReport {
            config: config.clone(),
            excessive_exclusions: excluded as f64 > MAX_EXCLUDED_FRACTION * total,
            records,
            summaries,
            comparisons: Vec::new(),
            excluded,
            catalog: Vec::new(),
            notes: Vec::new(),
            wall_clock_seconds: 0.0,
        })
    }

    pub fn summary(&self, series: &str) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.series == series)
    }

    pub fn comparison(&self, name: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.name == name)
    }

    /// Every non-exploratory comparison holds.
    pub fn all_satisfied(&self) -> bool {
        self.comparisons.iter().all(|c| c.satisfied || c.exploratory)
    }

    /// Recomputes the summaries from the records and the flags from the
    /// stored operands; true when both reproduce the report bit for bit.
    pub fn reaudit(&self) -> bool {
        let Ok(summaries) = summarize(&self.records) else {
            return false;
        };
        let excluded = self.records.iter().filter(|r| r.excluded).count() as u64;
        summaries == self.summaries
            && excluded == self.excluded
            && self.comparisons.iter().all(|c| c.relation.holds(c.lhs, c.rhs) == c.satisfied)
    }

    /// The report with wall-clock time and worker count cleared, for
    /// comparisons between runs.
    pub fn for_comparison(&self) -> Self {
        let mut r = self.clone();
        r.wall_clock_seconds = 0.0;
        r.config.workers = 0;
        r
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// One row per sample record.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.records {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Per-series estimates over non-excluded records, in order of first
/// appearance.
fn summarize(records: &[SampleRecord]) -> Result<Vec<Summary>> {
    let mut order: Vec<&str> = Vec::new();
    for r in records {
        if !order.contains(&r.series.as_str()) {
            order.push(&r.series);
        }
    }
    order
        .into_iter()
        .map(|series| {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.series == series && !r.excluded)
                .map(|r| r.value)
                .collect();
            let (mean, std_err, samples) = if values.is_empty() {
                (f64::NAN, f64::NAN, 0)
            } else {
                let e = Estimate::from_values(&values)?;
                (e.mean, e.std_err, e.samples)
            };
            Ok(Summary {
                series: series.to_string(),
                mean,
                std_err,
                samples,
            })
        })
        .collect()
}

/// Runs `f` on a pool of `workers` threads (the global pool for 0).
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    Ok(pool.install(f))
}

fn require_samples(config: &ExperimentConfig) -> Result<()> {
    if config.samples == 0 {
        Err(Error::NoSamples)
    } else {
        Ok(())
    }
}

/// Dispatches on `config.experiment`, then writes `config.output` if set.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let report = match config.experiment {
        ExperimentKind::KostlanRoots => run_kostlan_roots(config),
        ExperimentKind::KostlanCurves => run_kostlan_curves(config),
        ExperimentKind::SupNorm => run_sup_norm(config),
        ExperimentKind::LocalPresence => run_local_presence(config),
        ExperimentKind::BettiBound => {
            let i = config.betti_index.unwrap_or(0);
            betti_lower_bound_report(config.n, i)
        }
    }?;
    if let Some(path) = &config.output {
        report.write_json(path)?;
    }
    Ok(report)
}

fn timed(
    config: &ExperimentConfig,
    body: impl FnOnce() -> Result<ExperimentReport> + Send,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = with_pool(config.workers, body)??;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn single_degree(config: &ExperimentConfig) -> Result<u32> {
    match config.degrees.as_slice() {
        [d] if *d >= 1 => Ok(*d),
        _ => Err(Error::Domain("expected a single degree d >= 1".into())),
    }
}

/// Real roots on `RP^1` of Kostlan binary forms of degree `d`.
pub fn run_kostlan_roots(config: &ExperimentConfig) -> Result<ExperimentReport> {
    require_samples(config)?;
    let d = single_degree(config)?;
    timed(config, || {
        let basis = KostlanBasis::new(1, d)?;
        let records = (0..config.samples)
            .into_par_iter()
            .map(|k| {
                let seed = derive_seed(config.seed, k);
                let roots = projective_root_count(&basis.coefficients(seed))?;
                Ok(SampleRecord {
                    series: "roots".into(),
                    index: k,
                    seed,
                    value: roots as f64,
                    excluded: false,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut report = ExperimentReport::new(config, records)?;
        let s = report.summaries[0].clone();
        let root_d = (d as f64).sqrt();
        report.comparisons.push(Comparison::new(
            "|mean - sqrt(d)| <= 3 std_err",
            LogReal::from_f64((s.mean - root_d).abs()),
            Relation::Le,
            LogReal::from_f64(3.0 * s.std_err),
        ));
        // degree 1 has variance 0, so the check above degenerates to equality
        let c0 = c_sigma_lower(&sphere_pair(1)?)?;
        report.comparisons.push(Comparison::new(
            "mean / sqrt(d) >= 2 c_S0 Vol_h(RP^1)",
            LogReal::from_f64(s.mean / root_d),
            Relation::Ge,
            LogReal::from_f64(2.0 * config.volume.rp1) * c0,
        ));
        report.notes.push(config.volume.note.clone());
        Ok(report)
    })
}

/// Components on `RP^2` of Kostlan curves of each degree in the list.
pub fn run_kostlan_curves(config: &ExperimentConfig) -> Result<ExperimentReport> {
    require_samples(config)?;
    if config.degrees.is_empty() || config.degrees.contains(&0) {
        return Err(Error::Domain("curve degrees must be positive".into()));
    }
    timed(config, || {
        let mut records = Vec::new();
        for &d in &config.degrees {
            let basis = KostlanBasis::new(2, d)?;
            let resolution = config.resolution.max((8.0 * (d as f64).sqrt()).ceil() as usize);
            let series = format!("b0 d={d}");
            let rows = (0..config.samples)
                .into_par_iter()
                .map(|k| {
                    let seed = derive_seed(config.seed, k);
                    let p = basis.polynomial(&basis.coefficients(seed));
                    let r = sphere_components(&p, resolution, config.max_depth)?;
                    Ok(SampleRecord {
                        series: series.clone(),
                        index: k,
                        seed,
                        value: r.projective_count as f64,
                        excluded: !r.sphere.confident,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            records.extend(rows);
        }
        let mut report = ExperimentReport::new(config, records)?;
        let bound = c_sigma_lower(&sphere_pair(2)?)? * LogReal::from_f64(config.volume.rp2);
        let mut ratios = Vec::new();
        for (s, &d) in report.summaries.clone().iter().zip(&config.degrees) {
            let ratio = s.mean / d as f64;
            ratios.push(ratio);
            report.comparisons.push(Comparison::new(
                format!("E(b0)/d >= c_S1 Vol_h(RP^2), d={d}"),
                LogReal::from_f64(ratio),
                Relation::Ge,
                bound,
            ));
        }
        if ratios.len() > 1 {
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            report.comparisons.push(
                Comparison::new(
                    "relative spread of E(b0)/d < 0.25",
                    LogReal::from_f64((max - min) / mean),
                    Relation::Lt,
                    LogReal::from_f64(0.25),
                )
                .exploratory(),
            );
            report
                .notes
                .push("E(b0)/d across degrees is an exploratory trend, not a limit".into());
        }
        report.notes.push(config.volume.note.clone());
        Ok(report)
    })
}

/// `max |g|` over `[-r, r]`: a grid scan, then golden section around the
/// best grid point.
fn sup_abs_1d(g: impl Fn(f64) -> f64, r: f64, points: usize) -> f64 {
    let h = 2.0 * r / points as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for j in 0..=points {
        let v = g(-r + j as f64 * h).abs();
        if v > best.1 {
            best = (j, v);
        }
    }
    let lo = (-r + (best.0 as f64 - 1.0) * h).max(-r);
    let hi = (-r + (best.0 as f64 + 1.0) * h).min(r);
    let refined = golden_section_min(|x| -g(x).abs(), lo, hi, 1e-12 * r.max(1.0));
    best.1.max(-refined.value)
}

/// Sup of `|f|^2` and `|f'|^2` over `B(0, R)` for one-dimensional Fock
/// samples, against `rho_R`.
///
/// The sampler draws unit-variance coefficients, twice the variance of the
/// Gaussian measure in the bound, so both estimates are halved before the
/// comparison.
pub fn run_sup_norm(config: &ExperimentConfig) -> Result<ExperimentReport> {
    require_samples(config)?;
    if config.n != 1 {
        return Err(Error::Unsupported(format!("sup-norm experiment in dimension {}", config.n)));
    }
    let radius = config
        .radius
        .filter(|r| *r > 0.0)
        .ok_or_else(|| Error::Domain("sup-norm needs a positive radius".into()))?;
    let truncation = config.truncation.unwrap_or_else(|| fock_truncation(radius));
    let points = config.resolution.max(16);
    timed(config, || {
        let rows = (0..config.samples)
            .into_par_iter()
            .map(|k| {
                let seed = derive_seed(config.seed, k);
                let f = sample_fock(1, truncation, seed)?;
                let sup_f = sup_abs_1d(|x| f.value(&[x]), radius, points);
                let sup_df = sup_abs_1d(|x| f.gradient(&[x])[0], radius, points);
                let row = |series: &str, value: f64| SampleRecord {
                    series: series.into(),
                    index: k,
                    seed,
                    value,
                    excluded: false,
                };
                Ok([row("sup |f|^2", sup_f * sup_f), row("sup |df|^2", sup_df * sup_df)])
            })
            .collect::<Result<Vec<_>>>()?;
        // series-major order keeps each series contiguous in the table
        let (f_rows, df_rows): (Vec<_>, Vec<_>) = rows.into_iter().map(|[a, b]| (a, b)).unzip();
        let records = f_rows.into_iter().chain(df_rows).collect();
        let mut report = ExperimentReport::new(config, records)?;
        let rho = rho_r(radius, 1)?.value;
        let half = LogReal::from_f64(0.5);
        let sf = report.summaries[0].mean;
        let sdf = report.summaries[1].mean;
        report.comparisons.push(Comparison::new(
            "E(sup |f|^2)/2 <= rho_R/2",
            LogReal::from_f64(0.5 * sf),
            Relation::Le,
            half * rho,
        ));
        report.comparisons.push(Comparison::new(
            "E(sup |df|^2)/2 <= pi n rho_R/2",
            LogReal::from_f64(0.5 * sdf),
            Relation::Le,
            LogReal::from_f64(0.5 * std::f64::consts::PI) * rho,
        ));
        report.notes.push(format!(
            "Fock truncation D = {truncation}; estimates halved to the variance-1/2 normalization"
        ));
        Ok(report)
    })
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    if successes == 0 {
        return (0.0, z * z / (n + z * z));
    }
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn builtin_pair(n: usize, kind: &PairKind) -> Result<RegularPair> {
    match kind {
        PairKind::Sphere => sphere_pair(n),
        PairKind::Product { i } => product_pair(n, *i),
        PairKind::Custom => Err(Error::Unsupported("custom pairs have no built-in recipe".into())),
    }
}

/// Probability that a planar Fock field has a compact component in the
/// ball of radius `R_(U,P)`, against `m_tau` of the pair.
///
/// The event "a copy of the pair's zero set sits in the ball" is replaced
/// by "a compact component sits in the ball", which for a circle is the
/// same event up to the diffeomorphism type of the pair.
pub fn run_local_presence(config: &ExperimentConfig) -> Result<ExperimentReport> {
    require_samples(config)?;
    if config.n != 2 {
        return Err(Error::Unsupported(format!("local presence in dimension {}", config.n)));
    }
    let pair = builtin_pair(2, config.pair.as_ref().unwrap_or(&PairKind::Sphere))?;
    let radius = config.radius.unwrap_or(pair.radius());
    let truncation = config.truncation.unwrap_or_else(|| fock_truncation(radius));
    let resolution = config.resolution.max(16);
    timed(config, || {
        let records = (0..config.samples)
            .into_par_iter()
            .map(|k| {
                let seed = derive_seed(config.seed, k);
                let f = sample_fock(2, truncation, seed)?;
                let (found, r) = compact_component_in_ball(&f, &[0.0, 0.0], radius, resolution, config.max_depth)?;
                Ok(SampleRecord {
                    series: "loop in ball".into(),
                    index: k,
                    seed,
                    value: if found { 1.0 } else { 0.0 },
                    excluded: !r.confident,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut report = ExperimentReport::new(config, records)?;
        let s = report.summaries[0].clone();
        let successes = report
            .records
            .iter()
            .filter(|r| !r.excluded && r.value == 1.0)
            .count() as u64;
        let (lo, hi) = wilson_interval(successes, s.samples, WILSON_Z);
        let m_tau = pair_constants(&pair)?.m_tau.value;
        report.comparisons.push(Comparison::new(
            "Wilson lower bound > 0",
            LogReal::from_f64(lo),
            Relation::Gt,
            LogReal::ZERO,
        ));
        report.comparisons.push(Comparison::new(
            "probability >= m_tau",
            LogReal::from_f64(s.mean),
            Relation::Ge,
            m_tau,
        ));
        report.notes.push(format!(
            "event: compact component of the zero set inside B(0, {radius}); Fock truncation D = {truncation}"
        ));
        report.notes.push(format!("95% Wilson interval [{lo}, {hi}]; m_tau = {m_tau}"));
        Ok(report)
    })
}

/// `ceil(volume / (2^n Vol B(R / sqrt d)))`: the number of disjoint balls
/// of radius `R / sqrt d` that can be packed in a manifold of the given
/// volume, so that `E(N_Sigma) >= packing_count * Prob_Sigma`.
pub fn packing_count(n: usize, radius: f64, d: u32, volume: f64) -> Result<u64> {
    if !(volume > 0.0) || !(radius > 0.0) || d == 0 || n == 0 {
        return Err(Error::Domain("packing count needs positive volume, radius, degree and dimension".into()));
    }
    let r = radius / (d as f64).sqrt();
    let x = volume / (2f64.powi(n as i32) * ball_volume(n, r));
    if !x.is_finite() {
        let ln = volume.ln() - n as f64 * std::f64::consts::LN_2 - log_ball_volume(n, r);
        return Err(Error::Unsupported(format!("packing count exp({ln}) exceeds u64")));
    }
    // ball volumes go through the gamma function; absorb its rounding so an
    // exact integer quotient is not bumped up by one
    Ok((x * (1.0 - 1e-12)).ceil().min(u64::MAX as f64) as u64)
}

/// `b_i(S^k)`; `S^0` is two points.
pub fn sphere_betti(k: usize, i: usize) -> u64 {
    match (k, i) {
        (0, 0) => 2,
        (_, 0) => 1,
        (k, i) if k == i => 1,
        _ => 0,
    }
}

/// `b_i(S^a x S^b)` by the Kunneth rule.
pub fn sphere_product_betti(a: usize, b: usize, i: usize) -> u64 {
    (0..=i).map(|p| sphere_betti(a, p) * sphere_betti(b, i - p)).sum()
}

/// The catalog sum `sum_Sigma c_Sigma b_i(Sigma)` over the sphere and the
/// sphere products of dimension `n - 1`, each `c_Sigma` replaced by the
/// explicit lower bound of its built-in pair.
pub fn betti_lower_bound_report(n: usize, i: usize) -> Result<ExperimentReport> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    let start = Instant::now();
    let mut config = ExperimentConfig::betti_bound(n, i);
    config.resolution = 0;
    let sphere_c = c_sigma_lower(&sphere_pair(n)?)?;
    let mut catalog = vec![CatalogTerm {
        surface: format!("S^{}", n - 1),
        betti: sphere_betti(n - 1, i),
        c_lower: sphere_c,
    }];
    // S^0 x S^0 is not a hypersurface of the line; for n = 1 the catalog is S^0
    // alone and the product term below is the sphere term itself
    let mut target = sphere_c;
    if n >= 2 {
        for j in 0..=(n - 1) / 2 {
            let a = c_sigma_lower(&product_pair(n, j)?)?;
            let b = c_sigma_lower(&product_pair(n, n - 1 - j)?)?;
            let c = if a >= b { a } else { b };
            if j == i.min(n - 1 - i) {
                target = c;
            }
            catalog.push(CatalogTerm {
                surface: format!("S^{j} x S^{}", n - 1 - j),
                betti: sphere_product_betti(j, n - 1 - j, i),
                c_lower: c,
            });
        }
    }
    let aggregate = catalog
        .iter()
        .fold(LogReal::ZERO, |acc, t| acc + LogReal::from_f64(t.betti as f64) * t.c_lower);
    let mut report = ExperimentReport::new(&config, Vec::new())?;
    report.catalog = catalog;
    report.comparisons.push(Comparison::new(
        format!("catalog sum >= c_lower(S^{i} x S^{})", n - 1 - i),
        aggregate,
        Relation::Ge,
        target,
    ));
    // exp(-2 exp(70 n)) as a LogReal
    report.comparisons.push(Comparison::new(
        "catalog sum >= exp(-2 e^(70 n))",
        aggregate,
        Relation::Ge,
        LogReal::from_ln(-2.0 * (70.0 * n as f64).exp()),
    ));
    report.notes.push("lower bound for liminf E(b_i) / (sqrt(d)^n Vol_h)".into());
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_has_one_root() {
        let r = run_kostlan_roots(&ExperimentConfig::kostlan_roots(1, 200, 3)).unwrap();
        let s = &r.summaries[0];
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.std_err, 0.0);
        assert!(r.all_satisfied());
        assert!(r.reaudit());
    }

    #[test]
    fn sqrt_law_at_moderate_degree() {
        let r = run_kostlan_roots(&ExperimentConfig::kostlan_roots(10, 4000, 11)).unwrap();
        let s = &r.summaries[0];
        assert!((s.mean - 10f64.sqrt()).abs() <= 3.0 * s.std_err, "{s:?}");
    }

    #[test]
    fn lines_and_conics() {
        let r = run_kostlan_curves(&ExperimentConfig::kostlan_curves(&[1, 2], 200, 5, 16)).unwrap();
        assert!(r.records.iter().filter(|x| x.series == "b0 d=1").all(|x| x.value == 1.0));
        assert!(r.records.iter().filter(|x| x.series == "b0 d=2").all(|x| x.value <= 1.0));
        let conic = r.summary("b0 d=2").unwrap().mean;
        assert!(conic > 0.0 && conic < 1.0, "{conic}");
        assert!(r.reaudit());
    }

    #[test]
    fn conic_counts_follow_the_signature() {
        // a real conic is nonempty iff its symmetric matrix is indefinite
        let cfg = ExperimentConfig::kostlan_curves(&[2], 300, 9, 24);
        let r = run_kostlan_curves(&cfg).unwrap();
        let basis = KostlanBasis::new(2, 2).unwrap();
        for rec in r.records.iter().filter(|x| !x.excluded) {
            let p = basis.polynomial(&basis.coefficients(rec.seed));
            let mut m = nalgebra::Matrix3::<f64>::zeros();
            for (a, c) in p.terms() {
                let e = a.exponents();
                let idx: Vec<usize> = (0..3).flat_map(|v| std::iter::repeat(v).take(e[v] as usize)).collect();
                if idx[0] == idx[1] {
                    m[(idx[0], idx[0])] += c;
                } else {
                    m[(idx[0], idx[1])] += 0.5 * c;
                    m[(idx[1], idx[0])] += 0.5 * c;
                }
            }
            let ev = m.symmetric_eigenvalues();
            let indefinite = ev.min() < 0.0 && ev.max() > 0.0;
            assert_eq!(rec.value == 1.0, indefinite, "{ev:?}");
        }
    }

    #[test]
    fn small_ball_sup_is_pointwise_variance() {
        let r = run_sup_norm(&ExperimentConfig::sup_norm(0.01, 1, 4000, 2)).unwrap();
        let s = r.summary("sup |f|^2").unwrap();
        assert!((s.mean - 1.0).abs() < 0.05, "{s:?}");
        assert!(r.all_satisfied());
    }

    #[test]
    fn packing_arithmetic() {
        assert_eq!(packing_count(1, 1.0, 100, 10.0).unwrap(), 25);
        let a = packing_count(2, 1.0, 400, 1000.0).unwrap() as f64;
        let b = packing_count(2, 1.0, 800, 1000.0).unwrap() as f64;
        assert!((b / a - 2.0).abs() < 0.01);
        let r = (2f64.sqrt() + 2.0).sqrt();
        let v = 2.0 * std::f64::consts::PI.powi(2);
        let expected = (v / (4.0 * std::f64::consts::PI * r * r / 64.0)).ceil() as u64;
        assert_eq!(packing_count(2, r, 64, v).unwrap(), expected);
        assert!(packing_count(1, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn kunneth_numbers() {
        assert_eq!(sphere_product_betti(0, 0, 0), 4);
        assert_eq!(sphere_product_betti(0, 1, 1), 2);
        assert_eq!(sphere_product_betti(1, 1, 1), 2);
        assert_eq!(sphere_product_betti(1, 0, 0), 2);
        assert_eq!(sphere_product_betti(2, 0, 1), 0);
        assert_eq!(sphere_betti(0, 0), 2);
        assert_eq!(sphere_betti(2, 1), 0);
        assert_eq!(sphere_betti(2, 2), 1);
    }

    #[test]
    fn betti_catalogs() {
        let r = betti_lower_bound_report(1, 0).unwrap();
        assert_eq!(r.catalog.len(), 1);
        assert_eq!(r.catalog[0].betti, 2);
        let expected = LogReal::from_f64(2.0) * r.catalog[0].c_lower;
        assert_eq!(r.comparisons[0].lhs, expected);
        assert!(r.all_satisfied());

        let r = betti_lower_bound_report(2, 1).unwrap();
        let b: Vec<u64> = r.catalog.iter().map(|t| t.betti).collect();
        assert_eq!(b, vec![1, 2]);
        for n in 1..=4 {
            for i in 0..n {
                assert!(betti_lower_bound_report(n, i).unwrap().all_satisfied(), "n={n} i={i}");
            }
        }
        assert!(betti_lower_bound_report(2, 2).is_err());
    }

    #[test]
    fn wilson_limits() {
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tampered_reports_fail_reaudit() {
        let mut r = run_kostlan_roots(&ExperimentConfig::kostlan_roots(6, 300, 1)).unwrap();
        assert!(r.reaudit());
        r.records[0].value += 2.0;
        assert!(!r.reaudit());
        let mut r = run_kostlan_roots(&ExperimentConfig::kostlan_roots(6, 300, 1)).unwrap();
        r.comparisons[0].satisfied = !r.comparisons[0].satisfied;
        assert!(!r.reaudit());
    }

    #[test]
    fn report_json_round_trip() {
        let r = run_kostlan_roots(&ExperimentConfig::kostlan_roots(4, 50, 8)).unwrap();
        let back: ExperimentReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back.records, r.records);
        assert_eq!(back.summaries, r.summaries);
        assert!(back.reaudit());
    }
}
