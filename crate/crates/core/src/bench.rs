//! Method-by-instance benchmark grids, summary statistics and performance
//! profiles.
//!
//! Cost is the number of charged projections. Runs that end without meeting
//! the tolerance count as the budget in statistics and as `+inf` in profiles.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::EllipsoidInstance;
use crate::methods::{run_with, MethodKind, RunOptions, StoppingCriterion, Trace};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "CIRCUMFEAS_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    /// Overlapping instances, stop on the gap to `E1`.
    Interior,
    /// Tangent instances, stop on the distance to the tangency point.
    Singleton,
}

impl SuiteKind {
    pub fn id(self) -> &'static str {
        match self {
            SuiteKind::Interior => "interior",
            SuiteKind::Singleton => "singleton",
        }
    }

    /// Overlap factor used when generating this suite.
    pub fn lambda(self) -> f64 {
        match self {
            SuiteKind::Interior => 1.1,
            SuiteKind::Singleton => 1.0,
        }
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(SuiteKind::Interior),
            "singleton" => Ok(SuiteKind::Singleton),
            _ => Err(Error::InvalidArgument(format!("unknown suite '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StopPolicy {
    pub suite: SuiteKind,
    pub eps: f64,
    pub budget: u64,
}

impl StopPolicy {
    pub fn interior() -> Self {
        Self { suite: SuiteKind::Interior, eps: 1e-6, budget: 10_000 }
    }

    pub fn singleton() -> Self {
        Self { suite: SuiteKind::Singleton, eps: 1e-3, budget: 500_000 }
    }

    pub fn for_suite(suite: SuiteKind) -> Self {
        match suite {
            SuiteKind::Interior => Self::interior(),
            SuiteKind::Singleton => Self::singleton(),
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn criteria(&self, inst: &EllipsoidInstance<f64>) -> Result<Vec<StoppingCriterion<f64>>> {
        let tol = match self.suite {
            SuiteKind::Interior => StoppingCriterion::GapToFirstSet { eps: self.eps },
            SuiteKind::Singleton => {
                if !inst.is_tangent() {
                    return Err(Error::InvalidArgument(format!(
                        "{}: singleton policy needs a tangent instance (lambda = 1), got lambda = {}",
                        inst.id, inst.lambda
                    )));
                }
                StoppingCriterion::DistanceToKnownSolution { eps: self.eps, solution: inst.witness.clone() }
            }
        };
        Ok(vec![tol, StoppingCriterion::ProjectionBudget { max: self.budget }])
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Worker count; `None` reads `CIRCUMFEAS_THREADS`, then uses all cores.
    pub threads: Option<usize>,
    /// Keep the per-iterate residual sequence of every run.
    pub keep_traces: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub method: MethodKind,
    pub instance_id: String,
    pub instance_index: usize,
    pub projections: u64,
    pub iterations: usize,
    /// A [`StopReason`] id, or `"error"`.
    pub stop_reason: String,
    pub solved: bool,
    /// Final distance to the witness (singleton) or gap to `E1` (interior).
    pub final_residual: f64,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub residuals: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Statistics {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single value.
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Set when `count == 1` and `std` is not meaningful.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodStats {
    pub method: MethodKind,
    pub solved: usize,
    pub stats: Statistics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileTable {
    pub methods: Vec<MethodKind>,
    /// `(tau, fraction per method)` in increasing `tau`.
    pub rows: Vec<(f64, Vec<f64>)>,
    /// Instances dropped because no method solved them.
    pub excluded: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchmarkReport {
    pub policy: StopPolicy,
    pub methods: Vec<MethodKind>,
    pub instance_ids: Vec<String>,
    /// Method-major: all instances of `methods[0]`, then `methods[1]`, ...
    pub records: Vec<BenchRecord>,
    pub stats: Vec<MethodStats>,
}

impl BenchmarkReport {
    pub fn records_for(&self, method: MethodKind) -> impl Iterator<Item = &BenchRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    /// Statistics cost: projections when solved, the budget otherwise.
    pub fn stat_cost(&self, r: &BenchRecord) -> f64 {
        if r.solved {
            r.projections as f64
        } else {
            self.policy.budget as f64
        }
    }

    pub fn stats_for(&self, method: MethodKind) -> Option<&MethodStats> {
        self.stats.iter().find(|s| s.method == method)
    }

    pub fn profile(&self, taus: &[f64]) -> Result<ProfileTable> {
        performance_profile(self, taus)
    }
}

pub fn worker_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs every method on every instance. Individual run failures are
/// recorded with stop reason `error` and the suite continues.
pub fn run_suite(
    instances: &[EllipsoidInstance<f64>],
    methods: &[MethodKind],
    policy: StopPolicy,
    opts: &SuiteOptions,
) -> Result<BenchmarkReport> {
    if instances.is_empty() || methods.is_empty() {
        return Err(Error::InvalidArgument("benchmark needs at least one instance and one method".into()));
    }
    if !(policy.eps > 0.0) || policy.budget == 0 {
        return Err(Error::InvalidArgument("policy needs a positive tolerance and budget".into()));
    }
    // Refuse the whole suite up front rather than failing every run.
    for inst in instances {
        policy.criteria(inst)?;
    }
    let jobs: Vec<(MethodKind, &EllipsoidInstance<f64>)> =
        methods.iter().flat_map(|&m| instances.iter().map(move |i| (m, i))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(opts.threads))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    let records: Vec<BenchRecord> =
        pool.install(|| jobs.par_iter().map(|&(m, inst)| run_one(m, inst, &policy, opts.keep_traces)).collect());

    let stats = methods
        .iter()
        .map(|&m| {
            let mine: Vec<&BenchRecord> = records.iter().filter(|r| r.method == m).collect();
            let costs: Vec<f64> = mine
                .iter()
                .map(|r| if r.solved { r.projections as f64 } else { policy.budget as f64 })
                .collect();
            Ok(MethodStats { method: m, solved: mine.iter().filter(|r| r.solved).count(), stats: summarize(&costs)? })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BenchmarkReport {
        policy,
        methods: methods.to_vec(),
        instance_ids: instances.iter().map(|i| i.id.clone()).collect(),
        records,
        stats,
    })
}

fn run_one(method: MethodKind, inst: &EllipsoidInstance<f64>, policy: &StopPolicy, keep: bool) -> BenchRecord {
    let started = Instant::now();
    let opts = RunOptions { trace: Trace::Endpoints, ..RunOptions::default() };
    let outcome = policy
        .criteria(inst)
        .and_then(|stop| run_with(method, &inst.e1, &inst.e2, &inst.z0, &stop, &opts));
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok(run) => {
            let residuals = keep.then(|| {
                run.distances.clone().unwrap_or_else(|| run.gaps.clone())
            });
            log::debug!("{} {}: {} after {} projections", method, inst.id, run.stop_reason, run.total_projections);
            BenchRecord {
                method,
                instance_id: inst.id.clone(),
                instance_index: inst.index,
                projections: run.total_projections,
                iterations: run.iterations(),
                stop_reason: run.stop_reason.id().to_string(),
                solved: run.stop_reason.solved(),
                final_residual: run.final_residual(),
                wall_ms,
                error: None,
                residuals,
            }
        }
        Err(e) => {
            log::warn!("{} {}: run failed: {e}", method, inst.id);
            BenchRecord {
                method,
                instance_id: inst.id.clone(),
                instance_index: inst.index,
                projections: 0,
                iterations: 0,
                stop_reason: "error".to_string(),
                solved: false,
                final_residual: f64::NAN,
                wall_ms,
                error: Some(e.to_string()),
                residuals: None,
            }
        }
    }
}

/// Mean, sample standard deviation, median, min and max.
pub fn summarize(values: &[f64]) -> Result<Statistics> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot summarize an empty sample".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    Ok(Statistics { count: n, mean, std, median, min: sorted[0], max: sorted[n - 1], degenerate: n == 1 })
}

/// `2^(k/8)` for `k = 0..=64`, covering ratios up to 256.
pub fn default_taus() -> Vec<f64> {
    (0..=64).map(|k| 2f64.powf(k as f64 / 8.0)).collect()
}

/// Profile of a report; unsolved runs cost `+inf`.
pub fn performance_profile(report: &BenchmarkReport, taus: &[f64]) -> Result<ProfileTable> {
    let costs: Vec<(MethodKind, Vec<f64>)> = report
        .methods
        .iter()
        .map(|&m| {
            let row = report
                .instance_ids
                .iter()
                .map(|id| {
                    report
                        .records
                        .iter()
                        .find(|r| r.method == m && &r.instance_id == id)
                        .filter(|r| r.solved)
                        .map_or(f64::INFINITY, |r| r.projections as f64)
                })
                .collect();
            (m, row)
        })
        .collect();
    profile_from_costs(&costs, &report.instance_ids, taus)
}

/// `rho_m(tau)` = fraction of instances with `cost(m, i) <= tau * min_m' cost(m', i)`.
pub fn profile_from_costs(costs: &[(MethodKind, Vec<f64>)], instance_ids: &[String], taus: &[f64]) -> Result<ProfileTable> {
    if costs.is_empty() || instance_ids.is_empty() {
        return Err(Error::InvalidArgument("profile needs at least one method and instance".into()));
    }
    if costs.iter().any(|(_, c)| c.len() != instance_ids.len()) {
        return Err(Error::InvalidArgument("cost rows must have one entry per instance".into()));
    }
    if taus.iter().any(|&t| !(t >= 1.0)) {
        return Err(Error::InvalidArgument("profile taus must be at least 1".into()));
    }
    let mut taus = taus.to_vec();
    taus.sort_by(f64::total_cmp);

    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (i, id) in instance_ids.iter().enumerate() {
        let best = costs.iter().map(|(_, c)| c[i]).fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            kept.push((i, best));
        } else {
            log::warn!("profile: no method solved {id}; excluded");
            excluded.push(id.clone());
        }
    }
    let rows = taus
        .iter()
        .map(|&tau| {
            let fractions = costs
                .iter()
                .map(|(_, c)| {
                    if kept.is_empty() {
                        return 0.0;
                    }
                    let hits = kept.iter().filter(|&&(i, best)| c[i] <= tau * best).count();
                    hits as f64 / kept.len() as f64
                })
                .collect();
            (tau, fractions)
        })
        .collect();
    Ok(ProfileTable { methods: costs.iter().map(|(m, _)| *m).collect(), rows, excluded })
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

pub const RECORDS_HEADER: &str = "method,instance_id,projections,iterations,stop_reason,final_residual,wall_ms";
pub const STATS_HEADER: &str = "method,count,solved,mean,std,median,min,max,degenerate";

/// `records.csv`. Wall time is left empty unless `with_wall_time`, so that
/// repeated runs produce identical bytes.
pub fn records_csv(report: &BenchmarkReport, with_wall_time: bool) -> String {
    let mut out = format!("{RECORDS_HEADER}\n");
    for r in &report.records {
        let wall = if with_wall_time { format!("{:.3}", r.wall_ms) } else { String::new() };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e},{}",
            r.method.id(),
            r.instance_id,
            r.projections,
            r.iterations,
            r.stop_reason,
            r.final_residual,
            wall
        );
    }
    out
}

pub fn stats_csv(report: &BenchmarkReport) -> String {
    let mut out = format!("{STATS_HEADER}\n");
    for s in &report.stats {
        let t = &s.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.method.id(),
            t.count,
            s.solved,
            t.mean,
            t.std,
            t.median,
            t.min,
            t.max,
            t.degenerate
        );
    }
    out
}

pub fn profile_csv(table: &ProfileTable) -> String {
    let mut out = String::from("tau");
    for m in &table.methods {
        out.push(',');
        out.push_str(m.id());
    }
    out.push('\n');
    for (tau, fractions) in &table.rows {
        let _ = write!(out, "{tau}");
        for f in fractions {
            let _ = write!(out, ",{f}");
        }
        out.push('\n');
    }
    out
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Writes `records.csv`, `stats.csv` and `profile.csv` into `dir`.
pub fn write_report(report: &BenchmarkReport, dir: &Path, taus: &[f64], with_wall_time: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let profile = report.profile(taus)?;
    // Render everything first so a failure leaves no partial set.
    let files = [
        ("records.csv", records_csv(report, with_wall_time)),
        ("stats.csv", stats_csv(report)),
        ("profile.csv", profile_csv(&profile)),
    ];
    for (name, body) in &files {
        write_atomic(&dir.join(name), body)?;
    }
    Ok(())
}
