//! Seeded audit suites over halfspace, ball and ellipsoid families.
//!
//! Each draw picks a family and a point, then evaluates the requested checks.
//! Projections made here are monitoring only and are never charged to a run.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{
    check_centralized, dist_to_intersection, estimate_error_bound, project_halfspace_intersection,
    rate_bounds, support_halfspaces, tail_step_ratio, wedge_error_bound, IntersectionOracle,
    DEFAULT_TAIL_FRACTION,
};
use crate::error::{Error, Result};
use crate::instances::{gen_ball_pair, gen_ellipsoid_pair, gen_halfspace_pair, GeneratorConfig};
use crate::methods::{centralize, run_with, step_ccrm, step_pcrm, MethodKind, RunOptions, StoppingCriterion, Trace};
use crate::point::Point;
use crate::sets::{ConvexSet, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditCheck {
    /// Centralization output is centralized; if not strictly, it is feasible.
    Centralized,
    /// Firm quasi-nonexpansiveness of centralization (1/4) and cCRM (1/8).
    Qne,
    /// pCRM at a strictly centralized point equals the support-halfspace projection.
    Oracle,
    /// Tail contraction of MAP, SPM and cCRM within the rate bounds.
    Rates,
    /// Error-bound estimate is at least the known wedge constant.
    Eb,
}

impl AuditCheck {
    pub const ALL: [AuditCheck; 5] =
        [AuditCheck::Centralized, AuditCheck::Qne, AuditCheck::Oracle, AuditCheck::Rates, AuditCheck::Eb];

    pub fn id(self) -> &'static str {
        match self {
            AuditCheck::Centralized => "centralized",
            AuditCheck::Qne => "qne",
            AuditCheck::Oracle => "oracle",
            AuditCheck::Rates => "rates",
            AuditCheck::Eb => "eb",
        }
    }

    /// Parses a comma-separated list such as `centralized,qne`.
    pub fn parse_list(s: &str) -> Result<Vec<AuditCheck>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let c: AuditCheck = part.parse()?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no audit checks given".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for AuditCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AuditCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuditCheck::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown audit check '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub struct AuditConfig {
    pub seed: u64,
    /// Point draws for the centralized, qne and oracle checks.
    pub draws: usize,
    /// Wedge draws for the rates and eb checks.
    pub rate_draws: usize,
    pub dim: usize,
    pub eb_samples: usize,
    pub checks: Vec<AuditCheck>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { seed: 1234, draws: 1000, rate_draws: 12, dim: 6, eb_samples: 4000, checks: AuditCheck::ALL.to_vec() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Halfspace,
    Ball,
    Ellipsoid,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    /// Draw number, or for rate checks the offending iterate index.
    pub index: usize,
    pub family: Family,
    /// Amount by which the inequality failed (positive means violated).
    pub residual: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub check: AuditCheck,
    pub evaluated: usize,
    pub skipped: usize,
    /// Largest slack-normalized residual seen; negative means every case had room.
    pub worst_residual: f64,
    pub violations: Vec<Violation>,
}

impl CheckSummary {
    fn new(check: AuditCheck) -> Self {
        Self { check, evaluated: 0, skipped: 0, worst_residual: f64::NEG_INFINITY, violations: Vec::new() }
    }

    /// Records one evaluation; `residual > 0` is a violation.
    fn record(&mut self, index: usize, family: Family, residual: f64, detail: impl FnOnce() -> String) {
        self.evaluated += 1;
        if residual > self.worst_residual || residual.is_nan() {
            self.worst_residual = residual;
        }
        if !(residual <= 0.0) {
            self.violations.push(Violation { index, family, residual, detail: detail() });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub draws: usize,
    pub dim: usize,
    pub checks: Vec<CheckSummary>,
    pub passed: bool,
}

impl AuditReport {
    pub fn check(&self, c: AuditCheck) -> Option<&CheckSummary> {
        self.checks.iter().find(|s| s.check == c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Draw {
    family: Family,
    x: ConvexSet<f64>,
    y: ConvexSet<f64>,
    /// A point of `X ∩ Y`.
    s: Point<f64>,
    z: Point<f64>,
}

fn draw(cfg: &AuditConfig, i: usize, ellipsoid_cfg: &GeneratorConfig) -> Result<Draw> {
    let seed = cfg.seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ (i as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = [Family::Halfspace, Family::Ball, Family::Ellipsoid][i % 3];
    let (x, y, s) = match family {
        Family::Halfspace => {
            let angle = rng.random_range(0.1..PI / 2.0);
            let (x, y, _) = gen_halfspace_pair(angle, cfg.dim, seed)?;
            (x, y, Point::zeros(cfg.dim))
        }
        Family::Ball => gen_ball_pair(cfg.dim, seed)?,
        Family::Ellipsoid => {
            let inst = gen_ellipsoid_pair(ellipsoid_cfg, i / 3)?;
            (inst.e1, inst.e2, inst.witness)
        }
    };
    let spread: f64 = rng.random_range(0.5..6.0);
    let v: Vec<f64> = (0..cfg.dim).map(|_| spread * rng.sample::<f64, _>(StandardNormal)).collect();
    let z = &s + &Point::new(v)?;
    Ok(Draw { family, x, y, s, z })
}

/// Runs the configured checks and collects violations.
pub fn run_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    if cfg.dim < 2 {
        return Err(Error::InvalidArgument("audit dimension must be at least 2".into()));
    }
    let tol = DEFAULT_TOL;
    let wants = |c| cfg.checks.contains(&c);
    let mut summaries: Vec<CheckSummary> = cfg.checks.iter().map(|&c| CheckSummary::new(c)).collect();
    let idx = |c: AuditCheck| cfg.checks.iter().position(|&k| k == c);
    let ellipsoid_cfg = GeneratorConfig::new(cfg.dim, cfg.draws.div_ceil(3).max(1), 1.1, cfg.seed);

    if wants(AuditCheck::Centralized) || wants(AuditCheck::Qne) || wants(AuditCheck::Oracle) {
        for i in 0..cfg.draws {
            let Draw { family, x, y, s, z } = draw(cfg, i, &ellipsoid_cfg)?;
            let zc = centralize(&x, &y, &z, tol)?;

            if let Some(k) = idx(AuditCheck::Centralized) {
                let c = check_centralized(&x, &y, &zc)?;
                let scale = 1e-10 * (1.0 + zc.norm_sq());
                let mut residual = c.inner_product - scale;
                if !c.strictly {
                    // Feasible to 1e-8.
                    residual = residual.max(c.gap_x.max(c.gap_y) - 1e-8 * (1.0 + zc.norm()));
                }
                summaries[k].record(i, family, residual, || {
                    format!("inner product {:e}, strictly {}", c.inner_product, c.strictly)
                });
            }

            if let Some(k) = idx(AuditCheck::Qne) {
                let scale = 1e-8 * (1.0 + z.dist(&s).powi(2));
                let lhs = zc.dist(&s).powi(2);
                let rhs = z.dist(&s).powi(2) - 0.25 * z.dist(&zc).powi(2);
                summaries[k].record(i, family, lhs - rhs - scale, || "centralization 1/4 inequality".into());
                match step_ccrm(&x, &y, &z, tol) {
                    Ok(tz) => {
                        let lhs = tz.dist(&s).powi(2);
                        let rhs = z.dist(&s).powi(2) - 0.125 * z.dist(&tz).powi(2);
                        summaries[k].record(i, family, lhs - rhs - scale, || "cCRM 1/8 inequality".into());
                    }
                    Err(Error::RankDeficient { .. }) => summaries[k].skipped += 1,
                    Err(e) => return Err(e),
                }
            }

            if let Some(k) = idx(AuditCheck::Oracle) {
                let c = check_centralized(&x, &y, &zc)?;
                if !c.strictly {
                    summaries[k].skipped += 1;
                } else {
                    let pair = support_halfspaces(&x, &y, &zc)?;
                    let circ = step_pcrm(&x, &y, &zc, tol)?;
                    match project_halfspace_intersection(&pair, &zc) {
                        Ok(p) if !circ.is_rank_deficient() => {
                            let diff = circ.center.dist(&p);
                            let scale = 1e-7 * (1.0 + zc.norm());
                            summaries[k].record(i, family, diff - scale, || format!("pCRM vs oracle {diff:e}"));
                        }
                        _ => summaries[k].skipped += 1,
                    }
                }
            }
        }
    }

    if let Some(k) = idx(AuditCheck::Rates) {
        for i in 0..cfg.rate_draws {
            audit_rates(cfg, i, &mut summaries[k])?;
        }
    }

    if let Some(k) = idx(AuditCheck::Eb) {
        for i in 0..cfg.rate_draws {
            let angle = wedge_angle(i, cfg.rate_draws);
            let (x, y, _) = gen_halfspace_pair::<f64>(angle, cfg.dim, cfg.seed ^ i as u64)?;
            let est = estimate_error_bound(
                &x,
                &y,
                &IntersectionOracle::Halfspaces,
                &Point::zeros(cfg.dim),
                1.0,
                cfg.eb_samples,
                cfg.seed.wrapping_add(i as u64),
            )?;
            // The estimate is a minimum over samples, so it can only sit above
            // the exact constant.
            let exact = wedge_error_bound(angle);
            let residual = (exact - est.omega - 1e-9).max((est.beta.powi(2) + est.omega.powi(2) - 1.0).abs() - 1e-12);
            summaries[k].record(i, Family::Halfspace, residual, || {
                format!("angle {angle:.4}: estimate {:.6} below exact {exact:.6}", est.omega)
            });
        }
    }

    let passed = summaries.iter().all(CheckSummary::passed);
    Ok(AuditReport { seed: cfg.seed, draws: cfg.draws, dim: cfg.dim, checks: summaries, passed })
}

fn wedge_angle(i: usize, total: usize) -> f64 {
    // Spread over [pi/12, pi/2].
    let t = if total > 1 { i as f64 / (total - 1) as f64 } else { 0.5 };
    PI / 12.0 + t * (PI / 2.0 - PI / 12.0)
}

/// Tail per-iteration distance ratios on a wedge against the rate bounds
/// for the restricted constant `sin(angle)`.
fn audit_rates(cfg: &AuditConfig, i: usize, summary: &mut CheckSummary) -> Result<()> {
    let angle = wedge_angle(i, cfg.rate_draws);
    let seed = cfg.seed ^ (i as u64).wrapping_mul(31);
    let (x, y, omega) = gen_halfspace_pair::<f64>(angle, cfg.dim, seed)?;
    let bounds = rate_bounds(omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z0 = Point::new((0..cfg.dim).map(|_| 5.0 * rng.sample::<f64, _>(StandardNormal)).collect())?;
    let opts = RunOptions { trace: Trace::Full, ..RunOptions::default() };
    // Budget only: a gap stop would fire at once whenever z0 lies in X.
    let stop = [StoppingCriterion::ProjectionBudget { max: 400 }];
    for (method, bound) in [(MethodKind::Map, bounds.map), (MethodKind::Spm, bounds.spm), (MethodKind::Ccrm, bounds.ccrm)] {
        let run = run_with(method, &x, &y, &z0, &stop, &opts)?;
        let dists = run
            .iterates
            .iter()
            .map(|z| dist_to_intersection(&x, &y, &IntersectionOracle::Halfspaces, z))
            .collect::<Result<Vec<_>>>()?;
        let floor = 1e-11 * (1.0 + z0.norm());
        match tail_step_ratio(&dists, DEFAULT_TAIL_FRACTION, floor) {
            Some(q) => summary.record(i, Family::Halfspace, q - bound - 0.05, || {
                format!("{method} at angle {angle:.4}: tail ratio {q:.4} vs bound {bound:.4} (iterations {})", run.iterations())
            }),
            None => summary.skipped += 1,
        }
    }
    Ok(())
}
