//! Projection and circumcenter iterations for `find z in X ∩ Y`, plus the
//! fixed-point driver that runs them under gap, distance and budget rules.
//!
//! Projection accounting: MAP, SPM, CRM, pCRM and CRMprod are charged two
//! projections per iteration, cCRM four. In CRMprod the projection onto the
//! diagonal is an average and is not charged. Monitoring the gap
//! `||P_X(z^k) - z^k||` is free: every method needs `P_X(z^k)` for its next
//! step anyway, so the driver computes it once and shares it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circumcenter::{circumcenter3, CircumcenterResult, Degeneracy};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Scalar;
use crate::sets::{ConvexSet, DEFAULT_TOL};

/// Outer-iteration cap applied regardless of the stopping criteria.
pub const ITERATION_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Map,
    Spm,
    Crm,
    Pcrm,
    CrmProd,
    Ccrm,
}

impl MethodKind {
    pub const ALL: [MethodKind; 6] = [
        MethodKind::Map,
        MethodKind::Spm,
        MethodKind::Crm,
        MethodKind::Pcrm,
        MethodKind::CrmProd,
        MethodKind::Ccrm,
    ];

    /// Projections charged per iteration.
    pub fn projections_per_iteration(self) -> u64 {
        match self {
            MethodKind::Ccrm => 4,
            _ => 2,
        }
    }

    /// Lowercase identifier used on the command line and in CSV files.
    pub fn id(self) -> &'static str {
        match self {
            MethodKind::Map => "map",
            MethodKind::Spm => "spm",
            MethodKind::Crm => "crm",
            MethodKind::Pcrm => "pcrm",
            MethodKind::CrmProd => "crmprod",
            MethodKind::Ccrm => "ccrm",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodKind::Map => "MAP",
            MethodKind::Spm => "SPM",
            MethodKind::Crm => "CRM",
            MethodKind::Pcrm => "pCRM",
            MethodKind::CrmProd => "CRMprod",
            MethodKind::Ccrm => "cCRM",
        })
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

// ---------------------------------------------------------------------------
// Single steps
// ---------------------------------------------------------------------------

fn check_pair<T: Scalar>(x: &ConvexSet<T>, y: &ConvexSet<T>, z: &Point<T>) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::dim(x.dim(), y.dim()));
    }
    if z.dim() != x.dim() {
        return Err(Error::dim(x.dim(), z.dim()));
    }
    Ok(())
}

/// MAP: `P_Y(P_X(z))`.
pub fn step_map<T: Scalar>(x: &ConvexSet<T>, y: &ConvexSet<T>, z: &Point<T>, tol: T) -> Result<Point<T>> {
    check_pair(x, y, z)?;
    y.project(&x.project(z, tol)?, tol)
}

/// SPM (Cimmino, equal weights): `(P_X(z) + P_Y(z)) / 2`.
pub fn step_spm<T: Scalar>(x: &ConvexSet<T>, y: &ConvexSet<T>, z: &Point<T>, tol: T) -> Result<Point<T>> {
    check_pair(x, y, z)?;
    Ok(x.project(z, tol)?.midpoint(&y.project(z, tol)?))
}

/// CRM: `circ(z, R_X z, R_Y R_X z)`.
pub fn step_crm<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z: &Point<T>,
    tol: T,
) -> Result<CircumcenterResult<T>> {
    check_pair(x, y, z)?;
    let rx = x.reflect(z, tol)?;
    let ryrx = y.reflect(&rx, tol)?;
    Ok(circumcenter3(z, &rx, &ryrx))
}

/// Parallel CRM: `circ(z, R_X z, R_Y z)`.
pub fn step_pcrm<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z: &Point<T>,
    tol: T,
) -> Result<CircumcenterResult<T>> {
    check_pair(x, y, z)?;
    Ok(circumcenter3(z, &x.reflect(z, tol)?, &y.reflect(z, tol)?))
}

/// Centralization `z_C = (z_MAP + P_X(z_MAP)) / 2` with `z_MAP = P_Y P_X z`.
pub fn centralize<T: Scalar>(x: &ConvexSet<T>, y: &ConvexSet<T>, z: &Point<T>, tol: T) -> Result<Point<T>> {
    check_pair(x, y, z)?;
    let z_map = y.project(&x.project(z, tol)?, tol)?;
    Ok(z_map.midpoint(&x.project(&z_map, tol)?))
}

/// Every intermediate of one cCRM step.
#[derive(Clone, Debug)]
pub struct CcrmStep<T> {
    pub px: Point<T>,
    pub z_map: Point<T>,
    /// `P_X(z_MAP)`, which also equals `P_X(z_C)`.
    pub px_map: Point<T>,
    pub z_c: Point<T>,
    pub py_c: Point<T>,
    pub circumcenter: CircumcenterResult<T>,
}

impl<T: Scalar> CcrmStep<T> {
    pub fn next(&self) -> &Point<T> {
        &self.circumcenter.center
    }
}

fn ccrm_from_px<T: Scalar>(x: &ConvexSet<T>, y: &ConvexSet<T>, px: Point<T>, tol: T) -> Result<CcrmStep<T>> {
    let z_map = y.project(&px, tol)?;
    let px_map = x.project(&z_map, tol)?;
    let z_c = z_map.midpoint(&px_map);
    let py_c = y.project(&z_c, tol)?;
    let rx = z_c.reflect_through(&px_map);
    let ry = z_c.reflect_through(&py_c);
    let circumcenter = circumcenter3(&z_c, &rx, &ry);
    Ok(CcrmStep { px, z_map, px_map, z_c, py_c, circumcenter })
}

/// One cCRM step with all intermediates (four projections).
pub fn ccrm_step_detail<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z: &Point<T>,
    tol: T,
) -> Result<CcrmStep<T>> {
    check_pair(x, y, z)?;
    ccrm_from_px(x, y, x.project(z, tol)?, tol)
}

/// cCRM: the parallel circumcenter taken at `centralize(z)`.
pub fn step_ccrm<T: Scalar>(x: &ConvexSet<T>, y: &ConvexSet<T>, z: &Point<T>, tol: T) -> Result<Point<T>> {
    let step = ccrm_step_detail(x, y, z, tol)?;
    if step.circumcenter.is_rank_deficient() {
        return Err(Error::RankDeficient { iteration: 0 });
    }
    Ok(step.circumcenter.center)
}

/// CRMprod in `R^{2n}`: `circ(zz, R_K zz, R_D R_K zz)` with `K = X x Y`.
pub fn step_crmprod<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    zz: &Point<T>,
    tol: T,
) -> Result<CircumcenterResult<T>> {
    if x.dim() != y.dim() {
        return Err(Error::dim(x.dim(), y.dim()));
    }
    if zz.dim() != 2 * x.dim() {
        return Err(Error::dim(2 * x.dim(), zz.dim()));
    }
    let (a, b) = zz.split(x.dim());
    let rx = a.reflect_through(&x.project(&a, tol)?);
    let py = y.project(&b, tol)?;
    Ok(crmprod_from_px(zz, &rx, &b, &py))
}

/// `rx_first` and `py_second` come from the two blocks of `zz`.
fn crmprod_from_px<T: Scalar>(zz: &Point<T>, rx_first: &Point<T>, second: &Point<T>, py_second: &Point<T>) -> CircumcenterResult<T> {
    let ry_second = second.reflect_through(py_second);
    let rk = rx_first.concat(&ry_second);
    let rdrk = ry_second.concat(rx_first);
    circumcenter3(zz, &rk, &rdrk)
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum StoppingCriterion<T> {
    /// Stop once `||P_X(z^k) - z^k|| < eps`; for CRMprod, `||P_{X x Y}(z^k) - z^k||` on the lifted iterate.
    GapToFirstSet { eps: T },
    /// Stop once `||z^k - solution|| < eps`.
    DistanceToKnownSolution { eps: T, solution: Point<T> },
    /// Stop before a step that would exceed `max` charged projections.
    ProjectionBudget { max: u64 },
}

impl<T: Scalar> StoppingCriterion<T> {
    fn validate(&self) -> Result<()> {
        match self {
            Self::GapToFirstSet { eps } | Self::DistanceToKnownSolution { eps, .. }
                if !(*eps > T::zero()) =>
            {
                Err(Error::InvalidArgument("stopping tolerance must be positive".into()))
            }
            Self::ProjectionBudget { max: 0 } => {
                Err(Error::InvalidArgument("projection budget must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Gap,
    Distance,
    Budget,
    IterationCap,
    /// The circumcenter was undefined (collinear reflections).
    RankDeficient,
}

impl StopReason {
    pub fn id(self) -> &'static str {
        match self {
            StopReason::Gap => "gap",
            StopReason::Distance => "distance",
            StopReason::Budget => "budget",
            StopReason::IterationCap => "iteration_cap",
            StopReason::RankDeficient => "rank_deficient",
        }
    }

    /// Whether the run reached a tolerance criterion.
    pub fn solved(self) -> bool {
        matches!(self, StopReason::Gap | StopReason::Distance)
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// How much of the trajectory a run keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Trace {
    /// Every iterate.
    #[default]
    Full,
    /// Start point and final iterate only; scalar traces are always kept.
    Endpoints,
}

#[derive(Clone, Debug)]
pub struct RunOptions<T> {
    pub tol: T,
    pub trace: Trace,
    pub iteration_cap: usize,
}

impl<T: Scalar> Default for RunOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(DEFAULT_TOL), trace: Trace::Full, iteration_cap: ITERATION_CAP }
    }
}

/// Full record of one method run. For CRMprod, points are first blocks.
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct MethodRun<T> {
    pub method: MethodKind,
    pub iterates: Vec<Point<T>>,
    /// Projections charged by each step; `len() == iterations`.
    pub step_projections: Vec<u64>,
    pub total_projections: u64,
    /// `||P_X(z^k) - z^k||` for every visited iterate (including the last).
    pub gaps: Vec<T>,
    /// `||z^k - solution||` when a known solution was supplied.
    pub distances: Option<Vec<T>>,
    pub stop_reason: StopReason,
    pub wall_time_secs: f64,
}

impl<T: Scalar> MethodRun<T> {
    pub fn iterations(&self) -> usize {
        self.step_projections.len()
    }

    pub fn final_point(&self) -> &Point<T> {
        self.iterates.last().expect("run records at least the start point")
    }

    pub fn final_gap(&self) -> T {
        *self.gaps.last().expect("gap recorded at the start point")
    }

    pub fn final_distance(&self) -> Option<T> {
        self.distances.as_ref().and_then(|d| d.last().copied())
    }

    /// The residual the stop rule watched: distance when known, else gap.
    pub fn final_residual(&self) -> T {
        self.final_distance().unwrap_or_else(|| self.final_gap())
    }

    /// One JSON object summarizing the run.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method.id(),
            "iterations": self.iterations(),
            "total_projections": self.total_projections,
            "stop_reason": self.stop_reason.id(),
            "final_gap": self.final_gap().to_f64_lossy(),
            "final_distance": self.final_distance().map(|d| d.to_f64_lossy()),
            "wall_time_secs": self.wall_time_secs,
        })
    }

    /// Per-iterate CSV rows: `iteration,projections,gap,distance[,x0,...]`.
    pub fn trajectory_csv(&self, with_coords: bool) -> String {
        let mut out = String::from("iteration,projections,gap,distance");
        let coords = with_coords && self.iterates.len() == self.gaps.len();
        if coords {
            for i in 0..self.iterates[0].dim() {
                out.push_str(&format!(",x{i}"));
            }
        }
        out.push('\n');
        let mut cum = 0u64;
        for k in 0..self.gaps.len() {
            if k > 0 {
                cum += self.step_projections[k - 1];
            }
            let dist = self
                .distances
                .as_ref()
                .map(|d| format!("{:e}", d[k].to_f64_lossy()))
                .unwrap_or_default();
            out.push_str(&format!("{k},{cum},{:e},{dist}", self.gaps[k].to_f64_lossy()));
            if coords {
                for c in self.iterates[k].coords() {
                    out.push_str(&format!(",{:e}", c.to_f64_lossy()));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `method` from `z0` with default options.
pub fn run<T: Scalar>(
    method: MethodKind,
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z0: &Point<T>,
    stop: &[StoppingCriterion<T>],
) -> Result<MethodRun<T>> {
    run_with(method, x, y, z0, stop, &RunOptions::default())
}

pub fn run_with<T: Scalar>(
    method: MethodKind,
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z0: &Point<T>,
    stop: &[StoppingCriterion<T>],
    opts: &RunOptions<T>,
) -> Result<MethodRun<T>> {
    check_pair(x, y, z0)?;
    if stop.is_empty() {
        return Err(Error::InvalidArgument("at least one stopping criterion is required".into()));
    }
    for c in stop {
        c.validate()?;
        if let StoppingCriterion::DistanceToKnownSolution { solution, .. } = c {
            if solution.dim() != z0.dim() {
                return Err(Error::dim(z0.dim(), solution.dim()));
            }
        }
    }
    let started = Instant::now();
    let tol = opts.tol;
    let n = z0.dim();
    let cost = method.projections_per_iteration();
    let budget = stop
        .iter()
        .filter_map(|c| match c {
            StoppingCriterion::ProjectionBudget { max } => Some(*max),
            _ => None,
        })
        .min();
    let gap_eps = stop.iter().find_map(|c| match c {
        StoppingCriterion::GapToFirstSet { eps } => Some(*eps),
        _ => None,
    });
    let target = stop.iter().find_map(|c| match c {
        StoppingCriterion::DistanceToKnownSolution { eps, solution } => Some((*eps, solution)),
        _ => None,
    });

    // CRMprod carries the lifted point (z, z) in R^{2n}.
    let mut state = if method == MethodKind::CrmProd { z0.concat(z0) } else { z0.clone() };
    let first = |s: &Point<T>| if method == MethodKind::CrmProd { s.split(n).0 } else { s.clone() };

    let mut iterates = vec![z0.clone()];
    let mut step_projections = Vec::new();
    let mut gaps = Vec::new();
    let mut distances = target.map(|_| Vec::new());
    let mut total = 0u64;

    let stop_reason = loop {
        let current = first(&state);
        let px = x.project(&current, tol)?;
        // CRMprod: the first set of the lifted problem is X x Y, so the gap
        // covers both blocks. The Y projection is reused by the step.
        let mut lifted_py = None;
        let gap = if method == MethodKind::CrmProd {
            let (_, second) = state.split(n);
            let py = y.project(&second, tol)?;
            let g = current.dist(&px).hypot(second.dist(&py));
            lifted_py = Some((second, py));
            g
        } else {
            current.dist(&px)
        };
        gaps.push(gap);
        if let (Some(d), Some((_, sol))) = (distances.as_mut(), target) {
            d.push(current.dist(sol));
        }
        if let Some(eps) = gap_eps {
            if gap < eps {
                break StopReason::Gap;
            }
        }
        if let (Some(d), Some((eps, _))) = (distances.as_ref(), target) {
            if *d.last().unwrap() < eps {
                break StopReason::Distance;
            }
        }
        if budget.is_some_and(|b| total + cost > b) {
            break StopReason::Budget;
        }
        if step_projections.len() >= opts.iteration_cap {
            break StopReason::IterationCap;
        }

        let (next, degeneracy) = match method {
            MethodKind::Map => (y.project(&px, tol)?, Degeneracy::Generic),
            MethodKind::Spm => (px.midpoint(&y.project(&current, tol)?), Degeneracy::Generic),
            MethodKind::Crm => {
                let rx = current.reflect_through(&px);
                let ryrx = rx.reflect_through(&y.project(&rx, tol)?);
                let c = circumcenter3(&current, &rx, &ryrx);
                (c.center, c.degeneracy)
            }
            MethodKind::Pcrm => {
                let rx = current.reflect_through(&px);
                let ry = current.reflect_through(&y.project(&current, tol)?);
                let c = circumcenter3(&current, &rx, &ry);
                (c.center, c.degeneracy)
            }
            MethodKind::Ccrm => {
                let c = ccrm_from_px(x, y, px, tol)?.circumcenter;
                (c.center, c.degeneracy)
            }
            MethodKind::CrmProd => {
                let rx = current.reflect_through(&px);
                let (second, py) = lifted_py.take().expect("computed with the gap");
                let c = crmprod_from_px(&state, &rx, &second, &py);
                (c.center, c.degeneracy)
            }
        };
        if degeneracy == Degeneracy::RankDeficient {
            log::warn!(
                "{method}: rank-deficient circumcenter at iteration {}; aborting",
                step_projections.len()
            );
            break StopReason::RankDeficient;
        }
        total += cost;
        step_projections.push(cost);
        state = next;
        match opts.trace {
            Trace::Full => iterates.push(first(&state)),
            Trace::Endpoints => {
                if iterates.len() == 1 {
                    iterates.push(first(&state));
                } else {
                    *iterates.last_mut().unwrap() = first(&state);
                }
            }
        }
    };

    Ok(MethodRun {
        method,
        iterates,
        step_projections,
        total_projections: total,
        gaps,
        distances,
        stop_reason,
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}
