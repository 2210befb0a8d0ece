//! Runtime checks of the structure the convergence theory relies on:
//! centralized points, the support-halfspace characterization of parallel
//! circumcenters, local error bounds and empirical linear rates.

pub mod audit;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Scalar;
use crate::sets::{ConvexSet, DEFAULT_TOL};

fn default_tol<T: Scalar>() -> T {
    T::lit(DEFAULT_TOL)
}

// ---------------------------------------------------------------------------
// Centralization
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CentralizationCheck<T> {
    /// `<P_X(z) - z, P_Y(z) - z>`.
    pub inner_product: T,
    /// `<R_X(z) - z, R_Y(z) - z>`, four times the projection form.
    pub reflection_inner_product: T,
    pub centralized: bool,
    /// Centralized and outside both sets.
    pub strictly: bool,
    pub gap_x: T,
    pub gap_y: T,
}

/// Sign test on `<P_X z - z, P_Y z - z>` with tolerance `1e-10 (1 + ||z||^2)`.
pub fn check_centralized<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z: &Point<T>,
) -> Result<CentralizationCheck<T>> {
    let tol = default_tol::<T>();
    let px = x.project(z, tol)?;
    let py = y.project(z, tol)?;
    let dx = &px - z;
    let dy = &py - z;
    let inner_product = dx.dot(&dy);
    let rx = z.reflect_through(&px);
    let ry = z.reflect_through(&py);
    let reflection_inner_product = (&rx - z).dot(&(&ry - z));
    let scale = T::one() + z.norm_sq();
    let centralized = inner_product <= T::lit(1e-10) * scale;
    let gap_x = dx.norm();
    let gap_y = dy.norm();
    let dist_tol = membership_tol(z);
    Ok(CentralizationCheck {
        inner_product,
        reflection_inner_product,
        centralized,
        strictly: centralized && gap_x > dist_tol && gap_y > dist_tol,
        gap_x,
        gap_y,
    })
}

/// Distance below which a point counts as lying in a set.
pub fn membership_tol<T: Scalar>(z: &Point<T>) -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) * (T::one() + z.norm())
}

// ---------------------------------------------------------------------------
// Support halfspaces
// ---------------------------------------------------------------------------

/// `{w : <normal, w> <= offset}`; the hyperplane is the equality version.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct SupportHalfspace<T> {
    pub normal: Point<T>,
    pub offset: T,
}

impl<T: Scalar> SupportHalfspace<T> {
    /// Halfspace through `anchor` with outward normal `normal`.
    pub fn through(anchor: &Point<T>, normal: Point<T>) -> Self {
        let offset = normal.dot(anchor);
        Self { normal, offset }
    }

    pub fn violation(&self, w: &Point<T>) -> T {
        self.normal.dot(w) - self.offset
    }

    pub fn as_set(&self) -> Result<ConvexSet<T>> {
        ConvexSet::halfspace(self.normal.clone(), self.offset)
    }

    pub fn boundary(&self) -> Result<ConvexSet<T>> {
        ConvexSet::hyperplane(self.normal.clone(), self.offset)
    }

    fn project_boundary(&self, w: &Point<T>) -> Point<T> {
        w.axpy(-self.violation(w) / self.normal.norm_sq(), &self.normal)
    }
}

/// `S_X`, `S_Y` built at `z` from its projections. `None` means the whole
/// space (z already lies in that set).
#[derive(Clone, Debug, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct SupportHalfspacePair<T> {
    pub base: Point<T>,
    pub px: Point<T>,
    pub py: Point<T>,
    pub s_x: Option<SupportHalfspace<T>>,
    pub s_y: Option<SupportHalfspace<T>>,
}

impl<T: Scalar> SupportHalfspacePair<T> {
    pub fn is_degenerate(&self) -> bool {
        self.s_x.is_none() || self.s_y.is_none()
    }
}

/// `S_X = {w : <w - P_X z, z - P_X z> <= 0}` and likewise for `Y`.
pub fn support_halfspaces<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z: &Point<T>,
) -> Result<SupportHalfspacePair<T>> {
    let tol = default_tol::<T>();
    let px = x.project(z, tol)?;
    let py = y.project(z, tol)?;
    let mtol = membership_tol(z);
    let build = |p: &Point<T>| {
        let normal = z - p;
        (normal.norm() > mtol).then(|| SupportHalfspace::through(p, normal))
    };
    let s_x = build(&px);
    let s_y = build(&py);
    Ok(SupportHalfspacePair { base: z.clone(), px, py, s_x, s_y })
}

/// Projection of `z` onto `S_X ∩ S_Y` by the KKT case analysis.
pub fn project_halfspace_intersection<T: Scalar>(
    pair: &SupportHalfspacePair<T>,
    z: &Point<T>,
) -> Result<Point<T>> {
    match (&pair.s_x, &pair.s_y) {
        (None, None) => Ok(z.clone()),
        (Some(h), None) | (None, Some(h)) => {
            Ok(if h.violation(z) <= T::zero() { z.clone() } else { h.project_boundary(z) })
        }
        (Some(hx), Some(hy)) => project_two_halfspaces(hx, hy, z),
    }
}

/// Nearest point of `{<a1,w> <= b1} ∩ {<a2,w> <= b2}` to `z`.
///
/// Candidates in order: `z` itself, the projection onto either boundary when
/// it satisfies the other constraint with a nonnegative multiplier, and the
/// projection onto both boundaries from the 2x2 multiplier system.
pub fn project_two_halfspaces<T: Scalar>(
    h1: &SupportHalfspace<T>,
    h2: &SupportHalfspace<T>,
    z: &Point<T>,
) -> Result<Point<T>> {
    let v1 = h1.violation(z);
    let v2 = h2.violation(z);
    let slack = |h: &SupportHalfspace<T>, w: &Point<T>| {
        T::lit(1e-12) * (T::one() + h.normal.norm() * (T::one() + w.norm()) + h.offset.abs())
    };
    if v1 <= T::zero() && v2 <= T::zero() {
        return Ok(z.clone());
    }
    if v1 > T::zero() {
        let c = h1.project_boundary(z);
        if h2.violation(&c) <= slack(h2, &c) {
            return Ok(c);
        }
    }
    if v2 > T::zero() {
        let c = h2.project_boundary(z);
        if h1.violation(&c) <= slack(h1, &c) {
            return Ok(c);
        }
    }
    // w = z - l1 a1 - l2 a2 with both constraints active.
    let (a1, a2) = (&h1.normal, &h2.normal);
    let g11 = a1.norm_sq();
    let g22 = a2.norm_sq();
    let g12 = a1.dot(a2);
    let det = g11 * g22 - g12 * g12;
    if !(det > T::lit(1e-14) * g11 * g22) {
        return Err(Error::DegenerateHalfspaces(
            "boundaries are parallel and no single-boundary candidate is feasible".into(),
        ));
    }
    let l1 = (v1 * g22 - v2 * g12) / det;
    let l2 = (v2 * g11 - v1 * g12) / det;
    let neg = -T::lit(1e-10) * (T::one() + l1.abs() + l2.abs());
    if l1 < neg || l2 < neg {
        return Err(Error::DegenerateHalfspaces(format!(
            "negative KKT multipliers ({l1}, {l2}); halfspaces are inconsistent"
        )));
    }
    Ok(z.axpy(-l1, a1).axpy(-l2, a2))
}

// ---------------------------------------------------------------------------
// Distance to the intersection
// ---------------------------------------------------------------------------

/// How `dist(., X ∩ Y)` is computed for an audit family.
#[derive(Clone, Debug)]
pub enum IntersectionOracle<T> {
    /// Both sets are halfspaces or hyperplanes: exact projection.
    Halfspaces,
    /// `X ∩ Y = {point}`.
    Singleton(Point<T>),
    /// `X = Y`.
    Identical,
    /// Dykstra's alternating projections to `tol` (audit use only).
    Dykstra { tol: T, max_iterations: usize },
}

fn as_halfspace<T: Scalar>(set: &ConvexSet<T>) -> Option<(SupportHalfspace<T>, bool)> {
    match set {
        ConvexSet::Halfspace { normal, offset } => {
            Some((SupportHalfspace { normal: normal.clone(), offset: *offset }, false))
        }
        ConvexSet::Hyperplane { normal, offset } => {
            Some((SupportHalfspace { normal: normal.clone(), offset: *offset }, true))
        }
        _ => None,
    }
}

/// Projection onto `X ∩ Y` using `oracle`.
pub fn project_intersection<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    oracle: &IntersectionOracle<T>,
    z: &Point<T>,
) -> Result<Point<T>> {
    match oracle {
        IntersectionOracle::Singleton(p) => Ok(p.clone()),
        IntersectionOracle::Identical => x.project(z, default_tol()),
        IntersectionOracle::Halfspaces => {
            let (Some((h1, eq1)), Some((h2, eq2))) = (as_halfspace(x), as_halfspace(y)) else {
                return Err(Error::InvalidArgument(
                    "halfspace oracle needs two halfspaces or hyperplanes".into(),
                ));
            };
            if !eq1 && !eq2 {
                return project_two_halfspaces(&h1, &h2, z);
            }
            // Equality constraints: treat them as always active.
            if eq1 && eq2 {
                return project_two_hyperplanes(&h1, &h2, z);
            }
            let (hp, hs) = if eq1 { (h1, h2) } else { (h2, h1) };
            let on_plane = hp.project_boundary(z);
            if hs.violation(&on_plane) <= T::zero() {
                Ok(on_plane)
            } else {
                project_two_hyperplanes(&hp, &hs, z)
            }
        }
        IntersectionOracle::Dykstra { tol, max_iterations } => {
            dykstra(x, y, z, *tol, *max_iterations)
        }
    }
}

fn project_two_hyperplanes<T: Scalar>(
    h1: &SupportHalfspace<T>,
    h2: &SupportHalfspace<T>,
    z: &Point<T>,
) -> Result<Point<T>> {
    let (a1, a2) = (&h1.normal, &h2.normal);
    let g11 = a1.norm_sq();
    let g22 = a2.norm_sq();
    let g12 = a1.dot(a2);
    let det = g11 * g22 - g12 * g12;
    if !(det > T::lit(1e-14) * g11 * g22) {
        return Err(Error::DegenerateHalfspaces("parallel hyperplanes".into()));
    }
    let v1 = h1.violation(z);
    let v2 = h2.violation(z);
    let l1 = (v1 * g22 - v2 * g12) / det;
    let l2 = (v2 * g11 - v1 * g12) / det;
    Ok(z.axpy(-l1, a1).axpy(-l2, a2))
}

/// Dykstra's algorithm for the projection onto `X ∩ Y`.
pub fn dykstra<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    z: &Point<T>,
    tol: T,
    max_iterations: usize,
) -> Result<Point<T>> {
    let ptol = default_tol::<T>();
    let mut cur = z.clone();
    let mut p = Point::zeros(z.dim());
    let mut q = Point::zeros(z.dim());
    for _ in 0..max_iterations {
        let yk = x.project(&(&cur + &p), ptol)?;
        p = &(&cur + &p) - &yk;
        let next = y.project(&(&yk + &q), ptol)?;
        q = &(&yk + &q) - &next;
        let moved = next.dist(&cur);
        cur = next;
        if moved <= tol && x.gap(&cur, ptol)? <= tol {
            return Ok(cur);
        }
    }
    Ok(cur)
}

pub fn dist_to_intersection<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    oracle: &IntersectionOracle<T>,
    z: &Point<T>,
) -> Result<T> {
    Ok(z.dist(&project_intersection(x, y, oracle, z)?))
}

// ---------------------------------------------------------------------------
// Error bound
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ErrorBoundEstimate {
    pub omega: f64,
    pub beta: f64,
    /// Samples that fell outside `X ∩ Y` and entered the minimum.
    pub sample_count: usize,
    pub neighborhood_radius: f64,
}

/// Empirical `min max{d(z,X), d(z,Y)} / d(z, X ∩ Y)` over uniform samples of
/// the ball of `radius` around `anchor`.
pub fn estimate_error_bound<T: Scalar>(
    x: &ConvexSet<T>,
    y: &ConvexSet<T>,
    oracle: &IntersectionOracle<T>,
    anchor: &Point<T>,
    radius: T,
    samples: usize,
    seed: u64,
) -> Result<ErrorBoundEstimate> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument("neighborhood radius must be positive".into()));
    }
    let tol = default_tol::<T>();
    let mtol = membership_tol(anchor);
    if x.gap(anchor, tol)? > mtol || y.gap(anchor, tol)? > mtol {
        return Err(Error::InvalidArgument("anchor must lie in X ∩ Y".into()));
    }
    let n = anchor.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = f64::INFINITY;
    let mut used = 0usize;
    let floor = T::lit(1e-12) * radius;
    for _ in 0..samples {
        let z = uniform_in_ball(&mut rng, anchor, radius);
        let d_int = dist_to_intersection(x, y, oracle, &z)?;
        if d_int <= floor {
            continue;
        }
        let worst = x.gap(&z, tol)?.max(y.gap(&z, tol)?);
        let ratio = (worst / d_int).to_f64_lossy();
        used += 1;
        omega = omega.min(ratio);
    }
    if used == 0 {
        return Err(Error::NoValidSamples(format!(
            "all {samples} samples in dimension {n} fell inside X ∩ Y"
        )));
    }
    let omega = omega.min(1.0);
    Ok(ErrorBoundEstimate {
        omega,
        beta: (1.0 - omega * omega).max(0.0).sqrt(),
        sample_count: used,
        neighborhood_radius: radius.to_f64_lossy(),
    })
}

pub(crate) fn uniform_in_ball<T: Scalar, R: Rng>(rng: &mut R, center: &Point<T>, radius: T) -> Point<T> {
    let n = center.dim();
    let dir: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let r = radius.to_f64_lossy() * rng.random::<f64>().powf(1.0 / n as f64);
    Point::from_vec(
        dir.iter()
            .zip(center.coords())
            .map(|(d, &c)| c + T::lit(r * d / norm))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Rates
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RateEstimate {
    /// Largest successive ratio `d_{k+1} / d_k` in the tail.
    pub q: f64,
    /// Largest root `d_k^{1/k}` in the tail.
    pub r: f64,
    pub tail_fraction: f64,
}

pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;

/// Q- and R-factor estimates over the final `tail_fraction` of `distances`.
pub fn estimate_rates(distances: &[f64], tail_fraction: f64) -> Result<RateEstimate> {
    if distances.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "rate estimation needs at least 5 distances, got {}",
            distances.len()
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidArgument("tail fraction must lie in (0, 1)".into()));
    }
    if distances.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidArgument("distances must be positive and finite".into()));
    }
    let len = distances.len();
    let tail_len = ((len as f64 * tail_fraction).ceil() as usize).clamp(2, len - 1);
    let start = len - tail_len;
    let q = (start..len - 1)
        .map(|k| distances[k + 1] / distances[k])
        .fold(0.0, f64::max);
    let r = (start.max(1)..len)
        .map(|k| distances[k].powf(1.0 / k as f64))
        .fold(0.0, f64::max);
    Ok(RateEstimate { q, r, tail_fraction })
}

/// Worst per-step contraction `d(z^{k+1}) / d(z^k)` over the tail of a
/// distance sequence, ignoring steps that start at (numerically) zero.
/// Sequences that hit zero contribute a ratio of zero for that step.
pub fn tail_step_ratio(distances: &[f64], tail_fraction: f64, floor: f64) -> Option<f64> {
    let steps: Vec<f64> = distances
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1] / w[0])
        .collect();
    if steps.is_empty() {
        return None;
    }
    let tail = ((steps.len() as f64 * tail_fraction).ceil() as usize).clamp(1, steps.len());
    Some(steps[steps.len() - tail..].iter().copied().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct RateBounds {
    pub map: f64,
    pub spm: f64,
    pub ccrm: f64,
}

/// Linear-rate constants `(beta^2, (1+beta)/2, beta^2 (1+beta)/2)` with `beta = sqrt(1 - omega^2)`.
pub fn rate_bounds(omega: f64) -> Result<RateBounds> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::InvalidArgument(format!("omega must lie in (0, 1], got {omega}")));
    }
    let beta = (1.0 - omega * omega).max(0.0).sqrt();
    let b2 = beta * beta;
    Ok(RateBounds { map: b2, spm: 0.5 * (1.0 + beta), ccrm: b2 * 0.5 * (1.0 + beta) })
}

/// Error-bound constant of a wedge with opening `angle <= pi/2` over a full
/// ball around its apex: `sin(angle / 2)`, attained on the bisector of the
/// opposite cone. Restricted to points of either set it is `sin(angle)`.
pub fn wedge_error_bound(angle: f64) -> f64 {
    (0.5 * angle).sin()
}
