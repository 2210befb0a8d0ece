//! Seeded problem families: random two-ellipsoid pairs (overlapping or
//! tangent) for benchmarks, plus wedges, line pairs and ball pairs with
//! closed-form intersections for audits.
//!
//! Every random draw comes from a ChaCha8 stream derived from the master
//! seed, the instance index, a retry counter and a purpose tag, so instances
//! can be generated in any order or in parallel with identical results.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::point::Point;
use crate::scalar::Scalar;
use crate::sets::{ConvexSet, Ellipsoid, DEFAULT_TOL};

/// Lower bound on the norm of generated start points.
pub const MIN_START_NORM: f64 = 5.0;
const MAX_ATTEMPTS: u64 = 100;

#[derive(Clone, Copy, Debug)]
#[repr(u64)]
enum Purpose {
    Matrix = 1,
    Center = 2,
    Axes = 3,
    Start = 4,
}

/// Substream for `(index, attempt, purpose)` under `seed`.
fn stream(seed: u64, index: u64, attempt: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((index << 24) | (attempt << 8) | purpose as u64);
    rng
}

fn normal_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n: usize,
    pub count: usize,
    /// Overlap factor: 1.0 gives tangent ellipsoids, 1.1 a thin overlap.
    pub lambda: f64,
    /// Density of the sparse factor `B1`; defaults to `2 / n`.
    pub sparsity: f64,
    pub seed: u64,
    pub gamma: f64,
}

impl GeneratorConfig {
    pub fn new(n: usize, count: usize, lambda: f64, seed: u64) -> Self {
        Self { n, count, lambda, sparsity: (2.0 / n.max(1) as f64).min(1.0), seed, gamma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(Error::InvalidArgument("instance count must be at least 1".into()));
        }
        if !(self.sparsity > 0.0 && self.sparsity <= 1.0) {
            return Err(Error::InvalidArgument(format!("sparsity must lie in (0, 1], got {}", self.sparsity)));
        }
        if !(self.lambda >= 1.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be at least 1, got {}", self.lambda)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        Ok(())
    }

    pub fn is_tangent(&self) -> bool {
        self.lambda == 1.0
    }
}

/// A generated pair `E1`, `E2` with a certified common point.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"), deny_unknown_fields)]
pub struct EllipsoidInstance<T> {
    pub id: String,
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub sparsity: f64,
    pub e1: ConvexSet<T>,
    pub e2: ConvexSet<T>,
    /// The tangency point when `lambda == 1`, else an interior point of both.
    pub witness: Point<T>,
    pub c2: Point<T>,
    pub d: Point<T>,
    pub z0: Point<T>,
}

impl<T: Scalar> EllipsoidInstance<T> {
    pub fn is_tangent(&self) -> bool {
        self.lambda == 1.0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(s)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        for (name, p) in [("witness", &self.witness), ("c2", &self.c2), ("d", &self.d), ("z0", &self.z0)] {
            if p.dim() != self.n {
                return Err(Error::InvalidSet(format!("{name} has dimension {}, expected {}", p.dim(), self.n)));
            }
        }
        if self.e1.dim() != self.n || self.e2.dim() != self.n {
            return Err(Error::InvalidSet("ellipsoid dimensions disagree with n".into()));
        }
        Ok(())
    }
}

pub fn instance_id(index: usize) -> String {
    format!("inst-{index:04}")
}

fn sparse_spd<R: Rng>(rng: &mut R, n: usize, density: f64, gamma: f64) -> SquareMatrix<f64> {
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if rng.random::<f64>() < density {
                b[(i, j)] = rng.sample(StandardNormal);
            }
        }
    }
    let mut a = b.transpose() * &b;
    for i in 0..n {
        a[(i, i)] += gamma;
    }
    symmetric_from(&a)
}

/// Row-major copy of `m`, symmetrized exactly.
fn symmetric_from(m: &DMatrix<f64>) -> SquareMatrix<f64> {
    let n = m.nrows();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SquareMatrix::from_row_major(n, data)
}

/// Positive root `t` of `g(t v) = 0` for `g(z) = <z,Az> + 2<z,b> - alpha`.
fn ray_exit(a: &SquareMatrix<f64>, b: &[f64], alpha: f64, v: &[f64]) -> f64 {
    let qa = a.quad(v);
    let qb: f64 = b.iter().zip(v).map(|(x, y)| x * y).sum();
    // t^2 qa + 2 t qb - alpha = 0 with qa > 0, alpha > 0.
    let disc = (qb * qb + qa * alpha).sqrt();
    if qb >= 0.0 {
        alpha / (qb + disc)
    } else {
        (disc - qb) / qa
    }
}

/// Orthogonal `Q` whose first column is `u` (unit), completed from random vectors.
fn orthogonal_with_first<R: Rng>(rng: &mut R, u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, 0)] = u[i];
    }
    for j in 1..n {
        for i in 0..n {
            m[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let mut q = m.qr().q();
    let s: f64 = (0..n).map(|i| q[(i, 0)] * u[i]).sum();
    if s < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Generates instance `index` of the suite described by `cfg`.
pub fn gen_ellipsoid_pair(cfg: &GeneratorConfig, index: usize) -> Result<EllipsoidInstance<f64>> {
    cfg.validate()?;
    let n = cfg.n;
    let idx = index as u64;
    let tol = 1e-13;

    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(cfg.seed, idx, attempt, Purpose::Matrix);
        let a1 = sparse_spd(&mut rng, n, cfg.sparsity, cfg.gamma);
        let b1: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let alpha1 = 1.1 * a1.quad(&b1) + 1.0;
        let e1 = Ellipsoid::new(a1.clone(), Point::new(b1.clone())?, alpha1)?;

        let mut rng = stream(cfg.seed, idx, attempt, Purpose::Center);
        let v = normal_vec(&mut rng, n);
        if norm(&v) == 0.0 {
            continue;
        }
        let t = ray_exit(&a1, &b1, alpha1, &v);
        let c2 = Point::new(v.iter().map(|x| 2.0 * t * x).collect())?;
        if e1.value(&c2) <= 0.0 {
            log::debug!("instance {index}: center draw {attempt} inside E1, resampling");
            continue;
        }
        let p = e1.project(&c2, tol)?;
        let gap = &p - &c2;
        let gap_len = gap.norm();
        if !(gap_len > 1e-8) {
            continue;
        }
        let d = gap.scale(cfg.lambda);
        let dn = d.norm();
        let dir = gap.scale(1.0 / gap_len);

        let mut rng = stream(cfg.seed, idx, attempt, Purpose::Axes);
        let mut axes = vec![dn];
        for _ in 1..n {
            // Uniform on (dn, 3 dn].
            axes.push(dn * (3.0 - 2.0 * rng.random::<f64>()));
        }
        let q = orthogonal_with_first(&mut rng, dir.coords());
        let inv_sq = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            axes.iter().map(|s| 1.0 / (s * s)),
        ));
        let a2 = symmetric_from(&(&q * inv_sq * q.transpose()));
        let e2 = Ellipsoid::from_center(a2, &c2, 1.0)?;

        let witness = if cfg.is_tangent() {
            p.clone()
        } else {
            // Overlap of the two sets along the ray c2 + s * dir.
            let shifted: Vec<f64> = c2.coords().to_vec();
            let far = line_exit_beyond(&e1, &shifted, dir.coords(), gap_len);
            let hi = far.min(dn);
            c2.axpy(0.5 * (gap_len + hi), &dir)
        };
        let inst_tol = 1e-8;
        if e1.value(&witness) > inst_tol * (1.0 + alpha1.abs()) || e2.centered_value(&witness) > inst_tol {
            log::debug!("instance {index}: witness check failed on attempt {attempt}");
            continue;
        }

        let e1 = ConvexSet::ellipsoid(e1);
        let e2 = ConvexSet::ellipsoid(e2);
        let z0 = sample_start(n, cfg.seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15), &e1, &e2)?;
        return Ok(EllipsoidInstance {
            id: instance_id(index),
            index,
            seed: cfg.seed,
            n,
            lambda: cfg.lambda,
            gamma: cfg.gamma,
            sparsity: cfg.sparsity,
            e1,
            e2,
            witness,
            c2,
            d,
            z0,
        });
    }
    Err(Error::InvalidArgument(format!(
        "instance {index}: no valid draw in {MAX_ATTEMPTS} attempts"
    )))
}

/// Largest `s` with `g1(origin + s dir) <= 0`, given `g1(origin + s0 dir) = 0`
/// at the near crossing `s0`.
fn line_exit_beyond(e: &Ellipsoid<f64>, origin: &[f64], dir: &[f64], s0: f64) -> f64 {
    // g(origin + s dir) = s^2 <d,Ad> + 2 s (<d,A o> + <d,b>) + g(o)
    let a = e.matrix();
    let qa = a.quad(dir);
    let ao = a.mul_vec(origin);
    let lin: f64 = dir.iter().zip(&ao).map(|(x, y)| x * y).sum::<f64>()
        + dir.iter().zip(e.linear().coords()).map(|(x, y)| x * y).sum::<f64>();
    let g0 = e.value(&Point::new(origin.to_vec()).expect("finite origin"));
    let disc = (lin * lin - qa * g0).max(0.0).sqrt();
    ((-lin + disc) / qa).max(s0)
}

/// Standard-normal start point of norm at least 5 that avoids `x ∩ y`.
pub fn sample_start<T: Scalar>(n: usize, seed: u64, x: &ConvexSet<T>, y: &ConvexSet<T>) -> Result<Point<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let tol = T::lit(DEFAULT_TOL);
    let inside = |z: &Point<T>| -> Result<bool> { Ok(x.contains(z, tol)? && y.contains(z, tol)?) };
    let mut rng = stream(seed, 0, 0, Purpose::Start);
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let mut v = normal_vec(&mut rng, n);
        let len = norm(&v);
        if len == 0.0 {
            continue;
        }
        if len < MIN_START_NORM {
            v.iter_mut().for_each(|c| *c *= MIN_START_NORM / len);
        }
        let z = Point::from_f64s(&v)?;
        if !inside(&z)? {
            return Ok(z);
        }
        last = Some(z);
    }
    // Push the last draw outward until it leaves the (bounded) intersection.
    let mut z = last.unwrap_or_else(|| Point::basis(n, 0).scale(T::lit(MIN_START_NORM)));
    for _ in 0..200 {
        if !inside(&z)? {
            return Ok(z);
        }
        z = z.scale(T::two());
    }
    Err(Error::InvalidArgument("could not find a start point outside the intersection".into()))
}

/// Two halfspaces through the origin forming a wedge of opening `angle` in a
/// random 2-plane of `R^dim`. Returns `(X, Y, sin(angle))`, the error-bound
/// constant for points of `X ∪ Y` near the apex.
pub fn gen_halfspace_pair<T: Scalar>(angle: f64, dim: usize, seed: u64) -> Result<(ConvexSet<T>, ConvexSet<T>, f64)> {
    if !(angle > 0.0 && angle <= PI / 2.0) {
        return Err(Error::InvalidArgument(format!("angle must lie in (0, pi/2], got {angle}")));
    }
    if dim < 2 {
        return Err(Error::InvalidArgument("halfspace pairs need dimension at least 2".into()));
    }
    let (u1, u2) = if dim == 2 {
        (vec![1.0, 0.0], vec![0.0, 1.0])
    } else {
        random_plane(&mut stream(seed, 0, 0, Purpose::Matrix), dim)
    };
    let comb = |a: f64, b: f64| -> Result<Point<T>> {
        Point::from_f64s(&u1.iter().zip(&u2).map(|(x, y)| a * x + b * y).collect::<Vec<_>>())
    };
    // X = {<u2, z> >= 0}, Y = {-sin(angle) <u1, z> + cos(angle) <u2, z> <= 0}.
    let x = ConvexSet::halfspace(comb(0.0, -1.0)?, T::zero())?;
    let y = ConvexSet::halfspace(comb(-angle.sin(), angle.cos())?, T::zero())?;
    Ok((x, y, angle.sin()))
}

fn random_plane<R: Rng>(rng: &mut R, dim: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a = normal_vec(rng, dim);
        let b = normal_vec(rng, dim);
        let na = norm(&a);
        if na < 1e-8 {
            continue;
        }
        let u1: Vec<f64> = a.iter().map(|v| v / na).collect();
        let proj: f64 = u1.iter().zip(&b).map(|(x, y)| x * y).sum();
        let r: Vec<f64> = b.iter().zip(&u1).map(|(y, x)| y - proj * x).collect();
        let nr = norm(&r);
        if nr < 1e-8 {
            continue;
        }
        return (u1, r.iter().map(|v| v / nr).collect());
    }
}

/// Two lines in the plane through a common random point, at least 0.05 rad
/// apart. Returns `(X, Y, intersection)`.
pub fn gen_line_pair<T: Scalar>(seed: u64) -> Result<(ConvexSet<T>, ConvexSet<T>, Point<T>)> {
    let mut rng = stream(seed, 0, 0, Purpose::Center);
    let p: Vec<f64> = (0..2).map(|_| rng.random_range(-5.0..5.0)).collect();
    let t1: f64 = rng.random_range(0.0..PI);
    let t2 = t1 + rng.random_range(0.05..PI - 0.05);
    let p = Point::from_f64s(&p)?;
    let x = ConvexSet::line(p.clone(), &Point::from_f64s(&[t1.cos(), t1.sin()])?)?;
    let y = ConvexSet::line(p.clone(), &Point::from_f64s(&[t2.cos(), t2.sin()])?)?;
    Ok((x, y, p))
}

/// Two overlapping balls in `R^dim`. Returns `(X, Y, witness)` with the
/// witness on the segment between the centers, inside both balls.
pub fn gen_ball_pair<T: Scalar>(dim: usize, seed: u64) -> Result<(ConvexSet<T>, ConvexSet<T>, Point<T>)> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut rng = stream(seed, 0, 0, Purpose::Center);
    let c1: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let r1: f64 = rng.random_range(0.5..2.0);
    let r2: f64 = rng.random_range(0.5..2.0);
    let mut u = normal_vec(&mut rng, dim);
    let nu = norm(&u).max(1e-12);
    u.iter_mut().for_each(|v| *v /= nu);
    // Center distance strictly between |r1 - r2| and r1 + r2.
    let gap = rng.random_range(0.2..0.9) * (r1 + r2);
    let c2: Vec<f64> = c1.iter().zip(&u).map(|(c, v)| c + gap * v).collect();
    // Midpoint of the overlap along the center line.
    let lo = (gap - r2).max(-r1);
    let hi = r1.min(gap + r2);
    let s = 0.5 * (lo + hi);
    let w: Vec<f64> = c1.iter().zip(&u).map(|(c, v)| c + s * v).collect();
    let x = ConvexSet::ball(Point::from_f64s(&c1)?, T::lit(r1))?;
    let y = ConvexSet::ball(Point::from_f64s(&c2)?, T::lit(r2))?;
    Ok((x, y, Point::from_f64s(&w)?))
}

/// Lists the instance files of a generated suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub config: GeneratorConfig,
    /// Paths relative to the manifest's directory.
    pub instances: Vec<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn load_instances(&self, dir: &Path) -> Result<Vec<EllipsoidInstance<f64>>> {
        self.instances.iter().map(|f| EllipsoidInstance::load(&dir.join(f))).collect()
    }
}

/// Generates all `cfg.count` instances in parallel, ordered by index.
pub fn gen_suite(cfg: &GeneratorConfig) -> Result<Vec<EllipsoidInstance<f64>>> {
    use rayon::prelude::*;
    cfg.validate()?;
    (0..cfg.count).into_par_iter().map(|i| gen_ellipsoid_pair(cfg, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, lambda: f64) -> GeneratorConfig {
        GeneratorConfig::new(n, 3, lambda, 1234)
    }

    #[test]
    fn origin_in_e1_and_witness_in_both() {
        for lambda in [1.0, 1.1] {
            for i in 0..3 {
                let inst = gen_ellipsoid_pair(&cfg(10, lambda), i).unwrap();
                let zero = Point::zeros(10);
                let ConvexSet::Ellipsoid(e1) = &inst.e1 else { panic!() };
                let ConvexSet::Ellipsoid(e2) = &inst.e2 else { panic!() };
                assert!(e1.value(&zero) < 0.0);
                assert!(inst.e1.gap(&inst.witness, 1e-12).unwrap() < 1e-8);
                assert!(inst.e2.gap(&inst.witness, 1e-12).unwrap() < 1e-8);
                assert!(inst.z0.norm() >= MIN_START_NORM - 1e-12);
                if lambda == 1.0 {
                    assert!(e2.centered_value(&inst.witness).abs() < 1e-8);
                    assert!(e1.value(&inst.witness).abs() < 1e-8 * (1.0 + e1.alpha().abs()));
                } else {
                    assert!(e1.value(&inst.witness) < 0.0);
                    assert!(e2.centered_value(&inst.witness) < 0.0);
                }
            }
        }
    }

    #[test]
    fn tangent_instances_do_not_overlap_along_d() {
        let inst = gen_ellipsoid_pair(&cfg(8, 1.0), 0).unwrap();
        let ConvexSet::Ellipsoid(e1) = &inst.e1 else { panic!() };
        let dir = inst.d.scale(1.0 / inst.d.norm());
        // Just past the witness along d: inside E1, outside E2.
        let past = inst.witness.axpy(1e-4, &dir);
        assert!(e1.value(&past) < 0.0);
        assert!(!inst.e2.contains(&past, 1e-12).unwrap());
        // Sample the boundary of E2 near the witness: all points outside E1.
        let ConvexSet::Ellipsoid(e2) = &inst.e2 else { panic!() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let v = normal_vec(&mut rng, 8);
            let w = inst.witness.axpy(1e-2, &Point::new(v).unwrap());
            let p = e2.project(&w, 1e-13).unwrap();
            if p.dist(&inst.witness) > 1e-6 {
                assert!(e1.value(&p) > 0.0);
            }
        }
    }

    #[test]
    fn generation_is_reproducible_and_round_trips() {
        let c = cfg(12, 1.1);
        let a = gen_ellipsoid_pair(&c, 2).unwrap();
        let b = gen_ellipsoid_pair(&c, 2).unwrap();
        let ja = a.to_json().unwrap();
        assert_eq!(ja, b.to_json().unwrap());
        let back = EllipsoidInstance::<f64>::from_json(&ja).unwrap();
        assert_eq!(back.to_json().unwrap(), ja);
        assert_eq!(back.e2, a.e2);
        assert_eq!(back.z0, a.z0);
        let other = gen_ellipsoid_pair(&c, 1).unwrap();
        assert_ne!(other.z0, a.z0);
    }

    #[test]
    fn tangency_point_is_projection_of_center() {
        let inst = gen_ellipsoid_pair(&cfg(6, 1.0), 1).unwrap();
        let p = inst.e1.project(&inst.c2, 1e-13).unwrap();
        assert!(p.dist(&inst.witness) <= 1e-10);
    }

    #[test]
    fn halfspace_pair_examples() {
        let (_, _, w) = gen_halfspace_pair::<f64>(PI / 2.0, 2, 0).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        let (_, _, w) = gen_halfspace_pair::<f64>(PI / 3.0, 5, 0).unwrap();
        assert!((w - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let (x, y, w) = gen_halfspace_pair::<f64>(PI / 6.0, 2, 0).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
        // Both edges of the wedge lie in both sets.
        let t = PI / 6.0;
        for z in [Point::new(vec![1.0, 0.0]).unwrap(), Point::new(vec![t.cos(), t.sin()]).unwrap()] {
            assert!(x.contains(&z, 1e-12).unwrap() && y.contains(&z, 1e-12).unwrap());
        }
        assert!(gen_halfspace_pair::<f64>(0.0, 2, 0).is_err());
        assert!(gen_halfspace_pair::<f64>(2.0, 2, 0).is_err());
    }

    #[test]
    fn line_and_ball_pairs_contain_their_witness() {
        for s in 0..20 {
            let (x, y, p) = gen_line_pair::<f64>(s).unwrap();
            assert!(x.gap(&p, 1e-12).unwrap() < 1e-12 && y.gap(&p, 1e-12).unwrap() < 1e-12);
            let (x, y, w) = gen_ball_pair::<f64>(4, s).unwrap();
            assert!(x.contains(&w, 0.0).unwrap() && y.contains(&w, 0.0).unwrap());
        }
    }

    #[test]
    fn start_points_avoid_the_intersection() {
        let x = ConvexSet::ball(Point::zeros(3), 100.0).unwrap();
        let z = sample_start(3, 9, &x, &x.clone()).unwrap();
        assert!(z.norm() > 100.0);
        assert_eq!(z, sample_start(3, 9, &x, &x.clone()).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig::new(0, 1, 1.1, 0).validate().is_err());
        assert!(GeneratorConfig::new(5, 0, 1.1, 0).validate().is_err());
        assert!(GeneratorConfig::new(5, 1, 0.9, 0).validate().is_err());
        assert_eq!(GeneratorConfig::new(100, 1, 1.1, 0).sparsity, 0.02);
    }
}
