//! Quadratic sets `{z : <z, A z> + 2 <z, b> <= alpha}` with `A` symmetric positive definite.
//!
//! Projection solves the KKT system `(I + mu A) x = z - mu b` for the unique
//! multiplier `mu >= 0` that puts `x` on the boundary. In the eigenbasis of `A`
//! (computed once) the boundary condition is a scalar secular equation, which
//! we solve with Newton's method on the reciprocal-norm form
//! `1/sqrt(q(mu)) - 1/sqrt(r)`. That function is concave and increasing, so
//! Newton from `mu = 0` approaches the root monotonically; a bisection bracket
//! guards against rounding.

use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, SymmetricEigen};
use crate::point::{dot, Point};
use crate::scalar::Scalar;

pub const DEFAULT_ROOT_ITERATIONS: usize = 200;

#[derive(Clone, Debug)]
pub struct Ellipsoid<T> {
    a: SquareMatrix<T>,
    b: Point<T>,
    alpha: T,
    eigen: SymmetricEigen<T>,
    /// `c = -A^{-1} b`.
    center: Point<T>,
    /// `r = alpha + <b, A^{-1} b>`; the set is `{(z-c)^T A (z-c) <= r}`.
    level: T,
}

impl<T: PartialEq> PartialEq for Ellipsoid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.alpha == other.alpha
    }
}

impl<T: Scalar> Ellipsoid<T> {
    pub fn new(a: SquareMatrix<T>, b: Point<T>, alpha: T) -> Result<Self> {
        let n = a.n();
        if b.dim() != n {
            return Err(Error::dim(n, b.dim()));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidSet("ellipsoid alpha must be finite".into()));
        }
        let scale = T::one() + a.max_abs();
        if a.asymmetry() > T::lit(1e-12) * scale {
            return Err(Error::InvalidSet(format!(
                "ellipsoid matrix is not symmetric (max asymmetry {:e})",
                a.asymmetry().to_f64_lossy()
            )));
        }
        let eigen = SymmetricEigen::new(&a);
        let min_eig = eigen.min_value();
        if !(min_eig > T::epsilon() * scale) {
            return Err(Error::InvalidSet(format!(
                "ellipsoid matrix is not positive definite (min eigenvalue {:e})",
                min_eig.to_f64_lossy()
            )));
        }
        // c = -V diag(1/lambda) V^T b
        let bt = eigen.to_eigenbasis(b.coords());
        let scaled: Vec<T> = bt.iter().zip(&eigen.values).map(|(&v, &l)| -v / l).collect();
        let center = Point::from_vec(eigen.from_eigenbasis(&scaled));
        let mut level = alpha - b.dot(&center);
        let slack = T::lit(1e-10) * (T::one() + alpha.abs());
        if level < -slack {
            return Err(Error::InvalidSet(format!(
                "ellipsoid is empty: alpha = {} < -<A^-1 b, b> = {}",
                alpha,
                alpha - level
            )));
        }
        if level < T::zero() {
            level = T::zero();
        }
        Ok(Self { a, b, alpha, eigen, center, level })
    }

    /// `{z : (z - c)^T A (z - c) <= level}`.
    pub fn from_center(a: SquareMatrix<T>, center: &Point<T>, level: T) -> Result<Self> {
        if center.dim() != a.n() {
            return Err(Error::dim(a.n(), center.dim()));
        }
        let ac = a.mul_vec(center.coords());
        let b = Point::from_vec(ac.iter().map(|&v| -v).collect());
        let alpha = level - dot(center.coords(), &ac);
        Self::new(a, b, alpha)
    }

    pub fn dim(&self) -> usize {
        self.a.n()
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.a
    }

    pub fn linear(&self) -> &Point<T> {
        &self.b
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn center(&self) -> &Point<T> {
        &self.center
    }

    pub fn level(&self) -> T {
        self.level
    }

    pub fn eigen(&self) -> &SymmetricEigen<T> {
        &self.eigen
    }

    /// `g(z) = <z, A z> + 2 <z, b> - alpha`.
    pub fn value(&self, z: &Point<T>) -> T {
        let az = self.a.mul_vec(z.coords());
        dot(z.coords(), &az) + T::two() * z.dot(&self.b) - self.alpha
    }

    /// Centered form of `g`, numerically kinder far from the origin.
    pub fn centered_value(&self, z: &Point<T>) -> T {
        let w = z - &self.center;
        self.a.quad(w.coords()) - self.level
    }

    pub fn contains(&self, z: &Point<T>) -> bool {
        self.centered_value(z) <= T::zero()
    }

    /// Tolerance the projection's boundary residual is held to: `tol * (1 + |alpha|)`.
    pub fn residual_bound(&self, tol: T) -> T {
        tol * (T::one() + self.alpha.abs())
    }

    /// Nearest point of the ellipsoid to `z`.
    pub fn project(&self, z: &Point<T>, tol: T) -> Result<Point<T>> {
        self.project_with_multiplier(z, tol).map(|(x, _)| x)
    }

    /// Projection together with the KKT multiplier `mu` (zero when `z` is inside).
    pub fn project_with_multiplier(&self, z: &Point<T>, tol: T) -> Result<(Point<T>, T)> {
        let w = z - &self.center;
        let wt = self.eigen.to_eigenbasis(w.coords());
        let lambdas = &self.eigen.values;
        let q0: T = wt.iter().zip(lambdas).map(|(&c, &l)| l * c * c).sum();
        if q0 <= self.level {
            return Ok((z.clone(), T::zero()));
        }
        if self.level == T::zero() {
            return Ok((self.center.clone(), T::infinity()));
        }

        // q(mu) = sum l_j w_j^2 / (1 + mu l_j)^2, decreasing from q0 > r to 0.
        let eval = |mu: T| -> (T, T) {
            let mut q = T::zero();
            let mut dq = T::zero();
            for (&c, &l) in wt.iter().zip(lambdas) {
                let d = T::one() / (T::one() + mu * l);
                let t = l * c * c * d * d;
                q = q + t;
                dq = dq - T::two() * l * t * d;
            }
            (q, dq)
        };
        let r = self.level;
        let inv_sqrt_r = T::one() / r.sqrt();
        let lmin = self.eigen.min_value();
        let mut lo = T::zero();
        let mut hi = w.norm() / (lmin * r).sqrt();
        let mut mu = T::zero();
        let bound = self.residual_bound(tol);
        let eps = T::epsilon();
        let mut converged = false;
        let mut residual = q0 - r;
        for _ in 0..DEFAULT_ROOT_ITERATIONS {
            let (q, dq) = eval(mu);
            residual = q - r;
            if residual > T::zero() {
                lo = lo.max(mu);
            } else {
                hi = hi.min(mu);
            }
            let psi = T::one() / q.sqrt() - inv_sqrt_r;
            let dpsi = -T::half() * dq / (q * q.sqrt());
            let mut next = mu - psi / dpsi;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = T::half() * (lo + hi);
            }
            let step = (next - mu).abs();
            mu = next;
            if step <= T::lit(4.0) * eps * mu.max(T::min_positive_value()) || hi - lo <= eps * hi {
                converged = true;
                break;
            }
        }
        let (q, _) = eval(mu);
        let final_res = (q - r).abs();
        if !converged && final_res > bound {
            return Err(Error::ProjectionNotConverged {
                iterations: DEFAULT_ROOT_ITERATIONS,
                residual: final_res.max(residual.abs()).to_f64_lossy(),
            });
        }
        let yt: Vec<T> = wt
            .iter()
            .zip(lambdas)
            .map(|(&c, &l)| c / (T::one() + mu * l))
            .collect();
        let y = self.eigen.from_eigenbasis(&yt);
        let x = Point::from_vec(
            y.iter()
                .zip(self.center.coords())
                .map(|(&yi, &ci)| yi + ci)
                .collect(),
        );
        Ok((x, mu))
    }
}
