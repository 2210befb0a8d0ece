//! Circumcenter of three points in R^n.
//!
//! The circumcenter is the point of `aff{z, v, w}` equidistant from all three
//! vertices. Writing it as `z + a (v - z) + b (w - z)`, the coefficients solve
//! the 2x2 Gram system
//!
//! ```text
//! [<u,u>  <u,t>] [a]   [<u,u>/2]
//! [<u,t>  <t,t>] [b] = [<t,t>/2],      u = v - z,  t = w - z.
//! ```

use crate::point::Point;
use crate::scalar::Scalar;

/// Relative Gram-determinant threshold below which the triangle is treated as flat.
pub const RANK_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Degeneracy {
    Generic,
    /// Two vertices coincide; the center is the midpoint of the distinct pair.
    OneCoincident,
    AllCoincident,
    /// Distinct collinear vertices: no circumcenter exists. The minimum-norm
    /// least-squares solution of the Gram system is returned instead.
    RankDeficient,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircumcenterResult<T> {
    pub center: Point<T>,
    pub degeneracy: Degeneracy,
    /// Largest pairwise difference of the distances from the center to the vertices.
    pub residual: T,
}

impl<T: Scalar> CircumcenterResult<T> {
    pub fn is_rank_deficient(&self) -> bool {
        self.degeneracy == Degeneracy::RankDeficient
    }
}

pub fn circumcenter3<T: Scalar>(z: &Point<T>, v: &Point<T>, w: &Point<T>) -> CircumcenterResult<T> {
    assert!(
        z.dim() == v.dim() && z.dim() == w.dim(),
        "circumcenter vertices must share a dimension"
    );
    let u = v - z;
    let t = w - z;
    let uu = u.norm_sq();
    let tt = t.norm_sq();
    let zero = T::zero();

    let (center, degeneracy) = if uu == zero && tt == zero {
        (z.clone(), Degeneracy::AllCoincident)
    } else if uu == zero || v == w {
        (z.midpoint(w), Degeneracy::OneCoincident)
    } else if tt == zero {
        (z.midpoint(v), Degeneracy::OneCoincident)
    } else {
        let ut = u.dot(&t);
        let det = uu * tt - ut * ut;
        let h = T::half();
        if det > T::lit(RANK_THRESHOLD) * uu * tt {
            let a = h * (uu * tt - tt * ut) / det;
            let b = h * (uu * tt - uu * ut) / det;
            (z.axpy(a, &u).axpy(b, &t), Degeneracy::Generic)
        } else {
            let (a, b) = min_norm_solve([[uu, ut], [ut, tt]], [h * uu, h * tt]);
            (z.axpy(a, &u).axpy(b, &t), Degeneracy::RankDeficient)
        }
    };
    let residual = circumcenter_residual(&center, z, v, w);
    CircumcenterResult { center, degeneracy, residual }
}

/// `max | ||c - a|| - ||c - b|| |` over vertex pairs.
pub fn circumcenter_residual<T: Scalar>(c: &Point<T>, z: &Point<T>, v: &Point<T>, w: &Point<T>) -> T {
    let dz = c.dist(z);
    let dv = c.dist(v);
    let dw = c.dist(w);
    (dz - dv).abs().max((dz - dw).abs()).max((dv - dw).abs())
}

/// Pseudo-inverse solve of a symmetric 2x2 system, dropping negligible eigenvalues.
fn min_norm_solve<T: Scalar>(g: [[T; 2]; 2], rhs: [T; 2]) -> (T, T) {
    let [[p, q], [_, s]] = g;
    let h = T::half();
    let mean = h * (p + s);
    let rad = (h * (p - s)).hypot(q);
    let l1 = mean + rad;
    let l2 = mean - rad;
    // Unit eigenvector for l1.
    let (e1x, e1y) = if q.abs() > T::zero() || p != s {
        let (x, y) = if p >= s { (l1 - s, q) } else { (q, l1 - p) };
        let n = x.hypot(y);
        if n > T::zero() { (x / n, y / n) } else { (T::one(), T::zero()) }
    } else {
        (T::one(), T::zero())
    };
    let (e2x, e2y) = (-e1y, e1x);
    let cut = T::lit(RANK_THRESHOLD) * l1.abs();
    let mut a = T::zero();
    let mut b = T::zero();
    for (l, ex, ey) in [(l1, e1x, e1y), (l2, e2x, e2y)] {
        if l.abs() > cut && l != T::zero() {
            let c = (ex * rhs[0] + ey * rhs[1]) / l;
            a = a + c * ex;
            b = b + c * ey;
        }
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point<f64> {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn right_isoceles() {
        let r = circumcenter3(&pt(&[0.0, 0.0]), &pt(&[2.0, 0.0]), &pt(&[0.0, 2.0]));
        assert_eq!(r.degeneracy, Degeneracy::Generic);
        assert!(r.center.dist(&pt(&[1.0, 1.0])) < 1e-15);
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn scalene_hand_example() {
        let (z, v, w) = (pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[1.0, 3.0]));
        let r = circumcenter3(&z, &v, &w);
        assert!((r.center[0] - 1.0).abs() < 1e-12);
        assert!((r.center[1] - 4.0 / 3.0).abs() < 1e-12);
        for p in [&z, &v, &w] {
            assert!((r.center.dist(p).powi(2) - 25.0 / 9.0).abs() < 1e-12);
        }
        assert!(circumcenter_residual(&pt(&[1.0, 4.0 / 3.0]), &z, &v, &w) <= 1e-12);
    }

    #[test]
    fn coincident_vertices() {
        let z = pt(&[1.0, 2.0, 3.0]);
        let w = pt(&[3.0, 0.0, -1.0]);
        for r in [
            circumcenter3(&z, &z, &w),
            circumcenter3(&z, &w, &z),
            circumcenter3(&z, &w, &w),
        ] {
            assert_eq!(r.degeneracy, Degeneracy::OneCoincident);
            assert_eq!(r.center, z.midpoint(&w));
        }
        let all = circumcenter3(&z, &z, &z);
        assert_eq!(all.degeneracy, Degeneracy::AllCoincident);
        assert_eq!(all.center, z);
    }

    #[test]
    fn collinear_is_flagged() {
        let r = circumcenter3(&pt(&[0.0, 0.0]), &pt(&[1.0, 0.0]), &pt(&[3.0, 0.0]));
        assert!(r.is_rank_deficient());
        assert!(r.center.is_finite());
        assert!(r.center[1].abs() < 1e-15);
    }

    #[test]
    fn residual_positive_off_center() {
        let (z, v, w) = (pt(&[0.0, 0.0]), pt(&[2.0, 0.0]), pt(&[0.0, 2.0]));
        assert_eq!(circumcenter_residual(&pt(&[1.0, 1.0]), &z, &v, &w), 0.0);
        assert!(circumcenter_residual(&z, &z, &v, &w) > 0.0);
    }

    #[test]
    fn works_in_f32() {
        let z = Point::<f32>::new(vec![0.0, 0.0]).unwrap();
        let v = Point::<f32>::new(vec![2.0, 0.0]).unwrap();
        let w = Point::<f32>::new(vec![1.0, 3.0]).unwrap();
        let r = circumcenter3(&z, &v, &w);
        assert!((r.center[1] - 4.0 / 3.0).abs() < 1e-6);
    }
}
