//! Closed convex sets with exact projections and reflections.
//!
//! Every variant projects in closed form except [`Ellipsoid`], which solves a
//! scalar dual root problem to tolerance `tol`. Reflections are always
//! `2 P(z) - z` evaluated on the stored projection.

mod ellipsoid;
mod schema;

pub use ellipsoid::{Ellipsoid, DEFAULT_ROOT_ITERATIONS};
pub use schema::SetDocument;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::scalar::Scalar;

/// Default accuracy for iterative projections.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet<T> {
    /// `{x : <normal, x> <= offset}`
    Halfspace { normal: Point<T>, offset: T },
    /// `{x : <normal, x> = offset}`
    Hyperplane { normal: Point<T>, offset: T },
    Box { lower: Point<T>, upper: Point<T> },
    Ball { center: Point<T>, radius: T },
    /// `basepoint + span(basis)` with an orthonormal basis (possibly empty).
    AffineSubspace { basepoint: Point<T>, basis: Vec<Point<T>> },
    Ellipsoid(Box<Ellipsoid<T>>),
    /// Cartesian product; points are `(left block, right block)`.
    Product(Box<ConvexSet<T>>, Box<ConvexSet<T>>),
    /// `{(z, z) : z in R^block_dim}`
    Diagonal { block_dim: usize },
}

impl<T: Scalar> ConvexSet<T> {
    pub fn halfspace(normal: Point<T>, offset: T) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self::Halfspace { normal, offset })
    }

    pub fn hyperplane(normal: Point<T>, offset: T) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self::Hyperplane { normal, offset })
    }

    pub fn boxed(lower: Point<T>, upper: Point<T>) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::dim(lower.dim(), upper.dim()));
        }
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidSet(format!("box lower > upper at coordinate {i}")));
        }
        Ok(Self::Box { lower, upper })
    }

    pub fn ball(center: Point<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidSet("ball radius must be positive and finite".into()));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn affine(basepoint: Point<T>, basis: Vec<Point<T>>) -> Result<Self> {
        let n = basepoint.dim();
        if basis.len() > n {
            return Err(Error::InvalidSet("more basis vectors than the dimension".into()));
        }
        let tol = T::lit(1e-12);
        for (i, u) in basis.iter().enumerate() {
            if u.dim() != n {
                return Err(Error::dim(n, u.dim()));
            }
            for (j, v) in basis.iter().enumerate().skip(i) {
                let expected = if i == j { T::one() } else { T::zero() };
                if (u.dot(v) - expected).abs() > tol {
                    return Err(Error::InvalidSet(format!(
                        "affine basis is not orthonormal at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::AffineSubspace { basepoint, basis })
    }

    /// Line `{p + t d}` through `p` with (not necessarily unit) direction `d`.
    pub fn line(p: Point<T>, d: &Point<T>) -> Result<Self> {
        let norm = d.norm();
        if !(norm > T::zero()) {
            return Err(Error::InvalidSet("line direction must be nonzero".into()));
        }
        Self::affine(p, vec![d.scale(T::one() / norm)])
    }

    pub fn ellipsoid(e: Ellipsoid<T>) -> Self {
        Self::Ellipsoid(Box::new(e))
    }

    /// `X x Y`; both factors must share a dimension.
    pub fn product(x: ConvexSet<T>, y: ConvexSet<T>) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::dim(x.dim(), y.dim()));
        }
        Ok(Self::Product(Box::new(x), Box::new(y)))
    }

    pub fn diagonal(block_dim: usize) -> Result<Self> {
        if block_dim == 0 {
            return Err(Error::InvalidSet("diagonal block dimension must be positive".into()));
        }
        Ok(Self::Diagonal { block_dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Halfspace { normal, .. } | Self::Hyperplane { normal, .. } => normal.dim(),
            Self::Box { lower, .. } => lower.dim(),
            Self::Ball { center, .. } => center.dim(),
            Self::AffineSubspace { basepoint, .. } => basepoint.dim(),
            Self::Ellipsoid(e) => e.dim(),
            Self::Product(l, r) => l.dim() + r.dim(),
            Self::Diagonal { block_dim } => 2 * block_dim,
        }
    }

    /// Whether the set is an affine subspace, i.e. its reflector is an involution.
    pub fn is_affine(&self) -> bool {
        match self {
            Self::Hyperplane { .. } | Self::AffineSubspace { .. } | Self::Diagonal { .. } => true,
            Self::Product(l, r) => l.is_affine() && r.is_affine(),
            _ => false,
        }
    }

    /// How many projections one call to [`project`](Self::project) is charged.
    pub fn projection_cost(&self) -> u64 {
        match self {
            Self::Product(l, r) => l.projection_cost() + r.projection_cost(),
            _ => 1,
        }
    }

    fn check_dim(&self, z: &Point<T>) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::dim(self.dim(), z.dim()));
        }
        Ok(())
    }

    /// Orthogonal projection of `z`; `tol` only matters for ellipsoids.
    pub fn project(&self, z: &Point<T>, tol: T) -> Result<Point<T>> {
        self.check_dim(z)?;
        if !(tol > T::zero()) {
            return Err(Error::InvalidArgument("projection tolerance must be positive".into()));
        }
        Ok(match self {
            Self::Halfspace { normal, offset } => {
                let excess = normal.dot(z) - *offset;
                if excess <= T::zero() {
                    z.clone()
                } else {
                    z.axpy(-excess / normal.norm_sq(), normal)
                }
            }
            Self::Hyperplane { normal, offset } => {
                let excess = normal.dot(z) - *offset;
                z.axpy(-excess / normal.norm_sq(), normal)
            }
            Self::Box { lower, upper } => Point::from_vec(
                z.coords()
                    .iter()
                    .zip(lower.coords().iter().zip(upper.coords()))
                    .map(|(&v, (&lo, &hi))| v.max(lo).min(hi))
                    .collect(),
            ),
            Self::Ball { center, radius } => {
                let d = z.dist(center);
                if d <= *radius {
                    z.clone()
                } else {
                    let w = z - center;
                    center.axpy(*radius / d, &w)
                }
            }
            Self::AffineSubspace { basepoint, basis } => {
                let w = z - basepoint;
                basis
                    .iter()
                    .fold(basepoint.clone(), |acc, u| acc.axpy(u.dot(&w), u))
            }
            Self::Ellipsoid(e) => e.project(z, tol)?,
            Self::Product(l, r) => {
                let (a, b) = z.split(l.dim());
                l.project(&a, tol)?.concat(&r.project(&b, tol)?)
            }
            Self::Diagonal { .. } => project_diagonal(z)?,
        })
    }

    pub fn reflect(&self, z: &Point<T>, tol: T) -> Result<Point<T>> {
        Ok(z.reflect_through(&self.project(z, tol)?))
    }

    /// Euclidean distance `||z - P(z)||`.
    pub fn gap(&self, z: &Point<T>, tol: T) -> Result<T> {
        Ok(z.dist(&self.project(z, tol)?))
    }

    /// Membership up to `tol` in distance (exact for ellipsoids' sign test).
    pub fn contains(&self, z: &Point<T>, tol: T) -> Result<bool> {
        self.check_dim(z)?;
        match self {
            Self::Ellipsoid(e) => Ok(e.contains(z) || e.centered_value(z) <= tol),
            _ => Ok(self.gap(z, T::lit(DEFAULT_TOL))? <= tol),
        }
    }
}

fn check_normal<T: Scalar>(normal: &Point<T>, offset: T) -> Result<()> {
    if !(normal.norm_sq() > T::zero()) {
        return Err(Error::InvalidSet("normal vector must be nonzero".into()));
    }
    if !offset.is_finite() {
        return Err(Error::InvalidSet("offset must be finite".into()));
    }
    Ok(())
}

/// Projection onto `D = {(z, z)}`: both blocks become their average.
pub fn project_diagonal<T: Scalar>(z: &Point<T>) -> Result<Point<T>> {
    if !z.dim().is_multiple_of(2) {
        return Err(Error::OddDimension(z.dim()));
    }
    let (a, b) = z.split(z.dim() / 2);
    let m = a.midpoint(&b);
    Ok(m.concat(&m))
}

/// `X x Y` with a dimension check.
pub fn make_product<T: Scalar>(x: ConvexSet<T>, y: ConvexSet<T>) -> Result<ConvexSet<T>> {
    ConvexSet::product(x, y)
}

/// Free-function form of [`ConvexSet::gap`].
pub fn gap_to_set<T: Scalar>(set: &ConvexSet<T>, z: &Point<T>) -> Result<T> {
    set.gap(z, T::lit(DEFAULT_TOL))
}

/// Running tally of projections charged to one method run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProjectionCounter {
    count: u64,
}

impl ProjectionCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn charge(&mut self, n: u64) {
        self.count += n;
    }

    /// Projects and charges the set's projection cost.
    pub fn project<T: Scalar>(&mut self, set: &ConvexSet<T>, z: &Point<T>, tol: T) -> Result<Point<T>> {
        let p = set.project(z, tol)?;
        self.count += set.projection_cost();
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point<f64> {
        Point::new(v.to_vec()).unwrap()
    }

    const TOL: f64 = 1e-10;

    #[test]
    fn halfspace_drops_violating_component() {
        let h = ConvexSet::halfspace(pt(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(h.project(&pt(&[2.0, 3.0]), TOL).unwrap(), pt(&[0.0, 3.0]));
    }

    #[test]
    fn hyperplane_mirror() {
        let h = ConvexSet::hyperplane(pt(&[0.0, 1.0]), 0.0).unwrap();
        assert_eq!(h.reflect(&pt(&[1.0, 1.0]), TOL).unwrap(), pt(&[1.0, -1.0]));
    }

    #[test]
    fn ball_reflection_via_projection() {
        let b = ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap();
        let z = pt(&[2.0, 0.0]);
        let p = b.project(&z, TOL).unwrap();
        assert_eq!(p, pt(&[1.0, 0.0]));
        let r = b.reflect(&z, TOL).unwrap();
        assert_eq!(r, &p.scale(2.0) - &z);
        assert_eq!(r, pt(&[0.0, 0.0]));
        assert_eq!(b.gap(&z, TOL).unwrap(), 1.0);
    }

    #[test]
    fn inside_points_are_fixed() {
        let z = pt(&[0.25, -0.5]);
        let sets = [
            ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::halfspace(pt(&[1.0, 1.0]), 1.0).unwrap(),
            ConvexSet::boxed(pt(&[-1.0, -1.0]), pt(&[1.0, 1.0])).unwrap(),
        ];
        for s in &sets {
            assert_eq!(s.reflect(&z, TOL).unwrap(), z);
            assert_eq!(s.gap(&z, TOL).unwrap(), 0.0);
        }
    }

    #[test]
    fn halfspace_gap_closed_form() {
        let a = pt(&[3.0, -4.0]);
        let h = ConvexSet::halfspace(a.clone(), 2.0).unwrap();
        for z in [pt(&[5.0, 1.0]), pt(&[-3.0, 2.0]), pt(&[0.7, -0.2])] {
            let closed = ((a.dot(&z) - 2.0) / a.norm()).max(0.0);
            assert!((gap_to_set(&h, &z).unwrap() - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn product_is_blockwise() {
        let x = ConvexSet::halfspace(pt(&[1.0, 0.0]), 0.0).unwrap();
        let k = make_product(x.clone(), x.clone()).unwrap();
        let z = pt(&[1.0, 0.0, 2.0, 0.0]);
        assert_eq!(k.project(&z, TOL).unwrap(), pt(&[0.0, 0.0, 0.0, 0.0]));
        let inside = pt(&[-1.0, 5.0, -2.0, 1.0]);
        assert_eq!(k.project(&inside, TOL).unwrap(), inside);
        let w = pt(&[3.0, 1.0, -2.0, 7.0]);
        let (a, b) = w.split(2);
        let blockwise = x.reflect(&a, TOL).unwrap().concat(&x.reflect(&b, TOL).unwrap());
        assert_eq!(k.reflect(&w, TOL).unwrap(), blockwise);
        assert_eq!(k.projection_cost(), 2);
        assert!(make_product(x, ConvexSet::ball(pt(&[0.0]), 1.0).unwrap()).is_err());
    }

    #[test]
    fn diagonal_averages_and_swaps() {
        assert_eq!(project_diagonal(&pt(&[1.0, 3.0])).unwrap(), pt(&[2.0, 2.0]));
        assert_eq!(project_diagonal(&pt(&[4.0, 4.0])).unwrap(), pt(&[4.0, 4.0]));
        assert!(project_diagonal(&pt(&[1.0, 2.0, 3.0])).is_err());
        let d = ConvexSet::<f64>::diagonal(2).unwrap();
        let z = pt(&[1.0, -2.0, 5.0, 0.5]);
        assert_eq!(d.reflect(&z, TOL).unwrap(), pt(&[5.0, 0.5, 1.0, -2.0]));
        assert_eq!(d.projection_cost(), 1);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b = ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            b.project(&pt(&[1.0, 2.0, 3.0]), TOL),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn constructors_validate() {
        assert!(ConvexSet::halfspace(pt(&[0.0, 0.0]), 1.0).is_err());
        assert!(ConvexSet::boxed(pt(&[1.0]), pt(&[0.0])).is_err());
        assert!(ConvexSet::ball(pt(&[0.0]), -1.0).is_err());
        assert!(ConvexSet::affine(pt(&[0.0, 0.0]), vec![pt(&[1.0, 1.0])]).is_err());
        assert!(ConvexSet::<f64>::diagonal(0).is_err());
    }

    #[test]
    fn affine_reflection_is_involutive() {
        let l = ConvexSet::line(pt(&[1.0, 2.0, 0.0]), &pt(&[1.0, 1.0, 1.0])).unwrap();
        let z = pt(&[0.3, -4.0, 2.0]);
        let rr = l.reflect(&l.reflect(&z, TOL).unwrap(), TOL).unwrap();
        assert!(rr.dist(&z) < 1e-10);
        assert!(l.is_affine());
    }

    #[test]
    fn counter_charges_product_cost() {
        let x = ConvexSet::ball(pt(&[0.0]), 1.0).unwrap();
        let k = make_product(x.clone(), x).unwrap();
        let mut c = ProjectionCounter::new();
        c.project(&k, &pt(&[3.0, -3.0]), TOL).unwrap();
        c.project(&ConvexSet::<f64>::diagonal(1).unwrap(), &pt(&[3.0, -3.0]), TOL).unwrap();
        assert_eq!(c.count(), 3);
    }
}
