//! Finite-dimensional points and the handful of vector kernels the methods need.

use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point of R^n. The dimension is the coordinate count; coordinates are finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Point<T> {
    coords: Vec<T>,
}

impl<T: Scalar> Point<T> {
    /// Builds a point, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("point must have dimension >= 1".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("coordinate {i} is not finite")));
        }
        Ok(Self { coords })
    }

    /// Internal constructor for values produced by arithmetic on valid points.
    #[inline]
    pub(crate) fn from_vec(coords: Vec<T>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_vec(vec![T::zero(); dim.max(1)])
    }

    /// Unit vector `e_i` in R^dim.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut p = Self::zeros(dim);
        p.coords[i] = T::one();
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<T> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        dot(&self.coords, &other.coords)
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, other: &Self) -> T {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_vec(self.coords.iter().map(|&c| c * s).collect())
    }

    /// `self + s * dir`
    pub fn axpy(&self, s: T, dir: &Self) -> Self {
        Self::from_vec(
            self.coords
                .iter()
                .zip(&dir.coords)
                .map(|(&a, &d)| a + s * d)
                .collect(),
        )
    }

    /// Midpoint `(self + other) / 2`.
    pub fn midpoint(&self, other: &Self) -> Self {
        let h = T::half();
        Self::from_vec(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| h * (a + b))
                .collect(),
        )
    }

    /// Reflection of `self` through `anchor`: `2 * anchor - self`.
    pub fn reflect_through(&self, anchor: &Self) -> Self {
        let two = T::two();
        Self::from_vec(
            self.coords
                .iter()
                .zip(&anchor.coords)
                .map(|(&z, &p)| two * p - z)
                .collect(),
        )
    }

    pub fn max_abs(&self) -> T {
        self.coords.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Concatenation `(self, other)` in R^{n+m}.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.dim() + other.dim());
        v.extend_from_slice(&self.coords);
        v.extend_from_slice(&other.coords);
        Self::from_vec(v)
    }

    /// Splits at `at` into two blocks.
    pub fn split(&self, at: usize) -> (Self, Self) {
        let (a, b) = self.coords.split_at(at);
        (Self::from_vec(a.to_vec()), Self::from_vec(b.to_vec()))
    }

    pub fn cast<U: Scalar>(&self) -> Point<U> {
        Point::from_vec(self.coords.iter().map(|c| U::lit(c.to_f64_lossy())).collect())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64_lossy()).collect()
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<T: Scalar> TryFrom<Vec<T>> for Point<T> {
    type Error = Error;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Self::new(v)
    }
}

impl<T: Scalar> From<Point<T>> for Vec<T> {
    fn from(p: Point<T>) -> Self {
        p.coords
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.coords[i]
    }
}

impl<T: Scalar> Add for &Point<T> {
    type Output = Point<T>;

    fn add(self, rhs: Self) -> Point<T> {
        Point::from_vec(self.coords.iter().zip(&rhs.coords).map(|(&a, &b)| a + b).collect())
    }
}

impl<T: Scalar> Sub for &Point<T> {
    type Output = Point<T>;

    fn sub(self, rhs: Self) -> Point<T> {
        Point::from_vec(self.coords.iter().zip(&rhs.coords).map(|(&a, &b)| a - b).collect())
    }
}

impl<T: Scalar> Mul<T> for &Point<T> {
    type Output = Point<T>;

    fn mul(self, s: T) -> Point<T> {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Point::<f64>::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert_eq!(Point::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn serde_enforces_invariants() {
        let p: Point<f64> = serde_json::from_str("[1.0, 2.5]").unwrap();
        assert_eq!(p.coords(), &[1.0, 2.5]);
        assert!(serde_json::from_str::<Point<f64>>("[]").is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,2.5]");
    }

    #[test]
    fn block_helpers() {
        let a = Point::new(vec![1.0, 3.0]).unwrap();
        let b = Point::new(vec![5.0, 7.0]).unwrap();
        let ab = a.concat(&b);
        assert_eq!(ab.dim(), 4);
        let (x, y) = ab.split(2);
        assert_eq!(x, a);
        assert_eq!(y, b);
        assert_eq!(a.midpoint(&b).coords(), &[3.0, 5.0]);
        assert_eq!(a.reflect_through(&b).coords(), &[9.0, 11.0]);
    }
}
