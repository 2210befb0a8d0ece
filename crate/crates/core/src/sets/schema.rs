//! JSON schema for set descriptions (see `docs/schema.md`).

use serde::{Deserialize, Serialize};

use super::{ConvexSet, Ellipsoid};
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::point::Point;
use crate::scalar::Scalar;

/// Wire form of a [`ConvexSet`], tagged by `"variant"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub enum SetDocument<T> {
    Halfspace {
        normal: Point<T>,
        offset: T,
    },
    Hyperplane {
        normal: Point<T>,
        offset: T,
    },
    Box {
        lower: Point<T>,
        upper: Point<T>,
    },
    Ball {
        center: Point<T>,
        radius: T,
    },
    AffineSubspace {
        basepoint: Point<T>,
        basis: Vec<Point<T>>,
    },
    Ellipsoid {
        #[serde(rename = "A")]
        a: Vec<Vec<T>>,
        b: Point<T>,
        alpha: T,
    },
    Product {
        left: std::boxed::Box<SetDocument<T>>,
        right: std::boxed::Box<SetDocument<T>>,
    },
    Diagonal {
        block_dim: usize,
    },
}

impl<T: Scalar> TryFrom<SetDocument<T>> for ConvexSet<T> {
    type Error = Error;

    fn try_from(doc: SetDocument<T>) -> Result<Self> {
        match doc {
            SetDocument::Halfspace { normal, offset } => ConvexSet::halfspace(normal, offset),
            SetDocument::Hyperplane { normal, offset } => ConvexSet::hyperplane(normal, offset),
            SetDocument::Box { lower, upper } => ConvexSet::boxed(lower, upper),
            SetDocument::Ball { center, radius } => ConvexSet::ball(center, radius),
            SetDocument::AffineSubspace { basepoint, basis } => ConvexSet::affine(basepoint, basis),
            SetDocument::Ellipsoid { a, b, alpha } => {
                Ok(ConvexSet::ellipsoid(Ellipsoid::new(SquareMatrix::from_rows(&a)?, b, alpha)?))
            }
            SetDocument::Product { left, right } => {
                ConvexSet::product((*left).try_into()?, (*right).try_into()?)
            }
            SetDocument::Diagonal { block_dim } => ConvexSet::diagonal(block_dim),
        }
    }
}

impl<T: Scalar> From<&ConvexSet<T>> for SetDocument<T> {
    fn from(set: &ConvexSet<T>) -> Self {
        match set {
            ConvexSet::Halfspace { normal, offset } => {
                SetDocument::Halfspace { normal: normal.clone(), offset: *offset }
            }
            ConvexSet::Hyperplane { normal, offset } => {
                SetDocument::Hyperplane { normal: normal.clone(), offset: *offset }
            }
            ConvexSet::Box { lower, upper } => {
                SetDocument::Box { lower: lower.clone(), upper: upper.clone() }
            }
            ConvexSet::Ball { center, radius } => {
                SetDocument::Ball { center: center.clone(), radius: *radius }
            }
            ConvexSet::AffineSubspace { basepoint, basis } => SetDocument::AffineSubspace {
                basepoint: basepoint.clone(),
                basis: basis.clone(),
            },
            ConvexSet::Ellipsoid(e) => SetDocument::Ellipsoid {
                a: e.matrix().rows(),
                b: e.linear().clone(),
                alpha: e.alpha(),
            },
            ConvexSet::Product(l, r) => SetDocument::Product {
                left: std::boxed::Box::new(l.as_ref().into()),
                right: std::boxed::Box::new(r.as_ref().into()),
            },
            ConvexSet::Diagonal { block_dim } => SetDocument::Diagonal { block_dim: *block_dim },
        }
    }
}

impl<T: Scalar> Serialize for ConvexSet<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetDocument::from(self).serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ConvexSet<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SetDocument::<T>::deserialize(d)?;
        ConvexSet::try_from(doc).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ellipsoid_document_shape() {
        let json = r#"{"variant":"ellipsoid","A":[[2.0,0.0],[0.0,1.0]],"b":[0.5,0.0],"alpha":3.0}"#;
        let set: ConvexSet<f64> = serde_json::from_str(json).unwrap();
        assert_eq!(set.dim(), 2);
        assert_eq!(serde_json::to_string(&set).unwrap(), json);
    }

    #[test]
    fn nested_product_round_trip() {
        let json = r#"{"variant":"product","left":{"variant":"ball","center":[0.0],"radius":1.0},"right":{"variant":"halfspace","normal":[1.0],"offset":0.0}}"#;
        let set: ConvexSet<f64> = serde_json::from_str(json).unwrap();
        assert_eq!(set.dim(), 2);
        let back: ConvexSet<f64> = serde_json::from_str(&serde_json::to_string(&set).unwrap()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn invalid_documents_rejected() {
        for bad in [
            r#"{"variant":"ball","center":[0.0],"radius":-1.0}"#,
            r#"{"variant":"halfspace","normal":[0.0,0.0],"offset":1.0}"#,
            r#"{"variant":"ellipsoid","A":[[1.0,2.0],[0.0,1.0]],"b":[0.0,0.0],"alpha":1.0}"#,
            r#"{"variant":"sphere","center":[0.0]}"#,
            r#"{"variant":"diagonal","block_dim":2,"extra":1}"#,
        ] {
            assert!(serde_json::from_str::<ConvexSet<f64>>(bad).is_err(), "{bad}");
        }
    }
}
