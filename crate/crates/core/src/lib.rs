//! Two-set convex feasibility with circumcentered reflections.
//!
//! The crate implements the centralized circumcentered-reflection method
//! (cCRM) together with MAP, SPM, CRM, parallel CRM and product-space CRM,
//! an audit layer that checks centralization, firm quasi-nonexpansiveness
//! and rate bounds on live iterates, a seeded two-ellipsoid instance
//! generator and a benchmark harness with performance profiles.
//!
//! All geometry is generic over [`Scalar`] (`f64` or `f32`); the aliases at
//! the crate root fix `f64`, which is what the generator and benchmarks use.

// `!(x > 0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod circumcenter;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod methods;
pub mod point;
pub mod regularity;
pub mod scalar;
pub mod sets;

pub use circumcenter::{circumcenter3, circumcenter_residual, CircumcenterResult, Degeneracy};
pub use error::{Error, Result};
pub use methods::{run, MethodKind, MethodRun, StopReason, StoppingCriterion};
pub use point::Point;
pub use scalar::Scalar;
pub use sets::{ConvexSet, Ellipsoid, ProjectionCounter};

pub type Point64 = Point<f64>;
pub type Point32 = Point<f32>;
pub type ConvexSet64 = ConvexSet<f64>;
pub type ConvexSet32 = ConvexSet<f32>;
pub type Ellipsoid64 = Ellipsoid<f64>;
pub type MethodRun64 = MethodRun<f64>;
pub type EllipsoidInstance64 = instances::EllipsoidInstance<f64>;
