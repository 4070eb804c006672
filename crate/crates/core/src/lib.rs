//! Gravitational Faraday rotation of photon polarization along null
//! geodesics of the Kerr exterior.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`);
//! the aliases at the crate root fix it to `f64`.

// Index loops mirror the tensor notation; `!(x > y)` rejects NaN on purpose.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod frame;
pub mod geodesic;
pub mod geometry;
pub mod ode;
pub mod oracle;
pub mod output;
pub mod polarization;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Kerr = geometry::KerrParams<f64>;
pub type Point = geometry::SpacetimePoint<f64>;
pub type Conserved = geodesic::ConservedSet<f64>;
pub type State = geodesic::GeodesicState<f64>;
pub type Path = geodesic::Trajectory<f64>;
pub type Frame = frame::ParallelFrame<f64>;

pub type KerrF32 = geometry::KerrParams<f32>;
pub type PointF32 = geometry::SpacetimePoint<f32>;
pub type ConservedF32 = geodesic::ConservedSet<f32>;
