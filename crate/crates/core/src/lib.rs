//! Numerical toolkit for vertical oscillation, vertical β-numbers and
//! truncated Riesz transforms in the first Heisenberg group.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod beta;
pub mod error;
pub mod experiment;
pub mod group;
pub mod domains;
pub mod fit;
pub mod oscillation;
pub mod quadrature;
pub mod riesz;

pub use error::{Error, Result};
pub use group::{dist, dist_koranyi, dist_to_plane, Ball, Point, VerticalPlane};
pub use quadrature::{Estimate, Method, SampleConfig};
