//! Differential geometry on a single coordinate chart for generalized
//! Riemannian manifolds `G = g + F` carrying the quarter-symmetric
//! non-metric connection
//!
//! ```text
//! ∇¹_X Y = ∇ᵍ_X Y + ½ π(Y) A X − ½ π(X) A Y,
//! ```
//!
//! its dual, and every tensor derived from them. Components are symbolic
//! expressions in the chart coordinates, so covariant and exterior
//! derivatives are exact and identity residuals sit at rounding level.

pub mod chart;
pub mod cli;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod verify;

pub use error::{Error, Result};
