//! Fit the components of a multi-body assembly into a density map.
//!
//! Each component has a fixed set of candidate rigid placements. Pairwise
//! placement overlaps form a symmetric matrix `Q`, agreement with the target
//! map forms a relevance vector `b`, and the choice of one placement per
//! component is the one-hot binary quadratic program
//!
//! ```text
//! minimize  xᵀQx − bᵀx   subject to  A x = 1,  x ∈ {0,1}ⁿ
//! ```
//!
//! The [`solvers`] module attacks it through a linear baseline, a
//! spectrum-shift convex relaxation, an SDP relaxation, an SQP local method
//! and simulated annealing, with exhaustive enumeration as the exact oracle.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod error;
pub mod grid;
pub mod quality;
pub mod solvers;

pub use error::{Error, Result};
pub use nalgebra;
