//! Concentration bounds for polynomials of independent random variables.
//!
//! The central quantity is the partition norm `‖A‖_J` of a tensor, the
//! supremum of the multilinear form over unit vectors indexed by the blocks
//! of a partition `J`. Moment and tail bounds for a polynomial `f` are built
//! from the partition norms of its expected derivative tensors `E D^d f`, and
//! the Monte Carlo, random graph and random matrix modules compare them with
//! simulation.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod montecarlo;
pub mod norms;
pub mod partitions;
pub mod poly;
pub mod report;
pub mod rmt;
pub mod tensor;

pub use error::{Error, Result};
pub use norms::{mixed_norm, norm_j, norm_j_bruteforce, NormOptions, NormResult};
pub use partitions::{SetPartition, SplitPartition};
pub use poly::{Law, Polynomial, ProductDistribution};
pub use tensor::Tensor;
