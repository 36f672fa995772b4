//! Hitting times of random walks on graphs.
//!
//! Times are computed for the simple random walk and for the maximal-entropy
//! random walk (MERW). Each can be obtained by a direct absorbing-chain solve,
//! through the quotient of an equitable or weight-equitable partition, or by
//! Monte Carlo simulation.
//!
//! Transition matrices are column-stochastic: `T[(i, j)]` is the probability
//! of stepping from `j` to `i`.

pub mod error;
pub mod graphs;
pub mod numerics;
pub mod partitions;
pub mod regularity;
pub mod schemes;
pub mod verify;
pub mod walks;

pub use error::{Error, Result};
pub use graphs::{Family, Graph, VertexPair};
pub use numerics::{Matrix, PerronData};
pub use partitions::{Partition, QuotientKind, QuotientMatrix};
pub use walks::{Method, WalkKind};
