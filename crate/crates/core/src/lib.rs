//! Permutational similarity of matrices, and hence graph isomorphism, decided
//! through coherent-algebra refinement, commutant polytopes and randomized
//! comparison of ball-intersected polytope volumes.
//!
//! The pipeline, in order:
//!
//! 1. [`graph_io`] reads the inputs and classifies them.
//! 2. [`coherent`] computes the coherent closures, matches their structure
//!    constants and reduces the pair to regular symmetric integer matrices.
//! 3. [`commutant`] builds the subspaces `{X : AX = XB}` of zero line-sum
//!    matrices, their orthonormal bases and the polytopes cut out by
//!    `X >= -J/n`.
//! 4. [`volume`] estimates volumes of those polytopes intersected with balls
//!    by multiphase hit-and-run sampling.
//! 5. [`decider`] runs the exact filters and the volume comparison and
//!    returns a [`decider::Verdict`].

pub mod coherent;
pub mod commutant;
pub mod decider;
pub mod error;
pub mod graph_io;
pub mod volume;

pub use error::{Error, Result};
pub use graph_io::{AdjacencyMatrix, GraphFormat};
