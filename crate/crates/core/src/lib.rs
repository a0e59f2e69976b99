//! Exact K-terminal network reliability with boundary-cut factorization.
//!
//! A stochastic graph split into two sides that share `n` boundary nodes has
//! reliability `R(G) = Σ b_ij R(G₁^{A_i}) R(G₂^{A_j})`, where `A_i` ranges
//! over the set partitions of the boundary, `G^A` identifies boundary nodes
//! according to `A`, and `(b_ij)` is the inverse of the 0/1 connectivity
//! matrix of the partition lattice. This crate builds that matrix and its
//! inverse exactly, and computes reliabilities by brute-force enumeration,
//! contraction/deletion factoring and the boundary factorization, all in
//! exact rational arithmetic.

pub mod algebra;
pub mod cluster;
mod compact;
pub mod corpus;
pub mod dsu;
pub mod error;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod partition;
pub mod rational;
pub mod reliability;
pub mod snf;

pub use error::{Error, ParseError, Result};
pub use graph::{CutDecomposition, Edge, EdgeId, EdgeState, NodeId, StochasticGraph};
pub use partition::{CoherentOrder, OrderVariant, Partition};
pub use rational::Rational;
