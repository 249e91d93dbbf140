//! Learning from networked examples with fractional-matching weights.
//!
//! Examples are induced by the hyperedges of a k-partite hypergraph, so two
//! examples that share a vertex share a feature block and are dependent.
//! The crate computes per-example weightings (equal, matching-based and the
//! optimal fractional matching with its s-value), evaluates the tail and
//! sample-error bounds that go with each, fits weighted least-squares ERM,
//! and checks the inequalities numerically.
//!
//! ```
//! use netweight::hypergraph::families;
//! use netweight::weighting::s_value;
//!
//! let g = families::star(4, 2).unwrap();
//! assert!((s_value(&g).unwrap() - 1.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod bounds;
pub mod error;
pub mod format;
pub mod hypergraph;
pub mod learner;
pub mod lp;
pub mod rng;
pub mod simulator;
pub mod weighting;

pub use error::{Error, Result};
pub use hypergraph::{DependencyGraph, KPartiteHypergraph, Vertex};
pub use simulator::{Example, GenerativeModel, NetworkedSample};
pub use weighting::{Method, Weighting};
