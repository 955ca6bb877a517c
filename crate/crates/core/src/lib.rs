//! Multi-product threshold diffusion on weighted digraphs.
//!
//! A [`Network`] assigns each node a set of products it may still choose
//! and a threshold per product. A node adopts product `t` once the total
//! weight of its in-neighbours that adopted `t` reaches its threshold, and
//! adoption is irrevocable. The crate answers questions about where such a
//! process can end:
//!
//! - [`spread`]: can or must a product reach every node;
//! - [`contraction`]: is the final network unique;
//! - [`adoption`]: does a node adopt in some or every final network, and how
//!   many adopters a product can gain;
//! - [`oracle`]: exhaustive enumeration of final networks, used as ground
//!   truth for small instances.
//!
//! [`transform`] rewrites networks into equitable ones with
//! product-independent thresholds, [`generate`] builds gadgets and random
//! instances, and [`document`] reads and writes the text format.

pub mod adoption;
pub mod cli;
pub mod contraction;
pub mod document;
pub mod error;
pub mod exec;
pub mod generate;
pub mod graph;
pub mod levels;
pub mod network;
pub mod oracle;
pub mod rational;
pub mod spread;
pub mod transform;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{Edge, WeightedDigraph};
pub use network::{AdoptionEvent, Network, NetworkBuilder, ProductId, ProductSet, ReductionTrace};
pub use rational::Rational;
