//! Time-dependent contraction hierarchies.
//!
//! Edge weights are periodic piecewise-linear travel-time functions ([`ttf::Ttf`]).
//! [`preprocess`] orders and contracts the nodes of a [`tdgraph::TdGraph`] into a
//! [`tdgraph::Hierarchy`]; [`query`] answers earliest-arrival and profile queries
//! on it. [`search`] holds the plain Dijkstra variants that serve both as building
//! blocks and as the reference oracle.

pub mod ttf;
pub mod search;
pub mod tdgraph;
pub mod generator;
pub mod rng;
pub mod preprocess;
pub mod query;
pub mod io;
pub mod harness;
