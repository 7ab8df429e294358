//! Kemeny constant estimation for undirected graphs from uniform spanning
//! trees, with incremental maintenance of the sample set under edge updates.

pub mod dynamic;
pub mod error;
pub mod exact;
pub mod fenwick;
pub mod generate;
pub mod graph;
pub mod num;
pub mod rng;
pub mod spanning;
pub mod verify;
pub mod ttf;

pub use error::{Error, ErrorCategory, Result};
pub use fenwick::FenwickTree;
pub use graph::{EdgeRef, Graph, ParsedGraph};
pub use num::Real;
pub use spanning::{RootedTree, NO_PARENT};

/// Fenwick tree over subtree-volume differences.
pub type VolumeFenwick = FenwickTree<i64>;
/// Spectrum in double precision.
pub type Spectrum = exact::Spectrum<f64>;
/// Conjugate-gradient solver in double precision.
pub type ConjugateGradient = exact::ConjugateGradient<f64>;
