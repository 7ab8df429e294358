//! Ground-truth oracles: spectral Kemeny constant, effective resistances,
//! Kirchhoff tree counts, and exhaustive tree / 2-forest enumeration.
//!
//! Everything here is exact or dense and meant for verification on small
//! graphs, except [`ConjugateGradient`], which scales to large sparse ones.

mod forests;
mod resistance;
mod spectral;
mod trees;

pub use forests::{
    enumerate_all_two_forests, enumerate_two_forests, kemeny_forest_formula, path_mapping_sets,
    TwoForest,
};
pub use resistance::{
    effective_resistance_exact, effective_resistance_exact_in, effective_resistance_iterative,
    CgOutcome, ConjugateGradient,
};
pub use spectral::{kemeny_eigen, kemeny_eigen_in, normalized_laplacian_spectrum, Spectrum};
pub use trees::{count_spanning_trees, enumerate_spanning_edge_sets, enumerate_spanning_trees, TreeCount};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest node count accepted by the dense solvers.
pub const DENSE_NODE_LIMIT: usize = 20_000;
/// Largest node count accepted by the Kirchhoff determinant.
pub const TREE_COUNT_NODE_LIMIT: usize = 500;
/// Largest node count for exact big-integer tree counting.
pub const EXACT_TREE_COUNT_NODE_LIMIT: usize = 64;
/// Largest spanning-tree count the enumerators will materialize.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

pub(crate) fn dense_guard(graph: &Graph) -> Result<()> {
    let n = graph.node_count();
    if n > DENSE_NODE_LIMIT {
        return Err(Error::Capacity {
            what: "node count for dense linear algebra",
            limit: DENSE_NODE_LIMIT as u128,
            actual: n as u128,
        });
    }
    if n < 2 {
        return Err(Error::invalid("graph needs at least two nodes"));
    }
    Ok(())
}
