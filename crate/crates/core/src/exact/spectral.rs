use nalgebra::{DMatrix, SymmetricEigen};

use super::dense_guard;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::num::Real;

/// Eigenvalues of the normalized Laplacian `I - D^-1/2 A D^-1/2`, ascending.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// `sum_{i >= 2} 1 / sigma_i`.
    pub fn kemeny(&self) -> T {
        self.eigenvalues[1..]
            .iter()
            .fold(T::zero(), |acc, &s| acc + T::one() / s)
    }
}

pub fn normalized_laplacian_spectrum<T: Real>(graph: &Graph) -> Result<Spectrum<T>> {
    dense_guard(graph)?;
    let n = graph.node_count();
    let inv_sqrt: Vec<T> = (0..n)
        .map(|v| T::one() / T::of(graph.degree(v)).sqrt())
        .collect();
    let mut lap = DMatrix::<T>::identity(n, n);
    for u in 0..n {
        for &v in graph.neighbors(u) {
            lap[(u, v)] = -(inv_sqrt[u] * inv_sqrt[v]);
        }
    }
    let mut eigenvalues: Vec<T> = SymmetricEigen::new(lap).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    // A zero eigenvalue of multiplicity > 1 means more than one component.
    let eps = T::of_f64(1e-10).max(T::default_epsilon() * T::of(100 * n));
    if eigenvalues[1] < eps {
        return Err(Error::Disconnected);
    }
    Ok(Spectrum { eigenvalues })
}

/// Kemeny constant as the trace of the normalized Laplacian pseudo-inverse.
pub fn kemeny_eigen_in<T: Real>(graph: &Graph) -> Result<T> {
    Ok(normalized_laplacian_spectrum::<T>(graph)?.kemeny())
}

pub fn kemeny_eigen(graph: &Graph) -> Result<f64> {
    kemeny_eigen_in::<f64>(graph)
}
