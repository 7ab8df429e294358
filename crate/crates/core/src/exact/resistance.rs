use nalgebra::{DMatrix, DVector};

use super::dense_guard;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::num::Real;

/// `(e_u - e_v)^T L^+ (e_u - e_v)` from a dense solve with `L + J/n`.
///
/// `L + J/n` is positive definite on a connected graph and agrees with `L`
/// on the zero-sum subspace, so a Cholesky solve gives the pseudo-inverse
/// action on `e_u - e_v`.
pub fn effective_resistance_exact_in<T: Real>(graph: &Graph, u: usize, v: usize) -> Result<T> {
    dense_guard(graph)?;
    let n = graph.node_count();
    if u == v || u >= n || v >= n {
        return Err(Error::invalid(format!("resistance needs two distinct nodes, got ({u}, {v})")));
    }
    let shift = T::one() / T::of(n);
    let mut m = DMatrix::<T>::from_element(n, n, shift);
    for x in 0..n {
        m[(x, x)] += T::of(graph.degree(x));
        for &y in graph.neighbors(x) {
            m[(x, y)] -= T::one();
        }
    }
    let chol = m.cholesky().ok_or(Error::Disconnected)?;
    let mut rhs = DVector::<T>::zeros(n);
    rhs[u] = T::one();
    rhs[v] = -T::one();
    let x = chol.solve(&rhs);
    Ok(x[u] - x[v])
}

pub fn effective_resistance_exact(graph: &Graph, u: usize, v: usize) -> Result<f64> {
    effective_resistance_exact_in::<f64>(graph, u, v)
}

/// Jacobi-preconditioned conjugate gradient on the combinatorial Laplacian.
#[derive(Debug, Clone, Copy)]
pub struct ConjugateGradient<T> {
    /// Stop when `|r| <= rel_tol * |b|`.
    pub rel_tol: T,
    /// Defaults to `10 n` when `None`.
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CgOutcome<T> {
    /// Solution with its component sum pinned to zero.
    pub solution: Vec<T>,
    pub iterations: usize,
    pub relative_residual: T,
}

impl<T: Real> ConjugateGradient<T> {
    pub fn new(rel_tol: T) -> Self {
        ConjugateGradient {
            rel_tol,
            max_iterations: None,
        }
    }

    /// Solves `L x = b` for a zero-sum right-hand side on a connected graph.
    pub fn solve_laplacian(&self, graph: &Graph, rhs: &[T]) -> Result<CgOutcome<T>> {
        let n = graph.node_count();
        if rhs.len() != n {
            return Err(Error::invalid("right-hand side length differs from node count"));
        }
        let cap = self.max_iterations.unwrap_or(10 * n);
        let inv_deg: Vec<T> = (0..n).map(|v| T::one() / T::of(graph.degree(v))).collect();
        let b_norm = norm(rhs);
        let mut x = vec![T::zero(); n];
        if b_norm == T::zero() {
            return Ok(CgOutcome {
                solution: x,
                iterations: 0,
                relative_residual: T::zero(),
            });
        }
        let mut r = rhs.to_vec();
        let mut z: Vec<T> = r.iter().zip(&inv_deg).map(|(&a, &d)| a * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![T::zero(); n];
        let mut residual = T::one();
        for it in 1..=cap {
            laplacian_apply(graph, &p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            residual = norm(&r) / b_norm;
            if residual <= self.rel_tol {
                pin_zero_sum(&mut x);
                return Ok(CgOutcome {
                    solution: x,
                    iterations: it,
                    relative_residual: residual,
                });
            }
            for i in 0..n {
                z[i] = r[i] * inv_deg[i];
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Convergence {
            iterations: cap,
            residual: residual.to_f64_lossy(),
        })
    }

    pub fn effective_resistance(&self, graph: &Graph, u: usize, v: usize) -> Result<T> {
        let n = graph.node_count();
        if u == v || u >= n || v >= n {
            return Err(Error::invalid(format!("resistance needs two distinct nodes, got ({u}, {v})")));
        }
        let mut rhs = vec![T::zero(); n];
        rhs[u] = T::one();
        rhs[v] = -T::one();
        let out = self.solve_laplacian(graph, &rhs)?;
        Ok(out.solution[u] - out.solution[v])
    }
}

/// Single-pair effective resistance by preconditioned CG.
pub fn effective_resistance_iterative(graph: &Graph, u: usize, v: usize, rel_tol: f64) -> Result<f64> {
    ConjugateGradient::new(rel_tol).effective_resistance(graph, u, v)
}

fn laplacian_apply<T: Real>(graph: &Graph, x: &[T], out: &mut [T]) {
    for (u, o) in out.iter_mut().enumerate() {
        let mut acc = T::of(graph.degree(u)) * x[u];
        for &v in graph.neighbors(u) {
            acc -= x[v];
        }
        *o = acc;
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn pin_zero_sum<T: Real>(x: &mut [T]) {
    let mean = x.iter().fold(T::zero(), |acc, &v| acc + v) / T::of(x.len());
    x.iter_mut().for_each(|v| *v -= mean);
}
