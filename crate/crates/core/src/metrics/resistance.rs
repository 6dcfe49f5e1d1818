use nalgebra::DMatrix;
use rayon::prelude::*;

use super::augment::AugmentedGraph;
use super::{DistanceMatrix, MetricError, MetricKind};
use crate::network::{Network, PointOnNetwork};

/// Augmented node count up to which the grounded Laplacian is factorized
/// densely; larger systems use preconditioned conjugate gradients.
pub const DENSE_LIMIT: usize = 2000;

const CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Solver {
    Dense,
    Iterative,
}

/// Effective-resistance distances between `points`, treating each edge as a
/// resistor whose resistance equals its length.
///
/// With node 0 grounded, `R(a, b) = X[a,a] + X[b,b] - 2 X[a,b]` where `X` is
/// the inverse of the grounded Laplacian (zero on the ground row). One
/// factorization serves all query columns.
pub fn resistance_matrix(
    net: &Network,
    points: &[PointOnNetwork],
) -> Result<DistanceMatrix, MetricError> {
    let g = AugmentedGraph::build(net, points)?;
    let solver = if g.node_count() <= DENSE_LIMIT {
        Solver::Dense
    } else {
        Solver::Iterative
    };
    resistance_on(&g, points.len(), solver)
}

#[cfg(test)]
pub(crate) fn resistance_matrix_with(
    net: &Network,
    points: &[PointOnNetwork],
    solver: Solver,
) -> Result<DistanceMatrix, MetricError> {
    let g = AugmentedGraph::build(net, points)?;
    resistance_on(&g, points.len(), solver)
}

fn resistance_on(
    g: &AugmentedGraph,
    n_points: usize,
    solver: Solver,
) -> Result<DistanceMatrix, MetricError> {
    let (unique, pos) = g.unique_queries();
    // potentials[c][node]: grounded potential at `node` for unit current
    // injected at unique[c].
    let potentials: Vec<Vec<f64>> = match solver {
        Solver::Dense => dense_potentials(g, &unique)?,
        Solver::Iterative => unique
            .par_iter()
            .map(|&q| cg_potential(g, q))
            .collect::<Result<_, _>>()?,
    };
    let green = |a: usize, b: usize| potentials[pos[a]][g.query[b]];
    Ok(DistanceMatrix::from_fn(
        n_points,
        MetricKind::Resistance,
        |i, j| {
            if g.query[i] == g.query[j] {
                return 0.0;
            }
            let cross = 0.5 * (green(i, j) + green(j, i));
            (green(i, i) + green(j, j) - 2.0 * cross).max(0.0)
        },
    ))
}

fn dense_potentials(g: &AugmentedGraph, unique: &[usize]) -> Result<Vec<Vec<f64>>, MetricError> {
    let n = g.node_count();
    if n == 1 {
        return Ok(vec![vec![0.0]; unique.len()]);
    }
    let m = n - 1;
    let mut lap = DMatrix::<f64>::zeros(m, m);
    for (x, adj) in g.adjacency.iter().enumerate() {
        for &(y, w) in adj {
            let c = 1.0 / w;
            if x > 0 {
                lap[(x - 1, x - 1)] += c;
                if y > 0 {
                    lap[(x - 1, y - 1)] -= c;
                }
            }
        }
    }
    let chol = lap.cholesky().ok_or(MetricError::SingularSystem)?;
    let mut rhs = DMatrix::<f64>::zeros(m, unique.len());
    for (c, &q) in unique.iter().enumerate() {
        if q > 0 {
            rhs[(q - 1, c)] = 1.0;
        }
    }
    let x = chol.solve(&rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(MetricError::SingularSystem);
    }
    Ok((0..unique.len())
        .map(|c| {
            let mut col = Vec::with_capacity(n);
            col.push(0.0);
            col.extend(x.column(c).iter().copied());
            col
        })
        .collect())
}

/// Jacobi-preconditioned CG on the grounded Laplacian for source `q`.
fn cg_potential(g: &AugmentedGraph, q: usize) -> Result<Vec<f64>, MetricError> {
    let n = g.node_count();
    let mut x = vec![0.0; n];
    if q == 0 {
        return Ok(x);
    }
    let diag: Vec<f64> = g
        .adjacency
        .iter()
        .map(|adj| adj.iter().map(|&(_, w)| 1.0 / w).sum())
        .collect();
    let apply = |v: &[f64], out: &mut [f64]| {
        out[0] = 0.0;
        for i in 1..n {
            let mut s = 0.0;
            for &(j, w) in &g.adjacency[i] {
                s += (v[i] - v[j]) / w;
            }
            out[i] = s;
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut r = vec![0.0; n];
    r[q] = 1.0;
    let mut z: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { r[i] / diag[i] }).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let b_norm = 1.0;
    for _ in 0..(10 * n).max(100) {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(MetricError::SingularSystem);
        }
        let alpha = rz / pap;
        for i in 1..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= CG_TOL * b_norm {
            return Ok(x);
        }
        for i in 1..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 1..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(MetricError::SingularSystem)
}
