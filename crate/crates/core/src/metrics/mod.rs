//! Pairwise distances between points on a network.
//!
//! Three metrics are supported: the geodesic (shortest-path) metric, the
//! resistance metric (effective resistance with conductance `1/length` per
//! edge), and the straight-line distance between planar embeddings of the
//! points. Interior points are handled by splitting their edges, see
//! [`augment`].

mod augment;
mod cache;
mod euclidean;
mod geodesic;
mod resistance;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::fmt_f64;
use crate::network::{EdgeId, Network, NetworkError, PointOnNetwork, VertexId};

pub use cache::DistanceCache;
pub use euclidean::euclidean_matrix;
pub use geodesic::geodesic_matrix;
pub use resistance::{resistance_matrix, DENSE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Geodesic,
    Resistance,
    #[serde(rename = "euclidean", alias = "ambient_euclidean")]
    AmbientEuclidean,
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Geodesic => "geodesic",
            MetricKind::Resistance => "resistance",
            MetricKind::AmbientEuclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "geodesic" => Ok(MetricKind::Geodesic),
            "resistance" => Ok(MetricKind::Resistance),
            "euclidean" | "ambient_euclidean" => Ok(MetricKind::AmbientEuclidean),
            _ => Err(format!("unknown metric `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeKind {
    Linear,
    /// Times are angles in radians on `[0, 2π)`.
    Circular,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("geodesic metric requested on a distance-inconsistent network (edges {edges:?})")]
    InconsistentNetwork { edges: Vec<EdgeId> },
    #[error("Laplacian system is singular or the solver broke down")]
    SingularSystem,
    #[error("vertex {0} has no planar coordinates")]
    MissingCoordinates(VertexId),
    #[error(transparent)]
    Point(#[from] NetworkError),
}

/// Symmetric matrix of pairwise distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    metric: MetricKind,
}

impl DistanceMatrix {
    pub(crate) fn from_fn(
        n: usize,
        metric: MetricKind,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self { n, values, metric }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matrix over `idx[i]`-indexed entries of `self`.
    pub fn select(&self, idx: &[usize]) -> DistanceMatrix {
        DistanceMatrix::from_fn(idx.len(), self.metric, |i, j| self.get(idx[i], idx[j]))
    }

    /// CSV with a header row of point ids followed by the full matrix.
    pub fn write_csv<W: Write>(&self, mut w: W, ids: &[u64]) -> std::io::Result<()> {
        assert_eq!(ids.len(), self.n);
        let header: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|&d| fmt_f64(d)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Dispatches to the metric-specific builder.
pub fn distance_matrix(
    net: &Network,
    points: &[PointOnNetwork],
    metric: MetricKind,
) -> Result<DistanceMatrix, MetricError> {
    match metric {
        MetricKind::Geodesic => geodesic_matrix(net, points),
        MetricKind::Resistance => resistance_matrix(net, points),
        MetricKind::AmbientEuclidean => euclidean_matrix(net, points),
    }
}

/// Separation between two time stamps. Circular times are angles and the
/// separation is the arc length on the unit circle, in `[0, π]`.
pub fn temporal_separation(t: f64, s: f64, kind: TimeKind) -> f64 {
    let d = (t - s).abs();
    match kind {
        TimeKind::Linear => d,
        TimeKind::Circular => {
            let d = d.rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        }
    }
}

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths with non-negative weights.
pub(crate) fn dijkstra<I, F>(n: usize, source: usize, neighbours: F) -> Vec<f64>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = (usize, f64)>,
{
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Frontier(0.0, source));
    while let Some(Frontier(d, x)) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for (y, w) in neighbours(x) {
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Frontier(nd, y));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_separation() {
        assert!((temporal_separation(1.5, 0.3, TimeKind::Linear) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn circular_separation_wraps() {
        let d = temporal_separation(0.0, 1.5 * PI, TimeKind::Circular);
        assert!((d - PI / 2.0).abs() < 1e-15);
        assert_eq!(temporal_separation(2.0, 2.0, TimeKind::Circular), 0.0);
        let d = temporal_separation(0.1, 0.1 + PI, TimeKind::Circular);
        assert!((d - PI).abs() < 1e-12);
    }

    #[test]
    fn metric_names_parse() {
        for m in [
            MetricKind::Geodesic,
            MetricKind::Resistance,
            MetricKind::AmbientEuclidean,
        ] {
            assert_eq!(m.name().parse::<MetricKind>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(serde_json::from_str::<MetricKind>(&json).unwrap(), m);
        }
    }
}
