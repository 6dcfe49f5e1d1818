//! Graphs with Euclidean edges: construction, validation, topology
//! classification, generators and file formats.
//!
//! A [`Network`] is a finite, simple, connected graph whose edges carry a
//! positive length. Every edge is identified with an open interval of that
//! length, so a point of the network is either a vertex or a position strictly
//! inside one edge ([`PointOnNetwork`]). Networks are immutable once built.

mod generate;
pub mod io;
mod sample;
mod topology;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{generate, GenerateSpec};
pub use sample::sample_points;
pub(crate) use sample::sample_points_with;
pub use topology::TopologyClass;

pub type VertexId = u64;
pub type EdgeId = u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    /// Planar coordinates, only used by the ambient Euclidean metric.
    pub coords: Option<[f64; 2]>,
}

impl Vertex {
    pub fn new(id: VertexId) -> Self {
        Self { id, coords: None }
    }

    pub fn at(id: VertexId, x: f64, y: f64) -> Self {
        Self {
            id,
            coords: Some([x, y]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
    /// Drawing polyline. Stored for round trips, never used by any metric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Vec<[f64; 2]>>,
}

impl Edge {
    pub fn new(id: EdgeId, u: VertexId, v: VertexId, length: f64) -> Self {
        Self {
            id,
            u,
            v,
            length,
            geometry: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("network has no vertices")]
    Empty,
    #[error("duplicate vertex id {0}")]
    DuplicateVertexId(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} has non-positive length {length}")]
    NonPositiveLength { edge: EdgeId, length: f64 },
    #[error("edge {edge} references unknown vertex {vertex}")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} repeats the vertex pair ({u}, {v})")]
    DuplicateEdge {
        edge: EdgeId,
        u: VertexId,
        v: VertexId,
    },
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("offset {offset} must lie strictly inside (0, {length}) on edge {edge}")]
    OffsetOutOfRange {
        edge: EdgeId,
        offset: f64,
        length: f64,
    },
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

/// A location on the network.
///
/// Vertices are always represented as `AtVertex`; an `OnEdge` offset lies
/// strictly between 0 and the edge length. Use [`Network::point`] or
/// [`Network::vertex_point`] to build validated values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PointOnNetwork {
    AtVertex(VertexId),
    OnEdge { edge: EdgeId, offset: f64 },
}

impl PointOnNetwork {
    /// Bit-exact identity key, used to deduplicate query points.
    pub(crate) fn key(&self) -> (u8, u64, u64) {
        match *self {
            PointOnNetwork::AtVertex(v) => (0, v, 0),
            PointOnNetwork::OnEdge { edge, offset } => (1, edge, offset.to_bits()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    vertex_index: HashMap<VertexId, usize>,
    edge_index: HashMap<EdgeId, usize>,
    /// Per vertex index: (neighbour vertex index, edge index).
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

/// Validates and freezes a network.
///
/// Checks run in a fixed order so that every malformed input maps to exactly
/// one error: empty vertex list, duplicate vertex ids, then per edge (in
/// input order) self-loop, length, dangling endpoint, duplicate edge id,
/// repeated vertex pair, and finally connectivity.
pub fn build_network(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Network, NetworkError> {
    if vertices.is_empty() {
        return Err(NetworkError::Empty);
    }
    let mut vertex_index = HashMap::with_capacity(vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        if vertex_index.insert(v.id, i).is_some() {
            return Err(NetworkError::DuplicateVertexId(v.id));
        }
    }

    let mut edge_index = HashMap::with_capacity(edges.len());
    let mut pairs = HashSet::with_capacity(edges.len());
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (k, e) in edges.iter().enumerate() {
        if e.u == e.v {
            return Err(NetworkError::SelfLoop {
                edge: e.id,
                vertex: e.u,
            });
        }
        if !(e.length > 0.0 && e.length.is_finite()) {
            return Err(NetworkError::NonPositiveLength {
                edge: e.id,
                length: e.length,
            });
        }
        let iu = *vertex_index
            .get(&e.u)
            .ok_or(NetworkError::DanglingEndpoint {
                edge: e.id,
                vertex: e.u,
            })?;
        let iv = *vertex_index
            .get(&e.v)
            .ok_or(NetworkError::DanglingEndpoint {
                edge: e.id,
                vertex: e.v,
            })?;
        if edge_index.insert(e.id, k).is_some() {
            return Err(NetworkError::DuplicateEdgeId(e.id));
        }
        if !pairs.insert((e.u.min(e.v), e.u.max(e.v))) {
            return Err(NetworkError::DuplicateEdge {
                edge: e.id,
                u: e.u,
                v: e.v,
            });
        }
        adjacency[iu].push((iv, k));
        adjacency[iv].push((iu, k));
    }

    let net = Network {
        vertices,
        edges,
        vertex_index,
        edge_index,
        adjacency,
    };
    let components = net.component_count();
    if components > 1 {
        return Err(NetworkError::DisconnectedGraph { components });
    }
    Ok(net)
}

impl Network {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertex_index.get(&id).map(|&i| &self.vertices[i])
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edge_index.get(&id).map(|&i| &self.edges[i])
    }

    pub(crate) fn vertex_idx(&self, id: VertexId) -> Option<usize> {
        self.vertex_index.get(&id).copied()
    }

    pub(crate) fn edge_idx(&self, id: EdgeId) -> Option<usize> {
        self.edge_index.get(&id).copied()
    }

    /// Neighbours of the vertex at index `i` as (vertex index, edge index).
    pub(crate) fn neighbours(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, id: VertexId) -> Option<usize> {
        self.vertex_idx(id).map(|i| self.adjacency[i].len())
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn has_coordinates(&self) -> bool {
        self.vertices.iter().all(|v| v.coords.is_some())
    }

    /// Validated point constructor.
    pub fn point(&self, edge: EdgeId, offset: f64) -> Result<PointOnNetwork, NetworkError> {
        let e = self.edge(edge).ok_or(NetworkError::UnknownEdge(edge))?;
        if !(offset > 0.0 && offset < e.length) {
            return Err(NetworkError::OffsetOutOfRange {
                edge,
                offset,
                length: e.length,
            });
        }
        Ok(PointOnNetwork::OnEdge { edge, offset })
    }

    pub fn vertex_point(&self, id: VertexId) -> Result<PointOnNetwork, NetworkError> {
        self.vertex(id)
            .map(|_| PointOnNetwork::AtVertex(id))
            .ok_or(NetworkError::UnknownVertex(id))
    }

    /// Re-checks a point that may have been built without the constructors.
    pub fn validate_point(&self, p: &PointOnNetwork) -> Result<(), NetworkError> {
        match *p {
            PointOnNetwork::AtVertex(v) => self.vertex_point(v).map(|_| ()),
            PointOnNetwork::OnEdge { edge, offset } => self.point(edge, offset).map(|_| ()),
        }
    }

    fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        components
    }

    /// Shortest-path distances from vertex index `source` to every vertex.
    pub(crate) fn vertex_distances(&self, source: usize) -> Vec<f64> {
        crate::metrics::dijkstra(self.vertices.len(), source, |x| {
            self.adjacency[x]
                .iter()
                .map(move |&(y, k)| (y, self.edges[k].length))
        })
    }

    /// Largest shortest-path distance between two vertices.
    pub fn diameter(&self) -> f64 {
        (0..self.vertices.len())
            .map(|s| {
                self.vertex_distances(s)
                    .into_iter()
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Edges whose endpoints are joined by a path strictly shorter than the
    /// edge itself (relative tolerance 1e-12). Empty means the network is
    /// distance consistent.
    pub fn check_distance_consistency(&self) -> Vec<EdgeId> {
        let mut cache: HashMap<usize, Vec<f64>> = HashMap::new();
        let mut bad = Vec::new();
        for e in &self.edges {
            let iu = self.vertex_index[&e.u];
            let iv = self.vertex_index[&e.v];
            let dist = cache.entry(iu).or_insert_with(|| self.vertex_distances(iu));
            if dist[iv] < e.length * (1.0 - 1e-12) {
                bad.push(e.id);
            }
        }
        bad
    }

    pub fn is_distance_consistent(&self) -> bool {
        self.check_distance_consistency().is_empty()
    }

    pub fn classify_topology(&self) -> TopologyClass {
        topology::classify(self)
    }

    /// Vertices of degree one.
    pub fn leaves(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .zip(&self.adjacency)
            .filter(|(_, adj)| adj.len() == 1)
            .map(|(v, _)| v.id)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verts(n: u64) -> Vec<Vertex> {
        (1..=n).map(Vertex::new).collect()
    }

    #[test]
    fn minimal_path() {
        let net = build_network(verts(2), vec![Edge::new(0, 1, 2, 3.0)]).unwrap();
        assert_eq!(net.vertex_count(), 2);
        assert_eq!(net.edge_count(), 1);
        assert_eq!(net.degree(1), Some(1));
    }

    #[test]
    fn triangle_is_valid() {
        let net = build_network(
            verts(3),
            vec![
                Edge::new(0, 1, 2, 1.0),
                Edge::new(1, 2, 3, 1.0),
                Edge::new(2, 1, 3, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(net.edge_count(), 3);
    }

    #[test]
    fn isolated_vertex_is_disconnected() {
        let err = build_network(
            verts(4),
            vec![Edge::new(0, 1, 2, 1.0), Edge::new(1, 2, 3, 1.0)],
        )
        .unwrap_err();
        assert_eq!(err, NetworkError::DisconnectedGraph { components: 2 });
    }

    #[test]
    fn each_malformed_input_has_one_error() {
        assert_eq!(build_network(vec![], vec![]).unwrap_err(), NetworkError::Empty);
        assert_eq!(
            build_network(vec![Vertex::new(1), Vertex::new(1)], vec![]).unwrap_err(),
            NetworkError::DuplicateVertexId(1)
        );
        assert_eq!(
            build_network(verts(2), vec![Edge::new(7, 1, 1, 1.0)]).unwrap_err(),
            NetworkError::SelfLoop { edge: 7, vertex: 1 }
        );
        assert!(matches!(
            build_network(verts(2), vec![Edge::new(7, 1, 2, 0.0)]).unwrap_err(),
            NetworkError::NonPositiveLength { edge: 7, .. }
        ));
        assert!(matches!(
            build_network(verts(2), vec![Edge::new(7, 1, 2, f64::NAN)]).unwrap_err(),
            NetworkError::NonPositiveLength { edge: 7, .. }
        ));
        assert_eq!(
            build_network(verts(2), vec![Edge::new(7, 1, 9, 1.0)]).unwrap_err(),
            NetworkError::DanglingEndpoint { edge: 7, vertex: 9 }
        );
        assert_eq!(
            build_network(
                verts(3),
                vec![Edge::new(7, 1, 2, 1.0), Edge::new(7, 2, 3, 1.0)]
            )
            .unwrap_err(),
            NetworkError::DuplicateEdgeId(7)
        );
        assert_eq!(
            build_network(
                verts(2),
                vec![Edge::new(0, 1, 2, 1.0), Edge::new(1, 2, 1, 2.0)]
            )
            .unwrap_err(),
            NetworkError::DuplicateEdge { edge: 1, u: 2, v: 1 }
        );
    }

    #[test]
    fn point_constructor_rejects_endpoints() {
        let net = build_network(verts(2), vec![Edge::new(0, 1, 2, 2.0)]).unwrap();
        assert!(net.point(0, 1.0).is_ok());
        assert!(net.point(0, 0.0).is_err());
        assert!(net.point(0, 2.0).is_err());
        assert!(net.point(5, 1.0).is_err());
        assert!(net.vertex_point(3).is_err());
    }

    #[test]
    fn consistency_flags_long_chord() {
        let net = build_network(
            verts(3),
            vec![
                Edge::new(0, 1, 2, 1.0),
                Edge::new(1, 2, 3, 1.0),
                Edge::new(2, 3, 1, 5.0),
            ],
        )
        .unwrap();
        assert_eq!(net.check_distance_consistency(), vec![2]);

        let ok = build_network(
            verts(3),
            vec![
                Edge::new(0, 1, 2, 1.0),
                Edge::new(1, 2, 3, 1.0),
                Edge::new(2, 3, 1, 1.0),
            ],
        )
        .unwrap();
        assert!(ok.check_distance_consistency().is_empty());
    }

    #[test]
    fn diameter_of_path() {
        let net = build_network(
            verts(3),
            vec![Edge::new(0, 1, 2, 2.0), Edge::new(1, 2, 3, 3.0)],
        )
        .unwrap();
        assert_eq!(net.diameter(), 5.0);
    }
}
