use std::collections::HashMap;

use crate::network::{Network, NetworkError, PointOnNetwork};

/// The network with every interior query point promoted to a node.
///
/// Nodes `0..V` are the original vertices (in network order); interior
/// points follow. An edge holding sorted offsets `o1 < ... < ok` becomes the
/// chain `u - p1 - ... - pk - v` with segment lengths
/// `o1, o2 - o1, ..., length - ok`. Coincident query points share a node.
pub(crate) struct AugmentedGraph {
    pub adjacency: Vec<Vec<(usize, f64)>>,
    /// Node of each input point.
    pub query: Vec<usize>,
}

impl AugmentedGraph {
    pub fn build(net: &Network, points: &[PointOnNetwork]) -> Result<Self, NetworkError> {
        let nv = net.vertex_count();
        let mut node_of: HashMap<(u8, u64, u64), usize> = HashMap::new();
        let mut per_edge: Vec<Vec<(f64, usize)>> = vec![Vec::new(); net.edge_count()];
        let mut query = Vec::with_capacity(points.len());
        let mut next = nv;
        for p in points {
            net.validate_point(p)?;
            let node = match *p {
                PointOnNetwork::AtVertex(v) => net.vertex_idx(v).expect("validated"),
                PointOnNetwork::OnEdge { edge, offset } => {
                    *node_of.entry(p.key()).or_insert_with(|| {
                        let k = net.edge_idx(edge).expect("validated");
                        per_edge[k].push((offset, next));
                        next += 1;
                        next - 1
                    })
                }
            };
            query.push(node);
        }

        let mut adjacency = vec![Vec::new(); next];
        let mut link = |a: usize, b: usize, w: f64| {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        };
        for (k, e) in net.edges().iter().enumerate() {
            let iu = net.vertex_idx(e.u).unwrap();
            let iv = net.vertex_idx(e.v).unwrap();
            let stops = &mut per_edge[k];
            stops.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut prev = (0.0, iu);
            for &(offset, node) in stops.iter() {
                link(prev.1, node, offset - prev.0);
                prev = (offset, node);
            }
            link(prev.1, iv, e.length - prev.0);
        }
        Ok(Self { adjacency, query })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Distinct query nodes in first-appearance order, and the position of
    /// each input point in that list.
    pub fn unique_queries(&self) -> (Vec<usize>, Vec<usize>) {
        let mut slot: HashMap<usize, usize> = HashMap::new();
        let mut unique = Vec::new();
        let pos = self
            .query
            .iter()
            .map(|&q| {
                *slot.entry(q).or_insert_with(|| {
                    unique.push(q);
                    unique.len() - 1
                })
            })
            .collect();
        (unique, pos)
    }
}
