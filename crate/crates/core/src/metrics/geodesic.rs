use rayon::prelude::*;

use super::augment::AugmentedGraph;
use super::{dijkstra, DistanceMatrix, MetricError, MetricKind};
use crate::network::{Network, PointOnNetwork};

/// Shortest-path distances between `points`.
///
/// Fails on networks where some edge is longer than an alternative path
/// between its endpoints, since the within-edge distance would then disagree
/// with the graph distance.
pub fn geodesic_matrix(
    net: &Network,
    points: &[PointOnNetwork],
) -> Result<DistanceMatrix, MetricError> {
    let bad = net.check_distance_consistency();
    if !bad.is_empty() {
        return Err(MetricError::InconsistentNetwork { edges: bad });
    }
    let g = AugmentedGraph::build(net, points)?;
    let (unique, pos) = g.unique_queries();
    let n_nodes = g.node_count();
    let rows: Vec<Vec<f64>> = unique
        .par_iter()
        .map(|&s| dijkstra(n_nodes, s, |x| g.adjacency[x].iter().copied()))
        .collect();
    Ok(DistanceMatrix::from_fn(
        points.len(),
        MetricKind::Geodesic,
        |i, j| rows[pos[i]][g.query[j]],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, generate, Edge, GenerateSpec, Vertex};

    #[test]
    fn path_segments_add_up() {
        // A-B length 2, B-C length 3.
        let net = build_network(
            vec![Vertex::new(0), Vertex::new(1), Vertex::new(2)],
            vec![Edge::new(0, 0, 1, 2.0), Edge::new(1, 1, 2, 3.0)],
        )
        .unwrap();
        let pts = [
            net.point(0, 0.5).unwrap(),
            net.point(1, 1.0).unwrap(),
            net.point(0, 0.5).unwrap(),
        ];
        let d = geodesic_matrix(&net, &pts).unwrap();
        assert!((d.get(0, 1) - 2.5).abs() < 1e-15);
        assert_eq!(d.get(0, 2), 0.0);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn cycle_takes_short_way() {
        // Circumference 10 as ten unit edges; arc positions 0 and 7.
        let net = generate(&GenerateSpec::Cycle { n: 10, length: 1.0 }, 0).unwrap();
        let pts = [PointOnNetwork::AtVertex(0), PointOnNetwork::AtVertex(7)];
        let d = geodesic_matrix(&net, &pts).unwrap();
        assert!((d.get(0, 1) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_network_is_rejected() {
        let net = build_network(
            vec![Vertex::new(0), Vertex::new(1), Vertex::new(2)],
            vec![
                Edge::new(0, 0, 1, 1.0),
                Edge::new(1, 1, 2, 1.0),
                Edge::new(2, 2, 0, 5.0),
            ],
        )
        .unwrap();
        let err = geodesic_matrix(&net, &[PointOnNetwork::AtVertex(0)]).unwrap_err();
        assert_eq!(err, MetricError::InconsistentNetwork { edges: vec![2] });
    }
}
