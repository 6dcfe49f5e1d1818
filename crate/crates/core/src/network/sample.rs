use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Network, PointOnNetwork};

/// Draws `n` points uniformly with respect to length measure.
///
/// Vertices have measure zero, so every point is `OnEdge`. Deterministic for
/// a fixed seed.
pub fn sample_points(net: &Network, n: usize, seed: u64) -> Vec<PointOnNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_points_with(net, n, &mut rng)
}

pub(crate) fn sample_points_with<R: Rng>(
    net: &Network,
    n: usize,
    rng: &mut R,
) -> Vec<PointOnNetwork> {
    let edges = net.edges();
    if edges.is_empty() {
        let v = net.vertices()[0].id;
        return vec![PointOnNetwork::AtVertex(v); n];
    }
    let mut cumulative = Vec::with_capacity(edges.len());
    let mut total = 0.0;
    for e in edges {
        total += e.length;
        cumulative.push(total);
    }
    (0..n)
        .map(|_| {
            let s = rng.random_range(0.0..total);
            let k = cumulative.partition_point(|&c| c <= s).min(edges.len() - 1);
            let e = &edges[k];
            let offset = loop {
                let o = rng.random_range(0.0..e.length);
                if o > 0.0 {
                    break o;
                }
            };
            PointOnNetwork::OnEdge {
                edge: e.id,
                offset,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network, Edge, Vertex};

    #[test]
    fn single_edge_offset_is_interior() {
        let net = build_network(
            vec![Vertex::new(0), Vertex::new(1)],
            vec![Edge::new(0, 0, 1, 1.0)],
        )
        .unwrap();
        for seed in 0..50 {
            match sample_points(&net, 1, seed)[0] {
                PointOnNetwork::OnEdge { edge: 0, offset } => {
                    assert!(offset > 0.0 && offset < 1.0)
                }
                p => panic!("unexpected {p:?}"),
            }
        }
    }

    #[test]
    fn proportional_to_length() {
        let net = build_network(
            vec![Vertex::new(0), Vertex::new(1), Vertex::new(2)],
            vec![Edge::new(0, 0, 1, 1.0), Edge::new(1, 1, 2, 9.0)],
        )
        .unwrap();
        let pts = sample_points(&net, 1000, 11);
        let long = pts
            .iter()
            .filter(|p| matches!(p, PointOnNetwork::OnEdge { edge: 1, .. }))
            .count();
        // 3-sigma binomial band around 0.9: sqrt(0.09/1000) ~ 0.0095.
        let frac = long as f64 / 1000.0;
        assert!((frac - 0.9).abs() <= 0.03, "fraction {frac}");
        assert_eq!(pts, sample_points(&net, 1000, 11));
    }
}
