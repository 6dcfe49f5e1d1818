use std::path::Path;

use netkernel::network::io::{network_to_json, parse_network, parse_points};
use netkernel::network::{build_network, generate, sample_points, Edge, GenerateSpec, PointOnNetwork, TopologyClass, Vertex};
use proptest::prelude::*;

fn triangle(long: f64) -> netkernel::network::Network {
    build_network(
        (0..3).map(Vertex::new).collect(),
        vec![Edge::new(0, 0, 1, 1.0), Edge::new(1, 1, 2, 1.0), Edge::new(2, 0, 2, long)],
    )
    .unwrap()
}

#[test]
fn topology_of_generated_graphs() {
    let star = generate(&GenerateSpec::Star { spokes: 4, length: 2.0 }, 0).unwrap();
    assert_eq!(star.classify_topology(), TopologyClass::EuclideanTree { leaf_count: 4 });
    assert_eq!(star.diameter(), 4.0);

    let cycle = generate(&GenerateSpec::Cycle { n: 6, length: 1.0 }, 0).unwrap();
    assert_eq!(cycle.classify_topology(), TopologyClass::OneSumCyclesTrees);
    assert_eq!(cycle.diameter(), 3.0);

    let pendant = generate(&GenerateSpec::CycleWithPendantTrees { cycle_n: 5, pendant_n: 3, length: 1.0 }, 9).unwrap();
    assert_eq!(pendant.classify_topology(), TopologyClass::OneSumCyclesTrees);
}

#[test]
fn two_cycles_sharing_an_edge_are_general() {
    let net = build_network(
        (0..4).map(Vertex::new).collect(),
        vec![
            Edge::new(0, 0, 1, 1.0),
            Edge::new(1, 1, 2, 1.0),
            Edge::new(2, 2, 3, 1.0),
            Edge::new(3, 3, 0, 1.0),
            Edge::new(4, 0, 2, 1.5),
        ],
    )
    .unwrap();
    assert_eq!(net.classify_topology(), TopologyClass::General);
}

#[test]
fn shortcut_edge_is_flagged() {
    assert!(triangle(2.0).is_distance_consistent());
    let bad = triangle(3.0);
    assert_eq!(bad.check_distance_consistency(), vec![2]);
}

#[test]
fn json_round_trip() {
    let net = generate(&GenerateSpec::RiverTree { depth: 3, trunk_length: 10.0, decay: 0.8, sinuosity: 1.2, branch_angle: 30.0 }, 4).unwrap();
    let text = network_to_json(&net);
    let back = parse_network(&text, Path::new("mem.json")).unwrap();
    assert_eq!(back.vertex_count(), net.vertex_count());
    assert_eq!(back.edges(), net.edges());
    assert_eq!(back.diameter(), net.diameter());
}

#[test]
fn json_errors_carry_position() {
    let text = "{\n  \"vertices\": [{\"id\": 0}, {\"id\": 1}],\n  \"edges\": [{\"id\": 0, \"u\": 0, \"v\": 1, \"length\": -1}]\n}";
    let e = parse_network(text, Path::new("bad.json")).unwrap_err().to_string();
    assert!(e.contains("bad.json") && e.contains("line 3"), "{e}");

    let dangling = "{\"vertices\": [{\"id\": 0}], \"edges\": [{\"id\": 0, \"u\": 0, \"v\": 7, \"length\": 1}]}";
    assert!(parse_network(dangling, Path::new("d.json")).is_err());
}

#[test]
fn points_csv() {
    let net = generate(&GenerateSpec::Path { n: 3, length: 2.0 }, 0).unwrap();
    let text = "point_id,kind,ref_id,offset\n10,vertex,0,\n11,edge,1,0.5\n";
    let pts = parse_points(text.as_bytes(), &net, Path::new("p.csv")).unwrap();
    assert_eq!(pts[0].point, PointOnNetwork::AtVertex(0));
    assert_eq!(pts[1].point, PointOnNetwork::OnEdge { edge: 1, offset: 0.5 });

    let off_edge = "point_id,kind,ref_id,offset\n1,edge,0,5.0\n";
    let e = parse_points(off_edge.as_bytes(), &net, Path::new("p.csv")).unwrap_err().to_string();
    assert!(e.contains("line 2"), "{e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_trees_are_consistent_trees(n in 2usize..40, seed in any::<u64>()) {
        let net = generate(&GenerateSpec::RandomTree { n, min_length: 0.5, max_length: 2.0 }, seed).unwrap();
        prop_assert_eq!(net.vertex_count(), n);
        prop_assert!(net.classify_topology().is_tree());
        prop_assert!(net.is_distance_consistent());
        prop_assert_eq!(net.classify_topology().leaf_count(), Some(net.leaves().len()));
    }

    #[test]
    fn sampled_points_lie_on_the_network(n in 1usize..50, seed in any::<u64>()) {
        let net = generate(&GenerateSpec::CycleWithPendantTrees { cycle_n: 4, pendant_n: 2, length: 1.5 }, 1).unwrap();
        let pts = sample_points(&net, n, seed);
        prop_assert_eq!(pts.len(), n);
        for p in &pts {
            prop_assert!(net.validate_point(p).is_ok());
        }
        prop_assert_eq!(pts, sample_points(&net, n, seed));
    }
}
