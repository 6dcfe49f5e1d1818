use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_network, Edge, Network, NetworkError, Vertex};

fn unit() -> f64 {
    1.0
}

/// Parameters for the built-in network generators.
///
/// Every generator embeds its vertices in the plane. Edge lengths are the
/// chord length times a detour factor >= 1, so planar distances never exceed
/// network distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenerateSpec {
    Path {
        n: usize,
        #[serde(default = "unit")]
        length: f64,
    },
    Cycle {
        n: usize,
        #[serde(default = "unit")]
        length: f64,
    },
    Star {
        spokes: usize,
        #[serde(default = "unit")]
        length: f64,
    },
    RandomTree {
        n: usize,
        #[serde(default = "default_min_length")]
        min_length: f64,
        #[serde(default = "default_max_length")]
        max_length: f64,
    },
    /// Binary-branching drainage tree rooted at an outlet. Chord lengths
    /// shrink by `decay` per branching level; each reach meanders by a
    /// factor drawn from `[1, sinuosity]`.
    RiverTree {
        depth: usize,
        #[serde(default = "default_trunk")]
        trunk_length: f64,
        #[serde(default = "default_decay")]
        decay: f64,
        #[serde(default = "default_sinuosity")]
        sinuosity: f64,
        /// Maximum half-angle between sibling tributaries, in degrees.
        #[serde(default = "default_branch_angle")]
        branch_angle: f64,
    },
    /// A cycle with a random tree hanging off every cycle vertex.
    CycleWithPendantTrees {
        cycle_n: usize,
        pendant_n: usize,
        #[serde(default = "unit")]
        length: f64,
    },
}

fn default_min_length() -> f64 {
    0.5
}
fn default_max_length() -> f64 {
    2.0
}
fn default_trunk() -> f64 {
    60.0
}
fn default_decay() -> f64 {
    0.8
}
fn default_sinuosity() -> f64 {
    1.5
}
fn default_branch_angle() -> f64 {
    40.0
}

struct Builder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Builder {
    fn new() -> Self {
        Self {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    fn vertex(&mut self, x: f64, y: f64) -> u64 {
        let id = self.vertices.len() as u64;
        self.vertices.push(Vertex::at(id, x, y));
        id
    }

    fn edge(&mut self, u: u64, v: u64, length: f64) {
        let id = self.edges.len() as u64;
        self.edges.push(Edge::new(id, u, v, length));
    }

    fn coords(&self, v: u64) -> [f64; 2] {
        self.vertices[v as usize].coords.unwrap()
    }

    fn chord(&self, u: u64, v: u64) -> f64 {
        let (a, b) = (self.coords(u), self.coords(v));
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    /// Grows a random tree of `n` new vertices hanging from `root`.
    fn grow_tree(&mut self, rng: &mut ChaCha8Rng, root: u64, n: usize, lo: f64, hi: f64) {
        let mut members = vec![root];
        for _ in 0..n {
            let parent = members[rng.random_range(0..members.len())];
            let length = rng.random_range(lo..=hi);
            let detour = rng.random_range(1.0..1.3);
            let angle = rng.random_range(0.0..2.0 * PI);
            let [px, py] = self.coords(parent);
            let chord = length / detour;
            let v = self.vertex(px + chord * angle.cos(), py + chord * angle.sin());
            self.edge(parent, v, length);
            members.push(v);
        }
    }

    fn finish(self) -> Result<Network, NetworkError> {
        build_network(self.vertices, self.edges)
    }
}

fn positive(name: &str, x: f64) -> Result<(), NetworkError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(NetworkError::InvalidParams(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

fn at_least(name: &str, x: usize, min: usize) -> Result<(), NetworkError> {
    if x >= min {
        Ok(())
    } else {
        Err(NetworkError::InvalidParams(format!(
            "{name} must be at least {min}, got {x}"
        )))
    }
}

/// Builds a network from `spec`; a pure function of `(spec, seed)`.
pub fn generate(spec: &GenerateSpec, seed: u64) -> Result<Network, NetworkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new();
    match *spec {
        GenerateSpec::Path { n, length } => {
            at_least("n", n, 2)?;
            positive("length", length)?;
            for i in 0..n {
                b.vertex(i as f64 * length, 0.0);
            }
            for i in 1..n as u64 {
                b.edge(i - 1, i, length);
            }
        }
        GenerateSpec::Cycle { n, length } => {
            at_least("n", n, 3)?;
            positive("length", length)?;
            let radius = length / (2.0 * (PI / n as f64).sin());
            for i in 0..n {
                let a = 2.0 * PI * i as f64 / n as f64;
                b.vertex(radius * a.cos(), radius * a.sin());
            }
            for i in 0..n as u64 {
                b.edge(i, (i + 1) % n as u64, length);
            }
        }
        GenerateSpec::Star { spokes, length } => {
            at_least("spokes", spokes, 1)?;
            positive("length", length)?;
            let c = b.vertex(0.0, 0.0);
            for i in 0..spokes {
                let a = 2.0 * PI * i as f64 / spokes as f64;
                let v = b.vertex(length * a.cos(), length * a.sin());
                b.edge(c, v, length);
            }
        }
        GenerateSpec::RandomTree {
            n,
            min_length,
            max_length,
        } => {
            at_least("n", n, 2)?;
            positive("min_length", min_length)?;
            if max_length < min_length {
                return Err(NetworkError::InvalidParams(
                    "max_length must be >= min_length".into(),
                ));
            }
            let root = b.vertex(0.0, 0.0);
            b.grow_tree(&mut rng, root, n - 1, min_length, max_length);
        }
        GenerateSpec::RiverTree {
            depth,
            trunk_length,
            decay,
            sinuosity,
            branch_angle,
        } => {
            at_least("depth", depth, 1)?;
            if depth > 16 {
                return Err(NetworkError::InvalidParams("depth must be <= 16".into()));
            }
            positive("trunk_length", trunk_length)?;
            positive("decay", decay)?;
            if !(sinuosity >= 1.0) {
                return Err(NetworkError::InvalidParams(
                    "sinuosity must be >= 1".into(),
                ));
            }
            if !(branch_angle > 0.0 && branch_angle < 90.0) {
                return Err(NetworkError::InvalidParams(
                    "branch_angle must lie in (0, 90) degrees".into(),
                ));
            }
            let max_half = branch_angle.to_radians();
            let outlet = b.vertex(0.0, 0.0);
            let chord = trunk_length * rng.random_range(0.8..1.2);
            let top = b.vertex(0.0, chord);
            let meander = rng.random_range(1.0..=sinuosity);
            b.edge(outlet, top, chord * meander);
            // (vertex, flow direction, level)
            let mut frontier = vec![(top, PI / 2.0, 1usize)];
            while let Some((v, heading, level)) = frontier.pop() {
                if level > depth {
                    continue;
                }
                let [x, y] = b.coords(v);
                for side in [-1.0, 1.0] {
                    let turn = side * max_half * rng.random_range(0.3..1.0);
                    let dir = heading + turn;
                    let chord =
                        trunk_length * decay.powi(level as i32) * rng.random_range(0.7..1.3);
                    let w = b.vertex(x + chord * dir.cos(), y + chord * dir.sin());
                    let meander = rng.random_range(1.0..=sinuosity);
                    b.edge(v, w, b.chord(v, w) * meander);
                    frontier.push((w, dir, level + 1));
                }
            }
        }
        GenerateSpec::CycleWithPendantTrees {
            cycle_n,
            pendant_n,
            length,
        } => {
            at_least("cycle_n", cycle_n, 3)?;
            positive("length", length)?;
            let radius = length / (2.0 * (PI / cycle_n as f64).sin());
            for i in 0..cycle_n {
                let a = 2.0 * PI * i as f64 / cycle_n as f64;
                b.vertex(radius * a.cos(), radius * a.sin());
            }
            for i in 0..cycle_n as u64 {
                b.edge(i, (i + 1) % cycle_n as u64, length);
            }
            for i in 0..cycle_n as u64 {
                b.grow_tree(&mut rng, i, pendant_n, 0.5 * length, 1.5 * length);
            }
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::TopologyClass;

    #[test]
    fn path_of_three() {
        let net = generate(&GenerateSpec::Path { n: 3, length: 1.0 }, 0).unwrap();
        assert_eq!(net.vertex_count(), 3);
        assert_eq!(net.edge_count(), 2);
    }

    #[test]
    fn random_tree_is_deterministic() {
        let spec = GenerateSpec::RandomTree {
            n: 30,
            min_length: 0.5,
            max_length: 2.0,
        };
        let a = generate(&spec, 7).unwrap();
        let b = generate(&spec, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.classify_topology().is_tree());
        let c = generate(&spec, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cycle_is_one_sum() {
        let net = generate(&GenerateSpec::Cycle { n: 6, length: 1.0 }, 0).unwrap();
        assert_eq!(net.classify_topology(), TopologyClass::OneSumCyclesTrees);
        assert!(net.is_distance_consistent());
        // Chords equal the requested length.
        let e = &net.edges()[0];
        let (a, b) = (
            net.vertex(e.u).unwrap().coords.unwrap(),
            net.vertex(e.v).unwrap().coords.unwrap(),
        );
        assert!(((a[0] - b[0]).hypot(a[1] - b[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn river_tree_shape() {
        let spec = GenerateSpec::RiverTree {
            depth: 4,
            trunk_length: 50.0,
            decay: 0.7,
            sinuosity: 1.5,
            branch_angle: 40.0,
        };
        let net = generate(&spec, 3).unwrap();
        // outlet + confluence + 2 + 4 + 8 + 16
        assert_eq!(net.vertex_count(), 32);
        assert_eq!(
            net.classify_topology(),
            TopologyClass::EuclideanTree { leaf_count: 17 }
        );
        for e in net.edges() {
            let (a, b) = (
                net.vertex(e.u).unwrap().coords.unwrap(),
                net.vertex(e.v).unwrap().coords.unwrap(),
            );
            assert!(e.length >= (a[0] - b[0]).hypot(a[1] - b[1]) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn pendant_trees_keep_one_sum() {
        let spec = GenerateSpec::CycleWithPendantTrees {
            cycle_n: 5,
            pendant_n: 3,
            length: 1.0,
        };
        let net = generate(&spec, 1).unwrap();
        assert_eq!(net.vertex_count(), 20);
        assert_eq!(net.classify_topology(), TopologyClass::OneSumCyclesTrees);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(
            generate(&GenerateSpec::Cycle { n: 2, length: 1.0 }, 0),
            Err(NetworkError::InvalidParams(_))
        ));
        assert!(matches!(
            generate(&GenerateSpec::Path { n: 4, length: -1.0 }, 0),
            Err(NetworkError::InvalidParams(_))
        ));
    }

    #[test]
    fn spec_json_is_strict() {
        let ok: GenerateSpec =
            serde_json::from_str(r#"{"kind":"river_tree","depth":3}"#).unwrap();
        assert!(matches!(ok, GenerateSpec::RiverTree { depth: 3, .. }));
        assert!(serde_json::from_str::<GenerateSpec>(r#"{"kind":"path","n":3,"bogus":1}"#)
            .is_err());
    }
}
