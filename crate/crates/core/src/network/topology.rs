use serde::{Deserialize, Serialize};

use super::Network;

/// Coarse topology used by the validity checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum TopologyClass {
    /// Acyclic network; `leaf_count` counts degree-one vertices.
    EuclideanTree { leaf_count: usize },
    /// Every biconnected block is a single edge or a simple cycle.
    OneSumCyclesTrees,
    General,
}

impl TopologyClass {
    pub fn is_tree(&self) -> bool {
        matches!(self, TopologyClass::EuclideanTree { .. })
    }

    pub fn leaf_count(&self) -> Option<usize> {
        match self {
            TopologyClass::EuclideanTree { leaf_count } => Some(*leaf_count),
            _ => None,
        }
    }
}

pub(super) fn classify(net: &Network) -> TopologyClass {
    if net.edge_count() + 1 == net.vertex_count() {
        return TopologyClass::EuclideanTree {
            leaf_count: net.leaves().len(),
        };
    }
    let all_simple = biconnected_blocks(net).iter().all(|block| {
        let (nv, ne) = block_size(net, block);
        ne == 1 || nv == ne
    });
    if all_simple {
        TopologyClass::OneSumCyclesTrees
    } else {
        TopologyClass::General
    }
}

fn block_size(net: &Network, block: &[usize]) -> (usize, usize) {
    let mut vs: Vec<usize> = block
        .iter()
        .flat_map(|&k| {
            let e = &net.edges()[k];
            [net.vertex_idx(e.u).unwrap(), net.vertex_idx(e.v).unwrap()]
        })
        .collect();
    vs.sort_unstable();
    vs.dedup();
    (vs.len(), block.len())
}

/// Biconnected blocks as lists of edge indices (Hopcroft–Tarjan with an
/// explicit edge stack; iterative so deep trees do not overflow).
pub(crate) fn biconnected_blocks(net: &Network) -> Vec<Vec<usize>> {
    let n = net.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut blocks = Vec::new();

    // Frames: (vertex, edge used to enter it, next neighbour position).
    let mut frames: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        frames.push((root, usize::MAX, 0));
        while let Some(&mut (x, parent_edge, ref mut pos)) = frames.last_mut() {
            let adj = net.neighbours(x);
            if *pos < adj.len() {
                let (y, k) = adj[*pos];
                *pos += 1;
                if k == parent_edge {
                    continue;
                }
                if disc[y] == usize::MAX {
                    edge_stack.push(k);
                    disc[y] = time;
                    low[y] = time;
                    time += 1;
                    frames.push((y, k, 0));
                } else if disc[y] < disc[x] {
                    edge_stack.push(k);
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                frames.pop();
                if let Some(&(p, _, _)) = frames.last() {
                    low[p] = low[p].min(low[x]);
                    if low[x] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some(k) = edge_stack.pop() {
                            block.push(k);
                            if k == parent_edge {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}
