use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use super::{distance_matrix, DistanceMatrix, MetricError, MetricKind};
use crate::network::{Network, PointOnNetwork};

/// Memoizes distance matrices per (network, point list, metric).
///
/// Entries are keyed by a content hash; the stored inputs are compared on a
/// hit, so a hash collision costs a recomputation and never a wrong answer.
#[derive(Default)]
pub struct DistanceCache {
    entries: Mutex<HashMap<u64, Vec<Entry>>>,
}

struct Entry {
    net: Network,
    points: Vec<PointOnNetwork>,
    metric: MetricKind,
    matrix: Arc<DistanceMatrix>,
}

impl DistanceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_compute(
        &self,
        net: &Network,
        points: &[PointOnNetwork],
        metric: MetricKind,
    ) -> Result<Arc<DistanceMatrix>, MetricError> {
        let key = content_hash(net, points, metric);
        if let Some(bucket) = self.entries.lock().unwrap().get(&key) {
            if let Some(e) = bucket
                .iter()
                .find(|e| e.metric == metric && e.points == points && e.net == *net)
            {
                return Ok(Arc::clone(&e.matrix));
            }
        }
        // Computed outside the lock; a concurrent duplicate is harmless.
        let matrix = Arc::new(distance_matrix(net, points, metric)?);
        self.entries.lock().unwrap().entry(key).or_default().push(Entry {
            net: net.clone(),
            points: points.to_vec(),
            metric,
            matrix: Arc::clone(&matrix),
        });
        Ok(matrix)
    }
}

fn content_hash(net: &Network, points: &[PointOnNetwork], metric: MetricKind) -> u64 {
    let mut h = DefaultHasher::new();
    metric.hash(&mut h);
    for v in net.vertices() {
        v.id.hash(&mut h);
        v.coords.map(|c| [c[0].to_bits(), c[1].to_bits()]).hash(&mut h);
    }
    for e in net.edges() {
        (e.id, e.u, e.v, e.length.to_bits()).hash(&mut h);
    }
    for p in points {
        p.key().hash(&mut h);
    }
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate, GenerateSpec};

    #[test]
    fn reuses_matrix_for_identical_inputs() {
        let net = generate(&GenerateSpec::Cycle { n: 5, length: 1.0 }, 0).unwrap();
        let pts = crate::network::sample_points(&net, 6, 1);
        let cache = DistanceCache::new();
        let a = cache.get_or_compute(&net, &pts, MetricKind::Resistance).unwrap();
        let b = cache.get_or_compute(&net, &pts, MetricKind::Resistance).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        cache.get_or_compute(&net, &pts, MetricKind::Geodesic).unwrap();
        cache.get_or_compute(&net, &pts[1..], MetricKind::Geodesic).unwrap();
        assert_eq!(cache.len(), 3);
    }
}
