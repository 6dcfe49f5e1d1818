use super::{DistanceMatrix, MetricError, MetricKind};
use crate::network::{Network, PointOnNetwork};

fn planar(net: &Network, p: &PointOnNetwork) -> Result<[f64; 2], MetricError> {
    net.validate_point(p)?;
    let coords = |id| {
        net.vertex(id)
            .and_then(|v| v.coords)
            .ok_or(MetricError::MissingCoordinates(id))
    };
    match *p {
        PointOnNetwork::AtVertex(v) => coords(v),
        PointOnNetwork::OnEdge { edge, offset } => {
            let e = net.edge(edge).expect("validated");
            let (a, b) = (coords(e.u)?, coords(e.v)?);
            let t = offset / e.length;
            Ok([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
        }
    }
}

/// Straight-line distances between the planar positions of `points`.
/// Interior points are interpolated linearly along the chord of their edge.
pub fn euclidean_matrix(
    net: &Network,
    points: &[PointOnNetwork],
) -> Result<DistanceMatrix, MetricError> {
    let xy = points
        .iter()
        .map(|p| planar(net, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DistanceMatrix::from_fn(
        points.len(),
        MetricKind::AmbientEuclidean,
        |i, j| (xy[i][0] - xy[j][0]).hypot(xy[i][1] - xy[j][1]),
    ))
}
