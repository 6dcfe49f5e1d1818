//! Network JSON and points CSV formats.
//!
//! Network file:
//! `{"vertices":[{"id":1,"x":0.0,"y":0.0},...],"edges":[{"id":0,"u":1,"v":2,"length":3.5},...]}`
//! with `x`/`y` optional (both or neither).
//!
//! Points file (header required): `point_id,kind,ref_id,offset` where `kind`
//! is `vertex` or `edge` and `offset` is empty for vertex rows.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{build_network, Edge, Network, NetworkError, PointOnNetwork, Vertex};
use crate::fmt::fmt_f64;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Network {
        path: PathBuf,
        #[source]
        source: NetworkError,
    },
    #[error("{path}: line {line}: {message}")]
    Csv {
        path: PathBuf,
        line: u64,
        message: String,
    },
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn json(path: &Path, e: serde_json::Error) -> Self {
        IoError::Json {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawVertex", into = "RawVertex")]
struct VertexRecord(Vertex);

impl TryFrom<RawVertex> for VertexRecord {
    type Error = String;

    fn try_from(r: RawVertex) -> Result<Self, String> {
        let coords = match (r.x, r.y) {
            (Some(x), Some(y)) if x.is_finite() && y.is_finite() => Some([x, y]),
            (None, None) => None,
            (Some(_), Some(_)) => return Err(format!("vertex {}: non-finite coordinate", r.id)),
            _ => return Err(format!("vertex {}: x and y must be given together", r.id)),
        };
        Ok(VertexRecord(Vertex { id: r.id, coords }))
    }
}

impl From<VertexRecord> for RawVertex {
    fn from(v: VertexRecord) -> Self {
        RawVertex {
            id: v.0.id,
            x: v.0.coords.map(|c| c[0]),
            y: v.0.coords.map(|c| c[1]),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: u64,
    u: u64,
    v: u64,
    length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawEdge", into = "RawEdge")]
struct EdgeRecord(Edge);

impl TryFrom<RawEdge> for EdgeRecord {
    type Error = String;

    fn try_from(r: RawEdge) -> Result<Self, String> {
        if r.u == r.v {
            return Err(format!("edge {}: self-loop on vertex {}", r.id, r.u));
        }
        if !(r.length > 0.0 && r.length.is_finite()) {
            return Err(format!("edge {}: length must be positive, got {}", r.id, r.length));
        }
        Ok(EdgeRecord(Edge {
            id: r.id,
            u: r.u,
            v: r.v,
            length: r.length,
            geometry: r.geometry,
        }))
    }
}

impl From<EdgeRecord> for RawEdge {
    fn from(e: EdgeRecord) -> Self {
        let e = e.0;
        RawEdge {
            id: e.id,
            u: e.u,
            v: e.v,
            length: e.length,
            geometry: e.geometry,
        }
    }
}

/// Parses a network from JSON text. `origin` labels error messages.
pub fn parse_network(text: &str, origin: &Path) -> Result<Network, IoError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| IoError::json(origin, e))?;
    build_network(
        file.vertices.into_iter().map(|v| v.0).collect(),
        file.edges.into_iter().map(|e| e.0).collect(),
    )
    .map_err(|source| IoError::Network {
        path: origin.to_path_buf(),
        source,
    })
}

pub fn read_network(path: impl AsRef<Path>) -> Result<Network, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_network(&text, path)
}

pub fn network_to_json(net: &Network) -> String {
    let file = NetworkFile {
        vertices: net.vertices().iter().cloned().map(VertexRecord).collect(),
        edges: net.edges().iter().cloned().map(EdgeRecord).collect(),
    };
    serde_json::to_string_pretty(&file).expect("network serializes")
}

pub fn write_network(net: &Network, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, network_to_json(net)).map_err(|e| IoError::io(path, e))
}

/// A point together with its user-facing identifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NamedPoint {
    pub id: u64,
    pub point: PointOnNetwork,
}

/// Reads a points CSV, validating every row against `net`.
pub fn parse_points<R: Read>(
    reader: R,
    net: &Network,
    origin: &Path,
) -> Result<Vec<NamedPoint>, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let err = |line: u64, message: String| IoError::Csv {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let headers = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let expected = ["point_id", "kind", "ref_id", "offset"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(err(
            1,
            format!("header must be `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id: u64 = record[0]
            .parse()
            .map_err(|_| err(line, format!("bad point_id `{}`", &record[0])))?;
        let ref_id: u64 = record[2]
            .parse()
            .map_err(|_| err(line, format!("bad ref_id `{}`", &record[2])))?;
        let offset = &record[3];
        let point = match &record[1] {
            "vertex" => {
                if !offset.is_empty() {
                    return Err(err(line, "vertex rows must leave offset empty".into()));
                }
                net.vertex_point(ref_id)
            }
            "edge" => {
                let o: f64 = offset
                    .parse()
                    .map_err(|_| err(line, format!("bad offset `{offset}`")))?;
                net.point(ref_id, o)
            }
            other => return Err(err(line, format!("kind must be vertex or edge, got `{other}`"))),
        }
        .map_err(|e| err(line, e.to_string()))?;
        out.push(NamedPoint { id, point });
    }
    Ok(out)
}

pub fn read_points(path: impl AsRef<Path>, net: &Network) -> Result<Vec<NamedPoint>, IoError> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    parse_points(f, net, path)
}

pub fn write_points<W: Write>(mut w: W, points: &[NamedPoint]) -> std::io::Result<()> {
    writeln!(w, "point_id,kind,ref_id,offset")?;
    for p in points {
        match p.point {
            PointOnNetwork::AtVertex(v) => writeln!(w, "{},vertex,{},", p.id, v)?,
            PointOnNetwork::OnEdge { edge, offset } => {
                writeln!(w, "{},edge,{},{}", p.id, edge, fmt_f64(offset))?
            }
        }
    }
    Ok(())
}
