//! Observations CSV: `rep,point_id,kind,ref_id,offset,time,y`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::fmt::fmt_f64;
use crate::network::io::IoError;
use crate::network::{Network, PointOnNetwork};

const HEADER: [&str; 7] = ["rep", "point_id", "kind", "ref_id", "offset", "time", "y"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub rep: usize,
    pub point_id: u64,
    pub point: PointOnNetwork,
    pub time: f64,
    pub y: f64,
}

pub fn write_observations<W: Write + ?Sized>(w: &mut W, rows: &[Observation]) -> std::io::Result<()> {
    writeln!(w, "{}", HEADER.join(","))?;
    for o in rows {
        let (kind, ref_id, offset) = match o.point {
            PointOnNetwork::AtVertex(v) => ("vertex", v, String::new()),
            PointOnNetwork::OnEdge { edge, offset } => ("edge", edge, fmt_f64(offset)),
        };
        writeln!(
            w,
            "{},{},{kind},{ref_id},{offset},{},{}",
            o.rep,
            o.point_id,
            fmt_f64(o.time),
            fmt_f64(o.y)
        )?;
    }
    Ok(())
}

pub fn parse_observations<R: Read>(reader: R, net: &Network, origin: &Path) -> Result<Vec<Observation>, IoError> {
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
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(err(1, format!("header must be `{}`", HEADER.join(","))));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| err(e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| &record[i];
        let num = |i: usize| -> Result<f64, IoError> {
            field(i)
                .parse()
                .map_err(|_| err(line, format!("bad {} `{}`", HEADER[i], field(i))))
        };
        let int = |i: usize| -> Result<u64, IoError> {
            field(i)
                .parse()
                .map_err(|_| err(line, format!("bad {} `{}`", HEADER[i], field(i))))
        };
        let ref_id = int(3)?;
        let point = match field(2) {
            "vertex" => net.vertex_point(ref_id),
            "edge" => net.point(ref_id, num(4)?),
            other => return Err(err(line, format!("kind must be vertex or edge, got `{other}`"))),
        }
        .map_err(|e| err(line, e.to_string()))?;
        out.push(Observation {
            rep: int(0)? as usize,
            point_id: int(1)?,
            point,
            time: num(5)?,
            y: num(6)?,
        });
    }
    Ok(out)
}

pub fn read_observations(path: &Path, net: &Network) -> Result<Vec<Observation>, IoError> {
    let f = fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    parse_observations(f, net, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate, GenerateSpec};

    #[test]
    fn round_trip() {
        let net = generate(&GenerateSpec::Path { n: 3, length: 2.0 }, 0).unwrap();
        let rows = vec![
            Observation {
                rep: 0,
                point_id: 7,
                point: net.vertex_point(0).unwrap(),
                time: 0.25,
                y: -1.5,
            },
            Observation {
                rep: 1,
                point_id: 8,
                point: net.point(1, 0.1).unwrap(),
                time: 1.0 / 3.0,
                y: 2.0f64.sqrt(),
            },
        ];
        let mut buf = Vec::new();
        write_observations(&mut buf, &rows).unwrap();
        let back = parse_observations(&buf[..], &net, Path::new("x.csv")).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn errors_name_the_line() {
        let net = generate(&GenerateSpec::Path { n: 3, length: 2.0 }, 0).unwrap();
        let text = "rep,point_id,kind,ref_id,offset,time,y\n0,1,vertex,0,,0.5,1\n0,2,edge,9,0.5,0.5,1\n";
        let e = parse_observations(text.as_bytes(), &net, Path::new("x.csv")).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }
}
