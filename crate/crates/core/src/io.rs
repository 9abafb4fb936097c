//! Flat-file formats.
//!
//! - points: CSV with header `x1,...,xd`, one point per row;
//! - edges: CSV with header `src,dst,length`, 0-based vertex indices;
//! - reports: CSV with header
//!   `family,d,alpha,n,trials,mean,stdev,stderr,target,abs_dev,l1,l2`, or the
//!   same rows as a JSON array; a missing statistic is an empty CSV field and
//!   `null` in JSON;
//! - densities: JSON `{"boxes":[{"lo":[..],"hi":[..],"f":value},...]}`.
//!
//! Writers emit `.` decimals, LF line endings and shortest round-trip float
//! representations. Readers reject wrong headers, ragged rows and
//! non-finite numbers.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{Edge, EdgeList};
use crate::montecarlo::{ConvergenceReport, ReportRow};
use crate::points::{DensityBox, DensitySpec, PointSet};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).flexible(false).trim(csv::Trim::None).from_reader(r)
}

fn parse_error(line: Option<u64>, msg: impl std::fmt::Display) -> Error {
    match line {
        Some(l) => Error::Parse(format!("line {l}: {msg}")),
        None => Error::Parse(msg.to_string()),
    }
}

fn finite(field: &str, line: Option<u64>) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(parse_error(line, format!("`{field}` is not a finite decimal number"))),
    }
}

/// csv reports ragged rows as its own error kind; fold that into `Parse`.
fn record_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Csv(e)
    } else {
        parse_error(e.position().map(|p| p.line()), e)
    }
}

pub fn write_points<W: Write>(ps: &PointSet, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record((1..=ps.dim()).map(|i| format!("x{i}")))?;
    for p in ps.iter() {
        out.write_record(p.iter().map(|x| x.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_points<R: Read>(r: R) -> Result<PointSet> {
    let mut rd = reader(r);
    let header = rd.headers().map_err(record_error)?.clone();
    let d = header.len();
    if d == 0 || header.iter().enumerate().any(|(i, h)| h != format!("x{}", i + 1)) {
        let got: Vec<&str> = header.iter().collect();
        return Err(parse_error(Some(1), format!("expected header x1,...,xd, got {}", got.join(","))));
    }
    let mut coords = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(record_error)?;
        let line = rec.position().map(|p| p.line());
        for field in rec.iter() {
            coords.push(finite(field, line)?);
        }
    }
    if coords.is_empty() {
        return Err(parse_error(None, "no points"));
    }
    PointSet::new(d, coords)
}

pub fn write_edges<W: Write>(g: &impl EdgeList, w: W) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["src", "dst", "length"])?;
    for e in g.edges() {
        out.write_record([e.src.to_string(), e.dst.to_string(), e.length.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edges<R: Read>(r: R) -> Result<Vec<Edge>> {
    let mut rd = reader(r);
    let header = rd.headers().map_err(record_error)?.clone();
    if header.iter().collect::<Vec<_>>() != ["src", "dst", "length"] {
        return Err(parse_error(Some(1), "expected header src,dst,length"));
    }
    let mut edges = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(record_error)?;
        let line = rec.position().map(|p| p.line());
        let index = |s: &str| s.parse::<usize>().map_err(|_| parse_error(line, format!("`{s}` is not a vertex index")));
        let length = finite(&rec[2], line)?;
        if length < 0.0 {
            return Err(parse_error(line, "negative edge length"));
        }
        edges.push(Edge { src: index(&rec[0])?, dst: index(&rec[1])?, length });
    }
    Ok(edges)
}

pub fn write_report_csv<W: Write>(report: &ConvergenceReport, w: W) -> Result<()> {
    let mut out = writer(w);
    for row in &report.rows {
        out.serialize(row)?;
    }
    if report.rows.is_empty() {
        out.write_record([
            "family", "d", "alpha", "n", "trials", "mean", "stdev", "stderr", "target", "abs_dev", "l1", "l2",
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_report_csv<R: Read>(r: R) -> Result<ConvergenceReport> {
    let mut rd = reader(r);
    let rows = rd.deserialize::<ReportRow>().collect::<std::result::Result<Vec<_>, _>>().map_err(record_error)?;
    Ok(ConvergenceReport { rows })
}

pub fn write_report_json<W: Write>(report: &ConvergenceReport, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &report.rows)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    boxes: Vec<DensityBox>,
}

/// Parses and validates a piecewise-constant density for dimension `d`.
pub fn read_density<R: Read>(r: R, d: usize) -> Result<DensitySpec> {
    let file: DensityFile = serde_json::from_reader(r).map_err(|e| Error::InvalidDensity(e.to_string()))?;
    let spec = DensitySpec::PiecewiseConstant(file.boxes);
    spec.validate(d)?;
    Ok(spec)
}

pub fn write_density<W: Write>(spec: &DensitySpec, w: W) -> Result<()> {
    let boxes = match spec {
        DensitySpec::PiecewiseConstant(b) => b.clone(),
        DensitySpec::UniformUnitCube => Vec::new(),
    };
    serde_json::to_writer(w, &DensityFile { boxes })?;
    Ok(())
}

/// Creates `path` behind a buffered writer.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn open(path: &Path) -> Result<File> {
    Ok(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::WeightedDigraph;

    #[test]
    fn points_round_trip() {
        let ps = PointSet::from_rows(&[[0.1, 1.0 / 3.0], [0.5, 2f64.sqrt() / 7.0]]).unwrap();
        let mut buf = Vec::new();
        write_points(&ps, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_points(&buf[..]).unwrap(), ps);
    }

    #[test]
    fn points_reject_bad_input() {
        assert!(matches!(read_points(&b"x1,y\n0,1\n"[..]), Err(Error::Parse(_))));
        assert!(matches!(read_points(&b"x1,x2\n0,1\n0.5\n"[..]), Err(Error::Parse(_))));
        assert!(matches!(read_points(&b"x1\n0,5\n"[..]), Err(Error::Parse(_))));
        assert!(matches!(read_points(&b"x1\nNaN\n"[..]), Err(Error::Parse(_))));
        assert!(matches!(read_points(&b"x1\n0;5\n"[..]), Err(Error::Parse(_))));
        assert!(matches!(read_points(&b"x1\n"[..]), Err(Error::Parse(_))));
    }

    #[test]
    fn edges_round_trip() {
        let g = WeightedDigraph { n: 3, edges: vec![Edge { src: 2, dst: 0, length: 0.1 + 0.2 }] };
        let mut buf = Vec::new();
        write_edges(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "src,dst,length\n2,0,0.30000000000000004\n");
        assert_eq!(read_edges(&buf[..]).unwrap(), g.edges);
        assert!(read_edges(&b"src,dst,length\n-1,0,1\n"[..]).is_err());
    }

    #[test]
    fn report_round_trip_with_missing_target() {
        let row = ReportRow {
            family: "knng-undirected".into(),
            d: 2,
            alpha: 1.0,
            n: 100,
            trials: 4,
            mean: 0.6,
            stdev: 0.01,
            stderr: 0.005,
            target: None,
            abs_dev: None,
            l1: None,
            l2: None,
        };
        let rep = ConvergenceReport { rows: vec![row] };
        let mut buf = Vec::new();
        write_report_csv(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), "family,d,alpha,n,trials,mean,stdev,stderr,target,abs_dev,l1,l2");
        assert!(text.ends_with(",,,,\n"));
        assert_eq!(read_report_csv(&buf[..]).unwrap(), rep);
        let mut json = Vec::new();
        write_report_json(&rep, &mut json).unwrap();
        let back: Vec<ReportRow> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, rep.rows);
    }

    #[test]
    fn density_file() {
        let text = br#"{"boxes":[{"lo":[0,0],"hi":[0.5,1],"f":1.5},{"lo":[0.5,0],"hi":[1,1],"f":0.5}]}"#;
        let spec = read_density(&text[..], 2).unwrap();
        let mut buf = Vec::new();
        write_density(&spec, &mut buf).unwrap();
        assert_eq!(read_density(&buf[..], 2).unwrap(), spec);
        assert!(read_density(&b"{\"boxes\":[]}"[..], 2).is_err());
        assert!(read_density(&b"not json"[..], 2).is_err());
        assert!(read_density(&text[..], 3).is_err());
    }
}
