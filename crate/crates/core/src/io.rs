//! Tab-separated file formats.
//!
//! | file        | columns                                     |
//! |-------------|---------------------------------------------|
//! | edge list   | `src dst`                                   |
//! | labels      | `node_id {0,1}` (1 = benign, 0 = sybil)     |
//! | node scores | `node_id score`                             |
//! | edge scores | `u v score`, `u < v`                        |
//! | features    | `node_id req_in req_out cc`                 |
//! | components  | `component_id size`                         |
//!
//! Readers accept any whitespace as separator and skip blank and `#` lines.
//! Floats are written in shortest round-trip form so files reload bit-exactly.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::graph::{Component, Graph, Label, LabelMap, NodeId};
use crate::scores::{EdgeScores, NodeScores};

/// Data lines of a file, as `(line_number, fields)`.
fn records(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push((i + 1, t.split_whitespace().map(str::to_string).collect()));
    }
    Ok(out)
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: usize, s: &str, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("bad {what} `{s}`: {e}"),
    })
}

fn expect_fields(path: &Path, line: usize, fields: &[String], n: usize) -> Result<()> {
    if fields.len() != n {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("expected {n} fields, got {}", fields.len()),
        });
    }
    Ok(())
}

fn node_in_range(path: &Path, line: usize, v: NodeId, n: usize) -> Result<usize> {
    if v as usize >= n {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("node {v} out of range (node_count = {n})"),
        });
    }
    Ok(v as usize)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Writes a file through `body`, attaching the path to any i/o error.
pub fn write_with(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Labels for `node_count` nodes; nodes absent from the file are `Unknown`.
pub fn read_labels(path: &Path, node_count: usize) -> Result<LabelMap> {
    let mut labels = LabelMap::unknown(node_count);
    for (line, f) in records(path)? {
        expect_fields(path, line, &f, 2)?;
        let v = node_in_range(path, line, parse_field(path, line, &f[0], "node id")?, node_count)?;
        let label = match f[1].as_str() {
            "1" => Label::Benign,
            "0" => Label::Sybil,
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("label must be 0 or 1, got `{other}`"),
                })
            }
        };
        labels.set(v, label);
    }
    Ok(labels)
}

/// Writes every known label.
pub fn write_labels(path: &Path, labels: &LabelMap) -> Result<()> {
    write_with(path, |w| {
        for (v, l) in labels.as_slice().iter().enumerate() {
            match l {
                Label::Benign => writeln!(w, "{v}\t1")?,
                Label::Sybil => writeln!(w, "{v}\t0")?,
                Label::Unknown => {}
            }
        }
        Ok(())
    })
}

/// One score per node; every node must be present.
pub fn read_score_vector(path: &Path, node_count: usize) -> Result<Vec<f64>> {
    let mut scores = vec![f64::NAN; node_count];
    for (line, f) in records(path)? {
        expect_fields(path, line, &f, 2)?;
        let v = node_in_range(path, line, parse_field(path, line, &f[0], "node id")?, node_count)?;
        scores[v] = parse_field(path, line, &f[1], "score")?;
    }
    if let Some(v) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("no score for node {v}"),
        });
    }
    Ok(scores)
}

/// One score per node, with the node count taken from the largest id.
pub fn read_score_table(path: &Path) -> Result<Vec<f64>> {
    let rows = records(path)?;
    let mut n = 0;
    for (line, f) in &rows {
        expect_fields(path, *line, f, 2)?;
        let v: NodeId = parse_field(path, *line, &f[0], "node id")?;
        n = n.max(v as usize + 1);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    read_score_vector(path, n)
}

pub fn read_node_scores(path: &Path, node_count: usize) -> Result<NodeScores> {
    NodeScores::new(read_score_vector(path, node_count)?)
}

pub fn write_score_vector(path: &Path, scores: &[f64]) -> Result<()> {
    write_with(path, |w| {
        for (v, s) in scores.iter().enumerate() {
            writeln!(w, "{v}\t{s}")?;
        }
        Ok(())
    })
}

/// Edge scores keyed by endpoints; every edge of `g` must be present.
pub fn read_edge_scores(path: &Path, g: &Graph) -> Result<EdgeScores> {
    let mut scores = vec![f64::NAN; g.edge_count()];
    for (line, f) in records(path)? {
        expect_fields(path, line, &f, 3)?;
        let u: NodeId = parse_field(path, line, &f[0], "node id")?;
        let v: NodeId = parse_field(path, line, &f[1], "node id")?;
        let n = g.node_count();
        let (u, v) = (node_in_range(path, line, u, n)?, node_in_range(path, line, v, n)?);
        let Some(e) = g.edge_id(u, v) else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("edge {u}-{v} is not in the graph"),
            });
        };
        scores[e] = parse_field(path, line, &f[2], "score")?;
    }
    if let Some(e) = scores.iter().position(|s| s.is_nan()) {
        let (u, v) = g.edges().nth(e).expect("edge id in range");
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("no score for edge {u}-{v}"),
        });
    }
    EdgeScores::new(scores)
}

pub fn write_edge_scores(path: &Path, g: &Graph, scores: &[f64]) -> Result<()> {
    write_with(path, |w| {
        for ((u, v), s) in g.edges().zip(scores) {
            writeln!(w, "{u}\t{v}\t{s}")?;
        }
        Ok(())
    })
}

pub fn write_edge_list(path: &Path, edges: impl Iterator<Item = (NodeId, NodeId)>) -> Result<()> {
    write_with(path, |w| {
        for (u, v) in edges {
            writeln!(w, "{u}\t{v}")?;
        }
        Ok(())
    })
}

pub fn write_features(path: &Path, features: &[FeatureVector]) -> Result<()> {
    write_with(path, |w| {
        for (v, f) in features.iter().enumerate() {
            writeln!(w, "{v}\t{}\t{}\t{}", f.req_in, f.req_out, f.cc)?;
        }
        Ok(())
    })
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureVector>> {
    let rows = records(path)?;
    let mut out = vec![None; rows.len()];
    for (line, f) in &rows {
        expect_fields(path, *line, f, 4)?;
        let v = node_in_range(path, *line, parse_field(path, *line, &f[0], "node id")?, rows.len())?;
        let x = |i: usize| parse_field::<f64>(path, *line, &f[i], "feature");
        out[v] = Some(FeatureVector {
            req_in: x(1)?,
            req_out: x(2)?,
            cc: x(3)?,
        });
    }
    out.into_iter()
        .enumerate()
        .map(|(v, f)| {
            f.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: format!("no features for node {v}"),
            })
        })
        .collect()
}

pub fn write_components(path: &Path, comps: &[Component]) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "# component_id\tsize")?;
        for (i, c) in comps.iter().enumerate() {
            writeln!(w, "{i}\t{}", c.size())?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip_and_reject_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.tsv");
        let l = LabelMap::from_vec(vec![Label::Benign, Label::Unknown, Label::Sybil]);
        write_labels(&p, &l).unwrap();
        assert_eq!(read_labels(&p, 3).unwrap(), l);
        assert!(read_labels(&p, 2).is_err());
        fs::write(&p, "0\t2\n").unwrap();
        assert!(matches!(read_labels(&p, 3), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn scores_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.tsv");
        let s = vec![0.1, 1.0 / 3.0, 0.123_456_789_012_345_68];
        write_score_vector(&p, &s).unwrap();
        assert_eq!(read_score_vector(&p, 3).unwrap(), s);
        assert!(read_score_vector(&p, 4).is_err());
    }

    #[test]
    fn score_table_infers_node_count() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.tsv");
        fs::write(&p, "1 0.25\n0 0.5\n").unwrap();
        assert_eq!(read_score_table(&p).unwrap(), vec![0.5, 0.25]);
        fs::write(&p, "2 0.25\n0 0.5\n").unwrap();
        assert!(read_score_table(&p).is_err());
        fs::write(&p, "# nothing\n").unwrap();
        assert!(matches!(read_score_table(&p), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn edge_scores_keyed_by_endpoints() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.tsv");
        let (g, _) = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        fs::write(&p, "2 1 0.3\n0\t1\t0.7\n").unwrap();
        let e = read_edge_scores(&p, &g).unwrap();
        assert_eq!(e.as_slice(), &[0.7, 0.3]);
        fs::write(&p, "0 1 0.7\n").unwrap();
        assert!(read_edge_scores(&p, &g).is_err());
        fs::write(&p, "0 2 0.7\n0 1 0.5\n1 2 0.5\n").unwrap();
        assert!(read_edge_scores(&p, &g).is_err());
    }

    #[test]
    fn features_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.tsv");
        let f = vec![
            FeatureVector {
                req_in: 0.5,
                req_out: 1.0,
                cc: 0.25,
            },
            FeatureVector::default(),
        ];
        write_features(&p, &f).unwrap();
        assert_eq!(read_features(&p).unwrap(), f);
    }
}
