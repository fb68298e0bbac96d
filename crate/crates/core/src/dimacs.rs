//! Reader for the DIMACS shortest-path challenge `.gr` format.
//!
//! ```text
//! c comment
//! p sp <n> <m>
//! a <u> <v> <w>
//! ```
//!
//! Vertex ids in the file are 1-based. Arcs are read as undirected edges;
//! the two directions of a road collapse into one edge with the smaller
//! weight.

use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex, Weight};

#[derive(Debug, Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: vertex {id} outside 1..={vertex_count}")]
    VertexOutOfRange {
        line: usize,
        id: u64,
        vertex_count: usize,
    },
    #[error("line {line}: arc weight {weight} is below 1")]
    InvalidWeight { line: usize, weight: i64 },
    #[error("missing `p sp` problem line")]
    MissingProblemLine,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError::Malformed {
        line,
        message: message.into(),
    }
}

fn field<'a>(
    parts: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<&'a str, DimacsError> {
    parts
        .next()
        .ok_or_else(|| malformed(line, format!("missing {what}")))
}

/// Parses a DIMACS graph from any buffered reader.
pub fn parse_dimacs<R: BufRead>(reader: R) -> Result<Graph, DimacsError> {
    let mut vertex_count: Option<usize> = None;
    let mut declared_arcs = 0usize;
    let mut edges: Vec<(Vertex, Vertex, Weight)> = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let mut parts = line.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        match tag {
            "c" => {}
            "p" => {
                if vertex_count.is_some() {
                    return Err(malformed(line_no, "duplicate problem line"));
                }
                let kind = field(&mut parts, line_no, "problem type")?;
                if kind != "sp" {
                    return Err(malformed(line_no, format!("unsupported problem type `{kind}`")));
                }
                let n = field(&mut parts, line_no, "vertex count")?
                    .parse::<usize>()
                    .map_err(|e| malformed(line_no, format!("bad vertex count: {e}")))?;
                declared_arcs = field(&mut parts, line_no, "arc count")?
                    .parse::<usize>()
                    .map_err(|e| malformed(line_no, format!("bad arc count: {e}")))?;
                if n > Vertex::MAX as usize {
                    return Err(GraphError::TooManyVertices(n).into());
                }
                vertex_count = Some(n);
                edges.reserve(declared_arcs);
            }
            "a" => {
                let n = vertex_count.ok_or_else(|| malformed(line_no, "arc before problem line"))?;
                let mut endpoint = |what: &str| -> Result<Vertex, DimacsError> {
                    let raw = field(&mut parts, line_no, what)?;
                    let id = raw
                        .parse::<u64>()
                        .map_err(|e| malformed(line_no, format!("bad {what} `{raw}`: {e}")))?;
                    if id == 0 || id > n as u64 {
                        return Err(DimacsError::VertexOutOfRange {
                            line: line_no,
                            id,
                            vertex_count: n,
                        });
                    }
                    Ok((id - 1) as Vertex)
                };
                let u = endpoint("tail")?;
                let v = endpoint("head")?;
                let raw = field(&mut parts, line_no, "weight")?;
                let weight = raw
                    .parse::<i64>()
                    .map_err(|e| malformed(line_no, format!("bad weight `{raw}`: {e}")))?;
                if weight < 1 {
                    return Err(DimacsError::InvalidWeight {
                        line: line_no,
                        weight,
                    });
                }
                let weight = Weight::try_from(weight)
                    .map_err(|_| malformed(line_no, format!("weight {weight} exceeds 32 bits")))?;
                edges.push((u, v, weight));
            }
            other => return Err(malformed(line_no, format!("unknown line type `{other}`"))),
        }
    }

    let n = vertex_count.ok_or(DimacsError::MissingProblemLine)?;
    if edges.len() != declared_arcs {
        log::warn!(
            "problem line declares {declared_arcs} arcs but {} were read",
            edges.len()
        );
    }
    Ok(Graph::from_edges(n, edges)?)
}

pub fn parse_dimacs_str(text: &str) -> Result<Graph, DimacsError> {
    parse_dimacs(text.as_bytes())
}

pub fn read_dimacs_file(path: impl AsRef<Path>) -> Result<Graph, DimacsError> {
    let file = File::open(path)?;
    parse_dimacs(BufReader::with_capacity(1 << 20, file))
}

/// Writes a graph as DIMACS text with both arc directions, 1-based ids.
pub fn write_dimacs<W: io::Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "p sp {} {}", g.vertex_count(), 2 * g.edge_count())?;
    for (u, v, w) in g.edges() {
        writeln!(out, "a {} {} {}", u + 1, v + 1, w)?;
        writeln!(out, "a {} {} {}", v + 1, u + 1, w)?;
    }
    Ok(())
}
