//! DIMACS edge format with two attribute extensions.
//!
//! ```text
//! c comment
//! p edge <n> <m>
//! e <u> <v>          edge with the default attribute
//! f <u> <v> <a>      edge with attribute a
//! n <v> <c>          vertex v gets attribute c
//! ```
//!
//! Vertices are 1-based. Any other line is an error.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{AttributedGraph, DEFAULT_ATTR};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DimacsError {
    DimacsError {
        line,
        message: message.into(),
    }
}

pub fn parse_dimacs(text: &str) -> Result<AttributedGraph, DimacsError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut colors: Vec<u64> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut tok = raw.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        let fields: Vec<&str> = tok.collect();
        let num = |i: usize, what: &str| -> Result<u64, DimacsError> {
            fields
                .get(i)
                .ok_or_else(|| err(line, format!("missing {what}")))?
                .parse::<u64>()
                .map_err(|_| err(line, format!("invalid {what} '{}'", fields[i])))
        };
        let vertex = |i: usize, n: usize| -> Result<usize, DimacsError> {
            let v = num(i, "vertex")? as usize;
            if v == 0 || v > n {
                return Err(err(line, format!("vertex {v} out of range 1..={n}")));
            }
            Ok(v - 1)
        };
        let expect_fields = |k: usize| -> Result<(), DimacsError> {
            if fields.len() != k {
                return Err(err(line, format!("expected {k} fields after '{kind}', found {}", fields.len())));
            }
            Ok(())
        };
        match kind {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(err(line, "duplicate problem line"));
                }
                if fields.first() != Some(&"edge") && fields.first() != Some(&"col") {
                    return Err(err(line, "expected 'p edge <n> <m>'"));
                }
                expect_fields(3)?;
                let nv = num(1, "vertex count")? as usize;
                num(2, "edge count")?;
                colors = vec![DEFAULT_ATTR; nv];
                n = Some(nv);
            }
            "e" | "f" | "n" => {
                let nv = n.ok_or_else(|| err(line, format!("'{kind}' line before the problem line")))?;
                match kind {
                    "e" => {
                        expect_fields(2)?;
                        let (u, v) = (vertex(0, nv)?, vertex(1, nv)?);
                        if u == v {
                            return Err(err(line, format!("self-loop at vertex {}", u + 1)));
                        }
                        edges.push((u, v, DEFAULT_ATTR));
                    }
                    "f" => {
                        expect_fields(3)?;
                        let (u, v) = (vertex(0, nv)?, vertex(1, nv)?);
                        if u == v {
                            return Err(err(line, format!("self-loop at vertex {}", u + 1)));
                        }
                        edges.push((u, v, num(2, "edge attribute")?));
                    }
                    _ => {
                        expect_fields(2)?;
                        let v = vertex(0, nv)?;
                        colors[v] = num(1, "vertex color")?;
                    }
                }
            }
            other => return Err(err(line, format!("unknown line type '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| err(last_line.max(1), "missing problem line 'p edge <n> <m>'"))?;
    if n == 0 {
        return Err(err(last_line.max(1), "graph has no vertices"));
    }
    AttributedGraph::new(n, edges, colors).map_err(|e| err(last_line, e.to_string()))
}

/// Writes `g` in the format read by [`parse_dimacs`]. Default attributes are
/// omitted.
pub fn write_dimacs(g: &AttributedGraph) -> String {
    let mut out = String::new();
    writeln!(out, "p edge {} {}", g.n(), g.num_edges()).unwrap();
    for v in 0..g.n() {
        if g.vertex_attr(v) != DEFAULT_ATTR {
            writeln!(out, "n {} {}", v + 1, g.vertex_attr(v)).unwrap();
        }
    }
    for &(u, v, a) in g.edges() {
        if a == DEFAULT_ATTR {
            writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
        } else {
            writeln!(out, "f {} {} {}", u + 1, v + 1, a).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = parse_dimacs("p edge 2 1\ne 1 2\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn vertex_color() {
        let g = parse_dimacs("c hello\np edge 2 0\nn 1 5\n").unwrap();
        assert_eq!(g.vertex_attr(0), 5);
        assert_eq!(g.vertex_attr(1), DEFAULT_ATTR);
    }

    #[test]
    fn edge_attribute() {
        let g = parse_dimacs("p edge 3 2\nf 1 2 4\ne 2 3\n").unwrap();
        assert_eq!(g.neighbors(0), &[(1, 4)]);
        assert!(!g.has_uniform_edge_attrs());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(parse_dimacs("p edge 2 1\ne 0 1\n").unwrap_err().line, 2);
        assert_eq!(parse_dimacs("p edge 2 1\n\nx 1 2\n").unwrap_err().line, 3);
        assert_eq!(parse_dimacs("p edge 2 1\np edge 2 1\n").unwrap_err().line, 2);
        assert_eq!(parse_dimacs("e 1 2\n").unwrap_err().line, 1);
        assert!(parse_dimacs("p edge 2 1\ne 1 3\n").unwrap_err().message.contains("out of range"));
        assert!(parse_dimacs("").is_err());
        assert!(parse_dimacs("p edge 2 1\ne 1 x\n").is_err());
    }

    #[test]
    fn roundtrip() {
        let g = AttributedGraph::new(4, vec![(0, 1, 0), (1, 2, 3), (2, 3, 0)], vec![0, 2, 0, 0]).unwrap();
        let h = parse_dimacs(&write_dimacs(&g)).unwrap();
        assert!(g.repr_eq(&h));
    }
}
