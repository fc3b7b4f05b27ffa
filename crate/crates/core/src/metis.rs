//! METIS graph files with vertex weights.
//!
//! The header is `n m [fmt]`. With `fmt = 10` every vertex line starts with
//! the vertex weight followed by 1-indexed neighbors; with `fmt = 0` (or no
//! fmt) the line only lists neighbors and every weight is 1. Lines starting
//! with `%` are comments.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Vertex, Weight, WeightedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetisError {
    #[error("missing header line")]
    MissingHeader,
    #[error("line {line}: malformed header: {reason}")]
    BadHeader { line: usize, reason: String },
    #[error("unsupported format code {0:?} (expected 0 or 10)")]
    UnsupportedFormat(String),
    #[error("line {line}: invalid token {token:?}")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: missing vertex weight")]
    MissingWeight { line: usize },
    #[error("expected {expected} vertex lines, found {found}")]
    MissingVertexLines { expected: usize, found: usize },
    #[error("line {line}: unexpected content after the last vertex")]
    TrailingContent { line: usize },
    #[error("line {line}: neighbor {neighbor} out of range 1..={n}")]
    NeighborOutOfRange { line: usize, neighbor: usize, n: usize },
    #[error("line {line}: self-loop")]
    SelfLoop { line: usize },
    #[error("line {line}: duplicate neighbor {neighbor}")]
    DuplicateNeighbor { line: usize, neighbor: usize },
    #[error("asymmetric adjacency: {u} lists {v} but {v} does not list {u}")]
    AsymmetricAdjacency { u: usize, v: usize },
    #[error("header declares {declared} edges, adjacency lists contain {found}")]
    EdgeCount { declared: usize, found: usize },
}

fn parse_token<T: std::str::FromStr>(token: &str, line: usize) -> Result<T, MetisError> {
    token.parse().map_err(|_| MetisError::InvalidToken { line, token: token.to_string() })
}

pub fn parse_metis(text: &str) -> Result<WeightedGraph, MetisError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim_start().starts_with('%'));

    let (header_line, header) = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some(found) => break found,
            None => return Err(MetisError::MissingHeader),
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 4 {
        return Err(MetisError::BadHeader { line: header_line, reason: format!("expected 2 to 4 fields, got {}", fields.len()) });
    }
    let n: usize = parse_token(fields[0], header_line)?;
    let m: usize = parse_token(fields[1], header_line)?;
    let weighted = match fields.get(2).map(|f| f.trim_start_matches('0')) {
        None | Some("") => false,
        Some("10") => true,
        Some(_) => return Err(MetisError::UnsupportedFormat(fields[2].to_string())),
    };
    if let Some(ncon) = fields.get(3) {
        if *ncon != "1" {
            return Err(MetisError::BadHeader { line: header_line, reason: format!("ncon {ncon} unsupported") });
        }
    }

    let mut weights = Vec::with_capacity(n);
    let mut adj: Vec<Vec<Vertex>> = Vec::with_capacity(n);
    while adj.len() < n {
        let Some((line, content)) = lines.next() else {
            return Err(MetisError::MissingVertexLines { expected: n, found: adj.len() });
        };
        let v = adj.len();
        let mut tokens = content.split_whitespace();
        let w: Weight = if weighted {
            let tok = tokens.next().ok_or(MetisError::MissingWeight { line })?;
            parse_token(tok, line)?
        } else {
            1
        };
        let mut nbrs = Vec::new();
        for tok in tokens {
            let neighbor: usize = parse_token(tok, line)?;
            if neighbor == 0 || neighbor > n {
                return Err(MetisError::NeighborOutOfRange { line, neighbor, n });
            }
            if neighbor - 1 == v {
                return Err(MetisError::SelfLoop { line });
            }
            nbrs.push(neighbor - 1);
        }
        let mut sorted = nbrs.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(MetisError::DuplicateNeighbor { line, neighbor: w[0] + 1 });
        }
        weights.push(w);
        adj.push(sorted);
    }
    for (line, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(MetisError::TrailingContent { line });
        }
    }

    let mut edges = Vec::new();
    let mut entries = 0;
    for (v, nbrs) in adj.iter().enumerate() {
        entries += nbrs.len();
        for &u in nbrs {
            if adj[u].binary_search(&v).is_err() {
                return Err(MetisError::AsymmetricAdjacency { u: v + 1, v: u + 1 });
            }
            if v < u {
                edges.push((v, u));
            }
        }
    }
    if entries / 2 != m {
        return Err(MetisError::EdgeCount { declared: m, found: entries / 2 });
    }
    Ok(WeightedGraph::from_edges(weights, &edges).expect("validated above"))
}

/// Writes the live part of `g` in canonical form: live vertices renumbered in
/// increasing id order, neighbors sorted, format code 10.
pub fn write_metis(g: &WeightedGraph) -> String {
    let c = g.compact();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} 10", c.len(), c.num_edges());
    for v in 0..c.len() {
        out.push_str(&c.weight(v).to_string());
        for &u in c.neighbors(v) {
            let _ = write!(out, " {}", u + 1);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_weighted_path() {
        let g = parse_metis("3 2 10\n5 2\n1 1 3\n5 2\n").unwrap();
        assert_eq!(g.live_count(), 3);
        assert_eq!(g.live_edges(), 2);
        assert_eq!((0..3).map(|v| g.weight(v)).collect::<Vec<_>>(), vec![5, 1, 5]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2) && !g.has_edge(0, 2));
    }

    #[test]
    fn parses_single_vertex_and_comments() {
        let g = parse_metis("% a comment\n1 0 10\n% another\n7\n").unwrap();
        assert_eq!((g.live_count(), g.weight(0)), (1, 7));
    }

    #[test]
    fn unweighted_format_assigns_unit_weights() {
        let g = parse_metis("3 1\n2\n1\n\n").unwrap();
        assert_eq!(g.total_weight(), 3);
        assert_eq!(g.degree(2), 0);
    }

    #[test]
    fn rejects_malformed_inputs() {
        assert!(matches!(parse_metis("2 1 10\n1 2\n1\n"), Err(MetisError::AsymmetricAdjacency { .. })));
        assert!(matches!(parse_metis("2 2 10\n1 2\n1 1\n"), Err(MetisError::EdgeCount { declared: 2, found: 1 })));
        assert!(matches!(parse_metis("2 1 10\n1 x\n1 1\n"), Err(MetisError::InvalidToken { .. })));
        assert!(matches!(parse_metis("2 1 10\n-1 2\n1 1\n"), Err(MetisError::InvalidToken { .. })));
        assert!(matches!(parse_metis("2 1 11\n1 2\n1 1\n"), Err(MetisError::UnsupportedFormat(_))));
        assert!(matches!(parse_metis("2 1 10\n1 3\n1 1\n"), Err(MetisError::NeighborOutOfRange { .. })));
        assert!(matches!(parse_metis("2 1 10\n1 1\n1\n"), Err(MetisError::SelfLoop { .. })));
        assert!(matches!(parse_metis("2 0 10\n1\n"), Err(MetisError::MissingVertexLines { expected: 2, found: 1 })));
        assert!(matches!(parse_metis(""), Err(MetisError::MissingHeader)));
        assert!(matches!(parse_metis("1 0 10\n1\n2\n"), Err(MetisError::TrailingContent { .. })));
    }

    #[test]
    fn writes_canonical_text() {
        let text = "3 2 10\n5 2\n1 1 3\n5 2\n";
        assert_eq!(write_metis(&parse_metis(text).unwrap()), text);
    }
}
