// SPDX-License-Identifier: Apache-2.0
//! Plain-text edge lists: one `src dst weight` triple per line, `#` comments.

use std::io::Write;
use std::path::Path;

use super::{Edge, EdgeList, GraphError};

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<EdgeList, GraphError> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Parses the edge-list text format. `n` becomes the smallest power of two
/// strictly greater than the largest vertex id. Self-loops are dropped.
pub fn parse_edge_list(text: &str) -> Result<EdgeList, GraphError> {
    let mut edges = Vec::new();
    let mut max_id = 0u64;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(GraphError::Parse { line, msg: format!("expected 3 fields, found {}", fields.len()) });
        }
        let vertex = |s: &str| {
            s.parse::<u64>().map_err(|e| GraphError::Parse { line, msg: format!("bad vertex id {s:?}: {e}") })
        };
        let src = vertex(fields[0])?;
        let dst = vertex(fields[1])?;
        let weight: i64 = fields[2]
            .parse()
            .map_err(|e| GraphError::Parse { line, msg: format!("bad weight {:?}: {e}", fields[2]) })?;
        if weight < 0 {
            return Err(GraphError::Validation { line, msg: format!("negative weight {weight}") });
        }
        if weight == 0 || weight >= i64::from(crate::INFINITY) {
            return Err(GraphError::Validation { line, msg: format!("weight {weight} out of range") });
        }
        max_id = max_id.max(src).max(dst);
        if src != dst {
            edges.push(Edge::new(src, dst, weight as u32));
        }
    }
    if edges.is_empty() {
        return Err(GraphError::NoEdges);
    }
    let n = (max_id + 1).next_power_of_two();
    Ok(EdgeList::new(n, edges))
}

pub fn write_edge_list(edges: &EdgeList, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# n={} m={}", edges.n, edges.len())?;
    for e in &edges.edges {
        writeln!(out, "{} {} {}", e.src, e.dst, e.weight)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_edges() {
        let g = parse_edge_list("0 1 1\n1 0 1\n").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.n, 2);
    }

    #[test]
    fn comment_only_is_empty() {
        let err = parse_edge_list("# comment\n").unwrap_err();
        assert!(matches!(err, GraphError::NoEdges));
        assert_eq!(err.to_string(), "no edges");
    }

    #[test]
    fn n_rounds_up_past_max_id() {
        assert_eq!(parse_edge_list("0 2 5\n").unwrap().n, 4);
        assert_eq!(parse_edge_list("0 3 5\n").unwrap().n, 4);
        assert_eq!(parse_edge_list("0 4 5\n").unwrap().n, 8);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_edge_list("0 1 1\n# ok\n2 x 3\n").unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("0 1\n"), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn negative_weight_is_validation_error() {
        let err = parse_edge_list("0 1 -4\n").unwrap_err();
        assert!(matches!(err, GraphError::Validation { line: 1, .. }));
    }

    #[test]
    fn write_then_parse() {
        let g = EdgeList::new(8, vec![Edge::new(0, 7, 3), Edge::new(5, 2, 9)]);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap(), g);
    }
}
