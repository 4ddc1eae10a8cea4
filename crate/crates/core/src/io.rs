//! Edge-list text format, partition files and JSON number formatting.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};

/// A float as a JSON number with 17 significant digits; non-finite values
/// become the strings "inf", "-inf" and "nan".
pub fn num17(x: f64) -> Value {
    if x.is_finite() {
        let s = format!("{x:.16e}");
        Value::Number(s.parse::<Number>().expect("formatted float is a JSON number"))
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums17(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num17(x)).collect())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse "u v w" lines. '#' starts a comment line; "# n=<int>" fixes the
/// vertex count, otherwise it is max id + 1.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut n_header: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(rest) = comment.trim().strip_prefix("n=") {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad vertex count header {line:?}")))?;
                n_header = Some(n);
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line_no, format!("expected \"u v w\", got {line:?}")));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad vertex id {:?}", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad vertex id {:?}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad weight {:?}", fields[2])))?;
        if u == v {
            return Err(parse_err(line_no, format!("self-loop at vertex {u}")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(parse_err(line_no, format!("weight must be positive, got {w}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(line_no, format!("duplicate edge ({u}, {v})")));
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match n_header {
        Some(n) if n < inferred => {
            return Err(parse_err(0, format!("header n={n} but an edge uses vertex {}", inferred - 1)))
        }
        Some(n) => n,
        None => inferred,
    };
    WeightedGraph::new(n, edges)
}

/// Edge list with an "# n=" header and 17-significant-digit weights.
pub fn emit_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("# n={}\n", g.n());
    for e in g.edges() {
        writeln!(out, "{} {} {:.16e}", e.u, e.v, e.w).expect("writing to a String");
    }
    out
}

/// One part per line as whitespace-separated vertex ids; '#' lines ignored.
pub fn parse_partition(g: &WeightedGraph, text: &str) -> Result<Vec<VertexSet>> {
    let mut parts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut ids = Vec::new();
        for tok in line.split_whitespace() {
            let v: usize = tok
                .parse()
                .map_err(|_| parse_err(idx + 1, format!("bad vertex id {tok:?}")))?;
            if v >= g.n() {
                return Err(parse_err(idx + 1, format!("vertex {v} outside 0..{}", g.n())));
            }
            ids.push(v);
        }
        parts.push(VertexSet::from_vertices(g, ids)?);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_cycle;

    #[test]
    fn parses_single_edge() {
        let g = parse_edge_list("0 1 1.0").unwrap();
        assert_eq!(g, WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap());
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        match parse_edge_list("# c\n0 0 1.0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_lines() {
        for text in ["0 1", "0 1 x", "a 1 1", "0 1 -2", "0 1 0", "0 1 1\n1 0 2", "0 1 1 4"] {
            assert!(matches!(parse_edge_list(text), Err(Error::Parse { .. })), "{text}");
        }
    }

    #[test]
    fn crlf_comments_and_header() {
        let g = parse_edge_list("# n=5\r\n0 1 2.5\r\n\r\n# note\r\n3 1 1\r\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.degree(1), 3.5);
        assert!(parse_edge_list("# n=2\n0 4 1\n").is_err());
    }

    #[test]
    fn cycle_file_round_trip() {
        let text: String = (0..8).map(|i| format!("{} {} 1\n", i, (i + 1) % 8)).collect();
        assert_eq!(parse_edge_list(&text).unwrap(), gen_cycle(8, 1.0).unwrap());
        let g = WeightedGraph::new(4, [(0, 1, 0.1), (2, 1, 1.0 / 3.0)]).unwrap();
        assert_eq!(parse_edge_list(&emit_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn num17_format() {
        assert_eq!(num17(0.25).to_string(), "2.5000000000000000e-1");
        assert_eq!(num17(f64::INFINITY), Value::String("inf".into()));
        let x = 0.1 + 0.2;
        let back: f64 = num17(x).to_string().parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn partition_file() {
        let g = gen_cycle(4, 1.0).unwrap();
        let parts = parse_partition(&g, "0 1\n# x\n2 3\n").unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].vertices(), vec![2, 3]);
        assert!(parse_partition(&g, "0 9\n").is_err());
    }
}
