//! Text formats for graphs and workloads.
//!
//! Graph files hold one `SRC DST` edge per line. Lines starting with `#` are
//! comments, except `#nodes N`, which declares the node universe `0..N`.
//!
//! Workload files hold one op per line:
//!
//! ```text
//! IE u v
//! DE u v
//! DN u
//! Q u v
//! IN u O v1 v2 ... I w1 w2 ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::MAX_INPUT_ID;
use crate::maintenance::UpdateOp;

/// A parsed graph file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

fn node_id(tok: &str, line: usize) -> Result<u32> {
    let v: u64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a node id, found {tok:?}")))?;
    if v > MAX_INPUT_ID as u64 {
        return Err(Error::parse(line, format!("node id {v} out of range")));
    }
    Ok(v as u32)
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut g = GraphFile::default();
    let mut declared = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if let Some(rest) = t.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            if it.next() == Some("nodes") {
                let n = it
                    .next()
                    .ok_or_else(|| Error::parse(line, "#nodes needs a count"))?;
                let n: u64 = n
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad node count {n:?}")))?;
                if n > MAX_INPUT_ID as u64 + 1 {
                    return Err(Error::parse(line, format!("node count {n} out of range")));
                }
                declared = declared.max(n as usize);
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected \"SRC DST\", found {t:?}"),
            ));
        }
        let (u, v) = (node_id(toks[0], line)?, node_id(toks[1], line)?);
        g.n = g.n.max(u.max(v) as usize + 1);
        g.edges.push((u, v));
    }
    g.n = g.n.max(declared);
    Ok(g)
}

pub fn write_graph(n: usize, edges: &[(u32, u32)]) -> String {
    let mut s = String::with_capacity(16 + edges.len() * 12);
    let _ = writeln!(s, "#nodes {n}");
    for &(u, v) in edges {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphFile> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn parse_workload(text: &str) -> Result<Vec<UpdateOp>> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let arity = |want: usize| -> Result<()> {
            if toks.len() == want + 1 {
                Ok(())
            } else {
                Err(Error::parse(
                    line,
                    format!(
                        "{} takes {want} arguments, found {}",
                        toks[0],
                        toks.len() - 1
                    ),
                ))
            }
        };
        let op = match toks[0] {
            "IE" | "DE" | "Q" => {
                arity(2)?;
                let (u, v) = (node_id(toks[1], line)?, node_id(toks[2], line)?);
                match toks[0] {
                    "IE" => UpdateOp::InsertEdge(u, v),
                    "DE" => UpdateOp::DeleteEdge(u, v),
                    _ => UpdateOp::Query(u, v),
                }
            }
            "DN" => {
                arity(1)?;
                UpdateOp::DeleteNode(node_id(toks[1], line)?)
            }
            "IN" => parse_insert_node(&toks, line)?,
            other => return Err(Error::parse(line, format!("unknown op {other:?}"))),
        };
        ops.push(op);
    }
    Ok(ops)
}

fn parse_insert_node(toks: &[&str], line: usize) -> Result<UpdateOp> {
    if toks.len() < 4 || toks[2] != "O" {
        return Err(Error::parse(line, "expected \"IN u O ... I ...\""));
    }
    let u = node_id(toks[1], line)?;
    let split = toks
        .iter()
        .position(|&t| t == "I")
        .ok_or_else(|| Error::parse(line, "IN is missing the I list"))?;
    if split < 3 {
        return Err(Error::parse(line, "I list before O list"));
    }
    let ids = |part: &[&str]| {
        part.iter()
            .map(|t| node_id(t, line))
            .collect::<Result<Vec<u32>>>()
    };
    Ok(UpdateOp::InsertNode {
        u,
        outs: ids(&toks[3..split])?,
        ins: ids(&toks[split + 1..])?,
    })
}

pub fn write_workload(ops: &[UpdateOp]) -> String {
    let mut s = String::with_capacity(ops.len() * 12);
    for op in ops {
        let _ = match op {
            UpdateOp::InsertEdge(u, v) => writeln!(s, "IE {u} {v}"),
            UpdateOp::DeleteEdge(u, v) => writeln!(s, "DE {u} {v}"),
            UpdateOp::Query(u, v) => writeln!(s, "Q {u} {v}"),
            UpdateOp::DeleteNode(u) => writeln!(s, "DN {u}"),
            UpdateOp::InsertNode { u, outs, ins } => {
                let _ = write!(s, "IN {u} O");
                for w in outs {
                    let _ = write!(s, " {w}");
                }
                s.push_str(" I");
                for w in ins {
                    let _ = write!(s, " {w}");
                }
                writeln!(s)
            }
        };
    }
    s
}

pub fn read_workload(path: impl AsRef<Path>) -> Result<Vec<UpdateOp>> {
    parse_workload(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_edges_three_nodes() {
        let g = parse_graph("0 1\n1 2\n").unwrap();
        assert_eq!(
            g,
            GraphFile {
                n: 3,
                edges: vec![(0, 1), (1, 2)]
            }
        );
    }

    #[test]
    fn nodes_header() {
        let g = parse_graph("#nodes 5\n0 1\n").unwrap();
        assert_eq!(g.n, 5);
        assert_eq!(g.edges, vec![(0, 1)]);
        let g = parse_graph("# just a comment\n\n#nodes 2\n0 4\n").unwrap();
        assert_eq!(g.n, 5);
    }

    #[test]
    fn graph_errors_carry_line_numbers() {
        for (text, line) in [
            ("0 1\n1 x\n", 2),
            ("0 -1\n", 1),
            ("0 1 2\n", 1),
            ("#nodes\n", 1),
        ] {
            match parse_graph(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn workload_lines() {
        assert_eq!(
            parse_workload("IE 3 4\nQ 0 4\n").unwrap(),
            vec![UpdateOp::InsertEdge(3, 4), UpdateOp::Query(0, 4)]
        );
        assert_eq!(
            parse_workload("IN 7 O 1 2 I 3\n").unwrap(),
            vec![UpdateOp::InsertNode {
                u: 7,
                outs: vec![1, 2],
                ins: vec![3]
            }]
        );
        assert_eq!(
            parse_workload("IN 7 O I\nDN 2\nDE 1 0\n").unwrap(),
            vec![
                UpdateOp::InsertNode {
                    u: 7,
                    outs: vec![],
                    ins: vec![]
                },
                UpdateOp::DeleteNode(2),
                UpdateOp::DeleteEdge(1, 0)
            ]
        );
    }

    #[test]
    fn workload_errors() {
        for (text, line) in [
            ("XX 1 2\n", 1),
            ("IE 1\n", 1),
            ("Q 1 2\nDN\n", 2),
            ("IN 4 O 1\n", 1),
            ("IN 4 I 1 O\n", 1),
        ] {
            match parse_workload(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
