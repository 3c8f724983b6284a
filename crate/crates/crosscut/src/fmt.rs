//! Plain-text documents for graphs, instances, and drawings.
//!
//! One line-based format covers every file the tool reads or writes:
//!
//! ```text
//! # comment, anywhere on a line
//! graph <vertices> <edges>         header, required first
//! v <name>                         optional explicit vertex
//! e <u> <v> <weight>               endpoint names, created on first use
//! terminals <a> <b> <c>            optional, exactly three
//! rot <v> <edge> <edge> ...        cyclic edge indices at v
//! cross <id> <e> <i> <f> <j> <+|-> crossing of edges e and f
//! map <kind> <from> <to>           provenance note, carried verbatim
//! ```
//!
//! Vertex ids follow first appearance, edge ids follow `e` line order, and
//! `rot`/`cross` refer to edges by those indices. Crossing positions count
//! from the endpoint with the lexicographically smaller name. The parser is
//! total: any input, however hostile, yields a value or an error, never a
//! panic, and allocations stay proportional to the input length.

use crate::drawing::{CombinatorialDrawing, CrossingRecord};
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::rotation::RotationSystem;
use crate::{Error, Result};

pub const MAX_COUNT: usize = 2_000_000;
pub const MAX_WEIGHT: u64 = 1_000_000_000_000;
pub const MAX_NAME: usize = 200;

#[derive(Clone, Debug)]
pub struct MapLine {
    pub kind: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub graph: WeightedMultigraph,
    pub terminals: Option<[VertexId; 3]>,
    pub rotation: Option<RotationSystem>,
    pub crossings: Vec<CrossingRecord>,
    pub maps: Vec<MapLine>,
}

impl Document {
    pub fn from_graph(graph: WeightedMultigraph) -> Self {
        Document { graph, ..Default::default() }
    }

    pub fn from_instance(graph: WeightedMultigraph, terminals: [VertexId; 3]) -> Self {
        Document { graph, terminals: Some(terminals), ..Default::default() }
    }

    pub fn from_drawing(d: &CombinatorialDrawing) -> Self {
        Document {
            graph: d.graph.clone(),
            terminals: None,
            rotation: Some(d.rotation.clone()),
            crossings: d.crossings().to_vec(),
            maps: Vec::new(),
        }
    }

    pub fn require_terminals(&self) -> Result<[VertexId; 3]> {
        self.terminals
            .ok_or_else(|| Error::BadInstance("no terminals line".into()))
    }

    pub fn require_rotation(&self) -> Result<&RotationSystem> {
        self.rotation
            .as_ref()
            .ok_or_else(|| Error::BadInstance("no rot lines".into()))
    }

    /// Interprets the document as a drawing; `cross` lines are optional,
    /// `rot` lines are not.
    pub fn to_drawing(&self) -> Result<CombinatorialDrawing> {
        let rot = self.require_rotation()?.clone();
        CombinatorialDrawing::new(self.graph.clone(), rot, self.crossings.clone())
    }
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn check_name(line: usize, name: &str) -> Result<()> {
    if name.len() > MAX_NAME {
        return Err(bad(line, "name longer than 200 bytes"));
    }
    Ok(())
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| bad(line, format!("bad {what} {tok:?}")))
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut header: Option<(usize, usize)> = None;
    let mut graph = WeightedMultigraph::new();
    let mut terminals: Option<(usize, [String; 3])> = None;
    let mut rot_lines: Vec<(usize, String, Vec<usize>)> = Vec::new();
    let mut cross_lines: Vec<(usize, u32, CrossingRecord)> = Vec::new();
    let mut maps = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if header.is_none() && toks[0] != "graph" {
            return Err(bad(line, "expected the graph header first"));
        }
        match toks[0] {
            "graph" => {
                if header.is_some() {
                    return Err(bad(line, "second graph header"));
                }
                if toks.len() != 3 {
                    return Err(bad(line, "graph takes a vertex and an edge count"));
                }
                let nv: usize = parse_int(line, toks[1], "vertex count")?;
                let ne: usize = parse_int(line, toks[2], "edge count")?;
                if nv > MAX_COUNT || ne > MAX_COUNT {
                    return Err(Error::TooLarge(format!(
                        "header claims {nv} vertices and {ne} edges"
                    )));
                }
                header = Some((nv, ne));
            }
            "v" => {
                if toks.len() != 2 {
                    return Err(bad(line, "v takes one name"));
                }
                check_name(line, toks[1])?;
                graph
                    .add_vertex(toks[1])
                    .map_err(|_| bad(line, format!("duplicate vertex {:?}", toks[1])))?;
            }
            "e" => {
                if toks.len() != 4 {
                    return Err(bad(line, "e takes two names and a weight"));
                }
                check_name(line, toks[1])?;
                check_name(line, toks[2])?;
                let w: u64 = parse_int(line, toks[3], "weight")?;
                if w == 0 || w > MAX_WEIGHT {
                    return Err(bad(line, format!("weight {w} out of range")));
                }
                let u = graph.ensure_vertex(toks[1]);
                let v = graph.ensure_vertex(toks[2]);
                graph
                    .add_edge(u, v, w)
                    .map_err(|_| bad(line, format!("self loop at {:?}", toks[1])))?;
                if graph.edge_count() > MAX_COUNT || graph.vertex_count() > MAX_COUNT {
                    return Err(Error::TooLarge("too many edges or vertices".into()));
                }
            }
            "terminals" => {
                if terminals.is_some() {
                    return Err(bad(line, "second terminals line"));
                }
                if toks.len() != 4 {
                    return Err(bad(line, "terminals takes three names"));
                }
                terminals = Some((
                    line,
                    [toks[1].to_string(), toks[2].to_string(), toks[3].to_string()],
                ));
            }
            "rot" => {
                if toks.len() < 2 {
                    return Err(bad(line, "rot takes a name and edge indices"));
                }
                let mut entries = Vec::with_capacity(toks.len() - 2);
                for t in &toks[2..] {
                    entries.push(parse_int::<usize>(line, t, "edge index")?);
                }
                rot_lines.push((line, toks[1].to_string(), entries));
            }
            "cross" => {
                if toks.len() != 7 {
                    return Err(bad(
                        line,
                        "cross takes an id, two edge/position pairs, and a sign",
                    ));
                }
                let id: u32 = parse_int(line, toks[1], "crossing id")?;
                let e: usize = parse_int(line, toks[2], "edge index")?;
                let pos_e: usize = parse_int(line, toks[3], "position")?;
                let f: usize = parse_int(line, toks[4], "edge index")?;
                let pos_f: usize = parse_int(line, toks[5], "position")?;
                if e > MAX_COUNT || f > MAX_COUNT || pos_e > MAX_COUNT || pos_f > MAX_COUNT {
                    return Err(Error::TooLarge("crossing indices out of range".into()));
                }
                let positive = match toks[6] {
                    "+" => true,
                    "-" => false,
                    other => return Err(bad(line, format!("bad sign {other:?}"))),
                };
                cross_lines.push((
                    line,
                    id,
                    CrossingRecord {
                        e: EdgeId(e as u32),
                        pos_e,
                        f: EdgeId(f as u32),
                        pos_f,
                        positive,
                    },
                ));
            }
            "map" => {
                if toks.len() != 4 {
                    return Err(bad(line, "map takes a kind and two tokens"));
                }
                for t in &toks[1..] {
                    check_name(line, t)?;
                }
                maps.push(MapLine {
                    kind: toks[1].to_string(),
                    from: toks[2].to_string(),
                    to: toks[3].to_string(),
                });
            }
            other => return Err(bad(line, format!("unknown directive {other:?}"))),
        }
    }

    let Some((nv, ne)) = header else {
        return Err(bad(text.lines().count() + 1, "missing graph header"));
    };
    if graph.vertex_count() != nv {
        return Err(Error::BadInstance(format!(
            "header claims {nv} vertices, lines define {}",
            graph.vertex_count()
        )));
    }
    if graph.edge_count() != ne {
        return Err(Error::BadInstance(format!(
            "header claims {ne} edges, lines define {}",
            graph.edge_count()
        )));
    }

    let terminals = match terminals {
        None => None,
        Some((line, names)) => {
            let mut ids = [VertexId(0); 3];
            for (i, n) in names.iter().enumerate() {
                ids[i] = graph
                    .vertex(n)
                    .ok_or_else(|| bad(line, format!("unknown terminal {n:?}")))?;
            }
            if ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2] {
                return Err(bad(line, "terminals must be three distinct vertices"));
            }
            Some(ids)
        }
    };

    let rotation = if rot_lines.is_empty() {
        None
    } else {
        let mut order: Vec<Option<Vec<EdgeId>>> = vec![None; graph.vertex_count()];
        for (line, name, entries) in rot_lines {
            let v = graph
                .vertex(&name)
                .ok_or_else(|| bad(line, format!("unknown vertex {name:?}")))?;
            if order[v.index()].is_some() {
                return Err(bad(line, format!("second rot line for {name:?}")));
            }
            let mut cycle = Vec::with_capacity(entries.len());
            for idx in entries {
                if idx >= graph.edge_count() {
                    return Err(bad(line, format!("edge index {idx} out of range")));
                }
                cycle.push(EdgeId(idx as u32));
            }
            order[v.index()] = Some(cycle);
        }
        let rot = RotationSystem {
            order: order.into_iter().map(Option::unwrap_or_default).collect(),
        };
        rot.validate(&graph)?;
        Some(rot)
    };

    let mut crossings = Vec::with_capacity(cross_lines.len());
    {
        let mut seen = std::collections::BTreeSet::new();
        cross_lines.sort_by_key(|&(_, id, _)| id);
        for (line, id, rec) in cross_lines {
            if !seen.insert(id) {
                return Err(bad(line, format!("duplicate crossing id {id}")));
            }
            for x in [rec.e, rec.f] {
                if x.index() >= graph.edge_count() {
                    return Err(bad(line, format!("edge index {x} out of range")));
                }
            }
            crossings.push(rec);
        }
    }
    if !crossings.is_empty() && rotation.is_none() {
        return Err(Error::BadInstance("cross lines without rot lines".into()));
    }

    Ok(Document { graph, terminals, rotation, crossings, maps })
}

/// Canonical text form. Round-trips through `parse_document` exactly:
/// ids are stable and rotation cycles start at their smallest edge.
pub fn write_document(doc: &Document) -> Result<String> {
    use std::fmt::Write;
    let g = &doc.graph;
    for v in g.vertices() {
        let name = g.name(v);
        if name.is_empty()
            || name.len() > MAX_NAME
            || name.contains(char::is_whitespace)
            || name.contains('#')
        {
            return Err(Error::BadInstance(format!("name {name:?} not writable")));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {}", g.vertex_count(), g.edge_count());
    for v in g.vertices() {
        let _ = writeln!(out, "v {}", g.name(v));
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let _ = writeln!(out, "e {} {} {}", g.name(edge.u), g.name(edge.v), edge.weight);
    }
    if let Some(t) = doc.terminals {
        let _ = writeln!(
            out,
            "terminals {} {} {}",
            g.name(t[0]),
            g.name(t[1]),
            g.name(t[2])
        );
    }
    if let Some(rot) = &doc.rotation {
        for v in g.vertices() {
            let cycle = rot.at(v);
            if cycle.is_empty() {
                continue;
            }
            let start = cycle
                .iter()
                .enumerate()
                .min_by_key(|&(_, e)| e)
                .map(|(i, _)| i)
                .unwrap_or(0);
            let _ = write!(out, "rot {}", g.name(v));
            for i in 0..cycle.len() {
                let _ = write!(out, " {}", cycle[(start + i) % cycle.len()]);
            }
            out.push('\n');
        }
    }
    for (i, c) in doc.crossings.iter().enumerate() {
        let _ = writeln!(
            out,
            "cross {i} {} {} {} {} {}",
            c.e,
            c.pos_e,
            c.f,
            c.pos_f,
            if c.positive { "+" } else { "-" }
        );
    }
    for m in &doc.maps {
        let _ = writeln!(out, "map {} {} {}", m.kind, m.from, m.to);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "\
# a weighted triangle with terminals
graph 3 3
e a b 2
e b c 1
e a c 7   # heavy edge
terminals a b c
";

    #[test]
    fn parses_a_simple_instance() {
        let doc = parse_document(TRIANGLE).unwrap();
        assert_eq!(doc.graph.vertex_count(), 3);
        assert_eq!(doc.graph.edge_count(), 3);
        assert_eq!(doc.graph.total_weight(), 10);
        let t = doc.require_terminals().unwrap();
        assert_eq!(doc.graph.name(t[0]), "a");
        assert!(doc.rotation.is_none());
    }

    #[test]
    fn round_trips_exactly() {
        let doc = parse_document(TRIANGLE).unwrap();
        let text = write_document(&doc).unwrap();
        let doc2 = parse_document(&text).unwrap();
        let text2 = write_document(&doc2).unwrap();
        assert_eq!(text, text2);
        assert_eq!(doc2.graph.vertex_count(), 3);
        assert_eq!(doc2.terminals, doc.terminals);
    }

    #[test]
    fn drawing_round_trip() {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        let d = g.add_vertex("d").unwrap();
        let e = g.add_edge(a, b, 1).unwrap();
        let f = g.add_edge(c, d, 3).unwrap();
        let rot = RotationSystem::from_incidence(&g);
        let recs = vec![CrossingRecord { e, pos_e: 0, f, pos_f: 0, positive: false }];
        let dr = CombinatorialDrawing::new(g, rot, recs).unwrap();
        let text = write_document(&Document::from_drawing(&dr)).unwrap();
        let back = parse_document(&text).unwrap().to_drawing().unwrap();
        assert_eq!(back.cost(), 3);
        assert_eq!(back.crossings(), dr.crossings());
        assert!(back.agrees_with(&dr.rotation));
    }

    #[test]
    fn rejects_malformed_input() {
        let cases: &[&str] = &[
            "e a b 1\n",                         // body before header
            "graph 2 1\ngraph 2 1\n",            // double header
            "graph 1 0\nv a\nv a\n",             // duplicate vertex
            "graph 2 1\ne a a 1\n",              // self loop
            "graph 2 1\ne a b 0\n",              // zero weight
            "graph 2 1\ne a b x\n",              // non-numeric weight
            "graph 3 1\ne a b 1\n",              // count mismatch
            "graph 2 1\ne a b 1\nterminals a b b\n",
            "graph 2 1\ne a b 1\nterminals a b\n",
            "graph 2 1\ne a b 1\nrot a 5\n",     // edge index out of range
            "graph 2 1\ne a b 1\nrot a 0\nrot a 0\n",
            "graph 2 1\ne a b 1\nwat 1 2\n",     // unknown directive
            "graph 2 1\ne a b 1\ncross 0 0 0 1 0 +\n", // crossings without rot
            "graph 999999999999 0\n",            // headline overflow guard
        ];
        for case in cases {
            assert!(parse_document(case).is_err(), "accepted {case:?}");
        }
    }

    #[test]
    fn rot_lines_build_a_rotation() {
        let text = "\
graph 3 3
e a b 1
e b c 1
e a c 1
rot a 2 0
rot b 0 1
rot c 1 2
";
        let doc = parse_document(text).unwrap();
        let rot = doc.require_rotation().unwrap();
        rot.validate(&doc.graph).unwrap();
        assert_eq!(rot.at(VertexId(0)), &[EdgeId(2), EdgeId(0)]);
    }

    #[test]
    fn missing_rot_line_for_positive_degree_vertex_fails() {
        let text = "graph 3 3\ne a b 1\ne b c 1\ne a c 1\nrot a 0 2\nrot b 0 1\n";
        assert!(parse_document(text).is_err());
    }

    #[test]
    fn map_lines_survive() {
        let text = "graph 1 0\nv z\nmap vertex z original\n";
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.maps.len(), 1);
        assert_eq!(doc.maps[0].kind, "vertex");
        let rendered = write_document(&doc).unwrap();
        assert!(rendered.contains("map vertex z original"));
    }

    #[test]
    fn hostile_inputs_do_not_panic() {
        let cases: &[&str] = &[
            "",
            "\u{0}\u{0}\u{0}",
            "graph 18446744073709551615 2\n",
            "graph 2 1\ne a b 99999999999999999999999\n",
            "cross",
            "graph 0 0\ncross 0 1 2 3 4 +\n",
            "graph 2 1\ne a b 1\nrot a 0\nrot b 0\ncross 4294967295 0 0 0 0 -\n",
            "graph 2 1\r\ne a b 1\r\n",
        ];
        for case in cases {
            let _ = parse_document(case);
        }
    }
}
