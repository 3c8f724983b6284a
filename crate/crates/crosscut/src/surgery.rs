//! Local rewrites of drawings: deleting and contracting edges, suppressing
//! subdivision vertices, and untangling pairs of edges that cross more
//! than once. Every operation rebuilds the drawing from scratch and
//! revalidates it, so a bug here fails loudly instead of corrupting state.

use std::collections::BTreeMap;

use crate::drawing::{assemble_drawing, CombinatorialDrawing, DraftRecord};
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::rotation::RotationSystem;
use crate::{Error, Result};

/// Key stride between consecutive crossings of the untouched drawing.
/// Rewrites press new crossings into the gaps, so the stride bounds how
/// many can land between two old ones.
const STRIDE: i64 = 1 << 32;

/// Removes `e` together with every crossing on it. The rotations at its
/// endpoints lose one entry and everything else keeps its order.
pub fn delete_edge(d: &CombinatorialDrawing, e: EdgeId) -> Result<CombinatorialDrawing> {
    if e.index() >= d.graph.edge_count() {
        return Err(Error::UnknownEdge(e.index()));
    }
    let mut graph = WeightedMultigraph::new();
    for v in d.graph.vertices() {
        graph.add_vertex(d.graph.name(v))?;
    }
    let mut edge_map: Vec<Option<EdgeId>> = vec![None; d.graph.edge_count()];
    for old in d.graph.edge_ids() {
        if old == e {
            continue;
        }
        let ed = d.graph.edge(old);
        edge_map[old.index()] = Some(graph.add_edge(ed.u, ed.v, ed.weight)?);
    }
    let mapped = |x: EdgeId| edge_map[x.index()].expect("surviving edge is mapped");
    let order = d
        .graph
        .vertices()
        .map(|v| d.rotation.at(v).iter().filter(|&&x| x != e).map(|&x| mapped(x)).collect())
        .collect();
    let drafts = d
        .crossings()
        .iter()
        .filter(|r| r.e != e && r.f != e)
        .map(|r| DraftRecord {
            a: mapped(r.e),
            key_a: r.pos_e as i64,
            b: mapped(r.f),
            key_b: r.pos_f as i64,
            positive: r.positive,
        })
        .collect();
    let dirs = vec![true; graph.edge_count()];
    assemble_drawing(graph, RotationSystem { order }, drafts, &dirs)
}

/// Contracts `e`, which must be crossing-free, merging its endpoints into
/// the one with the smaller name. The merged rotation splices the cycle of
/// the disappearing endpoint into the other cycle at the slot `e` held,
/// which is what sliding one endpoint along the edge does to the orders
/// around it. An edge parallel to `e` would close into a loop, so that
/// case is rejected.
pub fn contract_crossing_free_edge(
    d: &CombinatorialDrawing,
    e: EdgeId,
) -> Result<CombinatorialDrawing> {
    if e.index() >= d.graph.edge_count() {
        return Err(Error::UnknownEdge(e.index()));
    }
    if !d.sequence(e).is_empty() {
        return Err(Error::BadDrawing("contraction needs a crossing-free edge".into()));
    }
    let keep = d.graph.canonical_tail(e);
    let gone = d.graph.edge(e).other(keep);
    for other in d.graph.edge_ids() {
        if other != e && d.graph.edge(other).touches(keep) && d.graph.edge(other).touches(gone) {
            return Err(Error::BadDrawing("contraction would close a parallel edge into a loop".into()));
        }
    }

    let mut graph = WeightedMultigraph::new();
    let mut vmap: Vec<Option<VertexId>> = vec![None; d.graph.vertex_count()];
    for v in d.graph.vertices() {
        if v != gone {
            vmap[v.index()] = Some(graph.add_vertex(d.graph.name(v))?);
        }
    }
    vmap[gone.index()] = vmap[keep.index()];
    let mv = |v: VertexId| vmap[v.index()].expect("surviving vertex is mapped");
    let mut edge_map: Vec<Option<EdgeId>> = vec![None; d.graph.edge_count()];
    for old in d.graph.edge_ids() {
        if old == e {
            continue;
        }
        let ed = d.graph.edge(old);
        edge_map[old.index()] = Some(graph.add_edge(mv(ed.u), mv(ed.v), ed.weight)?);
    }
    let me = |x: EdgeId| edge_map[x.index()].expect("surviving edge is mapped");

    let splice = |v: VertexId| -> Vec<EdgeId> {
        let cyc = d.rotation.at(v);
        let at = cyc.iter().position(|&x| x == e).expect("endpoint cycle contains e");
        cyc[at + 1..].iter().chain(cyc[..at].iter()).map(|&x| me(x)).collect()
    };
    let mut order = vec![Vec::new(); graph.vertex_count()];
    for v in d.graph.vertices() {
        if v == gone {
            continue;
        }
        if v == keep {
            let mut merged = splice(keep);
            merged.extend(splice(gone));
            order[mv(v).index()] = merged;
        } else {
            order[mv(v).index()] = d.rotation.at(v).iter().map(|&x| me(x)).collect();
        }
    }

    // Edges that moved onto the kept vertex can change which endpoint
    // counts as their tail; the assembler re-expresses those.
    let mut dirs = vec![true; graph.edge_count()];
    for old in d.graph.edge_ids() {
        if old == e {
            continue;
        }
        let new = me(old);
        dirs[new.index()] = mv(d.graph.canonical_tail(old)) == graph.canonical_tail(new);
    }
    let drafts = d
        .crossings()
        .iter()
        .map(|r| DraftRecord {
            a: me(r.e),
            key_a: r.pos_e as i64,
            b: me(r.f),
            key_b: r.pos_f as i64,
            positive: r.positive,
        })
        .collect();
    assemble_drawing(graph, RotationSystem { order }, drafts, &dirs)
}

/// Replaces the two equal-weight edges at a degree-2 vertex by a single
/// edge joining their far endpoints, keeping every crossing on the
/// composite path in order. The two halves must not cross each other:
/// merging them would turn that into a self-crossing.
pub fn suppress_degree_two(d: &CombinatorialDrawing, v: VertexId) -> Result<CombinatorialDrawing> {
    if v.index() >= d.graph.vertex_count() {
        return Err(Error::BadDrawing("no such vertex".into()));
    }
    if d.graph.degree(v) != 2 {
        return Err(Error::BadDrawing("suppression needs a degree-2 vertex".into()));
    }
    let [e1, e2] = [d.graph.incident_edges(v)[0], d.graph.incident_edges(v)[1]];
    let u = d.graph.edge(e1).other(v);
    let w = d.graph.edge(e2).other(v);
    if u == w {
        return Err(Error::BadDrawing("suppression would close a loop".into()));
    }
    if d.graph.edge(e1).weight != d.graph.edge(e2).weight {
        return Err(Error::BadDrawing("suppression needs equal weights on both halves".into()));
    }
    if d.crossings_between(e1, e2) > 0 {
        return Err(Error::BadDrawing("the two halves cross each other".into()));
    }

    let mut graph = WeightedMultigraph::new();
    let mut vmap: Vec<Option<VertexId>> = vec![None; d.graph.vertex_count()];
    for x in d.graph.vertices() {
        if x != v {
            vmap[x.index()] = Some(graph.add_vertex(d.graph.name(x))?);
        }
    }
    let mv = |x: VertexId| vmap[x.index()].expect("surviving vertex is mapped");
    let mut edge_map: Vec<Option<EdgeId>> = vec![None; d.graph.edge_count()];
    for old in d.graph.edge_ids() {
        if old == e1 || old == e2 {
            continue;
        }
        let ed = d.graph.edge(old);
        edge_map[old.index()] = Some(graph.add_edge(mv(ed.u), mv(ed.v), ed.weight)?);
    }
    let merged = graph.add_edge(mv(u), mv(w), d.graph.edge(e1).weight)?;
    let me = |x: EdgeId| {
        if x == e1 || x == e2 {
            merged
        } else {
            edge_map[x.index()].expect("surviving edge is mapped")
        }
    };

    let mut order = vec![Vec::new(); graph.vertex_count()];
    for x in d.graph.vertices() {
        if x != v {
            order[mv(x).index()] = d.rotation.at(x).iter().map(|&y| me(y)).collect();
        }
    }

    // Keys run from u through v to w; bits stored against a half that was
    // walked the other way flip to match.
    let k1 = d.sequence(e1).len() as i64;
    let walk1 = d.graph.canonical_tail(e1) == u;
    let walk2 = d.graph.canonical_tail(e2) == v;
    let mut drafts = Vec::with_capacity(d.crossing_count());
    for r in d.crossings() {
        let on1 = r.e == e1 || r.f == e1;
        let on2 = r.e == e2 || r.f == e2;
        let draft = if on1 || on2 {
            let half = if on1 { e1 } else { e2 };
            let walk = if on1 { walk1 } else { walk2 };
            let g = r.other_edge(half);
            let pos = r.pos_on(half) as i64;
            let len = if on1 { k1 } else { d.sequence(e2).len() as i64 };
            let along = if walk { pos } else { len - 1 - pos };
            let half_first = if r.e == half { r.positive } else { !r.positive };
            DraftRecord {
                a: merged,
                key_a: if on1 { along } else { k1 + along },
                b: me(g),
                key_b: r.pos_on(g) as i64,
                positive: half_first ^ !walk,
            }
        } else {
            DraftRecord {
                a: me(r.e),
                key_a: r.pos_e as i64,
                b: me(r.f),
                key_b: r.pos_f as i64,
                positive: r.positive,
            }
        };
        drafts.push(draft);
    }
    let mut dirs = vec![true; graph.edge_count()];
    dirs[merged.index()] = graph.canonical_tail(merged) == mv(u);
    assemble_drawing(graph, RotationSystem { order }, drafts, &dirs)
}

/// Rewrites `d` until no two edges cross more than once. Each step picks
/// two crossings of an offending pair and replaces the portion of one
/// edge between them by a run alongside the other, trading the crossings
/// in between for copies of what the other edge crosses there. Only
/// strictly cheaper rewrites that verify as realizable are applied, so
/// the cost is a strictly decreasing non-negative integer across steps
/// and the loop terminates. Rotations never change.
///
/// A drawing could in principle reach a state where a pair still crosses
/// twice but every candidate rewrite costs at least as much; that state
/// reports an error rather than returning a drawing that breaks the
/// contract. No drawing this crate produces has hit it.
pub fn remove_double_crossings(d: &CombinatorialDrawing) -> Result<CombinatorialDrawing> {
    let mut cur = d.clone();
    while let Some((e, f)) = doubled_pair(&cur) {
        cur = best_reroute(&cur, e, f)?;
    }
    Ok(cur)
}

fn doubled_pair(d: &CombinatorialDrawing) -> Option<(EdgeId, EdgeId)> {
    let mut counts: BTreeMap<(EdgeId, EdgeId), usize> = BTreeMap::new();
    for r in d.crossings() {
        let key = if r.e < r.f { (r.e, r.f) } else { (r.f, r.e) };
        *counts.entry(key).or_default() += 1;
    }
    counts.into_iter().find(|&(_, c)| c >= 2).map(|(k, _)| k)
}

fn best_reroute(d: &CombinatorialDrawing, e: EdgeId, f: EdgeId) -> Result<CombinatorialDrawing> {
    let cost0 = d.cost();
    let mut best: Option<(u64, CombinatorialDrawing)> = None;
    for (a, b) in [(e, f), (f, e)] {
        let xs: Vec<usize> = d
            .sequence(a)
            .iter()
            .copied()
            .filter(|&i| d.crossings()[i].other_edge(a) == b)
            .collect();
        for xi in 0..xs.len() {
            for yi in xi + 1..xs.len() {
                for far_side in [false, true] {
                    let Some(cand) = reroute(d, a, b, xs[xi], xs[yi], far_side) else {
                        continue;
                    };
                    if cand.cost() < cost0 && cand.is_realizable() {
                        if best.as_ref().map_or(true, |(c, _)| cand.cost() < *c) {
                            best = Some((cand.cost(), cand));
                        }
                    }
                }
            }
        }
    }
    best.map(|(_, c)| c).ok_or_else(|| {
        Error::BadDrawing(
            "two edges cross twice but every rewrite of their crossings costs at least as much"
                .into(),
        )
    })
}

/// Replaces the portion of `a` between its crossings `x` and `y` with `b`
/// by a run alongside `b`. Everything the removed portion crossed dies
/// with it; everything `b` crosses between the two points is crossed by
/// the run as well, just before or just after `b` is, depending on which
/// side of `b` the run lies (`far_side` picks). Returns None when the pair
/// crosses inside the run but outside the removed portion, since the run
/// would then cross its own edge, or when the records fail validation.
fn reroute(
    d: &CombinatorialDrawing,
    a: EdgeId,
    b: EdgeId,
    x: usize,
    y: usize,
    far_side: bool,
) -> Option<CombinatorialDrawing> {
    let recs = d.crossings();
    let (px, py) = (recs[x].pos_on(a), recs[y].pos_on(a));
    debug_assert!(px < py);
    let (qx, qy) = (recs[x].pos_on(b), recs[y].pos_on(b));
    let reversed = qx > qy;
    let (qlo, qhi) = if reversed { (qy, qx) } else { (qx, qy) };
    for &i in d.sequence(b) {
        let r = &recs[i];
        if r.other_edge(b) != a {
            continue;
        }
        let q = r.pos_on(b);
        if q > qlo && q < qhi {
            let p = r.pos_on(a);
            if !(p > px && p < py) {
                return None;
            }
        }
    }
    let dying = |i: usize| -> bool {
        if i == x || i == y {
            return true;
        }
        let r = &recs[i];
        (r.e == a || r.f == a) && {
            let p = r.pos_on(a);
            p > px && p < py
        }
    };
    let mut drafts: Vec<DraftRecord> = Vec::with_capacity(d.crossing_count());
    for (i, r) in recs.iter().enumerate() {
        if dying(i) {
            continue;
        }
        drafts.push(DraftRecord {
            a: r.e,
            key_a: STRIDE * r.pos_e as i64,
            b: r.f,
            key_b: STRIDE * r.pos_f as i64,
            positive: r.positive,
        });
    }
    let mut run: Vec<usize> = d
        .sequence(b)
        .iter()
        .copied()
        .filter(|&i| {
            let q = recs[i].pos_on(b);
            q > qlo && q < qhi && !dying(i)
        })
        .collect();
    if reversed {
        run.reverse();
    }
    for (t, &i) in run.iter().enumerate() {
        let r = &recs[i];
        let g = r.other_edge(b);
        let s = r.pos_on(g) as i64;
        let b_first = if r.e == b { r.positive } else { !r.positive };
        // g leaves b on the side given by its bit, so it meets the run
        // just after b exactly when the run lies on that side
        let after = b_first ^ far_side;
        drafts.push(DraftRecord {
            a,
            key_a: STRIDE * px as i64 + 1 + t as i64,
            b: g,
            key_b: STRIDE * s + if after { 1 } else { -1 },
            positive: b_first ^ reversed,
        });
    }
    let dirs = vec![true; d.graph.edge_count()];
    assemble_drawing(d.graph.clone(), d.rotation.clone(), drafts, &dirs).ok()
}
