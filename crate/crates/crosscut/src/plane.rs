//! Incremental construction of drawings. Edges are routed one at a time
//! through the faces of the partial drawing built so far; each route is a
//! cheapest path over face adjacencies, where stepping through a segment
//! of an already-placed edge costs whatever the caller charges for
//! crossing it. Every route is turned into crossing records on the spot,
//! so the partial drawing stays realizable throughout.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::drawing::{CombinatorialDrawing, CrossingRecord, Planarization};
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::rotation::{Dart, FaceSet, RotationSystem};
use crate::{Error, Result};

/// Angular sector at `vertex` that ends at the placed dart of `before`,
/// walking clockwise. Names a face of the partial drawing by pointing at
/// it from a vertex on its boundary.
#[derive(Clone, Copy, Debug)]
pub struct Corner {
    pub vertex: VertexId,
    pub before: EdgeId,
}

/// Where an endpoint of a routed edge should go.
#[derive(Clone, Copy, Debug)]
pub enum Spot {
    /// Slots picked by the prescribed rotation, or by the route when the
    /// rotation is free.
    Auto,
    /// For an endpoint with no placed darts yet: land it in the face at
    /// this corner.
    Inside(Corner),
}

/// Builds a drawing of `graph` edge by edge. With a prescribed rotation
/// every dart lands in the slot the rotation dictates; without one the
/// slots fall where the cheapest route enters its endpoints.
pub struct Inserter {
    graph: WeightedMultigraph,
    target: Option<RotationSystem>,
    /// Cycles over placed darts only; with a target rotation this is
    /// always its restriction to the placed edges.
    partial: Vec<Vec<EdgeId>>,
    placed: Vec<bool>,
    records: Vec<CrossingRecord>,
}

/// Planarized view of the placed subgraph, rebuilt before each route.
struct Scaffold {
    p: Planarization,
    faces: FaceSet,
    to_sub: Vec<Option<EdgeId>>,
    to_old: Vec<EdgeId>,
    /// Segment id to its gap index along its chain.
    gap_of: Vec<usize>,
}

/// Orientation of a crossing where the routed edge steps through a
/// segment against the dart bounding the face it leaves. Fixed by the
/// clockwise conventions; the square test pins it.
const EXIT_POSITIVE: bool = false;

impl Inserter {
    pub fn with_rotation(graph: &WeightedMultigraph, rot: RotationSystem) -> Result<Self> {
        rot.validate(graph)?;
        Ok(Inserter {
            graph: graph.clone(),
            target: Some(rot),
            partial: vec![Vec::new(); graph.vertex_count()],
            placed: vec![false; graph.edge_count()],
            records: Vec::new(),
        })
    }

    pub fn free(graph: &WeightedMultigraph) -> Result<Self> {
        Ok(Inserter {
            graph: graph.clone(),
            target: None,
            partial: vec![Vec::new(); graph.vertex_count()],
            placed: vec![false; graph.edge_count()],
            records: Vec::new(),
        })
    }

    pub fn is_placed(&self, e: EdgeId) -> bool {
        self.placed[e.index()]
    }

    /// The drawing of what has been placed so far.
    pub fn partial_drawing(&self) -> Result<CombinatorialDrawing> {
        let (sub, to_old) = self.subgraph();
        let mut back = vec![None; self.graph.edge_count()];
        for (s, &o) in to_old.iter().enumerate() {
            back[o.index()] = Some(EdgeId(s as u32));
        }
        let order = self
            .graph
            .vertices()
            .map(|v| self.partial[v.index()].iter().map(|&e| back[e.index()].unwrap()).collect())
            .collect();
        let records = self
            .records
            .iter()
            .map(|r| CrossingRecord {
                e: back[r.e.index()].unwrap(),
                f: back[r.f.index()].unwrap(),
                ..*r
            })
            .collect();
        CombinatorialDrawing::new(sub, RotationSystem { order }, records)
    }

    fn subgraph(&self) -> (WeightedMultigraph, Vec<EdgeId>) {
        let keep: Vec<EdgeId> =
            self.graph.edge_ids().filter(|&e| self.placed[e.index()]).collect();
        self.graph.edge_subgraph(&keep)
    }

    fn scaffold(&self) -> Result<Scaffold> {
        let sub = self.partial_drawing()?;
        let (_, to_old) = self.subgraph();
        let mut to_sub = vec![None; self.graph.edge_count()];
        for (s, &o) in to_old.iter().enumerate() {
            to_sub[o.index()] = Some(EdgeId(s as u32));
        }
        let p = sub.planarize();
        let faces = p.rotation.trace_faces(&p.graph);
        let mut gap_of = vec![0; p.graph.edge_count()];
        for chain in &p.seg {
            for (i, &s) in chain.iter().enumerate() {
                gap_of[s.index()] = i;
            }
        }
        Ok(Scaffold { p, faces, to_sub, to_old, gap_of })
    }

    /// Face at a corner: the one met walking clockwise into the sector
    /// that ends at `before`.
    fn corner_face(&self, sc: &Scaffold, c: Corner) -> Result<usize> {
        let Some(sub_e) = sc.to_sub[c.before.index()] else {
            return Err(Error::BadDrawing("corner names an edge that is not placed".into()));
        };
        if !self.graph.edge(c.before).touches(c.vertex) {
            return Err(Error::BadDrawing("corner edge does not touch its vertex".into()));
        }
        let chain = &sc.p.seg[sub_e.index()];
        let seg = if sc.p.graph.canonical_tail(sub_e) == c.vertex {
            chain[0]
        } else {
            *chain.last().expect("chains are nonempty")
        };
        Ok(sc.faces.face_of(Dart { from: c.vertex, edge: seg }, &sc.p.graph))
    }

    /// With a prescribed rotation, the first placed dart after `e` in the
    /// cycle at `v`; the new dart goes right before it.
    fn placed_successor(&self, v: VertexId, e: EdgeId) -> Option<EdgeId> {
        let rot = self.target.as_ref()?;
        let cyc = rot.at(v);
        let at = cyc
            .iter()
            .position(|&x| x == e)
            .expect("validated rotation lists every incident edge");
        (1..cyc.len()).map(|k| cyc[(at + k) % cyc.len()]).find(|&x| self.placed[x.index()])
    }

    /// Slot for the new dart of `e` at an anchored `v` when no route
    /// constrains it further.
    fn auto_slot(&self, v: VertexId, e: EdgeId) -> usize {
        match self.placed_successor(v, e) {
            Some(succ) => self.partial[v.index()]
                .iter()
                .position(|&x| x == succ)
                .expect("partial cycle tracks placed darts"),
            None => 0,
        }
    }

    /// Faces reachable from `v` without crossing anything, each with the
    /// slot index in the partial cycle where the new dart would go.
    fn anchored_faces(
        &self,
        sc: &Scaffold,
        v: VertexId,
        e: EdgeId,
    ) -> Result<BTreeMap<usize, usize>> {
        let mut out = BTreeMap::new();
        if self.target.is_some() {
            let succ = self.placed_successor(v, e).expect("anchored vertex has a placed dart");
            let slot = self.auto_slot(v, e);
            let face = self.corner_face(sc, Corner { vertex: v, before: succ })?;
            out.insert(face, slot);
        } else {
            for (slot, &d) in self.partial[v.index()].iter().enumerate() {
                let face = self.corner_face(sc, Corner { vertex: v, before: d })?;
                out.entry(face).or_insert(slot);
            }
        }
        Ok(out)
    }

    /// Routes `e`, charging `costs(g)` for each crossing of a placed edge
    /// `g` and refusing to cross where it returns None. `at_u` and `at_v`
    /// say where the endpoints `graph.edge(e).u` and `.v` go; `Inside` is
    /// only meaningful for an endpoint with no placed darts.
    pub fn insert<F>(&mut self, e: EdgeId, costs: F, at_u: Spot, at_v: Spot) -> Result<()>
    where
        F: Fn(EdgeId) -> Option<u64>,
    {
        if e.index() >= self.graph.edge_count() {
            return Err(Error::UnknownEdge(e.index()));
        }
        if self.placed[e.index()] {
            return Err(Error::BadDrawing("edge is already placed".into()));
        }
        // Work tail to head so route order is record order.
        let tail = self.graph.canonical_tail(e);
        let head = self.graph.canonical_head(e);
        let (at_tail, at_head) =
            if self.graph.edge(e).u == tail { (at_u, at_v) } else { (at_v, at_u) };
        for (v, spot) in [(tail, at_tail), (head, at_head)] {
            if matches!(spot, Spot::Inside(_)) && !self.partial[v.index()].is_empty() {
                return Err(Error::BadDrawing(
                    "an endpoint with placed darts cannot be re-homed".into(),
                ));
            }
        }

        let anchored_tail = !self.partial[tail.index()].is_empty();
        let anchored_head = !self.partial[head.index()].is_empty();
        let needs_route = match (anchored_tail, anchored_head, at_tail, at_head) {
            (true, true, _, _) => true,
            (true, false, _, Spot::Inside(_)) | (false, true, Spot::Inside(_), _) => true,
            (false, false, Spot::Inside(_), Spot::Inside(_)) => true,
            _ => false,
        };
        if !needs_route {
            // The free endpoints land right next to whatever anchors the
            // edge, crossing nothing.
            let ts = if anchored_tail { self.auto_slot(tail, e) } else { 0 };
            let hs = if anchored_head { self.auto_slot(head, e) } else { 0 };
            self.place(e, tail, ts, head, hs, &[], None)?;
            return Ok(());
        }

        let sc = self.scaffold()?;
        let sources: BTreeMap<usize, usize> = if anchored_tail {
            self.anchored_faces(&sc, tail, e)?
        } else {
            let Spot::Inside(c) = at_tail else { unreachable!("needs_route") };
            BTreeMap::from([(self.corner_face(&sc, c)?, 0)])
        };
        let targets: BTreeMap<usize, usize> = if anchored_head {
            self.anchored_faces(&sc, head, e)?
        } else {
            let Spot::Inside(c) = at_head else { unreachable!("needs_route") };
            BTreeMap::from([(self.corner_face(&sc, c)?, 0)])
        };

        let (first_face, crossed) = route(&sc, &sources, &targets, |sub_e| {
            costs(sc.to_old[sub_e.index()])
        })
        .ok_or_else(|| Error::BadDrawing("no admissible route for the edge".into()))?;
        let last_face = crossed
            .last()
            .map(|d| sc.faces.face_of(d.reversed(&sc.p.graph), &sc.p.graph))
            .unwrap_or(first_face);
        self.place(e, tail, sources[&first_face], head, targets[&last_face], &crossed, Some(&sc))
    }

    /// Commits a routed edge: slot the darts, shift the crossing
    /// sequences of everything the route stepped through, and append the
    /// new records in route order.
    fn place(
        &mut self,
        e: EdgeId,
        tail: VertexId,
        tail_slot: usize,
        head: VertexId,
        head_slot: usize,
        crossed: &[Dart],
        sc: Option<&Scaffold>,
    ) -> Result<()> {
        // Gaps claimed per crossed edge, in route order.
        let mut claims: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        let mut news: Vec<CrossingRecord> = Vec::with_capacity(crossed.len());
        for (j, d) in crossed.iter().enumerate() {
            let sc = sc.expect("routes carry a scaffold");
            let seg = d.edge;
            let g = sc.to_old[sc.p.orig_of[seg.index()].index()];
            let gap = sc.gap_of[seg.index()];
            let with_chain = d.from == sc.p.graph.edge(seg).u;
            claims.entry(g).or_default().push(gap);
            news.push(CrossingRecord {
                e,
                pos_e: j,
                f: g,
                pos_f: gap,
                positive: EXIT_POSITIVE ^ !with_chain,
            });
        }
        // A gap index g_t among the sorted claims of an edge finalizes at
        // g_t + t; existing positions move up by the claims at or below.
        for (g, gaps) in &mut claims {
            let mut sorted = gaps.clone();
            sorted.sort_unstable();
            for r in &mut self.records {
                for (re, rp) in [(r.e, &mut r.pos_e), (r.f, &mut r.pos_f)] {
                    if re == *g {
                        *rp += sorted.iter().take_while(|&&x| x <= *rp).count();
                    }
                }
            }
            for n in &mut news {
                if n.f == *g {
                    let t = sorted.iter().position(|&x| x == n.pos_f).expect("claimed gap");
                    n.pos_f = n.pos_f + t;
                }
            }
        }
        self.records.extend(news);
        self.partial[tail.index()].insert(tail_slot, e);
        self.partial[head.index()].insert(head_slot, e);
        self.placed[e.index()] = true;
        Ok(())
    }

    /// The finished drawing; every edge must have been placed.
    pub fn finish(self) -> Result<CombinatorialDrawing> {
        if let Some(missing) = self.graph.edge_ids().find(|&e| !self.placed[e.index()]) {
            return Err(Error::BadDrawing(format!(
                "edge {missing} was never placed"
            )));
        }
        if let Some(rot) = &self.target {
            debug_assert!(
                self.graph.vertices().all(|v| {
                    let (a, b) = (&self.partial[v.index()], rot.at(v));
                    a.len() == b.len()
                        && (a.is_empty()
                            || b.iter().position(|&x| x == a[0]).is_some_and(|i| {
                                (0..a.len()).all(|k| a[k] == b[(i + k) % a.len()])
                            }))
                }),
                "slots follow the prescribed rotation up to cyclic shifts"
            );
        }
        CombinatorialDrawing::new(
            self.graph.clone(),
            RotationSystem { order: self.partial.clone() },
            self.records.clone(),
        )
    }
}

/// Cheapest path over faces from any source to any target. Returns the
/// source face it left from and the boundary darts it stepped through,
/// each belonging to the face being left.
fn route<F>(
    sc: &Scaffold,
    sources: &BTreeMap<usize, usize>,
    targets: &BTreeMap<usize, usize>,
    cost: F,
) -> Option<(usize, Vec<Dart>)>
where
    F: Fn(EdgeId) -> Option<u64>,
{
    let nf = sc.faces.face_count();
    let mut dist = vec![u64::MAX; nf];
    let mut prev: Vec<Option<(usize, Dart)>> = vec![None; nf];
    let mut heap = BinaryHeap::new();
    for &f in sources.keys() {
        dist[f] = 0;
        heap.push(Reverse((0u64, f)));
    }
    let mut reached = None;
    while let Some(Reverse((d, f))) = heap.pop() {
        if d > dist[f] {
            continue;
        }
        if targets.contains_key(&f) {
            reached = Some(f);
            break;
        }
        for dart in &sc.faces.faces[f] {
            let sub_e = sc.p.orig_of[dart.edge.index()];
            let Some(c) = cost(sub_e) else { continue };
            let g = sc.faces.face_of(dart.reversed(&sc.p.graph), &sc.p.graph);
            let nd = d.saturating_add(c);
            if nd < dist[g] {
                dist[g] = nd;
                prev[g] = Some((f, *dart));
                heap.push(Reverse((nd, g)));
            }
        }
    }
    let mut f = reached?;
    let mut crossed = Vec::new();
    while let Some((pf, d)) = prev[f] {
        crossed.push(d);
        f = pf;
    }
    crossed.reverse();
    Some((f, crossed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_the_pinned_diagonal_crossing() {
        // Square rim with both diagonals under the rotation that forces
        // the diagonals to cross once, in one specific orientation. The
        // router must find that crossing and the right bit, or the final
        // drawing fails its realizability check.
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        let d = g.add_vertex("d").unwrap();
        let s1 = g.add_edge(a, c, 1).unwrap();
        let s2 = g.add_edge(c, b, 1).unwrap();
        let s3 = g.add_edge(b, d, 1).unwrap();
        let s4 = g.add_edge(d, a, 1).unwrap();
        let e = g.add_edge(a, b, 1).unwrap();
        let f = g.add_edge(c, d, 1).unwrap();
        let rot = RotationSystem {
            order: vec![
                vec![s4, e, s1],
                vec![s2, e, s3],
                vec![s1, f, s2],
                vec![s3, f, s4],
            ],
        };
        let mut ins = Inserter::with_rotation(&g, rot.clone()).unwrap();
        for x in [s1, s2, s3, s4, e, f] {
            ins.insert(x, |_| Some(1), Spot::Auto, Spot::Auto).unwrap();
        }
        let dr = ins.finish().unwrap();
        assert!(dr.is_realizable());
        assert!(dr.agrees_with(&rot));
        assert_eq!(dr.crossings_between(e, f), 1);
        assert_eq!(dr.cost(), 1);
    }

    #[test]
    fn free_insertion_of_a_planar_graph_crosses_nothing() {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..4).map(|i| g.add_vertex(&format!("v{i}")).unwrap()).collect();
        let mut es = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                es.push(g.add_edge(vs[i], vs[j], 1).unwrap());
            }
        }
        let mut ins = Inserter::free(&g).unwrap();
        for &x in &es {
            ins.insert(x, |_| Some(1), Spot::Auto, Spot::Auto).unwrap();
        }
        let dr = ins.finish().unwrap();
        assert_eq!(dr.crossing_count(), 0, "K4 inserts without crossings");
        assert!(dr.is_realizable());
    }

    #[test]
    fn free_insertion_of_k5_stays_realizable() {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..5).map(|i| g.add_vertex(&format!("v{i}")).unwrap()).collect();
        let mut es = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                es.push(g.add_edge(vs[i], vs[j], 1).unwrap());
            }
        }
        let mut ins = Inserter::free(&g).unwrap();
        for &x in &es {
            ins.insert(x, |_| Some(1), Spot::Auto, Spot::Auto).unwrap();
        }
        let dr = ins.finish().unwrap();
        assert!(dr.is_realizable());
        assert!(dr.crossing_count() >= 1, "no drawing of K5 avoids a crossing");
        assert!(dr.crossing_count() <= 3, "greedy routes stay close to optimal here");
    }

    #[test]
    fn inside_spot_forces_a_crossing_out_of_a_wheel_cell() {
        // A four-spoke wheel under its planar rotation. The vertex m is
        // dropped into one of the triangular cells at the hub, and its
        // only edge runs to the opposite rim vertex, so it has to cross
        // exactly one wheel edge. With crossings forbidden there is no
        // route at all.
        let mut g = WeightedMultigraph::new();
        let h = g.add_vertex("h").unwrap();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        let d = g.add_vertex("d").unwrap();
        let m = g.add_vertex("m").unwrap();
        let ab = g.add_edge(a, b, 1).unwrap();
        let bc = g.add_edge(b, c, 1).unwrap();
        let cd = g.add_edge(c, d, 1).unwrap();
        let da = g.add_edge(d, a, 1).unwrap();
        let ha = g.add_edge(h, a, 1).unwrap();
        let hb = g.add_edge(h, b, 1).unwrap();
        let hc = g.add_edge(h, c, 1).unwrap();
        let hd = g.add_edge(h, d, 1).unwrap();
        let mc = g.add_edge(m, c, 1).unwrap();
        let rot = RotationSystem {
            order: vec![
                vec![ha, hb, hc, hd],
                vec![ab, ha, da],
                vec![bc, hb, ab],
                vec![cd, hc, bc, mc],
                vec![da, hd, cd],
                vec![mc],
            ],
        };
        let wheel = [ab, bc, cd, da, ha, hb, hc, hd];
        let cell = Corner { vertex: h, before: hb };

        let mut blocked = Inserter::with_rotation(&g, rot.clone()).unwrap();
        for x in wheel {
            blocked.insert(x, |_| Some(1), Spot::Auto, Spot::Auto).unwrap();
        }
        assert!(
            blocked.insert(mc, |_| None, Spot::Inside(cell), Spot::Auto).is_err(),
            "every way out of the cell is a crossing"
        );

        let mut ins = Inserter::with_rotation(&g, rot.clone()).unwrap();
        for x in wheel {
            ins.insert(x, |_| Some(1), Spot::Auto, Spot::Auto).unwrap();
        }
        ins.insert(mc, |_| Some(1), Spot::Inside(cell), Spot::Auto).unwrap();
        let dr = ins.finish().unwrap();
        assert!(dr.is_realizable());
        assert!(dr.agrees_with(&rot));
        assert_eq!(dr.cost(), 1, "one crossing out of the cell, none in the wheel");
    }
}
