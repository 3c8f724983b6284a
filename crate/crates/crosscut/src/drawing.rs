//! Combinatorial drawings: a rotation system plus, per edge, the ordered
//! sequence of its crossings with other edges.
//!
//! Each crossing carries an orientation bit fixing which way the two edges
//! cut through each other. That data determines a planarized multigraph
//! (crossings become degree-four vertices) together with a rotation system,
//! and the drawing is realizable exactly when that rotation has genus zero.
//! Costs are weighted: a crossing of `e` and `f` costs `w(e) * w(f)`.

use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::rotation::RotationSystem;
use crate::{Error, Result};

/// One crossing between distinct edges `e` and `f`. Positions are 0-based
/// indices into each edge's crossing sequence, counted from the endpoint
/// with the lexicographically smaller name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingRecord {
    pub e: EdgeId,
    pub pos_e: usize,
    pub f: EdgeId,
    pub pos_f: usize,
    /// Orientation: walking `e` tail to head, does `f` pass left to right?
    /// Concretely this picks the cyclic order at the planarization dummy:
    /// positive gives (e in, f in, e out, f out).
    pub positive: bool,
}

impl CrossingRecord {
    /// Position of this crossing along `x`, which must be one of its edges.
    pub fn pos_on(&self, x: EdgeId) -> usize {
        if x == self.e {
            self.pos_e
        } else {
            debug_assert_eq!(x, self.f);
            self.pos_f
        }
    }

    pub fn other_edge(&self, x: EdgeId) -> EdgeId {
        if x == self.e {
            self.f
        } else {
            self.e
        }
    }
}

#[derive(Clone, Debug)]
pub struct CombinatorialDrawing {
    pub graph: WeightedMultigraph,
    pub rotation: RotationSystem,
    crossings: Vec<CrossingRecord>,
    /// Per edge, crossing record indices ordered tail to head.
    seq: Vec<Vec<usize>>,
}

impl CombinatorialDrawing {
    pub fn new(
        graph: WeightedMultigraph,
        rotation: RotationSystem,
        crossings: Vec<CrossingRecord>,
    ) -> Result<Self> {
        rotation.validate(&graph)?;
        let seq = build_sequences(&graph, &crossings)?;
        Ok(CombinatorialDrawing { graph, rotation, crossings, seq })
    }

    /// Crossing-free drawing from a planar embedding.
    pub fn planar(graph: WeightedMultigraph, rotation: RotationSystem) -> Result<Self> {
        Self::new(graph, rotation, Vec::new())
    }

    pub fn crossings(&self) -> &[CrossingRecord] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Record indices along `e`, tail to head.
    pub fn sequence(&self, e: EdgeId) -> &[usize] {
        &self.seq[e.index()]
    }

    /// Total weighted cost, summed over crossings.
    pub fn cost(&self) -> u64 {
        let total: u128 = self
            .crossings
            .iter()
            .map(|c| {
                let we = self.graph.edge(c.e).weight as u128;
                let wf = self.graph.edge(c.f).weight as u128;
                we * wf
            })
            .sum();
        u64::try_from(total).expect("drawing cost fits in 64 bits")
    }

    /// How many times `e` and `f` cross in this drawing.
    pub fn crossings_between(&self, e: EdgeId, f: EdgeId) -> usize {
        self.seq[e.index()]
            .iter()
            .filter(|&&i| self.crossings[i].other_edge(e) == f)
            .count()
    }

    /// True when the rotation of this drawing matches `rot` at every vertex
    /// up to cyclic shifts. Reversed cycles do not count: a mirror image of
    /// an agreeing drawing does not agree.
    pub fn agrees_with(&self, rot: &RotationSystem) -> bool {
        self.graph
            .vertices()
            .all(|v| cyclic_eq(self.rotation.at(v), rot.at(v)))
    }

    /// Mirror image: every cycle reversed, every orientation bit flipped.
    pub fn reflected(&self) -> Self {
        let mut rotation = self.rotation.clone();
        for cycle in &mut rotation.order {
            cycle.reverse();
        }
        let crossings = self
            .crossings
            .iter()
            .map(|c| CrossingRecord { positive: !c.positive, ..*c })
            .collect();
        CombinatorialDrawing {
            graph: self.graph.clone(),
            rotation,
            crossings,
            seq: self.seq.clone(),
        }
    }

    /// Replaces crossings into degree-four dummy vertices. Original
    /// vertices keep their ids; dummy `i` stands for crossing record `i`.
    pub fn planarize(&self) -> Planarization {
        let g = &self.graph;
        let mut pg = WeightedMultigraph::new();
        for v in g.vertices() {
            pg.add_vertex(g.name(v)).expect("names unique");
        }
        let mut dummy_of = Vec::with_capacity(self.crossings.len());
        for (i, _) in self.crossings.iter().enumerate() {
            let mut name = format!("x{i}");
            while pg.vertex(&name).is_some() {
                name.push('#');
            }
            dummy_of.push(pg.add_vertex(&name).expect("fresh name"));
        }
        let mut record_at = vec![None; pg.vertex_count()];
        for (i, &d) in dummy_of.iter().enumerate() {
            record_at[d.index()] = Some(i);
        }
        let mut seg: Vec<Vec<EdgeId>> = Vec::with_capacity(g.edge_count());
        let mut orig_of = Vec::new();
        for e in g.edge_ids() {
            let w = g.edge(e).weight;
            let mut chain = vec![g.canonical_tail(e)];
            chain.extend(self.seq[e.index()].iter().map(|&i| dummy_of[i]));
            chain.push(g.canonical_head(e));
            let mut segs = Vec::with_capacity(chain.len() - 1);
            for pair in chain.windows(2) {
                let s = pg.add_edge(pair[0], pair[1], w).expect("valid segment");
                segs.push(s);
                orig_of.push(e);
            }
            seg.push(segs);
        }
        // Rotation: originals carry their cycle over segment ids, dummies
        // alternate the two edges with the order picked by the bit.
        let mut order: Vec<Vec<EdgeId>> = Vec::with_capacity(pg.vertex_count());
        for v in g.vertices() {
            let cycle = self
                .rotation
                .at(v)
                .iter()
                .map(|&e| {
                    if g.canonical_tail(e) == v {
                        seg[e.index()][0]
                    } else {
                        *seg[e.index()].last().expect("nonempty chain")
                    }
                })
                .collect();
            order.push(cycle);
        }
        for (i, c) in self.crossings.iter().enumerate() {
            let e_in = seg[c.e.index()][c.pos_e];
            let e_out = seg[c.e.index()][c.pos_e + 1];
            let f_in = seg[c.f.index()][c.pos_f];
            let f_out = seg[c.f.index()][c.pos_f + 1];
            let cycle = if c.positive {
                vec![e_in, f_in, e_out, f_out]
            } else {
                vec![e_in, f_out, e_out, f_in]
            };
            debug_assert_eq!(dummy_of[i].index(), g.vertex_count() + i);
            order.push(cycle);
        }
        let rotation = RotationSystem { order };
        debug_assert!(rotation.validate(&pg).is_ok());
        Planarization { graph: pg, rotation, seg, orig_of, dummy_of, record_at }
    }

    /// A drawing is realizable when its planarization embeds in the plane,
    /// component by component.
    pub fn is_realizable(&self) -> bool {
        let p = self.planarize();
        p.rotation.genus(&p.graph) == 0
    }
}

/// Crossing still to be placed: endpoints refer to the target graph, keys
/// give the order along each edge in a direction the caller chose, and the
/// bit is expressed in those directions with `a` in the first slot.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DraftRecord {
    pub a: EdgeId,
    pub key_a: i64,
    pub b: EdgeId,
    pub key_b: i64,
    pub positive: bool,
}

/// Turns drafts into a drawing. `dir_from_tail[e]` says whether the keys
/// along `e` run from its canonical tail; where they do not, the order is
/// reversed and every bit on that edge flips, which is exactly what
/// re-expressing a crossing against the opposite traversal does.
pub(crate) fn assemble_drawing(
    graph: WeightedMultigraph,
    rotation: RotationSystem,
    drafts: Vec<DraftRecord>,
    dir_from_tail: &[bool],
) -> Result<CombinatorialDrawing> {
    debug_assert_eq!(dir_from_tail.len(), graph.edge_count());
    let mut per_edge: Vec<Vec<(i64, usize)>> = vec![Vec::new(); graph.edge_count()];
    let mut records: Vec<CrossingRecord> = Vec::with_capacity(drafts.len());
    for (i, d) in drafts.iter().enumerate() {
        let flip = |edge: EdgeId, key: i64| if dir_from_tail[edge.index()] { key } else { -key };
        per_edge[d.a.index()].push((flip(d.a, d.key_a), i));
        per_edge[d.b.index()].push((flip(d.b, d.key_b), i));
        let positive =
            d.positive ^ !dir_from_tail[d.a.index()] ^ !dir_from_tail[d.b.index()];
        records.push(CrossingRecord { e: d.a, pos_e: 0, f: d.b, pos_f: 0, positive });
    }
    for (ei, entries) in per_edge.iter_mut().enumerate() {
        entries.sort_unstable();
        debug_assert!(
            entries.windows(2).all(|w| w[0].0 != w[1].0),
            "draft keys on edge {ei} must be distinct"
        );
        for (pos, &(_, i)) in entries.iter().enumerate() {
            let rec = &mut records[i];
            if rec.e.index() == ei {
                rec.pos_e = pos;
            }
            if rec.f.index() == ei {
                rec.pos_f = pos;
            }
        }
    }
    CombinatorialDrawing::new(graph, rotation, records)
}

fn cyclic_eq(a: &[EdgeId], b: &[EdgeId]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let Some(start) = b.iter().position(|&x| x == a[0]) else {
        return false;
    };
    (0..a.len()).all(|i| a[i] == b[(start + i) % b.len()])
}

fn build_sequences(
    graph: &WeightedMultigraph,
    crossings: &[CrossingRecord],
) -> Result<Vec<Vec<usize>>> {
    let m = graph.edge_count();
    let mut per_edge: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (i, c) in crossings.iter().enumerate() {
        if c.e == c.f {
            return Err(Error::BadDrawing(format!(
                "crossing {i} pairs edge {} with itself",
                c.e
            )));
        }
        for (x, pos) in [(c.e, c.pos_e), (c.f, c.pos_f)] {
            if x.index() >= m {
                return Err(Error::BadDrawing(format!("crossing {i} names edge {x}")));
            }
            per_edge[x.index()].push((pos, i));
        }
    }
    let mut seq = Vec::with_capacity(m);
    for (ei, mut entries) in per_edge.into_iter().enumerate() {
        entries.sort_unstable();
        for (want, &(pos, rec)) in entries.iter().enumerate() {
            if pos != want {
                return Err(Error::BadDrawing(format!(
                    "edge {ei} positions are not contiguous: crossing {rec} sits at {pos}, expected {want}"
                )));
            }
        }
        seq.push(entries.into_iter().map(|(_, i)| i).collect());
    }
    Ok(seq)
}

/// Planarized form of a drawing. Vertices below the original count are the
/// original vertices under their own ids.
#[derive(Clone, Debug)]
pub struct Planarization {
    pub graph: WeightedMultigraph,
    pub rotation: RotationSystem,
    /// Original edge to its segments, tail to head.
    pub seg: Vec<Vec<EdgeId>>,
    /// Segment to the original edge it belongs to.
    pub orig_of: Vec<EdgeId>,
    /// Crossing record index to its dummy vertex.
    pub dummy_of: Vec<VertexId>,
    /// Vertex to crossing record index, None for originals.
    pub record_at: Vec<Option<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planarity::planar_embedding;

    fn k4() -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..4).map(|i| g.add_vertex(&format!("v{i}")).unwrap()).collect();
        for i in 0..4 {
            for j in i + 1..4 {
                g.add_edge(vs[i], vs[j], 1).unwrap();
            }
        }
        g
    }

    fn crossing_x(weight_e: u64, weight_f: u64) -> CombinatorialDrawing {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        let d = g.add_vertex("d").unwrap();
        let e = g.add_edge(a, b, weight_e).unwrap();
        let f = g.add_edge(c, d, weight_f).unwrap();
        let rot = RotationSystem::from_incidence(&g);
        let rec = CrossingRecord { e, pos_e: 0, f, pos_f: 0, positive: true };
        CombinatorialDrawing::new(g, rot, vec![rec]).unwrap()
    }

    #[test]
    fn planar_k4_is_realizable_and_free() {
        let g = k4();
        let rot = planar_embedding(&g).unwrap();
        let d = CombinatorialDrawing::planar(g, rot).unwrap();
        assert_eq!(d.cost(), 0);
        assert!(d.is_realizable());
        assert!(d.agrees_with(&d.rotation));
    }

    #[test]
    fn single_crossing_is_realizable() {
        let d = crossing_x(2, 3);
        assert_eq!(d.cost(), 6);
        assert!(d.is_realizable());
        // Both orientation bits describe a plane drawing of a plain X.
        let mut recs = d.crossings().to_vec();
        recs[0].positive = false;
        let d2 = CombinatorialDrawing::new(d.graph.clone(), d.rotation.clone(), recs).unwrap();
        assert!(d2.is_realizable());
    }

    #[test]
    fn isolated_double_crossings_realize_any_bits() {
        // Two otherwise free edges crossing twice planarize into a graph of
        // cycle rank one, whose maximum genus is zero: with nothing pinning
        // the ends down, every bit pattern and either meeting order can be
        // drawn, looping around an endpoint where needed.
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        let d = g.add_vertex("d").unwrap();
        let e = g.add_edge(a, b, 1).unwrap();
        let f = g.add_edge(c, d, 5).unwrap();
        let rot = RotationSystem::from_incidence(&g);
        for flip in [false, true] {
            for bits in 0..4u32 {
                let (p0, p1) = if flip { (1, 0) } else { (0, 1) };
                let recs = vec![
                    CrossingRecord { e, pos_e: 0, f, pos_f: p0, positive: bits & 1 != 0 },
                    CrossingRecord { e, pos_e: 1, f, pos_f: p1, positive: bits & 2 != 0 },
                ];
                let dr = CombinatorialDrawing::new(g.clone(), rot.clone(), recs).unwrap();
                assert_eq!(dr.cost(), 10);
                assert_eq!(dr.crossings_between(e, f), 2);
                assert!(dr.is_realizable());
            }
        }
    }

    #[test]
    fn square_with_diagonals_pins_the_bit() {
        // A four-cycle drawn as a square with both diagonals crossing once
        // in the middle. The cycle fixes the rotation at all four corners,
        // and then only one orientation of the crossing closes up in the
        // plane; the flipped bit forces a torus.
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
        rot.validate(&g).unwrap();
        let verdicts: Vec<bool> = [true, false]
            .iter()
            .map(|&positive| {
                let recs = vec![CrossingRecord { e, pos_e: 0, f, pos_f: 0, positive }];
                CombinatorialDrawing::new(g.clone(), rot.clone(), recs)
                    .unwrap()
                    .is_realizable()
            })
            .collect();
        assert_eq!(verdicts.iter().filter(|&&v| v).count(), 1);
    }

    #[test]
    fn validation_rejects_broken_sequences() {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        let d = g.add_vertex("d").unwrap();
        let e = g.add_edge(a, b, 1).unwrap();
        let f = g.add_edge(c, d, 1).unwrap();
        let rot = RotationSystem::from_incidence(&g);
        // Gap: a single crossing sitting at position 1.
        let gap = vec![CrossingRecord { e, pos_e: 1, f, pos_f: 0, positive: true }];
        assert!(CombinatorialDrawing::new(g.clone(), rot.clone(), gap).is_err());
        // Self pairing.
        let selfish = vec![CrossingRecord { e, pos_e: 0, f: e, pos_f: 1, positive: true }];
        assert!(CombinatorialDrawing::new(g.clone(), rot.clone(), selfish).is_err());
        // Two crossings claiming the same slot.
        let clash = vec![
            CrossingRecord { e, pos_e: 0, f, pos_f: 0, positive: true },
            CrossingRecord { e, pos_e: 0, f, pos_f: 1, positive: true },
        ];
        assert!(CombinatorialDrawing::new(g, rot, clash).is_err());
    }

    #[test]
    fn reflection_flips_agreement() {
        let g = k4();
        let rot = planar_embedding(&g).unwrap();
        let d = CombinatorialDrawing::planar(g, rot).unwrap();
        let m = d.reflected();
        assert!(m.is_realizable());
        assert!(!m.agrees_with(&d.rotation));
        assert!(m.reflected().agrees_with(&d.rotation));
    }

    #[test]
    fn planarization_maps_line_up() {
        let d = crossing_x(1, 1);
        let p = d.planarize();
        assert_eq!(p.graph.vertex_count(), 5);
        assert_eq!(p.graph.edge_count(), 4);
        assert_eq!(p.seg[0].len(), 2);
        assert_eq!(p.seg[1].len(), 2);
        assert_eq!(p.record_at[4], Some(0));
        assert_eq!(p.record_at[0], None);
        for s in p.graph.edge_ids() {
            let orig = p.orig_of[s.index()];
            assert!(p.seg[orig.index()].contains(&s));
        }
    }
}
