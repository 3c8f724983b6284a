//! Constructions that turn a three-terminal cut instance into crossing
//! minimization problems.
//!
//! The chain has three stops. `attach_frame` glues a fixed ten-vertex frame
//! onto the terminals of the instance, producing a weighted graph with a
//! constrained rotation whose cheapest drawings encode cheap cuts.
//! `expand_parallel` trades edge weights for bundles of parallel unit
//! strands without changing any crossing value. `cubify` then replaces
//! every vertex by a patch of cubic grid, giving a 3-regular graph whose
//! unconstrained crossing number is no larger. Every step records enough
//! provenance to walk answers back to the source instance.

use crate::drawing::{CombinatorialDrawing, CrossingRecord};
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::planarity;
use crate::rotation::{Dart, RotationSystem};
use crate::solver::mwc::MultiwayInstance;
use crate::{Error, Result};

/// Scale knobs for the reduction. `for_vertex_count` picks weights strong
/// enough for the approximation guarantees; tests use smaller values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduceParams {
    pub frame_weight: u64,
    pub grid_height: u64,
}

impl ReduceParams {
    /// Defaults for an instance with `n` vertices: frame edges weigh n^5
    /// and grids are 4n^7 tall.
    pub fn for_vertex_count(n: usize) -> Result<Self> {
        let n = n as u64;
        let pow5 = n
            .checked_pow(5)
            .ok_or_else(|| Error::TooLarge("n^5 overflows".into()))?;
        let pow7 = n
            .checked_pow(7)
            .and_then(|p| p.checked_mul(4))
            .ok_or_else(|| Error::TooLarge("4n^7 overflows".into()))?;
        Ok(ReduceParams { frame_weight: pow5.max(1), grid_height: pow7.max(2) })
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_weight == 0 {
            return Err(Error::BadInstance("frame weight must be positive".into()));
        }
        if self.grid_height < 2 || self.grid_height % 2 != 0 {
            return Err(Error::BadInstance("grid height must be even and at least 2".into()));
        }
        Ok(())
    }
}

/// The fixed frame that surrounds an instance. Three ports of degree two
/// sit where the terminals will be identified; each port is fenced off
/// from the other two by a five-edge ring. Unit weights here; the frame
/// is reweighted when attached.
#[derive(Clone, Debug)]
pub struct TerminalFrame {
    pub graph: WeightedMultigraph,
    pub rotation: RotationSystem,
    pub ports: [VertexId; 3],
    pub hub: VertexId,
    pub rings: [[EdgeId; 5]; 3],
}

fn edge_between(g: &WeightedMultigraph, u: VertexId, v: VertexId) -> EdgeId {
    *g.incident_edges(u)
        .iter()
        .find(|&&e| g.edge(e).other(u) == v)
        .expect("endpoints are adjacent")
}

/// Builds the frame and its canonical embedding.
///
/// Around a central hub sit three arms a1, a2, a3, each tied to the hub,
/// to a rim vertex b_i, and to the two ports other than its own. The rim
/// triangle b1 b2 b3 closes the outside. Port i keeps only its two arm
/// edges, so each port sits in a pocket of the embedding, and the ring
/// hub-a_{i-1}-b_{i-1}-b_{i+1}-a_{i+1} separates that pocket (port
/// included) from the rest of the frame.
pub fn build_frame() -> TerminalFrame {
    let mut g = WeightedMultigraph::new();
    let mut a = [VertexId(0); 3];
    let mut b = [VertexId(0); 3];
    let mut x = [VertexId(0); 3];
    for i in 0..3 {
        a[i] = g.add_vertex(&format!("a{}", i + 1)).expect("fresh");
        b[i] = g.add_vertex(&format!("b{}", i + 1)).expect("fresh");
        x[i] = g.add_vertex(&format!("x{}", i + 1)).expect("fresh");
    }
    let hub = g.add_vertex("a4").expect("fresh");
    for i in 0..3 {
        g.add_edge(a[i], b[i], 1).expect("simple");
        g.add_edge(a[i], hub, 1).expect("simple");
        g.add_edge(b[i], b[(i + 1) % 3], 1).expect("simple");
        g.add_edge(a[i], x[(i + 1) % 3], 1).expect("simple");
        g.add_edge(a[i], x[(i + 2) % 3], 1).expect("simple");
    }
    let mut rotation = planarity::planar_embedding(&g).expect("frame is planar");
    // Fix the chirality: the three hub spokes come in arm order. The
    // frame subdivides a 3-connected graph, so this pins the embedding.
    let spokes: Vec<EdgeId> = (0..3).map(|i| edge_between(&g, a[i], hub)).collect();
    let at_hub = rotation.at(hub);
    let start = at_hub.iter().position(|&e| e == spokes[0]).expect("spoke");
    if at_hub[(start + 1) % 3] != spokes[1] {
        for row in &mut rotation.order {
            row.reverse();
        }
    }
    let mut rings = [[EdgeId(0); 5]; 3];
    for i in 0..3 {
        let prev = (i + 2) % 3;
        let next = (i + 1) % 3;
        rings[i] = [
            edge_between(&g, hub, a[prev]),
            edge_between(&g, a[prev], b[prev]),
            edge_between(&g, b[prev], b[next]),
            edge_between(&g, b[next], a[next]),
            edge_between(&g, a[next], hub),
        ];
    }
    debug_assert_eq!(g.vertex_count(), 10);
    debug_assert_eq!(g.edge_count(), 15);
    debug_assert_eq!(rotation.genus(&g), 0);
    TerminalFrame { graph: g, rotation, ports: [x[0], x[1], x[2]], hub, rings }
}

/// A source instance with the frame welded onto its terminals.
///
/// The source graph keeps its vertex and edge ids; frame parts follow
/// them, with frame edge `i` stored at id `source_edges + i`. Terminal
/// `i` absorbs port `i`, so `frame_vertices` maps frame vertex ids into
/// the combined graph.
#[derive(Clone, Debug)]
pub struct Anchored {
    pub graph: WeightedMultigraph,
    pub rotation: RotationSystem,
    pub terminals: [VertexId; 3],
    pub frame: TerminalFrame,
    pub frame_vertices: [VertexId; 10],
    pub frame_edges: [EdgeId; 15],
    pub rings: [[EdgeId; 5]; 3],
    pub frame_weight: u64,
    pub source_edges: usize,
}

impl Anchored {
    pub fn is_frame_edge(&self, e: EdgeId) -> bool {
        e.index() >= self.source_edges
    }

    /// The source edges, which keep their ids in the combined graph.
    pub fn source_edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.source_edges as u32).map(EdgeId)
    }
}

/// Welds the frame onto the instance: terminals take the ports' places,
/// frame edges get `params.frame_weight`, and the rotation embeds the
/// frame canonically with each terminal's source edges fanning into its
/// pocket, ordered by edge id.
pub fn attach_frame(inst: &MultiwayInstance, params: &ReduceParams) -> Result<Anchored> {
    params.validate()?;
    let g = &inst.graph;
    if g.edges().iter().any(|e| e.weight != 1) {
        return Err(Error::BadInstance(
            "frame attachment needs unit source weights; expand first".into(),
        ));
    }
    let frame = build_frame();
    let mut h = WeightedMultigraph::new();
    for v in g.vertices() {
        h.add_vertex(g.name(v))?;
    }
    for e in g.edges() {
        h.add_edge(e.u, e.v, e.weight)?;
    }
    let source_edges = g.edge_count();

    let mut frame_vertices = [VertexId(0); 10];
    for (i, &p) in frame.ports.iter().enumerate() {
        frame_vertices[p.index()] = inst.terminals[i];
    }
    for fv in frame.graph.vertices() {
        if frame.ports.contains(&fv) {
            continue;
        }
        let mut name = frame.graph.name(fv).to_string();
        while h.vertex(&name).is_some() {
            name.push('+');
        }
        frame_vertices[fv.index()] = h.add_vertex(&name)?;
    }
    let mut frame_edges = [EdgeId(0); 15];
    for (i, e) in frame.graph.edges().iter().enumerate() {
        frame_edges[i] = h.add_edge(
            frame_vertices[e.u.index()],
            frame_vertices[e.v.index()],
            params.frame_weight,
        )?;
    }
    let mut rings = [[EdgeId(0); 5]; 3];
    for i in 0..3 {
        for j in 0..5 {
            rings[i][j] = frame_edges[frame.rings[i][j].index()];
        }
    }

    let faces = frame.rotation.trace_faces(&frame.graph);
    let mut rows: Vec<Vec<EdgeId>> = vec![Vec::new(); h.vertex_count()];
    for v in g.vertices() {
        if !inst.terminals.contains(&v) {
            rows[v.index()] = h.incident_edges(v).to_vec();
        }
    }
    for fv in frame.graph.vertices() {
        if frame.ports.contains(&fv) {
            continue;
        }
        rows[frame_vertices[fv.index()].index()] = frame
            .rotation
            .at(fv)
            .iter()
            .map(|&fe| frame_edges[fe.index()])
            .collect();
    }
    for i in 0..3 {
        let port = frame.ports[i];
        let t = inst.terminals[i];
        let pa = frame.rotation.at(port)[0];
        let pb = frame.rotation.at(port)[1];
        // The pocket is the port's incident face that avoids the hub;
        // the source edges must fan out into it.
        let corner_ab = faces.face_of(Dart { from: port, edge: pb }, &frame.graph);
        let pocket_is_ab = !faces.faces[corner_ab].iter().any(|d| d.from == frame.hub);
        let (first, last) = if pocket_is_ab { (pa, pb) } else { (pb, pa) };
        let mut row = vec![frame_edges[first.index()]];
        row.extend(
            h.incident_edges(t)
                .iter()
                .copied()
                .filter(|e| e.index() < source_edges),
        );
        row.push(frame_edges[last.index()]);
        rows[t.index()] = row;
    }
    let rotation = RotationSystem { order: rows };
    debug_assert!(rotation.validate(&h).is_ok());
    let out = Anchored {
        graph: h,
        rotation,
        terminals: inst.terminals,
        frame,
        frame_vertices,
        frame_edges,
        rings,
        frame_weight: params.frame_weight,
        source_edges,
    };
    debug_assert!(respects_frame(&out));
    Ok(out)
}

fn cyclic_eq(a: &[EdgeId], b: &[EdgeId]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|s| (0..a.len()).all(|i| a[(s + i) % a.len()] == b[i]))
}

/// Whether the stored rotation still embeds the frame canonically: the
/// frame rows match the frame's own embedding (one global mirror image
/// allowed), and at each terminal the two frame ends stay next to each
/// other, keeping the source edges in one contiguous fan.
pub fn respects_frame(art: &Anchored) -> bool {
    let frame = &art.frame;
    let to_h = |row: &[EdgeId]| -> Vec<EdgeId> {
        row.iter().map(|&fe| art.frame_edges[fe.index()]).collect()
    };
    let frame_edge_set: std::collections::BTreeSet<EdgeId> =
        art.frame_edges.iter().copied().collect();
    for mirror in [false, true] {
        let mut all = true;
        for fv in frame.graph.vertices() {
            if frame.ports.contains(&fv) {
                continue;
            }
            let mut want = to_h(frame.rotation.at(fv));
            if mirror {
                want.reverse();
            }
            let have: Vec<EdgeId> = art
                .rotation
                .at(art.frame_vertices[fv.index()])
                .iter()
                .copied()
                .filter(|e| frame_edge_set.contains(e))
                .collect();
            if !cyclic_eq(&want, &have) {
                all = false;
                break;
            }
        }
        if all {
            // Terminals: both frame ends present and cyclically adjacent.
            return art.terminals.iter().all(|&t| {
                let row = art.rotation.at(t);
                let spots: Vec<usize> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| frame_edge_set.contains(e))
                    .map(|(i, _)| i)
                    .collect();
                spots.len() == 2
                    && ((spots[1] - spots[0]) == 1 || (spots[0] == 0 && spots[1] == row.len() - 1))
            });
        }
    }
    false
}

/// One parallel strand standing in for a unit of edge weight: a path of
/// two unit edges through a fresh midpoint. `tail_half` is the piece at
/// the source edge's canonical tail.
#[derive(Clone, Copy, Debug)]
pub struct Strand {
    pub midpoint: VertexId,
    pub tail_half: EdgeId,
    pub head_half: EdgeId,
}

/// A weight-free copy of a graph: edge `e` of weight w becomes
/// `strands[e]`, w parallel two-edge paths. Source vertices keep ids.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub source: WeightedMultigraph,
    pub graph: WeightedMultigraph,
    pub strands: Vec<Vec<Strand>>,
}

/// Replaces each weighted edge by that many parallel unit strands.
pub fn expand_parallel(g: &WeightedMultigraph) -> Expansion {
    let mut out = WeightedMultigraph::new();
    for v in g.vertices() {
        out.add_vertex(g.name(v)).expect("copied names stay unique");
    }
    let mut strands = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let tail = g.canonical_tail(e);
        let head = g.canonical_head(e);
        let mut family = Vec::new();
        for k in 0..g.edge(e).weight {
            let mut name = format!("m{}.{}", e.index(), k);
            while out.vertex(&name).is_some() {
                name.push('+');
            }
            let midpoint = out.add_vertex(&name).expect("fresh");
            let tail_half = out.add_edge(tail, midpoint, 1).expect("fresh vertex");
            let head_half = out.add_edge(midpoint, head, 1).expect("fresh vertex");
            family.push(Strand { midpoint, tail_half, head_half });
        }
        strands.push(family);
    }
    Expansion { source: g.clone(), graph: out, strands }
}

/// Carries a rotation of the source graph over to its expansion: at each
/// endpoint a strand fan replaces its edge's slot, in family order at the
/// canonical tail and reversed at the head. The opposite orders make the
/// fan an untwisted ribbon, so bundles can nest without crossing and every
/// crossing value is preserved exactly.
pub fn expand_rotation(
    g: &WeightedMultigraph,
    rot: &RotationSystem,
    exp: &Expansion,
) -> Result<RotationSystem> {
    rot.validate(g)?;
    let mut rows: Vec<Vec<EdgeId>> = vec![Vec::new(); exp.graph.vertex_count()];
    for v in g.vertices() {
        let mut row = Vec::new();
        for &e in rot.at(v) {
            let family = &exp.strands[e.index()];
            if v == g.canonical_tail(e) {
                row.extend(family.iter().map(|s| s.tail_half));
            } else {
                row.extend(family.iter().rev().map(|s| s.head_half));
            }
        }
        rows[v.index()] = row;
    }
    for family in &exp.strands {
        for s in family {
            rows[s.midpoint.index()] = vec![s.tail_half, s.head_half];
        }
    }
    let out = RotationSystem { order: rows };
    debug_assert!(out.validate(&exp.graph).is_ok());
    Ok(out)
}

/// Carries a whole drawing over to the expansion, at equal cost.
///
/// Each crossing of e and f becomes a w_e x w_f grid of unit crossings
/// between their ribbons. Walking a strand of e from the source tail, f's
/// strands appear in reverse family order at a positive crossing and in
/// family order at a negative one (and the other way around along f);
/// that is how two flat ribbons pass through each other. All the small
/// crossings sit on tail halves, with signs flipped wherever a half's own
/// canonical orientation runs against its source edge.
pub fn expand_drawing(d: &CombinatorialDrawing, exp: &Expansion) -> Result<CombinatorialDrawing> {
    let g = &exp.source;
    let sg = &d.graph;
    let same = sg.vertex_count() == g.vertex_count()
        && sg.edge_count() == g.edge_count()
        && g.vertices().all(|v| g.name(v) == sg.name(v))
        && g.edge_ids().all(|e| {
            let (a, b) = (g.edge(e), sg.edge(e));
            a.u == b.u && a.v == b.v && a.weight == b.weight
        });
    if !same {
        return Err(Error::BadInstance("drawing is for a different graph".into()));
    }
    let rotation = expand_rotation(g, &d.rotation, exp)?;
    let crossings = d.crossings();
    let weight = |e: EdgeId| g.edge(e).weight as usize;

    // Walk offset of each source crossing along its two edges: how many
    // unit crossings a strand collects before reaching it.
    let mut base = vec![(0usize, 0usize); crossings.len()];
    let mut walk_len: Vec<usize> = vec![0; g.edge_count()];
    for e in g.edge_ids() {
        let mut acc = 0usize;
        for &ri in d.sequence(e) {
            if crossings[ri].e == e {
                base[ri].0 = acc;
            } else {
                base[ri].1 = acc;
            }
            acc += weight(crossings[ri].other_edge(e));
        }
        walk_len[e.index()] = acc;
    }

    // A half runs backwards when its canonical tail is the midpoint.
    let mut backwards = vec![false; exp.graph.edge_count()];
    for family in &exp.strands {
        for s in family {
            backwards[s.tail_half.index()] =
                exp.graph.canonical_tail(s.tail_half) == s.midpoint;
        }
    }
    let position = |e: EdgeId, half: EdgeId, walk_index: usize| -> usize {
        if backwards[half.index()] {
            walk_len[e.index()] - 1 - walk_index
        } else {
            walk_index
        }
    };

    let mut records = Vec::new();
    for (ri, rec) in crossings.iter().enumerate() {
        let (we, wf) = (weight(rec.e), weight(rec.f));
        for j in 0..we {
            for k in 0..wf {
                // Positive: e-strands meet f's family back to front while
                // f-strands meet e's front to back; negative swaps that.
                let off_e = if rec.positive { wf - 1 - k } else { k };
                let off_f = if rec.positive { j } else { we - 1 - j };
                let a = exp.strands[rec.e.index()][j].tail_half;
                let b = exp.strands[rec.f.index()][k].tail_half;
                // Flips: each half running against its source edge, and
                // the role swap when f's strand takes the first slot.
                let positive =
                    rec.positive ^ backwards[a.index()] ^ backwards[b.index()] ^ (b < a);
                let mut sides = [
                    (a, rec.e, base[ri].0 + off_e),
                    (b, rec.f, base[ri].1 + off_f),
                ];
                sides.sort_by_key(|&(half, _, _)| half);
                records.push(CrossingRecord {
                    e: sides[0].0,
                    pos_e: position(sides[0].1, sides[0].0, sides[0].2),
                    f: sides[1].0,
                    pos_f: position(sides[1].1, sides[1].0, sides[1].2),
                    positive,
                });
            }
        }
    }
    let out = CombinatorialDrawing::new(exp.graph.clone(), rotation, records)?;
    debug_assert_eq!(out.cost(), d.cost());
    debug_assert!(out.is_realizable() || !d.is_realizable());
    Ok(out)
}

/// Max-degree-three rectangular grid: `2d` columns and `h` rows with every
/// horizontal rail, keeping the vertical edge above column i in row j only
/// when i + j is even. Interior vertices come out exactly 3-regular.
pub fn build_cubic_grid(d: u64, h: u64) -> Result<WeightedMultigraph> {
    if d < 1 || h < 2 {
        return Err(Error::BadInstance(
            "a cubic grid needs width at least one and height at least two".into(),
        ));
    }
    let (w, h) = (2 * d as usize, h as usize);
    let mut g = WeightedMultigraph::new();
    let mut vid = vec![vec![VertexId(0); h]; w];
    for i in 0..w {
        for j in 0..h {
            vid[i][j] = g.add_vertex(&format!("{i},{j}"))?;
        }
    }
    for j in 0..h {
        for i in 0..w - 1 {
            g.add_edge(vid[i][j], vid[i + 1][j], 1)?;
        }
    }
    for j in 0..h - 1 {
        for i in 0..w {
            if (i + j) % 2 == 0 {
                g.add_edge(vid[i][j], vid[i][j + 1], 1)?;
            }
        }
    }
    Ok(g)
}

/// The cubic stage. Every source vertex owns a patch of cubic grid, the
/// source edges run between patch tops, and boundary cleanup has eroded
/// everything below degree three.
pub struct Cubified {
    pub source: WeightedMultigraph,
    pub source_rotation: RotationSystem,
    /// The 3-regular result.
    pub graph: WeightedMultigraph,
    /// Rows drawing every patch flat, with attachments leaving each patch
    /// in source rotation order.
    pub rows: RotationSystem,
    /// Edge of `graph` carrying each source edge. Source edges that meet at
    /// a degree-two vertex share a carrier, since the narrow patch between
    /// them erodes away; `None` marks a pendant piece erosion took whole.
    pub carries: Vec<Option<EdgeId>>,
    /// Source edges laid along each edge of `graph`, walking from its
    /// stored tail; the flag marks a piece walked against its own tail.
    pub spans: Vec<Vec<(EdgeId, bool)>>,
    /// Source vertex whose patch owns each vertex of `graph`.
    pub owner: Vec<VertexId>,
    /// Fused grid vertices and the edge their two sides joined into.
    pub fused: Vec<(String, EdgeId)>,
    /// Grid vertices erased outright.
    pub dropped: Vec<String>,
}

/// Replace every vertex of a unit-weight graph by a cubic grid patch, wide
/// enough for its degree, and run the edges between patch tops in rotation
/// order. Degree-one leftovers are removed and degree-two vertices fused
/// until the result is 3-regular. The narrow patches of degree-one and
/// degree-two source vertices erode away entirely in the process: pendant
/// parts of the source vanish with them, a degree-two source vertex turns
/// into a plain bend with its two edges fused onto one carrier, and
/// isolated vertices get no patch at all.
///
/// The patch for a degree-d vertex is `build_cubic_grid(d, grid_height)`.
/// With the height even, its top row has exactly d degree-two vertices
/// (column 0 and the interior odd columns), and those take the d edge
/// ends, left to right in rotation order. Each patch is drawn mirrored, so
/// that walking the patch boundary counterclockwise meets the attachments
/// in exactly the source rotation order; `rows` records that embedding.
pub fn cubify(g: &WeightedMultigraph, rot: &RotationSystem, grid_height: u64) -> Result<Cubified> {
    rot.validate(g)?;
    if g.edge_ids().any(|e| g.edge(e).weight != 1) {
        return Err(Error::BadInstance("cubifying needs unit weights; expand first".into()));
    }
    if grid_height < 2 || grid_height % 2 != 0 {
        return Err(Error::BadInstance("grid height must be even, at least two".into()));
    }
    let h = grid_height as usize;

    // Patches first, as raw soup: names, owners, rotation rows of soup
    // edge ids. Rows follow the clockwise compass order east, south, west,
    // north, which is the mirrored embedding; attachments later take the
    // north slot at the top row.
    let mut names: Vec<String> = Vec::new();
    let mut owner_pre: Vec<VertexId> = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut ends: Vec<(usize, usize)> = Vec::new();
    let mut pieces: Vec<Vec<(usize, bool)>> = Vec::new();
    let mut attach_at: Vec<Vec<usize>> = vec![Vec::new(); g.edge_count()];
    for v in g.vertices() {
        let deg = g.degree(v);
        if deg == 0 {
            continue;
        }
        let w = 2 * deg;
        let base = names.len();
        let vid = |i: usize, j: usize| base + i * h + j;
        for i in 0..w {
            for j in 0..h {
                names.push(format!("{}~{},{}", g.name(v), i, j));
                owner_pre.push(v);
                rows.push(Vec::new());
            }
        }
        let mut horiz = vec![vec![usize::MAX; h]; w];
        let mut vert = vec![vec![usize::MAX; h]; w];
        for j in 0..h {
            for i in 0..w - 1 {
                horiz[i][j] = ends.len();
                ends.push((vid(i, j), vid(i + 1, j)));
                pieces.push(Vec::new());
            }
        }
        for j in 0..h - 1 {
            for i in 0..w {
                if (i + j) % 2 == 0 {
                    vert[i][j] = ends.len();
                    ends.push((vid(i, j), vid(i, j + 1)));
                    pieces.push(Vec::new());
                }
            }
        }
        for i in 0..w {
            for j in 0..h {
                let row = &mut rows[vid(i, j)];
                if i + 1 < w && horiz[i][j] != usize::MAX {
                    row.push(horiz[i][j]); // east
                }
                if j > 0 && vert[i][j - 1] != usize::MAX {
                    row.push(vert[i][j - 1]); // south
                }
                if i > 0 && horiz[i - 1][j] != usize::MAX {
                    row.push(horiz[i - 1][j]); // west
                }
                if j + 1 < h && vert[i][j] != usize::MAX {
                    row.push(vert[i][j]); // north
                }
            }
        }
        // top-row degree-two columns, left to right: 0, 1, 3, ..., 2d-3
        let slot = |k: usize| vid(if k == 0 { 0 } else { 2 * k - 1 }, h - 1);
        for (k, &e) in rot.at(v).iter().enumerate() {
            attach_at[e.index()].push(slot(k));
        }
    }
    for e in g.edge_ids() {
        let at = &attach_at[e.index()];
        debug_assert_eq!(at.len(), 2);
        // at[0] sits in the patch of the endpoint with the smaller id,
        // since that patch was laid down first
        let [eu, ev] = g.edge(e).ends();
        let first = if eu.index() <= ev.index() { eu } else { ev };
        let id = ends.len();
        ends.push((at[0], at[1]));
        pieces.push(vec![(e.index(), g.canonical_tail(e) != first)]);
        rows[at[0]].push(id); // the north slot of each patch top
        rows[at[1]].push(id);
    }

    // Cleanup to 3-regular: drop what falls to degree one or lower, fuse
    // degree two in place so every surviving row keeps its cyclic order,
    // and thin parallel pairs back down to single edges. Narrow patches
    // erode away entirely here; the attachments of a degree-two source
    // vertex then fuse into one edge carrying both source pieces.
    let mut ealive = vec![true; ends.len()];
    let mut valive = vec![true; names.len()];
    let mut parent: Vec<usize> = (0..ends.len()).collect();
    let mut fused_log: Vec<(usize, usize)> = Vec::new();
    let mut dropped_log: Vec<usize> = Vec::new();
    let mut queue: std::collections::BTreeSet<usize> = (0..names.len()).collect();
    let other = |ends: &Vec<(usize, usize)>, s: usize, v: usize| {
        let (a, b) = ends[s];
        if a == v {
            b
        } else {
            a
        }
    };
    // pieces of s read while walking from `from`
    let orient = |ps: &[(usize, bool)], stored: (usize, usize), from: usize| -> Vec<(usize, bool)> {
        if stored.0 == from {
            ps.to_vec()
        } else {
            ps.iter().rev().map(|&(e, r)| (e, !r)).collect()
        }
    };
    loop {
        while let Some(&v) = queue.iter().next() {
            queue.remove(&v);
            if !valive[v] {
                continue;
            }
            match rows[v].len() {
                0 => {
                    valive[v] = false;
                    dropped_log.push(v);
                }
                1 => {
                    let s = rows[v][0];
                    let o = other(&ends, s, v);
                    ealive[s] = false;
                    rows[o].retain(|&x| x != s);
                    queue.insert(o);
                    valive[v] = false;
                    rows[v].clear();
                    dropped_log.push(v);
                }
                2 => {
                    let (p, q) = (rows[v][0], rows[v][1]);
                    let a = other(&ends, p, v);
                    let b = other(&ends, q, v);
                    if a == b {
                        // a two-gon balloon: both edges go with the vertex
                        ealive[p] = false;
                        ealive[q] = false;
                        rows[a].retain(|&x| x != p && x != q);
                        queue.insert(a);
                        valive[v] = false;
                        rows[v].clear();
                        dropped_log.push(v);
                    } else {
                        let mut np = orient(&pieces[p], ends[p], a);
                        np.extend(orient(&pieces[q], ends[q], v));
                        let ni = ends.len();
                        ends.push((a, b));
                        pieces.push(np);
                        ealive.push(true);
                        parent.push(ni);
                        parent[p] = ni;
                        parent[q] = ni;
                        let ia = rows[a].iter().position(|&x| x == p).expect("incident");
                        rows[a][ia] = ni;
                        let ib = rows[b].iter().position(|&x| x == q).expect("incident");
                        rows[b][ib] = ni;
                        ealive[p] = false;
                        ealive[q] = false;
                        valive[v] = false;
                        rows[v].clear();
                        fused_log.push((v, ni));
                    }
                }
                _ => {}
            }
        }
        // Degrees all sit at three or above now. A parallel pair can still
        // be left where a boundary path collapsed onto a grid edge; the
        // copy without source pieces is redundant, and removing it hands
        // its endpoints back to the queue.
        let mut by_ends: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            std::collections::BTreeMap::new();
        for (i, &(a, b)) in ends.iter().enumerate() {
            if ealive[i] {
                by_ends.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        let Some(group) = by_ends.values().find(|v| v.len() > 1) else {
            break;
        };
        let Some(dead) = group.iter().copied().find(|&i| pieces[i].is_empty()) else {
            return Err(Error::BadInstance(format!(
                "grid height {grid_height} is too small: cleanup ran two carried edges parallel"
            )));
        };
        ealive[dead] = false;
        let (a, b) = ends[dead];
        rows[a].retain(|&x| x != dead);
        rows[b].retain(|&x| x != dead);
        queue.insert(a);
        queue.insert(b);
    }

    let mut graph = WeightedMultigraph::new();
    let mut final_v: Vec<Option<VertexId>> = vec![None; names.len()];
    let mut owner = Vec::new();
    for i in 0..names.len() {
        if valive[i] {
            final_v[i] = Some(graph.add_vertex(&names[i]).expect("patch names are unique"));
            owner.push(owner_pre[i]);
        }
    }
    let mut final_e: Vec<Option<EdgeId>> = vec![None; ends.len()];
    let mut carries: Vec<Option<EdgeId>> = vec![None; g.edge_count()];
    let mut spans: Vec<Vec<(EdgeId, bool)>> = Vec::new();
    for (i, &(a, b)) in ends.iter().enumerate() {
        if ealive[i] {
            let id = graph
                .add_edge(final_v[a].expect("live"), final_v[b].expect("live"), 1)
                .expect("fused edges are never loops");
            final_e[i] = Some(id);
            for &(e, _) in &pieces[i] {
                debug_assert!(carries[e].is_none());
                carries[e] = Some(id);
            }
            spans.push(pieces[i].iter().map(|&(e, r)| (EdgeId(e as u32), r)).collect());
        }
    }
    let order: Vec<Vec<EdgeId>> = (0..names.len())
        .filter(|&i| valive[i])
        .map(|i| rows[i].iter().map(|&s| final_e[s].expect("live rows hold live edges")).collect())
        .collect();
    let rows = RotationSystem { order };

    let mut fused = Vec::new();
    let mut dropped: Vec<String> = dropped_log.iter().map(|&v| names[v].clone()).collect();
    for (v, mut s) in fused_log {
        while parent[s] != s {
            s = parent[s];
        }
        match final_e[s] {
            Some(id) => fused.push((names[v].clone(), id)),
            None => dropped.push(names[v].clone()),
        }
    }

    if graph.vertex_count() == 0 {
        return Err(Error::BadInstance(
            "grid height too small or source all pendant: nothing is left after cleanup".into(),
        ));
    }
    if !graph.connected_without(&[]) {
        return Err(Error::BadInstance(format!(
            "grid height {grid_height} is too small: cleanup left the cubic graph disconnected"
        )));
    }
    let mut pairs: Vec<(VertexId, VertexId)> = graph
        .edge_ids()
        .map(|e| {
            let ed = graph.edge(e);
            (ed.u.min(ed.v), ed.u.max(ed.v))
        })
        .collect();
    pairs.sort_unstable();
    if pairs.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::BadInstance(format!(
            "grid height {grid_height} is too small: cleanup left parallel edges"
        )));
    }
    if let Some(v) = graph.vertices().find(|&v| graph.degree(v) != 3) {
        return Err(Error::BadInstance(format!(
            "grid height {grid_height} is too small: {} has degree {}",
            graph.name(v),
            graph.degree(v)
        )));
    }
    rows.validate(&graph)?;
    Ok(Cubified {
        source: g.clone(),
        source_rotation: rot.clone(),
        graph,
        rows,
        carries,
        spans,
        owner,
        fused,
        dropped,
    })
}

/// Carry a drawing of the source over to the cubic graph at equal cost.
/// Patches are drawn flat by `rows`; every source crossing lands on the
/// carrying edge, at the spot its piece occupies along that edge, with
/// position and sign flipped wherever the carrying edge's canonical
/// orientation runs against the piece.
pub fn transfer_drawing(d: &CombinatorialDrawing, cub: &Cubified) -> Result<CombinatorialDrawing> {
    let g = &cub.source;
    let sg = &d.graph;
    let same = sg.vertex_count() == g.vertex_count()
        && sg.edge_count() == g.edge_count()
        && g.vertices().all(|v| g.name(v) == sg.name(v))
        && g.edge_ids().all(|e| {
            let (a, b) = (g.edge(e), sg.edge(e));
            a.u == b.u && a.v == b.v && a.weight == b.weight
        });
    if !same {
        return Err(Error::BadInstance("drawing is for a different graph".into()));
    }
    if !d.agrees_with(&cub.source_rotation) {
        return Err(Error::BadInstance(
            "the drawing must follow the rotation the cubic graph was built around".into(),
        ));
    }
    // Each carried source edge gets a station on its carrier: the offset
    // of its crossing block walking from the carrier's canonical tail,
    // and whether the walk runs against the source edge.
    let mut place: Vec<Option<(EdgeId, usize, bool)>> = vec![None; g.edge_count()];
    for t in cub.graph.edge_ids() {
        let ed = cub.graph.edge(t);
        let rev_t = cub.graph.canonical_tail(t) != ed.u;
        let walk: Vec<(EdgeId, bool)> = if rev_t {
            cub.spans[t.index()].iter().rev().map(|&(e, r)| (e, !r)).collect()
        } else {
            cub.spans[t.index()].clone()
        };
        let mut off = 0;
        for (e, r) in walk {
            place[e.index()] = Some((t, off, r));
            off += d.sequence(e).len();
        }
    }
    let mut records = Vec::new();
    for rec in d.crossings() {
        let dropped = || Error::BadInstance("the drawing crosses an edge the cubic graph dropped".into());
        let (te, oe, re) = place[rec.e.index()].ok_or_else(dropped)?;
        let (tf, of, rf) = place[rec.f.index()].ok_or_else(dropped)?;
        if te == tf {
            return Err(Error::BadInstance(
                "the drawing crosses two source edges that fused into one cubic edge".into(),
            ));
        }
        let le = d.sequence(rec.e).len();
        let lf = d.sequence(rec.f).len();
        records.push(CrossingRecord {
            e: te,
            pos_e: oe + if re { le - 1 - rec.pos_e } else { rec.pos_e },
            f: tf,
            pos_f: of + if rf { lf - 1 - rec.pos_f } else { rec.pos_f },
            positive: rec.positive ^ re ^ rf,
        });
    }
    let out = CombinatorialDrawing::new(cub.graph.clone(), cub.rows.clone(), records)?;
    debug_assert_eq!(out.cost(), d.cost());
    debug_assert!(out.is_realizable() || !d.is_realizable());
    Ok(out)
}

/// Every stop of the reduction, kept together so answers found at the
/// cubic end can be walked back to the source instance.
pub struct ReductionChain {
    pub params: ReduceParams,
    pub anchored: Anchored,
    pub expansion: Expansion,
    /// Rotation of `expansion.graph` carried over from the anchored graph.
    pub expanded_rotation: RotationSystem,
    pub cubic: Cubified,
}

/// Runs the whole chain: weld the frame on, trade weights for parallel
/// strands, replace vertices by grid patches.
pub fn reduce_chain(inst: &MultiwayInstance, params: &ReduceParams) -> Result<ReductionChain> {
    let anchored = attach_frame(inst, params)?;
    let expansion = expand_parallel(&anchored.graph);
    let expanded_rotation = expand_rotation(&anchored.graph, &anchored.rotation, &expansion)?;
    let cubic = cubify(&expansion.graph, &expanded_rotation, params.grid_height)?;
    Ok(ReductionChain { params: params.clone(), anchored, expansion, expanded_rotation, cubic })
}
