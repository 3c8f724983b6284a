//! The road back: cuts drawn as cheap drawings, and cuts read out of
//! drawings again.
//!
//! `drawing_from_cut` realizes any feasible cut as a drawing of the
//! anchored graph whose cost it can certify. `cut_from_drawing` inverts
//! that for arbitrary drawings: below a cost guard, the source edges that
//! cross a terminal ring form a feasible cut of size at most cost over
//! frame weight. `cut_from_cubic_drawing` does the same from the cubic
//! stage by carving each grid patch down to a quiet row and reading the
//! leftovers as a drawing of the anchored graph. `approx_cut_via_crossing`
//! chains it all behind a crossing-number oracle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::drawing::CombinatorialDrawing;
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::plane::{Corner, Inserter, Spot};
use crate::reduce::{reduce_chain, Anchored, Expansion, ReduceParams, ReductionChain};
use crate::solver::cr::{cr_exact, SolverOptions};
use crate::solver::mwc::{mwc_exact, CutSolution, MultiwayInstance};
use crate::surgery::{
    contract_crossing_free_edge, delete_edge, remove_double_crossings, suppress_degree_two,
};
use crate::{Error, Result};

/// How the source falls apart once a cut is removed.
struct SourcePieces {
    members: Vec<Vec<VertexId>>,
    /// Terminal owning each piece, if one lies inside.
    region: Vec<Option<usize>>,
}

/// Splits the source part of the anchored graph along `cut`. Errors when
/// two terminals stay connected, since no pocket can hold them both.
fn source_pieces(art: &Anchored, cut: &BTreeSet<EdgeId>) -> Result<SourcePieces> {
    let ns = art.graph.vertex_count() - 7; // the frame adds seven fresh vertices
    let mut comp_of = vec![usize::MAX; ns];
    let mut members: Vec<Vec<VertexId>> = Vec::new();
    for s in 0..ns {
        if comp_of[s] != usize::MAX {
            continue;
        }
        let id = members.len();
        comp_of[s] = id;
        let mut mem = vec![VertexId(s as u32)];
        let mut k = 0;
        while k < mem.len() {
            let x = mem[k];
            k += 1;
            for &e in art.graph.incident_edges(x) {
                if art.is_frame_edge(e) || cut.contains(&e) {
                    continue;
                }
                let y = art.graph.edge(e).other(x);
                if comp_of[y.index()] == usize::MAX {
                    comp_of[y.index()] = id;
                    mem.push(y);
                }
            }
        }
        members.push(mem);
    }
    let mut region = vec![None; members.len()];
    for (i, &t) in art.terminals.iter().enumerate() {
        let c = comp_of[t.index()];
        if let Some(j) = region[c] {
            return Err(Error::Extraction(format!(
                "the cut leaves terminals {:?} and {:?} connected",
                art.graph.name(art.terminals[j]),
                art.graph.name(t),
            )));
        }
        region[c] = Some(i);
    }
    Ok(SourcePieces { members, region })
}

/// Packages a cut as a full solution, spreading the source pieces over
/// the three terminals; pieces holding no terminal go with the first.
fn solution_from_cut(art: &Anchored, cut: BTreeSet<EdgeId>) -> Result<CutSolution> {
    let pieces = source_pieces(art, &cut)?;
    let mut parts: [Vec<VertexId>; 3] = Default::default();
    for (mem, reg) in pieces.members.iter().zip(&pieces.region) {
        parts[reg.unwrap_or(0)].extend(mem.iter().copied());
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    let weight = cut.iter().map(|&e| art.graph.edge(e).weight).sum();
    Ok(CutSolution { cut: cut.into_iter().collect(), weight, parts })
}

fn same_graph(a: &WeightedMultigraph, b: &WeightedMultigraph) -> Result<()> {
    let same = a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && a.vertices().all(|v| a.name(v) == b.name(v))
        && a.edge_ids().all(|e| {
            let (x, y) = (a.edge(e), b.edge(e));
            x.u == y.u && x.v == y.v && x.weight == y.weight
        });
    if same {
        Ok(())
    } else {
        Err(Error::BadInstance("drawing is for a different graph".into()))
    }
}

/// Hangs the unplaced piece containing `root` off its already-placed
/// root: tree edges land one by one without crossings, then the edges
/// closing cycles route inside the pocket, crossing only other source
/// edges at their weight.
fn grow_piece(
    art: &Anchored,
    cutset: &BTreeSet<EdgeId>,
    ins: &mut Inserter,
    root: VertexId,
    placed: &mut [bool],
) -> Result<()> {
    let mut queue = VecDeque::from([root]);
    let mut closers: BTreeSet<EdgeId> = BTreeSet::new();
    while let Some(x) = queue.pop_front() {
        for &e in art.graph.incident_edges(x) {
            if art.is_frame_edge(e) || cutset.contains(&e) || ins.is_placed(e) {
                continue;
            }
            let y = art.graph.edge(e).other(x);
            if placed[y.index()] {
                closers.insert(e);
            } else {
                ins.insert(e, |_| None, Spot::Auto, Spot::Auto)?;
                placed[y.index()] = true;
                queue.push_back(y);
            }
        }
    }
    for &e in &closers {
        if ins.is_placed(e) {
            continue;
        }
        let we = art.graph.edge(e).weight;
        let costs = |f: EdgeId| {
            if art.is_frame_edge(f) {
                None
            } else {
                Some(we * art.graph.edge(f).weight)
            }
        };
        ins.insert(e, costs, Spot::Auto, Spot::Auto)?;
    }
    Ok(())
}

/// The pocket of the first terminal, as a landing corner for pieces no
/// terminal or cut edge reaches.
fn spare_corner(art: &Anchored) -> Corner {
    let t0 = art.terminals[0];
    let before = *art.rotation.at(t0).last().expect("terminal rows end in the frame");
    Corner { vertex: t0, before }
}

/// Draws the anchored graph around a feasible cut.
///
/// The frame goes down first and crossing-free. Each piece of the source
/// minus the cut then fans into the pocket of its terminal; pieces with
/// no terminal follow whichever cut edge reaches them first, or land in
/// the first pocket. Cut edges route last, paying for one pass over a
/// heavy arm edge whenever their endpoints sit in different pockets.
///
/// The result is realizable, follows the anchored rotation, and costs at
/// most the sum of piece sizes to the fourth plus, per cut edge, the
/// frame weight and two crossings with every source edge.
pub fn drawing_from_cut(art: &Anchored, cut: &[EdgeId]) -> Result<CombinatorialDrawing> {
    let cutset: BTreeSet<EdgeId> = cut.iter().copied().collect();
    for &e in &cutset {
        if e.index() >= art.graph.edge_count() {
            return Err(Error::UnknownEdge(e.index()));
        }
        if art.is_frame_edge(e) {
            return Err(Error::Extraction("only source edges can be cut".into()));
        }
    }
    let pieces = source_pieces(art, &cutset)?;

    let mut ins = Inserter::with_rotation(&art.graph, art.rotation.clone())?;
    // Frame first, in an order that keeps it connected: tree edges place
    // their far endpoint directly, closing edges route crossing-free.
    let mut todo: Vec<EdgeId> = art.frame_edges.to_vec();
    let mut down: BTreeSet<VertexId> = BTreeSet::new();
    while !todo.is_empty() {
        let i = todo
            .iter()
            .position(|&e| art.graph.edge(e).ends().iter().any(|v| down.contains(v)))
            .unwrap_or(0);
        let e = todo.remove(i);
        ins.insert(e, |_| None, Spot::Auto, Spot::Auto)?;
        let [u, v] = art.graph.edge(e).ends();
        down.insert(u);
        down.insert(v);
    }

    let mut placed = vec![false; art.graph.vertex_count()];
    for &t in &art.terminals {
        placed[t.index()] = true;
        grow_piece(art, &cutset, &mut ins, t, &mut placed)?;
    }

    let w = art.frame_weight;
    let arm: BTreeSet<EdgeId> = (0..3).map(|i| art.frame_edges[5 * i]).collect();
    // Routes only run between faces of one drawn component, so reach
    // each cut edge through already-placed endpoints where possible; an
    // edge with neither endpoint placed opens a fresh island cluster.
    let mut cut_todo: Vec<EdgeId> = cutset.iter().copied().collect();
    while !cut_todo.is_empty() {
        let i = cut_todo
            .iter()
            .position(|&e| art.graph.edge(e).ends().iter().any(|v| placed[v.index()]))
            .unwrap_or(0);
        let e = cut_todo.remove(i);
        let we = art.graph.edge(e).weight;
        let costs = |f: EdgeId| {
            if art.is_frame_edge(f) {
                // only the arm edges between two pockets may be crossed
                if arm.contains(&f) {
                    Some(we * w)
                } else {
                    None
                }
            } else {
                Some(we * art.graph.edge(f).weight)
            }
        };
        let [u, v] = art.graph.edge(e).ends();
        if !placed[u.index()] && !placed[v.index()] {
            let spot = Spot::Inside(spare_corner(art));
            ins.insert(e, costs, spot, spot)?;
        } else {
            ins.insert(e, costs, Spot::Auto, Spot::Auto)?;
        }
        for x in [u, v] {
            if !placed[x.index()] {
                placed[x.index()] = true;
                grow_piece(art, &cutset, &mut ins, x, &mut placed)?;
            }
        }
    }

    // Pieces no terminal or cut edge touches: start them as islands in
    // the spare pocket, then grow as usual.
    for e in art.source_edge_ids() {
        if ins.is_placed(e) || cutset.contains(&e) {
            continue;
        }
        let [u, v] = art.graph.edge(e).ends();
        if placed[u.index()] || placed[v.index()] {
            continue; // a closer of a piece grown below
        }
        let spot = Spot::Inside(spare_corner(art));
        let costs = |f: EdgeId| {
            if art.is_frame_edge(f) {
                None
            } else {
                Some(art.graph.edge(f).weight)
            }
        };
        ins.insert(e, costs, spot, spot)?;
        for x in [u, v] {
            placed[x.index()] = true;
        }
        grow_piece(art, &cutset, &mut ins, u, &mut placed)?;
        grow_piece(art, &cutset, &mut ins, v, &mut placed)?;
    }

    let d = ins.finish()?;
    let d = remove_double_crossings(&d)?;

    debug_assert!(d.agrees_with(&art.rotation));
    debug_assert!(d.is_realizable());
    debug_assert!(d.crossings().iter().all(|r| {
        match (art.is_frame_edge(r.e), art.is_frame_edge(r.f)) {
            (true, true) => false,
            (true, false) => cutset.contains(&r.f),
            (false, true) => cutset.contains(&r.e),
            (false, false) => true,
        }
    }));
    #[cfg(debug_assertions)]
    {
        let m = art.source_edges as u128;
        let budget = pieces.members.iter().map(|mem| (mem.len() as u128).pow(4)).sum::<u128>()
            + cutset.len() as u128 * (art.frame_weight as u128 + 2 * m);
        debug_assert!(
            d.cost() as u128 <= budget,
            "drawing cost {} exceeds its certificate {budget}",
            d.cost()
        );
    }
    let _ = pieces;
    Ok(d)
}

/// Reads a cut out of any drawing of the anchored graph.
///
/// Costs at or above frame weight times the source edge count buy no
/// information, so the whole source edge set comes back. Below that the
/// frame must be drawn clean; the cut is then the source edges whose
/// crossing sequences meet a ring, which the rings make feasible. Each
/// such edge pays at least the frame weight, so the cut size never
/// exceeds cost over frame weight.
pub fn cut_from_drawing(art: &Anchored, d: &CombinatorialDrawing) -> Result<CutSolution> {
    same_graph(&art.graph, &d.graph)?;
    let w = art.frame_weight as u128;
    if d.cost() as u128 >= w * art.source_edges as u128 {
        return solution_from_cut(art, art.source_edge_ids().collect());
    }
    if d.crossings().iter().any(|r| art.is_frame_edge(r.e) && art.is_frame_edge(r.f)) {
        return Err(Error::Extraction(format!(
            "frame edges cross below the cost guard; frame weight {} is too small for this instance",
            art.frame_weight
        )));
    }
    let rings: BTreeSet<EdgeId> = art.rings.iter().flatten().copied().collect();
    let mut f: BTreeSet<EdgeId> = BTreeSet::new();
    for r in d.crossings() {
        for (x, y) in [(r.e, r.f), (r.f, r.e)] {
            if !art.is_frame_edge(x) && rings.contains(&y) {
                f.insert(x);
            }
        }
    }
    let found = f.len() as u128;
    let sol = solution_from_cut(art, f)?;
    debug_assert!(w * found <= d.cost() as u128);
    Ok(sol)
}

/// Which anchored edge each strand half of the expansion stands for.
fn strand_sources(exp: &Expansion) -> Vec<EdgeId> {
    let mut of = vec![EdgeId(0); exp.graph.edge_count()];
    for (i, family) in exp.strands.iter().enumerate() {
        for s in family {
            of[s.tail_half.index()] = EdgeId(i as u32);
            of[s.head_half.index()] = EdgeId(i as u32);
        }
    }
    of
}

/// Vertex-disjoint paths from every slot of a patch down to its row,
/// found by unit-capacity augmentation over split vertices. Returns one
/// edge walk per slot, or None when the patch cannot carry them all.
fn disjoint_paths(
    patch: &[VertexId],
    edges: &[(EdgeId, VertexId, VertexId)],
    slots: &[VertexId],
    row: &BTreeSet<VertexId>,
) -> Option<Vec<Vec<EdgeId>>> {
    struct Arc {
        to: usize,
        cap: u8,
        rev: usize,
        eid: Option<EdgeId>,
    }
    fn link(net: &mut [Vec<Arc>], a: usize, b: usize, eid: Option<EdgeId>) {
        let ra = net[b].len();
        let rb = net[a].len();
        net[a].push(Arc { to: b, cap: 1, rev: ra, eid });
        net[b].push(Arc { to: a, cap: 0, rev: rb, eid: None });
    }
    let idx: BTreeMap<VertexId, usize> = patch.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = patch.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net: Vec<Vec<Arc>> = (0..2 * n + 2).map(|_| Vec::new()).collect();
    for (i, v) in patch.iter().enumerate() {
        if row.contains(v) {
            link(&mut net, 2 * i, t, None); // rows absorb, never forward
        } else {
            link(&mut net, 2 * i, 2 * i + 1, None);
        }
    }
    for sv in slots {
        link(&mut net, s, 2 * idx[sv], None);
    }
    for &(e, u, v) in edges {
        link(&mut net, 2 * idx[&u] + 1, 2 * idx[&v], Some(e));
        link(&mut net, 2 * idx[&v] + 1, 2 * idx[&u], Some(e));
    }

    let mut flow = 0;
    loop {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; net.len()];
        prev[s] = Some((s, usize::MAX));
        let mut q = VecDeque::from([s]);
        'bfs: while let Some(x) = q.pop_front() {
            for (ai, arc) in net[x].iter().enumerate() {
                if arc.cap > 0 && prev[arc.to].is_none() {
                    prev[arc.to] = Some((x, ai));
                    if arc.to == t {
                        break 'bfs;
                    }
                    q.push_back(arc.to);
                }
            }
        }
        if prev[t].is_none() {
            break;
        }
        let mut cur = t;
        while cur != s {
            let (px, ai) = prev[cur].expect("walked path");
            net[px][ai].cap -= 1;
            let rev = net[px][ai].rev;
            net[cur][rev].cap += 1;
            cur = px;
        }
        flow += 1;
    }
    if flow != slots.len() {
        return None;
    }

    let mut out = Vec::with_capacity(slots.len());
    for sv in slots {
        let mut path = Vec::new();
        let mut cur = idx[sv];
        while !row.contains(&patch[cur]) {
            // the transit capacity of one makes the used exit unique
            let arc = net[2 * cur + 1]
                .iter()
                .find(|a| a.eid.is_some() && a.cap == 0)
                .expect("unit flow leaves every vertex it enters");
            path.push(arc.eid.expect("exit checked"));
            cur = arc.to / 2;
        }
        out.push(path);
    }
    Some(out)
}

/// Reads a cut out of a drawing of the cubic stage.
///
/// The cost guard comes first, as for the anchored graph. Below it, each
/// grid patch must contain a crossing-free interior row; the patch is
/// carved down to that row and one disjoint path per attachment, the row
/// is contracted, leftover subdivision points melt away, and every bundle
/// of parallel frame strands thins to its cheapest member. What remains
/// reads like a drawing of the anchored graph with some plain vertices
/// suppressed, and the same ring test applies; crossings on a carrier
/// that serves several source edges are charged to the smallest of them.
pub fn cut_from_cubic_drawing(
    chain: &ReductionChain,
    dt: &CombinatorialDrawing,
) -> Result<CutSolution> {
    let art = &chain.anchored;
    let cub = &chain.cubic;
    same_graph(&cub.graph, &dt.graph)?;
    let w = art.frame_weight as u128;
    if dt.cost() as u128 >= w * art.source_edges as u128 {
        return solution_from_cut(art, art.source_edge_ids().collect());
    }

    let of_strand = strand_sources(&chain.expansion);
    // anchored edges laid along each cubic edge, smallest first
    let mut load: Vec<Vec<EdgeId>> = cub
        .spans
        .iter()
        .map(|sp| {
            let mut l: Vec<EdgeId> = sp.iter().map(|&(he, _)| of_strand[he.index()]).collect();
            l.sort_unstable();
            l.dedup();
            l
        })
        .collect();

    let mut patches: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for v in cub.graph.vertices() {
        patches.entry(cub.owner[v.index()]).or_default().push(v);
    }
    let mut slot_of: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
    let mut keep: BTreeSet<EdgeId> = BTreeSet::new();
    for e in cub.graph.edge_ids() {
        if load[e.index()].is_empty() {
            continue;
        }
        keep.insert(e); // carriers always survive
        for v in cub.graph.edge(e).ends() {
            slot_of.entry(cub.owner[v.index()]).or_default().push((v, e));
        }
    }

    let hh = chain.params.grid_height as usize;
    let mut rows_to_contract: Vec<Vec<String>> = Vec::new();
    for (&src_v, members) in &patches {
        let slots = slot_of.get(&src_v).cloned().unwrap_or_default();
        if slots.is_empty() {
            continue; // a blob with no attachments carries nothing
        }
        let vname = cub.source.name(src_v);
        let wide = 2 * cub.source.degree(src_v);
        let myset: BTreeSet<VertexId> = members.iter().copied().collect();

        let mut picked: Option<(Vec<VertexId>, Vec<EdgeId>)> = None;
        for j in (1..hh.saturating_sub(1)).rev() {
            let mut vs = Vec::new();
            for i in 1..=wide - 2 {
                match cub.graph.vertex(&format!("{vname}~{i},{j}")) {
                    Some(v) => vs.push(v),
                    None => break,
                }
            }
            if vs.len() != wide - 2 {
                continue;
            }
            let mut es = Vec::new();
            for k in 0..vs.len() - 1 {
                let u = vs[k];
                match cub
                    .graph
                    .incident_edges(u)
                    .iter()
                    .copied()
                    .find(|&e| cub.graph.edge(e).other(u) == vs[k + 1])
                {
                    Some(e) => es.push(e),
                    None => break,
                }
            }
            if es.len() == vs.len() - 1 && es.iter().all(|&e| dt.sequence(e).is_empty()) {
                picked = Some((vs, es));
                break;
            }
        }
        let Some((row_vs, row_es)) = picked else {
            return Err(Error::Extraction(format!(
                "no crossing-free row in the grid of {vname:?}; the drawing is too tangled to trace"
            )));
        };

        let rowset: BTreeSet<VertexId> = row_vs.iter().copied().collect();
        let grid_edges: Vec<(EdgeId, VertexId, VertexId)> = cub
            .graph
            .edge_ids()
            .filter(|&e| load[e.index()].is_empty())
            .filter_map(|e| {
                let [u, v] = cub.graph.edge(e).ends();
                (myset.contains(&u) && myset.contains(&v)).then_some((e, u, v))
            })
            .collect();
        let slot_vs: Vec<VertexId> = slots.iter().map(|&(v, _)| v).collect();
        let Some(paths) = disjoint_paths(members, &grid_edges, &slot_vs, &rowset) else {
            return Err(Error::Extraction(format!(
                "could not route {} disjoint paths to the quiet row in the grid of {vname:?}",
                slots.len()
            )));
        };
        for (k, path) in paths.iter().enumerate() {
            let carrier_load = load[slots[k].1.index()].clone();
            for &e in path {
                keep.insert(e);
                load[e.index()] = carrier_load.clone();
            }
        }
        keep.extend(row_es.iter().copied());
        rows_to_contract.push(row_vs.iter().map(|&v| cub.graph.name(v).to_string()).collect());
    }

    // Carve: everything outside rows, paths and carriers goes, highest
    // ids first so lower ids stay put.
    let mut cur = dt.clone();
    for i in (0..cub.graph.edge_count()).rev() {
        if keep.contains(&EdgeId(i as u32)) {
            continue;
        }
        debug_assert!(load[i].is_empty());
        cur = delete_edge(&cur, EdgeId(i as u32))?;
        load.remove(i);
    }

    // Contract each quiet row to a point; the smallest name hosts it.
    for names in &rows_to_contract {
        let mut host = names[0].clone();
        for next in &names[1..] {
            let hv = cur.graph.vertex(&host).expect("row vertex survives");
            let nv = cur.graph.vertex(next).expect("row vertex survives");
            let e = cur
                .graph
                .incident_edges(hv)
                .iter()
                .copied()
                .find(|&e| cur.graph.edge(e).other(hv) == nv)
                .expect("row edges were kept");
            cur = contract_crossing_free_edge(&cur, e)?;
            load.remove(e.index());
            if next.as_str() < host.as_str() {
                host = next.clone();
            }
        }
    }

    // Melt leftover subdivision points into their through edges.
    let mut stuck: BTreeSet<String> = BTreeSet::new();
    loop {
        let Some(v) = cur
            .graph
            .vertices()
            .find(|&v| cur.graph.degree(v) == 2 && !stuck.contains(cur.graph.name(v)))
        else {
            break;
        };
        let [e1, e2] = [cur.graph.incident_edges(v)[0], cur.graph.incident_edges(v)[1]];
        if cur.graph.edge(e1).other(v) == cur.graph.edge(e2).other(v)
            || cur.crossings_between(e1, e2) > 0
        {
            // a closed curl or a self-tangle; the point stays
            stuck.insert(cur.graph.name(v).to_string());
            continue;
        }
        let mut merged = load[e1.index()].clone();
        merged.extend(load[e2.index()].iter().copied());
        merged.sort_unstable();
        merged.dedup();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        cur = suppress_degree_two(&cur, v)?;
        load.remove(hi.index());
        load.remove(lo.index());
        load.push(merged);
        debug_assert_eq!(load.len(), cur.graph.edge_count());
    }

    // Thin every bundle of parallel frame strands to its cheapest member.
    loop {
        let mut families: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
        for e in cur.graph.edge_ids() {
            let l = &load[e.index()];
            if l.len() == 1 && art.is_frame_edge(l[0]) {
                families.entry(l[0]).or_default().push(e);
            }
        }
        let Some((_, fam)) = families.into_iter().find(|(_, fam)| fam.len() > 1) else {
            break;
        };
        debug_assert_eq!(fam.len() as u64, art.frame_weight);
        let keeper = *fam
            .iter()
            .min_by_key(|&&e| (cur.sequence(e).len(), e))
            .expect("family is nonempty");
        for &e in fam.iter().rev() {
            if e == keeper {
                continue;
            }
            cur = delete_edge(&cur, e)?;
            load.remove(e.index());
        }
    }

    debug_assert!(cur.cost() <= dt.cost());
    debug_assert!(load.iter().all(|l| {
        l.iter().all(|&e| art.is_frame_edge(e)) || l.iter().all(|&e| !art.is_frame_edge(e))
    }));
    debug_assert!(cur.crossings().iter().all(|r| {
        !load[r.e.index()].is_empty() && !load[r.f.index()].is_empty()
    }));

    let frameish = |l: &[EdgeId]| l.first().is_some_and(|&e| art.is_frame_edge(e));
    if cur
        .crossings()
        .iter()
        .any(|r| frameish(&load[r.e.index()]) && frameish(&load[r.f.index()]))
    {
        return Err(Error::Extraction(format!(
            "frame strands cross below the cost guard; frame weight {} is too small for this instance",
            art.frame_weight
        )));
    }
    let rings: BTreeSet<EdgeId> = art.rings.iter().flatten().copied().collect();
    let mut f: BTreeSet<EdgeId> = BTreeSet::new();
    for r in cur.crossings() {
        for (x, y) in [(r.e, r.f), (r.f, r.e)] {
            let lx = &load[x.index()];
            if !lx.is_empty()
                && !frameish(lx)
                && load[y.index()].iter().any(|e| rings.contains(e))
            {
                f.insert(lx[0]);
            }
        }
    }
    let found = f.len() as u128;
    let sol = solution_from_cut(art, f)?;
    debug_assert!(w * found <= dt.cost() as u128);
    Ok(sol)
}

/// An exact fraction, for pipeline knobs that arithmetic must not round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Ratio> {
        if den == 0 {
            return Err(Error::BadInstance("a ratio needs a nonzero denominator".into()));
        }
        Ok(Ratio { num, den })
    }
}

/// Knobs of the approximation pipeline.
///
/// `oracle_factor` is the multiplicative quality assumed of the crossing
/// oracle; `slack` is the extra looseness the caller accepts on top of
/// it. Instances with fewer than three times factor-over-slack vertices
/// skip the reduction and are cut exactly; past that point the
/// reduction's additive term stays within the slack.
#[derive(Clone, Copy, Debug)]
pub struct PipelineParams {
    pub oracle_factor: Ratio,
    pub slack: Ratio,
}

impl PipelineParams {
    pub fn new(oracle_factor: Ratio, slack: Ratio) -> Result<PipelineParams> {
        if oracle_factor.num < oracle_factor.den {
            return Err(Error::BadInstance("the assumed oracle factor must be at least one".into()));
        }
        if slack.num == 0 {
            return Err(Error::BadInstance("the slack must be positive".into()));
        }
        Ok(PipelineParams { oracle_factor, slack })
    }

    /// Whether an instance on `n` vertices falls under the exact-solve
    /// cutoff of 3 times factor over slack.
    pub fn below_threshold(&self, n: usize) -> bool {
        let lhs = n as u128 * self.oracle_factor.den as u128 * self.slack.num as u128;
        let rhs = 3 * self.oracle_factor.num as u128 * self.slack.den as u128;
        lhs < rhs
    }
}

/// Anything that can draw a graph. The pipeline hands it the cubic stage
/// and trusts the cost of what comes back.
pub trait CrossingOracle {
    fn draw(&self, g: &WeightedMultigraph) -> Result<CombinatorialDrawing>;
}

/// The in-crate exact solver as an oracle.
pub struct ExactOracle {
    pub options: SolverOptions,
}

impl CrossingOracle for ExactOracle {
    fn draw(&self, g: &WeightedMultigraph) -> Result<CombinatorialDrawing> {
        Ok(cr_exact(g, &self.options)?.witness)
    }
}

/// Cuts an instance by way of crossing numbers: small instances are cut
/// exactly, larger ones run the reduction, ask the oracle to draw the
/// cubic stage, and read the cut back out of the drawing. With an exact
/// oracle the answer is optimal; with a c-approximate one the cut stays
/// within c plus the configured slack once instances pass the cutoff.
pub fn approx_cut_via_crossing(
    inst: &MultiwayInstance,
    oracle: &dyn CrossingOracle,
    params: &PipelineParams,
    reduce: &ReduceParams,
) -> Result<CutSolution> {
    if params.below_threshold(inst.graph.vertex_count()) {
        return mwc_exact(inst);
    }
    let chain = reduce_chain(inst, reduce)?;
    let drawn = oracle.draw(&chain.cubic.graph)?;
    cut_from_cubic_drawing(&chain, &drawn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drawing::CrossingRecord;
    use crate::reduce::{attach_frame, expand_drawing, transfer_drawing};
    use crate::solver::mwc::mwc_feasible;

    fn star() -> MultiwayInstance {
        let mut g = WeightedMultigraph::new();
        let t: Vec<VertexId> = (0..3).map(|i| g.add_vertex(&format!("t{i}")).unwrap()).collect();
        let c = g.add_vertex("c").unwrap();
        for &ti in &t {
            g.add_edge(ti, c, 1).unwrap();
        }
        MultiwayInstance::new(g, [t[0], t[1], t[2]]).unwrap()
    }

    fn chain3() -> MultiwayInstance {
        // a path t0 - x - t1 with t2 hanging off t0
        let mut g = WeightedMultigraph::new();
        let t0 = g.add_vertex("t0").unwrap();
        let t1 = g.add_vertex("t1").unwrap();
        let t2 = g.add_vertex("t2").unwrap();
        let x = g.add_vertex("x").unwrap();
        g.add_edge(t0, x, 1).unwrap();
        g.add_edge(x, t1, 1).unwrap();
        g.add_edge(t2, t0, 1).unwrap();
        MultiwayInstance::new(g, [t0, t1, t2]).unwrap()
    }

    fn lone_terminals() -> MultiwayInstance {
        let mut g = WeightedMultigraph::new();
        let t: Vec<VertexId> = (0..3).map(|i| g.add_vertex(&format!("t{i}")).unwrap()).collect();
        MultiwayInstance::relaxed(g, [t[0], t[1], t[2]]).unwrap()
    }

    #[test]
    fn a_cut_drawn_is_the_cut_read_back() {
        let inst = star();
        let best = mwc_exact(&inst).unwrap();
        assert_eq!(best.weight, 2);
        let params = ReduceParams::for_vertex_count(4).unwrap();
        let art = attach_frame(&inst, &params).unwrap();
        let d = drawing_from_cut(&art, &best.cut).unwrap();
        assert!(d.is_realizable());
        assert!(d.agrees_with(&art.rotation));
        let sol = cut_from_drawing(&art, &d).unwrap();
        assert_eq!(sol.cut, best.cut);
        assert_eq!(sol.weight, 2);
        assert!(mwc_feasible(&inst, &sol.cut));
    }

    #[test]
    fn separated_terminals_need_no_crossings() {
        let inst = lone_terminals();
        let art =
            attach_frame(&inst, &ReduceParams { frame_weight: 2, grid_height: 2 }).unwrap();
        let d = drawing_from_cut(&art, &[]).unwrap();
        assert_eq!(d.cost(), 0);
        let sol = cut_from_drawing(&art, &d).unwrap();
        assert!(sol.cut.is_empty());
        assert_eq!(sol.weight, 0);
    }

    #[test]
    fn pieces_off_on_their_own_still_get_drawn() {
        let mut g = WeightedMultigraph::new();
        let t: Vec<VertexId> = (0..3).map(|i| g.add_vertex(&format!("t{i}")).unwrap()).collect();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.add_edge(a, b, 1).unwrap();
        let inst = MultiwayInstance::relaxed(g, [t[0], t[1], t[2]]).unwrap();
        let art =
            attach_frame(&inst, &ReduceParams { frame_weight: 2, grid_height: 2 }).unwrap();
        let d = drawing_from_cut(&art, &[]).unwrap();
        assert_eq!(d.cost(), 0);
        let sol = cut_from_drawing(&art, &d).unwrap();
        assert!(sol.cut.is_empty());
        assert!(sol.parts[0].contains(&a) && sol.parts[0].contains(&b));
    }

    #[test]
    fn an_infeasible_cut_is_refused() {
        let inst = star();
        let art =
            attach_frame(&inst, &ReduceParams { frame_weight: 2, grid_height: 2 }).unwrap();
        let err = drawing_from_cut(&art, &[EdgeId(0)]).unwrap_err();
        assert!(err.to_string().contains("connected"));
        assert!(drawing_from_cut(&art, &[art.frame_edges[0]]).is_err());
    }

    #[test]
    fn runaway_cost_cuts_everything() {
        let inst = star();
        let art =
            attach_frame(&inst, &ReduceParams { frame_weight: 2, grid_height: 2 }).unwrap();
        // hand-built junk: one source edge sawing across a spoke three times
        let spoke = art.frame_edges[1];
        let recs = (0..3)
            .map(|k| CrossingRecord {
                e: EdgeId(0),
                pos_e: k,
                f: spoke,
                pos_f: k,
                positive: k % 2 == 0,
            })
            .collect();
        let d = CombinatorialDrawing::new(art.graph.clone(), art.rotation.clone(), recs).unwrap();
        assert_eq!(d.cost(), 6);
        let sol = cut_from_drawing(&art, &d).unwrap();
        assert_eq!(sol.cut.len(), 3);
        assert_eq!(sol.weight, 3);
    }

    #[test]
    fn a_tangled_frame_is_refused() {
        let inst = star();
        let art =
            attach_frame(&inst, &ReduceParams { frame_weight: 2, grid_height: 2 }).unwrap();
        let recs = vec![CrossingRecord {
            e: art.frame_edges[0],
            pos_e: 0,
            f: art.frame_edges[7],
            pos_f: 0,
            positive: true,
        }];
        let d = CombinatorialDrawing::new(art.graph.clone(), art.rotation.clone(), recs).unwrap();
        // cost 4 stays under the guard of 6, so the frame check speaks
        let err = cut_from_drawing(&art, &d).unwrap_err();
        assert!(err.to_string().contains("frame weight"));
    }

    #[test]
    fn the_cubic_stage_reads_the_same_cut() {
        let inst = star();
        let params = ReduceParams { frame_weight: 4, grid_height: 4 };
        let chain = reduce_chain(&inst, &params).unwrap();
        let best = mwc_exact(&inst).unwrap();
        let dh = drawing_from_cut(&chain.anchored, &best.cut).unwrap();
        let dp = expand_drawing(&dh, &chain.expansion).unwrap();
        let dt = transfer_drawing(&dp, &chain.cubic).unwrap();
        assert_eq!(dt.cost(), dh.cost());
        assert!(dt.cost() < 4 * chain.anchored.source_edges as u64, "stay under the guard");
        let sol = cut_from_cubic_drawing(&chain, &dt).unwrap();
        assert_eq!(sol.cut, best.cut);
        assert!(mwc_feasible(&inst, &sol.cut));
        assert!(4 * sol.cut.len() as u64 <= dt.cost());
    }

    #[test]
    fn chains_through_plain_bends_still_cut() {
        let inst = chain3();
        // x has two unit edges and no terminal, so its patch fuses away
        let params = ReduceParams { frame_weight: 4, grid_height: 4 };
        let chain = reduce_chain(&inst, &params).unwrap();
        let best = mwc_exact(&inst).unwrap();
        assert_eq!(best.weight, 2);
        let dh = drawing_from_cut(&chain.anchored, &best.cut).unwrap();
        let dt = transfer_drawing(&expand_drawing(&dh, &chain.expansion).unwrap(), &chain.cubic)
            .unwrap();
        assert!(dt.cost() < 4 * chain.anchored.source_edges as u64, "stay under the guard");
        let sol = cut_from_cubic_drawing(&chain, &dt).unwrap();
        assert!(mwc_feasible(&inst, &sol.cut));
        assert_eq!(sol.weight, 2);
    }

    #[test]
    fn a_patch_with_no_quiet_row_is_an_error() {
        let inst = star();
        let params = ReduceParams { frame_weight: 5, grid_height: 4 };
        let chain = reduce_chain(&inst, &params).unwrap();
        let best = mwc_exact(&inst).unwrap();
        let dh = drawing_from_cut(&chain.anchored, &best.cut).unwrap();
        let dt = transfer_drawing(&expand_drawing(&dh, &chain.expansion).unwrap(), &chain.cubic)
            .unwrap();
        // dirty both interior rows of the centre patch
        let g = &chain.cubic.graph;
        let between = |a: &str, b: &str| {
            let u = g.vertex(a).unwrap();
            let v = g.vertex(b).unwrap();
            g.incident_edges(u).iter().copied().find(|&e| g.edge(e).other(u) == v).unwrap()
        };
        let mut recs = dt.crossings().to_vec();
        recs.push(CrossingRecord {
            e: between("c~1,1", "c~2,1"),
            pos_e: 0,
            f: between("c~1,2", "c~2,2"),
            pos_f: 0,
            positive: true,
        });
        assert!(dt.cost() + 1 < 5 * chain.anchored.source_edges as u64, "stay under the guard");
        let bad = CombinatorialDrawing::new(g.clone(), dt.rotation.clone(), recs).unwrap();
        let err = cut_from_cubic_drawing(&chain, &bad).unwrap_err();
        assert!(err.to_string().contains("no crossing-free row"));
    }

    #[test]
    fn the_pipeline_prefers_exact_below_the_cutoff() {
        let inst = star();
        let params =
            PipelineParams::new(Ratio::new(2, 1).unwrap(), Ratio::new(1, 2).unwrap()).unwrap();
        assert!(params.below_threshold(4));
        let oracle = ExactOracle { options: SolverOptions::default() };
        let sol = approx_cut_via_crossing(
            &inst,
            &oracle,
            &params,
            &ReduceParams { frame_weight: 4, grid_height: 4 },
        )
        .unwrap();
        assert_eq!(sol.weight, mwc_exact(&inst).unwrap().weight);
    }

    #[test]
    fn the_pipeline_runs_the_reduction_past_the_cutoff() {
        // three lone terminals keep the cubic stage planar, so the exact
        // oracle answers at once and the guard maps zero cost to no cut
        let inst = lone_terminals();
        let params =
            PipelineParams::new(Ratio::new(3, 2).unwrap(), Ratio::new(2, 1).unwrap()).unwrap();
        assert!(!params.below_threshold(3));
        let oracle = ExactOracle { options: SolverOptions::default() };
        let sol = approx_cut_via_crossing(
            &inst,
            &oracle,
            &params,
            &ReduceParams { frame_weight: 2, grid_height: 4 },
        )
        .unwrap();
        assert!(sol.cut.is_empty());
        assert_eq!(sol.weight, 0);
    }

    #[test]
    fn pipeline_knob_validation() {
        assert!(Ratio::new(1, 0).is_err());
        let one = Ratio::new(1, 1).unwrap();
        let half = Ratio::new(1, 2).unwrap();
        assert!(PipelineParams::new(half, one).is_err());
        assert!(PipelineParams::new(one, Ratio::new(0, 1).unwrap()).is_err());
        assert!(PipelineParams::new(one, half).is_ok());
        let p = PipelineParams::new(Ratio::new(2, 1).unwrap(), Ratio::new(1, 1).unwrap()).unwrap();
        assert!(p.below_threshold(5));
        assert!(!p.below_threshold(6));
    }
}
