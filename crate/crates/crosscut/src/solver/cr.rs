//! Exact crossing numbers, free or with a prescribed rotation, by branch
//! and bound over partial planarizations.
//!
//! A search state is the input graph with some crossings already committed,
//! each one a degree-four vertex splitting two edge segments. A state whose
//! graph embeds in the plane is a leaf and yields a drawing. Otherwise some
//! obstruction inside it must still be crossed, and it is enough to branch
//! on pairs taken from one minimal obstruction: an edge-minimal nonplanar
//! subgraph in the free case, a deletion-minimal positive-genus subgraph in
//! the constrained case.
//!
//! The search runs over drawings where no two edges cross twice and, when
//! the rotation is free, no two adjacent edges cross. Cheaper drawings
//! outside that class can be rewritten into it, so the minimum is not
//! affected; the toy oracle tests pin this down at small sizes.
//!
//! Before searching, the instance shrinks: a degree-two vertex is a bend
//! and fuses its two edges, and with the rotation free a parallel class
//! fuses into one edge of the combined weight. Both moves keep the
//! optimum, and a witness found on the shrunk core unrolls back to the
//! input graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::drawing::{CombinatorialDrawing, CrossingRecord};
use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::plane::{Inserter, Spot};
use crate::planarity;
use crate::rotation::RotationSystem;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Give up with `CapExceeded` instead of proving any value above this.
    pub cost_cap: Option<u64>,
    /// Abort with `BudgetExceeded` after expanding this many search nodes.
    pub node_budget: Option<u64>,
    /// Contract edges too expensive to cross and prune on the minor.
    pub prune_contraction: bool,
    /// Lower-bound by packing edge-disjoint obstructions.
    pub prune_packing: bool,
    /// Lower-bound by the genus of the constrained rotation.
    pub prune_genus: bool,
    /// Fuse bends and, when the rotation is free, parallel edges before
    /// searching; witnesses are unrolled back afterwards.
    pub shrink: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            cost_cap: None,
            node_budget: None,
            prune_contraction: true,
            prune_packing: true,
            prune_genus: true,
            shrink: true,
        }
    }
}

impl SolverOptions {
    /// Everything off except correctness; the slow baseline.
    pub fn no_pruning() -> Self {
        SolverOptions {
            cost_cap: None,
            node_budget: None,
            prune_contraction: false,
            prune_packing: false,
            prune_genus: false,
            shrink: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrossingResult {
    pub cost: u64,
    /// A drawing attaining `cost`.
    pub witness: CombinatorialDrawing,
    /// Search nodes expanded.
    pub nodes: u64,
}

/// Partial planarization. Segment `i` of the working graph is `ends[i]`
/// with original edge `orig[i]`; committed crossings are vertices past the
/// original count, one per entry of `dummies`.
#[derive(Clone)]
struct State {
    ends: Vec<(VertexId, VertexId)>,
    orig: Vec<EdgeId>,
    /// Endpoint of each segment on its original tail side.
    tail_end: Vec<VertexId>,
    /// Original pairs, in the order their segments were split.
    dummies: Vec<(EdgeId, EdgeId)>,
    crossed: BTreeSet<(EdgeId, EdgeId)>,
    /// Segment pairs covered by an earlier sibling's subtree. Banning them
    /// here means every crossing set is explored exactly once: whichever
    /// allowed candidate a completion uses first, the child that added it
    /// still reaches that completion.
    banned: BTreeSet<(EdgeId, EdgeId)>,
    cost: u64,
    /// Rotation rows in segment ids, constrained search only.
    rows: Option<Vec<Vec<EdgeId>>>,
}

impl State {
    fn root(g: &WeightedMultigraph, rot: Option<&RotationSystem>) -> State {
        let ends = g.edges().iter().map(|e| (e.u, e.v)).collect();
        let orig = g.edge_ids().collect();
        let tail_end = g.edge_ids().map(|e| g.canonical_tail(e)).collect();
        let rows = rot.map(|r| r.order.clone());
        State {
            ends,
            orig,
            tail_end,
            dummies: Vec::new(),
            crossed: BTreeSet::new(),
            banned: BTreeSet::new(),
            cost: 0,
            rows,
        }
    }

    fn graph(&self, original: &WeightedMultigraph) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        for v in original.vertices() {
            g.add_vertex(original.name(v)).expect("names unique");
        }
        for i in 0..self.dummies.len() {
            let mut name = format!("x{i}");
            while g.vertex(&name).is_some() {
                name.push('#');
            }
            g.add_vertex(&name).expect("fresh name");
        }
        for (i, &(u, v)) in self.ends.iter().enumerate() {
            let w = original.edge(self.orig[i]).weight;
            g.add_edge(u, v, w).expect("valid segment");
        }
        g
    }

    /// Split segments `x` and `y` at a fresh crossing. In the constrained
    /// search `positive` picks the cyclic order at the new vertex; each
    /// segment slot keeps its tail-side piece so existing rotation rows
    /// stay valid except at the two far endpoints.
    fn cross(
        &self,
        original: &WeightedMultigraph,
        x: EdgeId,
        y: EdgeId,
        positive: bool,
    ) -> State {
        let mut st = self.clone();
        let d = VertexId((original.vertex_count() + st.dummies.len()) as u32);
        let split = |st: &mut State, s: EdgeId| -> EdgeId {
            let (u, v) = st.ends[s.index()];
            let t = st.tail_end[s.index()];
            let far_v = if t == u { v } else { u };
            st.ends[s.index()] = (t, d);
            let far = EdgeId(st.ends.len() as u32);
            st.ends.push((d, far_v));
            st.orig.push(st.orig[s.index()]);
            st.tail_end.push(d);
            if let Some(rows) = &mut st.rows {
                let row = &mut rows[far_v.index()];
                let p = row.iter().position(|&e| e == s).expect("incident");
                row[p] = far;
            }
            far
        };
        let fx = split(&mut st, x);
        let fy = split(&mut st, y);
        // A ban names a span; the far half of a split span inherits it.
        for &(p, q) in &self.banned {
            let ps = if p == x { [Some(p), Some(fx)] } else if p == y { [Some(p), Some(fy)] } else { [Some(p), None] };
            let qs = if q == x { [Some(q), Some(fx)] } else if q == y { [Some(q), Some(fy)] } else { [Some(q), None] };
            for pp in ps.into_iter().flatten() {
                for qq in qs.into_iter().flatten() {
                    st.banned.insert((pp.min(qq), pp.max(qq)));
                }
            }
        }
        let (a, b) = (self.orig[x.index()], self.orig[y.index()]);
        st.dummies.push((a, b));
        st.crossed.insert((a.min(b), a.max(b)));
        st.cost += pair_cost(original, a, b);
        if let Some(rows) = &mut st.rows {
            let cycle = if positive {
                vec![x, y, fx, fy]
            } else {
                vec![x, fy, fx, y]
            };
            rows.push(cycle);
        }
        st
    }
}

fn pair_cost(g: &WeightedMultigraph, a: EdgeId, b: EdgeId) -> u64 {
    g.edge(a).weight * g.edge(b).weight
}

/// May original edges `a` and `b` still cross from this state?
fn allowed(
    original: &WeightedMultigraph,
    crossed: &BTreeSet<(EdgeId, EdgeId)>,
    constrained: bool,
    a: EdgeId,
    b: EdgeId,
) -> bool {
    a != b
        && !crossed.contains(&(a.min(b), a.max(b)))
        && (constrained || !original.edges_adjacent(a, b))
}

/// Reads a drawing of the original graph out of a planar leaf. A committed
/// crossing whose two segment pairs end up as rotation neighbors is a
/// touch, not a crossing; it is dropped and the realized cost comes back
/// below the state's. That only happens in the free search, where the
/// embedding is discovered rather than carried.
fn rebuild(
    original: &WeightedMultigraph,
    st: &State,
    rot: &RotationSystem,
) -> Result<CombinatorialDrawing> {
    let n = original.vertex_count();
    let mut inc: Vec<Vec<EdgeId>> = vec![Vec::new(); n + st.dummies.len()];
    for (i, &(u, v)) in st.ends.iter().enumerate() {
        inc[u.index()].push(EdgeId(i as u32));
        inc[v.index()].push(EdgeId(i as u32));
    }
    // Walk every chain tail to head, logging entry and exit segments.
    let mut visits: Vec<Vec<(EdgeId, EdgeId, EdgeId)>> = vec![Vec::new(); st.dummies.len()];
    let mut walk: Vec<Vec<usize>> = vec![Vec::new(); original.edge_count()];
    for e in original.edge_ids() {
        let start = original.canonical_tail(e);
        let mut cur = *inc[start.index()]
            .iter()
            .find(|s| st.orig[s.index()] == e)
            .expect("chain starts at the tail");
        let mut at = start;
        loop {
            let (u, v) = st.ends[cur.index()];
            let nxt = if u == at { v } else { u };
            if nxt.index() < n {
                debug_assert_eq!(nxt, original.canonical_head(e));
                break;
            }
            let di = nxt.index() - n;
            let out = inc[nxt.index()]
                .iter()
                .copied()
                .find(|&s| s != cur && st.orig[s.index()] == e)
                .expect("chain continues");
            visits[di].push((e, cur, out));
            walk[e.index()].push(di);
            at = nxt;
            cur = out;
        }
    }
    let mut kept = vec![false; st.dummies.len()];
    let mut bit = vec![false; st.dummies.len()];
    for (di, &(a, b)) in st.dummies.iter().enumerate() {
        let find = |x: EdgeId| {
            visits[di]
                .iter()
                .find(|&&(e, _, _)| e == x)
                .map(|&(_, i, o)| (i, o))
                .expect("both edges pass through")
        };
        let (a_in, a_out) = find(a);
        let (b_in, b_out) = find(b);
        let row = rot.at(VertexId((n + di) as u32));
        debug_assert_eq!(row.len(), 4);
        let p = row.iter().position(|&s| s == a_in).expect("incident");
        if row[(p + 2) % 4] == a_out {
            kept[di] = true;
            bit[di] = row[(p + 1) % 4] == b_in;
            debug_assert!(row[(p + if bit[di] { 3 } else { 1 }) % 4] == b_out);
        } else {
            debug_assert!(st.rows.is_none(), "carried rows never touch");
        }
    }
    let mut pos: Vec<std::collections::BTreeMap<usize, usize>> =
        vec![Default::default(); original.edge_count()];
    for e in original.edge_ids() {
        let mut p = 0usize;
        for &di in &walk[e.index()] {
            if kept[di] {
                pos[e.index()].insert(di, p);
                p += 1;
            }
        }
    }
    let mut records = Vec::new();
    for (di, &(a, b)) in st.dummies.iter().enumerate() {
        if kept[di] {
            records.push(CrossingRecord {
                e: a,
                pos_e: pos[a.index()][&di],
                f: b,
                pos_f: pos[b.index()][&di],
                positive: bit[di],
            });
        }
    }
    let order = (0..n)
        .map(|v| {
            rot.at(VertexId(v as u32))
                .iter()
                .map(|&s| st.orig[s.index()])
                .collect()
        })
        .collect();
    let drawing =
        CombinatorialDrawing::new(original.clone(), RotationSystem { order }, records)?;
    debug_assert!(drawing.is_realizable());
    Ok(drawing)
}

/// Greedy insertion over the plane module; always realizable, often loose.
/// Spanning edges go in before chords so routing never spans placed pieces
/// that are not yet connected.
fn greedy_drawing(
    g: &WeightedMultigraph,
    rot: Option<&RotationSystem>,
) -> Result<CombinatorialDrawing> {
    let mut ins = match rot {
        Some(r) => Inserter::with_rotation(g, r.clone())?,
        None => Inserter::free(g)?,
    };
    for e in insertion_order(g) {
        let we = g.edge(e).weight;
        ins.insert(e, |f| Some(we * g.edge(f).weight), Spot::Auto, Spot::Auto)?;
    }
    ins.finish()
}

/// Per component: a spanning tree in discovery order, then the chords.
fn insertion_order(g: &WeightedMultigraph) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut in_tree = vec![false; g.edge_count()];
    let mut order = Vec::with_capacity(g.edge_count());
    for root in 0..n {
        if seen[root] || g.degree(VertexId(root as u32)) == 0 {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([VertexId(root as u32)]);
        let mut comp = vec![VertexId(root as u32)];
        while let Some(v) = queue.pop_front() {
            for &e in g.incident_edges(v) {
                let w = g.edge(e).other(v);
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    in_tree[e.index()] = true;
                    order.push(e);
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        for &v in &comp {
            for &e in g.incident_edges(v) {
                let w = g.edge(e).other(v);
                if !in_tree[e.index()] && v <= w {
                    order.push(e);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), g.edge_count());
    order
}

struct Ctx<'a> {
    original: &'a WeightedMultigraph,
    opts: &'a SolverOptions,
    constrained: bool,
    /// Strict upper limit on acceptable costs: `cap + 1` when capped.
    limit: u64,
    best: Option<(u64, CombinatorialDrawing)>,
    nodes: u64,
}

impl Ctx<'_> {
    fn bound(&self) -> u64 {
        match &self.best {
            Some((c, _)) => (*c).min(self.limit),
            None => self.limit,
        }
    }

    fn offer(&mut self, drawing: CombinatorialDrawing) {
        let cost = drawing.cost();
        if cost < self.bound() {
            self.best = Some((cost, drawing));
        }
    }

    fn cheapest_allowed(&self, crossed: &BTreeSet<(EdgeId, EdgeId)>) -> Option<u64> {
        let g = self.original;
        let mut best = None;
        for a in g.edge_ids() {
            for b in g.edge_ids().filter(|&b| b > a) {
                if allowed(g, crossed, self.constrained, a, b) {
                    let c = pair_cost(g, a, b);
                    if best.map_or(true, |m| c < m) {
                        best = Some(c);
                    }
                }
            }
        }
        best
    }
}

/// Candidate segment pairs inside one obstruction, cheapest first.
fn candidates(
    ctx: &Ctx,
    st: &State,
    witness: &[EdgeId],
) -> Vec<(u64, EdgeId, EdgeId)> {
    let mut out = Vec::new();
    for (i, &x) in witness.iter().enumerate() {
        for &y in &witness[i + 1..] {
            let (a, b) = (st.orig[x.index()], st.orig[y.index()]);
            if allowed(ctx.original, &st.crossed, ctx.constrained, a, b)
                && !st.banned.contains(&(x.min(y), x.max(y)))
            {
                out.push((pair_cost(ctx.original, a, b), x.min(y), x.max(y)));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Lower bound from edge-disjoint obstructions beyond the first. Every
/// completion must cross a still-allowed pair inside each one.
fn packing_bound(ctx: &Ctx, st: &State, g: &WeightedMultigraph, first: &[EdgeId]) -> Option<u64> {
    let mut gone: BTreeSet<EdgeId> = first.iter().copied().collect();
    let mut extra = 0u64;
    loop {
        let keep: Vec<EdgeId> = g.edge_ids().filter(|e| !gone.contains(e)).collect();
        let (sub, map) = g.edge_subgraph(&keep);
        let k = planarity::kuratowski_edges(&sub);
        if k.is_empty() {
            return Some(extra);
        }
        let mut cheapest = None;
        for (i, &x) in k.iter().enumerate() {
            for &y in &k[i + 1..] {
                let (sx, sy) = (map[x.index()], map[y.index()]);
                let (a, b) = (st.orig[sx.index()], st.orig[sy.index()]);
                if allowed(ctx.original, &st.crossed, ctx.constrained, a, b)
                    && !st.banned.contains(&(sx.min(sy), sx.max(sy)))
                {
                    let c = pair_cost(ctx.original, a, b);
                    if cheapest.map_or(true, |m| c < m) {
                        cheapest = Some(c);
                    }
                }
            }
        }
        // An obstruction with no crossable pair kills the whole state.
        extra = extra.saturating_add(cheapest?);
        for &x in &k {
            gone.insert(map[x.index()]);
        }
    }
}

/// Contract segments of edges too expensive to ever cross again; if the
/// minor is nonplanar the state still needs a crossing between two edges
/// that can afford one.
fn contraction_bound(ctx: &Ctx, st: &State, g: &WeightedMultigraph, slack: u64) -> Option<u64> {
    let mut frozen = vec![false; ctx.original.edge_count()];
    let mut any = false;
    for a in ctx.original.edge_ids() {
        let cheapest = ctx
            .original
            .edge_ids()
            .filter(|&b| allowed(ctx.original, &st.crossed, ctx.constrained, a, b))
            .map(|b| pair_cost(ctx.original, a, b))
            .min();
        if cheapest.map_or(true, |c| c > slack) {
            frozen[a.index()] = true;
            any = true;
        }
    }
    if !any {
        return Some(0);
    }
    // Union endpoints of frozen segments, then test the minor.
    let mut rep: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(rep: &mut [usize], mut v: usize) -> usize {
        while rep[v] != v {
            rep[v] = rep[rep[v]];
            v = rep[v];
        }
        v
    }
    for (i, &(u, v)) in st.ends.iter().enumerate() {
        if frozen[st.orig[i].index()] {
            let (ru, rv) = (find(&mut rep, u.index()), find(&mut rep, v.index()));
            rep[ru] = rv;
        }
    }
    let mut minor = WeightedMultigraph::new();
    let mut label: Vec<Option<VertexId>> = vec![None; g.vertex_count()];
    for v in 0..g.vertex_count() {
        let r = find(&mut rep, v);
        if label[r].is_none() {
            label[r] = Some(minor.add_vertex(&format!("c{r}")).expect("fresh"));
        }
        label[v] = label[r];
    }
    for (i, &(u, v)) in st.ends.iter().enumerate() {
        if frozen[st.orig[i].index()] {
            continue;
        }
        let (lu, lv) = (label[u.index()].unwrap(), label[v.index()].unwrap());
        if lu != lv {
            minor.add_edge(lu, lv, 1).expect("no loops left");
        }
    }
    if planarity::is_planar(&minor) {
        return Some(0);
    }
    // Cheapest pair with both sides still crossable.
    let mut cheapest = None;
    for a in ctx.original.edge_ids().filter(|a| !frozen[a.index()]) {
        for b in ctx.original.edge_ids().filter(|&b| b > a && !frozen[b.index()]) {
            if allowed(ctx.original, &st.crossed, ctx.constrained, a, b) {
                let c = pair_cost(ctx.original, a, b);
                if cheapest.map_or(true, |m| c < m) {
                    cheapest = Some(c);
                }
            }
        }
    }
    cheapest
}

/// Deletion-minimal subset of segments whose restricted rotation still has
/// positive genus.
fn genus_witness(g: &WeightedMultigraph, rows: &[Vec<EdgeId>]) -> Vec<EdgeId> {
    let restricted = |keep: &[bool]| -> usize {
        let ids: Vec<EdgeId> = g.edge_ids().filter(|e| keep[e.index()]).collect();
        let (sub, map) = g.edge_subgraph(&ids);
        let mut inv = vec![None; g.edge_count()];
        for (new, &old) in map.iter().enumerate() {
            inv[old.index()] = Some(EdgeId(new as u32));
        }
        let order = rows
            .iter()
            .map(|row| row.iter().filter_map(|&e| inv[e.index()]).collect())
            .collect();
        RotationSystem { order }.genus(&sub)
    };
    let mut keep = vec![true; g.edge_count()];
    debug_assert!(restricted(&keep) > 0);
    for i in 0..g.edge_count() {
        keep[i] = false;
        if restricted(&keep) == 0 {
            keep[i] = true;
        }
    }
    g.edge_ids().filter(|e| keep[e.index()]).collect()
}

fn dfs(ctx: &mut Ctx, st: &State) -> Result<()> {
    ctx.nodes += 1;
    if let Some(b) = ctx.opts.node_budget {
        if ctx.nodes > b {
            return Err(Error::BudgetExceeded { nodes: ctx.nodes });
        }
    }
    let g = st.graph(ctx.original);
    let witness: Vec<EdgeId>;
    let genus;
    if let Some(rows) = &st.rows {
        let rot = RotationSystem { order: rows.clone() };
        debug_assert!(rot.validate(&g).is_ok());
        genus = rot.genus(&g);
        if genus == 0 {
            let drawing = rebuild(ctx.original, st, &rot)?;
            debug_assert_eq!(drawing.cost(), st.cost);
            ctx.offer(drawing);
            return Ok(());
        }
        witness = genus_witness(&g, rows);
    } else {
        witness = planarity::kuratowski_edges(&g);
        genus = usize::from(!witness.is_empty());
        if witness.is_empty() {
            let rot = planarity::planar_embedding(&g).expect("no obstruction");
            let drawing = rebuild(ctx.original, st, &rot)?;
            debug_assert!(drawing.cost() <= st.cost);
            ctx.offer(drawing);
            return Ok(());
        }
    }
    let cands = candidates(ctx, st, &witness);
    let Some(&(cheapest_here, ..)) = cands.first() else {
        return Ok(());
    };
    if st.cost.saturating_add(cheapest_here) >= ctx.bound() {
        return Ok(());
    }
    if ctx.opts.prune_genus && genus > 1 {
        if let Some(each) = ctx.cheapest_allowed(&st.crossed) {
            let rest = each.saturating_mul(genus as u64 - 1);
            if st.cost.saturating_add(cheapest_here).saturating_add(rest) >= ctx.bound() {
                return Ok(());
            }
        }
    }
    if ctx.opts.prune_packing {
        match packing_bound(ctx, st, &g, &witness) {
            None => return Ok(()),
            Some(extra) => {
                if st.cost.saturating_add(cheapest_here).saturating_add(extra)
                    >= ctx.bound()
                {
                    return Ok(());
                }
            }
        }
    }
    if ctx.opts.prune_contraction {
        let slack = ctx.bound() - st.cost - 1;
        match contraction_bound(ctx, st, &g, slack) {
            None => return Ok(()),
            Some(extra) => {
                if st.cost.saturating_add(cheapest_here.max(extra)) >= ctx.bound() {
                    return Ok(());
                }
            }
        }
    }
    let mut working = st.clone();
    for &(cost, x, y) in &cands {
        if working.cost.saturating_add(cost) >= ctx.bound() {
            break;
        }
        if ctx.constrained {
            for positive in [false, true] {
                let child = working.cross(ctx.original, x, y, positive);
                dfs(ctx, &child)?;
            }
        } else {
            let child = working.cross(ctx.original, x, y, false);
            dfs(ctx, &child)?;
        }
        working.banned.insert((x.min(y), x.max(y)));
    }
    Ok(())
}

fn search(
    g: &WeightedMultigraph,
    rot: Option<&RotationSystem>,
    opts: &SolverOptions,
    seed: Option<CombinatorialDrawing>,
) -> Result<CrossingResult> {
    let mut ctx = Ctx {
        original: g,
        opts,
        constrained: rot.is_some(),
        limit: match opts.cost_cap {
            Some(c) => c.saturating_add(1),
            None => u64::MAX,
        },
        best: None,
        nodes: 0,
    };
    ctx.offer(greedy_drawing(g, rot)?);
    if let Some(d) = seed {
        ctx.offer(d);
    }
    dfs(&mut ctx, &State::root(g, rot))?;
    let nodes = ctx.nodes;
    match ctx.best {
        Some((cost, witness)) => Ok(CrossingResult { cost, witness, nodes }),
        None => Err(Error::CapExceeded { cap: opts.cost_cap.unwrap_or(u64::MAX) }),
    }
}

/// Sub-drawing induced on `sub`, whose edge `i` is `map[i]` in `d`'s
/// graph. Crossings with a deleted edge vanish; the rest keep their
/// relative order.
fn restrict_drawing(
    d: &CombinatorialDrawing,
    sub: &WeightedMultigraph,
    map: &[EdgeId],
) -> Result<CombinatorialDrawing> {
    let mut inv: Vec<Option<EdgeId>> = vec![None; d.graph.edge_count()];
    for (new, &old) in map.iter().enumerate() {
        inv[old.index()] = Some(EdgeId(new as u32));
    }
    let crossings = d.crossings();
    let keep: Vec<bool> = crossings
        .iter()
        .map(|c| inv[c.e.index()].is_some() && inv[c.f.index()].is_some())
        .collect();
    let mut pos: Vec<(usize, usize)> = vec![(0, 0); crossings.len()];
    for &old in map {
        let mut p = 0usize;
        for &i in d.sequence(old) {
            if keep[i] {
                if crossings[i].e == old {
                    pos[i].0 = p;
                } else {
                    pos[i].1 = p;
                }
                p += 1;
            }
        }
    }
    let records = crossings
        .iter()
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(i, c)| CrossingRecord {
            e: inv[c.e.index()].expect("kept"),
            pos_e: pos[i].0,
            f: inv[c.f.index()].expect("kept"),
            pos_f: pos[i].1,
            positive: c.positive,
        })
        .collect();
    let order = d
        .graph
        .vertices()
        .map(|v| {
            d.rotation
                .at(v)
                .iter()
                .filter_map(|&e| inv[e.index()])
                .collect()
        })
        .collect();
    let out = CombinatorialDrawing::new(sub.clone(), RotationSystem { order }, records)?;
    debug_assert!(out.is_realizable());
    Ok(out)
}

/// The seed must be a realizable drawing of this very graph.
fn check_seed(g: &WeightedMultigraph, seed: &CombinatorialDrawing) -> Result<()> {
    let sg = &seed.graph;
    let same = sg.vertex_count() == g.vertex_count()
        && sg.edge_count() == g.edge_count()
        && g.vertices().all(|v| g.name(v) == sg.name(v))
        && g.edge_ids().all(|e| {
            let (a, b) = (g.edge(e), sg.edge(e));
            a.u == b.u && a.v == b.v && a.weight == b.weight
        });
    if !same {
        return Err(Error::BadInstance("seed drawing is for a different graph".into()));
    }
    if !seed.is_realizable() {
        return Err(Error::BadInstance("seed drawing is not realizable".into()));
    }
    Ok(())
}

/// How one core edge was assembled from input edges. The walk direction is
/// from the core edge's canonical tail once the plan is finalized.
#[derive(Clone, Debug)]
enum Build {
    /// A single input edge; `flipped` when the walk runs head to tail.
    Leaf { e: EdgeId, flipped: bool },
    /// Edges running side by side, listed in transversal order at the walk
    /// start.
    Parallel { parts: Vec<Build> },
    /// Edges joined end to end; `joints[i]` is the fused vertex between
    /// `parts[i]` and `parts[i + 1]`. Parts are never serial themselves.
    Serial { parts: Vec<Build>, joints: Vec<usize> },
}

fn reverse_build(b: &mut Build) {
    match b {
        Build::Leaf { flipped, .. } => *flipped = !*flipped,
        Build::Parallel { parts } => {
            parts.reverse();
            for p in parts {
                reverse_build(p);
            }
        }
        Build::Serial { parts, joints } => {
            parts.reverse();
            joints.reverse();
            for p in parts {
                reverse_build(p);
            }
        }
    }
}

fn build_weight(b: &Build, g: &WeightedMultigraph) -> u64 {
    match b {
        Build::Leaf { e, .. } => g.edge(*e).weight,
        Build::Parallel { parts } => parts
            .iter()
            .fold(0u64, |a, p| a.saturating_add(build_weight(p, g))),
        Build::Serial { parts, .. } => parts
            .iter()
            .map(|p| build_weight(p, g))
            .min()
            .expect("serial builds are nonempty"),
    }
}

/// End edges of a build at one of its ends, in rotation order: transversal
/// order at the walk start, reversed at the walk end.
fn fan(b: &Build, at_start: bool, out: &mut Vec<EdgeId>) {
    match b {
        Build::Leaf { e, .. } => out.push(*e),
        Build::Parallel { parts } => {
            if at_start {
                for p in parts {
                    fan(p, true, out);
                }
            } else {
                for p in parts.iter().rev() {
                    fan(p, false, out);
                }
            }
        }
        Build::Serial { parts, .. } => {
            let p = if at_start { &parts[0] } else { parts.last().expect("nonempty") };
            fan(p, at_start, out);
        }
    }
}

/// Input edges pierced when something crosses this build, in transversal
/// order at the walk start, each with its direction relative to the walk.
/// Crossings over a serial build ride a lightest part, which is what makes
/// the core weight of a bend the minimum of its sides.
fn carrier(b: &Build, g: &WeightedMultigraph, out: &mut Vec<(EdgeId, bool)>) {
    match b {
        Build::Leaf { e, flipped } => out.push((*e, *flipped)),
        Build::Parallel { parts } => {
            for p in parts {
                carrier(p, g, out);
            }
        }
        Build::Serial { parts, .. } => {
            let best = parts
                .iter()
                .enumerate()
                .min_by_key(|(i, p)| (build_weight(p, g), *i))
                .expect("nonempty")
                .1;
            carrier(best, g, out);
        }
    }
}

/// Rotation rows for every fused vertex inside the build: the arriving fan
/// reversed, then the departing fan.
fn joint_rows(b: &Build, rows: &mut Vec<Vec<EdgeId>>) {
    match b {
        Build::Leaf { .. } => {}
        Build::Parallel { parts } => {
            for p in parts {
                joint_rows(p, rows);
            }
        }
        Build::Serial { parts, joints } => {
            for (i, &v) in joints.iter().enumerate() {
                let mut row = Vec::new();
                fan(&parts[i], false, &mut row);
                fan(&parts[i + 1], true, &mut row);
                rows[v] = row;
            }
            for p in parts {
                joint_rows(p, rows);
            }
        }
    }
}

struct PlanEdge {
    build: Build,
    /// Input vertex sitting at the core edge's canonical tail.
    start: usize,
}

struct Shrunk {
    core: WeightedMultigraph,
    /// Input vertex to core vertex; fused vertices map to nothing.
    vmap: Vec<Option<VertexId>>,
    plan: Vec<PlanEdge>,
    changed: bool,
}

/// Fuse away what cannot affect the optimum. A degree-two vertex is a bend:
/// its rotation row has no cyclic freedom and any crossing can slide across
/// it, so its two edges join end to end and crossings ride the lighter
/// side. With the rotation free, the members of a parallel class can run
/// side by side along the cheapest member's route in some optimal drawing,
/// so the class joins into one edge of the combined weight. Both moves
/// iterate to a fixpoint; [`lift_drawing`] unrolls a core witness back.
fn shrink(g: &WeightedMultigraph, merge_parallels: bool) -> Shrunk {
    struct Soup {
        u: usize,
        v: usize,
        weight: u64,
        build: Build,
        alive: bool,
    }
    let n = g.vertex_count();
    let mut soup: Vec<Soup> = g
        .edge_ids()
        .map(|e| {
            let ed = g.edge(e);
            Soup {
                u: ed.u.index(),
                v: ed.v.index(),
                weight: ed.weight,
                build: Build::Leaf { e, flipped: false },
                alive: true,
            }
        })
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, s) in soup.iter().enumerate() {
        adj[s.u].push(i);
        adj[s.v].push(i);
    }
    let placeholder = || Build::Leaf { e: EdgeId(0), flipped: false };
    let mut queue: BTreeSet<usize> = (0..n).collect();
    let mut gone = vec![false; n];
    let mut changed = false;
    while let Some(&v) = queue.iter().next() {
        queue.remove(&v);
        if gone[v] {
            continue;
        }
        adj[v].retain(|&i| soup[i].alive);
        adj[v].sort_unstable();
        adj[v].dedup();
        if merge_parallels {
            let mut by_other: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &i in &adj[v] {
                let o = if soup[i].u == v { soup[i].v } else { soup[i].u };
                by_other.entry(o).or_default().push(i);
            }
            if let Some((&o, grp)) = by_other.iter().find(|(&o, g)| o != v && g.len() > 1) {
                let (a, b) = (v.min(o), v.max(o));
                let mut parts = Vec::new();
                let mut weight = 0u64;
                for &i in grp {
                    let mut bld = std::mem::replace(&mut soup[i].build, placeholder());
                    if soup[i].u != a {
                        reverse_build(&mut bld);
                    }
                    parts.push(bld);
                    weight = weight.saturating_add(soup[i].weight);
                    soup[i].alive = false;
                }
                let ni = soup.len();
                soup.push(Soup { u: a, v: b, weight, build: Build::Parallel { parts }, alive: true });
                adj[a].push(ni);
                adj[b].push(ni);
                queue.insert(a);
                queue.insert(b);
                changed = true;
                continue;
            }
        }
        if adj[v].len() == 2 {
            let (i, j) = (adj[v][0], adj[v][1]);
            let a = if soup[i].u == v { soup[i].v } else { soup[i].u };
            let b = if soup[j].u == v { soup[j].v } else { soup[j].u };
            if a != b && a != v && b != v {
                let mut left = std::mem::replace(&mut soup[i].build, placeholder());
                if soup[i].u != a {
                    reverse_build(&mut left); // walk a -> v
                }
                let mut right = std::mem::replace(&mut soup[j].build, placeholder());
                if soup[j].u != v {
                    reverse_build(&mut right); // walk v -> b
                }
                let (mut parts, mut joints) = match left {
                    Build::Serial { parts, joints } => (parts, joints),
                    other => (vec![other], Vec::new()),
                };
                joints.push(v);
                match right {
                    Build::Serial { parts: p2, joints: j2 } => {
                        parts.extend(p2);
                        joints.extend(j2);
                    }
                    other => parts.push(other),
                }
                let weight = soup[i].weight.min(soup[j].weight);
                soup[i].alive = false;
                soup[j].alive = false;
                let ni = soup.len();
                soup.push(Soup { u: a, v: b, weight, build: Build::Serial { parts, joints }, alive: true });
                adj[a].push(ni);
                adj[b].push(ni);
                gone[v] = true;
                queue.insert(a);
                queue.insert(b);
                changed = true;
            }
        }
    }
    let mut vmap = vec![None; n];
    let mut core = WeightedMultigraph::new();
    for v in 0..n {
        if !gone[v] {
            let id = core
                .add_vertex(g.name(VertexId(v as u32)))
                .expect("names copied from a valid graph");
            vmap[v] = Some(id);
        }
    }
    let mut plan = Vec::new();
    for s in soup.into_iter().filter(|s| s.alive) {
        let cu = vmap[s.u].expect("live endpoint");
        let cv = vmap[s.v].expect("live endpoint");
        let id = core.add_edge(cu, cv, s.weight).expect("fused edges are never loops");
        let mut build = s.build;
        let start = if core.canonical_tail(id) == cu {
            s.u
        } else {
            reverse_build(&mut build);
            s.v
        };
        plan.push(PlanEdge { build, start });
    }
    Shrunk { core, vmap, plan, changed }
}

/// Rows of `rot` rewritten onto the core. With parallel classes kept apart
/// (the constrained case) every fan is a single input edge, so each row
/// maps entrywise; fused vertices lose their rows, which carried no
/// constraint anyway.
fn map_rotation(rot: &RotationSystem, sh: &Shrunk, g: &WeightedMultigraph) -> RotationSystem {
    let mut owner: Vec<Option<EdgeId>> = vec![None; g.edge_count()];
    for (ci, pe) in sh.plan.iter().enumerate() {
        for at_start in [true, false] {
            let mut ends = Vec::new();
            fan(&pe.build, at_start, &mut ends);
            debug_assert_eq!(ends.len(), 1, "no parallel fusing under a rotation");
            owner[ends[0].index()] = Some(EdgeId(ci as u32));
        }
    }
    let mut order = vec![Vec::new(); sh.core.vertex_count()];
    for v in g.vertices() {
        if let Some(cv) = sh.vmap[v.index()] {
            order[cv.index()] = rot
                .at(v)
                .iter()
                .map(|&e| owner[e.index()].expect("edges at a live vertex are end pieces"))
                .collect();
        }
    }
    RotationSystem { order }
}

/// Unroll a witness for the shrunk core back to the input graph, keeping
/// cost and realizability. Each crossing of a core edge pierces every
/// carrier strand; a positive crossing presents the partner's strands in
/// reversed transversal order, and strands walked against their own edge
/// flip both position and sign.
fn lift_drawing(
    g: &WeightedMultigraph,
    sh: &Shrunk,
    d: &CombinatorialDrawing,
) -> Result<CombinatorialDrawing> {
    let m = sh.core.edge_count();
    let carriers: Vec<Vec<(EdgeId, bool)>> = sh
        .plan
        .iter()
        .map(|pe| {
            let mut c = Vec::new();
            carrier(&pe.build, g, &mut c);
            // turn "walked against the stored ends" into "walked against
            // the canonical tail", which is what positions count from
            for (e, rev) in &mut c {
                let ed = g.edge(*e);
                let walk_start = if *rev { ed.v } else { ed.u };
                *rev = walk_start != g.canonical_tail(*e);
            }
            c
        })
        .collect();
    let crossings = d.crossings();
    // station offsets: how many lifted records precede each core record
    // along either of its edges
    let mut base: Vec<(usize, usize)> = vec![(0, 0); crossings.len()];
    let mut total: Vec<usize> = vec![0; m];
    for c in sh.core.edge_ids() {
        let mut p = 0usize;
        for &ri in d.sequence(c) {
            let rec = &crossings[ri];
            let partner = if rec.e == c {
                base[ri].0 = p;
                rec.f
            } else {
                base[ri].1 = p;
                rec.e
            };
            p += carriers[partner.index()].len();
        }
        total[c.index()] = p;
    }
    let mut records = Vec::new();
    for (ri, rec) in crossings.iter().enumerate() {
        let t1 = &carriers[rec.e.index()];
        let t2 = &carriers[rec.f.index()];
        for (j, &(l1, rev1)) in t1.iter().enumerate() {
            for (k, &(l2, rev2)) in t2.iter().enumerate() {
                let p1 = base[ri].0 + if rec.positive { t2.len() - 1 - k } else { k };
                let p2 = base[ri].1 + if rec.positive { j } else { t1.len() - 1 - j };
                let pos1 = if rev1 { total[rec.e.index()] - 1 - p1 } else { p1 };
                let pos2 = if rev2 { total[rec.f.index()] - 1 - p2 } else { p2 };
                let positive = rec.positive ^ rev1 ^ rev2 ^ (l2 < l1);
                records.push(if l1 < l2 {
                    CrossingRecord { e: l1, pos_e: pos1, f: l2, pos_f: pos2, positive }
                } else {
                    CrossingRecord { e: l2, pos_e: pos2, f: l1, pos_f: pos1, positive }
                });
            }
        }
    }
    let mut order: Vec<Vec<EdgeId>> = vec![Vec::new(); g.vertex_count()];
    for v in g.vertices() {
        if let Some(cv) = sh.vmap[v.index()] {
            let row = &mut order[v.index()];
            for &c in d.rotation.at(cv) {
                let pe = &sh.plan[c.index()];
                fan(&pe.build, pe.start == v.index(), row);
            }
        }
    }
    for pe in &sh.plan {
        joint_rows(&pe.build, &mut order);
    }
    let out = CombinatorialDrawing::new(g.clone(), RotationSystem { order }, records)?;
    debug_assert_eq!(out.cost(), d.cost());
    debug_assert!(out.is_realizable());
    Ok(out)
}

/// Shrink, search the core, and lift the witness back. A seed is not
/// rewritten onto the core; its cost becomes the cap instead, which bounds
/// the search just as hard because the optimum never exceeds it.
fn solve_core(
    g: &WeightedMultigraph,
    rot: Option<&RotationSystem>,
    opts: &SolverOptions,
    seed: Option<CombinatorialDrawing>,
) -> Result<CrossingResult> {
    if !opts.shrink {
        return search(g, rot, opts, seed);
    }
    let sh = shrink(g, rot.is_none());
    if !sh.changed {
        return search(g, rot, opts, seed);
    }
    let core_rot = rot.map(|r| map_rotation(r, &sh, g));
    let seed_cap = seed.as_ref().map(|d| d.cost());
    let cap = match (opts.cost_cap, seed_cap) {
        (Some(u), Some(s)) => Some(u.min(s)),
        (u, s) => u.or(s),
    };
    let local = SolverOptions { cost_cap: cap, ..opts.clone() };
    match search(&sh.core, core_rot.as_ref(), &local, None) {
        Ok(r) => {
            let witness = lift_drawing(g, &sh, &r.witness)?;
            Ok(CrossingResult { cost: r.cost, witness, nodes: r.nodes })
        }
        Err(Error::CapExceeded { .. }) => match opts.cost_cap {
            // the optimum is at most any seed's cost, so only the caller's
            // own cap can truly be exceeded
            Some(u) if seed_cap.map_or(true, |s| u <= s) => Err(Error::CapExceeded { cap: u }),
            _ => {
                debug_assert!(false, "core search gave up below a seed's cost");
                search(g, rot, opts, seed)
            }
        },
        Err(e) => Err(e),
    }
}

/// Minimum weighted crossing cost over all drawings, with a witness.
/// Biconnected pieces are independent: a drawing of each can be planted
/// inside a face of the next, so costs add and rotations concatenate.
pub fn cr_exact(g: &WeightedMultigraph, opts: &SolverOptions) -> Result<CrossingResult> {
    cr_exact_impl(g, opts, None)
}

/// Like [`cr_exact`], warm-started from a known drawing of `g`. The seed
/// bounds the search immediately, so a near-optimal seed cuts the run to
/// the final optimality sweep. The answer does not depend on the seed.
pub fn cr_exact_seeded(
    g: &WeightedMultigraph,
    opts: &SolverOptions,
    seed: &CombinatorialDrawing,
) -> Result<CrossingResult> {
    check_seed(g, seed)?;
    cr_exact_impl(g, opts, Some(seed))
}

fn cr_exact_impl(
    g: &WeightedMultigraph,
    opts: &SolverOptions,
    seed: Option<&CombinatorialDrawing>,
) -> Result<CrossingResult> {
    let mut rows: Vec<Vec<EdgeId>> = vec![Vec::new(); g.vertex_count()];
    let mut records: Vec<CrossingRecord> = Vec::new();
    let mut total = 0u64;
    let mut nodes = 0u64;
    for block in biconnected_blocks(g) {
        let (sub, map) = g.edge_subgraph(&block);
        let local = SolverOptions {
            cost_cap: opts.cost_cap.map(|c| c.saturating_sub(total)),
            node_budget: opts.node_budget.map(|b| b.saturating_sub(nodes)),
            ..opts.clone()
        };
        let local_seed = match seed {
            Some(d) => Some(restrict_drawing(d, &sub, &map)?),
            None => None,
        };
        let r = match solve_core(&sub, None, &local, local_seed) {
            Err(Error::CapExceeded { .. }) => {
                return Err(Error::CapExceeded {
                    cap: opts.cost_cap.expect("only capped searches give up"),
                });
            }
            Err(Error::BudgetExceeded { nodes: n }) => {
                return Err(Error::BudgetExceeded { nodes: nodes + n });
            }
            other => other?,
        };
        total += r.cost;
        nodes += r.nodes;
        for v in g.vertices() {
            rows[v.index()]
                .extend(r.witness.rotation.at(v).iter().map(|&e| map[e.index()]));
        }
        for c in r.witness.crossings() {
            records.push(CrossingRecord {
                e: map[c.e.index()],
                f: map[c.f.index()],
                ..*c
            });
        }
    }
    if let Some(cap) = opts.cost_cap {
        if total > cap {
            return Err(Error::CapExceeded { cap });
        }
    }
    let witness = CombinatorialDrawing::new(g.clone(), RotationSystem { order: rows }, records)?;
    debug_assert!(witness.is_realizable());
    debug_assert_eq!(witness.cost(), total);
    Ok(CrossingResult { cost: total, witness, nodes })
}

/// Minimum weighted crossing cost over drawings whose rotation matches
/// `rot` exactly.
pub fn cr_exact_rot(
    g: &WeightedMultigraph,
    rot: &RotationSystem,
    opts: &SolverOptions,
) -> Result<CrossingResult> {
    rot.validate(g)?;
    let r = solve_core(g, Some(rot), opts, None)?;
    debug_assert!(r.witness.agrees_with(rot));
    debug_assert!(r.witness.is_realizable());
    Ok(r)
}

/// Like [`cr_exact_rot`], warm-started from a known drawing of `g` whose
/// rotation is exactly `rot`.
pub fn cr_exact_rot_seeded(
    g: &WeightedMultigraph,
    rot: &RotationSystem,
    opts: &SolverOptions,
    seed: &CombinatorialDrawing,
) -> Result<CrossingResult> {
    rot.validate(g)?;
    check_seed(g, seed)?;
    if !seed.agrees_with(rot) {
        return Err(Error::BadInstance(
            "seed drawing disagrees with the prescribed rotation".into(),
        ));
    }
    let r = solve_core(g, Some(rot), opts, Some(seed.clone()))?;
    debug_assert!(r.witness.agrees_with(rot));
    debug_assert!(r.witness.is_realizable());
    Ok(r)
}

/// Edge sets of the biconnected pieces, in discovery order.
fn biconnected_blocks(g: &WeightedMultigraph) -> Vec<Vec<EdgeId>> {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<(EdgeId, VertexId)>> = vec![Vec::new(); n];
    for (i, e) in g.edges().iter().enumerate() {
        let id = EdgeId(i as u32);
        adj[e.u.index()].push((id, e.v));
        adj[e.v.index()].push((id, e.u));
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0usize;
    let mut estack: Vec<EdgeId> = Vec::new();
    let mut out = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX || adj[root].is_empty() {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // frame: vertex, next incidence index, edge used to enter
        let mut stack: Vec<(usize, usize, Option<EdgeId>)> = vec![(root, 0, None)];
        while let Some(&(v, i, entry)) = stack.last() {
            if i < adj[v].len() {
                stack.last_mut().expect("nonempty").1 += 1;
                let (e, w) = adj[v][i];
                if Some(e) == entry {
                    continue;
                }
                if disc[w.index()] == usize::MAX {
                    estack.push(e);
                    disc[w.index()] = time;
                    low[w.index()] = time;
                    time += 1;
                    stack.push((w.index(), 0, Some(e)));
                } else if disc[w.index()] < disc[v] {
                    estack.push(e);
                    low[v] = low[v].min(disc[w.index()]);
                }
            } else {
                stack.pop();
                if let Some(pe) = entry {
                    let p = stack.last().expect("entry edge implies a parent").0;
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = Vec::new();
                        loop {
                            let e = estack.pop().expect("block edges on the stack");
                            block.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        block.sort_unstable();
                        out.push(block);
                    }
                }
            }
        }
    }
    debug_assert!(estack.is_empty());
    debug_assert_eq!(out.iter().map(Vec::len).sum::<usize>(), g.edge_count());
    out.sort_by_key(|b| b[0]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize, w: u64) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..n)
            .map(|i| g.add_vertex(&format!("v{i}")).unwrap())
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(vs[i], vs[j], w).unwrap();
            }
        }
        g
    }

    fn bipartite(a: usize, b: usize, w: u64) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let left: Vec<_> = (0..a)
            .map(|i| g.add_vertex(&format!("l{i}")).unwrap())
            .collect();
        let right: Vec<_> = (0..b)
            .map(|i| g.add_vertex(&format!("r{i}")).unwrap())
            .collect();
        for &u in &left {
            for &v in &right {
                g.add_edge(u, v, w).unwrap();
            }
        }
        g
    }

    #[test]
    fn planar_graphs_cost_nothing() {
        let r = cr_exact(&complete(4, 1), &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 0);
        assert_eq!(r.witness.crossing_count(), 0);
        assert!(r.witness.is_realizable());
    }

    #[test]
    fn k5_and_k33_need_one_crossing() {
        for g in [complete(5, 1), bipartite(3, 3, 1)] {
            let r = cr_exact(&g, &SolverOptions::default()).unwrap();
            assert_eq!(r.cost, 1);
            assert_eq!(r.witness.crossing_count(), 1);
            assert!(r.witness.is_realizable());
        }
    }

    #[test]
    fn weights_multiply_per_crossing() {
        let r = cr_exact(&bipartite(3, 3, 2), &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 4);
    }

    #[test]
    fn pruning_does_not_change_answers() {
        for g in [complete(5, 1), bipartite(3, 3, 1), complete(6, 1)] {
            let fast = cr_exact(&g, &SolverOptions::default()).unwrap();
            let slow = cr_exact(&g, &SolverOptions::no_pruning()).unwrap();
            assert_eq!(fast.cost, slow.cost);
        }
    }

    #[test]
    fn k6_needs_three_crossings() {
        let r = cr_exact(&complete(6, 1), &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 3);
        assert!(r.witness.is_realizable());
    }

    #[test]
    fn witnesses_stay_in_the_searched_class() {
        let g = complete(5, 1);
        let r = cr_exact(&g, &SolverOptions::default()).unwrap();
        for c in r.witness.crossings() {
            assert!(!g.edges_adjacent(c.e, c.f), "free optimum avoids adjacent pairs");
            assert_eq!(r.witness.crossings_between(c.e, c.f), 1);
        }
    }

    #[test]
    fn heavy_edges_dodge_the_crossing() {
        // One K5 edge is made expensive; the single needed crossing picks
        // two of the cheap ones.
        let mut g = complete(5, 1);
        let mut heavy = WeightedMultigraph::new();
        for v in g.vertices() {
            heavy.add_vertex(g.name(v)).unwrap();
        }
        for (i, e) in g.edges().iter().enumerate() {
            let w = if i == 0 { 100 } else { 1 };
            heavy.add_edge(e.u, e.v, w).unwrap();
        }
        g = heavy;
        let r = cr_exact(&g, &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 1);
        for c in r.witness.crossings() {
            assert_ne!(c.e, EdgeId(0));
            assert_ne!(c.f, EdgeId(0));
        }
    }

    #[test]
    fn cap_and_budget_give_up_honestly() {
        let g = complete(5, 1);
        let capped = SolverOptions { cost_cap: Some(0), ..Default::default() };
        match cr_exact(&g, &capped) {
            Err(Error::CapExceeded { cap: 0 }) => {}
            other => panic!("expected a cap error, got {other:?}"),
        }
        let starved = SolverOptions { node_budget: Some(1), ..Default::default() };
        match cr_exact(&complete(6, 1), &starved) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    #[test]
    fn blocks_solve_independently_and_merge() {
        // Two K5 blocks sharing one vertex: costs add, and the merged
        // witness is still one realizable drawing.
        let mut g = WeightedMultigraph::new();
        let hub = g.add_vertex("hub").unwrap();
        let a: Vec<_> = (0..4).map(|i| g.add_vertex(&format!("a{i}")).unwrap()).collect();
        let b: Vec<_> = (0..4).map(|i| g.add_vertex(&format!("b{i}")).unwrap()).collect();
        for side in [&a, &b] {
            for i in 0..4 {
                g.add_edge(hub, side[i], 1).unwrap();
                for j in i + 1..4 {
                    g.add_edge(side[i], side[j], 1).unwrap();
                }
            }
        }
        let r = cr_exact(&g, &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 2);
        assert_eq!(r.witness.crossing_count(), 2);
        assert!(r.witness.is_realizable());
    }

    #[test]
    fn same_input_same_witness() {
        let a = cr_exact(&complete(5, 1), &SolverOptions::default()).unwrap();
        let b = cr_exact(&complete(5, 1), &SolverOptions::default()).unwrap();
        assert_eq!(a.cost, b.cost);
        assert_eq!(a.witness.crossings(), b.witness.crossings());
        assert_eq!(a.witness.rotation.order, b.witness.rotation.order);
    }

    #[test]
    fn twisted_bundle_crosses_its_cheapest_pair() {
        // Three parallel strands with the same cyclic order at both ends
        // cannot be drawn flat; one crossing between the two cheapest
        // strands fixes the order.
        let mut g = WeightedMultigraph::new();
        let u = g.add_vertex("u").unwrap();
        let v = g.add_vertex("v").unwrap();
        let a = g.add_edge(u, v, 2).unwrap();
        let b = g.add_edge(u, v, 3).unwrap();
        let c = g.add_edge(u, v, 5).unwrap();
        let rot = RotationSystem { order: vec![vec![a, b, c], vec![a, b, c]] };
        assert_eq!(rot.genus(&g), 1);
        let r = cr_exact_rot(&g, &rot, &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 6);
        assert!(r.witness.agrees_with(&rot));
        assert!(r.witness.is_realizable());
    }

    #[test]
    fn prescribing_the_free_optimum_costs_the_same() {
        let g = complete(5, 1);
        let free = cr_exact(&g, &SolverOptions::default()).unwrap();
        let pinned =
            cr_exact_rot(&g, &free.witness.rotation, &SolverOptions::default()).unwrap();
        assert_eq!(pinned.cost, free.cost);
    }

    #[test]
    fn one_doubled_bundle_still_costs_one() {
        // K5 with a single edge replaced by two parallel length-two
        // paths: the crossing moves onto one strand, cost stays 1.
        let mut g = complete(5, 1);
        let mut h = WeightedMultigraph::new();
        for v in g.vertices() {
            h.add_vertex(g.name(v)).unwrap();
        }
        for e in g.edge_ids() {
            let (u, v) = (g.edge(e).u, g.edge(e).v);
            if e.index() == 0 {
                for s in 0..2 {
                    let mid = h.add_vertex(&format!("m{s}")).unwrap();
                    h.add_edge(u, mid, 1).unwrap();
                    h.add_edge(mid, v, 1).unwrap();
                }
            } else {
                h.add_edge(u, v, 1).unwrap();
            }
        }
        g = h;
        let r = cr_exact(&g, &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 1);
        assert!(r.witness.is_realizable());
    }

    #[test]
    fn seeding_with_a_witness_changes_nothing_but_speed() {
        let g = complete(5, 1);
        let plain = cr_exact(&g, &SolverOptions::default()).unwrap();
        let seeded = cr_exact_seeded(&g, &SolverOptions::default(), &plain.witness).unwrap();
        assert_eq!(seeded.cost, plain.cost);
        assert!(seeded.nodes <= plain.nodes);

        let rot = plain.witness.rotation.clone();
        let pinned =
            cr_exact_rot_seeded(&g, &rot, &SolverOptions::default(), &plain.witness).unwrap();
        assert_eq!(pinned.cost, plain.cost);
    }

    #[test]
    fn seeds_for_the_wrong_graph_are_rejected() {
        let g = complete(5, 1);
        let d = cr_exact(&g, &SolverOptions::default()).unwrap().witness;
        let other = complete(4, 1);
        assert!(matches!(
            cr_exact_seeded(&other, &SolverOptions::default(), &d),
            Err(Error::BadInstance(_))
        ));
        // A rotation the seed does not follow is just as unusable.
        let mut mirrored = d.rotation.clone();
        mirrored.order[0].reverse();
        assert!(matches!(
            cr_exact_rot_seeded(&g, &mirrored, &SolverOptions::default(), &d),
            Err(Error::BadInstance(_))
        ));
    }

    #[test]
    fn seeds_restrict_to_blocks() {
        // Two K5 blocks glued at a hub vertex; the seed drawing of the
        // whole graph must split cleanly and bound each block's search.
        let mut g = WeightedMultigraph::new();
        let hub = g.add_vertex("hub").unwrap();
        let part = |g: &mut WeightedMultigraph, tag: &str| {
            let mut vs = vec![hub];
            for i in 0..4 {
                vs.push(g.add_vertex(&format!("{tag}{i}")).unwrap());
            }
            for i in 0..5 {
                for j in i + 1..5 {
                    g.add_edge(vs[i], vs[j], 1).unwrap();
                }
            }
        };
        part(&mut g, "a");
        part(&mut g, "b");
        let plain = cr_exact(&g, &SolverOptions::default()).unwrap();
        let seeded = cr_exact_seeded(&g, &SolverOptions::default(), &plain.witness).unwrap();
        assert_eq!(seeded.cost, 2);
        assert_eq!(seeded.cost, plain.cost);
        assert!(seeded.witness.is_realizable());
    }

    #[test]
    fn planar_rotation_is_free_for_k4() {
        let g = complete(4, 1);
        let rot = planarity::planar_embedding(&g).unwrap();
        let r = cr_exact_rot(&g, &rot, &SolverOptions::default()).unwrap();
        assert_eq!(r.cost, 0);
        assert!(r.witness.agrees_with(&rot));
    }

    fn subdivided(g: &WeightedMultigraph) -> WeightedMultigraph {
        let mut h = WeightedMultigraph::new();
        for v in g.vertices() {
            h.add_vertex(g.name(v)).unwrap();
        }
        for e in g.edge_ids() {
            let ed = g.edge(e);
            let mid = h.add_vertex(&format!("s{}", e.index())).unwrap();
            h.add_edge(ed.u, mid, ed.weight).unwrap();
            h.add_edge(mid, ed.v, ed.weight).unwrap();
        }
        h
    }

    #[test]
    fn bends_collapse_before_the_search() {
        let g = subdivided(&complete(5, 1));
        let slow = SolverOptions { shrink: false, ..SolverOptions::default() };
        let on = cr_exact(&g, &SolverOptions::default()).unwrap();
        let off = cr_exact(&g, &slow).unwrap();
        assert_eq!(on.cost, 1);
        assert_eq!(off.cost, 1);
        assert!(on.witness.is_realizable());
    }

    #[test]
    fn bends_collapse_under_a_rotation_too() {
        let g = subdivided(&complete(5, 1));
        let rot = cr_exact(&g, &SolverOptions::default()).unwrap().witness.rotation;
        let slow = SolverOptions { shrink: false, ..SolverOptions::default() };
        let on = cr_exact_rot(&g, &rot, &SolverOptions::default()).unwrap();
        let off = cr_exact_rot(&g, &rot, &slow).unwrap();
        assert_eq!(on.cost, 1);
        assert_eq!(off.cost, 1);
        assert!(on.witness.agrees_with(&rot));
    }

    #[test]
    fn ribbons_collapse_when_rotation_is_free() {
        let mut g = complete(5, 1);
        let (u, v) = (g.edge(EdgeId(0)).u, g.edge(EdgeId(0)).v);
        g.add_edge(u, v, 1).unwrap();
        g.add_edge(u, v, 1).unwrap();
        let slow = SolverOptions { shrink: false, ..SolverOptions::default() };
        let on = cr_exact(&g, &SolverOptions::default()).unwrap();
        let off = cr_exact(&g, &slow).unwrap();
        assert_eq!(on.cost, 1);
        assert_eq!(off.cost, 1);
        assert!(on.witness.is_realizable());
    }

    #[test]
    fn crossings_ride_the_lighter_side_of_a_bend() {
        // K5 at weight ten, with one edge rebuilt as a path whose pieces
        // weigh two and five. The only cheap crossings use the light piece.
        let heavy = complete(5, 10);
        let mut g = WeightedMultigraph::new();
        for v in heavy.vertices() {
            g.add_vertex(heavy.name(v)).unwrap();
        }
        let mid = g.add_vertex("mid").unwrap();
        for e in heavy.edge_ids() {
            let ed = heavy.edge(e);
            if e.index() == 0 {
                g.add_edge(ed.u, mid, 2).unwrap();
                g.add_edge(mid, ed.v, 5).unwrap();
            } else {
                g.add_edge(ed.u, ed.v, 10).unwrap();
            }
        }
        let slow = SolverOptions { shrink: false, ..SolverOptions::default() };
        let on = cr_exact(&g, &SolverOptions::default()).unwrap();
        let off = cr_exact(&g, &slow).unwrap();
        assert_eq!(on.cost, 20);
        assert_eq!(off.cost, 20);
        let weights: Vec<u64> = on
            .witness
            .crossings()
            .iter()
            .flat_map(|c| [g.edge(c.e).weight, g.edge(c.f).weight])
            .collect();
        assert!(weights.contains(&2), "the crossing sits on the cheap piece");
    }
}
