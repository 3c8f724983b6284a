//! Left-right planarity test with an embedding phase.
//!
//! The test runs on an auxiliary simple graph obtained by subdividing every
//! edge once, which makes parallel edges harmless and keeps the mapping back
//! to the input trivial. The core is a dense-array port of the classic
//! left-right partition algorithm: orientation DFS computing lowpoints and
//! nesting depths, a testing DFS maintaining a stack of conflict pairs, and
//! for positive instances a sign-resolution pass followed by an embedding
//! DFS that yields a rotation system of genus zero.

use crate::graph::{EdgeId, WeightedMultigraph};
use crate::rotation::RotationSystem;

/// Interval of return edges on one side of a conflict pair.
#[derive(Clone, Copy, Default)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn is_empty(self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default)]
struct ConflictPair {
    l: Interval,
    r: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.l, &mut self.r);
    }
}

const UNVISITED: usize = usize::MAX;

/// Working state over a simple graph given as an edge list.
struct Lr {
    adj: Vec<Vec<(usize, usize)>>,
    eu: Vec<usize>,
    // Orientation chosen by the first DFS; `tail`/`head` are valid once set.
    oriented: Vec<bool>,
    tail: Vec<usize>,
    head: Vec<usize>,
    outgoing: Vec<Vec<usize>>,
    ordered: Vec<Vec<usize>>,
    parent_edge: Vec<Option<usize>>,
    height: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    lowpt_edge: Vec<Option<usize>>,
    stack_bottom: Vec<usize>,
    refs: Vec<Option<usize>>,
    side: Vec<i8>,
    s: Vec<ConflictPair>,
    roots: Vec<usize>,
}

impl Lr {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let m = edges.len();
        let mut adj = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        Lr {
            adj,
            eu: edges.iter().map(|&(u, _)| u).collect(),
            oriented: vec![false; m],
            tail: vec![0; m],
            head: vec![0; m],
            outgoing: vec![Vec::new(); n],
            ordered: vec![Vec::new(); n],
            parent_edge: vec![None; n],
            height: vec![UNVISITED; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            lowpt_edge: vec![None; m],
            stack_bottom: vec![0; m],
            refs: vec![None; m],
            side: vec![1; m],
            s: Vec::new(),
            roots: Vec::new(),
        }
    }

    fn orient_all(&mut self) {
        let n = self.adj.len();
        let mut ind = vec![0usize; n];
        // Keyed by direction so the resume pass at the tail does not leak
        // into the head's scan of the same edge.
        let mut skip_init = vec![false; 2 * self.eu.len()];
        for v in 0..n {
            if self.height[v] == UNVISITED {
                self.height[v] = 0;
                self.roots.push(v);
                self.orient_from(v, &mut ind, &mut skip_init);
            }
        }
        for v in 0..n {
            let mut order = self.outgoing[v].clone();
            order.sort_by_key(|&e| (self.nesting_depth[e], e));
            self.ordered[v] = order;
        }
    }

    fn dkey(&self, v: usize, e: usize) -> usize {
        2 * e + usize::from(v != self.eu[e])
    }

    fn orient_from(&mut self, root: usize, ind: &mut [usize], skip_init: &mut [bool]) {
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let pe = self.parent_edge[v];
            'scan: while ind[v] < self.adj[v].len() {
                let (w, e) = self.adj[v][ind[v]];
                let key = self.dkey(v, e);
                if !skip_init[key] {
                    if self.oriented[e] {
                        ind[v] += 1;
                        continue 'scan;
                    }
                    self.oriented[e] = true;
                    self.tail[e] = v;
                    self.head[e] = w;
                    self.outgoing[v].push(e);
                    self.lowpt[e] = self.height[v];
                    self.lowpt2[e] = self.height[v];
                    if self.height[w] == UNVISITED {
                        self.parent_edge[w] = Some(e);
                        self.height[w] = self.height[v] + 1;
                        stack.push(v);
                        stack.push(w);
                        skip_init[key] = true;
                        break 'scan;
                    }
                    self.lowpt[e] = self.height[w];
                }
                skip_init[key] = false;
                self.nesting_depth[e] = 2 * self.lowpt[e] as i64;
                if self.lowpt2[e] < self.height[v] {
                    self.nesting_depth[e] += 1;
                }
                if let Some(p) = pe {
                    if self.lowpt[e] < self.lowpt[p] {
                        self.lowpt2[p] = self.lowpt[p].min(self.lowpt2[e]);
                        self.lowpt[p] = self.lowpt[e];
                    } else if self.lowpt[e] > self.lowpt[p] {
                        self.lowpt2[p] = self.lowpt2[p].min(self.lowpt[e]);
                    } else {
                        self.lowpt2[p] = self.lowpt2[p].min(self.lowpt2[e]);
                    }
                }
                ind[v] += 1;
            }
        }
    }

    fn test_all(&mut self) -> bool {
        let n = self.adj.len();
        let mut ind = vec![0usize; n];
        let mut skip_init = vec![false; self.eu.len()];
        for i in 0..self.roots.len() {
            let root = self.roots[i];
            if !self.test_from(root, &mut ind, &mut skip_init) {
                return false;
            }
        }
        true
    }

    fn test_from(&mut self, root: usize, ind: &mut [usize], skip_init: &mut [bool]) -> bool {
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let pe = self.parent_edge[v];
            let mut descended = false;
            'scan: while ind[v] < self.ordered[v].len() {
                let e = self.ordered[v][ind[v]];
                let w = self.head[e];
                if !skip_init[e] {
                    self.stack_bottom[e] = self.s.len();
                    if Some(e) == self.parent_edge[w] {
                        stack.push(v);
                        stack.push(w);
                        skip_init[e] = true;
                        descended = true;
                        break 'scan;
                    }
                    self.lowpt_edge[e] = Some(e);
                    self.s.push(ConflictPair {
                        l: Interval::default(),
                        r: Interval { low: Some(e), high: Some(e) },
                    });
                } else {
                    skip_init[e] = false;
                }
                if self.lowpt[e] < self.height[v] {
                    let p = pe.expect("a return edge implies a parent");
                    if e == self.ordered[v][0] {
                        self.lowpt_edge[p] = self.lowpt_edge[e];
                    } else if !self.add_constraints(e, p) {
                        return false;
                    }
                }
                ind[v] += 1;
            }
            if !descended {
                if let Some(p) = pe {
                    self.remove_back_edges(p);
                }
            }
        }
        true
    }

    fn conflicting(&self, i: Interval, e: usize) -> bool {
        match i.high {
            Some(h) => self.lowpt[h] > self.lowpt[e],
            None => false,
        }
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair::default();
        // Merge the return edges of ei into the right side.
        loop {
            let mut q = self.s.pop().expect("subtree left a pair on the stack");
            if !q.l.is_empty() {
                q.swap();
            }
            if !q.l.is_empty() {
                return false;
            }
            let q_low = q.r.low.expect("stacked interval has a low end");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.r.is_empty() {
                    p.r.high = q.r.high;
                } else {
                    self.refs[p.r.low.expect("nonempty right side")] = q.r.high;
                }
                p.r.low = q.r.low;
            } else {
                self.refs[q_low] = self.lowpt_edge[e];
            }
            if self.s.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // Fold conflicting pairs of the earlier siblings onto the left.
        while self
            .s
            .last()
            .is_some_and(|t| self.conflicting(t.l, ei) || self.conflicting(t.r, ei))
        {
            let mut q = self.s.pop().expect("checked nonempty");
            if self.conflicting(q.r, ei) {
                q.swap();
            }
            if self.conflicting(q.r, ei) {
                return false;
            }
            if let Some(p_low) = p.r.low {
                self.refs[p_low] = q.r.high;
            }
            if let Some(q_low) = q.r.low {
                p.r.low = Some(q_low);
            }
            if p.l.is_empty() {
                p.l.high = q.l.high;
            } else {
                self.refs[p.l.low.expect("nonempty left side")] = q.l.high;
            }
            p.l.low = q.l.low;
        }
        if !(p.l.is_empty() && p.r.is_empty()) {
            self.s.push(p);
        }
        true
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.l.low, p.r.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => unreachable!("stacked pairs are never fully empty"),
        }
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.tail[e];
        while let Some(top) = self.s.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.s.pop().expect("checked nonempty");
            if let Some(l) = p.l.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.s.pop() {
            while let Some(h) = p.l.high {
                if self.head[h] != u {
                    break;
                }
                p.l.high = self.refs[h];
            }
            if p.l.high.is_none() {
                if let Some(l) = p.l.low {
                    self.refs[l] = p.r.low;
                    self.side[l] = -1;
                    p.l.low = None;
                }
            }
            while let Some(h) = p.r.high {
                if self.head[h] != u {
                    break;
                }
                p.r.high = self.refs[h];
            }
            if p.r.high.is_none() {
                if let Some(r) = p.r.low {
                    self.refs[r] = p.l.low;
                    self.side[r] = -1;
                    p.r.low = None;
                }
            }
            self.s.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = self.s.last().expect("a return edge leaves a pair behind");
            self.refs[e] = match (top.l.high, top.r.high) {
                (Some(a), Some(b)) => {
                    if self.lowpt[a] > self.lowpt[b] {
                        Some(a)
                    } else {
                        Some(b)
                    }
                }
                (Some(a), None) => Some(a),
                (None, b) => b,
            };
        }
    }

    /// Resolves the final side of an oriented edge through its ref chain.
    fn resolve_sign(&mut self, e: usize) -> i8 {
        let mut chain = Vec::new();
        let mut cur = e;
        while let Some(next) = self.refs[cur] {
            chain.push(cur);
            cur = next;
        }
        while let Some(x) = chain.pop() {
            let r = self.refs[x].take().expect("chain link");
            self.side[x] *= self.side[r];
        }
        self.side[e]
    }

    /// Builds the rotation of the embedding. Only valid after a successful
    /// testing pass.
    fn embed_all(&mut self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let m = self.eu.len();
        for e in 0..m {
            if self.oriented[e] {
                let sg = self.resolve_sign(e) as i64;
                self.nesting_depth[e] *= sg;
            }
        }
        for v in 0..n {
            let mut order = self.outgoing[v].clone();
            order.sort_by_key(|&e| self.nesting_depth[e]);
            self.ordered[v] = order;
        }
        let mut emb: Vec<Vec<usize>> = (0..n)
            .map(|v| self.ordered[v].iter().map(|&e| self.head[e]).collect())
            .collect();
        let mut left_ref = vec![UNVISITED; n];
        let mut right_ref = vec![UNVISITED; n];
        let mut ind = vec![0usize; n];
        for i in 0..self.roots.len() {
            let root = self.roots[i];
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                'scan: while ind[v] < self.ordered[v].len() {
                    let e = self.ordered[v][ind[v]];
                    ind[v] += 1;
                    let w = self.head[e];
                    if Some(e) == self.parent_edge[w] {
                        emb[w].insert(0, v);
                        left_ref[v] = w;
                        right_ref[v] = w;
                        stack.push(v);
                        stack.push(w);
                        break 'scan;
                    }
                    if self.side[e] == 1 {
                        let anchor = right_ref[w];
                        let pos = emb[w]
                            .iter()
                            .position(|&x| x == anchor)
                            .expect("anchor set before use");
                        emb[w].insert(pos + 1, v);
                    } else {
                        let anchor = left_ref[w];
                        let pos = emb[w]
                            .iter()
                            .position(|&x| x == anchor)
                            .expect("anchor set before use");
                        emb[w].insert(pos, v);
                        left_ref[w] = v;
                    }
                }
            }
        }
        emb
    }
}

/// Auxiliary simple graph: originals keep their index, edge `i` becomes the
/// midpoint vertex `nv + i` splitting it in two.
fn subdivided(g: &WeightedMultigraph, keep: &[bool]) -> (usize, Vec<(usize, usize)>) {
    let nv = g.vertex_count();
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for e in g.edge_ids() {
        if !keep[e.index()] {
            continue;
        }
        let mid = nv + e.index();
        let edge = g.edge(e);
        edges.push((edge.u.index(), mid));
        edges.push((mid, edge.v.index()));
    }
    (nv + g.edge_count(), edges)
}

/// Quick density reject: a simple planar graph has at most 3n - 6 edges.
fn too_dense(g: &WeightedMultigraph, keep: &[bool]) -> bool {
    let n = g.vertex_count();
    if n < 3 {
        return false;
    }
    let mut pairs: Vec<(u32, u32)> = g
        .edge_ids()
        .filter(|e| keep[e.index()])
        .map(|e| {
            let edge = g.edge(e);
            (edge.u.0.min(edge.v.0), edge.u.0.max(edge.v.0))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs.len() > 3 * n - 6
}

pub fn is_planar_subset(g: &WeightedMultigraph, keep: &[bool]) -> bool {
    if too_dense(g, keep) {
        return false;
    }
    let (n, edges) = subdivided(g, keep);
    let mut lr = Lr::new(n, &edges);
    lr.orient_all();
    lr.test_all()
}

pub fn is_planar(g: &WeightedMultigraph) -> bool {
    is_planar_subset(g, &vec![true; g.edge_count()])
}

/// A genus-zero rotation system, or None for nonplanar input.
pub fn planar_embedding(g: &WeightedMultigraph) -> Option<RotationSystem> {
    let keep = vec![true; g.edge_count()];
    let (n, edges) = subdivided(g, &keep);
    let mut lr = Lr::new(n, &edges);
    lr.orient_all();
    if !lr.test_all() {
        return None;
    }
    let emb = lr.embed_all();
    let nv = g.vertex_count();
    let order = (0..nv)
        .map(|v| {
            emb[v]
                .iter()
                .map(|&mid| EdgeId((mid - nv) as u32))
                .collect()
        })
        .collect();
    let rot = RotationSystem { order };
    debug_assert_eq!(rot.genus(g), 0, "left-right embedding must be planar");
    Some(rot)
}

/// Edge-minimal nonplanar subset of the edges, empty when `g` is planar.
/// One deletion pass is enough: once an edge survives, every later deletion
/// only shrinks the graph, and subgraphs of planar graphs stay planar.
pub fn kuratowski_edges(g: &WeightedMultigraph) -> Vec<EdgeId> {
    let mut keep = vec![true; g.edge_count()];
    if is_planar_subset(g, &keep) {
        return Vec::new();
    }
    for i in 0..g.edge_count() {
        keep[i] = false;
        if is_planar_subset(g, &keep) {
            keep[i] = true;
        }
    }
    g.edge_ids().filter(|e| keep[e.index()]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn complete(n: usize) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..n).map(|i| g.add_vertex(&format!("v{i}")).unwrap()).collect();
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(vs[i], vs[j], 1).unwrap();
            }
        }
        g
    }

    fn complete_bipartite(a: usize, b: usize) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let xs: Vec<_> = (0..a).map(|i| g.add_vertex(&format!("x{i}")).unwrap()).collect();
        let ys: Vec<_> = (0..b).map(|i| g.add_vertex(&format!("y{i}")).unwrap()).collect();
        for &x in &xs {
            for &y in &ys {
                g.add_edge(x, y, 1).unwrap();
            }
        }
        g
    }

    /// Minimum genus over all rotation systems, first incident edge pinned
    /// at each vertex. Only usable on small graphs.
    fn min_genus_exhaustive(g: &WeightedMultigraph) -> usize {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for i in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(i, k - 1);
                    out.push(q);
                }
            }
            out
        }
        let mut choice_sets: Vec<Vec<Vec<EdgeId>>> = Vec::new();
        for v in g.vertices() {
            let inc = g.incident_edges(v);
            if inc.len() <= 2 {
                choice_sets.push(vec![inc.to_vec()]);
                continue;
            }
            let rest = &inc[1..];
            let mut cycles = Vec::new();
            for p in perms(rest.len()) {
                let mut cycle = vec![inc[0]];
                cycle.extend(p.iter().map(|&i| rest[i]));
                cycles.push(cycle);
            }
            choice_sets.push(cycles);
        }
        let total: usize = choice_sets.iter().map(|c| c.len()).product();
        assert!(total <= 200_000, "exhaustive oracle out of its depth");
        let mut best = usize::MAX;
        let mut idx = vec![0usize; choice_sets.len()];
        loop {
            let rot = RotationSystem {
                order: idx
                    .iter()
                    .zip(&choice_sets)
                    .map(|(&i, c)| c[i].clone())
                    .collect(),
            };
            best = best.min(rot.genus(g));
            let mut carry = 0;
            loop {
                if carry == idx.len() {
                    return best;
                }
                idx[carry] += 1;
                if idx[carry] < choice_sets[carry].len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
        }
    }

    #[test]
    fn classics() {
        assert!(is_planar(&complete(4)));
        assert!(!is_planar(&complete(5)));
        assert!(!is_planar(&complete_bipartite(3, 3)));
        assert!(is_planar(&complete_bipartite(2, 3)));
        assert!(is_planar(&complete(2)));
        assert!(is_planar(&WeightedMultigraph::new()));
    }

    #[test]
    fn k5_minus_any_edge_is_planar() {
        let g = complete(5);
        for e in g.edge_ids() {
            let mut keep = vec![true; g.edge_count()];
            keep[e.index()] = false;
            assert!(is_planar_subset(&g, &keep));
        }
    }

    #[test]
    fn embeddings_are_planar_rotations() {
        for g in [complete(4), complete_bipartite(2, 3), complete(3)] {
            let rot = planar_embedding(&g).expect("planar");
            rot.validate(&g).unwrap();
            assert_eq!(rot.genus(&g), 0);
        }
        assert!(planar_embedding(&complete(5)).is_none());
        assert!(planar_embedding(&complete_bipartite(3, 3)).is_none());
    }

    #[test]
    fn parallel_edges_do_not_confuse_the_test() {
        let mut g = complete(4);
        let e0 = g.edge(EdgeId(0)).clone();
        g.add_edge(e0.u, e0.v, 1).unwrap();
        g.add_edge(e0.u, e0.v, 1).unwrap();
        assert!(is_planar(&g));
        let rot = planar_embedding(&g).expect("planar");
        assert_eq!(rot.genus(&g), 0);
        let mut k5 = complete(5);
        let f0 = k5.edge(EdgeId(0)).clone();
        k5.add_edge(f0.u, f0.v, 1).unwrap();
        assert!(!is_planar(&k5));
    }

    #[test]
    fn subdivisions_preserve_the_verdict() {
        let mut g = complete_bipartite(3, 3);
        // Replace edge 0 by a three-edge path.
        let u = g.edge(EdgeId(0)).u;
        let v = g.edge(EdgeId(0)).v;
        let m1 = g.add_vertex("m1").unwrap();
        let m2 = g.add_vertex("m2").unwrap();
        g.add_edge(u, m1, 1).unwrap();
        g.add_edge(m1, m2, 1).unwrap();
        g.add_edge(m2, v, 1).unwrap();
        let keep: Vec<bool> = g.edge_ids().map(|e| e != EdgeId(0)).collect();
        assert!(!is_planar_subset(&g, &keep));
    }

    #[test]
    fn witnesses_are_minimal_and_nonplanar() {
        for g in [complete(5), complete_bipartite(3, 3), complete(6)] {
            let wit = kuratowski_edges(&g);
            assert!(!wit.is_empty());
            let mut keep = vec![false; g.edge_count()];
            for &e in &wit {
                keep[e.index()] = true;
            }
            assert!(!is_planar_subset(&g, &keep));
            for &e in &wit {
                keep[e.index()] = false;
                assert!(is_planar_subset(&g, &keep));
                keep[e.index()] = true;
            }
        }
        assert!(kuratowski_edges(&complete(4)).is_empty());
    }

    #[test]
    fn matches_exhaustive_genus_on_random_graphs() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        let mut checked = 0;
        while checked < 40 {
            let n = rng.gen_range(3..=6);
            let m = rng.gen_range(n - 1..=(n + 4).min(9));
            let mut g = WeightedMultigraph::new();
            let vs: Vec<_> = (0..n).map(|i| g.add_vertex(&format!("r{i}")).unwrap()).collect();
            for _ in 0..m {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    g.add_edge(vs[a], vs[b], 1).unwrap();
                }
            }
            let work: usize = g
                .vertices()
                .map(|v| {
                    let d = g.degree(v);
                    (1..d.max(1)).product::<usize>()
                })
                .product();
            if work > 50_000 {
                continue;
            }
            checked += 1;
            let lr_planar = is_planar(&g);
            let genus = min_genus_exhaustive(&g);
            assert_eq!(lr_planar, genus == 0, "disagreement on {g:?}");
            if lr_planar {
                let rot = planar_embedding(&g).expect("planar");
                assert_eq!(rot.genus(&g), 0);
            }
        }
    }
}
