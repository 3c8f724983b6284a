//! Weighted multigraphs with stable ids.
//!
//! Vertices are named by whitespace-free tokens and addressed by dense
//! numeric ids in insertion order; edges are addressed the same way.
//! Parallel edges are allowed, self loops are not, and every edge carries a
//! positive integer weight.

use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
}

impl Edge {
    pub fn ends(&self) -> [VertexId; 2] {
        [self.u, self.v]
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Clone, Debug, Default)]
pub struct WeightedMultigraph {
    names: Vec<String>,
    by_name: HashMap<String, VertexId>,
    edges: Vec<Edge>,
    incident: Vec<Vec<EdgeId>>,
}

impl WeightedMultigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a fresh vertex; the name must be unused.
    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        let id = VertexId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), id);
        self.incident.push(Vec::new());
        Ok(id)
    }

    /// Returns the vertex named `name`, adding it if absent.
    pub fn ensure_vertex(&mut self, name: &str) -> VertexId {
        match self.by_name.get(name) {
            Some(&id) => id,
            None => self.add_vertex(name).expect("name checked absent"),
        }
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.by_name.get(name).copied()
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: u64) -> Result<EdgeId> {
        if u == v {
            return Err(Error::SelfLoop(self.names[u.index()].clone()));
        }
        if weight == 0 {
            return Err(Error::ZeroWeight);
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { u, v, weight });
        self.incident[u.index()].push(id);
        self.incident[v.index()].push(id);
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v.index()].len()
    }

    pub fn weighted_degree(&self, v: VertexId) -> u64 {
        self.incident[v.index()]
            .iter()
            .map(|&e| self.edge(e).weight)
            .sum()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// True when `e` and `f` share an endpoint.
    pub fn edges_adjacent(&self, e: EdgeId, f: EdgeId) -> bool {
        let a = self.edge(e);
        let b = self.edge(f);
        a.touches(b.u) || a.touches(b.v)
    }

    /// The endpoint with the lexicographically smaller name. Crossing
    /// sequences along an edge are always ordered starting here.
    pub fn canonical_tail(&self, e: EdgeId) -> VertexId {
        let edge = self.edge(e);
        if self.name(edge.u) <= self.name(edge.v) {
            edge.u
        } else {
            edge.v
        }
    }

    pub fn canonical_head(&self, e: EdgeId) -> VertexId {
        self.edge(e).other(self.canonical_tail(e))
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components as sorted vertex lists, sorted by first vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.components_after_removal(&[])
    }

    /// Components of the graph with the given edges deleted. The result is a
    /// partition of the vertex set; each part is sorted, and parts appear in
    /// order of their smallest vertex.
    pub fn components_after_removal(&self, removed: &[EdgeId]) -> Vec<Vec<VertexId>> {
        let mut gone = vec![false; self.edges.len()];
        for &e in removed {
            gone[e.index()] = true;
        }
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut parts: Vec<Vec<VertexId>> = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut part = vec![VertexId(start as u32)];
            comp[start] = id;
            let mut queue = vec![VertexId(start as u32)];
            while let Some(v) = queue.pop() {
                for &e in self.incident_edges(v) {
                    if gone[e.index()] {
                        continue;
                    }
                    let w = self.edge(e).other(v);
                    if comp[w.index()] == usize::MAX {
                        comp[w.index()] = id;
                        part.push(w);
                        queue.push(w);
                    }
                }
            }
            part.sort();
            parts.push(part);
        }
        parts
    }

    /// Component index per vertex with the given edges deleted.
    pub fn component_labels(&self, removed: &[EdgeId]) -> Vec<usize> {
        let parts = self.components_after_removal(removed);
        let mut label = vec![0usize; self.vertex_count()];
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                label[v.index()] = i;
            }
        }
        label
    }

    /// Is the graph still connected after deleting the given vertices?
    /// Vertex-less and single-vertex remainders count as connected.
    pub fn connected_without(&self, removed: &[VertexId]) -> bool {
        let n = self.vertex_count();
        let mut dead = vec![false; n];
        for &v in removed {
            dead[v.index()] = true;
        }
        let Some(start) = (0..n).find(|&i| !dead[i]) else {
            return true;
        };
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = vec![VertexId(start as u32)];
        let mut reached = 1usize;
        while let Some(v) = queue.pop() {
            for &e in self.incident_edges(v) {
                let w = self.edge(e).other(v);
                if !dead[w.index()] && !seen[w.index()] {
                    seen[w.index()] = true;
                    reached += 1;
                    queue.push(w);
                }
            }
        }
        reached == n - removed.len()
    }

    /// Copy of the graph containing only the given edges (and all vertices).
    /// Edge ids are renumbered; the returned map sends new ids to old ones.
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> (WeightedMultigraph, Vec<EdgeId>) {
        let mut g = WeightedMultigraph::new();
        for v in self.vertices() {
            g.add_vertex(self.name(v)).expect("names unique");
        }
        let mut map = Vec::with_capacity(keep.len());
        for &e in keep {
            let edge = self.edge(e);
            g.add_edge(edge.u, edge.v, edge.weight).expect("valid edge");
            map.push(e);
        }
        (g, map)
    }

    /// Suppresses every degree-two vertex (splicing its two edges into one)
    /// and reports whether the result is a simple graph on at least four
    /// vertices with no cut set of fewer than three vertices. Suppressing a
    /// cycle down to a self loop reports false.
    pub fn is_subdivision_of_three_connected(&self) -> bool {
        // Suppression on a copy represented as an edge list between the
        // vertices of degree != 2.
        let keep: Vec<VertexId> = self.vertices().filter(|&v| self.degree(v) != 2).collect();
        if keep.len() < 4 {
            return false;
        }
        let is_kept = {
            let mut k = vec![false; self.vertex_count()];
            for &v in &keep {
                k[v.index()] = true;
            }
            k
        };
        // Walk each chain of degree-two vertices starting from a kept end.
        let mut spliced: Vec<(VertexId, VertexId)> = Vec::new();
        let mut used = vec![false; self.edge_count()];
        for &start in &keep {
            for &first in self.incident_edges(start) {
                if used[first.index()] {
                    continue;
                }
                let mut prev = start;
                let mut via = first;
                used[first.index()] = true;
                let mut cur = self.edge(via).other(prev);
                while !is_kept[cur.index()] {
                    let &next = self
                        .incident_edges(cur)
                        .iter()
                        .find(|&&e| e != via)
                        .expect("degree-two vertex has a second edge");
                    used[next.index()] = true;
                    prev = cur;
                    via = next;
                    cur = self.edge(via).other(prev);
                }
                let _ = prev;
                if cur == start {
                    // Chain closed into a self loop.
                    return false;
                }
                spliced.push((start.min(cur), start.max(cur)));
            }
        }
        // Every edge must have been reached: a component made purely of
        // degree-two vertices is a cycle, which is not three-connected.
        if used.iter().any(|&u| !u) {
            return false;
        }
        // Each chain is walked once (its far edge is marked used before the
        // other end sees it), so duplicates in `spliced` are parallel edges
        // of the suppressed graph, which must be simple.
        let mut sorted = spliced.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != spliced.len() {
            return false;
        }
        let mut g = WeightedMultigraph::new();
        let mut remap = HashMap::new();
        for &v in &keep {
            remap.insert(v, g.add_vertex(self.name(v)).expect("names unique"));
        }
        for &(a, b) in &sorted {
            g.add_edge(remap[&a], remap[&b], 1).expect("no self loops here");
        }
        if !g.is_connected() {
            return false;
        }
        let vs: Vec<VertexId> = g.vertices().collect();
        for i in 0..vs.len() {
            if !g.connected_without(&[vs[i]]) {
                return false;
            }
            for j in i + 1..vs.len() {
                if !g.connected_without(&[vs[i], vs[j]]) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..n).map(|i| g.add_vertex(&format!("p{i}")).unwrap()).collect();
        for w in vs.windows(2) {
            g.add_edge(w[0], w[1], 1).unwrap();
        }
        g
    }

    fn complete(n: usize) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = (0..n).map(|i| g.add_vertex(&format!("k{i}")).unwrap()).collect();
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(vs[i], vs[j], 1).unwrap();
            }
        }
        g
    }

    #[test]
    fn rejects_self_loops_and_zero_weights() {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        assert!(matches!(g.add_edge(a, a, 1), Err(Error::SelfLoop(_))));
        assert!(matches!(g.add_edge(a, b, 0), Err(Error::ZeroWeight)));
        assert!(g.add_edge(a, b, 2).is_ok());
        assert!(matches!(g.add_vertex("a"), Err(Error::DuplicateVertex(_))));
    }

    #[test]
    fn parallel_edges_are_distinct() {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let e0 = g.add_edge(a, b, 1).unwrap();
        let e1 = g.add_edge(a, b, 3).unwrap();
        assert_ne!(e0, e1);
        assert_eq!(g.degree(a), 2);
        assert_eq!(g.weighted_degree(a), 4);
        assert_eq!(g.total_weight(), 4);
    }

    #[test]
    fn components_after_removal_partitions() {
        let g = path(4);
        let parts = g.components_after_removal(&[EdgeId(1)]);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], vec![VertexId(0), VertexId(1)]);
        assert_eq!(parts[1], vec![VertexId(2), VertexId(3)]);
        let whole = g.components_after_removal(&[]);
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].len(), 4);
    }

    #[test]
    fn connectivity_probes() {
        let g = complete(4);
        assert!(g.is_connected());
        assert!(g.connected_without(&[VertexId(0)]));
        assert!(g.connected_without(&[VertexId(0), VertexId(1)]));
        let p = path(3);
        assert!(!p.connected_without(&[VertexId(1)]) || p.vertex_count() == 2);
    }

    #[test]
    fn canonical_tail_uses_names() {
        let mut g = WeightedMultigraph::new();
        let z = g.add_vertex("z").unwrap();
        let a = g.add_vertex("a").unwrap();
        let e = g.add_edge(z, a, 1).unwrap();
        assert_eq!(g.canonical_tail(e), a);
        assert_eq!(g.canonical_head(e), z);
    }

    #[test]
    fn k4_is_subdivision_of_three_connected() {
        assert!(complete(4).is_subdivision_of_three_connected());
        assert!(complete(5).is_subdivision_of_three_connected());
    }

    #[test]
    fn subdivided_k4_counts() {
        let mut g = complete(4);
        // Subdivide edge 0 (between k0 and k1) twice.
        let u = g.edge(EdgeId(0)).u;
        let v = g.edge(EdgeId(0)).v;
        let m1 = g.add_vertex("m1").unwrap();
        let m2 = g.add_vertex("m2").unwrap();
        g.add_edge(u, m1, 1).unwrap();
        g.add_edge(m1, m2, 1).unwrap();
        g.add_edge(m2, v, 1).unwrap();
        // Remove the original edge by rebuilding without it.
        let keep: Vec<EdgeId> = g.edge_ids().filter(|&e| e != EdgeId(0)).collect();
        let (h, _) = g.edge_subgraph(&keep);
        assert!(h.is_subdivision_of_three_connected());
    }

    #[test]
    fn cycles_and_paths_are_not() {
        assert!(!path(5).is_subdivision_of_three_connected());
        let mut c = WeightedMultigraph::new();
        let vs: Vec<_> = (0..4).map(|i| c.add_vertex(&format!("c{i}")).unwrap()).collect();
        for i in 0..4 {
            c.add_edge(vs[i], vs[(i + 1) % 4], 1).unwrap();
        }
        assert!(!c.is_subdivision_of_three_connected());
    }

    #[test]
    fn k33_is_subdivision_of_three_connected() {
        let mut g = WeightedMultigraph::new();
        let a: Vec<_> = (0..3).map(|i| g.add_vertex(&format!("a{i}")).unwrap()).collect();
        let b: Vec<_> = (0..3).map(|i| g.add_vertex(&format!("b{i}")).unwrap()).collect();
        for &x in &a {
            for &y in &b {
                g.add_edge(x, y, 1).unwrap();
            }
        }
        assert!(g.is_subdivision_of_three_connected());
    }
}
