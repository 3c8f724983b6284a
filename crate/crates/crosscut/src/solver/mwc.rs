//! Exact minimum three-way cuts by exhaustive assignment of the free
//! vertices. The sizes this crate feeds it are tiny, so a plain base-3
//! sweep beats anything cleverer.

use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::{Error, Result};

/// A weighted graph with three distinct terminals to disconnect.
#[derive(Clone, Debug)]
pub struct MultiwayInstance {
    pub graph: WeightedMultigraph,
    pub terminals: [VertexId; 3],
}

impl MultiwayInstance {
    /// Requires a connected graph; disconnected inputs make the cut
    /// weight degenerate in ways the reduction does not model.
    pub fn new(graph: WeightedMultigraph, terminals: [VertexId; 3]) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::BadInstance("the graph must be connected".into()));
        }
        Self::relaxed(graph, terminals)
    }

    /// Skips the connectivity check, for callers that only need the
    /// terminals pinned down.
    pub fn relaxed(graph: WeightedMultigraph, terminals: [VertexId; 3]) -> Result<Self> {
        for t in terminals {
            if t.index() >= graph.vertex_count() {
                return Err(Error::BadInstance("terminal out of range".into()));
            }
        }
        if terminals[0] == terminals[1] || terminals[0] == terminals[2] || terminals[1] == terminals[2] {
            return Err(Error::BadInstance("terminals must be distinct".into()));
        }
        Ok(MultiwayInstance { graph, terminals })
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.contains(&v)
    }
}

/// A three-way split of the vertices and the edges it cuts.
#[derive(Clone, Debug)]
pub struct CutSolution {
    /// Cut edges, ascending.
    pub cut: Vec<EdgeId>,
    pub weight: u64,
    /// Vertex sets per terminal, each ascending and containing its one.
    pub parts: [Vec<VertexId>; 3],
}

/// Part index per vertex under a labeling, or the cut edges it induces.
fn cut_of(g: &WeightedMultigraph, label: &[usize]) -> (Vec<EdgeId>, u64) {
    let mut cut = Vec::new();
    let mut weight = 0u64;
    for e in g.edge_ids() {
        let ed = g.edge(e);
        if label[ed.u.index()] != label[ed.v.index()] {
            cut.push(e);
            weight += ed.weight;
        }
    }
    (cut, weight)
}

/// True when removing `cut` leaves the three terminals in three different
/// components.
pub fn mwc_feasible(inst: &MultiwayInstance, cut: &[EdgeId]) -> bool {
    let labels = inst.graph.component_labels(cut);
    let [a, b, c] = inst.terminals;
    labels[a.index()] != labels[b.index()]
        && labels[a.index()] != labels[c.index()]
        && labels[b.index()] != labels[c.index()]
}

/// Minimum-weight edge set whose removal separates the three terminals
/// pairwise. Ties go to the assignment that comes first when the free
/// vertices are swept in id order, least significant first.
pub fn mwc_exact(inst: &MultiwayInstance) -> Result<CutSolution> {
    let g = &inst.graph;
    let free: Vec<VertexId> =
        g.vertices().filter(|&v| !inst.is_terminal(v)).collect();
    if free.len() > 16 {
        return Err(Error::TooLarge(format!(
            "{} free vertices is past the exhaustive limit of 16",
            free.len()
        )));
    }
    let mut label = vec![0usize; g.vertex_count()];
    for (i, t) in inst.terminals.iter().enumerate() {
        label[t.index()] = i;
    }
    let total = 3usize.pow(free.len() as u32);
    let mut best: Option<(u64, Vec<usize>)> = None;
    for code in 0..total {
        let mut c = code;
        for &v in &free {
            label[v.index()] = c % 3;
            c /= 3;
        }
        let (_, weight) = cut_of(g, &label);
        if best.as_ref().map_or(true, |(w, _)| weight < *w) {
            best = Some((weight, label.clone()));
        }
    }
    let (weight, label) = best.expect("at least one assignment exists");
    let (cut, w2) = cut_of(g, &label);
    debug_assert_eq!(weight, w2);
    let mut parts: [Vec<VertexId>; 3] = Default::default();
    for v in g.vertices() {
        parts[label[v.index()]].push(v);
    }
    let solution = CutSolution { cut, weight, parts };
    debug_assert!(mwc_feasible(inst, &solution.cut));
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(names: &[&str], edges: &[(usize, usize, u64)]) -> WeightedMultigraph {
        let mut g = WeightedMultigraph::new();
        let vs: Vec<_> = names.iter().map(|n| g.add_vertex(n).unwrap()).collect();
        for &(u, v, w) in edges {
            g.add_edge(vs[u], vs[v], w).unwrap();
        }
        g
    }

    #[test]
    fn triangle_of_terminals_cuts_all_three_edges() {
        // Separating the corners of a triangle pairwise takes all three
        // edges: leaving any one keeps two terminals connected.
        let g = named(&["a", "b", "c"], &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        let inst = MultiwayInstance::new(
            g,
            [VertexId(0), VertexId(1), VertexId(2)],
        )
        .unwrap();
        let sol = mwc_exact(&inst).unwrap();
        assert_eq!(sol.weight, 3);
        assert_eq!(sol.cut.len(), 3);
    }

    #[test]
    fn star_center_goes_to_the_heaviest_arm() {
        let g = named(
            &["t0", "t1", "t2", "m"],
            &[(0, 3, 5), (1, 3, 2), (2, 3, 1)],
        );
        let inst =
            MultiwayInstance::new(g, [VertexId(0), VertexId(1), VertexId(2)]).unwrap();
        let sol = mwc_exact(&inst).unwrap();
        assert_eq!(sol.weight, 3, "cut the two lighter arms");
        assert!(sol.parts[0].contains(&VertexId(3)));
    }

    #[test]
    fn weights_steer_the_split() {
        // A path t0 - a - t1 with a heavy tie from a to t2: the cheap cut
        // severs the two path edges around whichever side is lighter.
        let g = named(
            &["t0", "t1", "t2", "a"],
            &[(0, 3, 1), (3, 1, 4), (3, 2, 2)],
        );
        let inst =
            MultiwayInstance::new(g, [VertexId(0), VertexId(1), VertexId(2)]).unwrap();
        let sol = mwc_exact(&inst).unwrap();
        assert_eq!(sol.weight, 3, "keep a with t1, cut the 1 and 2 edges");
        assert!(sol.parts[1].contains(&VertexId(3)));
    }

    #[test]
    fn feasibility_checks_pairwise_separation() {
        let g = named(&["a", "b", "c", "m"], &[(0, 3, 1), (1, 3, 1), (2, 3, 1)]);
        let inst =
            MultiwayInstance::new(g, [VertexId(0), VertexId(1), VertexId(2)]).unwrap();
        assert!(mwc_feasible(&inst, &[EdgeId(0), EdgeId(1)]));
        assert!(!mwc_feasible(&inst, &[EdgeId(0)]));
        assert!(mwc_feasible(&inst, &[EdgeId(0), EdgeId(1), EdgeId(2)]));
    }

    #[test]
    fn instances_reject_bad_terminals() {
        let g = named(&["a", "b", "c"], &[(0, 1, 1), (1, 2, 1)]);
        assert!(MultiwayInstance::new(g.clone(), [VertexId(0), VertexId(0), VertexId(2)])
            .is_err());
        let two = named(&["a", "b"], &[(0, 1, 1)]);
        assert!(MultiwayInstance::new(two, [VertexId(0), VertexId(1), VertexId(7)]).is_err());
    }
}
