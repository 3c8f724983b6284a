//! Rotation systems and the face structure they induce.
//!
//! A rotation system fixes, at every vertex, a cyclic order of the incident
//! edges. Since self loops are banned a dart is just an (origin, edge) pair,
//! and each edge contributes one dart to each endpoint's cycle. Tracing
//! faces in the induced embedding gives the genus of each component via
//! Euler's formula, which is how everything downstream decides whether an
//! embedding is planar.

use crate::graph::{EdgeId, VertexId, WeightedMultigraph};
use crate::{Error, Result};

/// Half-edge leaving `from` along `edge`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Dart {
    pub from: VertexId,
    pub edge: EdgeId,
}

impl Dart {
    pub fn to(self, g: &WeightedMultigraph) -> VertexId {
        g.edge(self.edge).other(self.from)
    }

    pub fn reversed(self, g: &WeightedMultigraph) -> Dart {
        Dart { from: self.to(g), edge: self.edge }
    }

    /// Dense index in [0, 2e): even for the dart leaving `edge.u`.
    pub fn index(self, g: &WeightedMultigraph) -> usize {
        let side = usize::from(self.from != g.edge(self.edge).u);
        self.edge.index() * 2 + side
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    /// Cyclic edge order per vertex, stored from an arbitrary start.
    pub order: Vec<Vec<EdgeId>>,
}

impl RotationSystem {
    /// Rotation in incidence-list order.
    pub fn from_incidence(g: &WeightedMultigraph) -> Self {
        RotationSystem {
            order: g.vertices().map(|v| g.incident_edges(v).to_vec()).collect(),
        }
    }

    pub fn at(&self, v: VertexId) -> &[EdgeId] {
        &self.order[v.index()]
    }

    /// Checks that each vertex's cycle is a permutation of its incidence.
    pub fn validate(&self, g: &WeightedMultigraph) -> Result<()> {
        if self.order.len() != g.vertex_count() {
            return Err(Error::BadRotation(format!(
                "{} cycles for {} vertices",
                self.order.len(),
                g.vertex_count()
            )));
        }
        for v in g.vertices() {
            let cycle = &self.order[v.index()];
            if cycle.len() != g.degree(v) {
                return Err(Error::BadRotation(format!(
                    "cycle at {} lists {} edges, degree is {}",
                    g.name(v),
                    cycle.len(),
                    g.degree(v)
                )));
            }
            let mut want: Vec<EdgeId> = g.incident_edges(v).to_vec();
            let mut have = cycle.clone();
            want.sort();
            have.sort();
            if want != have {
                return Err(Error::BadRotation(format!(
                    "cycle at {} is not a permutation of its incident edges",
                    g.name(v)
                )));
            }
        }
        Ok(())
    }

    pub fn position(&self, v: VertexId, e: EdgeId) -> Option<usize> {
        self.order[v.index()].iter().position(|&x| x == e)
    }

    pub fn successor(&self, v: VertexId, e: EdgeId) -> EdgeId {
        let cycle = &self.order[v.index()];
        let i = self.position(v, e).expect("edge present in cycle");
        cycle[(i + 1) % cycle.len()]
    }

    pub fn predecessor(&self, v: VertexId, e: EdgeId) -> EdgeId {
        let cycle = &self.order[v.index()];
        let i = self.position(v, e).expect("edge present in cycle");
        cycle[(i + cycle.len() - 1) % cycle.len()]
    }

    /// Substitutes `new_e` for `old_e` in the cycle at `v`, keeping its slot.
    pub fn replace_edge_at(&mut self, v: VertexId, old_e: EdgeId, new_e: EdgeId) {
        let i = self.position(v, old_e).expect("edge present in cycle");
        self.order[v.index()][i] = new_e;
    }

    /// Faces of the induced embedding. Walks use the convention that after
    /// arriving at `w` along `e`, the walk leaves along the successor of `e`
    /// in the cycle at `w`.
    pub fn trace_faces(&self, g: &WeightedMultigraph) -> FaceSet {
        let mut face_of_dart = vec![usize::MAX; 2 * g.edge_count()];
        let mut faces: Vec<Vec<Dart>> = Vec::new();
        for e in g.edge_ids() {
            for from in g.edge(e).ends() {
                let start = Dart { from, edge: e };
                if face_of_dart[start.index(g)] != usize::MAX {
                    continue;
                }
                let id = faces.len();
                let mut walk = Vec::new();
                let mut cur = start;
                loop {
                    face_of_dart[cur.index(g)] = id;
                    walk.push(cur);
                    let w = cur.to(g);
                    cur = Dart { from: w, edge: self.successor(w, cur.edge) };
                    if cur == start {
                        break;
                    }
                }
                faces.push(walk);
            }
        }
        FaceSet { faces, face_of_dart }
    }

    /// Sum of component genera; zero iff the rotation is planar.
    pub fn genus(&self, g: &WeightedMultigraph) -> usize {
        let faces = self.trace_faces(g);
        faces.genus(g)
    }
}

#[derive(Clone, Debug)]
pub struct FaceSet {
    pub faces: Vec<Vec<Dart>>,
    face_of_dart: Vec<usize>,
}

impl FaceSet {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_of(&self, d: Dart, g: &WeightedMultigraph) -> usize {
        self.face_of_dart[d.index(g)]
    }

    /// Total genus over components. Isolated vertices contribute a sphere.
    pub fn genus(&self, g: &WeightedMultigraph) -> usize {
        let parts = g.components();
        let mut comp_of = vec![0usize; g.vertex_count()];
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                comp_of[v.index()] = i;
            }
        }
        let mut verts = vec![0usize; parts.len()];
        let mut edges = vec![0usize; parts.len()];
        let mut fcount = vec![0usize; parts.len()];
        for (i, part) in parts.iter().enumerate() {
            verts[i] = part.len();
        }
        for e in g.edge_ids() {
            edges[comp_of[g.edge(e).u.index()]] += 1;
        }
        for walk in &self.faces {
            fcount[comp_of[walk[0].from.index()]] += 1;
        }
        let mut total = 0usize;
        for i in 0..parts.len() {
            let f = if edges[i] == 0 { 1 } else { fcount[i] };
            let chi = verts[i] as i64 - edges[i] as i64 + f as i64;
            let two_g = 2 - chi;
            debug_assert!(two_g >= 0 && two_g % 2 == 0, "bad Euler characteristic");
            total += (two_g / 2) as usize;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn triangle_rotation_is_planar() {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        g.add_edge(a, b, 1).unwrap();
        g.add_edge(b, c, 1).unwrap();
        g.add_edge(a, c, 1).unwrap();
        let rot = RotationSystem::from_incidence(&g);
        rot.validate(&g).unwrap();
        let faces = rot.trace_faces(&g);
        assert_eq!(faces.face_count(), 2);
        assert_eq!(faces.genus(&g), 0);
    }

    #[test]
    fn k4_rotations_span_sphere_and_torus() {
        let g = k4();
        let base = RotationSystem::from_incidence(&g);
        let mut genera = std::collections::BTreeSet::new();
        let mut planar_faces = 0;
        // Degree-three cycles have two cyclic orders each. Fixing the cycle
        // at v0 and flipping the others covers every rotation up to
        // reflection, which preserves genus anyway.
        for mask in 0u32..8 {
            let mut rot = base.clone();
            for bit in 0..3 {
                if mask & (1 << bit) != 0 {
                    rot.order[bit + 1].reverse();
                }
            }
            let genus = rot.genus(&g);
            if genus == 0 {
                planar_faces = rot.trace_faces(&g).face_count();
            }
            genera.insert(genus);
        }
        assert!(genera.contains(&0));
        assert!(genera.contains(&1));
        assert_eq!(planar_faces, 4);
    }

    #[test]
    fn parallel_edges_trace_cleanly() {
        let mut g = WeightedMultigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.add_edge(a, b, 1).unwrap();
        g.add_edge(a, b, 1).unwrap();
        let rot = RotationSystem::from_incidence(&g);
        // Two parallel edges bound two faces on the sphere: V-E+F = 2-2+2.
        assert_eq!(rot.genus(&g), 0);
        assert_eq!(rot.trace_faces(&g).face_count(), 2);
    }

    #[test]
    fn isolated_vertices_are_spherical() {
        let mut g = WeightedMultigraph::new();
        g.add_vertex("lonely").unwrap();
        g.add_vertex("alone").unwrap();
        let rot = RotationSystem::from_incidence(&g);
        rot.validate(&g).unwrap();
        assert_eq!(rot.genus(&g), 0);
    }

    #[test]
    fn validation_spots_bad_cycles() {
        let g = k4();
        let mut rot = RotationSystem::from_incidence(&g);
        rot.order[0].pop();
        assert!(rot.validate(&g).is_err());
        let mut rot2 = RotationSystem::from_incidence(&g);
        // Edge 5 joins v2 and v3, so it has no business at v1.
        rot2.order[1][0] = EdgeId(5);
        assert!(rot2.validate(&g).is_err());
    }
}
