//! Hexagonal domains.
//!
//! A domain of face-radius ρ consists of all hexagonal faces within
//! combinatorial distance ρ-1 of a central face. The bounding polygon ∂Ω is
//! the ring of face centers at distance ρ on the triangular dual; hexagonal
//! edges crossing it are represented by boundary mid-edge stubs.
//!
//! Geometry is exact: a vertex with integer pair (a, b) sits at the point
//! (a·√3/2, b/2) of the unit-edge embedding, the central face centered at
//! the origin. Mid-edges carry the doubled key (a1+a2, b1+b2) so that the
//! midpoint of two adjacent face centers and the midpoint of the crossed
//! edge coincide as integer keys.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{EdgeId, LatticeGraph, LatticeKind, VertexId};
use crate::error::{Error, Result};

/// Index into `HexDomain::faces`.
pub type FaceId = u32;

/// Index into `HexDomain::mid_edges`.
pub type MidEdgeId = u32;

/// Step directions of the hexagonal lattice, 60° apart starting at 30°.
pub const DIR_STEP: [(i32, i32); 6] = [(1, 1), (0, 2), (-1, 1), (-1, -1), (0, -2), (1, -1)];

/// Axial neighbor directions of the triangular (face) lattice.
pub const AXIAL_DIR: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Sublattice test: vertices with b ≡ 1 (mod 3) use step directions
/// {0,2,4}, the others {1,3,5}.
pub fn is_up_vertex(b: i32) -> bool {
    b.rem_euclid(3) == 1
}

pub fn vertex_dirs(b: i32) -> [u8; 3] {
    if is_up_vertex(b) {
        [0, 2, 4]
    } else {
        [1, 3, 5]
    }
}

/// Signed turn (in π/3 units) between consecutive step directions:
/// +1 is a left turn, -1 a right turn.
pub fn turn(d_in: u8, d_out: u8) -> i32 {
    ((d_out as i32 - d_in as i32 + 9) % 6) - 3
}

pub fn reverse_dir(d: u8) -> u8 {
    (d + 3) % 6
}

/// Position of an integer coordinate pair in the unit-edge embedding.
pub fn point(a: i32, b: i32) -> Complex64 {
    Complex64::new(a as f64 * 3f64.sqrt() / 2.0, b as f64 / 2.0)
}

/// Position of a doubled key (mid-edge keys and center sums live here).
pub fn half_point(key: (i32, i32)) -> Complex64 {
    Complex64::new(key.0 as f64 * 3f64.sqrt() / 4.0, key.1 as f64 / 4.0)
}

/// Center key of the face with axial coordinates (q, r).
pub fn face_center(q: i32, r: i32) -> (i32, i32) {
    (2 * q + r, 3 * r)
}

/// Combinatorial distance of an axial coordinate from the central face.
pub fn hex_distance(q: i32, r: i32) -> i32 {
    (q.abs() + r.abs() + (q + r).abs()) / 2
}

/// One hexagonal face: axial coordinates plus its six corners and edges in
/// counterclockwise order.
#[derive(Debug, Clone)]
pub struct Face {
    pub axial: (i32, i32),
    pub vertices: [VertexId; 6],
    pub edges: [EdgeId; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MidEdgeKind {
    /// Midpoint of a full edge of the domain graph.
    Interior(EdgeId),
    /// Stub crossing ∂Ω, attached to its inner endpoint.
    Boundary { vertex: VertexId, dir: u8 },
}

/// An edge midpoint in the embedding where observables are evaluated.
#[derive(Debug, Clone, Copy)]
pub struct MidEdge {
    pub key: (i32, i32),
    pub kind: MidEdgeKind,
}

impl MidEdge {
    pub fn position(&self) -> Complex64 {
        half_point(self.key)
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self.kind, MidEdgeKind::Boundary { .. })
    }
}

/// A hexagonal domain: the lattice graph plus face and mid-edge structure.
#[derive(Debug, Clone)]
pub struct HexDomain {
    graph: LatticeGraph,
    radius: usize,
    faces: Vec<Face>,
    /// Interior faces on each side of an edge (None = exterior).
    edge_faces: Vec<[Option<FaceId>; 2]>,
    mid_edges: Vec<MidEdge>,
    midedge_by_key: BTreeMap<(i32, i32), MidEdgeId>,
    /// Mid-edge reachable from a vertex in each step direction.
    vertex_midedges: Vec<[Option<MidEdgeId>; 6]>,
    /// Interior faces incident to each vertex.
    vertex_faces: Vec<Vec<FaceId>>,
}

pub(super) fn build(radius: usize) -> Result<HexDomain> {
    if radius < 1 {
        return Err(Error::InvalidParameter(
            "hex domain needs radius >= 1".into(),
        ));
    }
    if radius > 500 {
        return Err(Error::SizeOverflow(format!("hex radius {radius}")));
    }
    let rad = radius as i32;

    // Interior faces: axial coordinates within distance radius-1, in
    // lexicographic order.
    let mut axials: Vec<(i32, i32)> = Vec::new();
    for q in -rad + 1..rad {
        for r in -rad + 1..rad {
            if hex_distance(q, r) < rad {
                axials.push((q, r));
            }
        }
    }

    // Collect corner coordinates; vertex ids by sorted order.
    let mut vertex_ids: BTreeMap<(i32, i32), VertexId> = BTreeMap::new();
    for &(q, r) in &axials {
        let c = face_center(q, r);
        for d in DIR_STEP {
            vertex_ids.insert((c.0 + d.0, c.1 + d.1), VertexId(0));
        }
    }
    for (i, (_, id)) in vertex_ids.iter_mut().enumerate() {
        *id = VertexId(i as u32);
    }
    let coords: Vec<i32> = vertex_ids.keys().flat_map(|&(a, b)| [a, b]).collect();

    // Edges: union of face boundaries, ids by sorted endpoint pairs.
    let mut edge_ids: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    let face_corner = |q: i32, r: i32, k: usize| -> (i32, i32) {
        let c = face_center(q, r);
        let d = DIR_STEP[k];
        (c.0 + d.0, c.1 + d.1)
    };
    for &(q, r) in &axials {
        for k in 0..6 {
            let u = vertex_ids[&face_corner(q, r, k)];
            let v = vertex_ids[&face_corner(q, r, (k + 1) % 6)];
            let key = (u.min(v), u.max(v));
            edge_ids.entry(key).or_insert(EdgeId(0));
        }
    }
    for (i, (_, id)) in edge_ids.iter_mut().enumerate() {
        *id = EdgeId(i as u32);
    }
    let edges: Vec<[VertexId; 2]> = edge_ids.keys().map(|&(u, v)| [u, v]).collect();

    let mut graph =
        LatticeGraph::from_parts(LatticeKind::Hexagonal { radius }, 2, coords, edges.clone());

    // Face records and edge-face incidence.
    let mut faces = Vec::with_capacity(axials.len());
    let mut edge_faces: Vec<[Option<FaceId>; 2]> = vec![[None, None]; edges.len()];
    let mut vertex_faces: Vec<Vec<FaceId>> = vec![Vec::new(); graph.vertex_count()];
    for (fi, &(q, r)) in axials.iter().enumerate() {
        let mut vs = [VertexId(0); 6];
        let mut es = [EdgeId(0); 6];
        for k in 0..6 {
            vs[k] = vertex_ids[&face_corner(q, r, k)];
            let u = vs[k];
            let v = vertex_ids[&face_corner(q, r, (k + 1) % 6)];
            es[k] = edge_ids[&(u.min(v), u.max(v))];
        }
        for k in 0..6 {
            vertex_faces[vs[k].index()].push(fi as FaceId);
            let slot = &mut edge_faces[es[k].index()];
            if slot[0].is_none() {
                slot[0] = Some(fi as FaceId);
            } else {
                debug_assert!(slot[1].is_none());
                slot[1] = Some(fi as FaceId);
            }
        }
        faces.push(Face {
            axial: (q, r),
            vertices: vs,
            edges: es,
        });
    }

    // Mid-edges: interior ones first (by edge id), then boundary stubs at
    // degree-2 vertices (by vertex id).
    let mut mid_edges = Vec::new();
    let mut midedge_by_key = BTreeMap::new();
    let mut vertex_midedges: Vec<[Option<MidEdgeId>; 6]> = vec![[None; 6]; graph.vertex_count()];
    let coord_of = |v: VertexId, g: &LatticeGraph| -> (i32, i32) {
        let c = g.coord(v);
        (c[0], c[1])
    };
    for (i, [u, v]) in edges.iter().enumerate() {
        let cu = coord_of(*u, &graph);
        let cv = coord_of(*v, &graph);
        let key = (cu.0 + cv.0, cu.1 + cv.1);
        let id = mid_edges.len() as MidEdgeId;
        mid_edges.push(MidEdge {
            key,
            kind: MidEdgeKind::Interior(EdgeId(i as u32)),
        });
        midedge_by_key.insert(key, id);
        let step = (cv.0 - cu.0, cv.1 - cu.1);
        let du = DIR_STEP.iter().position(|&d| d == step).expect("unit step") as u8;
        vertex_midedges[u.index()][du as usize] = Some(id);
        vertex_midedges[v.index()][reverse_dir(du) as usize] = Some(id);
    }
    for v in 0..graph.vertex_count() {
        let vid = VertexId(v as u32);
        if graph.degree(vid) == 2 {
            let (a, b) = coord_of(vid, &graph);
            for d in vertex_dirs(b) {
                if vertex_midedges[v][d as usize].is_none() {
                    let step = DIR_STEP[d as usize];
                    let key = (2 * a + step.0, 2 * b + step.1);
                    let id = mid_edges.len() as MidEdgeId;
                    mid_edges.push(MidEdge {
                        key,
                        kind: MidEdgeKind::Boundary {
                            vertex: vid,
                            dir: d,
                        },
                    });
                    midedge_by_key.insert(key, id);
                    vertex_midedges[v][d as usize] = Some(id);
                }
            }
        }
    }

    // Outer boundary: vertices incident to fewer than three interior faces.
    graph.boundary = (0..graph.vertex_count())
        .filter(|&v| vertex_faces[v].len() < 3)
        .map(|v| VertexId(v as u32))
        .collect();

    Ok(HexDomain {
        graph,
        radius,
        faces,
        edge_faces,
        mid_edges,
        midedge_by_key,
        vertex_midedges,
        vertex_faces,
    })
}

impl HexDomain {
    pub fn graph(&self) -> &LatticeGraph {
        &self.graph
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn mid_edges(&self) -> &[MidEdge] {
        &self.mid_edges
    }

    pub fn mid_edge(&self, id: MidEdgeId) -> &MidEdge {
        &self.mid_edges[id as usize]
    }

    pub fn mid_edge_by_key(&self, key: (i32, i32)) -> Option<MidEdgeId> {
        self.midedge_by_key.get(&key).copied()
    }

    /// Mid-edge seen from a vertex in a given step direction.
    pub fn mid_edge_from(&self, v: VertexId, dir: u8) -> Option<MidEdgeId> {
        self.vertex_midedges[v.index()][dir as usize]
    }

    pub fn boundary_mid_edges(&self) -> impl Iterator<Item = MidEdgeId> + '_ {
        (0..self.mid_edges.len() as MidEdgeId).filter(|&i| self.mid_edges[i as usize].is_boundary())
    }

    pub fn interior_faces_of_edge(&self, e: EdgeId) -> [Option<FaceId>; 2] {
        self.edge_faces[e.index()]
    }

    pub fn faces_at_vertex(&self, v: VertexId) -> &[FaceId] {
        &self.vertex_faces[v.index()]
    }

    pub fn vertex_coord(&self, v: VertexId) -> (i32, i32) {
        let c = self.graph.coord(v);
        (c[0], c[1])
    }

    pub fn vertex_position(&self, v: VertexId) -> Complex64 {
        let (a, b) = self.vertex_coord(v);
        point(a, b)
    }

    /// Bitmask (over edge ids) of one face's six boundary edges.
    pub fn face_edge_mask(&self, f: FaceId) -> u64 {
        self.faces[f as usize]
            .edges
            .iter()
            .map(|e| 1u64 << e.index())
            .fold(0, |a, b| a | b)
    }

    /// The ∂Ω polygon: axial coordinates of the face ring at `radius`,
    /// counterclockwise.
    pub fn boundary_polygon(&self) -> Vec<(i32, i32)> {
        let rad = self.radius as i32;
        let mut ring = Vec::with_capacity(6 * self.radius);
        let mut cur = (rad, 0);
        for side in [2usize, 3, 4, 5, 0, 1] {
            let d = AXIAL_DIR[side];
            for _ in 0..rad {
                ring.push(cur);
                cur = (cur.0 + d.0, cur.1 + d.1);
            }
        }
        debug_assert_eq!(cur, (rad, 0));
        ring
    }

    /// The axial coordinates of the three faces around a vertex (interior or
    /// ring faces), counterclockwise — the elementary triangular contour.
    pub fn triangle_around(&self, v: VertexId) -> [(i32, i32); 3] {
        let (a, b) = self.vertex_coord(v);
        let offsets: [(i32, i32); 3] = if is_up_vertex(b) {
            [(0, 2), (-1, -1), (1, -1)]
        } else {
            [(1, 1), (-1, 1), (0, -2)]
        };
        offsets.map(|(da, db)| {
            let key = (a + da, b + db);
            debug_assert_eq!(key.1.rem_euclid(3), 0);
            let r = key.1 / 3;
            let q = (key.0 - r) / 2;
            (q, r)
        })
    }

    /// Triangular dual: one vertex per interior face plus the distinguished
    /// exterior vertex; edges between adjacent interior faces, in bijection
    /// with the bulk hexagonal edges.
    pub fn dual(&self) -> (LatticeGraph, super::DualMap) {
        let faces = self.faces.len();
        let exterior = VertexId(faces as u32);
        let mut coords: Vec<i32> = self
            .faces
            .iter()
            .flat_map(|f| [f.axial.0, f.axial.1])
            .collect();
        coords.extend([i32::MIN / 2, i32::MIN / 2]);

        let mut dual_edges = Vec::new();
        let mut primal_to_dual = vec![None; self.graph.edge_count()];
        let mut dual_to_primal = Vec::new();
        for (i, pair) in self.edge_faces.iter().enumerate() {
            if let [Some(fa), Some(fb)] = pair {
                primal_to_dual[i] = Some(EdgeId(dual_edges.len() as u32));
                dual_to_primal.push(EdgeId(i as u32));
                dual_edges.push([VertexId(*fa), VertexId(*fb)]);
            }
        }
        let dual = LatticeGraph::from_parts(LatticeKind::Triangular, 2, coords, dual_edges);
        (
            dual,
            super::DualMap {
                primal_to_dual,
                dual_to_primal,
                exterior,
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_hex_domain;

    #[test]
    fn radius_one_is_a_single_hexagon() {
        let d = build_hex_domain(1).unwrap();
        assert_eq!(d.face_count(), 1);
        assert_eq!(d.graph().vertex_count(), 6);
        assert_eq!(d.graph().edge_count(), 6);
        // Six boundary stubs, one per vertex.
        assert_eq!(d.boundary_mid_edges().count(), 6);
        assert_eq!(d.mid_edges().len(), 12);
    }

    #[test]
    fn radius_two_is_the_seven_face_flower() {
        let d = build_hex_domain(2).unwrap();
        assert_eq!(d.face_count(), 7);
        assert_eq!(d.graph().vertex_count(), 24);
        assert_eq!(d.graph().edge_count(), 30);
        assert_eq!(d.boundary_mid_edges().count(), 12);
        assert_eq!(d.graph().boundary.len(), 18);
    }

    #[test]
    fn degrees_are_at_most_three() {
        let d = build_hex_domain(3).unwrap();
        let g = d.graph();
        for v in 0..g.vertex_count() {
            assert!(g.degree(VertexId(v as u32)) <= 3);
        }
        // Interior vertices (all three faces present) have degree exactly 3.
        for v in 0..g.vertex_count() {
            if d.faces_at_vertex(VertexId(v as u32)).len() == 3 {
                assert_eq!(g.degree(VertexId(v as u32)), 3);
            }
        }
    }

    #[test]
    fn all_edges_have_unit_length() {
        let d = build_hex_domain(2).unwrap();
        for [u, v] in d.graph().edges() {
            let du = d.vertex_position(*u) - d.vertex_position(*v);
            assert!((du.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn midedge_positions_average_endpoints() {
        let d = build_hex_domain(2).unwrap();
        for me in d.mid_edges() {
            if let MidEdgeKind::Interior(e) = me.kind {
                let [u, v] = d.graph().endpoints(e);
                let mid = (d.vertex_position(u) + d.vertex_position(v)) / 2.0;
                assert!((me.position() - mid).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_polygon_is_closed_and_adjacent() {
        let d = build_hex_domain(2).unwrap();
        let ring = d.boundary_polygon();
        assert_eq!(ring.len(), 12);
        for i in 0..ring.len() {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            let step = (b.0 - a.0, b.1 - a.1);
            assert!(AXIAL_DIR.contains(&step));
            assert_eq!(hex_distance(a.0, a.1), 2);
        }
    }

    #[test]
    fn ring_midpoints_are_boundary_stubs() {
        let d = build_hex_domain(2).unwrap();
        let ring = d.boundary_polygon();
        for i in 0..ring.len() {
            let a = face_center(ring[i].0, ring[i].1);
            let bqr = ring[(i + 1) % ring.len()];
            let b = face_center(bqr.0, bqr.1);
            let key = (a.0 + b.0, a.1 + b.1);
            let id = d.mid_edge_by_key(key).expect("ring midpoint is a mid-edge");
            assert!(d.mid_edge(id).is_boundary());
        }
    }

    #[test]
    fn hex_dual_is_triangular_with_bulk_bijection() {
        let d = build_hex_domain(2).unwrap();
        let (dual, map) = d.dual();
        assert_eq!(dual.vertex_count(), 8); // 7 faces + exterior
        assert_eq!(map.exterior, VertexId(7));
        // Bulk edges: 6 center-petal + 6 petal-petal.
        assert_eq!(dual.edge_count(), 12);
        for e in 0..d.graph().edge_count() {
            if let Some(de) = map.dual_edge(EdgeId(e as u32)) {
                assert_eq!(map.primal_edge(de), EdgeId(e as u32));
            }
        }
        // Central face is adjacent to all six petals.
        let central = d.faces().iter().position(|f| f.axial == (0, 0)).unwrap();
        assert_eq!(dual.degree(VertexId(central as u32)), 6);
    }

    #[test]
    fn triangles_cover_every_vertex() {
        let d = build_hex_domain(2).unwrap();
        for v in 0..d.graph().vertex_count() {
            let tri = d.triangle_around(VertexId(v as u32));
            for (q, r) in tri {
                assert!(hex_distance(q, r) <= 2);
            }
            // The three centers surround the vertex: their mean is the vertex.
            let mean = tri
                .iter()
                .map(|&(q, r)| {
                    let c = face_center(q, r);
                    point(c.0, c.1)
                })
                .sum::<num_complex::Complex64>()
                / 3.0;
            assert!((mean - d.vertex_position(VertexId(v as u32))).norm() < 1e-12);
        }
    }

    #[test]
    fn turn_is_antisymmetric_and_unit() {
        for d_in in 0..6u8 {
            for d_out in 0..6u8 {
                if d_out == d_in || d_out == reverse_dir(d_in) {
                    continue;
                }
                let t = turn(d_in, d_out);
                // Traversing the same corner backwards flips the turn sign.
                assert_eq!(turn(reverse_dir(d_out), reverse_dir(d_in)), -t);
                assert_eq!(turn(d_out, d_in), -t);
            }
        }
    }
}
