//! Finite lattice domains with geometric embeddings, boundary sets, and
//! planar duals.
//!
//! Vertex and edge ids are dense and assigned deterministically from the
//! constructor arguments: vertices in lexicographic coordinate order, edges
//! in lexicographic (min endpoint, direction) order. Graphs are immutable
//! after construction and safe to share across threads.

pub mod hex;

pub use hex::{HexDomain, MidEdge, MidEdgeKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense vertex index into a [`LatticeGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

/// Dense edge index into a [`LatticeGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
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

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Rectangle [0,n] x [0,m] of the square lattice.
    Square { width: usize, height: usize },
    /// Box [-n,n]^d of the hypercubic lattice.
    Hypercubic { dim: usize, radius: usize },
    /// Hexagonal-lattice domain of all faces within a face radius.
    Hexagonal { radius: usize },
    /// Triangular graph (arises as the dual of a hexagonal domain).
    Triangular,
}

impl LatticeKind {
    pub fn name(&self) -> &'static str {
        match self {
            LatticeKind::Square { .. } => "square",
            LatticeKind::Hypercubic { .. } => "hypercubic",
            LatticeKind::Hexagonal { .. } => "hexagonal",
            LatticeKind::Triangular => "triangular",
        }
    }
}

/// Immutable finite graph with embedding and named boundary sets.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    kind: LatticeKind,
    dim: usize,
    /// Flattened integer coordinates, `dim` per vertex. For hexagonal
    /// domains the pair (a, b) encodes the position (a*sqrt(3)/2, b/2).
    coords: Vec<i32>,
    edges: Vec<[VertexId; 2]>,
    /// Per-vertex incident (neighbor, edge) lists, sorted by edge id.
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    pub left: Vec<VertexId>,
    pub right: Vec<VertexId>,
    pub top: Vec<VertexId>,
    pub bottom: Vec<VertexId>,
    /// The outer boundary: ∂Λ_n for boxes, the outer cycle for hexagonal
    /// domains, all four sides for rectangles.
    pub boundary: Vec<VertexId>,
    pub origin: Option<VertexId>,
}

impl LatticeGraph {
    pub fn kind(&self) -> &LatticeKind {
        &self.kind
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.index()]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn coord(&self, v: VertexId) -> &[i32] {
        let i = v.index() * self.dim;
        &self.coords[i..i + self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Edge between two vertices, if present.
    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.adjacency[a.index()]
            .iter()
            .find(|(w, _)| *w == b)
            .map(|(_, e)| *e)
    }

    /// JSON description (kind, dims, counts) for experiment manifests.
    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind.name(),
            "params": self.kind,
            "vertices": self.vertex_count(),
            "edges": self.edge_count(),
        })
    }

    /// Assemble a graph from explicit parts; used for small custom graphs in
    /// tests and for dual graphs. Edges must be given in id order and free of
    /// loops and duplicates.
    pub fn from_parts(
        kind: LatticeKind,
        dim: usize,
        coords: Vec<i32>,
        edges: Vec<[VertexId; 2]>,
    ) -> LatticeGraph {
        let n = coords.len().checked_div(dim).unwrap_or(0);
        let mut adjacency = vec![Vec::new(); n];
        for (i, [a, b]) in edges.iter().enumerate() {
            assert_ne!(a, b, "loop edge");
            let e = EdgeId(i as u32);
            adjacency[a.index()].push((*b, e));
            adjacency[b.index()].push((*a, e));
        }
        LatticeGraph {
            kind,
            dim,
            coords,
            edges,
            adjacency,
            left: Vec::new(),
            right: Vec::new(),
            top: Vec::new(),
            bottom: Vec::new(),
            boundary: Vec::new(),
            origin: None,
        }
    }

    /// A 4-cycle; the smallest graph with a nontrivial cluster weight.
    pub fn cycle(len: usize) -> LatticeGraph {
        assert!(len >= 3);
        let coords: Vec<i32> = (0..len as i32).flat_map(|i| [i, 0]).collect();
        let edges: Vec<[VertexId; 2]> = (0..len)
            .map(|i| [VertexId(i as u32), VertexId(((i + 1) % len) as u32)])
            .collect();
        LatticeGraph::from_parts(LatticeKind::Triangular, 2, coords, edges)
    }
}

/// Rectangle [0,n] x [0,m]: integer vertices, nearest-neighbor edges,
/// left/right/top/bottom boundary sets.
pub fn build_rectangle(n: usize, m: usize) -> Result<LatticeGraph> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidParameter(format!(
            "rectangle needs n,m >= 1, got ({n},{m})"
        )));
    }
    let vx = n.checked_add(1).and_then(|a| a.checked_mul(m + 1));
    match vx {
        Some(v) if v <= u32::MAX as usize / 4 => {}
        _ => return Err(Error::SizeOverflow(format!("rectangle ({n},{m})"))),
    }
    let cols = (n + 1) as i32;
    let rows = (m + 1) as i32;
    let id = |x: i32, y: i32| VertexId((x * rows + y) as u32);

    let mut coords = Vec::with_capacity(((cols * rows) as usize) * 2);
    let mut edges = Vec::new();
    for x in 0..cols {
        for y in 0..rows {
            coords.extend([x, y]);
        }
    }
    // Lexicographic (min endpoint, direction) with +x before +y.
    for x in 0..cols {
        for y in 0..rows {
            if x + 1 < cols {
                edges.push([id(x, y), id(x + 1, y)]);
            }
            if y + 1 < rows {
                edges.push([id(x, y), id(x, y + 1)]);
            }
        }
    }
    let mut g = LatticeGraph::from_parts(
        LatticeKind::Square {
            width: n,
            height: m,
        },
        2,
        coords,
        edges,
    );
    g.left = (0..rows).map(|y| id(0, y)).collect();
    g.right = (0..rows).map(|y| id(cols - 1, y)).collect();
    g.bottom = (0..cols).map(|x| id(x, 0)).collect();
    g.top = (0..cols).map(|x| id(x, rows - 1)).collect();
    let mut boundary: Vec<VertexId> = (0..cols)
        .flat_map(|x| (0..rows).map(move |y| (x, y)))
        .filter(|&(x, y)| x == 0 || x == cols - 1 || y == 0 || y == rows - 1)
        .map(|(x, y)| id(x, y))
        .collect();
    boundary.sort();
    g.boundary = boundary;
    Ok(g)
}

/// Box Λ_n = [-n,n]^d of the hypercubic lattice, with ∂Λ_n (vertices having
/// some coordinate of modulus n) and the origin marked.
pub fn build_box(d: usize, n: usize) -> Result<LatticeGraph> {
    if d < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!(
            "box needs d,n >= 1, got ({d},{n})"
        )));
    }
    let side = 2 * n + 1;
    let mut count: usize = 1;
    for _ in 0..d {
        count = count
            .checked_mul(side)
            .filter(|&c| c <= u32::MAX as usize / 4)
            .ok_or_else(|| Error::SizeOverflow(format!("box d={d}, n={n}")))?;
    }
    let nn = n as i32;

    // Vertex id = lexicographic rank of the coordinate vector.
    let rank = |coord: &[i32]| -> u32 {
        let mut r: usize = 0;
        for &c in coord {
            r = r * side + (c + nn) as usize;
        }
        r as u32
    };

    let mut coords = vec![0i32; count * d];
    let mut cur = vec![-nn; d];
    for v in 0..count {
        coords[v * d..(v + 1) * d].copy_from_slice(&cur);
        for axis in (0..d).rev() {
            if cur[axis] < nn {
                cur[axis] += 1;
                break;
            }
            cur[axis] = -nn;
        }
    }

    let mut edges = Vec::new();
    for v in 0..count {
        let coord = &coords[v * d..(v + 1) * d];
        for axis in 0..d {
            if coord[axis] < nn {
                let mut w = coord.to_vec();
                w[axis] += 1;
                edges.push([VertexId(v as u32), VertexId(rank(&w))]);
            }
        }
    }

    let mut g = LatticeGraph::from_parts(
        LatticeKind::Hypercubic { dim: d, radius: n },
        d,
        coords,
        edges,
    );
    g.boundary = (0..count)
        .filter(|&v| {
            g.coord(VertexId(v as u32))
                .iter()
                .any(|&c| c.unsigned_abs() as usize == n)
        })
        .map(|v| VertexId(v as u32))
        .collect();
    g.origin = Some(VertexId(rank(&vec![0; d])));
    Ok(g)
}

/// Hexagonal-lattice domain of all faces within `radius` of a central face.
/// See [`HexDomain`] for the face and mid-edge structure used by the loop
/// O(n) model and the parafermionic observable.
pub fn build_hex_domain(radius: usize) -> Result<HexDomain> {
    hex::build(radius)
}

/// Edge bijection between a planar graph and its dual.
///
/// Only bulk edges (those separating two interior faces) are mapped; each
/// boundary edge borders the exterior face, which is represented by one
/// distinguished dual vertex and carries no materialized dual edges, keeping
/// the dual simple.
#[derive(Debug, Clone)]
pub struct DualMap {
    primal_to_dual: Vec<Option<EdgeId>>,
    dual_to_primal: Vec<EdgeId>,
    pub exterior: VertexId,
}

impl DualMap {
    pub fn dual_edge(&self, e: EdgeId) -> Option<EdgeId> {
        self.primal_to_dual[e.index()]
    }

    pub fn primal_edge(&self, e: EdgeId) -> EdgeId {
        self.dual_to_primal[e.index()]
    }

    pub fn mapped_edge_count(&self) -> usize {
        self.dual_to_primal.len()
    }
}

/// Planar dual of a rectangle (dual is again square-like) or of a hexagonal
/// domain (dual is triangular). One dual vertex per interior face plus the
/// distinguished exterior vertex, placed last.
pub fn dual_of(graph: &LatticeGraph) -> Result<(LatticeGraph, DualMap)> {
    match graph.kind() {
        LatticeKind::Square { width, height } => dual_of_rectangle(graph, *width, *height),
        LatticeKind::Hexagonal { radius } => Ok(build_hex_domain(*radius)?.dual()),
        k => Err(Error::UnsupportedLattice(k.name().into())),
    }
}

fn dual_of_rectangle(graph: &LatticeGraph, n: usize, m: usize) -> Result<(LatticeGraph, DualMap)> {
    // Interior faces are unit squares indexed by their lower-left corner
    // (x, y), 0 <= x < n, 0 <= y < m; the exterior vertex comes last.
    let faces = n * m;
    let face_id = |x: usize, y: usize| VertexId((x * m + y) as u32);
    let exterior = VertexId(faces as u32);

    let mut coords = Vec::with_capacity((faces + 1) * 2);
    for x in 0..n {
        for y in 0..m {
            coords.extend([x as i32, y as i32]);
        }
    }
    coords.extend([-1, -1]); // exterior marker position

    let mut dual_edges = Vec::new();
    let mut primal_to_dual = vec![None; graph.edge_count()];
    let mut dual_to_primal = Vec::new();
    for (i, [a, b]) in graph.edges().iter().enumerate() {
        let ca = graph.coord(*a);
        let cb = graph.coord(*b);
        let (x, y) = (ca[0] as usize, ca[1] as usize);
        let horizontal = cb[1] == ca[1];
        // A horizontal primal edge separates the face below from the face
        // above; a vertical one separates left from right.
        let pair = if horizontal {
            if y == 0 || y == m {
                None
            } else {
                Some((face_id(x, y - 1), face_id(x, y)))
            }
        } else if x == 0 || x == n {
            None
        } else {
            Some((face_id(x - 1, y), face_id(x, y)))
        };
        if let Some((fa, fb)) = pair {
            primal_to_dual[i] = Some(EdgeId(dual_edges.len() as u32));
            dual_to_primal.push(EdgeId(i as u32));
            dual_edges.push([fa, fb]);
        }
    }

    let dual = LatticeGraph::from_parts(
        LatticeKind::Square {
            width: n.saturating_sub(1),
            height: m.saturating_sub(1),
        },
        2,
        coords,
        dual_edges,
    );
    Ok((
        dual,
        DualMap {
            primal_to_dual,
            dual_to_primal,
            exterior,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let g = build_rectangle(1, 1).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn rectangle_counts_match_formula() {
        for (n, m) in [(2usize, 1usize), (3, 2), (5, 4)] {
            let g = build_rectangle(n, m).unwrap();
            assert_eq!(g.vertex_count(), (n + 1) * (m + 1));
            assert_eq!(g.edge_count(), n * (m + 1) + m * (n + 1));
        }
        let g = build_rectangle(2, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 7));
    }

    #[test]
    fn rectangle_boundaries_are_consistent() {
        let g = build_rectangle(3, 2).unwrap();
        assert_eq!(g.left.len(), 3);
        assert_eq!(g.right.len(), 3);
        assert_eq!(g.top.len(), 4);
        assert_eq!(g.bottom.len(), 4);
        assert!(g.left.iter().all(|v| !g.right.contains(v)));
        for &v in &g.left {
            assert_eq!(g.coord(v)[0], 0);
        }
        for &v in &g.right {
            assert_eq!(g.coord(v)[0], 3);
        }
    }

    #[test]
    fn rectangle_rejects_degenerate_sizes() {
        assert!(build_rectangle(0, 1).is_err());
        assert!(build_rectangle(1, 0).is_err());
    }

    #[test]
    fn box_counts() {
        let g = build_box(1, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 4));
        let g = build_box(2, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
        // d=3, n=1: 3 directions x 9 lines x 2 edges each.
        let g = build_box(3, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (27, 54));
    }

    #[test]
    fn box_boundary_and_origin() {
        let g = build_box(2, 2).unwrap();
        let origin = g.origin.unwrap();
        assert_eq!(g.coord(origin), &[0, 0]);
        assert_eq!(g.boundary.len(), 16);
        for &v in &g.boundary {
            assert!(g.coord(v).iter().any(|c| c.abs() == 2));
        }
        // Interior vertices all have full degree.
        for v in 0..g.vertex_count() {
            let v = VertexId(v as u32);
            if g.coord(v).iter().all(|c| c.abs() < 2) {
                assert_eq!(g.degree(v), 4);
            }
        }
    }

    #[test]
    fn box_rejects_huge_dimensions() {
        assert!(build_box(40, 9).is_err());
    }

    #[test]
    fn deterministic_ids() {
        let a = build_rectangle(4, 3).unwrap();
        let b = build_rectangle(4, 3).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.coords, b.coords);
        let a = build_box(3, 2).unwrap();
        let b = build_box(3, 2).unwrap();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn square_degree_bound() {
        let g = build_rectangle(4, 4).unwrap();
        for v in 0..g.vertex_count() {
            assert!(g.degree(VertexId(v as u32)) <= 4);
        }
    }

    #[test]
    fn dual_of_rectangle_involution_and_counts() {
        let g = build_rectangle(2, 2).unwrap();
        let (dual, map) = dual_of(&g).unwrap();
        // 4 interior faces + exterior vertex.
        assert_eq!(dual.vertex_count(), 5);
        assert_eq!(map.exterior, VertexId(4));
        // Bulk edges: total 12 minus 8 on the perimeter.
        assert_eq!(map.mapped_edge_count(), 4);
        assert_eq!(dual.edge_count(), map.mapped_edge_count());
        for e in 0..g.edge_count() {
            if let Some(d) = map.dual_edge(EdgeId(e as u32)) {
                assert_eq!(map.primal_edge(d), EdgeId(e as u32));
            }
        }
        for d in 0..dual.edge_count() {
            let p = map.primal_edge(EdgeId(d as u32));
            assert_eq!(map.dual_edge(p), Some(EdgeId(d as u32)));
        }
    }

    #[test]
    fn dual_rejects_box() {
        let g = build_box(2, 1).unwrap();
        assert!(dual_of(&g).is_err());
    }

    #[test]
    fn dual_of_hexagonal_graph_is_triangular() {
        let domain = build_hex_domain(2).unwrap();
        let (dual, map) = dual_of(domain.graph()).unwrap();
        assert_eq!(dual.kind(), &LatticeKind::Triangular);
        assert_eq!(dual.vertex_count(), 8);
        assert_eq!(map.mapped_edge_count(), 12);
        for v in 0..dual.vertex_count() {
            assert!(dual.degree(VertexId(v as u32)) <= 6);
        }
    }

    #[test]
    fn describe_round_trips_counts() {
        let g = build_rectangle(2, 1).unwrap();
        let v = g.describe();
        assert_eq!(v["vertices"], 6);
        assert_eq!(v["edges"], 7);
        assert_eq!(v["kind"], "square");
    }
}
