//! The parafermionic observable on hexagonal domains, discrete contour
//! integrals, and self-avoiding walk counting.
//!
//! F(z) sums e^{-iσW_γ(a,z)} x^{|γ|+|ω|} n^{ℓ(ω)} over pairs of a
//! self-avoiding walk γ from the boundary mid-edge a to z and a loop
//! configuration ω vertex-disjoint from γ. Conventions that the vanishing
//! contour test validates:
//! - |γ| counts the vertices visited by γ (the two half-edges at its ends
//!   together contribute one edge length);
//! - the winding is the sum of ±π/3 turns, one per visited vertex;
//! - disjointness is at the vertex level, and a walk may end at the
//!   midpoint of an edge whose far endpoint it visited earlier, but never
//!   doubles back onto the half-edge it arrived by.
//!
//! Enumeration is exhaustive and exact: an integer count tensor indexed by
//! (endpoint, total length, loop count, winding turns) is built once per
//! source mid-edge and evaluated for any (x, n, σ) afterwards.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::hex::{
    face_center, hex_distance, point, reverse_dir, turn, vertex_dirs, MidEdgeId, MidEdgeKind,
    AXIAL_DIR, DIR_STEP,
};
use crate::lattice::{EdgeId, HexDomain, VertexId};
use crate::loop_model::LoopParams;

/// A self-avoiding walk between mid-edges: the ordered vertices it visits.
#[derive(Debug, Clone)]
pub struct WalkPath {
    pub start: MidEdgeId,
    pub end: MidEdgeId,
    pub vertices: Vec<VertexId>,
}

/// Winding of a walk as an integer count of π/3 turns (left positive).
pub fn winding(domain: &HexDomain, path: &WalkPath) -> Result<i32> {
    if path.vertices.is_empty() {
        return Err(Error::InvalidParameter(
            "winding needs at least one step".into(),
        ));
    }
    let coord = |v: VertexId| domain.vertex_coord(v);
    let dir_of = |d: (i32, i32)| -> Result<u8> {
        DIR_STEP
            .iter()
            .position(|&s| s == d)
            .map(|i| i as u8)
            .ok_or_else(|| Error::InvalidParameter(format!("not a unit step: {d:?}")))
    };
    let add_turn = |d_in: u8, d_out: u8| -> Result<i32> {
        let t = turn(d_in, d_out);
        if t.abs() == 3 {
            return Err(Error::InvalidParameter(
                "walk doubles back on itself".into(),
            ));
        }
        Ok(t)
    };
    // Initial half-step a → v1; doubled coordinates make it a unit step.
    let a_key = domain.mid_edge(path.start).key;
    let v1 = coord(path.vertices[0]);
    let mut d_in = dir_of((2 * v1.0 - a_key.0, 2 * v1.1 - a_key.1))?;
    let mut turns = 0i32;
    for w in path.vertices.windows(2) {
        let (ua, ub) = coord(w[0]);
        let (va, vb) = coord(w[1]);
        let d_out = dir_of((va - ua, vb - ub))?;
        turns += add_turn(d_in, d_out)?;
        d_in = d_out;
    }
    // Final half-step from the last vertex to the end mid-edge.
    let (ka, kb) = coord(*path.vertices.last().unwrap());
    let z_key = domain.mid_edge(path.end).key;
    let d_out = dir_of((z_key.0 - 2 * ka, z_key.1 - 2 * kb))?;
    turns += add_turn(d_in, d_out)?;
    Ok(turns)
}

/// The spin σ(n) = 1 - 3 arccos(-n/2) / (4π) for n in [0,2]; validated
/// internally by the vanishing of discrete contour integrals at x_c(n).
pub fn sigma(n: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "sigma defined for n in [0,2], got {n}"
        )));
    }
    Ok(1.0 - 3.0 * (-n / 2.0).acos() / (4.0 * std::f64::consts::PI))
}

/// Exact enumeration tensor: counts[z][L][ℓ][t] of walk/loop pairs ending
/// at mid-edge z with |γ|+|ω| = L, ℓ loops, and winding t·π/3.
#[derive(Debug, Clone)]
pub struct ObservableTensor {
    source: MidEdgeId,
    z_count: usize,
    l_max: usize,
    loop_max: usize,
    t_off: usize,
    counts: Vec<u64>,
}

/// Cap on the domain size for exhaustive observable enumeration.
pub const OBSERVABLE_EDGE_CAP: usize = 30;

impl ObservableTensor {
    #[inline]
    fn index(&self, z: usize, l: usize, loops: usize, t: i32) -> usize {
        debug_assert!(l < self.l_max && loops < self.loop_max);
        ((z * self.l_max + l) * self.loop_max + loops) * (2 * self.t_off + 1)
            + (t + self.t_off as i32) as usize
    }

    pub fn source(&self) -> MidEdgeId {
        self.source
    }

    /// Evaluate F at every mid-edge for the given weights and spin.
    pub fn evaluate(&self, params: LoopParams, sigma: f64) -> ObservableField {
        let phase = Complex64::from_polar(1.0, -sigma * std::f64::consts::FRAC_PI_3);
        let t_len = 2 * self.t_off + 1;
        let phases: Vec<Complex64> = (0..t_len)
            .map(|ti| phase.powi(ti as i32 - self.t_off as i32))
            .collect();
        let mut xpow = Vec::with_capacity(self.l_max);
        let mut acc = 1.0;
        for _ in 0..self.l_max {
            xpow.push(acc);
            acc *= params.x;
        }
        let mut npow = Vec::with_capacity(self.loop_max);
        let mut acc = 1.0;
        for _ in 0..self.loop_max {
            npow.push(acc);
            acc *= params.n;
        }
        let mut values = vec![Complex64::new(0.0, 0.0); self.z_count];
        for (z, value) in values.iter_mut().enumerate() {
            let mut f = Complex64::new(0.0, 0.0);
            for l in 0..self.l_max {
                for loops in 0..self.loop_max {
                    let base = ((z * self.l_max + l) * self.loop_max + loops) * t_len;
                    let w = xpow[l] * npow[loops];
                    if w == 0.0 {
                        continue;
                    }
                    for (ti, &c) in self.counts[base..base + t_len].iter().enumerate() {
                        if c != 0 {
                            f += phases[ti] * (w * c as f64);
                        }
                    }
                }
            }
            *value = f;
        }
        ObservableField {
            source: self.source,
            params,
            sigma,
            values,
        }
    }
}

/// Complex F per mid-edge for one parameter choice.
#[derive(Debug, Clone)]
pub struct ObservableField {
    pub source: MidEdgeId,
    pub params: LoopParams,
    pub sigma: f64,
    pub values: Vec<Complex64>,
}

impl ObservableField {
    pub fn value(&self, z: MidEdgeId) -> Complex64 {
        self.values[z as usize]
    }

    /// A constant field; contour integrals of it telescope to zero.
    pub fn constant(domain: &HexDomain, c: Complex64) -> ObservableField {
        ObservableField {
            source: 0,
            params: LoopParams { x: 1.0, n: 1.0 },
            sigma: 0.0,
            values: vec![c; domain.mid_edges().len()],
        }
    }
}

/// Even-subgraph generating counts of the subgraph induced by the vertices
/// outside `blocked`: entries (edge count, loop count, multiplicity).
fn loop_polynomial(domain: &HexDomain, blocked: u64) -> Vec<(u8, u8, u64)> {
    let graph = domain.graph();
    let nv = graph.vertex_count();
    let mut avail: Vec<(usize, usize, usize)> = Vec::new();
    for (i, [a, b]) in graph.edges().iter().enumerate() {
        if blocked >> a.index() & 1 == 0 && blocked >> b.index() & 1 == 0 {
            avail.push((i, a.index(), b.index()));
        }
    }
    if avail.len() < 6 {
        // Too few edges for any cycle: only the empty configuration.
        return vec![(0, 0, 1)];
    }
    // Spanning forest, then fundamental cycles of the non-tree edges.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for &(e, a, b) in &avail {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    let mut parent_path = vec![0u64; nv];
    let mut seen = vec![false; nv];
    let mut in_tree = vec![false; graph.edge_count()];
    let mut stack = Vec::new();
    for v in 0..nv {
        if seen[v] || blocked >> v & 1 == 1 {
            continue;
        }
        seen[v] = true;
        stack.push(v);
        while let Some(u) = stack.pop() {
            for &(w, e) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    in_tree[e] = true;
                    parent_path[w] = parent_path[u] ^ (1u64 << e);
                    stack.push(w);
                }
            }
        }
    }
    let cycles: Vec<u64> = avail
        .iter()
        .filter(|&&(e, _, _)| !in_tree[e])
        .map(|&(e, a, b)| parent_path[a] ^ parent_path[b] ^ (1u64 << e))
        .collect();
    if cycles.is_empty() {
        return vec![(0, 0, 1)];
    }
    let mut out = Vec::with_capacity(1 << cycles.len());
    let mut uf = crate::unionfind::UnionFind::new(nv);
    for sub in 0..(1u64 << cycles.len()) {
        let mut mask = 0u64;
        for (i, c) in cycles.iter().enumerate() {
            if sub >> i & 1 == 1 {
                mask ^= c;
            }
        }
        let edges = mask.count_ones() as u8;
        if edges == 0 {
            out.push((0, 0, 1));
            continue;
        }
        uf.reset(nv);
        let mut bits = mask;
        while bits != 0 {
            let e = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let [a, b] = graph.endpoints(EdgeId(e as u32));
            uf.union(a.index(), b.index());
        }
        let mut loops = 0u8;
        let mut counted = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let e = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let [a, _] = graph.endpoints(EdgeId(e as u32));
            let root = uf.find(a.index());
            if counted >> root & 1 == 0 {
                counted |= 1 << root;
                loops += 1;
            }
        }
        out.push((edges, loops, 1));
    }
    out
}

/// Build the exact enumeration tensor for walks from boundary mid-edge `a`.
pub fn observable_tensor(domain: &HexDomain, a: MidEdgeId) -> Result<ObservableTensor> {
    let graph = domain.graph();
    if graph.edge_count() > OBSERVABLE_EDGE_CAP {
        return Err(Error::CapExceeded {
            size: graph.edge_count(),
            cap: OBSERVABLE_EDGE_CAP,
            unit: "edges",
        });
    }
    let nv = graph.vertex_count();
    if nv > 63 {
        return Err(Error::CapExceeded {
            size: nv,
            cap: 63,
            unit: "vertices",
        });
    }
    let MidEdgeKind::Boundary {
        vertex: entry,
        dir: stub_dir,
    } = domain.mid_edge(a).kind
    else {
        return Err(Error::NotBoundaryMidEdge(a as usize));
    };

    let z_count = domain.mid_edges().len();
    let l_max = nv + 1;
    let loop_max = nv / 6 + 2;
    let t_off = nv + 1;
    let mut tensor = ObservableTensor {
        source: a,
        z_count,
        l_max,
        loop_max,
        t_off,
        counts: vec![0u64; z_count * l_max * loop_max * (2 * t_off + 1)],
    };

    // Neighbor lookup by direction.
    let mut neighbor: Vec<[Option<VertexId>; 6]> = vec![[None; 6]; nv];
    for v in 0..nv {
        let (va, vb) = domain.vertex_coord(VertexId(v as u32));
        for &(w, _) in graph.neighbors(VertexId(v as u32)) {
            let (wa, wb) = domain.vertex_coord(w);
            let d = DIR_STEP
                .iter()
                .position(|&s| s == (wa - va, wb - vb))
                .unwrap();
            neighbor[v][d] = Some(w);
        }
    }

    // The empty walk contributes the full-domain loop polynomial at z = a.
    for (l, loops, c) in loop_polynomial(domain, 0) {
        let idx = tensor.index(a as usize, l as usize, loops as usize, 0);
        tensor.counts[idx] += c;
    }

    // Iterative depth-first enumeration of self-avoiding walks. Each frame
    // is a visited vertex; emissions happen when the frame is opened.
    struct Frame {
        u: usize,
        d_in: u8,
        t: i32,
        next_dir: u8,
    }
    let mut visited: u64 = 1 << entry.index();
    let mut stack = vec![Frame {
        u: entry.index(),
        d_in: reverse_dir(stub_dir),
        t: 0,
        next_dir: 0,
    }];
    while let Some(frame) = stack.last_mut() {
        let u = frame.u;
        let d_in = frame.d_in;
        let t = frame.t;
        if frame.next_dir == 0 {
            // Emit all walk endings from this state.
            let poly = loop_polynomial(domain, visited);
            let k = visited.count_ones() as usize;
            let (_, ub) = domain.vertex_coord(VertexId(u as u32));
            for d in vertex_dirs(ub) {
                if d == reverse_dir(d_in) {
                    continue;
                }
                let Some(m) = domain.mid_edge_from(VertexId(u as u32), d) else {
                    continue;
                };
                let t_end = t + turn(d_in, d);
                for &(l, loops, c) in &poly {
                    let idx = tensor.index(m as usize, k + l as usize, loops as usize, t_end);
                    tensor.counts[idx] += c;
                }
            }
        }
        // Advance to the next unvisited continuation, or retreat.
        let mut advanced = false;
        while frame.next_dir < 6 {
            let d = frame.next_dir;
            frame.next_dir += 1;
            let (_, ub) = domain.vertex_coord(VertexId(u as u32));
            if !vertex_dirs(ub).contains(&d) || d == reverse_dir(d_in) {
                continue;
            }
            let Some(w) = neighbor[u][d as usize] else {
                continue;
            };
            if visited >> w.index() & 1 == 1 {
                continue;
            }
            visited |= 1 << w.index();
            let t_next = t + turn(d_in, d);
            stack.push(Frame {
                u: w.index(),
                d_in: d,
                t: t_next,
                next_dir: 0,
            });
            advanced = true;
            break;
        }
        if !advanced {
            visited &= !(1 << u);
            stack.pop();
        }
    }
    Ok(tensor)
}

/// F for one parameter set at every mid-edge.
pub fn parafermionic_field(
    domain: &HexDomain,
    a: MidEdgeId,
    params: LoopParams,
    sigma: f64,
) -> Result<ObservableField> {
    Ok(observable_tensor(domain, a)?.evaluate(params, sigma))
}

/// F(z) for a single target mid-edge.
pub fn parafermionic_f(
    domain: &HexDomain,
    a: MidEdgeId,
    z: MidEdgeId,
    params: LoopParams,
    sigma: f64,
) -> Result<Complex64> {
    Ok(parafermionic_field(domain, a, params, sigma)?.value(z))
}

/// A closed self-avoiding polygon on the triangular (face) lattice, stored
/// as axial coordinates without the repeated endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<(i32, i32)>,
}

impl Contour {
    pub fn new(points: Vec<(i32, i32)>) -> Result<Contour> {
        if points.len() < 3 {
            return Err(Error::InvalidParameter(
                "contour needs at least 3 points".into(),
            ));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() {
            return Err(Error::InvalidParameter("contour repeats a vertex".into()));
        }
        for i in 0..points.len() {
            let a = points[i];
            let b = points[(i + 1) % points.len()];
            let step = (b.0 - a.0, b.1 - a.1);
            if !AXIAL_DIR.contains(&step) {
                return Err(Error::InvalidParameter(format!(
                    "contour points {a:?} and {b:?} are not adjacent"
                )));
            }
        }
        Ok(Contour { points })
    }
}

/// The discrete contour integral Σ (c_i - c_{i-1}) F((c_{i-1}+c_i)/2).
pub fn contour_integral(
    domain: &HexDomain,
    field: &ObservableField,
    contour: &Contour,
) -> Result<Complex64> {
    let rad = domain.radius() as i32;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..contour.points.len() {
        let (q1, r1) = contour.points[i];
        let (q2, r2) = contour.points[(i + 1) % contour.points.len()];
        if hex_distance(q1, r1) > rad || hex_distance(q2, r2) > rad {
            return Err(Error::ContourOutsideDomain(q1, r1));
        }
        let c1 = face_center(q1, r1);
        let c2 = face_center(q2, r2);
        let m = domain
            .mid_edge_by_key((c1.0 + c2.0, c1.1 + c2.1))
            .ok_or(Error::ContourOutsideDomain(q2, r2))?;
        sum += (point(c2.0, c2.1) - point(c1.0, c1.1)) * field.value(m);
    }
    Ok(sum)
}

/// Elementary triangular contours: one per hexagonal vertex of the domain.
pub fn elementary_contours(domain: &HexDomain) -> Vec<Contour> {
    (0..domain.graph().vertex_count())
        .map(|v| Contour {
            points: domain.triangle_around(VertexId(v as u32)).to_vec(),
        })
        .collect()
}

/// Largest |∮ F| over all elementary contours.
pub fn max_elementary_integral(domain: &HexDomain, field: &ObservableField) -> Result<f64> {
    let mut max = 0.0f64;
    for c in elementary_contours(domain) {
        max = max.max(contour_integral(domain, field, &c)?.norm());
    }
    Ok(max)
}

/// Exact origin-rooted self-avoiding walk counts c_1..c_max on the infinite
/// hexagonal lattice, by depth-first backtracking.
pub fn count_saw(max_len: usize) -> Result<Vec<u64>> {
    if !(1..=32).contains(&max_len) {
        return Err(Error::InvalidParameter(
            "walk length must be in 1..=32".into(),
        ));
    }
    // Rooted at the vertex (1,1); by transitivity the counts are the same
    // from any vertex. Offsets from the root stay within |Δa| <= L,
    // |Δb| <= 2L.
    let la = max_len as i32 + 1;
    let lb = 2 * max_len as i32 + 2;
    let height = (2 * lb + 1) as usize;
    let width = (2 * la + 1) as usize;
    let mut visited = vec![false; width * height];
    let mut counts = vec![0u64; max_len + 1];
    let idx = move |a: i32, b: i32| ((a + la) as usize) * height + (b + lb) as usize;
    #[allow(clippy::too_many_arguments)]
    fn go(
        a: i32,
        b: i32,
        root_b: i32,
        depth: usize,
        max_len: usize,
        visited: &mut [bool],
        counts: &mut [u64],
        idx: &impl Fn(i32, i32) -> usize,
    ) {
        if depth == max_len {
            return;
        }
        // b-offset plus the root's absolute b decides the sublattice.
        for d in vertex_dirs(b + root_b) {
            let (da, db) = DIR_STEP[d as usize];
            let (na, nb) = (a + da, b + db);
            let i = idx(na, nb);
            if !visited[i] {
                counts[depth + 1] += 1;
                visited[i] = true;
                go(na, nb, root_b, depth + 1, max_len, visited, counts, idx);
                visited[i] = false;
            }
        }
    }
    visited[idx(0, 0)] = true;
    go(0, 0, 1, 0, max_len, &mut visited, &mut counts, &idx);
    Ok(counts[1..].to_vec())
}

/// Ratio and root estimates of the connective constant from walk counts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConnectiveEstimate {
    pub length: usize,
    /// c_L / c_{L-1}.
    pub ratio: Option<f64>,
    /// c_L^{1/L}.
    pub root: f64,
    /// Short-length estimates are flagged as degenerate.
    pub degenerate: bool,
}

pub fn connective_estimates(counts: &[u64]) -> Vec<ConnectiveEstimate> {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let len = i + 1;
            ConnectiveEstimate {
                length: len,
                ratio: if i > 0 {
                    Some(c as f64 / counts[i - 1] as f64)
                } else {
                    None
                },
                root: (c as f64).powf(1.0 / len as f64),
                degenerate: len < 4,
            }
        })
        .collect()
}
