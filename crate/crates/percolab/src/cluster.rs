//! Connected components of the graph induced by a configuration.

use crate::config::{BondConfig, SiteConfig};
use crate::error::Result;
use crate::lattice::{LatticeGraph, VertexId};
use crate::unionfind::UnionFind;

/// Cluster decomposition: dense component ids, k(ω), and sizes.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    /// Component id per vertex; `usize::MAX` marks closed sites of a site
    /// configuration (they belong to no cluster).
    pub component: Vec<usize>,
    /// Number of connected components, k(ω).
    pub count: usize,
    pub sizes: Vec<usize>,
    pub largest: usize,
}

impl ClusterStats {
    fn from_unionfind(mut uf: UnionFind, active: impl Fn(usize) -> bool, n: usize) -> ClusterStats {
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut root_ids = vec![usize::MAX; n];
        for v in 0..n {
            if !active(v) {
                continue;
            }
            let r = uf.find(v);
            if root_ids[r] == usize::MAX {
                root_ids[r] = sizes.len();
                sizes.push(0);
            }
            component[v] = root_ids[r];
            sizes[root_ids[r]] += 1;
        }
        let largest = sizes.iter().copied().max().unwrap_or(0);
        ClusterStats {
            component,
            count: sizes.len(),
            sizes,
            largest,
        }
    }

    pub fn same_component(&self, a: VertexId, b: VertexId) -> bool {
        let ca = self.component[a.index()];
        ca != usize::MAX && ca == self.component[b.index()]
    }

    /// Does the component of `v` contain any vertex of `set`?
    pub fn touches(&self, v: VertexId, set: &[VertexId]) -> bool {
        let c = self.component[v.index()];
        c != usize::MAX && set.iter().any(|w| self.component[w.index()] == c)
    }

    /// Is some vertex of `a` in the same component as some vertex of `b`?
    pub fn connects(&self, a: &[VertexId], b: &[VertexId]) -> bool {
        let mut hit = vec![false; self.count];
        for v in a {
            let c = self.component[v.index()];
            if c != usize::MAX {
                hit[c] = true;
            }
        }
        b.iter().any(|v| {
            let c = self.component[v.index()];
            c != usize::MAX && hit[c]
        })
    }
}

/// Components of the bond configuration: all vertices, open edges only.
pub fn clusters(graph: &LatticeGraph, config: &BondConfig) -> Result<ClusterStats> {
    config.check(graph)?;
    let mut uf = UnionFind::new(graph.vertex_count());
    for (i, [a, b]) in graph.edges().iter().enumerate() {
        if config.0.get(i) {
            uf.union(a.index(), b.index());
        }
    }
    Ok(ClusterStats::from_unionfind(
        uf,
        |_| true,
        graph.vertex_count(),
    ))
}

/// Components of the site configuration: open vertices and the edges
/// joining two open vertices.
pub fn site_clusters(graph: &LatticeGraph, config: &SiteConfig) -> Result<ClusterStats> {
    config.check(graph)?;
    let mut uf = UnionFind::new(graph.vertex_count());
    for [a, b] in graph.edges() {
        if config.is_open(*a) && config.is_open(*b) {
            uf.union(a.index(), b.index());
        }
    }
    let open = |v: usize| config.is_open(VertexId(v as u32));
    Ok(ClusterStats::from_unionfind(uf, open, graph.vertex_count()))
}

/// k(ω) with an optional set of vertices pre-merged (wired boundary).
pub fn component_count_wired(
    graph: &LatticeGraph,
    config: &BondConfig,
    wired: &[VertexId],
) -> Result<usize> {
    config.check(graph)?;
    let mut uf = UnionFind::new(graph.vertex_count());
    for w in wired.windows(2) {
        uf.union(w[0].index(), w[1].index());
    }
    for (i, [a, b]) in graph.edges().iter().enumerate() {
        if config.0.get(i) {
            uf.union(a.index(), b.index());
        }
    }
    Ok(uf.component_count())
}
