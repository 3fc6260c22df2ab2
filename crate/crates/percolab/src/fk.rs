//! The random-cluster (FK) model: weight p^|ω| (1-p)^(|E|-|ω|) q^k(ω),
//! exact enumeration, single-edge heat-bath dynamics, and planar duality
//! algebra.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::clusters;
use crate::config::BondConfig;
use crate::error::{Error, Result};
use crate::lattice::{build_box, build_rectangle, EdgeId, LatticeGraph, VertexId};
use crate::percolation::ENUMERATION_CAP;
use crate::rng::experiment_rng;
use crate::stats::Estimate;

/// Edge-weight p and cluster-weight q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkParams {
    pub p: f64,
    pub q: f64,
}

impl FkParams {
    pub fn new(p: f64, q: f64) -> Result<FkParams> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "edge-weight p = {p} outside [0,1]"
            )));
        }
        if q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cluster-weight q = {q} must be > 0"
            )));
        }
        Ok(FkParams { p, q })
    }
}

/// How k(ω) counts components: free boundary, or with the graph's outer
/// boundary vertices merged into a single ghost cluster beforehand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Boundary {
    #[default]
    Free,
    Wired,
}

/// Unnormalized weight of one configuration.
#[derive(Debug, Clone, Copy)]
pub struct FkWeight {
    pub log_weight: f64,
    pub open_edges: usize,
    pub cluster_count: usize,
}

impl FkWeight {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

/// k(ω) under the chosen boundary condition.
pub fn cluster_count(graph: &LatticeGraph, config: &BondConfig, bc: Boundary) -> Result<usize> {
    match bc {
        Boundary::Free => Ok(clusters(graph, config)?.count),
        Boundary::Wired => crate::cluster::component_count_wired(graph, config, &graph.boundary),
    }
}

/// Exact log-weight of ω under the random-cluster measure. The endpoint
/// convention 0^0 = 1 applies at p ∈ {0, 1}.
pub fn fk_weight(
    graph: &LatticeGraph,
    config: &BondConfig,
    params: FkParams,
    bc: Boundary,
) -> Result<FkWeight> {
    config.check(graph)?;
    let open = config.open_count();
    let closed = graph.edge_count() - open;
    let k = cluster_count(graph, config, bc)?;
    let mut log_weight = k as f64 * params.q.ln();
    if open > 0 {
        log_weight += open as f64 * params.p.ln();
    }
    if closed > 0 {
        log_weight += closed as f64 * (1.0 - params.p).ln();
    }
    Ok(FkWeight {
        log_weight,
        open_edges: open,
        cluster_count: k,
    })
}

fn raw_weight(graph: &LatticeGraph, config: &BondConfig, params: FkParams, bc: Boundary) -> f64 {
    let open = config.open_count() as i32;
    let closed = graph.edge_count() as i32 - open;
    let k = cluster_count(graph, config, bc).unwrap();
    params.p.powi(open) * (1.0 - params.p).powi(closed) * params.q.powi(k as i32)
}

/// Exact distribution summary from full enumeration.
#[derive(Debug, Clone)]
pub struct FkExact {
    /// Partition function Z(G, p, q).
    pub z: f64,
    /// P[ω(e) = 1] per edge.
    pub edge_marginals: Vec<f64>,
    /// Mean fraction of open edges.
    pub mean_open_fraction: f64,
    /// Left-right crossing probability, when the graph has those boundaries.
    pub crossing: Option<f64>,
}

pub fn fk_exact(graph: &LatticeGraph, params: FkParams, bc: Boundary) -> Result<FkExact> {
    let e = graph.edge_count();
    if e > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            size: e,
            cap: ENUMERATION_CAP,
            unit: "edges",
        });
    }
    let has_lr = !graph.left.is_empty() && !graph.right.is_empty();
    let mut z = 0.0;
    let mut open_sum = 0.0;
    let mut marg = vec![0.0; e];
    let mut crossing = 0.0;
    let mut config = BondConfig::closed(graph);
    for mask in 0..(1u64 << e) {
        config.0.set_mask(mask);
        let w = raw_weight(graph, &config, params, bc);
        if w == 0.0 {
            continue;
        }
        z += w;
        open_sum += w * config.open_count() as f64;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            marg[i] += w;
            bits &= bits - 1;
        }
        if has_lr {
            let st = clusters(graph, &config)?;
            if st.connects(&graph.left, &graph.right) {
                crossing += w;
            }
        }
    }
    if z <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    for m in &mut marg {
        *m /= z;
    }
    Ok(FkExact {
        z,
        edge_marginals: marg,
        mean_open_fraction: open_sum / z / e as f64,
        crossing: if has_lr { Some(crossing / z) } else { None },
    })
}

/// Exact expectation of an arbitrary observable under the FK measure.
pub fn fk_expectation(
    graph: &LatticeGraph,
    params: FkParams,
    bc: Boundary,
    f: impl Fn(&BondConfig) -> f64,
) -> Result<f64> {
    let ex = crate::percolation::enumerate_expectation(
        graph,
        |cfg| raw_weight(graph, cfg, params, bc),
        f,
        ENUMERATION_CAP,
    )?;
    Ok(ex.mean)
}

/// Scratch space for connectivity queries inside the heat-bath sweep.
#[derive(Debug, Clone)]
pub struct ConnectivityScratch {
    mark: Vec<u32>,
    generation: u32,
    queue: Vec<u32>,
}

impl ConnectivityScratch {
    pub fn new(vertices: usize) -> Self {
        ConnectivityScratch {
            mark: vec![0; vertices],
            generation: 0,
            queue: Vec::new(),
        }
    }

    /// Are the endpoints of `e` connected in ω with `e` forced closed?
    /// Under wired boundary the outer boundary acts as one merged vertex.
    fn connected_without(
        &mut self,
        graph: &LatticeGraph,
        config: &BondConfig,
        e: EdgeId,
        bc: Boundary,
        boundary_flag: &[bool],
    ) -> bool {
        let [x, y] = graph.endpoints(e);
        self.generation += 1;
        let generation = self.generation;
        self.queue.clear();
        self.mark[x.index()] = generation;
        self.queue.push(x.0);
        let mut hit_boundary = bc == Boundary::Wired && boundary_flag[x.index()];
        let mut head = 0;
        while head < self.queue.len() {
            let u = VertexId(self.queue[head]);
            head += 1;
            for &(w, ue) in graph.neighbors(u) {
                if ue == e || !config.is_open(ue) || self.mark[w.index()] == generation {
                    continue;
                }
                if w == y {
                    return true;
                }
                self.mark[w.index()] = generation;
                if bc == Boundary::Wired && boundary_flag[w.index()] {
                    hit_boundary = true;
                }
                self.queue.push(w.0);
            }
        }
        if !hit_boundary {
            return false;
        }
        // x reaches the wired boundary; y is connected iff it does too.
        self.generation += 1;
        let generation = self.generation;
        self.queue.clear();
        self.mark[y.index()] = generation;
        self.queue.push(y.0);
        if boundary_flag[y.index()] {
            return true;
        }
        let mut head = 0;
        while head < self.queue.len() {
            let u = VertexId(self.queue[head]);
            head += 1;
            for &(w, ue) in graph.neighbors(u) {
                if ue == e || !config.is_open(ue) || self.mark[w.index()] == generation {
                    continue;
                }
                if boundary_flag[w.index()] {
                    return true;
                }
                self.mark[w.index()] = generation;
                self.queue.push(w.0);
            }
        }
        false
    }
}

/// Conditional probability that `e` is open given the rest of ω: p when the
/// endpoints are connected off the edge, p / (p + q(1-p)) otherwise.
pub fn heatbath_open_probability(connected_off_edge: bool, params: FkParams) -> f64 {
    if connected_off_edge {
        params.p
    } else {
        params.p / (params.p + params.q * (1.0 - params.p))
    }
}

/// Resample one edge from its exact conditional distribution.
#[allow(clippy::too_many_arguments)]
pub fn fk_heatbath_step(
    graph: &LatticeGraph,
    config: &mut BondConfig,
    params: FkParams,
    e: EdgeId,
    rng: &mut impl Rng,
    bc: Boundary,
    scratch: &mut ConnectivityScratch,
    boundary_flag: &[bool],
) {
    let connected = scratch.connected_without(graph, config, e, bc, boundary_flag);
    let p_open = heatbath_open_probability(connected, params);
    config.set(e, rng.random::<f64>() < p_open);
}

/// Systematic-scan heat-bath sampler.
pub struct FkSampler<'g> {
    graph: &'g LatticeGraph,
    params: FkParams,
    bc: Boundary,
    config: BondConfig,
    scratch: ConnectivityScratch,
    boundary_flag: Vec<bool>,
}

impl<'g> FkSampler<'g> {
    pub fn new(graph: &'g LatticeGraph, params: FkParams, bc: Boundary) -> FkSampler<'g> {
        let mut boundary_flag = vec![false; graph.vertex_count()];
        for v in &graph.boundary {
            boundary_flag[v.index()] = true;
        }
        FkSampler {
            graph,
            params,
            bc,
            config: BondConfig::closed(graph),
            scratch: ConnectivityScratch::new(graph.vertex_count()),
            boundary_flag,
        }
    }

    pub fn config(&self) -> &BondConfig {
        &self.config
    }

    /// One full sweep in edge-id order.
    pub fn sweep(&mut self, rng: &mut impl Rng) {
        for e in 0..self.graph.edge_count() {
            fk_heatbath_step(
                self.graph,
                &mut self.config,
                self.params,
                EdgeId(e as u32),
                rng,
                self.bc,
                &mut self.scratch,
                &self.boundary_flag,
            );
        }
    }
}

/// Default number of burn-in sweeps.
pub const DEFAULT_BURN_IN: usize = 1_000;

/// Number of batch-mean blocks used for chain error bars.
pub const CHAIN_BATCHES: usize = 20;

/// Drive the sampler; after `burn_in` sweeps, `visit` sees every sweep's
/// configuration. Deterministic given the seed.
pub fn fk_run(
    graph: &LatticeGraph,
    params: FkParams,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    bc: Boundary,
    mut visit: impl FnMut(usize, &BondConfig),
) -> Result<()> {
    if sweeps < 1 {
        return Err(Error::InvalidParameter("sweeps >= 1".into()));
    }
    let mut rng = experiment_rng(seed);
    let mut sampler = FkSampler::new(graph, params, bc);
    for _ in 0..burn_in {
        sampler.sweep(&mut rng);
    }
    for s in 0..sweeps {
        sampler.sweep(&mut rng);
        visit(s, &sampler.config);
    }
    Ok(())
}

/// Chain summary: open-edge density, per-edge marginals, and the crossing
/// frequency when the graph has left/right boundaries.
#[derive(Debug, Clone)]
pub struct FkRun {
    pub open_fraction: Estimate,
    pub edge_marginals: Vec<f64>,
    pub crossing: Option<Estimate>,
}

pub fn fk_sample(
    graph: &LatticeGraph,
    params: FkParams,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    bc: Boundary,
) -> Result<FkRun> {
    let e = graph.edge_count();
    let has_lr = !graph.left.is_empty() && !graph.right.is_empty();
    let mut density = Vec::with_capacity(sweeps);
    let mut marginals = vec![0.0; e];
    let mut crossings = Vec::new();
    fk_run(graph, params, sweeps, burn_in, seed, bc, |_, cfg| {
        density.push(cfg.open_count() as f64 / e as f64);
        for i in cfg.0.ones() {
            marginals[i] += 1.0;
        }
        if has_lr {
            let st = clusters(graph, cfg).unwrap();
            crossings.push(st.connects(&graph.left, &graph.right) as u8 as f64);
        }
    })?;
    for m in &mut marginals {
        *m /= sweeps as f64;
    }
    Ok(FkRun {
        open_fraction: Estimate::from_chain(&density, CHAIN_BATCHES, seed),
        edge_marginals: marginals,
        crossing: if has_lr {
            Some(Estimate::from_chain(&crossings, CHAIN_BATCHES, seed))
        } else {
            None
        },
    })
}

/// H_{n,m}(p,q) estimated along a heat-bath chain on the rectangle.
pub fn fk_crossing_prob(
    n: usize,
    m: usize,
    params: FkParams,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    bc: Boundary,
) -> Result<Estimate> {
    let graph = build_rectangle(n, m)?;
    let run = fk_sample(&graph, params, sweeps, burn_in, seed, bc)?;
    Ok(run.crossing.expect("rectangle has left/right boundaries"))
}

/// θ_n(p,q) estimated along a heat-bath chain on the box Λ_n ⊂ Z².
pub fn fk_one_arm(
    n: usize,
    params: FkParams,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    bc: Boundary,
) -> Result<Estimate> {
    let graph = build_box(2, n)?;
    let origin = graph.origin.expect("box has origin");
    let mut hits = Vec::with_capacity(sweeps);
    fk_run(&graph, params, sweeps, burn_in, seed, bc, |_, cfg| {
        let st = clusters(&graph, cfg).unwrap();
        hits.push(st.touches(origin, &graph.boundary) as u8 as f64);
    })?;
    Ok(Estimate::from_chain(&hits, CHAIN_BATCHES, seed))
}

/// Dual parameters: p* solves p p* / ((1-p)(1-p*)) = q, q* = q.
/// Endpoints map p=0 to p*=1 and p=1 to p*=0.
pub fn fk_dual_params(params: FkParams) -> FkParams {
    let FkParams { p, q } = params;
    if p == 0.0 {
        return FkParams { p: 1.0, q };
    }
    if p == 1.0 {
        return FkParams { p: 0.0, q };
    }
    FkParams {
        p: q * (1.0 - p) / (q * (1.0 - p) + p),
        q,
    }
}

/// The self-dual point √q / (1 + √q), the fixed point of duality.
pub fn self_dual_point(q: f64) -> Result<f64> {
    if q.is_nan() || q <= 0.0 {
        return Err(Error::InvalidParameter(format!("q = {q} must be > 0")));
    }
    let s = q.sqrt();
    Ok(s / (1.0 + s))
}
