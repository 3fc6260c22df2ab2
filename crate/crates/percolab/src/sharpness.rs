//! Sharp-threshold diagnostics: the exact covariance/derivative identity,
//! the randomized exploration algorithm and its revealment, S-curve sweeps,
//! spatial mixing ratios, and dynamical percolation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::BondConfig;
use crate::error::{Error, Result};
use crate::fk::FkParams;
use crate::lattice::{build_box, build_rectangle, EdgeId, LatticeGraph, VertexId};
use crate::percolation::{sample_bernoulli_with, ENUMERATION_CAP};
use crate::rng::replica_rng;
use crate::stats::Estimate;

/// Exact per-edge covariances and the two routes to dE_p[f]/dp.
#[derive(Debug, Clone)]
pub struct InfluenceReport {
    pub expectation: f64,
    pub variance: f64,
    /// Cov_p[f, ω(e)] per edge.
    pub covariances: Vec<f64>,
    /// (1/(p(1-p))) Σ_e Cov_p[f, ω(e)].
    pub derivative_covariance: f64,
    /// Central finite difference of E_p[f] with step h.
    pub derivative_finite_difference: f64,
    pub fd_step: f64,
}

/// Exact covariances of f with each edge state, plus the derivative both by
/// the covariance formula and by central finite differences. One
/// enumeration provides E_p[f] as a polynomial in p, so the finite
/// difference is itself exact up to f64 rounding.
pub fn influence_exact(
    graph: &LatticeGraph,
    p: f64,
    f: impl Fn(&BondConfig) -> f64,
) -> Result<InfluenceReport> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::InvalidParameter(format!("p = {p} must be in (0,1)")));
    }
    let e = graph.edge_count();
    if e > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            size: e,
            cap: ENUMERATION_CAP,
            unit: "edges",
        });
    }
    // Σ f(ω) over configurations with o open edges, overall and per edge.
    let mut by_open = vec![0.0; e + 1];
    let mut by_open_sq = vec![0.0; e + 1];
    let mut by_open_edge = vec![0.0; (e + 1) * e];
    let mut config = BondConfig::closed(graph);
    for mask in 0..(1u64 << e) {
        config.0.set_mask(mask);
        let o = mask.count_ones() as usize;
        let val = f(&config);
        by_open[o] += val;
        by_open_sq[o] += val * val;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            by_open_edge[o * e + i] += val;
        }
    }
    let binom_weight = |pp: f64| -> Vec<f64> {
        (0..=e)
            .map(|o| pp.powi(o as i32) * (1.0 - pp).powi((e - o) as i32))
            .collect()
    };
    let w = binom_weight(p);
    let mean: f64 = (0..=e).map(|o| w[o] * by_open[o]).sum();
    let mean_sq: f64 = (0..=e).map(|o| w[o] * by_open_sq[o]).sum();
    let mut covariances = vec![0.0; e];
    for (i, cov) in covariances.iter_mut().enumerate() {
        let joint: f64 = (0..=e).map(|o| w[o] * by_open_edge[o * e + i]).sum();
        *cov = joint - mean * p;
    }
    let derivative_covariance = covariances.iter().sum::<f64>() / (p * (1.0 - p));
    let h = 1e-5f64.min(p / 2.0).min((1.0 - p) / 2.0);
    let eval = |pp: f64| -> f64 {
        let w = binom_weight(pp);
        (0..=e).map(|o| w[o] * by_open[o]).sum()
    };
    let derivative_finite_difference = (eval(p + h) - eval(p - h)) / (2.0 * h);
    Ok(InfluenceReport {
        expectation: mean,
        variance: mean_sq - mean * mean,
        covariances,
        derivative_covariance,
        derivative_finite_difference,
        fd_step: h,
    })
}

impl InfluenceReport {
    /// Σ_e Cov / log(1/Cov), the concentration-inequality right-hand side.
    /// The matching constant c(p) is not pinned down, so callers get both
    /// sides reported and nothing is asserted.
    pub fn covariance_log_sum(&self) -> f64 {
        self.covariances
            .iter()
            .filter(|c| **c > 0.0 && **c < 1.0)
            .map(|c| c / (1.0 / c).ln())
            .sum()
    }
}

/// Bond configuration access that reveals edges one at a time and counts
/// queries; re-querying a revealed edge is free.
pub struct LazyConfig<'c> {
    config: &'c BondConfig,
    revealed: Vec<bool>,
    queries: usize,
}

impl<'c> LazyConfig<'c> {
    pub fn new(config: &'c BondConfig) -> LazyConfig<'c> {
        LazyConfig {
            config,
            revealed: vec![false; config.len()],
            queries: 0,
        }
    }

    pub fn query(&mut self, e: EdgeId) -> bool {
        if !self.revealed[e.index()] {
            self.revealed[e.index()] = true;
            self.queries += 1;
        }
        self.config.is_open(e)
    }

    pub fn revealed(&self) -> &[bool] {
        &self.revealed
    }

    pub fn query_count(&self) -> usize {
        self.queries
    }
}

/// Outcome of one exploration run: the decision and which edges were
/// revealed before it was reached.
#[derive(Debug, Clone)]
pub struct RevealmentSample {
    pub decision: bool,
    pub revealed: Vec<bool>,
}

/// The exploration algorithm deciding 1[origin ↔ ∂Λ_n]: pick a radius k,
/// then grow the connected components of the sphere ∂Λ_k, querying edges
/// lazily (breadth-first in vertex/edge id order for determinism). Any path
/// from the origin to ∂Λ_n crosses ∂Λ_k, so the fully-explored components
/// decide the event exactly.
pub fn osss_explore(
    graph: &LatticeGraph,
    access: &mut LazyConfig,
    k: usize,
) -> Result<RevealmentSample> {
    let origin = graph.origin.ok_or(Error::MissingBoundary("origin"))?;
    if graph.boundary.is_empty() {
        return Err(Error::MissingBoundary("box"));
    }
    // Sphere of radius k: vertices at sup-norm distance exactly k.
    let sphere: Vec<VertexId> = (0..graph.vertex_count() as u32)
        .map(VertexId)
        .filter(|&v| {
            graph
                .coord(v)
                .iter()
                .map(|c| c.unsigned_abs() as usize)
                .max()
                .unwrap_or(0)
                == k
        })
        .collect();
    let mut on_boundary = vec![false; graph.vertex_count()];
    for v in &graph.boundary {
        on_boundary[v.index()] = true;
    }

    let mut seen = vec![false; graph.vertex_count()];
    let mut decision = false;
    for &s in &sphere {
        if seen[s.index()] {
            continue;
        }
        // Fully explore this component.
        let mut component_has_origin = false;
        let mut component_has_boundary = false;
        let mut queue = std::collections::VecDeque::from([s]);
        seen[s.index()] = true;
        while let Some(u) = queue.pop_front() {
            if u == origin {
                component_has_origin = true;
            }
            if on_boundary[u.index()] {
                component_has_boundary = true;
            }
            for &(w, e) in graph.neighbors(u) {
                if access.query(e) && !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
        if component_has_origin && component_has_boundary {
            decision = true;
            // The event is decided, but remaining sphere components keep
            // the revealment distribution canonical: stop here.
            break;
        }
    }
    Ok(RevealmentSample {
        decision,
        revealed: access.revealed().to_vec(),
    })
}

/// Monte Carlo check of the variance/revealment inequality
/// Var(f) <= 2 Σ_e δ_e Cov[f, ω(e)] for f = 1[0 ↔ ∂Λ_n].
#[derive(Debug, Clone)]
pub struct OsssCheck {
    pub variance: f64,
    pub rhs: f64,
    /// RHS - LHS; the inequality predicts slack >= 0 up to noise.
    pub slack: f64,
    pub slack_stderr: f64,
    /// Largest per-edge revealment.
    pub max_revealment: f64,
    pub replicas: usize,
}

pub fn osss_check(n: usize, p: f64, replicas: usize, seed: u64) -> Result<OsssCheck> {
    if replicas < 40 {
        return Err(Error::InvalidParameter("need at least 40 replicas".into()));
    }
    let graph = build_box(2, n)?;
    let e = graph.edge_count();
    // Per-replica samples: decision, edge states, revealed set.
    let rows: Vec<(bool, BondConfig, Vec<bool>)> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let config = sample_bernoulli_with(&graph, p, &mut rng);
            let k = rng.random_range(1..=n);
            let mut lazy = LazyConfig::new(&config);
            let sample = osss_explore(&graph, &mut lazy, k).expect("box graph");
            (sample.decision, config, sample.revealed)
        })
        .collect();

    // Block the replicas for an honest error bar on the slack.
    let blocks = 20usize;
    let mut block_slack = Vec::with_capacity(blocks);
    let mut total_var = 0.0;
    let mut total_rhs = 0.0;
    let mut delta_all = vec![0.0; e];
    for b in 0..blocks {
        let lo = b * replicas / blocks;
        let hi = (b + 1) * replicas / blocks;
        let m = (hi - lo) as f64;
        let mut f_mean = 0.0;
        let mut delta = vec![0.0; e];
        let mut omega_mean = vec![0.0; e];
        let mut f_omega = vec![0.0; e];
        for (decision, config, revealed) in &rows[lo..hi] {
            let fv = *decision as u8 as f64;
            f_mean += fv;
            for i in 0..e {
                let o = config.0.get(i) as u8 as f64;
                omega_mean[i] += o;
                f_omega[i] += fv * o;
                delta[i] += revealed[i] as u8 as f64;
            }
        }
        f_mean /= m;
        let var = f_mean * (1.0 - f_mean);
        let mut rhs = 0.0;
        for i in 0..e {
            let cov = f_omega[i] / m - f_mean * omega_mean[i] / m;
            rhs += 2.0 * (delta[i] / m) * cov;
        }
        block_slack.push(rhs - var);
        total_var += var;
        total_rhs += rhs;
        for i in 0..e {
            delta_all[i] += delta[i] / m;
        }
    }
    let slack_est = Estimate::from_samples(&block_slack, seed);
    Ok(OsssCheck {
        variance: total_var / blocks as f64,
        rhs: total_rhs / blocks as f64,
        slack: slack_est.mean,
        slack_stderr: slack_est.stderr,
        max_revealment: delta_all.iter().cloned().fold(0.0, f64::max) / blocks as f64,
        replicas,
    })
}

/// One row of an S-curve: the crossing estimate at one p.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SCurveRow {
    pub p: f64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Crossing probability of the n x n square across a p grid, from one
/// shared monotone coupling per replica.
#[derive(Debug, Clone)]
pub struct SCurve {
    pub n: usize,
    pub rows: Vec<SCurveRow>,
    /// p at which the interpolated curve passes 1/2.
    pub p_half: Option<f64>,
    /// Δp(ε): width between heights ε and 1-ε at ε = 0.1.
    pub width: Option<f64>,
    pub replicas: usize,
    pub seed: u64,
}

/// Per-replica coupling: one uniform per edge, a configuration at level p
/// opens the edges with u_e < p. The crossing event is monotone, so each
/// replica has a sharp threshold u*, and the whole curve is read off the
/// empirical distribution of u*.
pub fn s_curve(n: usize, p_grid: &[f64], replicas: usize, seed: u64) -> Result<SCurve> {
    if p_grid.is_empty() || p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "p grid must be sorted and nonempty".into(),
        ));
    }
    if p_grid[0] < 0.0 || *p_grid.last().unwrap() > 1.0 {
        return Err(Error::InvalidParameter("p grid outside [0,1]".into()));
    }
    if replicas < 2 {
        return Err(Error::InvalidParameter("replicas >= 2".into()));
    }
    let graph = build_rectangle(n, n)?;
    let e = graph.edge_count();
    // Virtual left/right nodes for incremental crossing detection.
    let thresholds: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let uniforms: Vec<f64> = (0..e).map(|_| rng.random()).collect();
            let mut order: Vec<u32> = (0..e as u32).collect();
            order.sort_unstable_by(|&a, &b| uniforms[a as usize].total_cmp(&uniforms[b as usize]));
            let mut uf = crate::unionfind::UnionFind::new(graph.vertex_count() + 2);
            let left = graph.vertex_count();
            let right = graph.vertex_count() + 1;
            for v in &graph.left {
                uf.union(left, v.index());
            }
            for v in &graph.right {
                uf.union(right, v.index());
            }
            for &i in &order {
                let [a, b] = graph.endpoints(EdgeId(i));
                uf.union(a.index(), b.index());
                if uf.connected(left, right) {
                    return uniforms[i as usize];
                }
            }
            1.0 // no crossing even fully open (cannot happen for n >= 1)
        })
        .collect();
    let mut sorted = thresholds.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let frac_below = |p: f64| -> f64 {
        let cnt = sorted.partition_point(|u| *u < p);
        cnt as f64 / replicas as f64
    };
    let rows: Vec<SCurveRow> = p_grid
        .iter()
        .map(|&p| {
            let est = frac_below(p);
            SCurveRow {
                p,
                estimate: est,
                stderr: (est * (1.0 - est) / replicas as f64).sqrt(),
            }
        })
        .collect();
    // Quantiles of u* give the curve's level crossings directly.
    let quantile = |h: f64| -> Option<f64> {
        if h <= 0.0 || h >= 1.0 {
            return None;
        }
        let idx = ((replicas as f64) * h).floor() as usize;
        sorted.get(idx).copied()
    };
    let p_half = quantile(0.5);
    let width = match (quantile(0.9), quantile(0.1)) {
        (Some(hi), Some(lo)) => Some(hi - lo),
        _ => None,
    };
    Ok(SCurve {
        n,
        rows,
        p_half,
        width,
        replicas,
        seed,
    })
}

/// Spatial mixing ratio |P[A∩B] - P[A]P[B]| / (P[A]P[B]) for
/// A = {0 ↔ ∂Λ_n inside Λ_n} and B = {more than half of the edges outside
/// Λ_big are open}, sampled in the ambient box Λ_{2·big}.
#[derive(Debug, Clone)]
pub struct MixReport {
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
    pub degenerate: bool,
}

pub fn mixing_ratio(
    n: usize,
    big: usize,
    params: FkParams,
    replicas: usize,
    seed: u64,
) -> Result<MixReport> {
    if big < 2 * n {
        return Err(Error::InvalidParameter(format!(
            "outer radius {big} must be at least 2x inner radius {n}"
        )));
    }
    if replicas < 40 {
        return Err(Error::InvalidParameter("need at least 40 replicas".into()));
    }
    let ambient = build_box(2, 2 * big)?;
    let origin = ambient.origin.unwrap();
    let chebyshev = |v: VertexId| -> usize {
        ambient
            .coord(v)
            .iter()
            .map(|c| c.unsigned_abs() as usize)
            .max()
            .unwrap()
    };
    // Edge classes: inside Λ_n (both endpoints within n), outside Λ_big
    // (both endpoints outside the open box).
    let mut inner_edges = Vec::new();
    let mut outer_edges = Vec::new();
    for (i, [a, b]) in ambient.edges().iter().enumerate() {
        let da = chebyshev(*a);
        let db = chebyshev(*b);
        if da <= n && db <= n {
            inner_edges.push(EdgeId(i as u32));
        }
        if da >= big && db >= big {
            outer_edges.push(EdgeId(i as u32));
        }
    }
    let inner_vertices: Vec<VertexId> = (0..ambient.vertex_count() as u32)
        .map(VertexId)
        .filter(|&v| chebyshev(v) <= n)
        .collect();
    let inner_boundary: Vec<VertexId> = inner_vertices
        .iter()
        .copied()
        .filter(|&v| chebyshev(v) == n)
        .collect();

    let event_a = |cfg: &BondConfig| -> bool {
        // One-arm event measured with Λ_n edges only.
        let mut uf = crate::unionfind::UnionFind::new(ambient.vertex_count());
        for &e in &inner_edges {
            if cfg.is_open(e) {
                let [a, b] = ambient.endpoints(e);
                uf.union(a.index(), b.index());
            }
        }
        inner_boundary
            .iter()
            .any(|v| uf.connected(origin.index(), v.index()))
    };
    let event_b = |cfg: &BondConfig| -> bool {
        let open = outer_edges.iter().filter(|e| cfg.is_open(**e)).count();
        2 * open > outer_edges.len()
    };

    // Samples of (A, B) per replica.
    let q_int = params.q.round();
    let pairs: Vec<(bool, bool)> = if (params.q - 1.0).abs() < 1e-12 {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(seed, r);
                let cfg = sample_bernoulli_with(&ambient, params.p, &mut rng);
                (event_a(&cfg), event_b(&cfg))
            })
            .collect()
    } else if (params.q - q_int).abs() < 1e-12 && q_int >= 2.0 {
        // Cluster chain for integer q: thin every few global moves.
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = replica_rng(seed, r);
                let mut chain = crate::potts::EsChain::new(&ambient, params).expect("integer q");
                for _ in 0..30 {
                    chain.step(&mut rng).unwrap();
                }
                (event_a(chain.bonds()), event_b(chain.bonds()))
            })
            .collect()
    } else {
        return Err(Error::InvalidParameter(
            "mixing estimator supports q = 1 or integer q >= 2".into(),
        ));
    };

    let m = replicas as f64;
    let p_a = pairs.iter().filter(|(a, _)| *a).count() as f64 / m;
    let p_b = pairs.iter().filter(|(_, b)| *b).count() as f64 / m;
    let p_ab = pairs.iter().filter(|(a, b)| *a && *b).count() as f64 / m;
    let degenerate = p_a * m < 5.0 || p_b * m < 5.0;
    if degenerate {
        return Ok(MixReport {
            p_a,
            p_b,
            p_ab,
            ratio: f64::NAN,
            ratio_stderr: f64::NAN,
            degenerate,
        });
    }
    // Block the replicas for the ratio error bar.
    let blocks = 20usize;
    let mut ratios = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let lo = b * replicas / blocks;
        let hi = (b + 1) * replicas / blocks;
        let m = (hi - lo) as f64;
        let pa = pairs[lo..hi].iter().filter(|(a, _)| *a).count() as f64 / m;
        let pb = pairs[lo..hi].iter().filter(|(_, b)| *b).count() as f64 / m;
        let pab = pairs[lo..hi].iter().filter(|(a, b)| *a && *b).count() as f64 / m;
        if pa > 0.0 && pb > 0.0 {
            ratios.push((pab - pa * pb).abs() / (pa * pb));
        }
    }
    let est = Estimate::from_samples(&ratios, seed);
    Ok(MixReport {
        p_a,
        p_b,
        p_ab,
        ratio: (p_ab - p_a * p_b).abs() / (p_a * p_b),
        ratio_stderr: est.stderr,
        degenerate: false,
    })
}

/// Trajectory of dynamical percolation: rate-1 exponential clocks per edge,
/// state redrawn Bernoulli(p) at each ring.
#[derive(Debug, Clone)]
pub struct DynTrajectory {
    pub seed: u64,
    /// Ring times per edge, strictly increasing, within the horizon.
    pub events: Vec<Vec<f64>>,
    /// Configuration snapshots at the query times.
    pub snapshots: Vec<(f64, BondConfig)>,
}

pub fn dynamical_run(
    graph: &LatticeGraph,
    p: f64,
    horizon: f64,
    query_times: &[f64],
    seed: u64,
) -> Result<DynTrajectory> {
    dynamical_run_replica(graph, p, horizon, query_times, seed, 0)
}

/// One replica of the dynamics, drawn from stream `replica` of the seed.
pub fn dynamical_run_replica(
    graph: &LatticeGraph,
    p: f64,
    horizon: f64,
    query_times: &[f64],
    seed: u64,
    replica: u64,
) -> Result<DynTrajectory> {
    if horizon.is_nan() || horizon <= 0.0 {
        return Err(Error::InvalidParameter("horizon must be > 0".into()));
    }
    if query_times.iter().any(|&t| t < 0.0 || t > horizon) {
        return Err(Error::InvalidParameter(
            "query times must lie in [0, horizon]".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    let mut rng = replica_rng(seed, replica);
    let e = graph.edge_count();
    // Initial states and ring times.
    let mut initial = BondConfig::closed(graph);
    for i in 0..e {
        if rng.random::<f64>() < p {
            initial.0.set(i, true);
        }
    }
    let mut events: Vec<Vec<f64>> = Vec::with_capacity(e);
    let mut states: Vec<Vec<bool>> = Vec::with_capacity(e);
    for _ in 0..e {
        let mut t = 0.0;
        let mut ring = Vec::new();
        let mut st = Vec::new();
        loop {
            // Exponential(1) inter-arrival times.
            let u: f64 = rng.random();
            t -= (1.0 - u).ln();
            if t > horizon {
                break;
            }
            ring.push(t);
            st.push(rng.random::<f64>() < p);
        }
        events.push(ring);
        states.push(st);
    }
    let mut snapshots = Vec::with_capacity(query_times.len());
    for &t in query_times {
        let mut snap = BondConfig::closed(graph);
        for i in 0..e {
            let rings_before = events[i].partition_point(|&r| r <= t);
            let state = if rings_before == 0 {
                initial.0.get(i)
            } else {
                states[i][rings_before - 1]
            };
            snap.0.set(i, state);
        }
        snapshots.push((t, snap));
    }
    Ok(DynTrajectory {
        seed,
        events,
        snapshots,
    })
}

/// Replica-averaged edge marginal at each query time.
pub fn dynamical_edge_marginals(
    graph: &LatticeGraph,
    p: f64,
    horizon: f64,
    query_times: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<Vec<(f64, Estimate)>> {
    let e = graph.edge_count();
    let sums: Vec<usize> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let traj = dynamical_run_replica(graph, p, horizon, query_times, seed, r).unwrap();
            traj.snapshots
                .iter()
                .map(|(_, s)| s.open_count())
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![0usize; query_times.len()],
            |mut acc, row| {
                for (a, b) in acc.iter_mut().zip(row) {
                    *a += b;
                }
                acc
            },
        );
    Ok(query_times
        .iter()
        .zip(sums)
        .map(|(&t, s)| (t, Estimate::from_successes(s, replicas * e, seed)))
        .collect())
}

/// Single-edge lag-t autocovariance estimate; stationarity gives
/// p(1-p) e^{-t}.
pub fn dynamical_autocovariance(
    p: f64,
    lag: f64,
    replicas: usize,
    seed: u64,
) -> Result<(Estimate, f64)> {
    let graph = crate::lattice::LatticeGraph::from_parts(
        crate::lattice::LatticeKind::Triangular,
        2,
        vec![0, 0, 1, 0],
        vec![[VertexId(0), VertexId(1)]],
    );
    let pairs: Vec<(f64, f64)> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let traj = dynamical_run_replica(&graph, p, lag, &[0.0, lag], seed, r).unwrap();
            let a = traj.snapshots[0].1.open_count() as f64;
            let b = traj.snapshots[1].1.open_count() as f64;
            (a, b)
        })
        .collect();
    let m = replicas as f64;
    let mean_a = pairs.iter().map(|(a, _)| a).sum::<f64>() / m;
    let mean_b = pairs.iter().map(|(_, b)| b).sum::<f64>() / m;
    let samples: Vec<f64> = pairs
        .iter()
        .map(|(a, b)| (a - mean_a) * (b - mean_b))
        .collect();
    let mut est = Estimate::from_samples(&samples, seed);
    // Bias-correct the covariance denominator (n-1).
    est.mean = samples.iter().sum::<f64>() / (m - 1.0);
    let theory = p * (1.0 - p) * (-lag).exp();
    Ok((est, theory))
}
