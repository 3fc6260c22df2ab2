//! The q-state Potts model and its cluster/color coupling with FK
//! percolation: color clusters uniformly to go one way, keep only
//! monochromatic edges open with probability p to go back.
//!
//! Convention: a coloring σ carries weight exp(2β · #{e : σ_x = σ_y}) with
//! β = -½ log(1-p). The exact total-variation equivalence test below is the
//! arbiter of this normalization.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::clusters;
use crate::config::BondConfig;
use crate::error::{Error, Result};
use crate::fk::FkParams;
use crate::lattice::LatticeGraph;
use crate::rng::experiment_rng;
use crate::stats::Estimate;

/// Inverse temperature and color count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PottsParams {
    pub beta: f64,
    pub q: usize,
}

impl PottsParams {
    pub fn new(beta: f64, q: usize) -> Result<PottsParams> {
        if beta < 0.0 || beta.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must be >= 0"
            )));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!("q = {q} must be >= 2")));
        }
        Ok(PottsParams { beta, q })
    }
}

/// One color in 1..=q per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PottsConfig {
    pub colors: Vec<u8>,
}

impl PottsConfig {
    pub fn check(&self, graph: &LatticeGraph, q: usize) -> Result<()> {
        if self.colors.len() != graph.vertex_count() {
            return Err(Error::MismatchedConfig {
                expected: graph.vertex_count(),
                got: self.colors.len(),
            });
        }
        if self.colors.iter().any(|&c| c == 0 || c as usize > q) {
            return Err(Error::InvalidParameter("color outside 1..=q".into()));
        }
        Ok(())
    }

    /// ±1 view of a two-color configuration.
    pub fn spins(&self) -> Vec<i8> {
        self.colors
            .iter()
            .map(|&c| if c == 1 { 1 } else { -1 })
            .collect()
    }

    /// Fraction of vertices carrying each color.
    pub fn color_fractions(&self, q: usize) -> Vec<f64> {
        let mut counts = vec![0usize; q];
        for &c in &self.colors {
            counts[(c - 1) as usize] += 1;
        }
        counts
            .iter()
            .map(|&c| c as f64 / self.colors.len() as f64)
            .collect()
    }
}

/// β = -½ log(1-p); infinite at p = 1.
pub fn beta_of_p(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    if p == 1.0 {
        return Err(Error::InvalidParameter(
            "p = 1 couples to infinite beta".into(),
        ));
    }
    Ok(-0.5 * (1.0 - p).ln())
}

/// p = 1 - e^(-2β), the inverse of [`beta_of_p`].
pub fn p_of_beta(beta: f64) -> Result<f64> {
    if beta < 0.0 || beta.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "beta = {beta} must be >= 0"
        )));
    }
    Ok(1.0 - (-2.0 * beta).exp())
}

/// Color each cluster of ω uniformly and independently.
pub fn es_color(
    graph: &LatticeGraph,
    config: &BondConfig,
    q: usize,
    rng: &mut impl Rng,
) -> Result<PottsConfig> {
    if q < 2 {
        return Err(Error::InvalidParameter("q >= 2".into()));
    }
    let st = clusters(graph, config)?;
    let cluster_colors: Vec<u8> = (0..st.count)
        .map(|_| rng.random_range(1..=q as u8))
        .collect();
    Ok(PottsConfig {
        colors: st.component.iter().map(|&c| cluster_colors[c]).collect(),
    })
}

/// Open each monochromatic edge independently with probability p;
/// bichromatic edges stay closed.
pub fn es_bond(
    graph: &LatticeGraph,
    coloring: &PottsConfig,
    p: f64,
    rng: &mut impl Rng,
) -> Result<BondConfig> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    let mut config = BondConfig::closed(graph);
    for (i, [a, b]) in graph.edges().iter().enumerate() {
        if coloring.colors[a.index()] == coloring.colors[b.index()] && rng.random::<f64>() < p {
            config.0.set(i, true);
        }
    }
    Ok(config)
}

/// Log-weight 2β · #{satisfied edges}.
pub fn potts_weight(
    graph: &LatticeGraph,
    coloring: &PottsConfig,
    params: PottsParams,
) -> Result<f64> {
    coloring.check(graph, params.q)?;
    let satisfied = graph
        .edges()
        .iter()
        .filter(|[a, b]| coloring.colors[a.index()] == coloring.colors[b.index()])
        .count();
    Ok(2.0 * params.beta * satisfied as f64)
}

/// Iterate over all q^V colorings (small graphs only).
fn for_each_coloring(vertices: usize, q: usize, mut f: impl FnMut(&PottsConfig)) -> Result<()> {
    let total = (q as f64).powi(vertices as i32);
    if total > 2e7 {
        return Err(Error::CapExceeded {
            size: vertices,
            cap: 15,
            unit: "vertices",
        });
    }
    let mut colors = vec![1u8; vertices];
    loop {
        f(&PottsConfig {
            colors: colors.clone(),
        });
        let mut i = 0;
        loop {
            if i == vertices {
                return Ok(());
            }
            if (colors[i] as usize) < q {
                colors[i] += 1;
                break;
            }
            colors[i] = 1;
            i += 1;
        }
    }
}

/// Exact Potts distribution by enumeration of colorings.
pub fn potts_exact(graph: &LatticeGraph, params: PottsParams) -> Result<Vec<(PottsConfig, f64)>> {
    let mut items = Vec::new();
    let mut z = 0.0;
    for_each_coloring(graph.vertex_count(), params.q, |c| {
        let w = potts_weight(graph, c, params).unwrap().exp();
        z += w;
        items.push((c.clone(), w));
    })?;
    for (_, w) in &mut items {
        *w /= z;
    }
    Ok(items)
}

/// Exact law of es_color applied to the FK measure: each ω contributes
/// mass q^{-k(ω)} · P[ω] to every coloring that is constant on its clusters.
pub fn es_pushforward_exact(
    graph: &LatticeGraph,
    params: FkParams,
) -> Result<Vec<(PottsConfig, f64)>> {
    let q = params.q.round() as usize;
    if (params.q - q as f64).abs() > 1e-12 || q < 2 {
        return Err(Error::InvalidParameter(
            "coupling needs integer q >= 2".into(),
        ));
    }
    let e = graph.edge_count();
    if e > crate::percolation::ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            size: e,
            cap: crate::percolation::ENUMERATION_CAP,
            unit: "edges",
        });
    }
    let mut index = std::collections::HashMap::new();
    let mut items: Vec<(PottsConfig, f64)> = Vec::new();
    for_each_coloring(graph.vertex_count(), q, |c| {
        index.insert(c.clone(), items.len());
        items.push((c.clone(), 0.0));
    })?;

    let mut z = 0.0;
    let mut masses: Vec<(Vec<usize>, usize, f64)> = Vec::new();
    let mut config = BondConfig::closed(graph);
    for mask in 0..(1u64 << e) {
        config.0.set_mask(mask);
        let st = clusters(graph, &config)?;
        let w = params.p.powi(config.open_count() as i32)
            * (1.0 - params.p).powi((e - config.open_count()) as i32)
            * params.q.powi(st.count as i32);
        z += w;
        masses.push((st.component, st.count, w));
    }
    for (component, k, w) in masses {
        let per_coloring = w / z / (q as f64).powi(k as i32);
        // Walk all q^k cluster colorings and push to vertex colorings.
        let mut cluster_colors = vec![1u8; k];
        'outer: loop {
            let coloring = PottsConfig {
                colors: component.iter().map(|&c| cluster_colors[c]).collect(),
            };
            items[index[&coloring]].1 += per_coloring;
            let mut i = 0;
            loop {
                if i == k {
                    break 'outer;
                }
                if (cluster_colors[i] as usize) < q {
                    cluster_colors[i] += 1;
                    break;
                }
                cluster_colors[i] = 1;
                i += 1;
            }
        }
    }
    Ok(items)
}

/// Total-variation distance between two distributions listed in the same
/// coloring order.
pub fn total_variation(a: &[(PottsConfig, f64)], b: &[(PottsConfig, f64)]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a
        .iter()
        .zip(b)
        .map(|((ca, pa), (cb, pb))| {
            debug_assert_eq!(ca, cb);
            (pa - pb).abs()
        })
        .sum::<f64>()
}

/// Alternating color/bond chain. The bond half-step leaves the FK measure
/// with integer q invariant, so this doubles as a fast cluster-move FK
/// sampler next to the single-edge heat bath.
pub struct EsChain<'g> {
    graph: &'g LatticeGraph,
    p: f64,
    q: usize,
    bonds: BondConfig,
}

impl<'g> EsChain<'g> {
    pub fn new(graph: &'g LatticeGraph, params: FkParams) -> Result<EsChain<'g>> {
        let q = params.q.round() as usize;
        if (params.q - q as f64).abs() > 1e-12 || q < 2 {
            return Err(Error::InvalidParameter(
                "cluster chain needs integer q >= 2".into(),
            ));
        }
        Ok(EsChain {
            graph,
            p: params.p,
            q,
            bonds: BondConfig::closed(graph),
        })
    }

    pub fn bonds(&self) -> &BondConfig {
        &self.bonds
    }

    pub fn step(&mut self, rng: &mut impl Rng) -> Result<PottsConfig> {
        let coloring = es_color(self.graph, &self.bonds, self.q, rng)?;
        self.bonds = es_bond(self.graph, &coloring, self.p, rng)?;
        Ok(coloring)
    }
}

/// Summary of an alternating-chain Potts run.
#[derive(Debug, Clone)]
pub struct PottsRun {
    /// Mean fraction of vertices per color.
    pub color_fractions: Vec<f64>,
    /// Largest color fraction per sweep.
    pub majority_fraction: Estimate,
    /// Mean fraction of satisfied edges.
    pub satisfied_fraction: Estimate,
}

pub fn potts_sample(
    graph: &LatticeGraph,
    params: PottsParams,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PottsRun> {
    if sweeps < 1 {
        return Err(Error::InvalidParameter("sweeps >= 1".into()));
    }
    let p = p_of_beta(params.beta)?;
    let fk = FkParams::new(p, params.q as f64)?;
    let mut rng = experiment_rng(seed);
    let mut chain = EsChain::new(graph, fk)?;
    for _ in 0..burn_in {
        chain.step(&mut rng)?;
    }
    let mut fractions = vec![0.0; params.q];
    let mut majority = Vec::with_capacity(sweeps);
    let mut satisfied = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        let coloring = chain.step(&mut rng)?;
        let fr = coloring.color_fractions(params.q);
        for (acc, f) in fractions.iter_mut().zip(&fr) {
            *acc += f;
        }
        majority.push(fr.iter().cloned().fold(0.0, f64::max));
        let sat = graph
            .edges()
            .iter()
            .filter(|[a, b]| coloring.colors[a.index()] == coloring.colors[b.index()])
            .count();
        satisfied.push(sat as f64 / graph.edge_count() as f64);
    }
    for f in &mut fractions {
        *f /= sweeps as f64;
    }
    Ok(PottsRun {
        color_fractions: fractions,
        majority_fraction: Estimate::from_chain(&majority, crate::fk::CHAIN_BATCHES, seed),
        satisfied_fraction: Estimate::from_chain(&satisfied, crate::fk::CHAIN_BATCHES, seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::{fk_exact, fk_weight, Boundary};
    use crate::lattice::build_rectangle;

    #[test]
    fn beta_p_inverse_pair() {
        assert!((beta_of_p(1.0 - (-2.0f64).exp()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(beta_of_p(0.0).unwrap(), 0.0);
        for p in [0.0, 0.37, 0.9, 1.0 - 1e-12] {
            let rt = p_of_beta(beta_of_p(p).unwrap()).unwrap();
            assert!((rt - p).abs() < 1e-15, "p={p} round-trip {rt}");
        }
        assert!(beta_of_p(1.0).is_err());
        assert!(p_of_beta(-0.1).is_err());
    }

    #[test]
    fn es_color_constant_on_components() {
        let g = build_rectangle(3, 2).unwrap();
        let mut rng = experiment_rng(5);
        for _ in 0..20 {
            let cfg = crate::percolation::sample_bernoulli_with(&g, 0.5, &mut rng);
            let coloring = es_color(&g, &cfg, 3, &mut rng).unwrap();
            let st = clusters(&g, &cfg).unwrap();
            for [a, b] in g.edges() {
                if st.same_component(*a, *b) {
                    assert_eq!(coloring.colors[a.index()], coloring.colors[b.index()]);
                }
            }
        }
    }

    #[test]
    fn es_color_extremes() {
        let g = build_rectangle(2, 2).unwrap();
        let mut rng = experiment_rng(8);
        // All open: monochromatic.
        let coloring = es_color(&g, &BondConfig::open(&g), 4, &mut rng).unwrap();
        assert!(coloring.colors.iter().all(|&c| c == coloring.colors[0]));
        // All closed: i.i.d. uniform colors.
        let mut counts = [0usize; 3];
        let trials = 3_000;
        for _ in 0..trials {
            let coloring = es_color(&g, &BondConfig::closed(&g), 3, &mut rng).unwrap();
            for &c in &coloring.colors {
                counts[(c - 1) as usize] += 1;
            }
        }
        let total = (trials * g.vertex_count()) as f64;
        for c in counts {
            let f = c as f64 / total;
            assert!((f - 1.0 / 3.0).abs() < 0.02, "color fraction {f}");
        }
    }

    #[test]
    fn single_cluster_color_is_uniform() {
        // All-open graph has one component; its color is uniform over 1..=q.
        let g = build_rectangle(2, 2).unwrap();
        let mut rng = experiment_rng(12);
        let trials = 6_000;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            let coloring = es_color(&g, &BondConfig::open(&g), 4, &mut rng).unwrap();
            counts[(coloring.colors[0] - 1) as usize] += 1;
        }
        let se = (0.25f64 * 0.75 / trials as f64).sqrt();
        for c in counts {
            let f = c as f64 / trials as f64;
            assert!((f - 0.25).abs() < 4.0 * se, "fraction {f}");
        }
    }

    #[test]
    fn es_bond_extremes() {
        let g = build_rectangle(2, 2).unwrap();
        let mut rng = experiment_rng(9);
        let mono = PottsConfig {
            colors: vec![2; g.vertex_count()],
        };
        let cfg = es_bond(&g, &mono, 1.0, &mut rng).unwrap();
        assert_eq!(cfg.open_count(), g.edge_count());
        // Proper 2-coloring of the bipartite grid: nothing can open.
        let proper = PottsConfig {
            colors: (0..g.vertex_count())
                .map(|v| {
                    let c = g.coord(crate::lattice::VertexId(v as u32));
                    (1 + (c[0] + c[1]).rem_euclid(2)) as u8
                })
                .collect(),
        };
        let cfg = es_bond(&g, &proper, 1.0, &mut rng).unwrap();
        assert_eq!(cfg.open_count(), 0);
    }

    #[test]
    fn potts_weight_conventions() {
        let g = build_rectangle(1, 1).unwrap();
        // β = 0: uniform over colorings.
        let params = PottsParams::new(0.0, 3).unwrap();
        let dist = potts_exact(&g, params).unwrap();
        for (_, p) in &dist {
            assert!((p - 1.0 / 81.0).abs() < 1e-15);
        }
        // q = 2 relabeled ±1 reproduces Ising spin weights up to a constant:
        // 2β·#sat = β·Σ σσ' + β|E|.
        let params = PottsParams::new(0.44, 2).unwrap();
        for_each_coloring(g.vertex_count(), 2, |c| {
            let w = potts_weight(&g, c, params).unwrap();
            let spins = c.spins();
            let ising: f64 = g
                .edges()
                .iter()
                .map(|[a, b]| spins[a.index()] as f64 * spins[b.index()] as f64)
                .sum();
            assert!((w - (0.44 * ising + 0.44 * g.edge_count() as f64)).abs() < 1e-12);
        })
        .unwrap();
    }

    #[test]
    fn pushforward_equals_potts_on_four_cycle() {
        let g = crate::lattice::LatticeGraph::cycle(4);
        for q in [2usize, 3] {
            for p in [0.3, 0.6] {
                let fk = FkParams::new(p, q as f64).unwrap();
                let potts = PottsParams::new(beta_of_p(p).unwrap(), q).unwrap();
                let pushed = es_pushforward_exact(&g, fk).unwrap();
                let direct = potts_exact(&g, potts).unwrap();
                let tv = total_variation(&pushed, &direct);
                assert!(tv < 1e-12, "q={q} p={p}: TV = {tv:e}");
            }
        }
    }

    #[test]
    fn round_trip_preserves_fk_distribution_on_four_cycle() {
        // One exact color/bond round trip applied to the exact FK
        // distribution returns the same distribution.
        let g = crate::lattice::LatticeGraph::cycle(4);
        let params = FkParams::new(0.45, 2.0).unwrap();
        let e = g.edge_count();
        let exact = fk_exact(&g, params, Boundary::Free).unwrap();

        let mut pw = vec![0.0; 1 << e];
        let mut z = 0.0;
        let mut cfg = BondConfig::closed(&g);
        for mask in 0..(1u64 << e) {
            cfg.0.set_mask(mask);
            let w = fk_weight(&g, &cfg, params, Boundary::Free)
                .unwrap()
                .weight();
            pw[mask as usize] = w;
            z += w;
        }
        for w in &mut pw {
            *w /= z;
        }

        let mut after = vec![0.0; 1 << e];
        for mask in 0..(1u64 << e) {
            cfg.0.set_mask(mask);
            let st = clusters(&g, &cfg).unwrap();
            let k = st.count;
            let mut cluster_colors = vec![1u8; k];
            'outer: loop {
                let coloring = PottsConfig {
                    colors: st.component.iter().map(|&c| cluster_colors[c]).collect(),
                };
                let p_sigma = pw[mask as usize] / 2f64.powi(k as i32);
                let mono: Vec<usize> = (0..e)
                    .filter(|&i| {
                        let [a, b] = g.endpoints(crate::lattice::EdgeId(i as u32));
                        coloring.colors[a.index()] == coloring.colors[b.index()]
                    })
                    .collect();
                for sub in 0..(1u64 << mono.len()) {
                    let mut m2 = 0u64;
                    let mut prob = p_sigma;
                    for (j, &edge) in mono.iter().enumerate() {
                        if sub >> j & 1 == 1 {
                            m2 |= 1 << edge;
                            prob *= params.p;
                        } else {
                            prob *= 1.0 - params.p;
                        }
                    }
                    after[m2 as usize] += prob;
                }
                let mut i = 0;
                loop {
                    if i == k {
                        break 'outer;
                    }
                    if cluster_colors[i] < 2 {
                        cluster_colors[i] += 1;
                        break;
                    }
                    cluster_colors[i] = 1;
                    i += 1;
                }
            }
        }
        for mask in 0..(1usize << e) {
            assert!(
                (after[mask] - pw[mask]).abs() < 1e-12,
                "mask {mask:b}: {} vs {}",
                after[mask],
                pw[mask]
            );
        }
        let mut marg = vec![0.0; e];
        for mask in 0..(1usize << e) {
            for (i, m) in marg.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *m += after[mask];
                }
            }
        }
        for (m, x) in marg.iter().zip(&exact.edge_marginals) {
            assert!((m - x).abs() < 1e-12);
        }
    }

    #[test]
    fn cluster_chain_matches_fk_oracle_marginals() {
        let g = crate::lattice::LatticeGraph::cycle(4);
        let params = FkParams::new(0.5, 2.0).unwrap();
        let exact = fk_exact(&g, params, Boundary::Free).unwrap();
        let mut rng = experiment_rng(23);
        let mut chain = EsChain::new(&g, params).unwrap();
        for _ in 0..200 {
            chain.step(&mut rng).unwrap();
        }
        let sweeps = 40_000;
        let mut freq = vec![0.0; g.edge_count()];
        for _ in 0..sweeps {
            chain.step(&mut rng).unwrap();
            for i in chain.bonds().0.ones() {
                freq[i] += 1.0;
            }
        }
        for (f, x) in freq.iter().zip(&exact.edge_marginals) {
            let f = f / sweeps as f64;
            assert!((f - x).abs() < 0.015, "chain marginal {f} vs exact {x}");
        }
    }

    #[test]
    fn potts_sample_reports_fractions() {
        let g = build_rectangle(4, 4).unwrap();
        let run = potts_sample(&g, PottsParams::new(0.2, 3).unwrap(), 500, 50, 4).unwrap();
        let total: f64 = run.color_fractions.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(run.majority_fraction.mean >= 1.0 / 3.0);
        assert!(run.satisfied_fraction.mean > 0.0 && run.satisfied_fraction.mean < 1.0);
    }
}
