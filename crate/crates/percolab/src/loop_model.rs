//! The loop O(n) model on hexagonal domains: even subgraphs weighted by
//! x^|η| n^ℓ(η), the domain-wall bijection with face configurations, exact
//! enumeration through that bijection, and plaquette Metropolis dynamics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{BitConfig, BondConfig};
use crate::error::{Error, Result};
use crate::lattice::HexDomain;
use crate::rng::experiment_rng;
use crate::stats::Estimate;

/// Edge configuration η on the hexagonal domain; only even subgraphs carry
/// weight.
pub type LoopConfig = BondConfig;

/// Edge-weight x > 0 and loop-weight n >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopParams {
    pub x: f64,
    pub n: f64,
}

impl LoopParams {
    pub fn new(x: f64, n: f64) -> Result<LoopParams> {
        if x.is_nan() || x <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "edge-weight x = {x} must be > 0"
            )));
        }
        if n.is_nan() || n < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "loop-weight n = {n} must be >= 0"
            )));
        }
        Ok(LoopParams { x, n })
    }
}

/// One bit per interior face; the exterior face is fixed to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceConfig(pub BitConfig);

impl FaceConfig {
    pub fn all_ones(domain: &HexDomain) -> FaceConfig {
        FaceConfig(BitConfig::open(domain.face_count()))
    }

    pub fn from_mask(mask: u64, domain: &HexDomain) -> FaceConfig {
        FaceConfig(BitConfig::from_mask(mask, domain.face_count()))
    }

    /// State of a face slot; `None` is the exterior, always 1.
    fn state(&self, f: Option<u32>) -> bool {
        match f {
            Some(i) => self.0.get(i as usize),
            None => true,
        }
    }
}

/// Every vertex must have η-degree 0 or 2 (degree 3 caps it there).
pub fn is_even(domain: &HexDomain, eta: &LoopConfig) -> Result<bool> {
    let graph = domain.graph();
    eta.check(graph)?;
    let mut degree = vec![0u8; graph.vertex_count()];
    for i in eta.0.ones() {
        for v in graph.endpoints(crate::lattice::EdgeId(i as u32)) {
            degree[v.index()] += 1;
        }
    }
    Ok(degree.iter().all(|&d| d % 2 == 0))
}

/// ℓ(η): the number of loops, i.e. connected components of the subgraph
/// spanned by the open edges (each is a simple cycle when η is even).
pub fn loop_count(domain: &HexDomain, eta: &LoopConfig) -> Result<usize> {
    let graph = domain.graph();
    eta.check(graph)?;
    let mut uf = crate::unionfind::UnionFind::new(graph.vertex_count());
    let mut touched = vec![false; graph.vertex_count()];
    for i in eta.0.ones() {
        let [a, b] = graph.endpoints(crate::lattice::EdgeId(i as u32));
        uf.union(a.index(), b.index());
        touched[a.index()] = true;
        touched[b.index()] = true;
    }
    // Every component with an edge consists of touched vertices, so its
    // root is touched too.
    let mut count = 0;
    for v in 0..graph.vertex_count() {
        if touched[v] && uf.find(v) == v {
            count += 1;
        }
    }
    Ok(count)
}

/// Log-weight |η| log x + ℓ(η) log n; -∞ for non-even configurations and,
/// at n = 0, for any configuration with a loop.
pub fn loop_weight(domain: &HexDomain, eta: &LoopConfig, params: LoopParams) -> Result<f64> {
    if !is_even(domain, eta)? {
        return Ok(f64::NEG_INFINITY);
    }
    let loops = loop_count(domain, eta)?;
    let mut lw = eta.open_count() as f64 * params.x.ln();
    if loops > 0 {
        if params.n == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        lw += loops as f64 * params.n.ln();
    }
    Ok(lw)
}

fn raw_weight(open: usize, loops: usize, params: LoopParams) -> f64 {
    params.x.powi(open as i32) * params.n.powi(loops as i32)
}

/// Domain walls of a face configuration: an edge opens exactly when the two
/// faces it separates disagree (the exterior counts as 1).
pub fn low_temp_expand(domain: &HexDomain, faces: &FaceConfig) -> LoopConfig {
    let graph = domain.graph();
    let mut eta = BondConfig::closed(graph);
    for e in 0..graph.edge_count() {
        let [fa, fb] = domain.interior_faces_of_edge(crate::lattice::EdgeId(e as u32));
        if faces.state(fa) != faces.state(fb) {
            eta.0.set(e, true);
        }
    }
    eta
}

/// Inverse of [`low_temp_expand`]: assign faces by the parity of walls
/// crossed from the exterior. Fails on non-even input, where the parity
/// assignment is inconsistent.
pub fn low_temp_collapse(domain: &HexDomain, eta: &LoopConfig) -> Result<FaceConfig> {
    let graph = domain.graph();
    eta.check(graph)?;
    let f = domain.face_count();
    // Face adjacency across each edge; slot f is the exterior, fixed to 1.
    let mut state: Vec<Option<bool>> = vec![None; f + 1];
    state[f] = Some(true);
    let mut queue = std::collections::VecDeque::from([f]);
    // Incidence lists: (face slot, face slot, flip) per edge.
    let sides: Vec<(usize, usize, bool)> = (0..graph.edge_count())
        .map(|e| {
            let [fa, fb] = domain.interior_faces_of_edge(crate::lattice::EdgeId(e as u32));
            (
                fa.map_or(f, |i| i as usize),
                fb.map_or(f, |i| i as usize),
                eta.0.get(e),
            )
        })
        .collect();
    while let Some(cur) = queue.pop_front() {
        let cur_state = state[cur].unwrap();
        for &(a, b, flip) in &sides {
            let other = if a == cur {
                b
            } else if b == cur {
                a
            } else {
                continue;
            };
            let expected = cur_state ^ flip;
            match state[other] {
                None => {
                    state[other] = Some(expected);
                    queue.push_back(other);
                }
                Some(s) if s != expected => return Err(Error::NotEven),
                _ => {}
            }
        }
    }
    let mut out = BitConfig::closed(f);
    for (i, s) in state.iter().take(f).enumerate() {
        out.set(i, s.expect("face graph with exterior is connected"));
    }
    Ok(FaceConfig(out))
}

/// Exact distribution over even subgraphs, enumerated through the face
/// bijection (2^faces configurations).
#[derive(Debug, Clone)]
pub struct LoopExact {
    pub z: f64,
    /// Mean fraction of open edges.
    pub edge_density: f64,
    /// Mean number of loops.
    pub mean_loops: f64,
    /// Probability of each face configuration mask.
    pub probabilities: Vec<f64>,
}

/// Cap on the number of faces enumerated by [`loop_exact`].
pub const FACE_CAP: usize = 20;

pub fn loop_exact(domain: &HexDomain, params: LoopParams) -> Result<LoopExact> {
    let f = domain.face_count();
    if f > FACE_CAP {
        return Err(Error::CapExceeded {
            size: f,
            cap: FACE_CAP,
            unit: "faces",
        });
    }
    let mut z = 0.0;
    let mut density = 0.0;
    let mut loops_mean = 0.0;
    let mut probabilities = vec![0.0; 1 << f];
    for mask in 0..(1u64 << f) {
        let faces = FaceConfig::from_mask(mask, domain);
        let eta = low_temp_expand(domain, &faces);
        debug_assert!(is_even(domain, &eta).unwrap());
        let loops = loop_count(domain, &eta)?;
        let w = raw_weight(eta.open_count(), loops, params);
        z += w;
        density += w * eta.open_count() as f64;
        loops_mean += w * loops as f64;
        probabilities[mask as usize] = w;
    }
    if z <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    for p in &mut probabilities {
        *p /= z;
    }
    Ok(LoopExact {
        z,
        edge_density: density / z / domain.graph().edge_count() as f64,
        mean_loops: loops_mean / z,
        probabilities,
    })
}

/// Metropolis plaquette move: propose η' = η Δ ∂(face) and accept with the
/// weight ratio. Evenness is preserved because face boundaries span the
/// cycle space. Returns whether the move was accepted.
pub fn plaquette_step(
    domain: &HexDomain,
    eta: &mut LoopConfig,
    params: LoopParams,
    face: u32,
    rng: &mut impl Rng,
) -> Result<bool> {
    if face as usize >= domain.face_count() {
        return Err(Error::InvalidParameter(format!("face {face} out of range")));
    }
    let mask = domain.face_edge_mask(face);
    let before_open = eta.open_count();
    let before_loops = loop_count(domain, eta)?;
    eta.0.xor_mask(mask);
    let after_open = eta.open_count();
    let after_loops = loop_count(domain, eta)?;
    let ratio =
        raw_weight(after_open, after_loops, params) / raw_weight(before_open, before_loops, params);
    if ratio >= 1.0 || rng.random::<f64>() < ratio {
        Ok(true)
    } else {
        eta.0.xor_mask(mask); // reject: undo
        Ok(false)
    }
}

/// One systematic sweep over all interior faces.
pub fn plaquette_sweep(
    domain: &HexDomain,
    eta: &mut LoopConfig,
    params: LoopParams,
    rng: &mut impl Rng,
) -> Result<usize> {
    let mut accepted = 0;
    for f in 0..domain.face_count() as u32 {
        accepted += plaquette_step(domain, eta, params, f, rng)? as usize;
    }
    Ok(accepted)
}

/// Chain summary for the plaquette sampler.
#[derive(Debug, Clone)]
pub struct LoopRun {
    pub edge_density: Estimate,
    pub mean_loops: Estimate,
    pub acceptance: f64,
}

pub fn loop_sample(
    domain: &HexDomain,
    params: LoopParams,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<LoopRun> {
    if sweeps < 1 {
        return Err(Error::InvalidParameter("sweeps >= 1".into()));
    }
    let mut rng = experiment_rng(seed);
    let mut eta = BondConfig::closed(domain.graph());
    for _ in 0..burn_in {
        plaquette_sweep(domain, &mut eta, params, &mut rng)?;
    }
    let e = domain.graph().edge_count();
    let mut density = Vec::with_capacity(sweeps);
    let mut loops = Vec::with_capacity(sweeps);
    let mut accepted = 0usize;
    for _ in 0..sweeps {
        accepted += plaquette_sweep(domain, &mut eta, params, &mut rng)?;
        density.push(eta.open_count() as f64 / e as f64);
        loops.push(loop_count(domain, &eta)? as f64);
    }
    Ok(LoopRun {
        edge_density: Estimate::from_chain(&density, crate::fk::CHAIN_BATCHES, seed),
        mean_loops: Estimate::from_chain(&loops, crate::fk::CHAIN_BATCHES, seed),
        acceptance: accepted as f64 / (sweeps * domain.face_count()) as f64,
    })
}

/// Critical edge-weight x_c(n) = 1/sqrt(2 + sqrt(2 - n)) for 0 <= n <= 2.
pub fn x_c(n: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "x_c defined for n in [0,2], got {n}"
        )));
    }
    Ok(1.0 / (2.0 + (2.0 - n).sqrt()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_hex_domain;

    #[test]
    fn empty_and_hexagon_configs() {
        let d = build_hex_domain(1).unwrap();
        let empty = BondConfig::closed(d.graph());
        assert!(is_even(&d, &empty).unwrap());
        assert_eq!(loop_count(&d, &empty).unwrap(), 0);
        let hexagon = BondConfig::open(d.graph());
        assert!(is_even(&d, &hexagon).unwrap());
        assert_eq!(loop_count(&d, &hexagon).unwrap(), 1);
        // One isolated open edge has odd endpoints.
        let mut single = BondConfig::closed(d.graph());
        single.set(crate::lattice::EdgeId(0), true);
        assert!(!is_even(&d, &single).unwrap());
    }

    #[test]
    fn weights() {
        let d = build_hex_domain(1).unwrap();
        let params = LoopParams::new(0.4, 1.7).unwrap();
        let empty = BondConfig::closed(d.graph());
        assert_eq!(loop_weight(&d, &empty, params).unwrap(), 0.0);
        let hexagon = BondConfig::open(d.graph());
        let lw = loop_weight(&d, &hexagon, params).unwrap();
        assert!((lw.exp() - 0.4f64.powi(6) * 1.7).abs() < 1e-15);
        let mut single = BondConfig::closed(d.graph());
        single.set(crate::lattice::EdgeId(0), true);
        assert_eq!(loop_weight(&d, &single, params).unwrap(), f64::NEG_INFINITY);
        // n = 0 kills every loop.
        let strict = LoopParams::new(0.4, 0.0).unwrap();
        assert_eq!(
            loop_weight(&d, &hexagon, strict).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(loop_weight(&d, &empty, strict).unwrap(), 0.0);
    }

    #[test]
    fn expand_basic_cases() {
        let d = build_hex_domain(2).unwrap();
        // All faces 1 (matching the exterior): no walls.
        let eta = low_temp_expand(&d, &FaceConfig::all_ones(&d));
        assert_eq!(eta.open_count(), 0);
        // Exactly one interior face 0: its hexagon boundary.
        for f in 0..d.face_count() {
            let mask = !0u64 ^ (1 << f);
            let faces = FaceConfig::from_mask(mask, &d);
            let eta = low_temp_expand(&d, &faces);
            assert_eq!(eta.open_count(), 6, "face {f}");
            let open_mask = (0..d.graph().edge_count())
                .filter(|&e| eta.0.get(e))
                .map(|e| 1u64 << e)
                .fold(0, |a, b| a | b);
            assert_eq!(open_mask, d.face_edge_mask(f as u32));
            assert_eq!(loop_count(&d, &eta).unwrap(), 1);
        }
    }

    #[test]
    fn expand_collapse_roundtrip_exhaustive_radius_two() {
        let d = build_hex_domain(2).unwrap();
        assert_eq!(d.face_count(), 7);
        for mask in 0..(1u64 << 7) {
            let faces = FaceConfig::from_mask(mask, &d);
            let eta = low_temp_expand(&d, &faces);
            assert!(is_even(&d, &eta).unwrap(), "walls are always even");
            let back = low_temp_collapse(&d, &eta).unwrap();
            assert_eq!(back, faces, "mask {mask:b}");
        }
    }

    #[test]
    fn collapse_rejects_odd_configs() {
        let d = build_hex_domain(2).unwrap();
        let mut eta = BondConfig::closed(d.graph());
        eta.set(crate::lattice::EdgeId(3), true);
        assert!(matches!(low_temp_collapse(&d, &eta), Err(Error::NotEven)));
    }

    #[test]
    fn radius_one_hexagon_probability() {
        // Two even subgraphs only: P[hexagon] = x⁶ n / (1 + x⁶ n).
        let d = build_hex_domain(1).unwrap();
        for (x, n) in [(0.3, 1.0), (0.6, 2.0), (0.9, 0.5)] {
            let params = LoopParams::new(x, n).unwrap();
            let exact = loop_exact(&d, params).unwrap();
            let hexw = x.powi(6) * n;
            assert!((exact.z - (1.0 + hexw)).abs() < 1e-12);
            assert!((exact.edge_density - hexw / (1.0 + hexw)).abs() < 1e-12);
            // Face mask 0 (the lone face at state 0) is the wall config.
            assert!((exact.probabilities[0] - hexw / (1.0 + hexw)).abs() < 1e-12);
        }
    }

    #[test]
    fn small_x_concentrates_on_empty() {
        let d = build_hex_domain(2).unwrap();
        let params = LoopParams::new(1e-4, 2.0).unwrap();
        let exact = loop_exact(&d, params).unwrap();
        // All faces 1 ⇒ empty η.
        assert!(exact.probabilities[(1 << 7) - 1] > 0.999999);
    }

    #[test]
    fn ising_low_temperature_weights_at_n_one() {
        // n = 1, x = e^{-2β}: the loop weight equals e^{-2β|η|}.
        let d = build_hex_domain(2).unwrap();
        let beta = 0.55f64;
        let x = (-2.0 * beta).exp();
        let params = LoopParams::new(x, 1.0).unwrap();
        let exact = loop_exact(&d, params).unwrap();
        let mut z = 0.0;
        let mut weights = vec![0.0; 1 << 7];
        for mask in 0..(1u64 << 7) {
            let eta = low_temp_expand(&d, &FaceConfig::from_mask(mask, &d));
            let w = (-2.0 * beta * eta.open_count() as f64).exp();
            weights[mask as usize] = w;
            z += w;
        }
        for (pw, w) in exact.probabilities.iter().zip(&weights) {
            assert!((pw - w / z).abs() < 1e-12);
        }
    }

    #[test]
    fn plaquette_move_preserves_evenness_and_is_involutive() {
        let d = build_hex_domain(2).unwrap();
        let params = LoopParams::new(0.8, 1.5).unwrap();
        let mut rng = experiment_rng(17);
        let mut eta = BondConfig::closed(d.graph());
        for _ in 0..200 {
            let f = rng.random_range(0..d.face_count() as u32);
            plaquette_step(&d, &mut eta, params, f, &mut rng).unwrap();
            assert!(is_even(&d, &eta).unwrap());
        }
        // Double flip restores the configuration.
        let before = eta.clone();
        eta.0.xor_mask(d.face_edge_mask(3));
        eta.0.xor_mask(d.face_edge_mask(3));
        assert_eq!(before, eta);
    }

    #[test]
    fn first_flip_acceptance_is_weight_ratio() {
        // From empty η, a plaquette proposal creates one hexagon loop and is
        // accepted with probability min(1, x⁶ n).
        let d = build_hex_domain(2).unwrap();
        let params = LoopParams::new(0.55, 1.3).unwrap();
        let target = 0.55f64.powi(6) * 1.3;
        let mut rng = experiment_rng(29);
        let trials = 40_000;
        let mut accepted = 0;
        for _ in 0..trials {
            let mut eta = BondConfig::closed(d.graph());
            accepted += plaquette_step(&d, &mut eta, params, 0, &mut rng).unwrap() as usize;
        }
        let rate = accepted as f64 / trials as f64;
        let se = (target * (1.0 - target) / trials as f64).sqrt();
        assert!((rate - target).abs() < 4.0 * se, "rate {rate} vs {target}");
    }

    #[test]
    fn n_zero_chain_stays_empty() {
        let d = build_hex_domain(2).unwrap();
        let params = LoopParams::new(0.9, 0.0).unwrap();
        let run = loop_sample(&d, params, 200, 20, 3).unwrap();
        assert_eq!(run.edge_density.mean, 0.0);
        assert_eq!(run.acceptance, 0.0);
    }

    #[test]
    fn chain_matches_oracle_on_radius_two() {
        let d = build_hex_domain(2).unwrap();
        let params = LoopParams::new(0.65, 1.5).unwrap();
        let exact = loop_exact(&d, params).unwrap();
        let run = loop_sample(&d, params, 20_000, 1_000, 41).unwrap();
        let est = run.edge_density;
        assert!(
            (est.mean - exact.edge_density).abs() < 4.0 * est.stderr,
            "{est:?} vs {}",
            exact.edge_density
        );
        let est = run.mean_loops;
        assert!(
            (est.mean - exact.mean_loops).abs() < 4.0 * est.stderr,
            "{est:?} vs {}",
            exact.mean_loops
        );
    }

    #[test]
    fn critical_edge_weight_values() {
        assert!((x_c(1.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((x_c(2.0).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((x_c(0.0).unwrap() - 0.5411961001461971).abs() < 1e-12);
        // n = 0 value is the reciprocal connective constant.
        assert!((x_c(0.0).unwrap() - 1.0 / (2.0 + 2f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!(x_c(2.5).is_err());
        assert!(x_c(-0.1).is_err());
    }
}
