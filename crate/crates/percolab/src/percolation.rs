//! Bernoulli percolation: seeded sampling, crossing and one-arm
//! estimators, decay fitting, and the exact enumeration oracle.

use rand::Rng;
use rayon::prelude::*;

use crate::cluster::clusters;
use crate::config::{BondConfig, SiteConfig};
use crate::error::{Error, Result};
use crate::lattice::{build_box, build_rectangle, LatticeGraph};
use crate::rng::replica_rng;
use crate::stats::{fit_line, t_quantile_975, Estimate, LineFit};

/// Default cap for exhaustive enumeration: 2^24 configurations.
pub const ENUMERATION_CAP: usize = 24;

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0,1]")));
    }
    Ok(())
}

/// One uniform variate per edge, thresholded at p. Sharing the generator
/// across p values yields the monotone coupling: the configuration at p is
/// dominated bitwise by the configuration at p' >= p.
pub fn sample_bernoulli(graph: &LatticeGraph, p: f64, seed: u64) -> Result<BondConfig> {
    check_probability(p)?;
    let mut rng = replica_rng(seed, 0);
    Ok(sample_bernoulli_with(graph, p, &mut rng))
}

pub fn sample_bernoulli_with(graph: &LatticeGraph, p: f64, rng: &mut impl Rng) -> BondConfig {
    let mut config = BondConfig::closed(graph);
    for e in 0..graph.edge_count() {
        if rng.random::<f64>() < p {
            config.0.set(e, true);
        }
    }
    config
}

/// 1 iff some left-boundary vertex shares a component with some
/// right-boundary vertex.
pub fn crossing_indicator(graph: &LatticeGraph, config: &BondConfig) -> Result<bool> {
    if graph.left.is_empty() || graph.right.is_empty() {
        return Err(Error::MissingBoundary("left/right"));
    }
    let st = clusters(graph, config)?;
    Ok(st.connects(&graph.left, &graph.right))
}

/// Site-percolation variant: 1 iff open left- and right-boundary vertices
/// share a component of the open-vertex subgraph.
pub fn site_crossing_indicator(graph: &LatticeGraph, config: &SiteConfig) -> Result<bool> {
    if graph.left.is_empty() || graph.right.is_empty() {
        return Err(Error::MissingBoundary("left/right"));
    }
    let st = crate::cluster::site_clusters(graph, config)?;
    Ok(st.connects(&graph.left, &graph.right))
}

/// Per-vertex Bernoulli(p) site configuration.
pub fn sample_bernoulli_sites(graph: &LatticeGraph, p: f64, seed: u64) -> Result<SiteConfig> {
    check_probability(p)?;
    let mut rng = replica_rng(seed, 0);
    let mut config = SiteConfig::closed(graph);
    for v in 0..graph.vertex_count() {
        if rng.random::<f64>() < p {
            config.0.set(v, true);
        }
    }
    Ok(config)
}

/// Monte Carlo estimate of the left-right crossing probability
/// H_{n,m}(p) of the rectangle [0,n] x [0,m].
pub fn crossing_prob(n: usize, m: usize, p: f64, replicas: usize, seed: u64) -> Result<Estimate> {
    check_probability(p)?;
    if replicas < 1 {
        return Err(Error::InvalidParameter("replicas >= 1".into()));
    }
    let graph = build_rectangle(n, m)?;
    let hits: usize = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let config = sample_bernoulli_with(&graph, p, &mut rng);
            crossing_indicator(&graph, &config).expect("rectangle has boundaries") as usize
        })
        .sum();
    Ok(Estimate::from_successes(hits, replicas, seed))
}

/// Exact H_{n,m}(p) by enumeration (needs n(m+1)+m(n+1) <= cap).
pub fn crossing_prob_exact(n: usize, m: usize, p: f64) -> Result<f64> {
    check_probability(p)?;
    let graph = build_rectangle(n, m)?;
    let ex = enumerate_expectation(
        &graph,
        |cfg| bernoulli_weight(cfg, p),
        |cfg| crossing_indicator(&graph, cfg).unwrap() as u8 as f64,
        ENUMERATION_CAP,
    )?;
    Ok(ex.mean)
}

/// p^{|ω|}(1-p)^{|E|-|ω|}.
pub fn bernoulli_weight(config: &BondConfig, p: f64) -> f64 {
    let o = config.open_count() as i32;
    let c = (config.len() as i32) - o;
    p.powi(o) * (1.0 - p).powi(c)
}

/// Monte Carlo estimate of θ_n(p) = P[origin connected to ∂Λ_n],
/// measured inside Λ_n = [-n,n]^d with free boundary.
pub fn one_arm_prob(d: usize, n: usize, p: f64, replicas: usize, seed: u64) -> Result<Estimate> {
    check_probability(p)?;
    if replicas < 1 {
        return Err(Error::InvalidParameter("replicas >= 1".into()));
    }
    let graph = build_box(d, n)?;
    let origin = graph.origin.expect("box has origin");
    let hits: usize = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let config = sample_bernoulli_with(&graph, p, &mut rng);
            let st = clusters(&graph, &config).unwrap();
            st.touches(origin, &graph.boundary) as usize
        })
        .sum();
    Ok(Estimate::from_successes(hits, replicas, seed))
}

/// Exact θ_n(p) by enumeration (small boxes only).
pub fn one_arm_prob_exact(d: usize, n: usize, p: f64) -> Result<f64> {
    check_probability(p)?;
    let graph = build_box(d, n)?;
    let origin = graph.origin.expect("box has origin");
    let ex = enumerate_expectation(
        &graph,
        |cfg| bernoulli_weight(cfg, p),
        |cfg| {
            let st = clusters(&graph, cfg).unwrap();
            st.touches(origin, &graph.boundary) as u8 as f64
        },
        ENUMERATION_CAP,
    )?;
    Ok(ex.mean)
}

/// Least-squares decay rate of θ_n: slope of log θ_n against n, negated.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Estimated rate c in θ_n ≈ exp(-c n).
    pub rate: f64,
    pub rate_stderr: f64,
    /// Half-width of the 95% confidence interval on the rate.
    pub ci95: f64,
    pub r_squared: f64,
    /// Raised when a power-law model log θ vs log n explains the data at
    /// least as well as the exponential model — the signature of critical
    /// rather than exponential decay.
    pub poor_exponential_fit: bool,
}

pub fn decay_fit(samples: &[(usize, f64)]) -> Result<DecayFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter(
            "decay_fit needs >= 3 points".into(),
        ));
    }
    let mut seen = samples.iter().map(|(n, _)| *n).collect::<Vec<_>>();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != samples.len() {
        return Err(Error::InvalidParameter(
            "decay_fit needs distinct n values".into(),
        ));
    }
    if let Some((n, th)) = samples.iter().find(|(_, th)| *th <= 0.0) {
        return Err(Error::UndefinedRate(format!(
            "θ_{n} = {th} <= 0, cannot take log"
        )));
    }
    let ns: Vec<f64> = samples.iter().map(|(n, _)| *n as f64).collect();
    let logs: Vec<f64> = samples.iter().map(|(_, th)| th.ln()).collect();
    let exp_fit: LineFit = fit_line(&ns, &logs)?;
    let logns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let pow_fit = fit_line(&logns, &logs)?;
    let t = t_quantile_975(exp_fit.df);
    Ok(DecayFit {
        rate: -exp_fit.slope,
        rate_stderr: exp_fit.slope_stderr,
        ci95: t * exp_fit.slope_stderr,
        r_squared: exp_fit.r_squared,
        poor_exponential_fit: pow_fit.r_squared >= exp_fit.r_squared,
    })
}

/// Exact weighted expectation over all 2^|E| configurations.
#[derive(Debug, Clone, Copy)]
pub struct ExactExpectation {
    pub mean: f64,
    /// Normalization Z = Σ_ω w(ω).
    pub z: f64,
}

pub fn enumerate_expectation(
    graph: &LatticeGraph,
    weight: impl Fn(&BondConfig) -> f64,
    f: impl Fn(&BondConfig) -> f64,
    cap: usize,
) -> Result<ExactExpectation> {
    let mut num = 0.0;
    let mut z = 0.0;
    enumerate_weighted(graph, weight, cap, |cfg, w| {
        z += w;
        num += w * f(cfg);
    })?;
    if z <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    Ok(ExactExpectation { mean: num / z, z })
}

/// Visit every configuration with its weight. The workhorse behind every
/// exact oracle in this crate.
pub fn enumerate_weighted(
    graph: &LatticeGraph,
    weight: impl Fn(&BondConfig) -> f64,
    cap: usize,
    mut visit: impl FnMut(&BondConfig, f64),
) -> Result<()> {
    let e = graph.edge_count();
    if e > cap || e > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            size: e,
            cap: cap.min(ENUMERATION_CAP),
            unit: "edges",
        });
    }
    let mut config = BondConfig::closed(graph);
    for mask in 0..(1u64 << e) {
        config.0.set_mask(mask);
        let w = weight(&config);
        if w != 0.0 {
            visit(&config, w);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EdgeId;

    #[test]
    fn endpoint_probabilities() {
        let g = build_rectangle(3, 3).unwrap();
        let all_closed = sample_bernoulli(&g, 0.0, 5).unwrap();
        assert_eq!(all_closed.open_count(), 0);
        let all_open = sample_bernoulli(&g, 1.0, 5).unwrap();
        assert_eq!(all_open.open_count(), g.edge_count());
        assert!(sample_bernoulli(&g, 1.2, 5).is_err());
        assert!(sample_bernoulli(&g, -0.1, 5).is_err());
    }

    #[test]
    fn per_edge_frequency_is_binomial() {
        // 4-edge graph, many replicas: open frequency within 4 stderr of 1/2.
        let g = build_rectangle(1, 1).unwrap();
        let replicas = 10_000;
        let mut counts = [0usize; 4];
        for r in 0..replicas as u64 {
            let mut rng = replica_rng(42, r);
            let c = sample_bernoulli_with(&g, 0.5, &mut rng);
            for e in 0..4 {
                counts[e] += c.is_open(EdgeId(e as u32)) as usize;
            }
        }
        let stderr = (0.25f64 / replicas as f64).sqrt();
        for c in counts {
            let freq = c as f64 / replicas as f64;
            assert!((freq - 0.5).abs() < 4.0 * stderr, "freq {freq}");
        }
    }

    #[test]
    fn unit_square_crossing_cases() {
        let g = build_rectangle(1, 1).unwrap();
        // Edge order for the unit square: (0,0)-(1,0) [bottom], (0,0)-(0,1)
        // [left], (1,0)-(1,1) [right], (0,1)-(1,1) [top].
        let bottom = g
            .edges()
            .iter()
            .position(|[a, b]| g.coord(*a)[1] == 0 && g.coord(*b)[1] == 0)
            .unwrap();
        let left = g
            .edges()
            .iter()
            .position(|[a, b]| g.coord(*a)[0] == 0 && g.coord(*b)[0] == 0)
            .unwrap();
        let mut c = BondConfig::closed(&g);
        c.set(EdgeId(bottom as u32), true);
        assert!(crossing_indicator(&g, &c).unwrap());
        let mut c = BondConfig::closed(&g);
        c.set(EdgeId(left as u32), true);
        assert!(!crossing_indicator(&g, &c).unwrap());
    }

    #[test]
    fn site_crossing_basic_cases() {
        let g = build_rectangle(2, 1).unwrap();
        // All sites open: connected grid crosses.
        let all = SiteConfig::open(&g);
        assert!(site_crossing_indicator(&g, &all).unwrap());
        // Closing the middle column severs every left-right path.
        let mut cut = SiteConfig::open(&g);
        for v in 0..g.vertex_count() {
            if g.coord(crate::lattice::VertexId(v as u32))[0] == 1 {
                cut.0.set(v, false);
            }
        }
        assert!(!site_crossing_indicator(&g, &cut).unwrap());
        // Sampled configurations honor the seed.
        let a = sample_bernoulli_sites(&g, 0.6, 3).unwrap();
        let b = sample_bernoulli_sites(&g, 0.6, 3).unwrap();
        assert_eq!(a.0, b.0);
    }

    #[test]
    fn crossing_requires_boundaries() {
        let g = build_box(2, 1).unwrap();
        let c = BondConfig::closed(&g);
        assert!(matches!(
            crossing_indicator(&g, &c),
            Err(Error::MissingBoundary(_))
        ));
    }

    #[test]
    fn unit_square_crossing_probability_exact() {
        // Crossing iff top or bottom is open: 1 - (1-p)^2.
        for p in [0.2, 0.5, 0.9] {
            let exact = crossing_prob_exact(1, 1, p).unwrap();
            let expected = 1.0 - (1.0 - p) * (1.0 - p);
            assert!(
                (exact - expected).abs() < 1e-12,
                "p={p}: {exact} vs {expected}"
            );
        }
        assert!((crossing_prob_exact(1, 1, 0.5).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn crossing_prob_trivial_endpoints() {
        assert_eq!(crossing_prob(3, 2, 0.0, 100, 9).unwrap().mean, 0.0);
        assert_eq!(crossing_prob(3, 2, 1.0, 100, 9).unwrap().mean, 1.0);
    }

    #[test]
    fn mc_crossing_matches_oracle_within_4_stderr() {
        let est = crossing_prob(1, 1, 0.5, 4_000, 13).unwrap();
        assert!((est.mean - 0.75).abs() < 4.0 * est.stderr);
        let est = crossing_prob(2, 1, 0.5, 4_000, 14).unwrap();
        let exact = crossing_prob_exact(2, 1, 0.5).unwrap();
        assert!((exact - 0.5).abs() < 1e-12, "self-dual rectangle");
        assert!((est.mean - exact).abs() < 4.0 * est.stderr);
    }

    #[test]
    fn one_arm_radius_one_closed_form() {
        // Origin touches ∂Λ_1 iff any incident edge is open.
        for p in [0.1, 0.5] {
            let exact = one_arm_prob_exact(2, 1, p).unwrap();
            let expected = 1.0 - (1.0 - p).powi(4);
            assert!((exact - expected).abs() < 1e-12);
            let est = one_arm_prob(2, 1, p, 4_000, 21).unwrap();
            assert!((est.mean - expected).abs() < 4.0 * est.stderr.max(1e-3));
        }
        assert_eq!(one_arm_prob(2, 3, 1.0, 50, 2).unwrap().mean, 1.0);
    }

    #[test]
    fn monotone_coupling_dominates_bitwise() {
        let g = build_rectangle(5, 4).unwrap();
        for seed in 0..20 {
            let lo = sample_bernoulli(&g, 0.3, seed).unwrap();
            let hi = sample_bernoulli(&g, 0.7, seed).unwrap();
            assert!(lo.0.dominated_by(&hi.0));
        }
    }

    #[test]
    fn decay_fit_recovers_exact_exponential() {
        let samples: Vec<(usize, f64)> = (1..=6).map(|n| (n, (-0.7 * n as f64).exp())).collect();
        let fit = decay_fit(&samples).unwrap();
        assert!((fit.rate - 0.7).abs() < 1e-6);
        assert!(fit.ci95 < 1e-6);
        assert!(!fit.poor_exponential_fit);
    }

    #[test]
    fn decay_fit_flags_polynomial_decay() {
        let samples: Vec<(usize, f64)> = [8usize, 16, 24, 32]
            .iter()
            .map(|&n| (n, (n as f64).powf(-0.3)))
            .collect();
        let fit = decay_fit(&samples).unwrap();
        assert!(fit.poor_exponential_fit);
    }

    #[test]
    fn decay_fit_flags_critical_mc_run() {
        // At p = 1/2 the one-arm probability decays polynomially; the
        // exponential model loses to the power-law fit.
        let samples: Vec<(usize, f64)> = [4usize, 8, 16, 32]
            .iter()
            .map(|&n| (n, one_arm_prob(2, n, 0.5, 20_000, 77).unwrap().mean))
            .collect();
        let fit = decay_fit(&samples).unwrap();
        assert!(fit.poor_exponential_fit, "{fit:?}");
    }

    #[test]
    fn decay_fit_rejects_bad_input() {
        assert!(decay_fit(&[(1, 0.5), (2, 0.2)]).is_err());
        assert!(decay_fit(&[(1, 0.5), (1, 0.2), (3, 0.1)]).is_err());
        assert!(matches!(
            decay_fit(&[(1, 0.5), (2, 0.0), (3, 0.1)]),
            Err(Error::UndefinedRate(_))
        ));
    }

    #[test]
    fn oracle_uniform_weight_symmetry() {
        // w ≡ 1, f = fraction of open edges → 1/2 by symmetry.
        let g = build_rectangle(2, 1).unwrap();
        let ex = enumerate_expectation(
            &g,
            |_| 1.0,
            |c| c.open_count() as f64 / c.len() as f64,
            ENUMERATION_CAP,
        )
        .unwrap();
        assert!((ex.mean - 0.5).abs() < 1e-12);
        assert_eq!(ex.z, (1u64 << g.edge_count()) as f64);
    }

    #[test]
    fn oracle_bernoulli_weights_normalize() {
        let g = build_rectangle(2, 2).unwrap();
        for p in [0.25, 0.5, 0.8] {
            let ex =
                enumerate_expectation(&g, |c| bernoulli_weight(c, p), |_| 1.0, ENUMERATION_CAP)
                    .unwrap();
            assert!((ex.z - 1.0).abs() < 1e-10, "Z(p={p}) = {}", ex.z);
        }
    }

    #[test]
    fn oracle_cap_is_enforced() {
        let g = build_rectangle(4, 4).unwrap(); // 40 edges
        assert!(matches!(
            enumerate_expectation(&g, |_| 1.0, |_| 1.0, ENUMERATION_CAP),
            Err(Error::CapExceeded { .. })
        ));
        let g = build_rectangle(2, 1).unwrap();
        assert!(enumerate_expectation(&g, |_| 1.0, |_| 1.0, 4).is_err());
    }

    #[test]
    fn oracle_all_zero_weights() {
        let g = build_rectangle(1, 1).unwrap();
        assert!(matches!(
            enumerate_expectation(&g, |_| 0.0, |_| 1.0, ENUMERATION_CAP),
            Err(Error::AllZeroWeights)
        ));
    }

    #[test]
    fn mc_estimates_converge_to_oracle() {
        // Oracle agreement on a graph under the cap.
        let (n, m, p) = (2, 2, 0.45);
        let exact = crossing_prob_exact(n, m, p).unwrap();
        let est = crossing_prob(n, m, p, 20_000, 31).unwrap();
        assert!((est.mean - exact).abs() < 4.0 * est.stderr);
    }
}
