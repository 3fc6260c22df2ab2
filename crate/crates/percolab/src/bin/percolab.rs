//! Percolation laboratory CLI: every experiment as a subcommand with
//! mandatory seeding, deterministic CSV/JSON output, and a `verify`
//! subcommand running the full acceptance checklist.

use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use percolab::error::{Error, Result};
use percolab::fk::{fk_dual_params, self_dual_point, Boundary, FkParams};
use percolab::lattice::{build_hex_domain, build_rectangle};
use percolab::loop_model::{loop_sample, x_c, LoopParams};
use percolab::parafermion::{
    connective_estimates, contour_integral, count_saw, elementary_contours, parafermionic_field,
    sigma,
};
use percolab::percolation::{crossing_prob, crossing_prob_exact, one_arm_prob, one_arm_prob_exact};
use percolab::potts::{potts_sample, PottsParams};
use percolab::sharpness::{dynamical_edge_marginals, mixing_ratio, osss_check, s_curve};
use percolab::stats::Estimate;
use percolab::verify::{render_report, run_all};

#[derive(Parser, Debug)]
#[command(
    name = "percolab",
    version,
    about = "Percolation laboratory: lattice models, couplings, observables"
)]
struct Cli {
    /// Output path for result rows; '-' is stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// Emit a JSON mirror of the rows instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (defaults to PERCOLAB_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// An experiment specification; round-trips losslessly through JSON via
/// `percolab run --spec`.
#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
enum Command {
    /// Crossing probability H_{n,m}(p) of the rectangle [0,n]x[0,m].
    Crossing(CrossingArgs),
    /// One-arm probability θ_n(p) in the box Λ_n = [-n,n]^d.
    OneArm(OneArmArgs),
    /// Random-cluster chain on an n x m rectangle: density and crossing.
    Fk(FkArgs),
    /// Dual parameters (p*, q*) of the random-cluster model.
    FkDual(FkDualArgs),
    /// The self-dual point √q/(1+√q).
    Selfdual(SelfdualArgs),
    /// Potts model via the cluster coupling: color fractions.
    Potts(PottsArgs),
    /// Loop O(n) plaquette chain on a hexagonal domain.
    Loop(LoopArgs),
    /// Parafermionic observable: all elementary contour integrals.
    PfIntegral(PfIntegralArgs),
    /// Self-avoiding walk counts and connective constant estimates.
    Saw(SawArgs),
    /// S-curve sweep of crossing probabilities over a p grid.
    Sweep(SweepArgs),
    /// Variance/revealment inequality check for the exploration algorithm.
    Osss(OsssArgs),
    /// Dynamical percolation edge marginals at query times.
    Dyn(DynArgs),
    /// Spatial mixing ratio between an inner and an outer event.
    Mix(MixArgs),
    /// Run the full acceptance checklist.
    Verify(VerifyArgs),
    /// Execute an experiment spec from a JSON file.
    Run(RunArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CrossingArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 10_000)]
    replicas: usize,
    #[arg(long, required_unless_present = "exact", default_value_t = 0)]
    seed: u64,
    /// Use the exact enumeration oracle (≤ 24 edges) and print the value.
    #[arg(long, default_value_t = false)]
    exact: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OneArmArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 10_000)]
    replicas: usize,
    #[arg(long, required_unless_present = "exact", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = false)]
    exact: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FkArgs {
    #[arg(long)]
    q: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    n: usize,
    /// Rectangle height; defaults to n.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 2_000)]
    sweeps: usize,
    #[arg(long, default_value_t = percolab::fk::DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long, required_unless_present = "exact", default_value_t = 0)]
    seed: u64,
    /// Merge the outer boundary into one ghost cluster when counting k(ω).
    #[arg(long, default_value_t = false)]
    wired: bool,
    /// Use the exact enumeration oracle (≤ 24 edges).
    #[arg(long, default_value_t = false)]
    exact: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FkDualArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SelfdualArgs {
    #[arg(long)]
    q: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PottsArgs {
    #[arg(long)]
    q: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2_000)]
    sweeps: usize,
    #[arg(long, default_value_t = 200)]
    burn_in: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct LoopArgs {
    #[arg(long)]
    x: f64,
    /// Loop weight n.
    #[arg(long)]
    n: f64,
    #[arg(long, default_value_t = 2)]
    radius: usize,
    #[arg(long, default_value_t = 20_000)]
    sweeps: usize,
    #[arg(long, default_value_t = 1_000)]
    burn_in: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PfIntegralArgs {
    /// Loop weight n in [0,2].
    #[arg(long)]
    n: f64,
    /// Edge weight; defaults to the critical x_c(n).
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 2)]
    radius: usize,
    /// Spin override; defaults to σ(n).
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SawArgs {
    #[arg(long, default_value_t = 24)]
    max_length: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p_from: f64,
    #[arg(long)]
    p_to: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 10_000)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OsssArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 4_000)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DynArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    horizon: f64,
    /// Comma-separated query times.
    #[arg(long, value_delimiter = ',')]
    queries: Vec<f64>,
    /// Rectangle side for the underlying graph.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 2_000)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MixArgs {
    /// Inner radius: the first event lives on Λ_n edges.
    #[arg(long)]
    n: usize,
    /// Outer radius: the second event lives outside Λ_N (N >= 2n).
    #[arg(long = "N", visible_alias = "big-n")]
    big_n: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[arg(long, default_value_t = 2_000)]
    replicas: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct VerifyArgs {
    /// Base seed for every stochastic check.
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RunArgs {
    /// Path to an experiment spec JSON file.
    #[arg(long)]
    spec: String,
}

/// One row of the stable schema
/// `experiment,n,m,p,estimate,stderr,replicas,seed`.
#[derive(Debug, Clone, Serialize)]
struct ResultRow {
    experiment: String,
    n: String,
    m: String,
    p: String,
    estimate: f64,
    stderr: f64,
    replicas: usize,
    seed: u64,
}

impl ResultRow {
    fn new(
        experiment: impl Into<String>,
        n: impl ToString,
        m: impl ToString,
        p: impl ToString,
        est: &Estimate,
    ) -> ResultRow {
        ResultRow {
            experiment: experiment.into(),
            n: n.to_string(),
            m: m.to_string(),
            p: p.to_string(),
            estimate: est.mean,
            stderr: est.stderr,
            replicas: est.replicas,
            seed: est.seed,
        }
    }
}

enum Output {
    /// Bare text, printed as-is (scalar results, reports).
    Text(String),
    /// Result rows in the stable schema.
    Rows(Vec<ResultRow>),
    /// A custom table: header plus records.
    Table {
        header: &'static str,
        records: Vec<String>,
    },
}

fn render(output: &Output, json: bool) -> Result<String> {
    Ok(match output {
        Output::Text(s) => s.clone(),
        Output::Rows(rows) => {
            if json {
                let mut s = serde_json::to_string_pretty(rows)?;
                s.push('\n');
                s
            } else {
                let mut s = String::from("experiment,n,m,p,estimate,stderr,replicas,seed\n");
                for r in rows {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        r.experiment, r.n, r.m, r.p, r.estimate, r.stderr, r.replicas, r.seed
                    ));
                }
                s
            }
        }
        Output::Table { header, records } => {
            if json {
                let cols: Vec<&str> = header.split(',').collect();
                let objects: Vec<serde_json::Value> = records
                    .iter()
                    .map(|rec| {
                        let vals: Vec<&str> = rec.split(',').collect();
                        cols.iter()
                            .zip(vals)
                            .map(|(c, v)| ((*c).to_string(), serde_json::json!(v)))
                            .collect::<serde_json::Map<_, _>>()
                            .into()
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&objects)?;
                s.push('\n');
                s
            } else {
                let mut s = String::from(*header);
                s.push('\n');
                for rec in records {
                    s.push_str(rec);
                    s.push('\n');
                }
                s
            }
        }
    })
}

fn execute(cmd: &Command) -> Result<(Output, i32)> {
    match cmd {
        Command::Crossing(a) => {
            if a.exact {
                let h = crossing_prob_exact(a.n, a.m, a.p)?;
                return Ok((Output::Text(format!("{h}\n")), 0));
            }
            let est = crossing_prob(a.n, a.m, a.p, a.replicas, a.seed)?;
            Ok((
                Output::Rows(vec![ResultRow::new("crossing", a.n, a.m, a.p, &est)]),
                0,
            ))
        }
        Command::OneArm(a) => {
            if a.exact {
                let th = one_arm_prob_exact(a.d, a.n, a.p)?;
                return Ok((Output::Text(format!("{th}\n")), 0));
            }
            let est = one_arm_prob(a.d, a.n, a.p, a.replicas, a.seed)?;
            Ok((
                Output::Rows(vec![ResultRow::new("one-arm", a.n, a.d, a.p, &est)]),
                0,
            ))
        }
        Command::Fk(a) => {
            let params = FkParams::new(a.p, a.q)?;
            let bc = if a.wired {
                Boundary::Wired
            } else {
                Boundary::Free
            };
            let m = a.m.unwrap_or(a.n);
            let graph = build_rectangle(a.n, m)?;
            if a.exact {
                let ex = percolab::fk::fk_exact(&graph, params, bc)?;
                let mut s = format!("density={} Z={}\n", ex.mean_open_fraction, ex.z);
                if let Some(crossing) = ex.crossing {
                    s.push_str(&format!("crossing={crossing}\n"));
                }
                return Ok((Output::Text(s), 0));
            }
            let run = percolab::fk::fk_sample(&graph, params, a.sweeps, a.burn_in, a.seed, bc)?;
            let label = |what: &str| format!("fk-{what}:q={}:sweeps={}", a.q, a.sweeps);
            let mut rows = vec![ResultRow::new(
                label("density"),
                a.n,
                m,
                a.p,
                &run.open_fraction,
            )];
            if let Some(crossing) = run.crossing {
                rows.push(ResultRow::new(label("crossing"), a.n, m, a.p, &crossing));
            }
            Ok((Output::Rows(rows), 0))
        }
        Command::FkDual(a) => {
            let dual = fk_dual_params(FkParams::new(a.p, a.q)?);
            Ok((Output::Text(format!("p*={} q*={}\n", dual.p, dual.q)), 0))
        }
        Command::Selfdual(a) => {
            let sd = self_dual_point(a.q)?;
            Ok((Output::Text(format!("{sd}\n")), 0))
        }
        Command::Potts(a) => {
            let params = PottsParams::new(a.beta, a.q)?;
            let graph = build_rectangle(a.n, a.n)?;
            let run = potts_sample(&graph, params, a.sweeps, a.burn_in, a.seed)?;
            let mut rows = Vec::new();
            for (i, f) in run.color_fractions.iter().enumerate() {
                let est = Estimate {
                    mean: *f,
                    stderr: 0.0,
                    replicas: a.sweeps,
                    seed: a.seed,
                };
                rows.push(ResultRow::new(
                    format!("potts-color-{}:q={}", i + 1, a.q),
                    a.n,
                    a.n,
                    a.beta,
                    &est,
                ));
            }
            rows.push(ResultRow::new(
                format!("potts-majority:q={}", a.q),
                a.n,
                a.n,
                a.beta,
                &run.majority_fraction,
            ));
            rows.push(ResultRow::new(
                format!("potts-satisfied:q={}", a.q),
                a.n,
                a.n,
                a.beta,
                &run.satisfied_fraction,
            ));
            Ok((Output::Rows(rows), 0))
        }
        Command::Loop(a) => {
            let params = LoopParams::new(a.x, a.n)?;
            let domain = build_hex_domain(a.radius)?;
            let run = loop_sample(&domain, params, a.sweeps, a.burn_in, a.seed)?;
            let label = |what: &str| format!("loop-{what}:n={}", a.n);
            Ok((
                Output::Rows(vec![
                    ResultRow::new(label("density"), a.radius, "", a.x, &run.edge_density),
                    ResultRow::new(label("count"), a.radius, "", a.x, &run.mean_loops),
                ]),
                0,
            ))
        }
        Command::PfIntegral(a) => {
            let x = match a.x {
                Some(x) => x,
                None => x_c(a.n)?,
            };
            let sg = match a.sigma {
                Some(s) => s,
                None => sigma(a.n)?,
            };
            let domain = build_hex_domain(a.radius)?;
            let source = domain
                .boundary_mid_edges()
                .next()
                .expect("boundary mid-edge");
            let field = parafermionic_field(&domain, source, LoopParams::new(x, a.n)?, sg)?;
            let mut records = Vec::new();
            for (i, c) in elementary_contours(&domain).iter().enumerate() {
                let v = contour_integral(&domain, &field, c)?;
                records.push(format!(
                    "{},{},{},{},{},{}",
                    i,
                    c.points[0].0,
                    c.points[0].1,
                    v.re,
                    v.im,
                    v.norm()
                ));
            }
            Ok((
                Output::Table {
                    header: "contour,q0,r0,re,im,abs",
                    records,
                },
                0,
            ))
        }
        Command::Saw(a) => {
            let counts = count_saw(a.max_length)?;
            let est = connective_estimates(&counts);
            let records = est
                .iter()
                .map(|e| {
                    format!(
                        "{},{},{},{},{}",
                        e.length,
                        counts[e.length - 1],
                        e.ratio.map(|r| r.to_string()).unwrap_or_default(),
                        e.root,
                        e.degenerate
                    )
                })
                .collect();
            Ok((
                Output::Table {
                    header: "length,count,ratio,root,degenerate",
                    records,
                },
                0,
            ))
        }
        Command::Sweep(a) => {
            if a.step.is_nan() || a.step <= 0.0 || a.p_to <= a.p_from {
                return Err(Error::InvalidParameter(
                    "need p_from < p_to and step > 0".into(),
                ));
            }
            let mut grid = Vec::new();
            let mut p = a.p_from;
            while p <= a.p_to + 1e-12 {
                grid.push(p);
                p += a.step;
            }
            let curve = s_curve(a.n, &grid, a.replicas, a.seed)?;
            let rows = curve
                .rows
                .iter()
                .map(|r| {
                    let est = Estimate {
                        mean: r.estimate,
                        stderr: r.stderr,
                        replicas: a.replicas,
                        seed: a.seed,
                    };
                    ResultRow::new("sweep", a.n, a.n, r.p, &est)
                })
                .collect();
            if let (Some(w), Some(ph)) = (curve.width, curve.p_half) {
                eprintln!("# sweep n={} width(0.1)={} p_half={}", a.n, w, ph);
            }
            Ok((Output::Rows(rows), 0))
        }
        Command::Osss(a) => {
            let c = osss_check(a.n, a.p, a.replicas, a.seed)?;
            let mk = |mean: f64, stderr: f64| Estimate {
                mean,
                stderr,
                replicas: a.replicas,
                seed: a.seed,
            };
            Ok((
                Output::Rows(vec![
                    ResultRow::new("osss-variance", a.n, "", a.p, &mk(c.variance, 0.0)),
                    ResultRow::new("osss-rhs", a.n, "", a.p, &mk(c.rhs, 0.0)),
                    ResultRow::new("osss-slack", a.n, "", a.p, &mk(c.slack, c.slack_stderr)),
                    ResultRow::new(
                        "osss-max-revealment",
                        a.n,
                        "",
                        a.p,
                        &mk(c.max_revealment, 0.0),
                    ),
                ]),
                0,
            ))
        }
        Command::Dyn(a) => {
            let graph = build_rectangle(a.n, a.n)?;
            let marg =
                dynamical_edge_marginals(&graph, a.p, a.horizon, &a.queries, a.replicas, a.seed)?;
            let rows = marg
                .iter()
                .map(|(t, est)| ResultRow::new(format!("dyn-marginal:t={t}"), a.n, a.n, a.p, est))
                .collect();
            Ok((Output::Rows(rows), 0))
        }
        Command::Mix(a) => {
            let params = FkParams::new(a.p, a.q)?;
            let rep = mixing_ratio(a.n, a.big_n, params, a.replicas, a.seed)?;
            if rep.degenerate {
                return Err(Error::DegenerateEvent(format!(
                    "P[A]={} P[B]={} too small for a ratio estimate",
                    rep.p_a, rep.p_b
                )));
            }
            let mk = |mean: f64, stderr: f64| Estimate {
                mean,
                stderr,
                replicas: a.replicas,
                seed: a.seed,
            };
            Ok((
                Output::Rows(vec![
                    ResultRow::new(
                        format!("mix-ratio:q={}:N={}", a.q, a.big_n),
                        a.n,
                        a.big_n,
                        a.p,
                        &mk(rep.ratio, rep.ratio_stderr),
                    ),
                    ResultRow::new("mix-pa", a.n, a.big_n, a.p, &mk(rep.p_a, 0.0)),
                    ResultRow::new("mix-pb", a.n, a.big_n, a.p, &mk(rep.p_b, 0.0)),
                ]),
                0,
            ))
        }
        Command::Verify(a) => {
            let outcomes = run_all(a.seed);
            for o in &outcomes {
                eprintln!("# {} took {:?} (budget {:?})", o.name, o.elapsed, o.budget);
            }
            let failed = outcomes.iter().any(|o| !o.passed);
            Ok((
                Output::Text(render_report(&outcomes)),
                if failed { 1 } else { 0 },
            ))
        }
        Command::Run(a) => {
            let text = std::fs::read_to_string(&a.spec)?;
            let spec: Command = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidSpec(format!("{}: {e}", a.spec)))?;
            if matches!(spec, Command::Run(_)) {
                return Err(Error::InvalidSpec(
                    "nested run specs are not allowed".into(),
                ));
            }
            execute(&spec)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("PERCOLAB_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    let start = Instant::now();
    match execute(&cli.command) {
        Ok((output, code)) => {
            let rendered = match render(&output, cli.json) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    std::process::exit(2);
                }
            };
            // Results are written in one shot; a failed run leaves nothing
            // partial behind.
            if cli.out == "-" {
                print!("{rendered}");
            } else if let Err(e) = std::fs::write(&cli.out, rendered) {
                eprintln!("error: cannot write {}: {e}", cli.out);
                std::process::exit(2);
            }
            eprintln!("# wall-time: {:?}", start.elapsed());
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_through_json() {
        let cmd = Command::Crossing(CrossingArgs {
            n: 2,
            m: 1,
            p: 0.5,
            replicas: 100,
            seed: 7,
            exact: false,
        });
        let json = serde_json::to_string(&cmd).unwrap();
        let back: Command = serde_json::from_str(&json).unwrap();
        assert_eq!(cmd, back);
    }

    #[test]
    fn exact_crossing_prints_bare_value() {
        let (out, code) = execute(&Command::Crossing(CrossingArgs {
            n: 2,
            m: 1,
            p: 0.5,
            replicas: 1,
            seed: 0,
            exact: true,
        }))
        .unwrap();
        assert_eq!(code, 0);
        match out {
            Output::Text(s) => assert_eq!(s, "0.5\n"),
            _ => panic!("expected text"),
        }
    }

    #[test]
    fn selfdual_prints_value() {
        let (out, _) = execute(&Command::Selfdual(SelfdualArgs { q: 2.0 })).unwrap();
        match out {
            Output::Text(s) => assert!(s.starts_with("0.5857864376")),
            _ => panic!("expected text"),
        }
    }
}
