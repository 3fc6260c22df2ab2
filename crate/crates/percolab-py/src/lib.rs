//! Python bindings for the percolation laboratory: lattice constructors,
//! the exactly known constants, Monte Carlo estimators, and the acceptance
//! checklist.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use percolab::fk::{Boundary, FkParams};
use percolab::lattice::{build_box, build_hex_domain, build_rectangle, LatticeGraph};
use percolab::loop_model::LoopParams;

fn err(e: percolab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A finite lattice graph (rectangle, box, or hexagonal domain).
#[pyclass]
struct Lattice {
    graph: LatticeGraph,
}

#[pymethods]
impl Lattice {
    /// Rectangle [0,n] x [0,m] with left/right/top/bottom boundaries.
    #[staticmethod]
    fn rectangle(n: usize, m: usize) -> PyResult<Lattice> {
        Ok(Lattice {
            graph: build_rectangle(n, m).map_err(err)?,
        })
    }

    /// Box [-n,n]^d with its boundary sphere and origin.
    #[staticmethod]
    #[pyo3(name = "box")]
    fn box_(d: usize, n: usize) -> PyResult<Lattice> {
        Ok(Lattice {
            graph: build_box(d, n).map_err(err)?,
        })
    }

    /// Hexagonal domain of the given face radius.
    #[staticmethod]
    fn hexagon(radius: usize) -> PyResult<Lattice> {
        Ok(Lattice {
            graph: build_hex_domain(radius).map_err(err)?.graph().clone(),
        })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    #[getter]
    fn boundary_count(&self) -> usize {
        self.graph.boundary.len()
    }

    /// JSON description used in experiment manifests.
    fn describe(&self) -> String {
        self.graph.describe().to_string()
    }

    /// Sample a Bernoulli(p) bond configuration and report
    /// (open_edges, clusters, left-right crossing or None).
    fn sample(&self, p: f64, seed: u64) -> PyResult<(usize, usize, Option<bool>)> {
        let cfg = percolab::percolation::sample_bernoulli(&self.graph, p, seed).map_err(err)?;
        let st = percolab::cluster::clusters(&self.graph, &cfg).map_err(err)?;
        let crossing = if !self.graph.left.is_empty() && !self.graph.right.is_empty() {
            Some(st.connects(&self.graph.left, &self.graph.right))
        } else {
            None
        };
        Ok((cfg.open_count(), st.count, crossing))
    }

    fn __repr__(&self) -> String {
        format!(
            "Lattice(kind={}, vertices={}, edges={})",
            self.graph.kind().name(),
            self.graph.vertex_count(),
            self.graph.edge_count()
        )
    }
}

/// Monte Carlo crossing probability of [0,n]x[0,m]; returns (mean, stderr).
#[pyfunction]
fn crossing_probability(
    n: usize,
    m: usize,
    p: f64,
    replicas: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let est = percolab::percolation::crossing_prob(n, m, p, replicas, seed).map_err(err)?;
    Ok((est.mean, est.stderr))
}

/// Exact crossing probability by enumeration (≤ 24 edges).
#[pyfunction]
fn crossing_probability_exact(n: usize, m: usize, p: f64) -> PyResult<f64> {
    percolab::percolation::crossing_prob_exact(n, m, p).map_err(err)
}

/// Monte Carlo one-arm probability θ_n(p) in Λ_n ⊂ Z^d.
#[pyfunction]
fn one_arm_probability(
    d: usize,
    n: usize,
    p: f64,
    replicas: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let est = percolab::percolation::one_arm_prob(d, n, p, replicas, seed).map_err(err)?;
    Ok((est.mean, est.stderr))
}

/// The self-dual point √q/(1+√q).
#[pyfunction]
fn self_dual_point(q: f64) -> PyResult<f64> {
    percolab::fk::self_dual_point(q).map_err(err)
}

/// Dual random-cluster parameters (p*, q*).
#[pyfunction]
fn fk_dual(p: f64, q: f64) -> PyResult<(f64, f64)> {
    let d = percolab::fk::fk_dual_params(FkParams::new(p, q).map_err(err)?);
    Ok((d.p, d.q))
}

/// Inverse temperature β = -½ log(1-p) of the coupled Potts model.
#[pyfunction]
fn beta_of_p(p: f64) -> PyResult<f64> {
    percolab::potts::beta_of_p(p).map_err(err)
}

/// Edge weight p = 1 - e^(-2β).
#[pyfunction]
fn p_of_beta(beta: f64) -> PyResult<f64> {
    percolab::potts::p_of_beta(beta).map_err(err)
}

/// Critical loop O(n) edge weight x_c(n) = 1/sqrt(2 + sqrt(2-n)).
#[pyfunction]
fn x_c(n: f64) -> PyResult<f64> {
    percolab::loop_model::x_c(n).map_err(err)
}

/// Parafermionic spin σ(n).
#[pyfunction]
fn sigma(n: f64) -> PyResult<f64> {
    percolab::parafermion::sigma(n).map_err(err)
}

/// Exact hexagonal-lattice self-avoiding walk counts c_1..c_max.
#[pyfunction]
fn count_saw(max_length: usize) -> PyResult<Vec<u64>> {
    percolab::parafermion::count_saw(max_length).map_err(err)
}

/// Largest |∮F| over the elementary contours of the radius-`radius` domain;
/// x and sigma default to their critical values.
#[pyfunction]
#[pyo3(signature = (n, radius=2, x=None, sigma=None))]
fn max_contour_integral(
    n: f64,
    radius: usize,
    x: Option<f64>,
    sigma: Option<f64>,
) -> PyResult<f64> {
    let x = match x {
        Some(v) => v,
        None => percolab::loop_model::x_c(n).map_err(err)?,
    };
    let sg = match sigma {
        Some(v) => v,
        None => percolab::parafermion::sigma(n).map_err(err)?,
    };
    let domain = build_hex_domain(radius).map_err(err)?;
    let a = domain
        .boundary_mid_edges()
        .next()
        .expect("boundary mid-edge");
    let field = percolab::parafermion::parafermionic_field(
        &domain,
        a,
        LoopParams::new(x, n).map_err(err)?,
        sg,
    )
    .map_err(err)?;
    percolab::parafermion::max_elementary_integral(&domain, &field).map_err(err)
}

/// Random-cluster crossing estimate on an n x m rectangle via heat-bath
/// sweeps; returns (mean, stderr).
#[pyfunction]
#[pyo3(signature = (n, m, p, q, sweeps=2000, burn_in=500, seed=0, wired=false))]
#[allow(clippy::too_many_arguments)]
fn fk_crossing(
    n: usize,
    m: usize,
    p: f64,
    q: f64,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    wired: bool,
) -> PyResult<(f64, f64)> {
    let params = FkParams::new(p, q).map_err(err)?;
    let bc = if wired {
        Boundary::Wired
    } else {
        Boundary::Free
    };
    let est =
        percolab::fk::fk_crossing_prob(n, m, params, sweeps, burn_in, seed, bc).map_err(err)?;
    Ok((est.mean, est.stderr))
}

/// Loop O(n) plaquette chain summary on a hexagonal domain.
#[pyfunction]
#[pyo3(signature = (x, n, radius=2, sweeps=20000, burn_in=1000, seed=0))]
fn loop_run<'py>(
    py: Python<'py>,
    x: f64,
    n: f64,
    radius: usize,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let domain = build_hex_domain(radius).map_err(err)?;
    let run = percolab::loop_model::loop_sample(
        &domain,
        LoopParams::new(x, n).map_err(err)?,
        sweeps,
        burn_in,
        seed,
    )
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("edge_density", run.edge_density.mean)?;
    out.set_item("edge_density_err", run.edge_density.stderr)?;
    out.set_item("mean_loops", run.mean_loops.mean)?;
    out.set_item("mean_loops_err", run.mean_loops.stderr)?;
    out.set_item("acceptance", run.acceptance)?;
    Ok(out)
}

/// S-curve of crossing probabilities; returns a dict with rows, p_half and
/// the 0.1–0.9 transition width.
#[pyfunction]
fn s_curve<'py>(
    py: Python<'py>,
    n: usize,
    p_grid: Vec<f64>,
    replicas: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let curve = percolab::sharpness::s_curve(n, &p_grid, replicas, seed).map_err(err)?;
    let rows = PyList::empty(py);
    for r in &curve.rows {
        rows.append((r.p, r.estimate, r.stderr))?;
    }
    let out = PyDict::new(py);
    out.set_item("rows", rows)?;
    out.set_item("p_half", curve.p_half)?;
    out.set_item("width", curve.width)?;
    Ok(out)
}

/// Exact total-variation distance between the colored-cluster law and the
/// Potts law on the 4-cycle; the coupling makes it vanish.
#[pyfunction]
fn coupling_equivalence_tv(p: f64, q: usize) -> PyResult<f64> {
    let g = LatticeGraph::cycle(4);
    let fkp = FkParams::new(p, q as f64).map_err(err)?;
    let pushed = percolab::potts::es_pushforward_exact(&g, fkp).map_err(err)?;
    let beta = percolab::potts::beta_of_p(p).map_err(err)?;
    let params = percolab::potts::PottsParams::new(beta, q).map_err(err)?;
    let direct = percolab::potts::potts_exact(&g, params).map_err(err)?;
    Ok(percolab::potts::total_variation(&pushed, &direct))
}

/// Run the acceptance checklist; returns [(id, name, passed, detail)].
#[pyfunction]
#[pyo3(signature = (seed=0xC0FFEE))]
fn verify(seed: u64) -> Vec<(usize, String, bool, String)> {
    percolab::verify::run_all(seed)
        .into_iter()
        .map(|o| (o.id, o.name.to_string(), o.passed, o.detail))
        .collect()
}

#[pymodule]
fn percolab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Lattice>()?;
    m.add_function(wrap_pyfunction!(crossing_probability, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_probability_exact, m)?)?;
    m.add_function(wrap_pyfunction!(one_arm_probability, m)?)?;
    m.add_function(wrap_pyfunction!(self_dual_point, m)?)?;
    m.add_function(wrap_pyfunction!(fk_dual, m)?)?;
    m.add_function(wrap_pyfunction!(beta_of_p, m)?)?;
    m.add_function(wrap_pyfunction!(p_of_beta, m)?)?;
    m.add_function(wrap_pyfunction!(x_c, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(count_saw, m)?)?;
    m.add_function(wrap_pyfunction!(max_contour_integral, m)?)?;
    m.add_function(wrap_pyfunction!(fk_crossing, m)?)?;
    m.add_function(wrap_pyfunction!(loop_run, m)?)?;
    m.add_function(wrap_pyfunction!(s_curve, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_equivalence_tv, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
