//! Python bindings for the coloring solver, emulator and bounds.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qcbp_core::bench::{exact_reference_chromatic, Mode, RunConfig};
use qcbp_core::bnp::solve_qcbp;
use qcbp_core::bounds::spectral_lb;
use qcbp_core::embedding::{audit as audit_register, embed as embed_graph, EmbedParams, Register};
use qcbp_core::emulator::{build_adiabatic_pulse, evolve, sample, EmulatorConfig};
use qcbp_core::graph::{self, VertexSet};
use qcbp_core::pricing::exact_mwis;

fn py_err(e: qcbp_core::Error) -> PyErr {
    match e {
        qcbp_core::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_set(vs: &[usize], n: usize) -> PyResult<VertexSet> {
    if let Some(&v) = vs.iter().find(|&&v| v >= n) {
        return Err(PyValueError::new_err(format!(
            "vertex {v} out of range for n={n}"
        )));
    }
    Ok(vs.iter().copied().collect())
}

/// Simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph", module = "qcbp", frozen)]
struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = graph::Graph::from_edges(n, &edges).map_err(py_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::parse_dimacs(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn unit_disk(points: Vec<(f64, f64)>, radius: f64) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::Graph::unit_disk(&points, radius).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn complete(n: usize) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::Graph::complete(n).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(PyGraph {
            inner: graph::Graph::cycle(n).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn petersen() -> Self {
        PyGraph {
            inner: graph::Graph::petersen(),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).iter().collect())
    }

    fn is_independent(&self, vertices: Vec<usize>) -> PyResult<bool> {
        Ok(self
            .inner
            .is_independent(to_set(&vertices, self.inner.n())?))
    }

    fn to_dimacs(&self) -> String {
        self.inner.to_dimacs()
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={})",
            self.inner.n(),
            self.inner.edge_count()
        )
    }
}

/// Atom positions for `graph`, in um.
#[pyfunction]
#[pyo3(signature = (graph, seed = 0, ud_radius = 10.0))]
fn embed(py: Python<'_>, graph: &PyGraph, seed: u64, ud_radius: f64) -> PyResult<Vec<(f64, f64)>> {
    let params = EmbedParams {
        ud_radius,
        ..EmbedParams::default()
    };
    let g = graph.inner.clone();
    let reg = py
        .detach(move || embed_graph(&g, &params, seed))
        .map_err(py_err)?;
    Ok(reg.positions().to_vec())
}

/// Compares `graph` with the unit-disk graph of `positions`.
#[pyfunction]
#[pyo3(signature = (graph, positions, ud_radius = 10.0))]
fn audit<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    positions: Vec<(f64, f64)>,
    ud_radius: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = audit_register(&graph.inner, &Register::new(positions), ud_radius).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("is_exact_ud", r.is_exact_ud)?;
    d.set_item("missing_edges", r.missing_edges.clone())?;
    d.set_item("extra_edges", r.extra_edges.clone())?;
    d.set_item("r_max", r.r_max)?;
    d.set_item("r_min", r.r_min)?;
    Ok(d)
}

/// Runs the default adiabatic sweep on a register laid out for `graph`
/// and returns `{bitstring: count}`, atom 0 first.
#[pyfunction]
#[pyo3(signature = (graph, positions, shots = 200, seed = 0, ud_radius = 10.0))]
fn sample_register(
    py: Python<'_>,
    graph: &PyGraph,
    positions: Vec<(f64, f64)>,
    shots: usize,
    seed: u64,
    ud_radius: f64,
) -> PyResult<BTreeMap<String, u64>> {
    let g = graph.inner.clone();
    py.detach(move || {
        let reg = Register::new(positions);
        let report = audit_register(&g, &reg, ud_radius)?;
        let cfg = EmulatorConfig::default();
        let pulse = build_adiabatic_pulse(&report, &cfg)?;
        let psi = evolve(&reg, &pulse, &cfg)?;
        let s = sample(&psi, shots, seed);
        Ok(s.counts()
            .iter()
            .map(|(&b, &c)| (s.bitstring(b), c))
            .collect())
    })
    .map_err(py_err)
}

/// Maximum-weight independent set as `(vertices, weight)`.
#[pyfunction]
fn max_weight_independent_set(graph: &PyGraph, weights: Vec<f64>) -> PyResult<(Vec<usize>, f64)> {
    if weights.len() != graph.inner.n() {
        return Err(PyValueError::new_err("one weight per vertex"));
    }
    let (s, w) = exact_mwis(&graph.inner, &weights);
    Ok((s.iter().collect(), w))
}

/// Spectral lower bounds on the chromatic number.
#[pyfunction]
fn spectral_bounds<'py>(py: Python<'py>, graph: &PyGraph) -> PyResult<Bound<'py, PyDict>> {
    let b = spectral_lb(&graph.inner);
    let d = PyDict::new(py);
    d.set_item("hoffman", b.hoffman)?;
    d.set_item("elphick_wocjan", b.elphick_wocjan)?;
    d.set_item("edwards_elphick", b.edwards_elphick)?;
    d.set_item("combined_lb", b.combined_lb)?;
    Ok(d)
}

/// Exact chromatic number by backtracking (n <= 20).
#[pyfunction]
fn chromatic_number(graph: &PyGraph) -> PyResult<usize> {
    exact_reference_chromatic(&graph.inner).map_err(py_err)
}

/// Solves `graph` by branch-and-price. Keyword arguments are the config
/// keys accepted by the command line (`sampler`, `shots`, `seed`, ...).
#[pyfunction]
#[pyo3(signature = (graph, **options))]
fn solve<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    options: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = RunConfig::default();
    if let Some(opts) = options {
        for (k, v) in opts.iter() {
            let key: String = k.extract()?;
            let value = v.str()?.to_string();
            let value = match value.as_str() {
                "True" => "true".to_string(),
                "False" => "false".to_string(),
                _ => value,
            };
            cfg.set(&key, &value).map_err(py_err)?;
        }
    }
    cfg.validate().map_err(py_err)?;
    if cfg.mode == Mode::Exact {
        return Err(PyValueError::new_err(
            "mode=exact is served by chromatic_number()",
        ));
    }
    let g = graph.inner.clone();
    let r = py
        .detach(move || solve_qcbp(&g, &cfg.solve))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("chi", r.chi_hat)?;
    d.set_item("proven_optimal", r.proven_optimal)?;
    let classes: Vec<Vec<usize>> = r
        .coloring
        .classes
        .iter()
        .map(|c| c.iter().collect())
        .collect();
    d.set_item("classes", classes)?;
    let s = &r.stats;
    d.set_item("nodes_generated", s.nodes_generated)?;
    d.set_item("nodes_explored", s.nodes_explored)?;
    d.set_item("nodes_pruned", s.nodes_pruned)?;
    d.set_item("shots_total", s.shots_total)?;
    d.set_item("ilp_calls", s.ilp_calls)?;
    d.set_item("root_lp", s.root_lp)?;
    d.set_item("wall_ms", s.wall_ms as u64)?;
    Ok(d)
}

#[pymodule]
fn qcbp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    m.add_function(wrap_pyfunction!(sample_register, m)?)?;
    m.add_function(wrap_pyfunction!(max_weight_independent_set, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(chromatic_number, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    Ok(())
}
