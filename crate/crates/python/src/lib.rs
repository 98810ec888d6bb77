//! Python bindings: qudit systems, bases, Bell states, the Mean King protocol and Wigner grids.

use std::sync::OnceLock;

use meanking_core::bell::bell_state;
use meanking_core::verify::Suite;
use meanking_core::wigner::wigner_grid;
use meanking_core::{
    bell_transform, build_context, run_protocol, run_suite, Error, MeanKingBasis, Mode, Operator,
    ProtocolMode, QuditSystem, WignerOperatorSet, C64, DEFAULT_TOL,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(PyValueError::new_err)
}

/// Serializes through JSON so reports arrive as plain dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn operator_from_rows(rows: Vec<Vec<C64>>) -> PyResult<Operator> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("density matrix must be square"));
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    Operator::from_rows(n, &flat).map_err(py_err)
}

/// Arithmetic tables of GF(p^m) (galois) or Z_p (modular).
#[pyfunction]
#[pyo3(signature = (p, m = 1, mode = "galois"))]
fn field_info<'py>(py: Python<'py>, p: usize, m: usize, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let ctx = build_context(parse_mode(mode)?, p, m).map_err(py_err)?;
    let n = ctx.dim();
    let rows = |t: &[usize]| t.chunks(n).map(<[usize]>::to_vec).collect::<Vec<_>>();
    #[derive(Serialize)]
    struct Info {
        dim: usize,
        p: usize,
        m: usize,
        irreducible: Option<Vec<usize>>,
        add: Vec<Vec<usize>>,
        mul: Vec<Vec<usize>>,
        neg: Vec<usize>,
        inv: Vec<Option<usize>>,
    }
    let info = Info {
        dim: n,
        p: ctx.p(),
        m: ctx.m(),
        irreducible: ctx.irreducible().map(<[usize]>::to_vec),
        add: rows(ctx.add_table()),
        mul: rows(ctx.mul_table()),
        neg: ctx.neg_table().to_vec(),
        inv: ctx.inv_table().to_vec(),
    };
    to_py(py, &info)
}

/// Runs a property suite and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (dim, mode = "galois", suite = "all", seed = 1, tol = DEFAULT_TOL))]
fn verify<'py>(
    py: Python<'py>,
    dim: usize,
    mode: &str,
    suite: &str,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(PyValueError::new_err)?;
    let mode = parse_mode(mode)?;
    let report = py
        .detach(|| meanking_core::verify::verify(mode, dim, suite, seed, tol))
        .map_err(py_err)?;
    to_py(py, &report)
}

/// A qudit of dimension N with its bases, phases and lazily built King basis.
#[pyclass(name = "QuditSystem", frozen)]
struct PySystem {
    inner: QuditSystem,
    king: OnceLock<MeanKingBasis>,
    wigner: OnceLock<WignerOperatorSet>,
}

impl PySystem {
    fn king(&self) -> PyResult<&MeanKingBasis> {
        if let Some(b) = self.king.get() {
            return Ok(b);
        }
        let s = &self.inner;
        let basis = MeanKingBasis::build(&s.family, &s.ctx, s.ext.as_ref(), &s.phases, DEFAULT_TOL)
            .map_err(py_err)?;
        Ok(self.king.get_or_init(|| basis))
    }

    fn wigner_set(&self) -> PyResult<&WignerOperatorSet> {
        if let Some(w) = self.wigner.get() {
            return Ok(w);
        }
        let set = WignerOperatorSet::build(&self.inner.ctx, &self.inner.phases).map_err(py_err)?;
        Ok(self.wigner.get_or_init(|| set))
    }

    fn check(&self, what: &str, value: usize, limit: usize) -> PyResult<()> {
        if value < limit {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!(
                "{what} = {value} out of range 0..{limit}"
            )))
        }
    }
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (dim, mode = "galois"))]
    fn new(dim: usize, mode: &str) -> PyResult<Self> {
        let inner = QuditSystem::new(parse_mode(mode)?, dim).map_err(py_err)?;
        Ok(Self {
            inner,
            king: OnceLock::new(),
            wigner: OnceLock::new(),
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    #[getter]
    fn irreducible(&self) -> Option<Vec<usize>> {
        self.inner.ctx.irreducible().map(<[usize]>::to_vec)
    }

    fn add(&self, a: usize, b: usize) -> PyResult<usize> {
        self.check("a", a, self.dim())?;
        self.check("b", b, self.dim())?;
        Ok(self.inner.ctx.add(a, b))
    }

    fn mul(&self, a: usize, b: usize) -> PyResult<usize> {
        self.check("a", a, self.dim())?;
        self.check("b", b, self.dim())?;
        Ok(self.inner.ctx.mul(a, b))
    }

    /// Amplitudes of |e_k^i⟩.
    fn mub_state(&self, i: usize, k: usize) -> PyResult<Vec<C64>> {
        self.check("i", i, self.dim() + 1)?;
        self.check("k", k, self.dim())?;
        Ok(self.inner.family.state(i, k).amps().to_vec())
    }

    #[pyo3(signature = (tol = DEFAULT_TOL))]
    fn unbiasedness<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.family.unbiasedness_report(tol))
    }

    /// Two-qudit amplitudes of B^k_{m,n}, index a*N + b.
    fn bell_state(&self, m: usize, n: usize, k: usize) -> PyResult<Vec<C64>> {
        self.check("m", m, self.dim())?;
        self.check("n", n, self.dim())?;
        self.check("k", k, self.dim() + 1)?;
        Ok(bell_state(&self.inner.family, &self.inner.ctx, m, n, k)
            .amps()
            .to_vec())
    }

    /// (m', n', phase) with B^k_{m,n} = phase * B^0_{m',n'}.
    fn bell_transform(&self, k: usize, m: usize, n: usize) -> PyResult<(usize, usize, C64)> {
        let img = bell_transform(&self.inner.ctx, &self.inner.phases, k, m, n).map_err(py_err)?;
        Ok((img.m, img.n, img.phase))
    }

    /// Outcome l the King's basis-k measurement must have given, from Alice's (i1, i2).
    fn king_inference(&self, py: Python<'_>, k: usize, i1: usize, i2: usize) -> PyResult<usize> {
        self.check("k", k, self.dim() + 1)?;
        self.check("i1", i1, self.dim())?;
        self.check("i2", i2, self.dim())?;
        let basis = py.detach(|| self.king())?;
        Ok(basis.inference(k, i1, i2))
    }

    fn king_state(&self, py: Python<'_>, i1: usize, i2: usize) -> PyResult<Vec<C64>> {
        self.check("i1", i1, self.dim())?;
        self.check("i2", i2, self.dim())?;
        let basis = py.detach(|| self.king())?;
        Ok(basis.state(i1, i2).amps().to_vec())
    }

    #[pyo3(signature = (trials = 10_000, seed = 0, exhaustive = false, tol = DEFAULT_TOL))]
    fn run_protocol<'py>(
        &self,
        py: Python<'py>,
        trials: u64,
        seed: u64,
        exhaustive: bool,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mode = if exhaustive {
            ProtocolMode::Exhaustive
        } else {
            ProtocolMode::MonteCarlo
        };
        let report = py.detach(|| {
            self.king().and_then(|b| {
                run_protocol(b, &self.inner.family, mode, trials, seed, tol).map_err(py_err)
            })
        })?;
        to_py(py, &report)
    }

    /// Wigner function W[i1][i2] of a hermitian matrix given as nested lists of complex.
    #[pyo3(signature = (rho, tol = DEFAULT_TOL))]
    fn wigner_grid(&self, rho: Vec<Vec<C64>>, tol: f64) -> PyResult<Vec<Vec<f64>>> {
        let op = operator_from_rows(rho)?;
        let set = self.wigner_set()?;
        wigner_grid(set, &op, tol).map_err(py_err)
    }

    #[pyo3(signature = (suite = "all", seed = 1, tol = DEFAULT_TOL))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        suite: &str,
        seed: u64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let suite: Suite = suite.parse().map_err(PyValueError::new_err)?;
        let report = py
            .detach(|| run_suite(&self.inner, suite, seed, tol))
            .map_err(py_err)?;
        to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!("QuditSystem(dim={}, mode='{}')", self.dim(), self.mode())
    }
}

#[pymodule]
pub fn meanking(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(field_info, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
