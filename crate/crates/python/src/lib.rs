//! Python bindings for the `grunwald` crate.
//!
//! Structured results come back as plain dicts of floats and lists; long
//! computations release the GIL.

use grunwald::convergence::{self, ConvergenceTable};
use grunwald::norms::{self, SEMIGROUP_TOL};
use grunwald::pde::{self, Example1Data, TadjeranScheme, TimeControl};
use grunwald::symbols::coercivity_lower_bound;
use grunwald::{
    certify_stability, combined_symbol, Domain, FracOrder, GridFunction, Scheme, SchemeTerm,
    Truncation,
};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(grunwald, GrunwaldError, PyException);
create_exception!(grunwald, PreconditionError, GrunwaldError);
create_exception!(grunwald, NumericalError, GrunwaldError);

fn to_py(e: grunwald::Error) -> PyErr {
    if e.is_precondition() {
        PreconditionError::new_err(e.to_string())
    } else {
        NumericalError::new_err(e.to_string())
    }
}

fn order(alpha: f64) -> PyResult<FracOrder> {
    FracOrder::new(alpha).map_err(to_py)
}

fn parse_data(f: &str) -> PyResult<Example1Data> {
    match f {
        "f1" => Ok(Example1Data::F1),
        "f2" => Ok(Example1Data::F2),
        "f3" => Ok(Example1Data::F3),
        _ => Err(PreconditionError::new_err(format!(
            "initial data must be f1, f2 or f3, got {f:?}"
        ))),
    }
}

fn parse_tadjeran(order: usize) -> PyResult<TadjeranScheme> {
    match order {
        2 => Ok(TadjeranScheme::Order2),
        3 => Ok(TadjeranScheme::Order3),
        _ => Err(PreconditionError::new_err(format!(
            "variable-coefficient scheme order must be 2 or 3, got {order}"
        ))),
    }
}

fn table_dict<'py>(py: Python<'py>, t: &ConvergenceTable) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item(
        "resolution",
        t.rows.iter().map(|r| r.resolution).collect::<Vec<_>>(),
    )?;
    d.set_item("h", t.rows.iter().map(|r| r.h).collect::<Vec<_>>())?;
    d.set_item("error", t.errors())?;
    d.set_item("ratio", t.rows.iter().map(|r| r.ratio).collect::<Vec<_>>())?;
    d.set_item(
        "local_order",
        t.rows.iter().map(|r| r.local_order).collect::<Vec<_>>(),
    )?;
    d.set_item("fitted_order", t.fitted_order)?;
    Ok(d)
}

/// A weighted combination of shifted Grünwald operators.
#[pyclass(frozen, name = "Scheme", module = "grunwald")]
struct PyScheme {
    inner: Scheme,
}

#[pymethods]
impl PyScheme {
    /// Builds a scheme from `(weight, scale, shift)` triples.
    #[new]
    #[pyo3(signature = (alpha, terms, design_order = 1))]
    fn new(alpha: f64, terms: Vec<(f64, f64, f64)>, design_order: usize) -> PyResult<Self> {
        let terms = terms
            .into_iter()
            .map(|(w, c, p)| SchemeTerm::new(w, c, p))
            .collect();
        Ok(Self {
            inner: Scheme::new(order(alpha)?, terms, design_order).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn shifted(alpha: f64, p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Scheme::shifted(order(alpha)?, p),
        })
    }

    /// Single operator at the optimal shift.
    #[staticmethod]
    fn first_order(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: Scheme::first_order(order(alpha)?),
        })
    }

    #[staticmethod]
    fn second_order(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: grunwald::second_order_scheme(order(alpha)?).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn third_order(alpha: f64) -> PyResult<Self> {
        Ok(Self {
            inner: grunwald::third_order_scheme(order(alpha)?).map_err(to_py)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn design_order(&self) -> usize {
        self.inner.design_order()
    }

    #[getter]
    fn terms(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .terms()
            .iter()
            .map(|t| (t.weight, t.scale, t.shift))
            .collect()
    }

    /// Combined symbol at wavenumber `k` for spacing `h`.
    #[pyo3(signature = (k, h = 1.0))]
    fn symbol(&self, k: f64, h: f64) -> Complex64 {
        combined_symbol(&self.inner, h).eval(k)
    }

    /// Samples the real part of the symbol on `(0, pi]` and reports the
    /// growth constants and coercivity.
    #[pyo3(signature = (samples = 4096))]
    fn certify<'py>(&self, py: Python<'py>, samples: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = certify_stability(&combined_symbol(&self.inner, 1.0), samples).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("c_bound", r.c_bound)?;
        d.set_item("cprime_bound", r.cprime_bound)?;
        d.set_item("c_coercivity", r.c_coercivity)?;
        d.set_item("sign_change", r.sign_change)?;
        d.set_item("k_grid_size", r.k_grid_size)?;
        Ok(d)
    }

    /// Largest Taylor coefficient of the symbol error up to `degree`.
    fn taylor_residual(&self, degree: usize) -> f64 {
        grunwald::taylor_cancellation_check(&self.inner, degree)
    }

    /// Applies the scheme to full-line samples with spacing `h`; samples
    /// outside the list read as zero.
    #[pyo3(signature = (samples, h, origin_index = 0))]
    fn apply(&self, samples: Vec<f64>, h: f64, origin_index: isize) -> PyResult<Vec<f64>> {
        let g = GridFunction::new(samples, h, origin_index, Domain::FullLine).map_err(to_py)?;
        let out = grunwald::apply_scheme(&g, &self.inner, Truncation::Auto).map_err(to_py)?;
        Ok(out.samples().to_vec())
    }

    /// `||exp(s phi)||` in the multiplier norm, with `phi` the unit-spacing symbol.
    fn semigroup_norm(&self, py: Python<'_>, s: f64) -> PyResult<f64> {
        let sym = combined_symbol(&self.inner, 1.0);
        py.detach(|| norms::semigroup_norm(&sym, s, SEMIGROUP_TOL))
            .map_err(to_py)
    }

    /// Semigroup norms and analyticity products over a `(t, h)` grid.
    fn norm_scan<'py>(
        &self,
        py: Python<'py>,
        t_grid: Vec<f64>,
        h_grid: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let s = py
            .detach(|| norms::semigroup_norm_scan(&self.inner, &t_grid, &h_grid))
            .map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("k_max", s.k_max())?;
        d.set_item("m_max", s.m_max())?;
        d.set_item("t_grid", s.t_grid)?;
        d.set_item("h_grid", s.h_grid)?;
        d.set_item("norms", s.norms)?;
        d.set_item("analyticity_products", s.analyticity_products)?;
        Ok(d)
    }

    /// Matrix-exponential norm of the periodic `n`-point generator next to
    /// the Fourier-side value.
    fn circulant_check(&self, py: Python<'_>, n: usize, t: f64) -> PyResult<(f64, f64)> {
        let c = py
            .detach(|| norms::circulant_norm_check(&self.inner, n, t))
            .map_err(to_py)?;
        Ok((c.matrix_norm, c.fourier_norm))
    }

    /// Consistency errors on a Gaussian for each `1/h` in `inv_h`.
    fn consistency_study<'py>(
        &self,
        py: Python<'py>,
        inv_h: Vec<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let t = py
            .detach(|| convergence::consistency_study(&self.inner, &inv_h))
            .map_err(to_py)?;
        table_dict(py, &t)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scheme(alpha={}, terms={:?}, design_order={})",
            self.inner.alpha(),
            self.terms(),
            self.inner.design_order()
        )
    }
}

/// `w_0, ..., w_count` of the Grünwald expansion of order `alpha`.
#[pyfunction]
fn grunwald_weights(alpha: f64, count: usize) -> Vec<f64> {
    grunwald::grunwald_weights(alpha, count)
}

#[pyfunction]
fn optimal_shift(alpha: f64) -> PyResult<i64> {
    grunwald::optimal_shift(order(alpha)?).map_err(to_py)
}

/// Symbol of the single shifted operator with shift `p`.
#[pyfunction]
#[pyo3(signature = (alpha, p, k, h = 1.0))]
fn psi(alpha: f64, p: f64, k: f64, h: f64) -> PyResult<Complex64> {
    Ok(grunwald::psi_eval(order(alpha)?, h, p, k))
}

#[pyfunction]
fn psi_real_closed_form(alpha: f64, p: i64, k: f64) -> PyResult<f64> {
    Ok(grunwald::psi_real_closed_form(order(alpha)?, p, k))
}

#[pyfunction]
#[pyo3(name = "coercivity_lower_bound")]
fn coercivity_bound(alpha: f64, p: f64) -> PyResult<f64> {
    Ok(coercivity_lower_bound(order(alpha)?, p))
}

/// Density of the one-sided stable law with Laplace transform `exp(-t s^alpha)`.
#[pyfunction]
fn stable_density(alpha: f64, t: f64, x: f64) -> PyResult<f64> {
    grunwald::oracles::stable_density(alpha, t, x).map_err(to_py)
}

/// Variable-coefficient test problem at `t = 1`: `(max error, solution)`.
#[pyfunction]
#[pyo3(signature = (order, nx, tol = 1e-10))]
fn solve_tadjeran(py: Python<'_>, order: usize, nx: usize, tol: f64) -> PyResult<(f64, Vec<f64>)> {
    let kind = parse_tadjeran(order)?;
    let r = py
        .detach(|| pde::solve_tadjeran(kind, nx, &TimeControl::Converged { tol }))
        .map_err(to_py)?;
    Ok((r.max_error, r.solution.samples().to_vec()))
}

#[pyfunction]
#[pyo3(signature = (order, resolutions, tol = 1e-10))]
fn tadjeran_study<'py>(
    py: Python<'py>,
    order: usize,
    resolutions: Vec<usize>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = parse_tadjeran(order)?;
    let t = py
        .detach(|| convergence::tadjeran_study(kind, &resolutions, &TimeControl::Converged { tol }))
        .map_err(to_py)?;
    table_dict(py, &t)
}

/// Constant-coefficient problem with power-law data at `t = 1`:
/// `(L1 error, solution)`.
#[pyfunction]
#[pyo3(signature = (f, scheme_order, nx, tol = 1e-10))]
fn solve_example1(
    py: Python<'_>,
    f: &str,
    scheme_order: usize,
    nx: usize,
    tol: f64,
) -> PyResult<(f64, Vec<f64>)> {
    let data = parse_data(f)?;
    let r = py
        .detach(|| pde::solve_example1(data, scheme_order, nx, &TimeControl::Converged { tol }))
        .map_err(to_py)?;
    Ok((r.l1_error, r.solution.samples().to_vec()))
}

#[pyfunction]
#[pyo3(signature = (f, scheme_order, resolutions, tol = 1e-10))]
fn example1_study<'py>(
    py: Python<'py>,
    f: &str,
    scheme_order: usize,
    resolutions: Vec<usize>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let data = parse_data(f)?;
    let t = py
        .detach(|| {
            convergence::example1_study(
                data,
                scheme_order,
                &resolutions,
                &TimeControl::Converged { tol },
                None,
            )
        })
        .map_err(to_py)?;
    table_dict(py, &t)
}

#[pymodule]
#[pyo3(name = "grunwald")]
fn grunwald_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("GrunwaldError", py.get_type::<GrunwaldError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("NumericalError", py.get_type::<NumericalError>())?;
    m.add_class::<PyScheme>()?;
    m.add_function(wrap_pyfunction!(grunwald_weights, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_shift, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(psi_real_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(coercivity_bound, m)?)?;
    m.add_function(wrap_pyfunction!(stable_density, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tadjeran, m)?)?;
    m.add_function(wrap_pyfunction!(tadjeran_study, m)?)?;
    m.add_function(wrap_pyfunction!(solve_example1, m)?)?;
    m.add_function(wrap_pyfunction!(example1_study, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
