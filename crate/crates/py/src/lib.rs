//! Python bindings: states, moments, the three bounds and the ladder
//! quadratures.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use circle_uncertainty as cu;
use cu::bounds::BoundsReport;
use cu::state::DEFAULT_TAIL_TOL;

fn to_py(e: cu::Error) -> PyErr {
    match e {
        cu::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Normalized pure state on a finite angular-momentum window.
#[pyclass(name = "CircleState", module = "circle_uncertainty", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCircleState {
    inner: cu::CircleState,
}

#[pymethods]
impl PyCircleState {
    /// Coefficients `c_l` for `l = l_min, l_min + 1, ...`; rescaled to unit
    /// norm when `normalize` is true.
    #[new]
    #[pyo3(signature = (l_min, coeffs, normalize = false))]
    fn new(l_min: i64, coeffs: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let inner = if normalize {
            cu::CircleState::normalized(l_min, coeffs)
        } else {
            cu::CircleState::new(l_min, coeffs)
        }
        .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn l_min(&self) -> i64 {
        self.inner.l_min()
    }

    #[getter]
    fn l_max(&self) -> i64 {
        self.inner.l_max()
    }

    #[getter]
    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn coeff(&self, l: i64) -> Complex64 {
        self.inner.coeff(l)
    }

    fn rotate(&self, phi: f64) -> Self {
        Self { inner: cu::state::rotate(&self.inner, phi) }
    }

    /// Samples `psi(phi_k)` on `n_points` equally spaced angles.
    fn to_grid(&self, n_points: usize) -> PyResult<Vec<Complex64>> {
        let g = cu::state::to_grid(&self.inner, n_points).map_err(to_py)?;
        Ok(g.values().to_vec())
    }

    fn to_json(&self) -> String {
        self.inner.to_file().to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = cu::StateFile::from_json(text).and_then(|f| f.into_state()).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.width()
    }

    fn __repr__(&self) -> String {
        format!("CircleState(l_min={}, l_max={})", self.inner.l_min(), self.inner.l_max())
    }
}

fn params(kappa: f64, lam: i64, alpha: f64) -> PyResult<cu::VonMisesParams> {
    cu::VonMisesParams::new(kappa, lam, alpha).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (kappa, lam = 0, alpha = 0.0, tail_tol = DEFAULT_TAIL_TOL))]
fn von_mises(kappa: f64, lam: i64, alpha: f64, tail_tol: f64) -> PyResult<PyCircleState> {
    let inner = cu::catalog::von_mises(params(kappa, lam, alpha)?, tail_tol).map_err(to_py)?;
    Ok(PyCircleState { inner })
}

#[pyfunction]
#[pyo3(signature = (kappa, tail_tol = DEFAULT_TAIL_TOL))]
fn cat_state(kappa: f64, tail_tol: f64) -> PyResult<PyCircleState> {
    let inner = cu::catalog::cat_state(kappa, tail_tol).map_err(to_py)?;
    Ok(PyCircleState { inner })
}

#[pyfunction]
fn l_eigenstate(l: i64) -> PyResult<PyCircleState> {
    let inner = cu::catalog::l_eigenstate(l).map_err(to_py)?;
    Ok(PyCircleState { inner })
}

#[pyfunction]
#[pyo3(signature = (kappa, lam = 0, alpha = 0.0, tail_tol = DEFAULT_TAIL_TOL))]
fn x_extremal_state(kappa: f64, lam: i64, alpha: f64, tail_tol: f64) -> PyResult<PyCircleState> {
    let inner = cu::catalog::x_extremal_state(params(kappa, lam, alpha)?, tail_tol).map_err(to_py)?;
    Ok(PyCircleState { inner })
}

#[pyfunction]
fn bessel_i(n: u32, x: f64) -> PyResult<f64> {
    cu::special_fn::bessel_i(n, x).map_err(to_py)
}

/// `{"e1", "e2", "l1", "l2", "var_e", "var_l"}` from the coefficients.
#[pyfunction]
fn moments<'py>(py: Python<'py>, state: &PyCircleState) -> PyResult<Bound<'py, PyDict>> {
    let m = cu::moments::moments_from_coeffs(&state.inner);
    let d = PyDict::new(py);
    d.set_item("e1", m.e1)?;
    d.set_item("e2", m.e2)?;
    d.set_item("l1", m.l1)?;
    d.set_item("l2", m.l2)?;
    d.set_item("var_e", cu::moments::dispersion_e(&m))?;
    d.set_item("var_l", cu::moments::dispersion_l(&m))?;
    Ok(d)
}

/// Same moments through the angle grid.
#[pyfunction]
#[pyo3(signature = (state, n_points = None))]
fn quadrature_moments(state: &PyCircleState, n_points: Option<usize>) -> PyResult<(Complex64, Complex64)> {
    let n = n_points.unwrap_or_else(|| cu::moments::oracle_grid_size(&state.inner));
    let m = cu::moments::quadrature_oracle(&state.inner, n).map_err(to_py)?;
    Ok((m.e1, m.e2))
}

/// `{"var_s", "var_c", "cov_cs", "trace", "det", "gamma_minus", "gamma_plus"}`.
#[pyfunction]
fn covariance<'py>(py: Python<'py>, state: &PyCircleState) -> PyResult<Bound<'py, PyDict>> {
    let g = cu::moments::covariance(&cu::moments::moments_from_coeffs(&state.inner)).map_err(to_py)?;
    let d = PyDict::new(py);
    for (k, v) in [
        ("var_s", g.var_s),
        ("var_c", g.var_c),
        ("cov_cs", g.cov_cs),
        ("trace", g.trace),
        ("det", g.det),
        ("gamma_minus", g.gamma_minus),
        ("gamma_plus", g.gamma_plus),
    ] {
        d.set_item(k, v)?;
    }
    Ok(d)
}

fn report_dict<'py>(py: Python<'py>, r: &BoundsReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (k, v) in [
        ("var_l", r.var_l),
        ("var_e", r.var_e),
        ("standard", r.standard),
        ("v2", r.v2),
        ("u2", r.u2),
        ("alpha_star", r.alpha_star),
    ] {
        d.set_item(k, v)?;
    }
    for (k, v) in [
        ("sat_u2", r.sat_u2),
        ("sat_symmetry", r.sat_symmetry),
        ("sat_uv", r.sat_uv),
        ("sat_s_dominant", r.sat_s_dominant),
        ("sat_ordering_chain", r.sat_ordering_chain),
    ] {
        d.set_item(k, v)?;
    }
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (state, tol = cu::bounds::DEFAULT_SATURATION_TOL))]
fn full_report<'py>(py: Python<'py>, state: &PyCircleState, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = cu::bounds::full_report_with_tol(&state.inner, tol).map_err(to_py)?;
    report_dict(py, &r)
}

#[pyfunction]
fn standard_bound(var_e: f64) -> PyResult<f64> {
    cu::bounds::standard_bound(var_e).map_err(to_py)
}

/// `(U^2, alpha*)` by direct maximization over the frame angle.
#[pyfunction]
#[pyo3(signature = (state, n_alpha = 360))]
fn u2_alpha_sweep(state: &PyCircleState, n_alpha: usize) -> PyResult<(f64, f64)> {
    cu::bounds::u2_alpha_sweep(&state.inner, n_alpha).map_err(to_py)
}

#[pyfunction]
fn x_moments<'py>(py: Python<'py>, state: &PyCircleState) -> PyResult<Bound<'py, PyDict>> {
    let m = cu::ladder::x_moments(&state.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("x1", m.x1)?;
    d.set_item("x2", m.x2)?;
    for (k, v) in [
        ("xdx", m.xdx),
        ("q1", m.q1),
        ("p1", m.p1),
        ("var_q", m.var_q),
        ("var_p", m.var_p),
        ("cov_qp", m.cov_qp),
    ] {
        d.set_item(k, v)?;
    }
    Ok(d)
}

#[pyfunction]
fn commutator_residual(state: &PyCircleState) -> PyResult<f64> {
    cu::ladder::commutator_residual(&state.inner).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "circle_uncertainty")]
fn circle_uncertainty_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircleState>()?;
    m.add_function(wrap_pyfunction!(von_mises, m)?)?;
    m.add_function(wrap_pyfunction!(cat_state, m)?)?;
    m.add_function(wrap_pyfunction!(l_eigenstate, m)?)?;
    m.add_function(wrap_pyfunction!(x_extremal_state, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(moments, m)?)?;
    m.add_function(wrap_pyfunction!(quadrature_moments, m)?)?;
    m.add_function(wrap_pyfunction!(covariance, m)?)?;
    m.add_function(wrap_pyfunction!(full_report, m)?)?;
    m.add_function(wrap_pyfunction!(standard_bound, m)?)?;
    m.add_function(wrap_pyfunction!(u2_alpha_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(x_moments, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_residual, m)?)?;
    Ok(())
}
