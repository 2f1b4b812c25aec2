//! Python bindings: `import isotube`.

use nalgebra::DMatrix;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use isotube::report::{self, FaultInjection, OutputFormat, ReportError, VerifySettings};
use isotube::{charpoly, model, submanifold, subspace, tube, GeometryError};

fn geometry_err(e: GeometryError) -> PyErr {
    match e {
        GeometryError::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn report_err(e: ReportError) -> PyErr {
    match e {
        ReportError::Config(_) => PyValueError::new_err(e.to_string()),
        ReportError::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn parse_format(format: &str) -> PyResult<OutputFormat> {
    format.parse().map_err(PyValueError::new_err)
}

/// `aB + U + xZ` with `U` in interleaved `(Re, Im)` coordinates.
#[pyclass(name = "AlgebraVector", module = "isotube", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyAlgebraVector(model::AlgebraVector);

#[pymethods]
impl PyAlgebraVector {
    #[new]
    fn new(a: f64, u: Vec<f64>, z: f64) -> PyResult<Self> {
        if u.len() < 2 || !u.len().is_multiple_of(2) {
            return Err(PyValueError::new_err(format!(
                "u must have even length >= 2, got {}",
                u.len()
            )));
        }
        Ok(Self(model::AlgebraVector::new(a, u, z)))
    }

    #[staticmethod]
    fn from_flat(flat: Vec<f64>) -> PyResult<Self> {
        let n = flat.len() / 2;
        let space = model::ModelSpace::new(n).map_err(geometry_err)?;
        space.from_flat(&flat).map(Self).map_err(geometry_err)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn u(&self) -> Vec<f64> {
        self.0.u.clone()
    }

    #[getter]
    fn z(&self) -> f64 {
        self.0.z
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn to_flat(&self) -> Vec<f64> {
        self.0.to_flat().iter().copied().collect()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.try_add(&other.0).map(Self).map_err(geometry_err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.try_sub(&other.0).map(Self).map_err(geometry_err)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __mul__(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    fn __rmul__(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    fn __repr__(&self) -> String {
        format!("AlgebraVector(a={}, u={:?}, z={})", self.0.a, self.0.u, self.0.z)
    }
}

#[pyfunction]
fn inner(v: &PyAlgebraVector, w: &PyAlgebraVector) -> PyResult<f64> {
    model::inner(&v.0, &w.0).map_err(geometry_err)
}

#[pyfunction]
fn complex_structure(v: &PyAlgebraVector) -> PyAlgebraVector {
    PyAlgebraVector(model::complex_structure(&v.0))
}

#[pyfunction]
fn bracket(v: &PyAlgebraVector, w: &PyAlgebraVector) -> PyResult<PyAlgebraVector> {
    model::bracket(&v.0, &w.0).map(PyAlgebraVector).map_err(geometry_err)
}

/// Levi-Civita connection `∇_v w` of left-invariant fields.
#[pyfunction]
fn connection(v: &PyAlgebraVector, w: &PyAlgebraVector) -> PyResult<PyAlgebraVector> {
    model::connection(&v.0, &w.0).map(PyAlgebraVector).map_err(geometry_err)
}

#[pyfunction]
fn radial_curvature(zeta: &PyAlgebraVector, gdot: &PyAlgebraVector) -> PyResult<PyAlgebraVector> {
    model::radial_curvature(&zeta.0, &gdot.0).map(PyAlgebraVector).map_err(geometry_err)
}

/// Normal space `w^⊥` of `W_w` inside `g_α`.
#[pyclass(name = "NormalSubspace", module = "isotube", frozen)]
struct PyNormalSubspace(subspace::NormalSubspace);

#[pymethods]
impl PyNormalSubspace {
    /// `preset` is one of `complex(j)`, `totally_real(j)`, `mixed3`, `theta_plane(t)`.
    #[staticmethod]
    fn preset(n: usize, preset: &str) -> PyResult<Self> {
        let space = model::ModelSpace::new(n).map_err(geometry_err)?;
        let p: subspace::Preset = preset.parse().map_err(PyValueError::new_err)?;
        p.build(space).map(Self).map_err(geometry_err)
    }

    #[staticmethod]
    fn from_basis(n: usize, basis: Vec<Vec<f64>>) -> PyResult<Self> {
        let space = model::ModelSpace::new(n).map_err(geometry_err)?;
        subspace::make_subspace(space, &basis).map(Self).map_err(geometry_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    /// Orthonormal basis in `g_α` coordinates.
    #[getter]
    fn basis(&self) -> Vec<Vec<f64>> {
        self.0.basis().iter().map(|b| b.iter().copied().collect()).collect()
    }

    fn has_constant_angle(&self, tol: f64) -> (bool, Option<f64>) {
        subspace::has_constant_angle(&self.0, tol)
    }

    fn __repr__(&self) -> String {
        format!("NormalSubspace(n={}, k={})", self.0.n(), self.0.k())
    }
}

/// `Jξ = Pξ + Fξ` and the Kähler angle of a unit `ξ ∈ w^⊥`.
#[pyclass(name = "KaehlerDecomposition", module = "isotube", frozen)]
struct PyKaehlerDecomposition(subspace::KaehlerDecomposition);

#[pymethods]
impl PyKaehlerDecomposition {
    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    /// `"zero"`, `"interior"` or `"right_angle"`.
    #[getter]
    fn case(&self) -> &'static str {
        self.0.case().as_str()
    }

    #[getter]
    fn xi(&self) -> Vec<f64> {
        self.0.xi.iter().copied().collect()
    }

    #[getter]
    fn p(&self) -> Vec<f64> {
        self.0.p.iter().copied().collect()
    }

    #[getter]
    fn f(&self) -> Vec<f64> {
        self.0.f.iter().copied().collect()
    }

    #[getter]
    fn pbar(&self) -> Option<Vec<f64>> {
        self.0.pbar.as_ref().map(|v| v.iter().copied().collect())
    }

    #[getter]
    fn fbar(&self) -> Option<Vec<f64>> {
        self.0.fbar.as_ref().map(|v| v.iter().copied().collect())
    }
}

#[pyfunction]
fn decompose(sub: &PyNormalSubspace, xi: Vec<f64>) -> PyResult<PyKaehlerDecomposition> {
    subspace::decompose(&sub.0, &xi).map(PyKaehlerDecomposition).map_err(geometry_err)
}

/// Shape operator of `W_w` in its tangent frame.
#[pyfunction]
fn shape_operator_w(sub: &PyNormalSubspace, xi: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let dec = subspace::decompose(&sub.0, &xi).map_err(geometry_err)?;
    let s = submanifold::shape_operator_w(&sub.0, &dec).map_err(geometry_err)?;
    Ok(rows(&s.matrix))
}

/// `S^r` in the adapted frame of `(a ⊕ n) ⊖ Rξ`.
#[pyfunction]
fn tube_shape_operator(sub: &PyNormalSubspace, xi: Vec<f64>, r: f64) -> PyResult<Vec<Vec<f64>>> {
    let dec = subspace::decompose(&sub.0, &xi).map_err(geometry_err)?;
    tube::tube_shape_operator(&sub.0, &dec, r).map(|m| rows(&m)).map_err(geometry_err)
}

#[pyfunction]
#[pyo3(signature = (sub, xi, r, cluster_tol = tube::CLUSTER_TOL))]
fn tube_spectrum<'py>(
    py: Python<'py>,
    sub: &PyNormalSubspace,
    xi: Vec<f64>,
    r: f64,
    cluster_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let dec = subspace::decompose(&sub.0, &xi).map_err(geometry_err)?;
    let s = tube::tube_spectrum(&sub.0, &dec, r, cluster_tol).map_err(geometry_err)?;
    let out = PyDict::new(py);
    out.set_item("eigenvalues", s.eigenvalues)?;
    out.set_item("sorted", s.sorted)?;
    out.set_item("trace", s.trace)?;
    out.set_item("homogeneous", s.homogeneous)?;
    out.set_item("phi", s.phi)?;
    Ok(out)
}

#[pyfunction]
fn classify_tube<'py>(py: Python<'py>, sub: &PyNormalSubspace) -> PyResult<Bound<'py, PyDict>> {
    let c = tube::classify_tube(&sub.0);
    let out = PyDict::new(py);
    out.set_item("n", c.n)?;
    out.set_item("k", c.k)?;
    out.set_item("homogeneous", c.homogeneous)?;
    out.set_item("constant_angle", c.constant_angle)?;
    out.set_item("angle_spectrum", c.angle_spectrum)?;
    out.set_item("notes", c.notes)?;
    Ok(out)
}

#[pyfunction]
fn det_propagator_closed(n: usize, k: usize, r: f64) -> f64 {
    tube::det_propagator_closed(n, k, r)
}

#[pyfunction]
fn mean_curvature_closed(n: usize, k: usize, r: f64) -> f64 {
    tube::mean_curvature_closed(n, k, r)
}

#[pyfunction]
fn log_det_derivative_closed(n: usize, k: usize, r: f64) -> f64 {
    tube::log_det_derivative_closed(n, k, r)
}

/// Ascending monomial coefficients of the characteristic polynomial of `S^r`.
#[pyfunction]
fn char_poly_closed(n: usize, k: usize, r: f64, phi: f64) -> PyResult<Vec<f64>> {
    charpoly::char_poly_closed(n, k, r, phi).map_err(geometry_err)
}

#[pyfunction]
fn closed_principal_curvatures(n: usize, k: usize, r: f64, phi: f64) -> PyResult<Vec<f64>> {
    charpoly::closed_principal_curvatures(n, k, r, phi).map_err(geometry_err)
}

/// Runs `analyze` on a TOML configuration and returns the rendered report.
#[pyfunction]
#[pyo3(signature = (config, format = None))]
fn analyze(config: &str, format: Option<&str>) -> PyResult<String> {
    let config = report::parse_config(config).map_err(report_err)?;
    let format = format.map(parse_format).transpose()?.unwrap_or(config.output_format);
    let rep = report::cmd_analyze(&config, FaultInjection::default()).map_err(report_err)?;
    report::render_tube_report(&rep, format).map_err(report_err)
}

/// Runs the shipped verification battery; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (seed = report::DEFAULT_SEED, tol = report::DEFAULT_TOL, format = "json"))]
fn verify(seed: u64, tol: f64, format: &str) -> PyResult<(bool, String)> {
    let format = parse_format(format)?;
    let rep = report::cmd_verify(&VerifySettings::shipped(seed, tol), FaultInjection::default())
        .map_err(report_err)?;
    Ok((rep.passed, report::render_verify(&rep, format).map_err(report_err)?))
}

#[pymodule]
#[pyo3(name = "isotube")]
fn isotube_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebraVector>()?;
    m.add_class::<PyNormalSubspace>()?;
    m.add_class::<PyKaehlerDecomposition>()?;
    m.add_function(wrap_pyfunction!(inner, m)?)?;
    m.add_function(wrap_pyfunction!(complex_structure, m)?)?;
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(connection, m)?)?;
    m.add_function(wrap_pyfunction!(radial_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(shape_operator_w, m)?)?;
    m.add_function(wrap_pyfunction!(tube_shape_operator, m)?)?;
    m.add_function(wrap_pyfunction!(tube_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(classify_tube, m)?)?;
    m.add_function(wrap_pyfunction!(det_propagator_closed, m)?)?;
    m.add_function(wrap_pyfunction!(mean_curvature_closed, m)?)?;
    m.add_function(wrap_pyfunction!(log_det_derivative_closed, m)?)?;
    m.add_function(wrap_pyfunction!(char_poly_closed, m)?)?;
    m.add_function(wrap_pyfunction!(closed_principal_curvatures, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
