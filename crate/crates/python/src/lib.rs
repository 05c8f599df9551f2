//! Python bindings: fields, surfaces, lattices, Weierstrass models and verify targets.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use quartic_lines::census::{census, CensusOptions};
use quartic_lines::geometry::{enumerate_lines, singular_point_search, QuarticSurface};
use quartic_lines::io::{parse_place, parse_surface, LineRecord, SurfaceFile};
use quartic_lines::lattice::GramLattice;
use quartic_lines::tate::{enumerate_fiber_configs, tate_all_places, tate_classify, Preset};
use quartic_lines::{builtins, verify, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::Inconsistency(_) | Error::Audit(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serialize to JSON and hand back the equivalent Python object.
fn to_py<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "Field", module = "quartic_lines")]
struct PyField(quartic_lines::Field);

#[pymethods]
impl PyField {
    #[new]
    fn new(degree: u32) -> PyResult<Self> {
        Ok(PyField(quartic_lines::Field::standard(degree).map_err(err)?))
    }
    #[getter]
    fn degree(&self) -> u32 {
        self.0.degree()
    }
    #[getter]
    fn modulus(&self) -> u32 {
        self.0.spec().modulus
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.0.mul(a & self.mask(), b & self.mask())
    }
    fn inv(&self, a: u32) -> PyResult<u32> {
        self.0.inv(a).map_err(err)
    }
    fn sqrt(&self, a: u32) -> u32 {
        self.0.sqrt(a & self.mask())
    }
    fn pow(&self, a: u32, e: u64) -> u32 {
        self.0.pow(a & self.mask(), e)
    }
    fn __repr__(&self) -> String {
        format!("Field(GF(2^{}), modulus={:#x})", self.0.degree(), self.0.spec().modulus)
    }
}

impl PyField {
    fn mask(&self) -> u32 {
        self.0.size() - 1
    }
}

#[pyclass(name = "Surface", module = "quartic_lines")]
struct PySurface(QuarticSurface);

#[pymethods]
impl PySurface {
    /// A builtin id such as "s5_mu0" or "family_z:0,0,0:1,1,0,0,1".
    #[staticmethod]
    fn builtin(id: &str) -> PyResult<Self> {
        Ok(PySurface(builtins::builtin(id).map_err(err)?))
    }
    #[staticmethod]
    #[pyo3(signature = (text, label = "surface"))]
    fn from_json(text: &str, label: &str) -> PyResult<Self> {
        Ok(PySurface(parse_surface(text, label).map_err(err)?))
    }
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&SurfaceFile::of(&self.0)).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
    #[getter]
    fn label(&self) -> String {
        self.0.label().to_string()
    }
    #[getter]
    fn field_degree(&self) -> u32 {
        self.0.field().degree()
    }
    /// Lines over GF(q^ext) as records {id, entries, cell}.
    #[pyo3(signature = (ext = 1))]
    fn lines(&self, py: Python<'_>, ext: u32) -> PyResult<Py<PyAny>> {
        let (_, lines) = py.detach(|| enumerate_lines(&self.0, ext)).map_err(err)?;
        let records: Vec<LineRecord> = lines.iter().enumerate().map(|(i, l)| LineRecord::of(i, l)).collect();
        to_py(py, &records)
    }
    #[pyo3(signature = (max_ext = 1))]
    fn singular_points(&self, py: Python<'_>, max_ext: u32) -> PyResult<Py<PyAny>> {
        let s = py.detach(|| singular_point_search(self.0.field(), self.0.poly(), max_ext)).map_err(err)?;
        to_py(py, &s)
    }
    #[pyo3(signature = (ext = 4, singular_ext = 6, fiber_ext = 1))]
    fn census(&self, py: Python<'_>, ext: u32, singular_ext: u32, fiber_ext: u32) -> PyResult<Py<PyAny>> {
        let opts = CensusOptions { ext, singular_ext, fiber_ext, ..Default::default() };
        let r = py.detach(|| census(&self.0, &opts)).map_err(err)?;
        to_py(py, &r)
    }
    fn __repr__(&self) -> String {
        format!("Surface({:?} over GF(2^{}), {} terms)", self.0.label(), self.0.field().degree(), self.0.poly().len())
    }
}

#[pyclass(name = "GramLattice", module = "quartic_lines")]
struct PyGramLattice(GramLattice);

#[pymethods]
impl PyGramLattice {
    #[new]
    fn new(gram: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(PyGramLattice(GramLattice::new(gram).map_err(err)?))
    }
    fn rank(&self) -> usize {
        self.0.rank()
    }
    /// {rank, discriminant, basis-line-ids, index}; big integers as decimal strings.
    fn invariants(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.invariants().map_err(err)?)
    }
    fn discriminant(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let d = self.0.span_discriminant().map_err(err)?;
        Ok(py.import("builtins")?.getattr("int")?.call1((d.to_string(),))?.unbind())
    }
}

#[pyclass(name = "WeierstrassModel", module = "quartic_lines")]
struct PyWeierstrassModel(quartic_lines::tate::WeierstrassModel);

#[pymethods]
impl PyWeierstrassModel {
    /// Coefficients a1, a2, a3, a4, a6 as lists in increasing powers of t over GF(2^degree).
    #[new]
    fn new(degree: u32, a: [Vec<u32>; 5], chi: u32) -> PyResult<Self> {
        let f = quartic_lines::Field::standard(degree).map_err(err)?;
        Ok(PyWeierstrassModel(quartic_lines::tate::WeierstrassModel::new(&f, a, chi).map_err(err)?))
    }
    fn discriminant(&self) -> Vec<u32> {
        self.0.discriminant()
    }
    /// Tate's algorithm at a place: "inf", "0x3" or "0x3@4".
    fn classify(&self, py: Python<'_>, place: &str) -> PyResult<Py<PyAny>> {
        let p = parse_place(self.0.field(), place).map_err(err)?;
        to_py(py, &tate_classify(&self.0, p).map_err(err)?)
    }
    fn all_places(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &tate_all_places(&self.0).map_err(err)?)
    }
}

/// Run a builtin verification target; returns its report.
#[pyfunction]
fn run_verify(py: Python<'_>, target: &str) -> PyResult<Py<PyAny>> {
    let r = py.detach(|| verify::run(target)).map_err(err)?;
    to_py(py, &r)
}

/// Labels of fiber configurations with at least `min_lines` fiber lines.
#[pyfunction]
#[pyo3(signature = (preset, min_lines = 0))]
fn fiber_configs(preset: &str, min_lines: u32) -> PyResult<Vec<String>> {
    let p = Preset::by_name(preset).map_err(err)?;
    Ok(enumerate_fiber_configs(&p, min_lines).map_err(err)?.iter().map(|c| c.label()).collect())
}

/// Run the command-line front end; returns (exit code, stdout, stderr).
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| {
        let (mut out, mut errs) = (Vec::new(), Vec::new());
        let argv = std::iter::once("quartic-lines".to_string()).chain(args);
        let code = quartic_lines::cli::run(argv, &mut out, &mut errs);
        (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&errs).into_owned())
    })
}

#[pymodule]
#[pyo3(name = "quartic_lines")]
fn quartic_lines_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PySurface>()?;
    m.add_class::<PyGramLattice>()?;
    m.add_class::<PyWeierstrassModel>()?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add_function(wrap_pyfunction!(fiber_configs, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("VERIFY_TARGETS", verify::TARGETS.to_vec())?;
    Ok(())
}
