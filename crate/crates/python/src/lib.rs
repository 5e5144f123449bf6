//! Python bindings. Complex values cross the boundary as Python `complex`;
//! structured reports come back as dicts in the same shape as the CLI JSON,
//! with complex entries as `[re, im]` lists.

use hardy_symm::conjugation::{CAlphaBeta, ConjugationSpec, JBetaLambda};
use hardy_symm::diffop::{adjoint_symbols, apply, truncated_matrix, SymbolPair};
use hardy_symm::hardy::{kernel as kernel_coeffs, HardyElement};
use hardy_symm::{eigen, spectrum, symmetry, Complex64, Error, Poly};
use nalgebra::DMatrix;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } | Error::SeriesDivergence(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any().unbind()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn report<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

#[derive(FromPyObject)]
enum PolyArg {
    Text(String),
    Coeffs(Vec<Complex64>),
}

impl PolyArg {
    fn into_poly(self) -> PyResult<Poly> {
        match self {
            PolyArg::Text(s) => hardy_symm::parse::parse_poly(&s).map_err(err),
            PolyArg::Coeffs(c) => Ok(Poly::new(c)),
        }
    }
}

/// `E(psi0, psi1) f = psi0 f + psi1 f'` with polynomial symbols given as
/// ascending coefficient lists or strings such as `"1 + 2i*z^2"`.
#[pyclass(name = "Operator", module = "hardy_symm_py")]
#[derive(Clone)]
struct Operator {
    inner: SymbolPair,
}

#[pymethods]
impl Operator {
    #[new]
    #[pyo3(signature = (psi0, psi1))]
    fn new(psi0: PolyArg, psi1: PolyArg) -> PyResult<Self> {
        Ok(Self {
            inner: SymbolPair::new(psi0.into_poly()?, psi1.into_poly()?),
        })
    }

    #[getter]
    fn psi0(&self) -> Vec<Complex64> {
        self.inner.psi0.coeffs().to_vec()
    }

    #[getter]
    fn psi1(&self) -> Vec<Complex64> {
        self.inner.psi1.coeffs().to_vec()
    }

    /// Coefficients of `E f` for a polynomial `f`.
    fn apply(&self, f: Vec<Complex64>) -> Vec<Complex64> {
        apply(&self.inner, &Poly::new(f)).into_coeffs()
    }

    /// Rows of the `(n+1) x (n+1)` finite section.
    fn matrix(&self, n: usize) -> Vec<Vec<Complex64>> {
        let m = truncated_matrix(&self.inner, n).matrix.entries;
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn adjoint(&self) -> PyResult<Operator> {
        adjoint_symbols(&self.inner).map(|inner| Operator { inner }).map_err(err)
    }

    #[pyo3(signature = (beta = Complex64::new(1.0, 0.0), lam = None))]
    fn classify(&self, py: Python<'_>, beta: Complex64, lam: Option<Complex64>) -> PyResult<PyObject> {
        let r = symmetry::classify(&self.inner, beta, lam, None).map_err(err)?;
        report(py, &r)
    }

    #[pyo3(signature = (conjugation, n = 128))]
    fn residual(&self, py: Python<'_>, conjugation: &Conjugation, n: usize) -> PyResult<PyObject> {
        let r = symmetry::residual(&self.inner, &conjugation.inner, n).map_err(err)?;
        report(py, &r)
    }

    fn hermitian_conjugation(&self) -> PyResult<Conjugation> {
        symmetry::hermitian_to_conjugation(&self.inner)
            .map(|c| Conjugation { inner: ConjugationSpec::C(c) })
            .map_err(err)
    }

    /// `(root, multiplicity)` for the zeros of `psi1` inside the disk.
    fn zeros(&self) -> PyResult<Vec<(Complex64, usize)>> {
        Ok(spectrum::zeros_in_disk(&self.inner.psi1)
            .map_err(err)?
            .into_iter()
            .map(|z| (z.root, z.multiplicity))
            .collect())
    }

    #[pyo3(signature = (u, kmax = 16, n = 128))]
    fn spectrum(&self, py: Python<'_>, u: Complex64, kmax: usize, n: usize) -> PyResult<PyObject> {
        let r = spectrum::spectrum(&self.inner, u, kmax, n).map_err(err)?;
        report(py, &r)
    }

    #[pyo3(signature = (u, k, n = 128))]
    fn eigenfunction(&self, py: Python<'_>, u: Complex64, k: usize, n: usize) -> PyResult<PyObject> {
        let r = spectrum::eigenfunction(&self.inner, u, k, n).map_err(err)?;
        report(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Operator(psi0={}, psi1={})", self.inner.psi0, self.inner.psi1)
    }
}

#[pyclass(name = "Conjugation", module = "hardy_symm_py")]
#[derive(Clone)]
struct Conjugation {
    inner: ConjugationSpec,
}

#[pymethods]
impl Conjugation {
    /// `f(z) -> alpha conj(f(conj(beta z)))`.
    #[staticmethod]
    #[pyo3(signature = (alpha = Complex64::new(1.0, 0.0), beta = Complex64::new(1.0, 0.0)))]
    fn c(alpha: Complex64, beta: Complex64) -> PyResult<Self> {
        Ok(Self {
            inner: ConjugationSpec::C(CAlphaBeta::new(alpha, beta).map_err(err)?),
        })
    }

    /// Weighted composition with the disk automorphism exchanging 0 and `lam`.
    #[staticmethod]
    fn j(beta: Complex64, lam: Complex64) -> PyResult<Self> {
        Ok(Self {
            inner: ConjugationSpec::J(JBetaLambda::new(beta, lam).map_err(err)?),
        })
    }

    /// Coefficients of the image of `f`, truncated at degree `n`.
    fn apply(&self, f: Vec<Complex64>, n: usize) -> Vec<Complex64> {
        let v = HardyElement::from_poly(&Poly::new(f), n);
        self.inner.matrix(n).apply(&v).into_coeffs()
    }

    /// Symbols of the conjugated operator.
    fn pushforward(&self, op: &Operator) -> PyResult<Operator> {
        self.inner
            .conjugated_symbols(&op.inner)
            .map(|inner| Operator { inner })
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        match self.inner {
            ConjugationSpec::C(c) => format!("Conjugation.c({}, {})", c.alpha(), c.beta()),
            ConjugationSpec::J(j) => format!("Conjugation.j({}, {})", j.beta(), j.lambda()),
        }
    }
}

/// Taylor coefficients of `K_z^{[m]}` up to degree `n`.
#[pyfunction]
#[pyo3(signature = (z, m = 0, n = 64))]
fn kernel(z: Complex64, m: usize, n: usize) -> PyResult<Vec<Complex64>> {
    kernel_coeffs(z, m, n).map(HardyElement::into_coeffs).map_err(err)
}

/// Eigenvalues of a square matrix given by rows, sorted by `(re, im)`.
#[pyfunction]
fn eigenvalues(rows: Vec<Vec<Complex64>>) -> PyResult<Vec<Complex64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    eigen::eigenvalues(&DMatrix::from_fn(n, n, |i, j| rows[i][j])).map_err(err)
}

#[pymodule]
fn hardy_symm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Operator>()?;
    m.add_class::<Conjugation>()?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalues, m)?)?;
    Ok(())
}
