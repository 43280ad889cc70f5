//! Python bindings: `import qzeta`.
//!
//! Indices are accepted either as a string `"(3,1)"` or as a sequence of
//! positive ints. Series coefficients come back as Python ints (modified
//! normalization) or `fractions.Fraction` (raw).

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;

use qzeta_core::expander::Expander;
use qzeta_core::numeric::{self, NumericResult};
use qzeta_core::ranklab::{self, MiningResult, Relation};
use qzeta_core::relations::{self, VerificationReport as CoreReport};
use qzeta_core::{genfun, Index, Kind, QSeries};

fn err(e: qzeta_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_index(obj: &Bound<'_, PyAny>) -> PyResult<Index> {
    if let Ok(s) = obj.cast::<PyString>() {
        return s.to_str()?.parse().map_err(err);
    }
    if let Ok(k) = obj.cast::<PyIndex>() {
        return Ok(k.borrow().inner.clone());
    }
    Index::new(obj.extract::<Vec<u32>>()?).map_err(err)
}

fn fractions<'py>(py: Python<'py>, s: &QSeries) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    s.coeffs()
        .iter()
        .map(|c| fraction.call1((c.numer().clone(), c.denom().clone())))
        .collect()
}

fn integers(s: &QSeries) -> PyResult<Vec<BigInt>> {
    s.to_integers()
        .ok_or_else(|| PyRuntimeError::new_err("modified expansion is not integral"))
}

#[pyclass(name = "Index", frozen, eq, ord, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PyIndex {
    inner: Index,
}

#[pymethods]
impl PyIndex {
    #[new]
    fn new(index: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyIndex { inner: to_index(index)? })
    }

    #[getter]
    fn parts(&self) -> Vec<u32> {
        self.inner.parts().to_vec()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.inner.weight()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn is_admissible(&self) -> bool {
        self.inner.is_admissible()
    }

    fn dual(&self) -> PyResult<PyIndex> {
        Ok(PyIndex { inner: self.inner.dual().map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Index{}", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// `a_0..a_order` of the modified expansion, or the raw q-series with `raw=True`.
#[pyfunction]
#[pyo3(signature = (index, order = 13, raw = false))]
fn expand<'py>(py: Python<'py>, index: &Bound<'py, PyAny>, order: usize, raw: bool) -> PyResult<Bound<'py, PyAny>> {
    let k = to_index(index)?;
    let kind = if raw { Kind::Raw } else { Kind::Modified };
    let s = py.detach(|| Expander::global().get(&k, kind, order)).map_err(err)?;
    if raw {
        fractions(py, &s)?.into_pyobject(py).map(|l| l.into_any())
    } else {
        integers(&s)?.into_pyobject(py).map(|l| l.into_any())
    }
}

#[pyclass(name = "VerificationReport", frozen, skip_from_py_object)]
struct PyReport {
    #[pyo3(get)]
    statement: String,
    #[pyo3(get)]
    index: String,
    #[pyo3(get)]
    l: Option<u32>,
    #[pyo3(get)]
    order: usize,
    #[pyo3(get)]
    passed: bool,
    /// `(n, str(coefficient))` of the first nonzero residual term.
    #[pyo3(get)]
    first_failure: Option<(usize, String)>,
}

#[pymethods]
impl PyReport {
    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __repr__(&self) -> String {
        let l = self.l.map(|l| format!(" l={l}")).unwrap_or_default();
        format!("<{} {}{l} through q^{}: {}>", self.statement, self.index, self.order, if self.passed { "pass" } else { "FAIL" })
    }
}

impl From<CoreReport> for PyReport {
    fn from(r: CoreReport) -> Self {
        PyReport {
            statement: format!("{:?}", r.statement),
            index: r.index.to_string(),
            l: r.l,
            order: r.trunc,
            passed: r.passed,
            first_failure: r.first_failure().map(|(n, c)| (n, c.to_string())),
        }
    }
}

#[pyfunction]
#[pyo3(signature = (index, order = 40))]
fn verify_cyclic(py: Python<'_>, index: &Bound<'_, PyAny>, order: usize) -> PyResult<PyReport> {
    let k = to_index(index)?;
    Ok(py.detach(|| relations::verify_cyclic(&k, order)).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (index, order = 40))]
fn verify_cyclic_lemma(py: Python<'_>, index: &Bound<'_, PyAny>, order: usize) -> PyResult<PyReport> {
    let k = to_index(index)?;
    Ok(py.detach(|| relations::verify_cyclic_lemma(&k, order)).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (index, l = 0, order = 40))]
fn verify_ohno(py: Python<'_>, index: &Bound<'_, PyAny>, l: u32, order: usize) -> PyResult<PyReport> {
    let k = to_index(index)?;
    Ok(py.detach(|| relations::verify_ohno(&k, l, order)).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (index, order = 40))]
fn verify_duality(py: Python<'_>, index: &Bound<'_, PyAny>, order: usize) -> PyResult<PyReport> {
    let k = to_index(index)?;
    Ok(py.detach(|| relations::verify_duality(&k, order)).map_err(err)?.into())
}

/// Checks the generating-function identity through weighted degree `k_max`.
#[pyfunction]
#[pyo3(signature = (k_max, order = 25, raw = false))]
fn verify_ohno_zagier(py: Python<'_>, k_max: usize, order: usize, raw: bool) -> PyResult<bool> {
    let kind = if raw { Kind::Raw } else { Kind::Modified };
    py.detach(|| genfun::verify_ohno_zagier(k_max, order, kind)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k_max = 5, terms = 8, order = 15))]
fn verify_qhyp_equation(py: Python<'_>, k_max: usize, terms: usize, order: usize) -> PyResult<bool> {
    py.detach(|| genfun::verify_qhyp_equation(k_max, terms, order)).map_err(err)
}

#[pyfunction]
fn rank_ak(py: Python<'_>, k: usize) -> PyResult<usize> {
    py.detach(|| ranklab::build_ak(k, 0).map(|m| ranklab::rank_exact(&m))).map_err(err)
}

#[pyfunction]
fn rank_a_le_k(py: Python<'_>, k: usize) -> PyResult<usize> {
    py.detach(|| ranklab::build_a_le_k(k).map(|m| ranklab::rank_exact(&m))).map_err(err)
}

/// `2^(k-2)` minus the rank of the cyclic-sum and Ohno relations of weight `k`.
#[pyfunction]
fn upper_bound(py: Python<'_>, k: usize) -> PyResult<usize> {
    py.detach(|| ranklab::upper_bound_from_relations(k)).map_err(err)
}

type Terms = Vec<(Vec<u32>, BigInt)>;

fn terms_of(r: &Relation) -> Terms {
    r.terms.iter().map(|(k, c)| (k.parts().to_vec(), c.clone())).collect()
}

#[pyclass(name = "MiningResult", frozen, skip_from_py_object)]
struct PyMining {
    inner: MiningResult,
}

#[pymethods]
impl PyMining {
    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    #[getter]
    fn kernel_dimension(&self) -> usize {
        self.inner.kernel_dimension
    }

    #[getter]
    fn rows_used(&self) -> usize {
        self.inner.rows_used
    }

    #[getter]
    fn columns(&self) -> Vec<Vec<u32>> {
        self.inner.columns.iter().map(|k| k.parts().to_vec()).collect()
    }

    /// `[(terms, verified_to)]` with `terms = [(parts, coeff)]`.
    #[getter]
    fn relations(&self) -> Vec<(Terms, usize)> {
        self.inner.relations.iter().map(|r| (terms_of(r), r.verified_to)).collect()
    }

    fn all_verified(&self) -> bool {
        self.inner.all_verified()
    }

    /// Whether `[(index, coeff), ...]` lies in the span of the mined relations.
    fn contains(&self, terms: Vec<(Bound<'_, PyAny>, i64)>) -> PyResult<bool> {
        let t = terms
            .iter()
            .map(|(k, c)| Ok((to_index(k)?, *c)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(self.inner.contains(&t))
    }

    /// The `q -> 1` limit of each relation: its top-weight terms.
    fn mzv_limits(&self) -> Vec<Terms> {
        self.inner
            .relations
            .iter()
            .map(|r| ranklab::mzv_limit(r).into_iter().map(|(k, c)| (k.parts().to_vec(), c)).collect())
            .collect()
    }
}

/// Kernel of the weight-`k` coefficient matrix (all admissible weights
/// `2..=k` with `mixed=True`), each relation re-verified through `verify_order`.
#[pyfunction]
#[pyo3(signature = (k, verify_order, rows = None, mixed = false))]
fn mine(py: Python<'_>, k: usize, verify_order: usize, rows: Option<usize>, mixed: bool) -> PyResult<PyMining> {
    if k < 2 {
        return Err(err(qzeta_core::Error::WeightTooSmall(k)));
    }
    let cols = if mixed { (1usize << (k - 1)) - 1 } else { 1usize << (k - 2) };
    let rows = rows.unwrap_or_else(|| ranklab::default_rows(cols));
    let inner = py
        .detach(|| {
            if mixed {
                ranklab::mine_mixed_weight(k, rows, verify_order)
            } else {
                ranklab::mine_relations(k, rows, verify_order)
            }
        })
        .map_err(err)?;
    Ok(PyMining { inner })
}

#[pyclass(name = "Numeric", frozen, skip_from_py_object)]
struct PyNumeric {
    /// Decimal string at the working precision.
    #[pyo3(get)]
    value: String,
    #[pyo3(get)]
    tail_bound: f64,
    #[pyo3(get)]
    terms_used: usize,
}

#[pymethods]
impl PyNumeric {
    fn __float__(&self) -> f64 {
        self.value.parse().unwrap_or(f64::NAN)
    }

    fn __repr__(&self) -> String {
        format!("<{} ± {:.1e}>", self.value, self.tail_bound)
    }
}

impl From<NumericResult> for PyNumeric {
    fn from(r: NumericResult) -> Self {
        PyNumeric { value: r.value.to_string(), tail_bound: r.tail_bound, terms_used: r.terms_used }
    }
}

#[pyfunction]
#[pyo3(signature = (index, eps = 1e-12))]
fn mzv(py: Python<'_>, index: &Bound<'_, PyAny>, eps: f64) -> PyResult<PyNumeric> {
    let k = to_index(index)?;
    Ok(py.detach(|| numeric::eval_mzv(&k, eps)).map_err(err)?.into())
}

#[pyfunction]
#[pyo3(signature = (index, q, eps = 1e-12))]
fn qmzv(py: Python<'_>, index: &Bound<'_, PyAny>, q: f64, eps: f64) -> PyResult<PyNumeric> {
    let k = to_index(index)?;
    Ok(py.detach(|| numeric::eval_qmzv(&k, q, eps)).map_err(err)?.into())
}

/// Whether `sum c_i zeta(k_i)` vanishes within `eps`.
#[pyfunction]
#[pyo3(signature = (terms, eps = 1e-8))]
fn check_mzv_relation(py: Python<'_>, terms: Vec<(Bound<'_, PyAny>, i64)>, eps: f64) -> PyResult<bool> {
    let t = terms
        .iter()
        .map(|(k, c)| Ok((to_index(k)?, *c)))
        .collect::<PyResult<Vec<_>>>()?;
    py.detach(|| numeric::check_mzv_relation(&t, eps)).map_err(err)
}

#[pymodule]
fn qzeta(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIndex>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyMining>()?;
    m.add_class::<PyNumeric>()?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cyclic, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cyclic_lemma, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ohno, m)?)?;
    m.add_function(wrap_pyfunction!(verify_duality, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ohno_zagier, m)?)?;
    m.add_function(wrap_pyfunction!(verify_qhyp_equation, m)?)?;
    m.add_function(wrap_pyfunction!(rank_ak, m)?)?;
    m.add_function(wrap_pyfunction!(rank_a_le_k, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(mzv, m)?)?;
    m.add_function(wrap_pyfunction!(qmzv, m)?)?;
    m.add_function(wrap_pyfunction!(check_mzv_relation, m)?)?;
    m.add("ENGINE_VERSION", qzeta_core::cli::ENGINE_VERSION)?;
    Ok(())
}
