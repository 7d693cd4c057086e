//! Python bindings: Witt vectors, lattice counts, KL and LV polynomials,
//! and the verification reports as plain dicts.

use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyOSError, PyValueError};
use pyo3::prelude::*;

use wittgr::adlv::{self, BSpec};
use wittgr::counts::CountQuery;
use wittgr::weyl::{affine, kl, lv, CoxeterGroup, Twist};
use wittgr::{gl2, satake, witt, Coweight, Error, GaloisRing, RingKind};

fn err(e: Error) -> PyErr {
    match e {
        Error::Precision(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Any serializable report as nested dicts and lists.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn kind(s: &str) -> PyResult<RingKind> {
    s.parse().map_err(err)
}

fn cw(v: Vec<i64>) -> Coweight {
    Coweight::new(v)
}

/// Truncated Witt vector over `F_{p^r}`, given by Witt coordinates.
#[pyclass(name = "WittVector", module = "wittgr", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyWittVector {
    inner: witt::WittVector,
}

#[pymethods]
impl PyWittVector {
    #[new]
    #[pyo3(signature = (p, h, coords, r = 1))]
    fn new(p: u32, h: u32, coords: Vec<u32>, r: u32) -> PyResult<Self> {
        let ring = GaloisRing::new(p, r, h).map_err(err)?;
        Ok(PyWittVector { inner: witt::WittVector::from_coords(&ring, &coords).map_err(err)? })
    }

    /// The image of an integer under `Z -> W_h(F_p)`.
    #[staticmethod]
    #[pyo3(signature = (p, h, n, r = 1))]
    fn from_int(p: u32, h: u32, n: i64, r: u32) -> PyResult<Self> {
        let ring = GaloisRing::new(p, r, h).map_err(err)?;
        Ok(PyWittVector { inner: witt::WittVector::from_int(&ring, n) })
    }

    #[staticmethod]
    #[pyo3(signature = (p, h, x, r = 1))]
    fn teichmuller(p: u32, h: u32, x: u32, r: u32) -> PyResult<Self> {
        let ring = GaloisRing::new(p, r, h).map_err(err)?;
        Ok(PyWittVector { inner: witt::WittVector::teichmuller(&ring, x) })
    }

    #[getter]
    fn coords(&self) -> Vec<u32> {
        self.inner.coords()
    }

    /// Teichmüller digits `d_i` with `a = sum p^i [d_i]`.
    #[getter]
    fn digits(&self) -> Vec<u32> {
        self.inner.digits()
    }

    #[getter]
    fn valuation(&self) -> u32 {
        self.inner.valuation()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyWittVector { inner: self.inner.add(&other.inner).map_err(err)? })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyWittVector { inner: self.inner.sub(&other.inner).map_err(err)? })
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(PyWittVector { inner: self.inner.mul(&other.inner).map_err(err)? })
    }

    fn __neg__(&self) -> Self {
        PyWittVector { inner: self.inner.neg() }
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyWittVector { inner: self.inner.inverse().map_err(err)? })
    }

    fn frobenius(&self) -> Self {
        PyWittVector { inner: self.inner.frobenius() }
    }

    fn verschiebung(&self) -> Self {
        PyWittVector { inner: self.inner.verschiebung() }
    }

    fn __repr__(&self) -> String {
        format!("WittVector({:?})", self.inner.coords())
    }
}

#[pyfunction]
fn verify_famous_identity(p: u32, h: u32) -> PyResult<bool> {
    witt::verify_famous_identity(p, h).map_err(err)
}

fn query_count(q: CountQuery, field: u64, k: &str) -> PyResult<u64> {
    q.count(kind(k)?, field).map_err(err)
}

/// `|Gr_mu(F_q)|`, or `|Gr_{<=mu}(F_q)|` with `leq`.
#[pyfunction]
#[pyo3(signature = (mu, q, leq = false, kind = "mixed"))]
fn count_cell(mu: Vec<i64>, q: u64, leq: bool, kind: &str) -> PyResult<u64> {
    let mu = cw(mu);
    query_count(if leq { CountQuery::Leq { mu } } else { CountQuery::Cell { mu } }, q, kind)
}

/// `|S_lambda ∩ Gr_mu(F_q)|`, or with the closure under `leq`.
#[pyfunction]
#[pyo3(signature = (lam, mu, q, leq = false, kind = "mixed"))]
fn count_mv(lam: Vec<i64>, mu: Vec<i64>, q: u64, leq: bool, kind: &str) -> PyResult<u64> {
    let (lambda, mu) = (cw(lam), cw(mu));
    query_count(if leq { CountQuery::MvLeq { lambda, mu } } else { CountQuery::Mv { lambda, mu } }, q, kind)
}

#[pyfunction]
#[pyo3(signature = (steps, q, kind = "mixed"))]
fn count_chain(steps: Vec<Vec<i64>>, q: u64, kind: &str) -> PyResult<u64> {
    query_count(CountQuery::Chain { steps: steps.into_iter().map(cw).collect() }, q, kind)
}

#[pyfunction]
#[pyo3(signature = (steps, lam, q, kind = "mixed"))]
fn count_fiber(steps: Vec<Vec<i64>>, lam: Vec<i64>, q: u64, kind: &str) -> PyResult<u64> {
    query_count(CountQuery::Fiber { steps: steps.into_iter().map(cw).collect(), lambda: cw(lam) }, q, kind)
}

/// Coefficients (constant term first) of `|Gr_mu(F_q)|` as a polynomial in `q`.
#[pyfunction]
#[pyo3(signature = (mu, kind = "mixed"))]
fn cell_polynomial(mu: Vec<i64>, kind: &str) -> PyResult<Vec<i64>> {
    let k = self::kind(kind)?;
    Ok(CountQuery::Cell { mu: cw(mu) }.polynomial(k).map_err(err)?.to_coeffs())
}

/// Memoized KL polynomials of one Coxeter group, e.g. `affine-a2` or `B3`.
#[pyclass(name = "KlTable", module = "wittgr")]
struct PyKlTable {
    table: kl::KlTable,
}

#[pymethods]
impl PyKlTable {
    #[new]
    fn new(type_name: &str) -> PyResult<Self> {
        Ok(PyKlTable { table: kl::KlTable::new(CoxeterGroup::from_name(type_name).map_err(err)?) })
    }

    /// `P_{y,w}`; elements are words such as `"0,1,0"`, `"0,1;tau=1"` or
    /// windows `"[0,3]"`.
    fn polynomial(&mut self, y: &str, w: &str) -> PyResult<Vec<i64>> {
        let g = self.table.group().clone();
        let (y, w) = (g.parse_element(y).map_err(err)?, g.parse_element(w).map_err(err)?);
        Ok(self.table.polynomial(&y, &w).map_err(err)?.to_coeffs())
    }

    fn mu(&mut self, y: &str, w: &str) -> PyResult<i64> {
        let g = self.table.group().clone();
        let (y, w) = (g.parse_element(y).map_err(err)?, g.parse_element(w).map_err(err)?);
        self.table.mu(&y, &w).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.table.len()
    }
}

/// `P^sigma_{y,w}` for the identity twist or `affine:K`.
#[pyfunction]
#[pyo3(signature = (type_name, y, w, twist = "id"))]
fn lv_polynomial(type_name: &str, y: &str, w: &str, twist: &str) -> PyResult<Vec<i64>> {
    let g = CoxeterGroup::from_name(type_name).map_err(err)?;
    let t = match twist.strip_prefix("affine:") {
        Some(k) => Twist::Affine { k: k.parse().map_err(|_| PyValueError::new_err(format!("bad twist '{twist}'")))? },
        None if twist == "id" => Twist::Identity,
        None => return Err(PyValueError::new_err(format!("unknown twist '{twist}'"))),
    };
    let mut table = lv::LvTable::new(g.clone(), t).map_err(err)?;
    let (y, w) = (g.parse_element(y).map_err(err)?, g.parse_element(w).map_err(err)?);
    Ok(table.polynomial(&y, &w).map_err(err)?.to_coeffs())
}

#[pyfunction]
fn verify_minus_q<'py>(py: Python<'py>, type_name: &str, len_cap: usize) -> PyResult<Bound<'py, PyAny>> {
    let g = CoxeterGroup::from_name(type_name).map_err(err)?;
    to_py(py, &affine::verify_minus_q(&g, len_cap).map_err(err)?)
}

/// Lusztig–Kato polynomials `P_{mu,nu}(v)` for every dominant `nu <= mu`.
#[pyfunction]
#[pyo3(signature = (mu, kind = "mixed"))]
fn lusztig_kato<'py>(py: Python<'py>, mu: Vec<i64>, kind: &str) -> PyResult<Bound<'py, PyAny>> {
    let m = satake::lusztig_kato_expand(&cw(mu), self::kind(kind)?).map_err(err)?;
    let rows: Vec<(Coweight, Vec<i64>)> = m.into_iter().map(|(k, v)| (k, v.to_coeffs())).collect();
    to_py(py, &rows)
}

#[pyfunction]
fn kostka_foulkes(mu: Vec<i64>, lam: Vec<i64>) -> PyResult<Vec<i64>> {
    Ok(satake::kostka_foulkes_charge(&cw(mu), &cw(lam)).map_err(err)?.to_coeffs())
}

/// Affine KL polynomials at `d_lambda, d_mu` next to charge Kostka–Foulkes.
#[pyfunction]
fn kl_kostka_report<'py>(py: Python<'py>, mu: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &satake::kl_kostka_report(&cw(mu)).map_err(err)?)
}

#[pyfunction]
fn weight_multiplicity(mu: Vec<i64>, lam: Vec<i64>) -> PyResult<i64> {
    satake::weight_multiplicity(&cw(mu), &cw(lam)).map_err(err)
}

fn sigma(b: &str, p: u32, mu: &Coweight) -> PyResult<adlv::SigmaClass> {
    let spec: BSpec = b.parse().map_err(err)?;
    spec.resolve(p, mu.rank(), mu).map_err(err)
}

/// Newton slopes of `b` as strings such as `"1/2"`.
#[pyfunction]
#[pyo3(signature = (b, n, p = 2))]
fn newton_point(b: &str, n: usize, p: u32) -> PyResult<Vec<String>> {
    let nu = sigma(b, p, &Coweight::zero(n))?.newton_point(p).map_err(err)?;
    Ok(nu.0.iter().map(|x| x.to_string()).collect())
}

#[pyfunction]
#[pyo3(signature = (b, n, p = 2))]
fn defect(b: &str, n: usize, p: u32) -> PyResult<i64> {
    Ok(adlv::defect(&sigma(b, p, &Coweight::zero(n))?.newton_point(p).map_err(err)?))
}

/// Fitted and formula dimension of `X_mu(b)` over `r = 1..=r_max`.
#[pyfunction]
#[pyo3(signature = (b, mu, p = 2, r_max = 5))]
fn dimension_report<'py>(py: Python<'py>, b: &str, mu: Vec<i64>, p: u32, r_max: u32) -> PyResult<Bound<'py, PyAny>> {
    let mu = cw(mu);
    let b = sigma(b, p, &mu)?;
    let grid: Vec<u32> = (1..=r_max).collect();
    let rep = py.detach(|| adlv::dimension_report(p, &b, &mu, &grid, None)).map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (q, trials = 1000, seed = 2024))]
fn b3_suite<'py>(py: Python<'py>, q: u64, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let chart = gl2::Chart::new(q).map_err(err)?;
    to_py(py, &chart.suite(trials, seed).map_err(err)?)
}

#[pyfunction]
fn quotient_check<'py>(py: Python<'py>, q: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &gl2::quotient_count_check(q).map_err(err)?)
}

#[pymodule]
pub fn _wittgr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWittVector>()?;
    m.add_class::<PyKlTable>()?;
    m.add_function(wrap_pyfunction!(verify_famous_identity, m)?)?;
    m.add_function(wrap_pyfunction!(count_cell, m)?)?;
    m.add_function(wrap_pyfunction!(count_mv, m)?)?;
    m.add_function(wrap_pyfunction!(count_chain, m)?)?;
    m.add_function(wrap_pyfunction!(count_fiber, m)?)?;
    m.add_function(wrap_pyfunction!(cell_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(lv_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(verify_minus_q, m)?)?;
    m.add_function(wrap_pyfunction!(lusztig_kato, m)?)?;
    m.add_function(wrap_pyfunction!(kostka_foulkes, m)?)?;
    m.add_function(wrap_pyfunction!(kl_kostka_report, m)?)?;
    m.add_function(wrap_pyfunction!(weight_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(newton_point, m)?)?;
    m.add_function(wrap_pyfunction!(defect, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_report, m)?)?;
    m.add_function(wrap_pyfunction!(b3_suite, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_check, m)?)?;
    Ok(())
}
