//! Python bindings: matrices cross the boundary as lists of rows of ints.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gcsa_core::cost::{self, Scheme, SweepAxis};
use gcsa_core::gcsa::{self, Answer, NoiseBundle, ParamSpec, SchemeParams};
use gcsa_core::rng::{stream_rng, Stream};
use gcsa_core::sim::{self, SimConfig};
use gcsa_core::strassen::StrassenNa;
use gcsa_core::{verify, FieldMatrix, PrimeField};

create_exception!(gcsa_na, GcsaError, PyException);

fn err(e: gcsa_core::Error) -> PyErr {
    GcsaError::new_err(e.to_string())
}

fn to_matrix(field: PrimeField, rows: &[Vec<i64>]) -> PyResult<FieldMatrix> {
    FieldMatrix::from_signed(field, rows).map_err(err)
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(err)
}

#[allow(clippy::too_many_arguments)]
fn param_spec(
    servers: usize,
    security: usize,
    ell: usize,
    kc: usize,
    p: usize,
    m: usize,
    n: usize,
    lam: usize,
    kappa: usize,
    mu: usize,
) -> ParamSpec {
    ParamSpec {
        servers,
        security,
        ell,
        kc,
        p,
        m,
        n,
        lambda: lam,
        kappa,
        mu,
    }
}

/// A GCSA-NA instance with sequential evaluation points.
#[pyclass(name = "GcsaNa", frozen)]
struct PyGcsaNa {
    inner: gcsa::GcsaNa,
}

#[pymethods]
impl PyGcsaNa {
    #[new]
    #[pyo3(signature = (servers, security=1, ell=1, kc=1, p=1, m=1, n=1, lam=2, kappa=2, mu=2, modulus=65537))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        servers: usize,
        security: usize,
        ell: usize,
        kc: usize,
        p: usize,
        m: usize,
        n: usize,
        lam: usize,
        kappa: usize,
        mu: usize,
        modulus: u64,
    ) -> PyResult<Self> {
        let field = PrimeField::new(modulus).map_err(err)?;
        let spec = param_spec(servers, security, ell, kc, p, m, n, lam, kappa, mu);
        let params = SchemeParams::derive(spec, field).map_err(err)?;
        let inner = gcsa::GcsaNa::sequential(params).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn recovery_threshold(&self) -> usize {
        self.inner.params().recovery_threshold()
    }

    #[getter]
    fn servers(&self) -> usize {
        self.inner.params().servers()
    }

    /// Shares both batches, lets every non-straggler answer, and decodes.
    #[pyo3(signature = (a, b, stragglers=Vec::new(), seed=0))]
    fn multiply(
        &self,
        a: Vec<Vec<Vec<i64>>>,
        b: Vec<Vec<Vec<i64>>>,
        stragglers: Vec<usize>,
        seed: u64,
    ) -> PyResult<Vec<Vec<Vec<u64>>>> {
        let params = self.inner.params();
        let field = params.field();
        let a = a
            .iter()
            .map(|m| to_matrix(field, m))
            .collect::<PyResult<Vec<_>>>()?;
        let b = b
            .iter()
            .map(|m| to_matrix(field, m))
            .collect::<PyResult<Vec<_>>>()?;
        let (shares, _, _) = self
            .inner
            .make_shares(
                &a,
                &b,
                &mut stream_rng(seed, Stream::SourceA),
                &mut stream_rng(seed, Stream::SourceB),
            )
            .map_err(err)?;
        let bundle = NoiseBundle::generate(params, &mut stream_rng(seed, Stream::Server));
        let answers = shares
            .servers
            .iter()
            .enumerate()
            .map(|(s, share)| {
                if stragglers.contains(&s) {
                    return Ok(Answer::straggler(s));
                }
                let noise = self.inner.noise_share(&bundle, s)?;
                Ok(Answer::responsive(s, gcsa::server_answer(share, &noise)?))
            })
            .collect::<gcsa_core::Result<Vec<_>>>()
            .map_err(err)?;
        let products = self.inner.reconstruct(&answers).map_err(err)?;
        Ok(products.iter().map(FieldMatrix::to_rows).collect())
    }
}

/// Runs the simulator on a JSON config and returns the report as a dict.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyDict>> {
    let config = SimConfig::from_json(config_json).map_err(err)?;
    let out = sim::run_simulation(&config).map_err(err)?;
    let measured = cost::measured_costs(&out.trace).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("verdict", format!("{:?}", out.verdict).to_uppercase())?;
    dict.set_item(
        "products",
        out.products
            .iter()
            .map(FieldMatrix::to_rows)
            .collect::<Vec<_>>(),
    )?;
    dict.set_item("trace", from_json(py, &out.trace.to_json())?)?;
    let costs = serde_json::to_string(&measured).map_err(|e| GcsaError::new_err(e.to_string()))?;
    dict.set_item("costs", from_json(py, &costs)?)?;
    Ok(dict)
}

/// Closed-form costs; rationals come back as `(numerator, denominator)`.
#[pyfunction]
#[pyo3(signature = (scheme, servers, security=1, ell=1, kc=1, p=1, m=1, n=1, lam=2, kappa=2, mu=2))]
#[allow(clippy::too_many_arguments)]
fn theoretical_costs<'py>(
    py: Python<'py>,
    scheme: &str,
    servers: usize,
    security: usize,
    ell: usize,
    kc: usize,
    p: usize,
    m: usize,
    n: usize,
    lam: usize,
    kappa: usize,
    mu: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = param_spec(servers, security, ell, kc, p, m, n, lam, kappa, mu);
    let report = cost::theoretical_costs(&spec, parse_scheme(scheme)?).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("R", report.recovery_threshold)?;
    for (key, q) in [
        ("U_A", report.upload_a),
        ("U_B", report.upload_b),
        ("CC", report.server_comm),
        ("D", report.download),
    ] {
        dict.set_item(key, (*q.numer(), *q.denom()))?;
    }
    Ok(dict)
}

/// Cost sweep as CSV text.
#[pyfunction]
#[pyo3(signature = (axis, security=5, partition=2, batch=1, start=1, stop=8))]
fn sweep_csv(
    axis: &str,
    security: usize,
    partition: usize,
    batch: usize,
    start: usize,
    stop: usize,
) -> PyResult<String> {
    let axis: SweepAxis = axis.parse().map_err(err)?;
    let rows = cost::sweep(axis, security, partition, batch, start..=stop).map_err(err)?;
    let mut buf = Vec::new();
    cost::write_csv(&rows, &mut buf).map_err(err)?;
    String::from_utf8(buf).map_err(|e| GcsaError::new_err(e.to_string()))
}

/// Strassen variant with `servers` servers over GF(modulus).
#[pyfunction]
#[pyo3(signature = (a, b, servers=15, modulus=101, seed=0))]
fn strassen_multiply(
    a: Vec<Vec<i64>>,
    b: Vec<Vec<i64>>,
    servers: usize,
    modulus: u64,
    seed: u64,
) -> PyResult<Vec<Vec<u64>>> {
    let field = PrimeField::new(modulus).map_err(err)?;
    let na = StrassenNa::new(field, servers).map_err(err)?;
    let mut rng = stream_rng(seed, Stream::Server);
    let out = na
        .run(
            &to_matrix(field, &a)?,
            &to_matrix(field, &b)?,
            &[],
            &mut rng,
        )
        .map_err(err)?;
    Ok(out.product.to_rows())
}

/// `(name, passed, detail)` for each built-in suite.
#[pyfunction]
fn selftest() -> Vec<(String, bool, String)> {
    verify::selftest()
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
pub fn gcsa_na(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GcsaError", m.py().get_type::<GcsaError>())?;
    m.add_class::<PyGcsaNa>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_costs, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_csv, m)?)?;
    m.add_function(wrap_pyfunction!(strassen_multiply, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
