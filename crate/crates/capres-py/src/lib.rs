//! Python bindings: test functions, dilation transforms, the O(1,1) and
//! SL(2,ℝ) resolvents, and the experiment runner.
//!
//! Build with `cargo build --release -p capres-py --features extension-module`
//! and copy `libcapres_py.so` to `capres.so` on the Python path.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use capres::cli::config::{Experiment, ExperimentConfig};
use capres::cli::run_experiment as run_cli_experiment;
use capres::mellin;
use capres::numerics::{self, QuadratureConfig};
use capres::o11_rep;
use capres::o11_resolvent;
use capres::sl2::group::{stable_range_table, StableRangeGroup};
use capres::sl2::{ModelConfig, ModelResolvent as CoreModel};
use capres::Error;

type C64 = Complex64;

create_exception!(capres, CapresError, PyException, "Numerical failure inside capres.");

fn to_py(err: Error) -> PyErr {
    match err {
        Error::InvalidConfig(_) | Error::InvalidSupport(_) | Error::DomainError(_) => {
            PyValueError::new_err(err.to_string())
        }
        other => CapresError::new_err(other.to_string()),
    }
}

/// A compactly supported smooth function on ℝ² \ {0}.
#[pyclass(name = "TestFunction", module = "capres", frozen, skip_from_py_object)]
#[derive(Clone)]
struct TestFunction {
    inner: numerics::TestFunction2D,
}

#[pymethods]
impl TestFunction {
    /// Radial bump centred on the circle of radius `r0`, of half-width `width`.
    #[staticmethod]
    fn radial_bump(r0: f64, width: f64) -> PyResult<Self> {
        numerics::make_bump_radial(r0, width).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Bump of radius `radius` centred at `(x, y)`.
    #[staticmethod]
    fn bump_at(x: f64, y: f64, radius: f64) -> PyResult<Self> {
        numerics::make_bump_at([x, y], radius).map(|inner| Self { inner }).map_err(to_py)
    }

    /// Value at `(x, y)`.
    fn __call__(&self, x: f64, y: f64) -> C64 {
        self.inner.value([x, y])
    }

    /// Product with `cos(kθ)`.
    fn times_cos(&self, k: i64) -> Self {
        Self { inner: self.inner.times_cos(k) }
    }

    /// Product with `e^{ikθ}`.
    fn times_mode(&self, k: i64) -> Self {
        Self { inner: self.inner.times_mode(k) }
    }

    /// Multiplication by a complex constant.
    fn scaled(&self, c: C64) -> Self {
        Self { inner: self.inner.scaled(c) }
    }

    /// Sum of two test functions.
    fn plus(&self, other: &TestFunction) -> Self {
        Self { inner: self.inner.plus(&other.inner) }
    }

    /// Even part under `w ↦ −w`.
    fn even_part(&self) -> Self {
        Self { inner: self.inner.even_part() }
    }

    /// Odd part under `w ↦ −w`.
    fn odd_part(&self) -> Self {
        Self { inner: self.inner.odd_part() }
    }

    /// `(inner, outer)` radii of the supporting annulus.
    #[getter]
    fn support(&self) -> (f64, f64) {
        (self.inner.support_inner(), self.inner.support_outer())
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.support();
        format!("TestFunction(support={a}..{b}, parity={:?})", self.inner.parity())
    }
}

/// Angular coefficients of the dilation transform of a test function.
#[pyclass(name = "MellinTable", module = "capres", frozen)]
struct MellinTable {
    inner: mellin::MellinTable,
}

#[pymethods]
impl MellinTable {
    #[new]
    #[pyo3(signature = (v, k_max = 8))]
    fn new(v: &TestFunction, k_max: usize) -> Self {
        Self { inner: mellin::MellinTable::new(&v.inner, k_max) }
    }

    /// Homogeneous component `v_λ(x, y)`.
    fn component(&self, lam: C64, x: f64, y: f64) -> C64 {
        self.inner.component(lam).value([x, y])
    }

    /// Angular coefficients `c_k(λ)`, `k = −k_max..k_max`.
    fn coefficients(&self, lam: C64) -> Vec<C64> {
        let comp = self.inner.component(lam);
        let k = self.inner.k_max() as i64;
        (-k..=k).map(|j| comp.coeff(j)).collect()
    }

    /// Reconstruction `(1/2π)∫_{−Λ}^{Λ} v_λ(x, y) dλ`.
    fn invert(&self, x: f64, y: f64, lambda_cutoff: f64) -> PyResult<C64> {
        let cfg = QuadratureConfig::default().with_tolerances(1e-12, 1e-10);
        mellin::mellin_invert(|l| Ok(self.inner.component(C64::new(l, 0.0))), [x, y], lambda_cutoff, &cfg)
            .map_err(to_py)
    }
}

/// Spectral-side inner product `⟨u, v⟩` truncated at `lambda_cutoff`.
#[pyfunction]
#[pyo3(signature = (u, v, k_max = 8, lambda_cutoff = 640.0))]
fn plancherel_pair(u: &TestFunction, v: &TestFunction, k_max: usize, lambda_cutoff: f64) -> PyResult<C64> {
    let cfg = QuadratureConfig::default().with_tolerances(1e-12, 1e-10);
    mellin::plancherel_pair(&u.inner, &v.inner, k_max, lambda_cutoff, &cfg).map_err(to_py)
}

/// Direct polar quadrature of `⟨u, v⟩`.
#[pyfunction]
#[pyo3(signature = (u, v, theta_nodes = 512))]
fn direct_inner_product(u: &TestFunction, v: &TestFunction, theta_nodes: usize) -> PyResult<C64> {
    mellin::direct_inner_product(&u.inner, &v.inner, theta_nodes, &QuadratureConfig::default()).map_err(to_py)
}

/// Resolvent pairing `⟨(C⁺ − z²)⁻¹u, v⟩` of the O(1,1) Capelli operator.
#[pyclass(name = "O11Resolvent", module = "capres", frozen)]
struct O11Resolvent {
    inner: o11_resolvent::ResolventPairing,
}

#[pymethods]
impl O11Resolvent {
    #[new]
    #[pyo3(signature = (u, v, k_max = 8))]
    fn new(u: &TestFunction, v: &TestFunction, k_max: usize) -> PyResult<Self> {
        o11_resolvent::ResolventPairing::new(&u.inner, &v.inner, k_max, &QuadratureConfig::default())
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Resolvent for `Im z > 0`.
    fn direct(&self, z: C64) -> PyResult<C64> {
        o11_resolvent::resolvent_pair(&self.inner, z).map_err(to_py)
    }

    /// Continuation to `Im z > −n`.
    fn continued(&self, z: C64, n: f64) -> PyResult<C64> {
        o11_resolvent::continued_resolvent(&self.inner, z, n).map_err(to_py)
    }

    /// `(contour, closed_form)` residue at `z = 0`.
    #[pyo3(signature = (n = 2.0))]
    fn residue_at_zero(&self, n: f64) -> PyResult<(C64, C64)> {
        o11_resolvent::residue_at_zero(&self.inner, n, &QuadratureConfig::default())
            .map(|r| (r.contour, r.closed_form))
            .map_err(to_py)
    }
}

/// Even Paley–Wiener function: Fourier transform of a smooth bump.
#[pyclass(name = "EvenPW", module = "capres", frozen, skip_from_py_object)]
#[derive(Clone)]
struct EvenPW {
    inner: numerics::EvenPWFunction,
}

#[pymethods]
impl EvenPW {
    #[new]
    fn new(bump_halfwidth: f64) -> PyResult<Self> {
        numerics::make_even_pw(bump_halfwidth).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __call__(&self, lam: C64) -> C64 {
        self.inner.value(lam)
    }

    /// Exponential type.
    #[getter]
    fn type_bound(&self) -> f64 {
        self.inner.type_bound()
    }
}

/// SL(2,ℝ) model resolvent built from two channel functions.
#[pyclass(name = "ModelResolvent", module = "capres", frozen)]
struct ModelResolvent {
    inner: CoreModel,
}

#[pymethods]
impl ModelResolvent {
    #[new]
    #[pyo3(signature = (f0, f1, tail = 1e-13, max_cutoff = 2560.0))]
    fn new(f0: &EvenPW, f1: &EvenPW, tail: f64, max_cutoff: f64) -> PyResult<Self> {
        let cfg = ModelConfig { tail, max_cutoff, ..ModelConfig::default() };
        CoreModel::new(f0.inner.clone(), f1.inner.clone(), cfg)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Resolvent for `Im z > 0`.
    fn direct(&self, z: C64) -> PyResult<C64> {
        self.inner.direct(z).map_err(to_py)
    }

    /// Continuation to `Im z > −l` (`l` not an integer).
    fn continued(&self, z: C64, l: f64) -> PyResult<C64> {
        self.inner.continued(z, l).map_err(to_py)
    }

    /// Residue at `z = −n i` from a contour integral.
    fn residue(&self, n: u32, l: f64) -> PyResult<C64> {
        self.inner.residue(n, l).map_err(to_py)
    }

    /// Residue at `z = −n i` from the channel functions.
    fn residue_closed_form(&self, n: u32) -> C64 {
        self.inner.residue_closed_form(n)
    }

    /// Poles in `−l < Im z ≤ 0` as `(z0, residue)` pairs.
    fn locate_resonances(&self, l: f64) -> PyResult<Vec<(C64, C64)>> {
        self.inner
            .locate_resonances(l)
            .map(|rs| rs.into_iter().map(|r| (r.z0, r.residue)).collect())
            .map_err(to_py)
    }
}

/// Closed form of the Lipschitz–Hankel integral for the circle mode `k`.
#[pyfunction]
fn s_mode_closed_form(k: i64, t: f64, r: f64) -> C64 {
    o11_rep::s_mode_closed_form(k, t, r)
}

/// Eigenvalue of the element `s` on the circle mode `k` (±1).
#[pyfunction]
fn s_mode_eigenvalue(k: i64) -> i8 {
    o11_rep::apply_s_mode(k)
}

/// Bessel function `J_k(x)`.
#[pyfunction]
fn bessel_j(k: i32, x: f64) -> f64 {
    numerics::bessel_j(k, x)
}

/// `(numerator, denominator)` of an exact rational.
type Fraction = (i64, i64);

/// Stable-range row `(r − 1, λ_max, condition)` as exact `(num, den)` pairs.
#[pyfunction]
#[pyo3(signature = (group, rank, partner))]
fn stable_range(group: &str, rank: u32, partner: u32) -> PyResult<(Fraction, Fraction, bool)> {
    let g = match group {
        "sp2n" => StableRangeGroup::Sp2n { n: rank, p: partner },
        "opp" => StableRangeGroup::Opp { p: rank, n: partner },
        other => return Err(PyValueError::new_err(format!("group must be 'sp2n' or 'opp', got {other:?}"))),
    };
    let row = stable_range_table(g).map_err(to_py)?;
    let (r, l) = (row.r_minus_1, row.lambda_max);
    Ok(((*r.numer(), *r.denom()), (*l.numer(), *l.denom()), row.condition_holds))
}

/// Runs an experiment and returns its records as dictionaries.
///
/// `config` is TOML text in the command-line configuration format.
#[pyfunction]
#[pyo3(signature = (experiment, config = ""))]
fn run_experiment<'py>(py: Python<'py>, experiment: &str, config: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let exp = Experiment::from_name(experiment)
        .ok_or_else(|| PyValueError::new_err(format!("unknown experiment {experiment:?}")))?;
    let cfg = ExperimentConfig::from_toml(exp, config).map_err(to_py)?;
    let outcome = py.detach(|| run_cli_experiment(&cfg));
    outcome
        .records
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", &r.name)?;
            d.set_item("computed", r.computed)?;
            d.set_item("expected", r.expected)?;
            d.set_item("abs_err", r.abs_err)?;
            d.set_item("rel_err", r.rel_err)?;
            d.set_item("runtime_ms", r.runtime_ms)?;
            d.set_item("provenance", r.provenance.tag())?;
            d.set_item("passed", r.passed)?;
            d.set_item("note", &r.note)?;
            Ok(d)
        })
        .collect()
}

/// Names of the available experiments.
#[pyfunction]
fn experiments() -> Vec<&'static str> {
    Experiment::ALL.iter().map(|e| e.name()).collect()
}

#[pymodule]
#[pyo3(name = "capres")]
fn capres_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CapresError", m.py().get_type::<CapresError>())?;
    m.add_class::<TestFunction>()?;
    m.add_class::<MellinTable>()?;
    m.add_class::<O11Resolvent>()?;
    m.add_class::<EvenPW>()?;
    m.add_class::<ModelResolvent>()?;
    m.add_function(wrap_pyfunction!(plancherel_pair, m)?)?;
    m.add_function(wrap_pyfunction!(direct_inner_product, m)?)?;
    m.add_function(wrap_pyfunction!(s_mode_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(s_mode_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(stable_range, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(experiments, m)?)?;
    Ok(())
}
