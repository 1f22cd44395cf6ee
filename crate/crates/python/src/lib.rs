//! Python module `wnv`: models, thresholds, free-boundary simulation and wave speeds.

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wnv_core::dynamics::{self, Thresholds};
use wnv_core::eigen;
use wnv_core::harness::{self, RunConfig};
use wnv_core::stefan::{self, DtPolicy, InitialProfile, SimControls};
use wnv_core::{wavespeed, Error, MuStarConvention, RawParams};

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: wnv_core::Model,
}

#[pymethods]
impl PyModel {
    /// Builds a model from a mapping with every key of `Model.KEYS`.
    #[new]
    fn new(params: &Bound<'_, PyDict>) -> PyResult<Self> {
        let mut raw = wnv_core::model::presets::low_transmission(0.0);
        for key in RawParams::KEYS {
            let value: f64 = params
                .get_item(key)?
                .ok_or_else(|| PyKeyError::new_err(format!("missing parameter `{key}`")))?
                .extract()?;
            *raw.get_mut(key).unwrap() = value;
        }
        for key in params.keys() {
            let key: String = key.extract()?;
            if raw.get(&key).is_none() {
                return Err(PyKeyError::new_err(format!("unknown parameter `{key}`")));
            }
        }
        Ok(Self {
            inner: wnv_core::Model::new(raw).map_err(py_err)?,
        })
    }

    /// Low-transmission preset with the given advection.
    #[staticmethod]
    #[pyo3(signature = (mu=0.0))]
    fn low_transmission(mu: f64) -> PyResult<Self> {
        let inner = wnv_core::Model::new(wnv_core::model::presets::low_transmission(mu)).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// High-transmission preset with the given advection.
    #[staticmethod]
    #[pyo3(signature = (mu=0.0))]
    fn high_transmission(mu: f64) -> PyResult<Self> {
        let inner = wnv_core::Model::new(wnv_core::model::presets::high_transmission(mu)).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[classattr]
    #[allow(non_snake_case)]
    fn KEYS() -> Vec<&'static str> {
        RawParams::KEYS.to_vec()
    }

    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for key in RawParams::KEYS {
            d.set_item(key, self.inner.raw.get(key).unwrap())?;
        }
        Ok(d)
    }

    fn derived<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py_json(py, &self.inner.derived)
    }

    /// Copy with one parameter replaced.
    fn with_param(&self, key: &str, value: f64) -> PyResult<Self> {
        let inner = self.inner.with_param(key, value).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// `(value, inner)` of the closed-form risk on `(left, right)`.
    #[pyo3(signature = (left, right, mu=None))]
    fn r0_closed_form(&self, left: f64, right: f64, mu: Option<f64>) -> PyResult<(f64, f64)> {
        let mu = mu.unwrap_or(self.inner.raw.advection);
        let r = self.inner.r0_closed_form(left, right, mu).map_err(py_err)?;
        Ok((r.value, r.inner))
    }

    fn initial_risk(&self) -> (f64, f64) {
        let r = self.inner.initial_risk();
        (r.value, r.inner)
    }

    #[pyo3(signature = (convention="definition"))]
    fn mu_star(&self, convention: &str) -> PyResult<f64> {
        let c: MuStarConvention = convention.parse().map_err(py_err)?;
        Ok(self.inner.mu_star(c))
    }

    fn endemic(&self) -> Option<(f64, f64)> {
        self.inner.endemic()
    }

    /// Numeric reproduction number on `(left, right)`.
    #[pyo3(signature = (left, right, n=401))]
    fn r0_numeric(&self, left: f64, right: f64, n: usize) -> PyResult<f64> {
        let mu = self.inner.raw.advection;
        Ok(eigen::r0_numeric(&self.inner, left, right, mu, n).map_err(py_err)?.value)
    }

    /// Principal eigenvalue of the linearized problem on `(left, right)`.
    #[pyo3(signature = (left, right, n=401))]
    fn lambda0(&self, left: f64, right: f64, n: usize) -> PyResult<f64> {
        let mu = self.inner.raw.advection;
        Ok(eigen::principal_lambda0(&self.inner, left, right, mu, n).map_err(py_err)?.value)
    }

    /// Free-boundary wave speed for expansion `nu` (the model's own by default).
    #[pyo3(signature = (nu=None, length=None, n=wavespeed::DEFAULT_POINTS))]
    fn wave_speed(&self, nu: Option<f64>, length: Option<f64>, n: usize) -> PyResult<f64> {
        let nu = nu.unwrap_or(self.inner.raw.expansion);
        let length = length.unwrap_or_else(|| wavespeed::default_length(&self.inner));
        Ok(wavespeed::c_nu(&self.inner, nu, length, n).map_err(py_err)?.c_nu)
    }

    /// Integrates the free-boundary problem from a cosine profile.
    #[pyo3(signature = (t_max, amp_u=None, amp_v=None, n_y=stefan::DEFAULT_NY, dt=None))]
    fn simulate(
        &self,
        t_max: f64,
        amp_u: Option<f64>,
        amp_v: Option<f64>,
        n_y: usize,
        dt: Option<f64>,
    ) -> PyResult<PyTrajectory> {
        let raw = &self.inner.raw;
        let profile = InitialProfile::Cosine {
            amp_u: amp_u.unwrap_or(0.1 * raw.capacity_birds),
            amp_v: amp_v.unwrap_or(0.1 * raw.capacity_mosquitoes),
        };
        let mut controls = SimControls::new(t_max);
        controls.n_y = n_y;
        if let Some(dt) = dt {
            controls.dt = DtPolicy::Fixed(dt);
        }
        let inner = stefan::simulate(&self.inner, &profile, &controls).map_err(py_err)?;
        Ok(PyTrajectory {
            inner,
            model: self.inner.clone(),
        })
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = RawParams::KEYS
            .iter()
            .map(|k| format!("{k}={}", self.inner.raw.get(k).unwrap()))
            .collect();
        format!("Model({})", parts.join(", "))
    }
}

#[pyclass(name = "Trajectory", frozen)]
struct PyTrajectory {
    inner: stefan::Trajectory,
    model: wnv_core::Model,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[getter]
    fn g(&self) -> Vec<f64> {
        self.inner.g.clone()
    }

    #[getter]
    fn h(&self) -> Vec<f64> {
        self.inner.h.clone()
    }

    #[getter]
    fn sup_u(&self) -> Vec<f64> {
        self.inner.sup_u.clone()
    }

    #[getter]
    fn sup_v(&self) -> Vec<f64> {
        self.inner.sup_v.clone()
    }

    #[getter]
    fn risk(&self) -> Vec<f64> {
        self.inner.risk.clone()
    }

    /// Verdict name and decision time under default thresholds.
    fn classify(&self) -> (String, Option<f64>) {
        let o = dynamics::classify(&self.inner, &self.model, &Thresholds::default());
        (o.verdict.to_string(), o.t_decided)
    }

    /// `(left_speed, right_speed)` fitted over the final part of the run.
    fn speeds(&self) -> PyResult<(f64, f64)> {
        let s = dynamics::spreading_speeds(&self.inner).map_err(py_err)?;
        Ok((s.left_speed, s.right_speed))
    }

    /// CSV text with the trajectory columns used by the CLI.
    fn to_csv(&self) -> String {
        harness::output::trajectory_csv(&self.inner)
    }
}

/// Runs a `key = value` configuration and returns its summary as a dict.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = RunConfig::parse(text).map_err(py_err)?;
    let report = py.detach(|| harness::run(&cfg)).map_err(py_err)?;
    to_py_json(py, &report.summary)
}

/// Threshold report for a configuration as a dict.
#[pyfunction]
fn thresholds<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = RunConfig::parse(text).map_err(py_err)?;
    let report = harness::report_thresholds(&cfg).map_err(py_err)?;
    to_py_json(py, &report)
}

/// Text of a bundled configuration (`vanishing`, `spreading`, `advection`).
#[pyfunction]
fn bundled_config(name: &str) -> PyResult<&'static str> {
    harness::BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| PyKeyError::new_err(format!("no bundled config `{name}`")))
}

#[pymodule]
fn wnv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(bundled_config, m)?)?;
    Ok(())
}
