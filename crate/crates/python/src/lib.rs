//! Python bindings for `hardylab`.
//!
//! Structured inputs (models, specs, S-matrices, schemes) are passed as
//! JSON strings in the same formats the command-line tool reads.

use hardylab::ensemble_time::{self, PreparationScheme};
use hardylab::hardy_core::hilbert::{dispersion_residual, fit_dispersion_tail};
use hardylab::hardy_core::{self, AnalyticModel, CausalSignal, ComplexFunction, CriterionConfig, HalfPlane, SampledComplexFunction};
use hardylab::numerics::{Complex, QuadratureSpec};
use hardylab::quantum_states::{make_lorentzian_observable, make_lorentzian_state, LorentzianSpec};
use hardylab::transition::{self, AmplitudeOptions, SMatrixModel};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: hardylab::Error) -> PyErr {
    match e {
        hardylab::Error::Io(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json<T: serde::de::DeserializeOwned>(s: &str) -> PyResult<T> {
    serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn half_plane(s: &str) -> PyResult<HalfPlane> {
    match s {
        "upper" => Ok(HalfPlane::Upper),
        "lower" => Ok(HalfPlane::Lower),
        _ => Err(PyValueError::new_err(format!("half plane must be 'upper' or 'lower', got {s:?}"))),
    }
}

/// Closed-form transform of a causal signal, as model JSON.
#[pyfunction]
fn causal_transform(signal: &str) -> PyResult<String> {
    let sig: CausalSignal = json(signal)?;
    hardy_core::causal_transform(&sig).and_then(|m| m.to_json()).map_err(py_err)
}

/// Values of a model at real points, as `(re, im)` pairs.
#[pyfunction]
fn eval_model(model: &str, xs: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let m = AnalyticModel::from_json(model).map_err(py_err)?;
    Ok(xs.iter().map(|&x| m.eval(Complex::new(x, 0.0))).map(|v| (v.re, v.im)).collect())
}

/// `(values, passed)` of the Hardy line-integral criterion.
#[pyfunction]
fn hardy_criterion(model: &str, half: &str, offsets: Vec<f64>) -> PyResult<(Vec<f64>, bool)> {
    let m = AnalyticModel::from_json(model).map_err(py_err)?;
    let r = hardy_core::hardy_criterion(&ComplexFunction::Analytic(m), half_plane(half)?, &offsets, &CriterionConfig::default()).map_err(py_err)?;
    Ok((r.values, r.passed))
}

/// Dispersion round-trip residual of sampled boundary values.
#[pyfunction]
#[pyo3(signature = (x, re, im, half = "upper", tolerance = 1e-3))]
fn kk_residual(x: Vec<f64>, re: Vec<f64>, im: Vec<f64>, half: &str, tolerance: f64) -> PyResult<f64> {
    if re.len() != x.len() || im.len() != x.len() {
        return Err(PyValueError::new_err("x, re and im must have the same length"));
    }
    let values = re.iter().zip(&im).map(|(&a, &b)| Complex::new(a, b)).collect();
    let f = SampledComplexFunction::new(x, values, None).map_err(py_err)?;
    let tail = fit_dispersion_tail(&f).ok_or_else(|| PyValueError::new_err("no power-law decay found at the grid edges"))?;
    let f = f.with_tail(Some(tail)).map_err(py_err)?;
    dispersion_residual(&f, half_plane(half)?, &QuadratureSpec::adaptive(1e-6, tolerance)).map_err(py_err)
}

/// `P(t)` for Lorentzian observable and state specs under an S-matrix.
#[pyfunction]
#[pyo3(signature = (observable, state, times, smatrix = None))]
fn transition_probability(observable: &str, state: &str, times: Vec<f64>, smatrix: Option<&str>) -> PyResult<Vec<f64>> {
    let ob = make_lorentzian_observable(&json::<LorentzianSpec>(observable)?).map_err(py_err)?;
    let st = make_lorentzian_state(&json::<LorentzianSpec>(state)?).map_err(py_err)?;
    let s = match smatrix {
        Some(text) => SMatrixModel::from_json(text).map_err(py_err)?,
        None => SMatrixModel::unit(),
    };
    let r = transition::amplitude_curve(&ob, &st, &s, &times, &AmplitudeOptions::default()).map_err(py_err)?;
    Ok(r.iter().map(|a| a.p).collect())
}

/// `(rate, amplitude)` of a least-squares exponential on `[t_lo, t_hi]`.
#[pyfunction]
fn fit_decay_rate(ts: Vec<f64>, ps: Vec<f64>, t_lo: f64, t_hi: f64) -> PyResult<(f64, f64)> {
    let f = transition::fit_decay_rate(&ts, &ps, t_lo, t_hi).map_err(py_err)?;
    Ok((f.rate, f.amplitude))
}

/// Parameter times of a simulated exponential decay ensemble.
#[pyfunction]
#[pyo3(signature = (rate, n, seed, scheme = None))]
fn sample_decay_ensemble(rate: f64, n: usize, seed: u64, scheme: Option<&str>) -> PyResult<Vec<f64>> {
    let scheme = match scheme {
        Some(text) => json(text)?,
        None => PreparationScheme::Simultaneous { t0: 0.0 },
    };
    let recs = ensemble_time::sample_decay_ensemble(rate, n, &scheme, seed).map_err(py_err)?;
    Ok(recs.iter().map(|r| r.t_param).collect())
}

/// Empirical survival of registration pairs `(t_prep, t_reg)` on a grid.
#[pyfunction]
fn survival_curve(events: Vec<(f64, f64)>, grid: Vec<f64>) -> PyResult<Vec<f64>> {
    let recs = ensemble_time::map_to_parameter_time(&events).map_err(py_err)?;
    Ok(ensemble_time::survival_curve(&recs, &grid).map_err(py_err)?.survival)
}

#[pymodule]
fn pyhardylab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(causal_transform, m)?)?;
    m.add_function(wrap_pyfunction!(eval_model, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(kk_residual, m)?)?;
    m.add_function(wrap_pyfunction!(transition_probability, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_decay_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(survival_curve, m)?)?;
    Ok(())
}
