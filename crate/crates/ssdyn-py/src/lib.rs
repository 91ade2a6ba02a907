//! Python bindings for `ssdyn`. Algorithms are named by spec strings such as
//! `"new2"`, `"gsse:0.8"` or `"gssi:0.5:0.2"`.

use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ssdyn::accuracy::{convergence_study, ExactProblem};
use ssdyn::problems::{sdof_case, van_der_pol, SdofKind, VanDerPol};
use ssdyn::spectral::{self, StabilityLimit};
use ssdyn::stepper::{integrate, NewtonOptions};
use ssdyn::system::{initial_state, LinearSystem, State, Trajectory, Variable};
use ssdyn::tables::{parse_spec, ButcherTable};

fn err(e: ssdyn::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn alg(spec: &str) -> PyResult<ButcherTable> {
    parse_spec(spec).map_err(err)
}

type Series = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn series(tr: &Trajectory, i: usize) -> Series {
    (
        tr.times(),
        tr.component(Variable::Displacement, i),
        tr.component(Variable::Velocity, i),
        tr.component(Variable::Acceleration, i),
    )
}

/// Table coefficients as a dict: name, label, p, alpha, classification.
#[pyfunction]
fn table<'py>(py: Python<'py>, spec: &str) -> PyResult<Bound<'py, PyDict>> {
    let t = alg(spec)?;
    let d = PyDict::new(py);
    d.set_item("name", &t.name)?;
    d.set_item("label", t.label())?;
    d.set_item("p", t.p)?;
    d.set_item("alpha", t.alpha.to_vec())?;
    d.set_item("classification", format!("{:?}", t.classification()))?;
    d.set_item("order_defect", t.order_condition_defect())?;
    Ok(d)
}

/// (rho, xibar, pe) at (ξ, Ω); xibar/pe are None without a complex pair.
#[pyfunction]
fn spectral_sample(
    spec: &str,
    xi: f64,
    omega_dt: f64,
) -> PyResult<(f64, Option<f64>, Option<f64>)> {
    let s = spectral::spectral_sample(&alg(spec)?, xi, omega_dt).map_err(err)?;
    Ok((s.rho, s.xibar, s.pe))
}

/// Ω_s at ξ; inf when unconditionally stable, 0 when the domain is empty.
#[pyfunction]
#[pyo3(signature = (spec, xi=0.0))]
fn stability_limit(spec: &str, xi: f64) -> PyResult<f64> {
    Ok(
        match spectral::stability_limit(&alg(spec)?, xi, 1e-12).map_err(err)? {
            StabilityLimit::Conditional(w) => w,
            StabilityLimit::Unconditional => f64::INFINITY,
            StabilityLimit::Empty => 0.0,
        },
    )
}

#[pyfunction]
#[pyo3(signature = (spec, xi=0.0))]
fn bifurcation_point(spec: &str, xi: f64) -> PyResult<Option<f64>> {
    spectral::bifurcation_point(&alg(spec)?, xi, 1e-10).map_err(err)
}

/// Integrates ü + 2ξωu̇ + ω²u = 0 and returns (t, u, v, a).
#[pyfunction]
#[pyo3(signature = (spec, xi, omega, u0, v0, dt, t_end))]
fn integrate_sdof(
    spec: &str,
    xi: f64,
    omega: f64,
    u0: f64,
    v0: f64,
    dt: f64,
    t_end: f64,
) -> PyResult<Series> {
    let sys = LinearSystem::sdof(xi, omega, |_| 0.0);
    let s0 = State::scalar(0.0, u0, v0, -2.0 * xi * omega * v0 - omega * omega * u0);
    let tr = integrate(&alg(spec)?, &sys, &s0, dt, t_end, NewtonOptions::default()).map_err(err)?;
    Ok(series(&tr, 0))
}

/// Van der Pol trajectory from x = 2, ẋ = 0.
#[pyfunction]
#[pyo3(signature = (spec, dt=0.005, t_end=30.0, mu=5.0, amp=5.0, omega_p=2.5))]
fn simulate_van_der_pol(
    spec: &str,
    dt: f64,
    t_end: f64,
    mu: f64,
    amp: f64,
    omega_p: f64,
) -> PyResult<Series> {
    let sys = van_der_pol(mu, amp, omega_p);
    let s0 = initial_state(
        &sys,
        0.0,
        DVector::from_element(1, VanDerPol::X0),
        DVector::from_element(1, VanDerPol::V0),
    )
    .map_err(err)?;
    let tr = integrate(&alg(spec)?, &sys, &s0, dt, t_end, NewtonOptions::default()).map_err(err)?;
    Ok(series(&tr, 0))
}

/// Relative global errors on a named SDOF case; returns a dict with
/// dts, err_u, err_v, err_a and the fitted slopes.
#[pyfunction]
fn convergence<'py>(
    py: Python<'py>,
    spec: &str,
    problem: &str,
    dts: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = SdofKind::parse(problem)
        .ok_or_else(|| PyValueError::new_err(format!("unknown problem `{problem}`")))?;
    let case = sdof_case(kind);
    let r = convergence_study(&alg(spec)?, &case, &dts).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("dts", r.dts)?;
    d.set_item("err_u", r.errors_u)?;
    d.set_item("err_v", r.errors_v)?;
    d.set_item("err_a", r.errors_a)?;
    d.set_item("slope_u", r.slope_u)?;
    d.set_item("slope_v", r.slope_v)?;
    d.set_item("slope_a", r.slope_a)?;
    d.set_item("t_end", case.t_end())?;
    Ok(d)
}

#[pymodule]
fn ssdyn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_sample, m)?)?;
    m.add_function(wrap_pyfunction!(stability_limit, m)?)?;
    m.add_function(wrap_pyfunction!(bifurcation_point, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_sdof, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_van_der_pol, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    Ok(())
}
