//! Global-error metric, convergence studies and a one-step error probe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::loglog_slope;
use crate::stepper::{integrate, step_linear, step_nonlinear, NewtonOptions};
use crate::system::{SecondOrderSystem, State};
use crate::tables::ButcherTable;

/// Errors at or below this are treated as round-off and left out of fits.
pub const ERROR_FLOOR: f64 = 1e-12;
/// Errors above this mark a run as diverged.
pub const DIVERGENCE: f64 = 1e6;

/// A problem with a known solution.
pub trait ExactProblem {
    fn system(&self) -> &dyn SecondOrderSystem;
    fn t0(&self) -> f64 {
        0.0
    }
    fn t_end(&self) -> f64;
    fn exact(&self, t: f64) -> State;
}

/// [Σ(x_exact − x)² / Σ x_exact²]^½.
pub fn global_error(numeric: &[f64], exact: &[f64]) -> Result<f64> {
    if numeric.len() != exact.len() || numeric.is_empty() {
        return Err(Error::Dimension {
            expected: exact.len(),
            got: numeric.len(),
        });
    }
    let den: f64 = exact.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(Error::InvalidArgument(
            "exact solution has zero norm".into(),
        ));
    }
    let num: f64 = numeric
        .iter()
        .zip(exact)
        .map(|(n, e)| (e - n).powi(2))
        .sum();
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub dts: Vec<f64>,
    pub errors_u: Vec<f64>,
    pub errors_v: Vec<f64>,
    /// Absent for tables without an acceleration update.
    pub errors_a: Option<Vec<f64>>,
    pub diverged: Vec<bool>,
    pub slope_u: f64,
    pub slope_v: f64,
    pub slope_a: Option<f64>,
}

fn fitted_slope(dts: &[f64], errs: &[f64], diverged: &[bool]) -> f64 {
    let (x, y): (Vec<f64>, Vec<f64>) = dts
        .iter()
        .zip(errs)
        .zip(diverged)
        .filter(|((_, e), d)| !**d && e.is_finite() && **e > ERROR_FLOOR)
        .map(|((h, e), _)| (*h, *e))
        .unzip();
    loglog_slope(&x, &y).unwrap_or(f64::NAN)
}

/// Integrates `problem` at every Δt and fits log-log slopes of the global errors.
pub fn convergence_study(
    tbl: &ButcherTable,
    problem: &dyn ExactProblem,
    dts: &[f64],
) -> Result<ConvergenceResult> {
    if dts.is_empty() || dts.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "dts must be non-empty and strictly decreasing".into(),
        ));
    }
    let sys = problem.system();
    let s0 = problem.exact(problem.t0());
    let mut eu = Vec::new();
    let mut ev = Vec::new();
    let mut ea = Vec::new();
    let mut diverged = Vec::new();
    for &dt in dts {
        let traj = match integrate(tbl, sys, &s0, dt, problem.t_end(), NewtonOptions::default()) {
            Ok(t) => t,
            Err(Error::Step { .. }) | Err(Error::Diverged { .. }) => {
                eu.push(f64::INFINITY);
                ev.push(f64::INFINITY);
                ea.push(f64::INFINITY);
                diverged.push(true);
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut cols: [(Vec<f64>, Vec<f64>); 3] = Default::default();
        for s in &traj.states[1..] {
            let ex = problem.exact(s.t);
            for (k, (num, exa)) in [(&s.u, &ex.u), (&s.v, &ex.v), (&s.a, &ex.a)]
                .into_iter()
                .enumerate()
            {
                cols[k].0.extend(num.iter());
                cols[k].1.extend(exa.iter());
            }
        }
        let e: Vec<f64> = cols
            .iter()
            .map(|(n, x)| global_error(n, x))
            .collect::<Result<_>>()?;
        diverged.push(e.iter().any(|x| !x.is_finite() || *x > DIVERGENCE));
        eu.push(e[0]);
        ev.push(e[1]);
        ea.push(e[2]);
    }
    let slope_u = fitted_slope(dts, &eu, &diverged);
    let slope_v = fitted_slope(dts, &ev, &diverged);
    let (errors_a, slope_a) = if tbl.acceleration_available {
        let s = fitted_slope(dts, &ea, &diverged);
        (Some(ea), Some(s))
    } else {
        (None, None)
    };
    Ok(ConvergenceResult {
        dts: dts.to_vec(),
        errors_u: eu,
        errors_v: ev,
        errors_a,
        diverged,
        slope_u,
        slope_v,
        slope_a,
    })
}

/// Geometric ladder `t_span / 2^k / 10` for k in `ks`.
pub fn ladder(t_span: f64, ks: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    ks.map(|k| t_span / 2f64.powi(k) / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LteResult {
    pub dts: Vec<f64>,
    pub err_u: Vec<f64>,
    pub err_v: Vec<f64>,
    pub err_a: Vec<f64>,
    /// `None` when fewer than two errors sit above round-off.
    pub order_u: Option<f64>,
    pub order_v: Option<f64>,
    pub order_a: Option<f64>,
}

/// Takes one step from exact data at `t_n` and fits how the one-step
/// error scales with Δt.
pub fn lte_probe(
    tbl: &ButcherTable,
    problem: &dyn ExactProblem,
    t_n: f64,
    dts: &[f64],
) -> Result<LteResult> {
    let sys = problem.system();
    let s = problem.exact(t_n);
    let mut out = LteResult {
        dts: dts.to_vec(),
        err_u: vec![],
        err_v: vec![],
        err_a: vec![],
        order_u: None,
        order_v: None,
        order_a: None,
    };
    for &dt in dts {
        let next = match sys.linear_parts() {
            Some(lin) => step_linear(tbl, lin, &s, dt)?,
            None => step_nonlinear(tbl, sys, &s, dt, NewtonOptions::default())?.state,
        };
        let ex = problem.exact(t_n + dt);
        out.err_u.push((next.u - ex.u).amax());
        out.err_v.push((next.v - ex.v).amax());
        out.err_a.push((next.a - ex.a).amax());
    }
    let fit = |e: &[f64]| {
        let (x, y): (Vec<f64>, Vec<f64>) = dts
            .iter()
            .zip(e)
            .filter(|(_, e)| **e > 1e-15)
            .map(|(h, e)| (*h, *e))
            .unzip();
        (x.len() >= 2).then(|| loglog_slope(&x, &y).ok()).flatten()
    };
    out.order_u = fit(&out.err_u);
    out.order_v = fit(&out.err_v);
    out.order_a = fit(&out.err_a);
    Ok(out)
}
