//! The single-solve stepping engine.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, Factor, Operator};
use crate::system::{LinearSystem, SecondOrderSystem, State, Trajectory};
use crate::tables::ButcherTable;

/// Newton controls for velocity-dependent forces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Tolerance on ‖Δü‖∞.
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            eps: 1e-10,
            max_iter: 30,
        }
    }
}

/// Result of one nonlinear step with its iteration history.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub state: State,
    pub iterations: usize,
    /// ‖Δü⁽ⁱ⁾‖∞ per iteration; empty when no iteration was needed.
    pub corrections: Vec<f64>,
}

/// Applies the three update formulas given the stage acceleration.
fn update(tbl: &ButcherTable, s: &State, a_p: &DVector<f64>, dt: f64) -> State {
    let dt2 = dt * dt;
    let u = &s.u + &s.v * dt + (&s.a * tbl.a(5) + a_p * tbl.a(6)) * dt2;
    let v = &s.v + (&s.a * tbl.a(7) + a_p * tbl.a(8)) * dt;
    let a = &s.a * tbl.a(9) + a_p * tbl.a(10);
    State::new(s.t + dt, u, v, a)
}

/// Stage predictors without the a_{n+p} contributions.
fn predictors(tbl: &ButcherTable, s: &State, dt: f64) -> (DVector<f64>, DVector<f64>) {
    let u = &s.u + &s.v * (tbl.p * dt) + &s.a * (tbl.a(1) * dt * dt);
    let v = &s.v + &s.a * (tbl.a(3) * dt);
    (u, v)
}

/// M̃ = M + α4ΔtC + α2Δt²K.
pub fn effective_mass(tbl: &ButcherTable, sys: &LinearSystem, dt: f64) -> Operator {
    let mut m = sys.m.clone();
    if let Some(c) = &sys.c {
        m = m.add_scaled(tbl.a(4) * dt, c);
    }
    m.add_scaled(tbl.a(2) * dt * dt, &sys.k)
}

/// A linear stepper with the effective mass factored once.
#[derive(Debug, Clone)]
pub struct LinearStepper<'a> {
    tbl: &'a ButcherTable,
    sys: &'a LinearSystem,
    dt: f64,
    factor: Factor,
}

impl<'a> LinearStepper<'a> {
    pub fn new(tbl: &'a ButcherTable, sys: &'a LinearSystem, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {dt}"
            )));
        }
        let factor = effective_mass(tbl, sys, dt).factor()?;
        Ok(Self {
            tbl,
            sys,
            dt,
            factor,
        })
    }

    pub fn step(&self, s: &State) -> Result<State> {
        let (tbl, sys, dt) = (self.tbl, self.sys, self.dt);
        if s.dim() != sys.dim() {
            return Err(Error::Dimension {
                expected: sys.dim(),
                got: s.dim(),
            });
        }
        let (u_star, v_star) = predictors(tbl, s, dt);
        let mut rhs = sys.load(s.t + tbl.p * dt) - sys.k.mul(&u_star);
        if let Some(cv) = sys.damping_times(&v_star) {
            rhs -= cv;
        }
        let a_p = self.factor.solve(&rhs)?;
        Ok(update(tbl, s, &a_p, dt))
    }
}

/// One step on M ü + C u̇ + K u = q(t).
pub fn step_linear(tbl: &ButcherTable, sys: &LinearSystem, s: &State, dt: f64) -> Result<State> {
    LinearStepper::new(tbl, sys, dt)?.step(s)
}

fn finite_difference_damping(
    sys: &dyn SecondOrderSystem,
    u: &DVector<f64>,
    v: &DVector<f64>,
    t: f64,
) -> Result<DMatrix<f64>> {
    let n = v.len();
    let mut c = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = 1e-7 * v[j].abs().max(1.0);
        let mut vp = v.clone();
        let mut vm = v.clone();
        vp[j] += h;
        vm[j] -= h;
        let df = (sys.force(u, &vp, t)? - sys.force(u, &vm, t)?) / (2.0 * h);
        c.set_column(j, &(-df));
    }
    Ok(c)
}

/// One step on a general M ü = f(u, u̇, t) with Newton iteration on the
/// stage acceleration when the table treats velocity implicitly.
pub fn step_nonlinear(
    tbl: &ButcherTable,
    sys: &dyn SecondOrderSystem,
    s: &State,
    dt: f64,
    opts: NewtonOptions,
) -> Result<StepReport> {
    if tbl.a(2) != 0.0 {
        return Err(Error::NotExplicit(tbl.label()));
    }
    if !(dt > 0.0) || !(opts.eps > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidArgument(
            "dt, eps must be positive and max_iter ≥ 1".into(),
        ));
    }
    if s.dim() != sys.dim() {
        return Err(Error::Dimension {
            expected: sys.dim(),
            got: s.dim(),
        });
    }
    let t_p = s.t + tbl.p * dt;
    let (u_p, v_star) = predictors(tbl, s, dt);
    let a4dt = tbl.a(4) * dt;

    if a4dt == 0.0 || !sys.velocity_dependent() {
        let v_p = &v_star + &s.a * a4dt;
        let f = sys.force(&u_p, &v_p, t_p)?;
        let a_p = sys.mass().factor()?.solve(&f)?;
        return Ok(StepReport {
            state: update(tbl, s, &a_p, dt),
            iterations: 1,
            corrections: Vec::new(),
        });
    }

    let mass = sys.mass();
    let mut a_i = s.a.clone();
    let mut corrections = Vec::with_capacity(4);
    for i in 1..=opts.max_iter {
        let v_i = &v_star + &a_i * a4dt;
        let f = sys.force(&u_p, &v_i, t_p)?;
        let c = match sys.tangent_damping(&u_p, &v_i, t_p) {
            Some(c) => c,
            None => finite_difference_damping(sys, &u_p, &v_i, t_p)?,
        };
        let m_eff = Operator::Dense(mass.to_dense() + c * a4dt).simplify();
        let da = m_eff.factor()?.solve(&(f - mass.mul(&a_i)))?;
        let norm = max_abs(&da);
        corrections.push(norm);
        if norm < opts.eps {
            return Ok(StepReport {
                state: update(tbl, s, &a_i, dt),
                iterations: i,
                corrections,
            });
        }
        a_i += da;
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        last: *corrections.last().unwrap_or(&f64::NAN),
    })
}

/// Number of uniform steps covering (t0, t_end].
pub fn step_count(t0: f64, t_end: f64, dt: f64) -> usize {
    ((t_end - t0) / dt - 1e-9).ceil().max(0.0) as usize
}

/// Uniform-step trajectory from `s0` to `t_end`, taking the linear path
/// whenever the system exposes its linear parts.
pub fn integrate(
    tbl: &ButcherTable,
    sys: &dyn SecondOrderSystem,
    s0: &State,
    dt: f64,
    t_end: f64,
    opts: NewtonOptions,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end > s0.t) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_end > t0 (dt={dt}, t_end={t_end})"
        )));
    }
    let n = step_count(s0.t, t_end, dt);
    let mut states = Vec::with_capacity(n + 1);
    states.push(s0.clone());
    let wrap = |step: usize| {
        move |e: Error| Error::Step {
            step,
            source: Box::new(e),
        }
    };
    let t0 = s0.t;
    if let Some(lin) = sys.linear_parts() {
        let stepper = LinearStepper::new(tbl, lin, dt)?;
        for k in 0..n {
            let mut next = stepper.step(&states[k]).map_err(wrap(k + 1))?;
            next.t = t0 + (k + 1) as f64 * dt;
            check_finite(&next, k + 1)?;
            states.push(next);
        }
    } else {
        for k in 0..n {
            let mut next = step_nonlinear(tbl, sys, &states[k], dt, opts)
                .map_err(wrap(k + 1))?
                .state;
            next.t = t0 + (k + 1) as f64 * dt;
            check_finite(&next, k + 1)?;
            states.push(next);
        }
    }
    Ok(Trajectory { dt, states })
}

fn check_finite(s: &State, step: usize) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(Error::Diverged {
            step,
            magnitude: f64::INFINITY,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::initial_state;
    use crate::tables::{new_algorithm, table};

    #[test]
    fn ne_reduces_to_central_difference_update() {
        let ne = table("NE", None, None).unwrap();
        let sys = LinearSystem::sdof(0.0, 3.0, |_| 0.0);
        let s = State::scalar(0.0, 0.7, -0.2, -9.0 * 0.7);
        let dt = 0.1;
        let next = step_linear(&ne, &sys, &s, dt).unwrap();
        let u1 = 0.7 - 0.2 * dt + 0.5 * dt * dt * s.a[0];
        let a1 = -9.0 * u1;
        let v1 = -0.2 + 0.5 * dt * (s.a[0] + a1);
        assert!((next.u[0] - u1).abs() < 1e-15);
        assert!((next.a[0] - a1).abs() < 1e-14);
        assert!((next.v[0] - v1).abs() < 1e-15);
    }

    #[test]
    fn fully_explicit_takes_one_iteration() {
        let t = new_algorithm(1);
        let sys = crate::problems::van_der_pol(5.0, 5.0, 2.5);
        let s = initial_state(&sys, 0.0, DVector::from_element(1, 2.0), DVector::zeros(1)).unwrap();
        let r = step_nonlinear(&t, &sys, &s, 0.005, NewtonOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn non_convergence_carries_count() {
        let t = new_algorithm(2);
        // cubic damping keeps Newton from terminating in one correction
        let sys = crate::system::FnSystem::new(
            Operator::identity(1),
            std::sync::Arc::new(|u: &DVector<f64>, v: &DVector<f64>, _t: f64| {
                Ok(-u - v.map(|x| x.powi(3)))
            }),
        );
        let s = initial_state(
            &sys,
            0.0,
            DVector::from_element(1, 2.0),
            DVector::from_element(1, 3.0),
        )
        .unwrap();
        let opts = NewtonOptions {
            eps: 1e-300,
            max_iter: 3,
        };
        match step_nonlinear(&t, &sys, &s, 0.005, opts) {
            Err(Error::NotConverged { iterations, .. }) => assert_eq!(iterations, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_implicit_tables() {
        let mut t = new_algorithm(1);
        t.alpha[1] = 0.25;
        let sys = crate::problems::van_der_pol(1.0, 0.0, 1.0);
        let s = State::scalar(0.0, 1.0, 0.0, -1.0);
        assert!(matches!(
            step_nonlinear(&t, &sys, &s, 0.01, NewtonOptions::default()),
            Err(Error::NotExplicit(_))
        ));
    }

    #[test]
    fn step_count_handles_roundoff() {
        assert_eq!(step_count(0.0, 1.0, 0.1), 10);
        assert_eq!(step_count(0.0, 6.5, 6.5 / 640.0), 640);
    }
}
