//! Classical fourth-order Runge–Kutta on the first-order form, used as an oracle.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::stepper::step_count;
use crate::system::{SecondOrderSystem, State, Trajectory};

/// RK4 trajectory storing every step.
pub fn rk4_reference(
    sys: &dyn SecondOrderSystem,
    s0: &State,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory> {
    rk4_sampled(sys, s0, dt, t_end, 1)
}

/// RK4 trajectory storing every `stride`-th step (and the initial state).
/// The returned `dt` is the storage spacing `stride·dt`.
pub fn rk4_sampled(
    sys: &dyn SecondOrderSystem,
    s0: &State,
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0) || stride == 0 || !(t_end > s0.t) {
        return Err(Error::InvalidArgument(
            "need dt > 0, stride ≥ 1 and t_end > t0".into(),
        ));
    }
    let minv = sys.mass().factor()?;
    let acc = |u: &DVector<f64>, v: &DVector<f64>, t: f64| -> Result<DVector<f64>> {
        minv.solve(&sys.force(u, v, t)?)
    };

    let n = step_count(s0.t, t_end, dt);
    let t0 = s0.t;
    let mut u = s0.u.clone();
    let mut v = s0.v.clone();
    let mut states = Vec::with_capacity(n / stride + 1);
    states.push(State::new(t0, u.clone(), v.clone(), acc(&u, &v, t0)?));
    let h = dt;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1u = v.clone();
        let k1v = acc(&u, &v, t)?;
        let u2 = &u + &k1u * (0.5 * h);
        let v2 = &v + &k1v * (0.5 * h);
        let k2v = acc(&u2, &v2, t + 0.5 * h)?;
        let u3 = &u + &v2 * (0.5 * h);
        let v3 = &v + &k2v * (0.5 * h);
        let k3v = acc(&u3, &v3, t + 0.5 * h)?;
        let u4 = &u + &v3 * h;
        let v4 = &v + &k3v * h;
        let k4v = acc(&u4, &v4, t + h)?;
        u += (k1u + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        if (k + 1) % stride == 0 {
            let tn = t0 + (k + 1) as f64 * h;
            if !u.iter().chain(v.iter()).all(|x| x.is_finite()) {
                return Err(Error::Diverged {
                    step: k + 1,
                    magnitude: f64::INFINITY,
                });
            }
            states.push(State::new(tn, u.clone(), v.clone(), acc(&u, &v, tn)?));
        }
    }
    Ok(Trajectory {
        dt: dt * stride as f64,
        states,
    })
}
