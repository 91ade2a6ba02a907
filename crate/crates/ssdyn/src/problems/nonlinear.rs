use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::system::SecondOrderSystem;

/// ẍ − μ(1 − x²)ẋ + x = A sin(ω_p t).
#[derive(Debug, Clone)]
pub struct VanDerPol {
    pub mu: f64,
    pub amp: f64,
    pub omega_p: f64,
    mass: Operator,
}

pub fn van_der_pol(mu: f64, amp: f64, omega_p: f64) -> VanDerPol {
    VanDerPol {
        mu,
        amp,
        omega_p,
        mass: Operator::identity(1),
    }
}

impl VanDerPol {
    /// Initial condition used by the benchmark runs.
    pub const X0: f64 = 2.0;
    pub const V0: f64 = 0.0;
}

impl SecondOrderSystem for VanDerPol {
    fn dim(&self) -> usize {
        1
    }

    fn mass(&self) -> &Operator {
        &self.mass
    }

    fn force(&self, u: &DVector<f64>, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        let x = u[0];
        Ok(DVector::from_element(
            1,
            self.amp * (self.omega_p * t).sin() + self.mu * (1.0 - x * x) * v[0] - x,
        ))
    }

    fn tangent_damping(
        &self,
        u: &DVector<f64>,
        _v: &DVector<f64>,
        _t: f64,
    ) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, -self.mu * (1.0 - u[0] * u[0])))
    }

    fn velocity_dependent(&self) -> bool {
        self.mu != 0.0
    }
}

/// Planar spring pendulum; x points along gravity.
#[derive(Debug, Clone)]
pub struct SpringPendulum {
    pub m: f64,
    pub g: f64,
    pub l0: f64,
    pub k: f64,
    mass: Operator,
}

pub fn spring_pendulum() -> SpringPendulum {
    SpringPendulum::new(1.0, 10.0, 1.0, 30.0)
}

impl SpringPendulum {
    pub fn new(m: f64, g: f64, l0: f64, k: f64) -> Self {
        Self {
            m,
            g,
            l0,
            k,
            mass: Operator::Diagonal(DVector::from_element(2, m)),
        }
    }

    /// (x, y) = (0, 1.5) at rest.
    pub fn initial_displacement(&self) -> DVector<f64> {
        DVector::from_vec(vec![0.0, 1.5])
    }

    pub fn energy(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let l = u.norm();
        0.5 * self.m * v.norm_squared() + 0.5 * self.k * (l - self.l0).powi(2)
            - self.m * self.g * u[0]
    }
}

impl SecondOrderSystem for SpringPendulum {
    fn dim(&self) -> usize {
        2
    }

    fn mass(&self) -> &Operator {
        &self.mass
    }

    fn force(&self, u: &DVector<f64>, _v: &DVector<f64>, _t: f64) -> Result<DVector<f64>> {
        let l = u.norm();
        if l == 0.0 {
            return Err(Error::Force("spring pendulum at zero length".into()));
        }
        let s = self.k * (1.0 - self.l0 / l);
        Ok(DVector::from_vec(vec![
            self.m * self.g - s * u[0],
            -s * u[1],
        ]))
    }

    fn tangent_damping(
        &self,
        _u: &DVector<f64>,
        _v: &DVector<f64>,
        _t: f64,
    ) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(2, 2))
    }

    fn velocity_dependent(&self) -> bool {
        false
    }
}
