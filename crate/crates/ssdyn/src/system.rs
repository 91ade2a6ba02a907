use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::Operator;

/// (t, u, u̇, ü) at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub a: DVector<f64>,
}

impl State {
    pub fn new(t: f64, u: DVector<f64>, v: DVector<f64>, a: DVector<f64>) -> Self {
        Self { t, u, v, a }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(0.0, DVector::zeros(n), DVector::zeros(n), DVector::zeros(n))
    }

    pub fn scalar(t: f64, u: f64, v: f64, a: f64) -> Self {
        Self::new(
            t,
            DVector::from_element(1, u),
            DVector::from_element(1, v),
            DVector::from_element(1, a),
        )
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self
                .u
                .iter()
                .chain(self.v.iter())
                .chain(self.a.iter())
                .all(|x| x.is_finite())
    }
}

/// Uniformly spaced sequence of states starting at t0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Time series of one component of u, v or a.
    pub fn component(&self, var: Variable, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| var.of(s)[i]).collect()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("non-empty trajectory")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Displacement,
    Velocity,
    Acceleration,
}

impl Variable {
    pub fn of<'a>(&self, s: &'a State) -> &'a DVector<f64> {
        match self {
            Variable::Displacement => &s.u,
            Variable::Velocity => &s.v,
            Variable::Acceleration => &s.a,
        }
    }
}

/// M ü = f(u, u̇, t).
pub trait SecondOrderSystem {
    fn dim(&self) -> usize;

    fn mass(&self) -> &Operator;

    fn force(&self, u: &DVector<f64>, v: &DVector<f64>, t: f64) -> Result<DVector<f64>>;

    /// C = −∂f/∂u̇; `None` lets the stepper fall back to finite differences.
    fn tangent_damping(
        &self,
        _u: &DVector<f64>,
        _v: &DVector<f64>,
        _t: f64,
    ) -> Option<DMatrix<f64>> {
        None
    }

    /// Whether f depends on u̇. Velocity-independent systems never iterate.
    fn velocity_dependent(&self) -> bool {
        true
    }

    /// Present when the system is M ü + C u̇ + K u = q(t).
    fn linear_parts(&self) -> Option<&LinearSystem> {
        None
    }
}

pub type LoadFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// M ü + C u̇ + K u = q(t).
#[derive(Clone)]
pub struct LinearSystem {
    pub m: Operator,
    pub c: Option<Operator>,
    pub k: Operator,
    load: LoadFn,
}

impl fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSystem")
            .field("dim", &self.m.dim())
            .field("damped", &self.c.is_some())
            .finish()
    }
}

impl LinearSystem {
    pub fn new(m: Operator, c: Option<Operator>, k: Operator, load: LoadFn) -> Result<Self> {
        let n = m.dim();
        for op in c.iter().chain(std::iter::once(&k)) {
            if op.dim() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: op.dim(),
                });
            }
        }
        Ok(Self { m, c, k, load })
    }

    /// ü + 2ξω u̇ + ω² u = f(t).
    pub fn sdof(xi: f64, omega: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let c = (xi != 0.0).then(|| Operator::Diagonal(DVector::from_element(1, 2.0 * xi * omega)));
        Self {
            m: Operator::identity(1),
            c,
            k: Operator::Diagonal(DVector::from_element(1, omega * omega)),
            load: Arc::new(move |t| DVector::from_element(1, f(t))),
        }
    }

    pub fn load(&self, t: f64) -> DVector<f64> {
        (self.load)(t)
    }

    pub fn damping_times(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        self.c.as_ref().map(|c| c.mul(v))
    }
}

impl SecondOrderSystem for LinearSystem {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn mass(&self) -> &Operator {
        &self.m
    }

    fn force(&self, u: &DVector<f64>, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        let mut f = self.load(t) - self.k.mul(u);
        if let Some(cv) = self.damping_times(v) {
            f -= cv;
        }
        Ok(f)
    }

    fn tangent_damping(
        &self,
        _u: &DVector<f64>,
        _v: &DVector<f64>,
        _t: f64,
    ) -> Option<DMatrix<f64>> {
        let n = self.dim();
        Some(
            self.c
                .as_ref()
                .map(|c| c.to_dense())
                .unwrap_or_else(|| DMatrix::zeros(n, n)),
        )
    }

    fn velocity_dependent(&self) -> bool {
        self.c.is_some()
    }

    fn linear_parts(&self) -> Option<&LinearSystem> {
        Some(self)
    }
}

pub type ForceFn =
    Arc<dyn Fn(&DVector<f64>, &DVector<f64>, f64) -> Result<DVector<f64>> + Send + Sync>;
pub type TangentFn = Arc<dyn Fn(&DVector<f64>, &DVector<f64>, f64) -> DMatrix<f64> + Send + Sync>;

/// A system assembled from closures.
#[derive(Clone)]
pub struct FnSystem {
    mass: Operator,
    force: ForceFn,
    tangent: Option<TangentFn>,
    velocity_dependent: bool,
}

impl fmt::Debug for FnSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSystem")
            .field("dim", &self.mass.dim())
            .finish()
    }
}

impl FnSystem {
    pub fn new(mass: Operator, force: ForceFn) -> Self {
        Self {
            mass,
            force,
            tangent: None,
            velocity_dependent: true,
        }
    }

    pub fn with_tangent(mut self, tangent: TangentFn) -> Self {
        self.tangent = Some(tangent);
        self
    }

    pub fn velocity_independent(mut self) -> Self {
        self.velocity_dependent = false;
        self
    }
}

impl SecondOrderSystem for FnSystem {
    fn dim(&self) -> usize {
        self.mass.dim()
    }

    fn mass(&self) -> &Operator {
        &self.mass
    }

    fn force(&self, u: &DVector<f64>, v: &DVector<f64>, t: f64) -> Result<DVector<f64>> {
        (self.force)(u, v, t)
    }

    fn tangent_damping(&self, u: &DVector<f64>, v: &DVector<f64>, t: f64) -> Option<DMatrix<f64>> {
        self.tangent.as_ref().map(|c| c(u, v, t))
    }

    fn velocity_dependent(&self) -> bool {
        self.velocity_dependent
    }
}

/// Solves M a0 = f(u0, v0, t0).
pub fn initial_acceleration(
    sys: &dyn SecondOrderSystem,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    t0: f64,
) -> Result<DVector<f64>> {
    let n = sys.dim();
    if u0.len() != n || v0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: u0.len().min(v0.len()),
        });
    }
    let f = sys.force(u0, v0, t0)?;
    sys.mass().factor()?.solve(&f)
}

/// Completes (t0, u0, v0) with the consistent initial acceleration.
pub fn initial_state(
    sys: &dyn SecondOrderSystem,
    t0: f64,
    u0: DVector<f64>,
    v0: DVector<f64>,
) -> Result<State> {
    let a0 = initial_acceleration(sys, &u0, &v0, t0)?;
    Ok(State::new(t0, u0, v0, a0))
}
