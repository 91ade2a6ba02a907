use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::accuracy::ExactProblem;
use crate::system::{LinearSystem, SecondOrderSystem, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdofKind {
    FreeUndamped,
    FreeDamped,
    ForcedUndamped,
    ForcedDamped,
}

impl SdofKind {
    pub const ALL: [SdofKind; 4] = [
        SdofKind::FreeUndamped,
        SdofKind::FreeDamped,
        SdofKind::ForcedUndamped,
        SdofKind::ForcedDamped,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "free-undamped" => Some(SdofKind::FreeUndamped),
            "free-damped" => Some(SdofKind::FreeDamped),
            "forced-undamped" => Some(SdofKind::ForcedUndamped),
            "forced-damped" => Some(SdofKind::ForcedDamped),
            _ => None,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            SdofKind::FreeUndamped => "free-undamped",
            SdofKind::FreeDamped => "free-damped",
            SdofKind::ForcedUndamped => "forced-undamped",
            SdofKind::ForcedDamped => "forced-damped",
        }
    }
}

/// f(t) = c·cos(νt) + s·sin(νt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub c: f64,
    pub s: f64,
    pub nu: f64,
}

impl Harmonic {
    pub const ZERO: Harmonic = Harmonic {
        c: 0.0,
        s: 0.0,
        nu: 0.0,
    };

    pub fn eval(&self, t: f64) -> f64 {
        self.c * (self.nu * t).cos() + self.s * (self.nu * t).sin()
    }
}

/// ü + 2ξω u̇ + ω² u = f(t) with its closed-form solution (ξ < 1).
#[derive(Debug, Clone)]
pub struct SdofCase {
    pub kind: Option<SdofKind>,
    pub xi: f64,
    pub omega: f64,
    pub forcing: Harmonic,
    pub u0: f64,
    pub v0: f64,
    pub t_end: f64,
    sys: LinearSystem,
}

impl SdofCase {
    pub fn new(xi: f64, omega: f64, forcing: Harmonic, u0: f64, v0: f64, t_end: f64) -> Self {
        assert!((0.0..1.0).contains(&xi), "underdamped cases only");
        let sys = LinearSystem::sdof(xi, omega, move |t| forcing.eval(t));
        Self {
            kind: None,
            xi,
            omega,
            forcing,
            u0,
            v0,
            t_end,
            sys,
        }
    }

    pub fn linear(&self) -> &LinearSystem {
        &self.sys
    }

    /// (u, u̇, ü) at t.
    pub fn solution(&self, t: f64) -> (f64, f64, f64) {
        let (xi, w) = (self.xi, self.omega);
        let Harmonic { c, s, nu } = self.forcing;
        // particular solution P cos νt + Q sin νt
        let (k, d) = (w * w - nu * nu, 2.0 * xi * w * nu);
        let det = k * k + d * d;
        let (pp, qq) = if c == 0.0 && s == 0.0 {
            (0.0, 0.0)
        } else {
            ((k * c - d * s) / det, (d * c + k * s) / det)
        };
        let (sn, cs) = (nu * t).sin_cos();
        let up = pp * cs + qq * sn;
        let vp = nu * (-pp * sn + qq * cs);
        // homogeneous part
        let sig = xi * w;
        let wd = w * (1.0 - xi * xi).sqrt();
        let c1 = self.u0 - pp;
        let c2 = (self.v0 - nu * qq + sig * c1) / wd;
        let e = (-sig * t).exp();
        let (sd, cd) = (wd * t).sin_cos();
        let uh = e * (c1 * cd + c2 * sd);
        let vh = e * ((-sig * c1 + wd * c2) * cd + (-sig * c2 - wd * c1) * sd);
        let u = uh + up;
        let v = vh + vp;
        (u, v, self.forcing.eval(t) - 2.0 * xi * w * v - w * w * u)
    }
}

impl ExactProblem for SdofCase {
    fn system(&self) -> &dyn SecondOrderSystem {
        &self.sys
    }

    fn t_end(&self) -> f64 {
        self.t_end
    }

    fn exact(&self, t: f64) -> State {
        let (u, v, a) = self.solution(t);
        State::new(
            t,
            DVector::from_element(1, u),
            DVector::from_element(1, v),
            DVector::from_element(1, a),
        )
    }
}

/// The four reference single-degree-of-freedom cases.
pub fn sdof_case(which: SdofKind) -> SdofCase {
    let mut c = match which {
        SdofKind::FreeUndamped => SdofCase::new(0.0, 2.0, Harmonic::ZERO, 1.0, 0.0, 10.0),
        SdofKind::FreeDamped => SdofCase::new(0.2, 2.0, Harmonic::ZERO, 0.0, 12.0, 10.0),
        SdofKind::ForcedUndamped => SdofCase::new(
            0.0,
            1.0,
            Harmonic {
                c: 1.0,
                s: 0.0,
                nu: 2.0,
            },
            -1.0 / 3.0,
            0.0,
            6.5,
        ),
        SdofKind::ForcedDamped => SdofCase::new(
            2.0 / 5f64.sqrt(),
            5f64.sqrt(),
            Harmonic {
                c: 0.0,
                s: 1.0,
                nu: 2.0,
            },
            57.0 / 65.0,
            2.0 / 65.0,
            5.6,
        ),
    };
    c.kind = Some(which);
    c
}
