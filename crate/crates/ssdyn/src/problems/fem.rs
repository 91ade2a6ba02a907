//! Rod and membrane finite-element problems of the form M ü + c0² K u = F(t).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::system::{LinearSystem, State, Trajectory, Variable};

/// Rod constants: A = 1 m², E = 3e7 Pa, L = 20 m, ρ = 7.4e-4.
pub mod rod {
    pub const AREA: f64 = 1.0;
    pub const YOUNG: f64 = 3.0e7;
    pub const LENGTH: f64 = 20.0;
    pub const DENSITY: f64 = 7.4e-4;
    pub const END_FORCE: f64 = 100.0;

    pub fn wave_speed() -> f64 {
        (YOUNG / DENSITY).sqrt()
    }
}

pub const MEMBRANE_SIDE: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FemLoad {
    /// Constant value applied from t = 0 at one DOF.
    Step { dof: usize, value: f64 },
    /// scale·4[1 − (2t − 1)²]·H(1 − t) at one DOF.
    Pulse { dof: usize, scale: f64 },
}

impl FemLoad {
    pub fn dof(&self) -> usize {
        match *self {
            FemLoad::Step { dof, .. } | FemLoad::Pulse { dof, .. } => dof,
        }
    }

    /// Scalar time history multiplying the unit load vector.
    pub fn amplitude(&self, t: f64) -> f64 {
        match *self {
            FemLoad::Step { value, .. } => {
                if t >= 0.0 {
                    value
                } else {
                    0.0
                }
            }
            FemLoad::Pulse { scale, .. } => {
                if (0.0..=1.0).contains(&t) {
                    scale * 4.0 * (1.0 - (2.0 * t - 1.0).powi(2))
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshInfo {
    pub dx: f64,
    pub zeta: f64,
    pub r: f64,
    pub alpha_k: f64,
    pub alpha_m: f64,
    /// Node count per grid row (rod: 1 row).
    pub nodes_x: usize,
    pub nodes_y: usize,
    /// Node (i, j) → DOF, `None` where fixed.
    pub dof_of_node: Vec<Option<usize>>,
    /// Coordinates per DOF.
    pub coords: Vec<[f64; 2]>,
    pub quarter: bool,
}

impl MeshInfo {
    pub fn dof(&self, i: usize, j: usize) -> Option<usize> {
        self.dof_of_node[j * self.nodes_x + i]
    }
}

#[derive(Debug, Clone)]
pub struct FemProblem {
    pub m: Operator,
    /// Stiffness without the c0² factor.
    pub k: DMatrix<f64>,
    pub c0: f64,
    pub load: FemLoad,
    pub mesh: MeshInfo,
}

impl FemProblem {
    pub fn dim(&self) -> usize {
        self.k.nrows()
    }

    pub fn load_vector(&self, t: f64) -> DVector<f64> {
        let mut f = DVector::zeros(self.dim());
        f[self.load.dof()] = self.load.amplitude(t);
        f
    }

    /// M ü + c0² K u = F(t) with C = 0.
    pub fn system(&self) -> LinearSystem {
        let n = self.dim();
        let dof = self.load.dof();
        let load = self.load;
        let k = Operator::Dense(&self.k * (self.c0 * self.c0));
        LinearSystem::new(
            self.m.clone(),
            None,
            k,
            Arc::new(move |t| {
                let mut f = DVector::zeros(n);
                f[dof] = load.amplitude(t);
                f
            }),
        )
        .expect("consistent FEM dimensions")
    }

    /// Largest circular frequency of the semidiscrete system.
    pub fn omega_max(&self) -> Result<f64> {
        Ok(modal_basis(self)?
            .omegas
            .iter()
            .fold(0.0_f64, |m, w| m.max(*w)))
    }

    pub fn rest_state(&self) -> Result<State> {
        let n = self.dim();
        crate::system::initial_state(&self.system(), 0.0, DVector::zeros(n), DVector::zeros(n))
    }
}

/// Two-node rod, fixed at x = 0, step force at x = L; per unit ρA.
pub fn rod_assembly(n_elem: usize, r: f64) -> Result<FemProblem> {
    if n_elem < 2 {
        return Err(Error::InvalidArgument(
            "rod needs at least 2 elements".into(),
        ));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "mass weighting r = {r} outside [0, 1]"
        )));
    }
    let dx = rod::LENGTH / n_elem as f64;
    let me = Matrix2::new(3.0 - r, r, r, 3.0 - r) * (dx / 6.0);
    let ke = Matrix2::new(1.0, -1.0, -1.0, 1.0) / dx;
    let n = n_elem;
    let mut m = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    for e in 0..n_elem {
        // node e, e+1 → dof e−1, e (node 0 fixed)
        let dofs = [e.checked_sub(1), Some(e)];
        for a in 0..2 {
            for b in 0..2 {
                if let (Some(i), Some(j)) = (dofs[a], dofs[b]) {
                    m[(i, j)] += me[(a, b)];
                    k[(i, j)] += ke[(a, b)];
                }
            }
        }
    }
    let mut dof_of_node = vec![None];
    dof_of_node.extend((0..n).map(Some));
    let mesh = MeshInfo {
        dx,
        zeta: 1.0,
        r,
        alpha_k: 1.0 / 3f64.sqrt(),
        alpha_m: 1.0 / 3f64.sqrt(),
        nodes_x: n + 1,
        nodes_y: 1,
        dof_of_node,
        coords: (1..=n).map(|i| [i as f64 * dx, 0.0]).collect(),
        quarter: false,
    };
    Ok(FemProblem {
        m: Operator::Dense(m).simplify(),
        k,
        c0: rod::wave_speed(),
        load: FemLoad::Step {
            dof: n - 1,
            value: rod::END_FORCE / (rod::DENSITY * rod::AREA),
        },
        mesh,
    })
}

/// Bilinear element matrices on a Δx × ζΔx rectangle with 2×2 quadrature
/// at ±α_k (stiffness) and ±α_m (mass), weight 1 each.
pub fn membrane_element(
    dx: f64,
    zeta: f64,
    r: f64,
    alpha_k: f64,
    alpha_m: f64,
) -> (Matrix4<f64>, Matrix4<f64>) {
    let (a, b) = (dx, zeta * dx);
    let xi = [-1.0, 1.0, 1.0, -1.0];
    let eta = [-1.0, -1.0, 1.0, 1.0];
    let det = a * b / 4.0;
    let mut ke = Matrix4::zeros();
    let mut mq = Matrix4::zeros();
    for s in [-1.0, 1.0] {
        for t in [-1.0, 1.0] {
            let (x, y) = (s * alpha_k, t * alpha_k);
            let gx: [f64; 4] = std::array::from_fn(|i| xi[i] * (1.0 + eta[i] * y) / 4.0 * 2.0 / a);
            let gy: [f64; 4] = std::array::from_fn(|i| eta[i] * (1.0 + xi[i] * x) / 4.0 * 2.0 / b);
            let (x, y) = (s * alpha_m, t * alpha_m);
            let nn: [f64; 4] =
                std::array::from_fn(|i| (1.0 + xi[i] * x) * (1.0 + eta[i] * y) / 4.0);
            for i in 0..4 {
                for j in 0..4 {
                    ke[(i, j)] += (gx[i] * gx[j] + gy[i] * gy[j]) * det;
                    mq[(i, j)] += nn[i] * nn[j] * det;
                }
            }
        }
    }
    let lumped = Matrix4::from_diagonal(&mq.column_sum());
    (ke, lumped * (1.0 - r) + mq * r)
}

/// Center-loaded square membrane (side 15, c0 = 1, fixed outer edges).
/// `quarter` solves [0, 7.5]² with symmetry edges and a quarter load.
pub fn membrane_assembly(
    n_side: usize,
    zeta: f64,
    r: f64,
    alpha_k: f64,
    alpha_m: f64,
    quarter: bool,
) -> Result<FemProblem> {
    if n_side < 8 || !n_side.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "n_side = {n_side} must be even and ≥ 8"
        )));
    }
    if !(zeta > 0.0) {
        return Err(Error::InvalidArgument("zeta must be positive".into()));
    }
    if !(alpha_k > 0.0 && alpha_k <= 1.0 && alpha_m > 0.0 && alpha_m <= 1.0) {
        return Err(Error::InvalidArgument(
            "quadrature points must lie in (0, 1]".into(),
        ));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "mass weighting r = {r} outside [0, 1]"
        )));
    }
    let dx = MEMBRANE_SIDE / n_side as f64;
    let dy = zeta * dx;
    let ny_f = MEMBRANE_SIDE / dy;
    let ny = ny_f.round() as usize;
    if (ny_f - ny as f64).abs() > 1e-9 || !ny.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "zeta = {zeta} does not tile the square evenly"
        )));
    }
    let (ex, ey, x0, y0) = if quarter {
        (n_side / 2, ny / 2, 0.0, 0.0)
    } else {
        (n_side, ny, -MEMBRANE_SIDE / 2.0, -MEMBRANE_SIDE / 2.0)
    };
    let (nx, nyn) = (ex + 1, ey + 1);
    let fixed = |i: usize, j: usize| {
        if quarter {
            i == ex || j == ey
        } else {
            i == 0 || j == 0 || i == ex || j == ey
        }
    };
    let mut dof_of_node = vec![None; nx * nyn];
    let mut coords = Vec::new();
    for j in 0..nyn {
        for i in 0..nx {
            if !fixed(i, j) {
                dof_of_node[j * nx + i] = Some(coords.len());
                coords.push([x0 + i as f64 * dx, y0 + j as f64 * dy]);
            }
        }
    }
    let n = coords.len();
    let (ke, me) = membrane_element(dx, zeta, r, alpha_k, alpha_m);
    let mut m = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    for j in 0..ey {
        for i in 0..ex {
            let nodes = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let dofs = nodes.map(|(a, b)| dof_of_node[b * nx + a]);
            for a in 0..4 {
                for b in 0..4 {
                    if let (Some(p), Some(q)) = (dofs[a], dofs[b]) {
                        m[(p, q)] += me[(a, b)];
                        k[(p, q)] += ke[(a, b)];
                    }
                }
            }
        }
    }
    let (ci, cj, scale) = if quarter {
        (0, 0, 0.25)
    } else {
        (ex / 2, ey / 2, 1.0)
    };
    let center = dof_of_node[cj * nx + ci].expect("center node is free");
    Ok(FemProblem {
        m: Operator::Dense(m).simplify(),
        k,
        c0: 1.0,
        load: FemLoad::Pulse { dof: center, scale },
        mesh: MeshInfo {
            dx,
            zeta,
            r,
            alpha_k,
            alpha_m,
            nodes_x: nx,
            nodes_y: nyn,
            dof_of_node,
            coords,
            quarter,
        },
    })
}

/// Mass-normalised modes: Φᵀ M Φ = I, Φᵀ K Φ = diag(ω²/c0²)·…
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub omegas: Vec<f64>,
    pub phi: DMatrix<f64>,
}

/// Generalised eigenproblem c0² K φ = ω² M φ via Cholesky of M.
pub fn modal_basis(fp: &FemProblem) -> Result<ModalBasis> {
    let mm = fp.m.to_dense();
    let chol = mm
        .cholesky()
        .ok_or(Error::Singular("mass matrix not SPD"))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or(Error::Singular("Cholesky factor"))?;
    let kk = &fp.k * (fp.c0 * fp.c0);
    let a = &linv * kk * linv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let phi = linv.transpose() * eig.eigenvectors;
    let omegas = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok(ModalBasis { omegas, phi })
}

/// Response of q̈ + ω²q = b·g(t) from rest, for the load's time history g.
fn modal_response(load: &FemLoad, w: f64, b: f64, t: f64) -> (f64, f64, f64) {
    match *load {
        FemLoad::Step { value, .. } => {
            let f = b * value;
            if t < 0.0 {
                return (0.0, 0.0, 0.0);
            }
            if w == 0.0 {
                return (0.5 * f * t * t, f * t, f);
            }
            let (s, c) = (w * t).sin_cos();
            (f / (w * w) * (1.0 - c), f / w * s, f * c)
        }
        FemLoad::Pulse { scale, .. } => {
            // g = 16 scale (t − t²) on [0, 1]
            let g = 16.0 * scale * b;
            let within = |t: f64| -> (f64, f64, f64) {
                let w2 = w * w;
                let gam = -g / w2;
                let bet = g / w2;
                let alp = -2.0 * gam / w2;
                let (s, c) = (w * t).sin_cos();
                let (ca, cb) = (-alp, -bet / w);
                let q = alp + bet * t + gam * t * t + ca * c + cb * s;
                let qd = bet + 2.0 * gam * t - ca * w * s + cb * w * c;
                let qdd = 2.0 * gam - w2 * (ca * c + cb * s);
                (q, qd, qdd)
            };
            if t <= 0.0 {
                (0.0, 0.0, 0.0)
            } else if t <= 1.0 {
                within(t)
            } else {
                let (q1, v1, _) = within(1.0);
                let (s, c) = (w * (t - 1.0)).sin_cos();
                let q = q1 * c + v1 / w * s;
                let qd = -q1 * w * s + v1 * c;
                (q, qd, -w * w * q)
            }
        }
    }
}

/// Exact solution of the semidiscrete system from rest by modal superposition.
pub fn semidiscrete_modal_oracle(fp: &FemProblem, t_samples: &[f64]) -> Result<Vec<State>> {
    let basis = modal_basis(fp)?;
    semidiscrete_modal_oracle_with(fp, &basis, t_samples)
}

pub fn semidiscrete_modal_oracle_with(
    fp: &FemProblem,
    basis: &ModalBasis,
    t_samples: &[f64],
) -> Result<Vec<State>> {
    let dof = fp.load.dof();
    let bj: Vec<f64> = (0..basis.omegas.len())
        .map(|j| basis.phi[(dof, j)])
        .collect();
    let n = fp.dim();
    let mut out = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let mut q = DVector::zeros(n);
        let mut qd = DVector::zeros(n);
        let mut qdd = DVector::zeros(n);
        for (j, &w) in basis.omegas.iter().enumerate() {
            let (a, b, c) = modal_response(&fp.load, w, bj[j], t);
            q[j] = a;
            qd[j] = b;
            qdd[j] = c;
        }
        out.push(State::new(
            t,
            &basis.phi * q,
            &basis.phi * qd,
            &basis.phi * qdd,
        ));
    }
    Ok(out)
}

/// Overshoot and total variation of a signal in a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationMetric {
    pub overshoot: f64,
    pub total_variation: f64,
    pub window: (f64, f64),
}

/// Metric on samples (t, x). `plateau` is the oracle level; the window
/// mean is used when absent.
pub fn dissipation_metric_samples(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    plateau: Option<f64>,
) -> Result<DissipationMetric> {
    let xs: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(_, x)| *x)
        .collect();
    if xs.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "empty window [{}, {}]",
            window.0, window.1
        )));
    }
    let level = plateau.unwrap_or_else(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let sign = if level < 0.0 { -1.0 } else { 1.0 };
    let overshoot = xs
        .iter()
        .map(|x| sign * (x - level))
        .fold(0.0_f64, f64::max);
    let total_variation = xs.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Ok(DissipationMetric {
        overshoot,
        total_variation,
        window,
    })
}

pub fn dissipation_metric(
    traj: &Trajectory,
    variable: Variable,
    dof: usize,
    window: (f64, f64),
    plateau: Option<f64>,
) -> Result<DissipationMetric> {
    let t = traj.times();
    let x = traj.component(variable, dof);
    dissipation_metric_samples(&t, &x, window, plateau)
}

/// Radial profiles of a nodal field along θ = 0 and θ = π/4 from the
/// membrane center: (radii, values) for each ray.
pub fn membrane_rays(
    fp: &FemProblem,
    field: &DVector<f64>,
) -> ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    let mesh = &fp.mesh;
    let (ci, cj, count) = if mesh.quarter {
        (0, 0, mesh.nodes_x)
    } else {
        (
            (mesh.nodes_x - 1) / 2,
            (mesh.nodes_y - 1) / 2,
            (mesh.nodes_x + 1) / 2,
        )
    };
    let val = |i: usize, j: usize| mesh.dof(i, j).map(|d| field[d]).unwrap_or(0.0);
    let dy = mesh.zeta * mesh.dx;
    let mut ray0 = (vec![], vec![]);
    let mut ray45 = (vec![], vec![]);
    for s in 0..count {
        ray0.0.push(s as f64 * mesh.dx);
        ray0.1.push(val(ci + s, cj));
        if cj + s < mesh.nodes_y {
            ray45.0.push((s as f64 * mesh.dx).hypot(s as f64 * dy));
            ray45.1.push(val(ci + s, cj + s));
        }
    }
    (ray0, ray45)
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.iter().position(|&v| v >= x) {
        Some(0) => ys[0],
        Some(i) => {
            let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            ys[i - 1] * (1.0 - w) + ys[i] * w
        }
        None => *ys.last().unwrap_or(&0.0),
    }
}

/// Discrete L2 distance between the θ = 0 and θ = π/4 radial profiles on a
/// common grid of spacing Δx/2 covering r < side/2.
pub fn isotropy_defect(fp: &FemProblem, field: &DVector<f64>) -> f64 {
    let ((r0, p0), (r45, p45)) = membrane_rays(fp, field);
    let h = fp.mesh.dx / 2.0;
    let rmax = MEMBRANE_SIDE / 2.0;
    let mut acc = 0.0;
    let mut r = 0.0;
    while r < rmax - 1e-12 {
        let d = interp(&r0, &p0, r) - interp(&r45, &p45, r);
        acc += d * d * h;
        r += h;
    }
    acc.sqrt()
}
