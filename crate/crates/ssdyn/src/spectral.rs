//! Spectral analysis of a table on ü + 2ξω u̇ + ω² u = f(t).

use nalgebra::{Complex, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tables::ButcherTable;

/// (ξ, Ω = ωΔt) with an optional ω when Δt must be separated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalParams {
    pub xi: f64,
    pub omega_dt: f64,
    pub omega: Option<f64>,
}

impl ModalParams {
    pub fn new(xi: f64, omega_dt: f64) -> Self {
        Self {
            xi,
            omega_dt,
            omega: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.xi) || !(self.omega_dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 ≤ ξ < 1 and Ω > 0 (ξ={}, Ω={})",
                self.xi, self.omega_dt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub omega_dt: f64,
    pub xi: f64,
    pub rho: f64,
    pub xibar: Option<f64>,
    pub pe: Option<f64>,
    pub principal_complex: bool,
}

/// Ω_s per ξ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityDomain {
    pub xi_grid: Vec<f64>,
    pub omega_s: Vec<StabilityLimit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StabilityLimit {
    /// Stable on (0, Ω_s].
    Conditional(f64),
    /// No instability found up to the scan ceiling.
    Unconditional,
    /// Unstable arbitrarily close to Ω = 0.
    Empty,
}

impl StabilityLimit {
    pub fn value(&self) -> Option<f64> {
        match self {
            StabilityLimit::Conditional(w) => Some(*w),
            _ => None,
        }
    }
}

/// D = α2Ω² + 2α4ξΩ + 1.
pub fn denominator(tbl: &ButcherTable, mp: &ModalParams) -> f64 {
    let (o, xi) = (mp.omega_dt, mp.xi);
    tbl.a(2) * o * o + 2.0 * tbl.a(4) * xi * o + 1.0
}

fn checked_denominator(tbl: &ButcherTable, mp: &ModalParams) -> Result<f64> {
    mp.validate()?;
    let d = denominator(tbl, mp);
    if d.abs() < 1e-300 || !d.is_finite() {
        return Err(Error::Singular("D = α2Ω² + 2α4ξΩ + 1 vanishes"));
    }
    Ok(d)
}

/// D_num acting on X_n = [u_n, u̇_n, ü_n]ᵀ with X_{n+1} = D_num X_n + L_num.
pub fn amplification_matrix(tbl: &ButcherTable, mp: &ModalParams, dt: f64) -> Result<Matrix3<f64>> {
    let d = checked_denominator(tbl, mp)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let w = mp.omega_dt / dt;
    let xi = mp.xi;
    let o2 = mp.omega_dt * mp.omega_dt;
    // a_{n+p} = cu·u + cv·v + ca·a (+ f/D)
    let cu = -w * w / d;
    let cv = -(2.0 * xi * w + tbl.p * dt * w * w) / d;
    let ca = -(2.0 * xi * w * tbl.a(3) * dt + tbl.a(1) * o2) / d;
    let (a5, a6, a7, a8, a9, a10) = (tbl.a(5), tbl.a(6), tbl.a(7), tbl.a(8), tbl.a(9), tbl.a(10));
    let dt2 = dt * dt;
    Ok(Matrix3::new(
        1.0 + a6 * dt2 * cu,
        dt + a6 * dt2 * cv,
        a5 * dt2 + a6 * dt2 * ca,
        a8 * dt * cu,
        1.0 + a8 * dt * cv,
        a7 * dt + a8 * dt * ca,
        a10 * cu,
        a10 * cv,
        a9 + a10 * ca,
    ))
}

/// L_num = f(t_{n+p})/D · [Δt²α6, Δtα8, α10]ᵀ.
pub fn load_operator(
    tbl: &ButcherTable,
    mp: &ModalParams,
    dt: f64,
    f_value: f64,
) -> Result<Vector3<f64>> {
    let d = checked_denominator(tbl, mp)?;
    let s = f_value / d;
    Ok(Vector3::new(
        dt * dt * tbl.a(6) * s,
        dt * tbl.a(8) * s,
        tbl.a(10) * s,
    ))
}

/// Coefficients of λ³ + A2λ² + A1λ + A0 = det(λI − D_num).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharCoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl CharCoeffs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.a0, self.a1, self.a2, self.a3]
    }

    /// Cubic discriminant; negative ⇔ one real root and a complex pair.
    pub fn discriminant(&self) -> f64 {
        let (a, b, c, d) = (self.a3, self.a2, self.a1, self.a0);
        18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c
            - 4.0 * a * c.powi(3)
            - 27.0 * a * a * d * d
    }
}

/// Closed-form characteristic coefficients.
/// Numerators of (a0, a1, a2, a3) as coefficients of 1, Ω, Ω²; the common denominator is D.
fn char_numerators(tbl: &ButcherTable, xi: f64) -> [[f64; 3]; 4] {
    let p = tbl.p;
    let [a1, a2, a3, a4, a5, a6, a7, a8, a9, a10] = tbl.alpha;
    let n2 = [
        -a9 - 2.0,
        -2.0 * ((a9 + 2.0) * a4 - a10 * a3 - a8) * xi,
        p * a8 + a1 * a10 + a6 - (a9 + 2.0) * a2,
    ];
    let n1 = [
        2.0 * a9 + 1.0,
        2.0 * ((2.0 * a4 - a8) * a9 + (a7 - 2.0 * a3) * a10 - a8 + a4) * xi,
        (2.0 * a2 - p * a8 - a6) * a9 + (a7 * p - 2.0 * a1 + a5) * a10 + (1.0 - p) * a8 + a2 - a6,
    ];
    let n0 = [
        -a9,
        -2.0 * xi * ((a4 - a8) * a9 + a10 * (a7 - a3)),
        ((p - 1.0) * a8 - a2 + a6) * a9 - ((p - 1.0) * a7 - a1 + a5) * a10,
    ];
    [n0, n1, n2, [1.0, 2.0 * a4 * xi, a2]]
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * x + k)
}

pub fn characteristic_coeffs(tbl: &ButcherTable, mp: &ModalParams) -> Result<CharCoeffs> {
    let d = checked_denominator(tbl, mp)?;
    let [n0, n1, n2, _] = char_numerators(tbl, mp.xi);
    let o = mp.omega_dt;
    Ok(CharCoeffs {
        a0: horner(&n0, o) / d,
        a1: horner(&n1, o) / d,
        a2: horner(&n2, o) / d,
        a3: 1.0,
    })
}

/// Characteristic coefficients of an arbitrary 3×3 matrix.
pub fn char_poly_of(m: &Matrix3<f64>) -> CharCoeffs {
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
        - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)]
        - m[(1, 2)] * m[(2, 1)];
    CharCoeffs {
        a0: -m.determinant(),
        a1: minors,
        a2: -m.trace(),
        a3: 1.0,
    }
}

pub fn eigenvalues(m: &Matrix3<f64>) -> [Complex<f64>; 3] {
    let e = m.complex_eigenvalues();
    [e[0], e[1], e[2]]
}

fn modal_matrix(tbl: &ButcherTable, mp: &ModalParams) -> Result<Matrix3<f64>> {
    amplification_matrix(tbl, mp, 1.0)
}

pub fn spectral_radius_of(m: &Matrix3<f64>) -> f64 {
    eigenvalues(m).iter().fold(0.0_f64, |r, l| r.max(l.norm()))
}

/// ρ = max |λ_j| of D_num.
pub fn spectral_radius(tbl: &ButcherTable, mp: &ModalParams) -> Result<f64> {
    Ok(spectral_radius_of(&modal_matrix(tbl, mp)?))
}

/// Routh–Hurwitz coefficients; stability ⇔ all nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouthHurwitz {
    pub b: [f64; 5],
}

impl RouthHurwitz {
    pub fn from_coeffs(c: &CharCoeffs) -> Self {
        let (a0, a1, a2, a3) = (c.a0, c.a1, c.a2, c.a3);
        let b0 = a0 + a1 + a2 + a3;
        let b1 = -3.0 * a0 - a1 + a2 + 3.0 * a3;
        let b2 = 3.0 * a0 - a1 - a2 + 3.0 * a3;
        let b3 = -a0 + a1 - a2 + a3;
        let b4 = b1 * b2 - b0 * b3;
        Self {
            b: [b0, b1, b2, b3, b4],
        }
    }

    pub fn is_stable(&self) -> bool {
        self.is_stable_tol(0.0)
    }

    /// All B_j ≥ −tol·(1 + max|B_j|); tolerates round-off on neutral roots.
    pub fn is_stable_tol(&self, tol: f64) -> bool {
        let scale = 1.0 + self.b.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        self.b.iter().all(|x| *x >= -tol * scale)
    }
}

/// Built as polynomials in Ω so that the O(Ω²) and O(Ω⁴) leading terms survive small Ω.
pub fn routh_hurwitz(tbl: &ButcherTable, mp: &ModalParams) -> Result<RouthHurwitz> {
    let d = checked_denominator(tbl, mp)?;
    let [n0, n1, n2, n3] = char_numerators(tbl, mp.xi);
    let a9 = tbl.alpha[8];
    let mut p = [[0.0; 3]; 4];
    for k in 1..3 {
        p[0][k] = n0[k] + n1[k] + n2[k] + n3[k];
        p[1][k] = -3.0 * n0[k] - n1[k] + n2[k] + 3.0 * n3[k];
        p[2][k] = 3.0 * n0[k] - n1[k] - n2[k] + 3.0 * n3[k];
        p[3][k] = -n0[k] + n1[k] - n2[k] + n3[k];
    }
    // constant terms of B0 and B1 vanish identically
    p[2][0] = 4.0 - 4.0 * a9;
    p[3][0] = 4.0 + 4.0 * a9;
    let mut q = [0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            q[i + j] += p[1][i] * p[2][j] - p[0][i] * p[3][j];
        }
    }
    let o = mp.omega_dt;
    let b = [
        horner(&p[0], o) / d,
        horner(&p[1], o) / d,
        horner(&p[2], o) / d,
        horner(&p[3], o) / d,
        horner(&q, o) / (d * d),
    ];
    Ok(RouthHurwitz { b })
}

const RH_TOL: f64 = 1e-12;

fn stable_at(tbl: &ButcherTable, xi: f64, omega: f64) -> bool {
    routh_hurwitz(tbl, &ModalParams::new(xi, omega)).is_ok_and(|rh| rh.is_stable_tol(RH_TOL))
}

/// Largest Ω with all B_j ≥ 0 on (0, Ω], bracketed by a scan and bisected to `tol`.
pub fn stability_limit(tbl: &ButcherTable, xi: f64, tol: f64) -> Result<StabilityLimit> {
    if !(tol > 0.0) || !(0.0..1.0).contains(&xi) {
        return Err(Error::InvalidArgument("need tol > 0 and 0 ≤ ξ < 1".into()));
    }
    let mut grid: Vec<f64> = Vec::new();
    let mut w = 1e-3;
    while w < 10.0 {
        grid.push(w);
        w += 2.5e-3;
    }
    while w < 1e4 {
        grid.push(w);
        w *= 1.01;
    }
    if !stable_at(tbl, xi, grid[0]) {
        return Ok(StabilityLimit::Empty);
    }
    let mut lo = grid[0];
    let mut hi = None;
    for &w in &grid[1..] {
        if stable_at(tbl, xi, w) {
            lo = w;
        } else {
            hi = Some(w);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(StabilityLimit::Unconditional);
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if stable_at(tbl, xi, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(StabilityLimit::Conditional(0.5 * (lo + hi)))
}

pub fn stability_domain(tbl: &ButcherTable, xi_grid: &[f64], tol: f64) -> Result<StabilityDomain> {
    let omega_s = xi_grid
        .iter()
        .map(|&xi| stability_limit(tbl, xi, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityDomain {
        xi_grid: xi_grid.to_vec(),
        omega_s,
    })
}

/// The complex pair of largest modulus (ties: largest |Im|), upper member.
pub fn principal_pair(m: &Matrix3<f64>) -> Option<Complex<f64>> {
    let ev = eigenvalues(m);
    let scale = ev.iter().fold(1.0_f64, |s, l| s.max(l.norm()));
    ev.iter()
        .filter(|l| l.im > 1e-12 * scale)
        .copied()
        .max_by(|a, b| {
            a.norm()
                .partial_cmp(&b.norm())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(
                    a.im.abs()
                        .partial_cmp(&b.im.abs())
                        .unwrap_or(std::cmp::Ordering::Equal),
                )
        })
}

/// (ξ̄, PE) from the principal pair of `m` at (Ω, ξ).
pub fn damping_and_period_error_of(m: &Matrix3<f64>, omega_dt: f64, xi: f64) -> Option<(f64, f64)> {
    let l = principal_pair(m)?;
    let a = l.norm().ln();
    let b = l.arg();
    let obar = a.hypot(b);
    let xibar = -a / obar;
    let pe = omega_dt * (1.0 - xi * xi).sqrt() / (obar * (1.0 - xibar * xibar).sqrt()) - 1.0;
    Some((xibar, pe))
}

/// Numerical damping ratio and relative period error; `None` past bifurcation.
pub fn damping_and_period_error(
    tbl: &ButcherTable,
    mp: &ModalParams,
) -> Result<Option<(f64, f64)>> {
    let m = modal_matrix(tbl, mp)?;
    Ok(damping_and_period_error_of(&m, mp.omega_dt, mp.xi))
}

pub fn spectral_sample(tbl: &ButcherTable, xi: f64, omega_dt: f64) -> Result<SpectralSample> {
    let mp = ModalParams::new(xi, omega_dt);
    let m = modal_matrix(tbl, &mp)?;
    let dp = damping_and_period_error_of(&m, omega_dt, xi);
    Ok(SpectralSample {
        omega_dt,
        xi,
        rho: spectral_radius_of(&m),
        xibar: dp.map(|x| x.0),
        pe: dp.map(|x| x.1),
        principal_complex: dp.is_some(),
    })
}

/// Exact one-step propagator of the free SDOF on [u, u̇, ü] (Δt = 1).
pub fn exact_propagator(xi: f64, omega_dt: f64) -> Matrix3<f64> {
    let w = omega_dt;
    let wd = w * (1.0 - xi * xi).sqrt();
    let e = (-xi * w).exp();
    let (s, c) = wd.sin_cos();
    // u(1), v(1) for unit u0 and unit v0
    let uu = e * (c + xi * w / wd * s);
    let uv = e * s / wd;
    let vu = -e * w * w / wd * s;
    let vv = e * (c - xi * w / wd * s);
    let acc = |u: f64, v: f64| -w * w * u - 2.0 * xi * w * v;
    Matrix3::new(uu, uv, 0.0, vu, vv, 0.0, acc(uu, vu), acc(uv, vv), 0.0)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

const COALESCE_TOL: f64 = 1e-10;

/// Smallest Ω in (0, upper] where the complex pair of `coeffs(Ω)` coalesces.
fn first_coalescence(
    coeffs: &dyn Fn(f64) -> Option<CharCoeffs>,
    upper: f64,
    tol: f64,
) -> Option<f64> {
    let disc = |w: f64| {
        coeffs(w)
            .map(|c| c.discriminant())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let n = 4000;
    let lo = (upper * 1e-3).min(1e-2);
    let grid: Vec<f64> = (0..=n)
        .map(|i| lo + (upper - lo) * i as f64 / n as f64)
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&w| disc(w)).collect();
    for i in 1..=n {
        if vals[i] >= 0.0 && vals[i - 1] < 0.0 {
            let (mut a, mut b) = (grid[i - 1], grid[i]);
            while b - a > tol {
                let m = 0.5 * (a + b);
                if disc(m) >= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Some(b);
        }
        if i < n && vals[i] > vals[i - 1] && vals[i] >= vals[i + 1] {
            if let Some(w) = local_touch(&disc, grid[i - 1], grid[i + 1], tol) {
                return Some(w);
            }
        }
    }
    // pair turning real exactly at the upper end (e.g. central difference at Ω = 2)
    if vals[n] > -COALESCE_TOL || disc(upper * (1.0 + 1e-7)) >= 0.0 {
        return Some(upper);
    }
    None
}

fn local_touch(disc: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let (w, v) = golden_max(disc, a, b, tol);
    (v > -COALESCE_TOL).then_some(w)
}

/// Ω_b: first coalescence of the principal complex pair within (0, Ω_s].
/// `None` when no coalescence occurs before instability.
pub fn bifurcation_point(tbl: &ButcherTable, xi: f64, tol: f64) -> Result<Option<f64>> {
    let upper = match stability_limit(tbl, xi, tol.min(1e-10))? {
        StabilityLimit::Conditional(w) => w,
        StabilityLimit::Unconditional => 100.0,
        StabilityLimit::Empty => return Ok(None),
    };
    let f = |w: f64| characteristic_coeffs(tbl, &ModalParams::new(xi, w)).ok();
    Ok(first_coalescence(&f, upper, tol))
}

/// Bifurcation search on an arbitrary matrix family over (0, upper].
pub fn bifurcation_point_of(m: &dyn Fn(f64) -> Matrix3<f64>, upper: f64, tol: f64) -> Option<f64> {
    let f = |w: f64| Some(char_poly_of(&m(w)));
    first_coalescence(&f, upper, tol)
}

/// Ω in (0, upper] minimizing ρ (located by scan + golden section).
pub fn min_rho_point(tbl: &ButcherTable, xi: f64, upper: f64) -> Result<(f64, f64)> {
    let rho = |w: f64| spectral_radius(tbl, &ModalParams::new(xi, w)).unwrap_or(f64::INFINITY);
    let n = 2000;
    let grid: Vec<f64> = (1..=n).map(|i| upper * i as f64 / n as f64).collect();
    let (i, _) =
        grid.iter()
            .map(|&w| rho(w))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, r)| if r < acc.1 { (i, r) } else { acc },
            );
    let a = if i == 0 { upper * 1e-6 } else { grid[i - 1] };
    let b = grid[(i + 1).min(n - 1)];
    let neg = |w: f64| -rho(w);
    let (w, v) = golden_max(&neg, a, b, 1e-9);
    Ok((w, -v))
}

/// Ω used as the "most dissipative" step: Ω_b when a coalescence exists,
/// otherwise the minimizer of ρ on (0, Ω_s].
pub fn dissipation_omega(tbl: &ButcherTable, xi: f64) -> Result<f64> {
    if let Some(w) = bifurcation_point(tbl, xi, 1e-10)? {
        return Ok(w);
    }
    let upper = stability_limit(tbl, xi, 1e-10)?.value().ok_or_else(|| {
        Error::InvalidArgument(format!("{} has no finite stability limit", tbl.label()))
    })?;
    Ok(min_rho_point(tbl, xi, upper)?.0)
}

/// Leading amplitude/phase error terms.
///
/// `eps` is the phase-rate error arg(λ)/Δt − ω√(1−ξ²); `delta` the
/// amplitude-rate error ln|λ|/Δt + ξω. Each is modelled as c·Δt^k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerms {
    pub eps_order: f64,
    pub eps_coeff: f64,
    pub delta_order: f64,
    pub delta_coeff: f64,
}

/// Phase-rate and amplitude-rate errors of the principal pair at Δt.
pub fn amplitude_phase_errors(
    tbl: &ButcherTable,
    xi: f64,
    omega: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    let mp = ModalParams {
        xi,
        omega_dt: omega * dt,
        omega: Some(omega),
    };
    let m = amplification_matrix(tbl, &mp, dt)?;
    let l =
        principal_pair(&m).ok_or_else(|| Error::Fit(format!("no complex pair at Δt = {dt}")))?;
    let eps = l.arg() / dt - omega * (1.0 - xi * xi).sqrt();
    let delta = l.norm().ln() / dt + xi * omega;
    Ok((eps, delta))
}

fn polyfit(x: &[f64], y: &[f64], deg: usize) -> Result<Vec<f64>> {
    let n = x.len();
    let a = nalgebra::DMatrix::from_fn(n, deg + 1, |i, j| x[i].powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Fit(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

/// Least-squares slope of log|y| against log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Fit("need at least two points".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    Ok(polyfit(&lx, &ly, 1)?[1])
}

fn fit_leading(h: &[f64], e: &[f64]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(e)
        .filter(|(h, e)| (*e * *h).abs() > 1e-11)
        .map(|(a, b)| (*a, *b))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} points above round-off",
            pts.len()
        )));
    }
    let (hs, es): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let order = loglog_slope(&hs, &es)?;
    let k = order.round();
    if (order - k).abs() > 0.25 {
        return Err(Error::Fit(format!(
            "slope {order:.3} is not near an integer"
        )));
    }
    let scaled: Vec<f64> = hs.iter().zip(&es).map(|(h, e)| e / h.powf(k)).collect();
    let deg = if hs.len() >= 4 { 2 } else { 1 };
    Ok((order, polyfit(&hs, &scaled, deg)?[0]))
}

/// Estimates orders and leading coefficients of ε and δ from a geometric
/// Δt ladder (8 points, ratio 1/2, starting at Ω = 0.2).
pub fn amplitude_phase_leading_terms(
    tbl: &ButcherTable,
    xi: f64,
    omega: f64,
) -> Result<LeadingTerms> {
    if !(0.0..1.0).contains(&xi) || !(omega > 0.0) {
        return Err(Error::InvalidArgument("need 0 ≤ ξ < 1 and ω > 0".into()));
    }
    let dt0 = 0.2 / omega;
    let mut h = Vec::new();
    let mut eps = Vec::new();
    let mut delta = Vec::new();
    for k in 0..8 {
        let dt = dt0 / 2f64.powi(k);
        let (e, d) = amplitude_phase_errors(tbl, xi, omega, dt)?;
        h.push(dt);
        eps.push(e);
        delta.push(d);
    }
    let (eo, ec) = fit_leading(&h, &eps)?;
    let (d_o, dc) = fit_leading(&h, &delta)?;
    Ok(LeadingTerms {
        eps_order: eo,
        eps_coeff: ec,
        delta_order: d_o,
        delta_coeff: dc,
    })
}
