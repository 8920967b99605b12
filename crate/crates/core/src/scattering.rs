//! Fixed-frequency forward scattering for a compactly supported penetrable
//! potential via the Lippmann-Schwinger volume integral equation
//! u = u^i + k^2 int Phi_k(x-y) V(y) u(y) dy, plus far-field patterns and a
//! semi-analytic mode-matching solver for constant-contrast disks.

use crate::geometry::{PotentialSpec, QuadratureGrid};
use crate::herglotz::HerglotzKernel;
use crate::specfun::{jn_prime, jn_signed, yn, yn_prime};
use crate::{Complex64, Error, Result, Vec2};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Node-count cap for the dense discretized operator.
pub const MAX_DENSE_NODES: usize = 6000;
/// Default relative residual tolerance for the linear solve.
pub const DEFAULT_SOLVE_TOL: f64 = 1e-8;

const GMRES_RESTART: usize = 60;
const GMRES_MAX_ITERS: usize = 400;

/// Outgoing fundamental solution Phi_k(x) = (i/4) H_0^(1)(k|x|).
pub fn fundamental_solution(k: f64, x: Vec2) -> Result<Complex64> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::Domain(
            "fundamental solution is singular at x = 0".into(),
        ));
    }
    Ok(phi(k, r))
}

pub(crate) fn phi(k: f64, r: f64) -> Complex64 {
    let kr = k * r;
    Complex64::new(0.0, 0.25) * Complex64::new(jn_signed(0, kr), yn(0, kr))
}

pub(crate) fn hankel_signed(m: i32, x: f64) -> Complex64 {
    let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
    let ma = m.unsigned_abs();
    s * Complex64::new(jn_signed(ma as i32, x), yn(ma, x))
}

pub(crate) fn hankel_signed_prime(m: i32, x: f64) -> Complex64 {
    let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
    let ma = m.unsigned_abs();
    s * Complex64::new(jn_prime(ma, x), yn_prime(ma, x))
}

pub(crate) fn jn_signed_prime(m: i32, x: f64) -> f64 {
    let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
    s * jn_prime(m.unsigned_abs(), x)
}

/// Exact integral of Phi_k over the disk of the same area as a cell of
/// weight w, used as the singularity-corrected self-interaction weight:
/// int_{|y|<a} Phi_k(y) dy = i pi a H_1^(1)(ka) / (2k) - 1/k^2, a = sqrt(w/pi).
fn self_cell_integral(k: f64, w: f64) -> Complex64 {
    let a = (w / PI).sqrt();
    let ka = k * a;
    let h1 = Complex64::new(jn_signed(1, ka), yn(1, ka));
    Complex64::new(0.0, PI * a / (2.0 * k)) * h1 - Complex64::new(1.0 / (k * k), 0.0)
}

/// Solution of the discretized Lippmann-Schwinger equation on a grid.
#[derive(Clone, Debug)]
pub struct ScatterResult {
    pub u: Vec<Complex64>,
    pub u_inc: Vec<Complex64>,
    pub k: f64,
    pub iterations: usize,
    pub residual: f64,
    pub used_dense_fallback: bool,
}

impl ScatterResult {
    pub fn scattered_on_grid(&self) -> Vec<Complex64> {
        self.u
            .iter()
            .zip(&self.u_inc)
            .map(|(u, ui)| u - ui)
            .collect()
    }
}

/// Discretized Lippmann-Schwinger operator I - k^2 Phi W V for one
/// (potential, grid, wavenumber) triple; reusable across right-hand sides.
pub struct LsOperator {
    grid: QuadratureGrid,
    v_vals: Vec<Complex64>,
    k: f64,
    matrix: DMatrix<Complex64>,
    lu: std::cell::RefCell<Option<nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>>>,
}

impl LsOperator {
    pub fn new(spec: &PotentialSpec, k: f64, grid: &QuadratureGrid) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("wavenumber k = {k} must be positive")));
        }
        let n = grid.len();
        if n == 0 {
            return Err(Error::Dimension("empty quadrature grid".into()));
        }
        if n > MAX_DENSE_NODES {
            return Err(Error::Resource(format!(
                "grid has {n} nodes; dense operator cap is {MAX_DENSE_NODES}"
            )));
        }
        let v_vals: Vec<Complex64> = grid.nodes.iter().map(|&x| spec.potential(x)).collect();
        let k2 = Complex64::new(k * k, 0.0);
        let mut matrix = DMatrix::<Complex64>::zeros(n, n);
        for p in 0..n {
            let xp = grid.nodes[p];
            for q in 0..n {
                let coupling = if p == q {
                    self_cell_integral(k, grid.weights[q])
                } else {
                    phi(k, (xp - grid.nodes[q]).norm()) * grid.weights[q]
                };
                matrix[(p, q)] = -k2 * coupling * v_vals[q];
            }
            matrix[(p, p)] += Complex64::new(1.0, 0.0);
        }
        Ok(LsOperator {
            grid: grid.clone(),
            v_vals,
            k,
            matrix,
            lu: std::cell::RefCell::new(None),
        })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn potential_values(&self) -> &[Complex64] {
        &self.v_vals
    }

    /// Solve for the total field given incident samples on the grid:
    /// restarted GMRES with a cached dense-LU fallback.
    pub fn solve(&self, u_inc: &[Complex64], tol: f64) -> Result<ScatterResult> {
        if u_inc.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "incident field has {} samples, grid has {}",
                u_inc.len(),
                self.grid.len()
            )));
        }
        let rhs = DVector::from_column_slice(u_inc);
        let (mut u, iterations, converged) = gmres(&self.matrix, &rhs, tol);
        let mut used_dense_fallback = false;
        if !converged {
            let mut lu = self.lu.borrow_mut();
            if lu.is_none() {
                *lu = Some(self.matrix.clone().lu());
            }
            u = lu
                .as_ref()
                .unwrap()
                .solve(&rhs)
                .ok_or_else(|| Error::Solver("dense fallback: singular operator".into()))?;
            used_dense_fallback = true;
        }
        let resid_vec = &self.matrix * &u - &rhs;
        let residual = resid_vec.norm() / rhs.norm().max(1e-300);
        if residual > tol * 10.0 {
            return Err(Error::Solver(format!(
                "linear solve stalled at relative residual {residual:.3e}"
            )));
        }
        Ok(ScatterResult {
            u: u.iter().cloned().collect(),
            u_inc: u_inc.to_vec(),
            k: self.k,
            iterations,
            residual,
            used_dense_fallback,
        })
    }
}

/// Restarted GMRES with Givens rotations; returns (x, iterations, converged).
fn gmres(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    tol: f64,
) -> (DVector<Complex64>, usize, bool) {
    let n = b.len();
    let bnorm = b.norm().max(1e-300);
    let mut x = DVector::<Complex64>::zeros(n);
    let mut total_iters = 0usize;
    while total_iters < GMRES_MAX_ITERS {
        let r = b - a * &x;
        let beta = r.norm();
        if beta / bnorm <= tol {
            return (x, total_iters, true);
        }
        let m = GMRES_RESTART.min(GMRES_MAX_ITERS - total_iters);
        let mut v: Vec<DVector<Complex64>> = vec![r / Complex64::new(beta, 0.0)];
        let mut h = DMatrix::<Complex64>::zeros(m + 1, m);
        let mut cs = vec![Complex64::new(0.0, 0.0); m];
        let mut sn = vec![Complex64::new(0.0, 0.0); m];
        let mut g = DVector::<Complex64>::zeros(m + 1);
        g[0] = Complex64::new(beta, 0.0);
        let mut k_used = 0;
        for j in 0..m {
            let mut w = a * &v[j];
            for (i, vi) in v.iter().enumerate() {
                let hij = vi.dotc(&w);
                h[(i, j)] = hij;
                w -= vi * hij;
            }
            let hnext = w.norm();
            h[(j + 1, j)] = Complex64::new(hnext, 0.0);
            // apply previous Givens rotations to column j
            for i in 0..j {
                let t = cs[i].conj() * h[(i, j)] + sn[i].conj() * h[(i + 1, j)];
                h[(i + 1, j)] = -sn[i] * h[(i, j)] + cs[i] * h[(i + 1, j)];
                h[(i, j)] = t;
            }
            // new rotation zeroing h[j+1, j]
            let denom = (h[(j, j)].norm_sqr() + h[(j + 1, j)].norm_sqr()).sqrt();
            if denom > 0.0 {
                cs[j] = h[(j, j)] / denom;
                sn[j] = h[(j + 1, j)] / denom;
            } else {
                cs[j] = Complex64::new(1.0, 0.0);
                sn[j] = Complex64::new(0.0, 0.0);
            }
            h[(j, j)] = cs[j].conj() * h[(j, j)] + sn[j].conj() * h[(j + 1, j)];
            h[(j + 1, j)] = Complex64::new(0.0, 0.0);
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            k_used = j + 1;
            total_iters += 1;
            let rel = g[j + 1].norm() / bnorm;
            if rel <= tol || hnext == 0.0 {
                break;
            }
            if j + 1 < m {
                v.push(w / Complex64::new(hnext, 0.0));
            }
        }
        // back substitution on the k_used x k_used triangular system
        let mut y = vec![Complex64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for (jj, yj) in y.iter().enumerate().take(k_used).skip(i + 1) {
                s -= h[(i, jj)] * yj;
            }
            y[i] = s / h[(i, i)];
        }
        for (i, yi) in y.iter().enumerate() {
            x += &v[i] * *yi;
        }
        let r = b - a * &x;
        if r.norm() / bnorm <= tol {
            return (x, total_iters, true);
        }
    }
    (x, total_iters, false)
}

/// Convenience wrapper: build the operator and solve for one incident field.
pub fn solve_total_field<F: Fn(Vec2) -> Complex64>(
    spec: &PotentialSpec,
    u_i: F,
    k: f64,
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<ScatterResult> {
    let op = LsOperator::new(spec, k, grid)?;
    let u_inc: Vec<Complex64> = grid.nodes.iter().map(|&x| u_i(x)).collect();
    op.solve(&u_inc, tol)
}

/// Far-field pattern on equispaced directions with its L^2(S^1) norm.
#[derive(Clone, Debug)]
pub struct FarFieldPattern {
    pub angles: Vec<f64>,
    pub values: Vec<Complex64>,
    pub l2_norm: f64,
}

impl FarFieldPattern {
    pub fn from_values(angles: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if angles.len() < 64 || angles.len() != values.len() {
            return Err(Error::Dimension(
                "far-field pattern needs >= 64 matching angle/value samples".into(),
            ));
        }
        let l2_norm = trapezoid_circle_norm(&values);
        Ok(FarFieldPattern {
            angles,
            values,
            l2_norm,
        })
    }
}

/// sqrt(2 pi / M sum |v|^2): the trapezoid rule for ||.||_{L^2(S^1)} on
/// equispaced periodic samples.
fn trapezoid_circle_norm(values: &[Complex64]) -> f64 {
    (2.0 * PI / values.len() as f64 * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// u^s_inf(theta) = e^{i pi/4}/sqrt(8 pi k) k^2 int e^{-ik theta.y} V u dy,
/// normalized so u = u^i + e^{ik|x|}/sqrt(|x|) u^s_inf(x/|x|) + O(|x|^{-1}).
pub fn far_field(
    spec: &PotentialSpec,
    result: &ScatterResult,
    grid: &QuadratureGrid,
    m_dirs: usize,
) -> Result<FarFieldPattern> {
    if m_dirs < 64 {
        return Err(Error::Dimension(format!(
            "far-field pattern needs >= 64 directions, got {m_dirs}"
        )));
    }
    if result.u.len() != grid.len() {
        return Err(Error::Dimension(
            "field samples do not match the grid".into(),
        ));
    }
    let k = result.k;
    let c0 = Complex64::new(0.0, PI / 4.0).exp() / (8.0 * PI * k).sqrt() * k * k;
    let vu: Vec<Complex64> = grid
        .nodes
        .iter()
        .zip(&result.u)
        .zip(&grid.weights)
        .map(|((&y, &u), &w)| spec.potential(y) * u * w)
        .collect();
    let mut angles = Vec::with_capacity(m_dirs);
    let mut values = Vec::with_capacity(m_dirs);
    for j in 0..m_dirs {
        let theta = 2.0 * PI * j as f64 / m_dirs as f64;
        let d = Vec2::new(theta.cos(), theta.sin());
        let mut s = Complex64::new(0.0, 0.0);
        for (y, vu_w) in grid.nodes.iter().zip(&vu) {
            s += Complex64::new(0.0, -k * d.dot(y)).exp() * vu_w;
        }
        angles.push(theta);
        values.push(c0 * s);
    }
    FarFieldPattern::from_values(angles, values)
}

/// Scattered field anywhere via the representation
/// u^s(x) = k^2 int Phi_k(x - y) V(y) u(y) dy. Inside supp V the volume
/// potential quadrature degrades; callers wanting interior values should use
/// (u - u^i) on the grid instead.
pub fn scattered_field_at(
    spec: &PotentialSpec,
    result: &ScatterResult,
    grid: &QuadratureGrid,
    points: &[Vec2],
) -> Result<Vec<Complex64>> {
    let k = result.k;
    let k2 = Complex64::new(k * k, 0.0);
    let vu: Vec<Complex64> = grid
        .nodes
        .iter()
        .zip(&result.u)
        .zip(&grid.weights)
        .map(|((&y, &u), &w)| spec.potential(y) * u * w)
        .collect();
    Ok(points
        .iter()
        .map(|&x| {
            let mut s = Complex64::new(0.0, 0.0);
            for (y, vu_w) in grid.nodes.iter().zip(&vu) {
                let r = (x - y).norm();
                if r > 0.0 {
                    s += phi(k, r) * vu_w;
                }
            }
            k2 * s
        })
        .collect())
}

/// Per-mode coefficients of the constant-contrast disk: the scattered-wave
/// Hankel coefficient b_m and interior Bessel coefficient d_m matching an
/// incident coefficient a_m (incident field a_m J_m(kr) e^{im phi}).
#[derive(Clone, Debug)]
pub struct DiskModeCoefficients {
    pub m: i32,
    pub b: Complex64,
    pub d: Complex64,
}

/// Mode-matching solver for a disk of radius `a` centered at the origin with
/// constant real contrast V > -1: continuity of the field and its radial
/// derivative at r = a per angular mode. Exact up to special-function
/// accuracy; used as the high-precision oracle for the disk geometry.
pub fn disk_mode_coefficients(
    a: f64,
    contrast: f64,
    k: f64,
    incident: &HerglotzKernel,
) -> Result<Vec<DiskModeCoefficients>> {
    if !(a > 0.0 && k > 0.0) {
        return Err(Error::Domain("disk radius and k must be positive".into()));
    }
    if contrast <= -1.0 {
        return Err(Error::Domain(
            "mode matching requires real contrast > -1".into(),
        ));
    }
    let n_idx = (1.0 + contrast).sqrt();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = Vec::new();
    for m in -(incident.m_max() as i32)..=incident.m_max() as i32 {
        let c = incident.coeff(m);
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let a_m = 2.0 * PI * c * i_unit.powi(m);
        let (b, d) = match_mode(m, a, n_idx, k, a_m);
        out.push(DiskModeCoefficients { m, b, d });
    }
    Ok(out)
}

fn match_mode(m: i32, a: f64, n_idx: f64, k: f64, a_m: Complex64) -> (Complex64, Complex64) {
    let ka = k * a;
    let nka = n_idx * k * a;
    // [H_m(ka)   -J_m(nka) ] [b]   [-a_m J_m(ka) ]
    // [k H'_m(ka) -nk J'_m(nka)] [d] = [-a_m k J'_m(ka)]
    let h = hankel_signed(m, ka);
    let hp = hankel_signed_prime(m, ka) * k;
    let j_in = jn_signed(m, nka);
    let jp_in = jn_signed_prime(m, nka) * n_idx * k;
    let j_out = jn_signed(m, ka);
    let jp_out = jn_signed_prime(m, ka) * k;
    let det = h * (-jp_in) - (-j_in) * hp;
    let r1 = -a_m * j_out;
    let r2 = -a_m * jp_out;
    let b = (r1 * (-jp_in) - (-j_in) * r2) / det;
    let d = (h * r2 - r1 * hp) / det;
    (b, d)
}

/// Far-field pattern of the mode-matching disk solution, in the same
/// normalization as `far_field`:
/// u^s_inf(phi) = sqrt(2/(pi k)) e^{-i pi/4} sum b_m (-i)^m e^{im phi}.
pub fn disk_far_field(
    a: f64,
    contrast: f64,
    k: f64,
    incident: &HerglotzKernel,
    m_dirs: usize,
) -> Result<FarFieldPattern> {
    if m_dirs < 64 {
        return Err(Error::Dimension(format!(
            "far-field pattern needs >= 64 directions, got {m_dirs}"
        )));
    }
    let modes = disk_mode_coefficients(a, contrast, k, incident)?;
    let pref = (2.0 / (PI * k)).sqrt() * Complex64::new(0.0, -PI / 4.0).exp();
    let mi = Complex64::new(0.0, -1.0);
    let mut angles = Vec::with_capacity(m_dirs);
    let mut values = Vec::with_capacity(m_dirs);
    for j in 0..m_dirs {
        let phi_a = 2.0 * PI * j as f64 / m_dirs as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for mode in &modes {
            s += mode.b * mi.powi(mode.m) * Complex64::new(0.0, mode.m as f64 * phi_a).exp();
        }
        angles.push(phi_a);
        values.push(pref * s);
    }
    FarFieldPattern::from_values(angles, values)
}

/// Total field of the mode-matching disk solution at any point.
pub fn disk_total_field(
    a: f64,
    contrast: f64,
    k: f64,
    incident: &HerglotzKernel,
    x: Vec2,
) -> Result<Complex64> {
    let modes = disk_mode_coefficients(a, contrast, k, incident)?;
    let r = x.norm();
    let phi_x = x.y.atan2(x.x);
    let n_idx = (1.0 + contrast).sqrt();
    if r >= a {
        let mut s = incident.evaluate_at(k, x);
        for mode in &modes {
            s += mode.b
                * hankel_signed(mode.m, k * r.max(1e-300))
                * Complex64::new(0.0, mode.m as f64 * phi_x).exp();
        }
        Ok(s)
    } else {
        let mut s = Complex64::new(0.0, 0.0);
        for mode in &modes {
            s += mode.d
                * jn_signed(mode.m, n_idx * k * r)
                * Complex64::new(0.0, mode.m as f64 * phi_x).exp();
        }
        Ok(s)
    }
}
