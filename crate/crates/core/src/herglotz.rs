//! Herglotz wave functions with circular-Fourier kernels: evaluation via the
//! Jacobi-Anger expansion, derivatives and vanishing order at a point,
//! order-constrained kernel synthesis, and Tikhonov-regularized fitting of
//! kernels to interior fields.

use crate::geometry::QuadratureGrid;
use crate::specfun::jn_signed;
use crate::{Complex64, Error, Result, Vec2};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest supported kernel truncation degree M.
pub const MAX_TRUNCATION: usize = 64;
/// Largest supported multi-index length for derivatives (factorial growth).
pub const MAX_DERIVATIVE_ORDER: u32 = 12;
/// Default relative threshold for vanishing-order detection.
pub const DEFAULT_ORDER_TOL: f64 = 1e-8;

/// Density g on the unit circle represented by Fourier coefficients,
/// g(theta) = sum_{|m| <= M} c_m e^{i m theta}.
#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzKernel {
    coeffs: Vec<Complex64>, // index m + m_max
    m_max: usize,
    l2_norm: f64,
}

impl HerglotzKernel {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::Dimension(
                "coefficient vector must have odd length 2M+1".into(),
            ));
        }
        let m_max = coeffs.len() / 2;
        if m_max > MAX_TRUNCATION {
            return Err(Error::Dimension(format!(
                "truncation {m_max} exceeds cap {MAX_TRUNCATION}"
            )));
        }
        let l2_norm = kernel_norm(&coeffs);
        Ok(HerglotzKernel {
            coeffs,
            m_max,
            l2_norm,
        })
    }

    pub fn single_mode(m: i32, c: Complex64) -> Result<Self> {
        let m_abs = m.unsigned_abs() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m_abs + 1];
        coeffs[(m + m_abs as i32) as usize] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn coeff(&self, m: i32) -> Complex64 {
        if m.unsigned_abs() as usize > self.m_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(m + self.m_max as i32) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// ||g||_{L^2(S^1)} = sqrt(2 pi sum |c_m|^2).
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    /// g(theta) as a pointwise sum of the Fourier series.
    pub fn density(&self, theta: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for m in -(self.m_max as i32)..=self.m_max as i32 {
            s += self.coeff(m) * Complex64::new(0.0, m as f64 * theta).exp();
        }
        s
    }

    pub fn normalize(&self) -> Result<Self> {
        if self.l2_norm <= 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero kernel".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / self.l2_norm, 0.0)))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c * s).collect();
        let l2_norm = kernel_norm(&coeffs);
        HerglotzKernel {
            coeffs,
            m_max: self.m_max,
            l2_norm,
        }
    }

    /// self + s * other, padded to the larger truncation.
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Result<Self> {
        let m_max = self.m_max.max(other.m_max);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m_max + 1];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let m = i as i32 - m_max as i32;
            *c = self.coeff(m) + s * other.coeff(m);
        }
        Self::from_coeffs(coeffs)
    }

    /// u^i(x) = int_{S^1} e^{ik theta . x} g(theta) dsigma(theta), evaluated
    /// exactly in the Fourier basis: 2 pi sum_m c_m i^m J_m(k|x|) e^{i m phi}.
    pub fn evaluate_at(&self, k: f64, x: Vec2) -> Complex64 {
        let r = x.norm();
        if r == 0.0 {
            return 2.0 * PI * self.coeff(0);
        }
        let phi = x.y.atan2(x.x);
        let i_unit = Complex64::new(0.0, 1.0);
        let mut s = Complex64::new(0.0, 0.0);
        for m in -(self.m_max as i32)..=self.m_max as i32 {
            let c = self.coeff(m);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            s += c * i_unit.powi(m) * jn_signed(m, k * r) * (i_unit * (m as f64 * phi)).exp();
        }
        2.0 * PI * s
    }

    pub fn evaluate(&self, k: f64, points: &[Vec2]) -> Result<Vec<Complex64>> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("wavenumber k = {k} must be positive")));
        }
        Ok(points.iter().map(|&x| self.evaluate_at(k, x)).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(KernelJson {
            m: self.m_max,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        })
        .expect("kernel serialization cannot fail")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let kj: KernelJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Config(format!("bad kernel JSON: {e}")))?;
        if kj.coeffs.len() != 2 * kj.m + 1 {
            return Err(Error::Config(format!(
                "kernel JSON: expected {} coefficients, got {}",
                2 * kj.m + 1,
                kj.coeffs.len()
            )));
        }
        Self::from_coeffs(
            kj.coeffs
                .iter()
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    #[serde(rename = "M")]
    m: usize,
    coeffs: Vec<[f64; 2]>,
}

fn kernel_norm(coeffs: &[Complex64]) -> f64 {
    (2.0 * PI * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}

/// Degree-N homogeneous harmonic polynomial
/// P(x, y) = a Re((x+iy)^N) + b Im((x+iy)^N) with complex a, b.
#[derive(Clone, Debug)]
pub struct HomHarmonicPoly {
    degree: usize,
    a: Complex64,
    b: Complex64,
    norm: f64,
}

pub const POLY_NORM_QUADRATURE_POINTS: usize = 512;

impl HomHarmonicPoly {
    pub fn new(degree: usize, a: Complex64, b: Complex64) -> Self {
        let mut p = HomHarmonicPoly {
            degree,
            a,
            b,
            norm: 0.0,
        };
        p.norm = p.compute_norm();
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    pub fn eval(&self, x: Vec2) -> Complex64 {
        let z = Complex64::new(x.x, x.y).powu(self.degree as u32);
        self.a * z.re + self.b * z.im
    }

    /// Value on the unit circle at angle theta.
    pub fn eval_dir(&self, theta: f64) -> Complex64 {
        let z = Complex64::new(0.0, self.degree as f64 * theta).exp();
        self.a * z.re + self.b * z.im
    }

    /// ||P|| = int_{S^1} |P(theta)| dsigma(theta), by 512-point quadrature.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    fn compute_norm(&self) -> f64 {
        let n = POLY_NORM_QUADRATURE_POINTS;
        let mut s = 0.0;
        for i in 0..n {
            let theta = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            s += self.eval_dir(theta).norm();
        }
        s * 2.0 * PI / n as f64
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::new(self.degree, self.a * s, self.b * s)
    }
}

/// Quadrature node count that resolves the integrand e^{ik theta.x} g(theta)
/// times a trigonometric factor to machine precision.
fn circle_nodes(m_max: usize, k: f64, x: Vec2, extra: u32) -> usize {
    2 * (m_max + (k * x.norm()).ceil() as usize + extra as usize) + 64
}

/// d^gamma u^i(x_c) = int (ik theta_1)^{gamma_1} (ik theta_2)^{gamma_2}
/// e^{ik theta . x_c} g(theta) dsigma(theta). The integrand is periodic and
/// entire, so the trapezoid rule converges spectrally.
pub fn derivative_at(
    g: &HerglotzKernel,
    k: f64,
    x_c: Vec2,
    gamma: [u32; 2],
) -> Result<Complex64> {
    let order = gamma[0] + gamma[1];
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "derivative order {order} exceeds cap {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let n = circle_nodes(g.m_max(), k, x_c, order);
    let ik = Complex64::new(0.0, k);
    let mut s = Complex64::new(0.0, 0.0);
    for l in 0..n {
        let theta = 2.0 * PI * l as f64 / n as f64;
        let (st, ct) = theta.sin_cos();
        let phase = (ik * (ct * x_c.x + st * x_c.y)).exp();
        let factor = (ik * ct).powu(gamma[0]) * (ik * st).powu(gamma[1]);
        s += factor * phase * g.density(theta);
    }
    Ok(s * 2.0 * PI / n as f64)
}

/// Rows of the derivative functional on the Fourier basis kernels e^{im.},
/// one entry per m in -m_trunc..=m_trunc.
fn basis_derivative_row(k: f64, x_c: Vec2, gamma: [u32; 2], m_trunc: usize) -> Vec<Complex64> {
    let n = circle_nodes(m_trunc, k, x_c, gamma[0] + gamma[1]);
    let ik = Complex64::new(0.0, k);
    let mut row = vec![Complex64::new(0.0, 0.0); 2 * m_trunc + 1];
    for l in 0..n {
        let theta = 2.0 * PI * l as f64 / n as f64;
        let (st, ct) = theta.sin_cos();
        let f = (ik * ct).powu(gamma[0])
            * (ik * st).powu(gamma[1])
            * (ik * (ct * x_c.x + st * x_c.y)).exp();
        for (i, r) in row.iter_mut().enumerate() {
            let m = i as i32 - m_trunc as i32;
            *r += f * Complex64::new(0.0, m as f64 * theta).exp();
        }
    }
    for r in &mut row {
        *r *= 2.0 * PI / n as f64;
    }
    row
}

fn multi_indices(total: u32) -> impl Iterator<Item = [u32; 2]> {
    (0..=total).map(move |j| [total - j, j])
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

#[derive(Clone, Debug)]
pub struct VanishingOrder {
    pub order: usize,
    pub leading: HomHarmonicPoly,
    /// L^2(S^1) norm of the non-harmonic part of the degree-N Taylor
    /// polynomial on the circle; small because (Delta + k^2) u^i = 0 forces
    /// the leading polynomial harmonic.
    pub projection_residual: f64,
}

/// Smallest N whose degree-N Taylor coefficients of u^i at x_c exceed the
/// threshold tol * ||g||, together with the leading harmonic polynomial.
pub fn vanishing_order(
    g: &HerglotzKernel,
    k: f64,
    x_c: Vec2,
    tol: f64,
    n_max: usize,
) -> Result<VanishingOrder> {
    if g.l2_norm() <= 0.0 {
        return Err(Error::Degenerate("zero kernel has no finite order".into()));
    }
    let threshold = tol * g.l2_norm();
    for n in 0..=n_max {
        let taylor: Vec<Complex64> = multi_indices(n as u32)
            .map(|gamma| {
                derivative_at(g, k, x_c, gamma)
                    .map(|d| d / (factorial(gamma[0]) * factorial(gamma[1])))
            })
            .collect::<Result<_>>()?;
        if taylor.iter().any(|t| t.norm() > threshold) {
            let (poly, residual) = project_harmonic(n, &taylor);
            return Ok(VanishingOrder {
                order: n,
                leading: poly,
                projection_residual: residual,
            });
        }
    }
    Err(Error::OrderExceedsMax(n_max))
}

/// Project a degree-N homogeneous polynomial, given by Taylor coefficients
/// t_j for gamma = (N-j, j), onto the harmonic span {z^N, conj(z)^N}. On the
/// unit circle the harmonic part carries exactly the e^{+-iN theta} Fourier
/// modes, so the projection is a Fourier extraction.
fn project_harmonic(n: usize, taylor: &[Complex64]) -> (HomHarmonicPoly, f64) {
    let n_s = POLY_NORM_QUADRATURE_POINTS;
    let mut a_plus = Complex64::new(0.0, 0.0);
    let mut a_minus = Complex64::new(0.0, 0.0);
    let mut power = 0.0;
    for s in 0..n_s {
        let theta = 2.0 * PI * (s as f64 + 0.5) / n_s as f64;
        let (st, ct) = theta.sin_cos();
        let mut p = Complex64::new(0.0, 0.0);
        for (j, t) in taylor.iter().enumerate() {
            p += t * ct.powi((n - j) as i32) * st.powi(j as i32);
        }
        let e = Complex64::new(0.0, n as f64 * theta).exp();
        a_plus += p * e.conj();
        a_minus += p * e;
        power += p.norm_sqr();
    }
    a_plus /= n_s as f64;
    a_minus /= n_s as f64;
    power *= 2.0 * PI / n_s as f64;
    // a_+ z^N + a_- conj(z)^N = (a_+ + a_-) Re z^N + i (a_+ - a_-) Im z^N
    let a = a_plus + a_minus;
    let b = Complex64::new(0.0, 1.0) * (a_plus - a_minus);
    let harmonic_power = if n == 0 {
        2.0 * PI * a_plus.norm_sqr()
    } else {
        2.0 * PI * (a_plus.norm_sqr() + a_minus.norm_sqr())
    };
    let residual = (power - harmonic_power).max(0.0).sqrt();
    let poly = if n == 0 {
        HomHarmonicPoly::new(0, a_plus, Complex64::new(0.0, 0.0))
    } else {
        HomHarmonicPoly::new(n, a, b)
    };
    (poly, residual)
}

/// Orthonormal basis (columns) of the kernel-coefficient null space of the
/// constraints d^gamma u^i(x_c) = 0 for |gamma| < n_order, truncation m_trunc.
pub fn vanishing_constraint_nullspace(
    k: f64,
    x_c: Vec2,
    n_order: usize,
    m_trunc: usize,
) -> Result<DMatrix<Complex64>> {
    let n_constraints: usize = (0..n_order).map(|n| n + 1).sum();
    let dim = 2 * m_trunc + 1;
    if n_constraints >= dim {
        return Err(Error::Dimension(format!(
            "{n_constraints} constraints need truncation dimension > {n_constraints}, got {dim}"
        )));
    }
    if n_order == 0 {
        return Ok(DMatrix::identity(dim, dim));
    }
    let mut a = DMatrix::<Complex64>::zeros(n_constraints, dim);
    let mut r = 0;
    for n in 0..n_order {
        for gamma in multi_indices(n as u32) {
            let row = basis_derivative_row(k, x_c, gamma, m_trunc);
            for (c, v) in row.iter().enumerate() {
                a[(r, c)] = *v;
            }
            r += 1;
        }
    }
    // null space from the Hermitian eigenproblem of A^H A
    let ata = a.adjoint() * &a;
    let eig = nalgebra::SymmetricEigen::new(ata);
    let lambda_max = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let mut cols = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= 1e-20 * lambda_max {
            cols.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    if cols.is_empty() {
        return Err(Error::Dimension(
            "constraint null space is empty at this truncation".into(),
        ));
    }
    let mut basis = DMatrix::<Complex64>::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        basis.set_column(j, c);
    }
    Ok(basis)
}

/// Quadratic form c -> ||P_N(c)||^2_{L^2(S^1)} of the degree-N Taylor
/// polynomial of the Herglotz wave with kernel coefficients c.
fn degree_form(k: f64, x_c: Vec2, n_order: usize, m_trunc: usize) -> DMatrix<Complex64> {
    let dim = 2 * m_trunc + 1;
    let n_s = 128;
    let mut g_mat = DMatrix::<Complex64>::zeros(n_s, dim);
    for gamma in multi_indices(n_order as u32) {
        let row = basis_derivative_row(k, x_c, gamma, m_trunc);
        let fact = factorial(gamma[0]) * factorial(gamma[1]);
        for s in 0..n_s {
            let theta = 2.0 * PI * (s as f64 + 0.5) / n_s as f64;
            let w = theta.cos().powi(gamma[0] as i32) * theta.sin().powi(gamma[1] as i32);
            for c in 0..dim {
                g_mat[(s, c)] += row[c] * (w / fact);
            }
        }
    }
    let mut q = g_mat.adjoint() * &g_mat;
    q *= Complex64::new(2.0 * PI / n_s as f64, 0.0);
    q
}

/// Normalized kernel whose Herglotz wave vanishes to order n_order at x_c;
/// among the constraint null space, the member maximizing the L^2(S^1) norm
/// of the degree-N Taylor polynomial (a quadratic surrogate for ||P_N||).
pub fn synthesize_vanishing_kernel(
    k: f64,
    x_c: Vec2,
    n_order: usize,
    m_trunc: usize,
) -> Result<HerglotzKernel> {
    let basis = vanishing_constraint_nullspace(k, x_c, n_order, m_trunc)?;
    if n_order == 0 {
        // no constraints: the c_0-only kernel, normalized
        return HerglotzKernel::single_mode(0, Complex64::new(1.0, 0.0))?.normalize();
    }
    let q = degree_form(k, x_c, n_order, m_trunc);
    let qn = basis.adjoint() * &q * &basis;
    let eig = nalgebra::SymmetricEigen::new(qn);
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &l)| {
            if l > acc.1 {
                (i, l)
            } else {
                acc
            }
        });
    let w = eig.eigenvectors.column(best);
    let c = &basis * w;
    HerglotzKernel::from_coeffs(c.iter().cloned().collect())?.normalize()
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub kernel: HerglotzKernel,
    /// achieved L^2(Omega) residual ||u_g - target||
    pub residual: f64,
    pub conditioning_warning: bool,
}

/// Tikhonov least squares: minimize the sum of ||u_g - target||^2_{L^2(Omega)}
/// and lambda ||g||^2_{L^2(S^1)} over truncation-M kernels, via the normal
/// equations in the Fourier basis. `lambda = None` picks the default
/// 1e-10 * (largest normal-matrix diagonal).
pub fn fit_kernel(
    grid: &QuadratureGrid,
    target: &[Complex64],
    k: f64,
    m_trunc: usize,
    lambda: Option<f64>,
) -> Result<FitResult> {
    if target.len() != grid.len() {
        return Err(Error::Dimension(format!(
            "target has {} samples, grid has {}",
            target.len(),
            grid.len()
        )));
    }
    if target.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
        return Err(Error::Domain("target contains non-finite samples".into()));
    }
    if let Some(l) = lambda {
        if l < 0.0 {
            return Err(Error::Domain("lambda must be non-negative".into()));
        }
    }
    let dim = 2 * m_trunc + 1;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut e = DMatrix::<Complex64>::zeros(grid.len(), dim);
    for (p, &x) in grid.nodes.iter().enumerate() {
        let r = x.norm();
        let phi = x.y.atan2(x.x);
        for c in 0..dim {
            let m = c as i32 - m_trunc as i32;
            e[(p, c)] = 2.0
                * PI
                * i_unit.powi(m)
                * jn_signed(m, k * r)
                * (i_unit * (m as f64 * phi)).exp();
        }
    }
    let w = DVector::<f64>::from_column_slice(&grid.weights);
    let mut ew = e.clone();
    for (p, mut row) in ew.row_iter_mut().enumerate() {
        row *= Complex64::new(w[p], 0.0);
    }
    let mut normal = e.adjoint() * &ew;
    let rhs = ew.adjoint() * DVector::from_column_slice(target);
    let max_diag = (0..dim)
        .map(|i| normal[(i, i)].re)
        .fold(0.0_f64, f64::max);
    let lambda = lambda.unwrap_or(1e-10 * max_diag);
    for i in 0..dim {
        normal[(i, i)] += Complex64::new(2.0 * PI * lambda, 0.0);
    }
    let mut conditioning_warning = false;
    if lambda == 0.0 {
        let svd = normal.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= 1e-12 * smax {
            conditioning_warning = true;
        }
    }
    let sol = normal
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| normal.lu().solve(&rhs))
        .ok_or_else(|| Error::Solver("normal equations are singular".into()))?;
    let kernel = HerglotzKernel::from_coeffs(sol.iter().cloned().collect())?;
    let fitted = e * &sol;
    let residual = (0..grid.len())
        .map(|p| w[p] * (fitted[p] - target[p]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        kernel,
        residual,
        conditioning_warning,
    })
}

/// Constant C with |R_N(x)| <= C |x - x_c|^{N+1} for the degree-N Taylor
/// remainder of the Herglotz wave, valid for |x - x_c| <= 1:
/// C = (sum_{|beta|=N+1} 1/beta!) k^{N+1} sqrt(2 pi) ||g||.
pub fn taylor_remainder_bound(g: &HerglotzKernel, k: f64, n: usize) -> f64 {
    let np1 = n as u32 + 1;
    let sum_inv: f64 = multi_indices(np1)
        .map(|b| 1.0 / (factorial(b[0]) * factorial(b[1])))
        .sum();
    sum_inv * k.powi(np1 as i32) * (2.0 * PI).sqrt() * g.l2_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_kernel(rng: &mut ChaCha8Rng, m_max: usize) -> HerglotzKernel {
        let coeffs: Vec<Complex64> = (0..2 * m_max + 1)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        HerglotzKernel::from_coeffs(coeffs).unwrap()
    }

    #[test]
    fn evaluate_matches_defining_integral() {
        // c_0 = 1/(2 pi): u^i(x) = J_0(k|x|); compare against 2048-point
        // trapezoid quadrature of the plane-wave superposition
        let g = HerglotzKernel::single_mode(0, Complex64::new(1.0 / (2.0 * PI), 0.0)).unwrap();
        let k = 2.5;
        for &x in &[Vec2::new(0.3, -0.2), Vec2::new(1.0, 2.0), Vec2::zeros()] {
            let val = g.evaluate_at(k, x);
            let n = 2048;
            let mut oracle = Complex64::new(0.0, 0.0);
            for l in 0..n {
                let theta = 2.0 * PI * l as f64 / n as f64;
                let d = Vec2::new(theta.cos(), theta.sin());
                oracle += Complex64::new(0.0, k * d.dot(&x)).exp() / (2.0 * PI);
            }
            oracle *= 2.0 * PI / n as f64;
            assert!((val - oracle).norm() < 1e-12);
            assert_abs_diff_eq!(val.re, crate::specfun::jn(0, k * x.norm()), epsilon = 1e-12);
        }
    }

    #[test]
    fn evaluate_origin_picks_mode_zero() {
        let g = HerglotzKernel::single_mode(3, Complex64::new(1.0, 0.5)).unwrap();
        assert_eq!(g.evaluate_at(4.0, Vec2::zeros()), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn evaluate_satisfies_helmholtz() {
        // 5-point stencil residual of (Delta + k^2) u^i
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_kernel(&mut rng, 6);
        let k = 3.0;
        let h = 1e-3;
        let x0 = Vec2::new(0.4, -0.1);
        let u = |x: Vec2| g.evaluate_at(k, x);
        let lap = (u(x0 + Vec2::new(h, 0.0))
            + u(x0 - Vec2::new(h, 0.0))
            + u(x0 + Vec2::new(0.0, h))
            + u(x0 - Vec2::new(0.0, h))
            - 4.0 * u(x0))
            / (h * h);
        let resid = (lap + k * k * u(x0)).norm();
        // second-order stencil truncation ~ k^4 h^2 |u| / 12
        assert!(resid <= 1e-3 * u(x0).norm().max(1.0), "residual {resid}");
    }

    #[test]
    fn normalize_basics() {
        let g = HerglotzKernel::single_mode(0, Complex64::new(1.0 / (2.0 * PI), 0.0)).unwrap();
        let gn = g.normalize().unwrap();
        assert_relative_eq!(gn.l2_norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            (2.0 * PI).sqrt() * gn.coeff(0).norm(),
            1.0,
            epsilon = 1e-12
        );
        // idempotence
        let gnn = gn.normalize().unwrap();
        assert!((gnn.coeff(0) - gn.coeff(0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_kernel(&mut rng, 9);
        assert_relative_eq!(g.normalize().unwrap().l2_norm(), 1.0, epsilon = 1e-12);
        let zero = HerglotzKernel::from_coeffs(vec![Complex64::new(0.0, 0.0); 3]).unwrap();
        assert!(zero.normalize().is_err());
    }

    #[test]
    fn derivative_examples() {
        let k = 2.0;
        // c_0 only, gamma = (1,0) at the origin: odd symmetry gives 0
        let g0 = HerglotzKernel::single_mode(0, Complex64::new(1.0, 0.0)).unwrap();
        let d = derivative_at(&g0, k, Vec2::zeros(), [1, 0]).unwrap();
        assert!(d.norm() < 1e-13);
        // c_1 = 1: ik int cos(theta) e^{i theta} dtheta = ik pi
        let g1 = HerglotzKernel::single_mode(1, Complex64::new(1.0, 0.0)).unwrap();
        let d = derivative_at(&g1, k, Vec2::zeros(), [1, 0]).unwrap();
        assert!((d - Complex64::new(0.0, k * PI)).norm() < 1e-12);
        // gamma = (0,0) equals evaluate
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_kernel(&mut rng, 5);
        let x = Vec2::new(0.2, 0.7);
        let d = derivative_at(&g, k, x, [0, 0]).unwrap();
        assert!((d - g.evaluate_at(k, x)).norm() < 1e-11);
        assert!(derivative_at(&g, k, x, [7, 6]).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_kernel(&mut rng, 6);
        let k = 2.0;
        let x = Vec2::new(0.3, -0.4);
        let h = 1e-4;
        let u = |p: Vec2| g.evaluate_at(k, p);
        let fd_x = (u(x + Vec2::new(h, 0.0)) - u(x - Vec2::new(h, 0.0))) / (2.0 * h);
        let d = derivative_at(&g, k, x, [1, 0]).unwrap();
        assert!((fd_x - d).norm() <= 1e-5 * d.norm().max(1.0));
        let fd_xy = (u(x + Vec2::new(h, h)) - u(x + Vec2::new(h, -h)) - u(x + Vec2::new(-h, h))
            + u(x + Vec2::new(-h, -h)))
            / (4.0 * h * h);
        let d = derivative_at(&g, k, x, [1, 1]).unwrap();
        assert!((fd_xy - d).norm() <= 1e-5 * d.norm().max(1.0));
    }

    #[test]
    fn vanishing_order_examples() {
        let k = 2.0;
        // c_0-only kernel: order 0, P_0 = 2 pi c_0
        let c0 = Complex64::new(0.4, -0.1);
        let g = HerglotzKernel::single_mode(0, c0).unwrap();
        let vo = vanishing_order(&g, k, Vec2::zeros(), DEFAULT_ORDER_TOL, 6).unwrap();
        assert_eq!(vo.order, 0);
        assert!((vo.leading.eval(Vec2::new(0.3, 0.9)) - 2.0 * PI * c0).norm() < 1e-10);
        // the residual is a sqrt of a cancellation, so ~sqrt(eps) * scale
        assert!(vo.projection_residual < 1e-6);
        // c_1 delta kernel: order 1, P_1 = pi i k (x + i y)
        let g = HerglotzKernel::single_mode(1, Complex64::new(1.0, 0.0)).unwrap();
        let vo = vanishing_order(&g, k, Vec2::zeros(), DEFAULT_ORDER_TOL, 6).unwrap();
        assert_eq!(vo.order, 1);
        let x = Vec2::new(0.7, -0.2);
        let expected = Complex64::new(0.0, PI * k) * Complex64::new(x.x, x.y);
        assert!((vo.leading.eval(x) - expected).norm() < 1e-9);
        assert!(vo.projection_residual < 1e-6);
        // order beyond N_max signals
        let z = HerglotzKernel::from_coeffs(vec![Complex64::new(0.0, 0.0); 3]).unwrap();
        assert!(vanishing_order(&z, k, Vec2::zeros(), 1e-8, 4).is_err());
    }

    #[test]
    fn synthesized_kernels_vanish_to_order() {
        let k = 3.0;
        for &(x_c, n, m) in &[
            (Vec2::zeros(), 1usize, 6usize),
            (Vec2::zeros(), 2, 8),
            (Vec2::new(0.0, 0.0), 3, 10),
            (Vec2::new(1.0, 1.0), 2, 10),
            (Vec2::new(1.0, 0.0), 4, 14),
        ] {
            let g = synthesize_vanishing_kernel(k, x_c, n, m).unwrap();
            assert_relative_eq!(g.l2_norm(), 1.0, epsilon = 1e-10);
            for low in 0..n {
                for gamma in multi_indices(low as u32) {
                    let d = derivative_at(&g, k, x_c, gamma).unwrap();
                    assert!(
                        d.norm() <= 1e-10,
                        "order {n}: residual {} at gamma {gamma:?}",
                        d.norm()
                    );
                }
            }
            let vo = vanishing_order(&g, k, x_c, DEFAULT_ORDER_TOL, n + 3).unwrap();
            assert!(vo.order >= n, "got order {} for target {n}", vo.order);
        }
        // N = 0 returns the c_0-only kernel
        let g = synthesize_vanishing_kernel(k, Vec2::zeros(), 0, 4).unwrap();
        assert!(g.coeff(0).norm() > 0.0);
        // infeasible constraint count
        assert!(synthesize_vanishing_kernel(k, Vec2::zeros(), 4, 4).is_err());
    }

    #[test]
    fn fit_recovers_exact_kernel() {
        use crate::geometry::{build_grid, Domain};
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g0 = random_kernel(&mut rng, 4);
        let k = 3.0;
        let dom = Domain::disk(Vec2::zeros(), 1.0).unwrap();
        let grid = build_grid(&dom, 0.05).unwrap();
        let target = g0.evaluate(k, &grid.nodes).unwrap();
        let fit = fit_kernel(&grid, &target, k, 6, Some(0.0)).unwrap();
        assert!(fit.residual <= 1e-8, "residual {}", fit.residual);
        for m in -4i32..=4 {
            assert!((fit.kernel.coeff(m) - g0.coeff(m)).norm() < 1e-7);
        }
    }

    #[test]
    fn fit_recovers_single_bessel_mode() {
        use crate::geometry::{build_grid, Domain};
        // target J_2(kr) e^{2 i theta} = evaluate of c_2 = 1/(2 pi i^2)
        let k = 3.0;
        let dom = Domain::disk(Vec2::zeros(), 1.0).unwrap();
        let grid = build_grid(&dom, 0.05).unwrap();
        let target: Vec<Complex64> = grid
            .nodes
            .iter()
            .map(|x| {
                let th = x.y.atan2(x.x);
                crate::specfun::jn(2, k * x.norm()) * Complex64::new(0.0, 2.0 * th).exp()
            })
            .collect();
        let fit = fit_kernel(&grid, &target, k, 5, None).unwrap();
        assert!(fit.residual < 1e-6);
        let expected = 1.0 / (2.0 * PI) * Complex64::new(0.0, 1.0).powi(-2);
        assert!((fit.kernel.coeff(2) - expected).norm() < 1e-6);
        for m in -5i32..=5 {
            if m != 2 {
                assert!(fit.kernel.coeff(m).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn fit_residual_nonincreasing_in_truncation() {
        use crate::geometry::{build_grid, Domain};
        let k = 4.0;
        let dom = Domain::disk(Vec2::zeros(), 1.0).unwrap();
        let grid = build_grid(&dom, 0.08).unwrap();
        // a Helmholtz solution that is not a finite Fourier kernel on Omega:
        // plane wave displaced off-center
        let target: Vec<Complex64> = grid
            .nodes
            .iter()
            .map(|x| Complex64::new(0.0, k * (0.8 * x.x + 0.6 * x.y) + 0.3).exp())
            .collect();
        let mut prev = f64::INFINITY;
        for m in [1usize, 3, 5, 8, 12] {
            let fit = fit_kernel(&grid, &target, k, m, Some(0.0)).unwrap();
            assert!(fit.residual <= prev + 1e-12);
            prev = fit.residual;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn mean_value_identity() {
        // (1/2pi) int u^i(x0 + r theta) dtheta = J_0(kr) u^i(x0)
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_kernel(&mut rng, 7);
        let k = 2.7;
        let x0 = Vec2::new(0.3, 0.6);
        let r = 0.45;
        let n = 512;
        let mut avg = Complex64::new(0.0, 0.0);
        for l in 0..n {
            let t = 2.0 * PI * l as f64 / n as f64;
            avg += g.evaluate_at(k, x0 + r * Vec2::new(t.cos(), t.sin()));
        }
        avg /= n as f64;
        let expected = crate::specfun::jn(0, k * r) * g.evaluate_at(k, x0);
        assert!((avg - expected).norm() < 1e-8);
    }

    #[test]
    fn taylor_remainder_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = 2.0;
        let x_c = Vec2::new(0.2, -0.1);
        for n in 0..3usize {
            let g = random_kernel(&mut rng, 5);
            let c = taylor_remainder_bound(&g, k, n);
            // Taylor polynomial of degree n at x_c
            let taylor: Vec<(u32, u32, Complex64)> = (0..=n as u32)
                .flat_map(|tot| multi_indices(tot).collect::<Vec<_>>())
                .map(|gm| {
                    let d = derivative_at(&g, k, x_c, gm).unwrap();
                    (gm[0], gm[1], d / (factorial(gm[0]) * factorial(gm[1])))
                })
                .collect();
            let rho = 0.1;
            for s in 0..32 {
                let t = 2.0 * PI * s as f64 / 32.0;
                let dx = rho * Vec2::new(t.cos(), t.sin());
                let x = x_c + dx;
                let mut p = Complex64::new(0.0, 0.0);
                for &(g1, g2, tcoef) in &taylor {
                    p += tcoef * dx.x.powi(g1 as i32) * dx.y.powi(g2 as i32);
                }
                let r = (g.evaluate_at(k, x) - p).norm();
                assert!(
                    r <= c * rho.powi(n as i32 + 1) * (1.0 + 1e-9),
                    "remainder {r} exceeds bound at N={n}"
                );
            }
            // linearity in ||g||
            let g2 = g.scaled(Complex64::new(2.0, 0.0));
            assert_relative_eq!(
                taylor_remainder_bound(&g2, k, n),
                2.0 * c,
                epsilon = 1e-12
            );
        }
        let zero = HerglotzKernel::from_coeffs(vec![Complex64::new(0.0, 0.0); 3]).unwrap();
        assert_eq!(taylor_remainder_bound(&zero, 2.0, 1), 0.0);
    }

    #[test]
    fn kernel_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = random_kernel(&mut rng, 3);
        let j = g.to_json();
        assert_eq!(j["M"], 3);
        let g2 = HerglotzKernel::from_json(&j).unwrap();
        assert_eq!(g, g2);
        assert!(HerglotzKernel::from_json(&serde_json::json!({"M": 2, "coeffs": [[1,0]]})).is_err());
    }
}
