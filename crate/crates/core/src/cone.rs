//! Laplace transforms of homogeneous harmonic polynomials over plane sectors
//! and coordinate orthants, admissible complex phase vectors zeta with the
//! curve rho(tau), the inf-sup constant over normalized polynomials, and the
//! theoretical bound curve overlaid on experiment output.

use crate::geometry::ConeAtVertex;
use crate::herglotz::HomHarmonicPoly;
use crate::quad::AdaptiveSimpson;
use crate::{Complex64, Error, Result, Vec2};
use std::f64::consts::PI;

/// Plane sector with apex at the origin: angles theta in (theta1, theta2),
/// opening strictly below pi.
#[derive(Clone, Copy, Debug)]
pub struct Sector {
    pub theta1: f64,
    pub theta2: f64,
}

impl Sector {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let opening = theta2 - theta1;
        if !(opening > 0.0 && opening < PI) {
            return Err(Error::Geometry(format!(
                "sector opening {opening} must lie in (0, pi)"
            )));
        }
        Ok(Sector { theta1, theta2 })
    }

    /// Sector of a polygon corner, translated so the apex is at the origin.
    pub fn from_cone(cone: &ConeAtVertex) -> Result<Self> {
        let axis_angle = cone.axis.y.atan2(cone.axis.x);
        Self::new(axis_angle - cone.half_angle, axis_angle + cone.half_angle)
    }

    pub fn opening(&self) -> f64 {
        self.theta2 - self.theta1
    }

    pub fn half_angle(&self) -> f64 {
        0.5 * self.opening()
    }

    pub fn axis(&self) -> Vec2 {
        let t = 0.5 * (self.theta1 + self.theta2);
        Vec2::new(t.cos(), t.sin())
    }

    fn direction(&self, theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    /// max over the closed sector of Re(rho) . omega(theta); the maximum of
    /// A cos + B sin on an interval sits at an endpoint or the critical angle.
    fn max_real_decay(&self, rho: [Complex64; 2]) -> f64 {
        let a = rho[0].re;
        let b = rho[1].re;
        let f = |t: f64| a * t.cos() + b * t.sin();
        let mut best = f(self.theta1).max(f(self.theta2));
        let crit = b.atan2(a);
        for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
            let t = crit + shift;
            if t > self.theta1 && t < self.theta2 {
                best = best.max(f(t));
            }
        }
        best
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// L P(rho) = int_sector e^{rho . x} P(x) dx with the radial integral done
/// exactly: (N+1)! int_{theta1}^{theta2} P(omega) (-rho . omega)^{-(N+2)} dtheta.
pub fn laplace_transform(p: &HomHarmonicPoly, sector: &Sector, rho: [Complex64; 2]) -> Result<Complex64> {
    if sector.max_real_decay(rho) >= 0.0 {
        return Err(Error::Domain(
            "Re(rho) . omega must be negative on the sector for integrability".into(),
        ));
    }
    let n = p.degree() as i32;
    let quad = AdaptiveSimpson::default();
    let integral = quad.integrate(sector.theta1, sector.theta2, |theta| {
        let omega = sector.direction(theta);
        let ro = rho[0] * omega.x + rho[1] * omega.y;
        p.eval_dir(theta) * (-ro).powf(-(n as f64 + 2.0))
    })?;
    Ok(factorial(n as u32 + 1) * integral)
}

/// Polynomial as a sum of monomials c x^gamma, any dimension.
#[derive(Clone, Debug, Default)]
pub struct MonomialPoly {
    pub terms: Vec<(Vec<u32>, Complex64)>,
}

impl MonomialPoly {
    pub fn constant(dim: usize, c: Complex64) -> Self {
        MonomialPoly {
            terms: vec![(vec![0; dim], c)],
        }
    }

    /// Expand a Re z^N + b Im z^N into 2D monomials via the binomial theorem.
    pub fn from_harmonic(p: &HomHarmonicPoly) -> Self {
        let n = p.degree() as u32;
        let (a, b) = p.coeffs();
        let mut terms = Vec::new();
        let mut binom = 1.0_f64;
        for j in 0..=n {
            // i^j splits into the real/imaginary parts of z^N
            let coeff = if j % 2 == 0 {
                a * (if j % 4 == 0 { 1.0 } else { -1.0 }) * binom
            } else {
                b * (if j % 4 == 1 { 1.0 } else { -1.0 }) * binom
            };
            if coeff.norm_sqr() > 0.0 {
                terms.push((vec![n - j, j], coeff));
            }
            binom *= (n - j) as f64 / (j + 1) as f64;
        }
        MonomialPoly { terms }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (gamma, c) in &self.terms {
            let mut m = 1.0;
            for (g, xi) in gamma.iter().zip(x) {
                m *= xi.powi(*g as i32);
            }
            s += c * m;
        }
        s
    }
}

/// Closed form over the negative-real-part orthant (0, inf)^n:
/// int e^{rho . x} x^gamma dx = prod_i gamma_i! / (-rho_i)^{gamma_i + 1}.
pub fn laplace_transform_orthant(p: &MonomialPoly, rho: &[Complex64]) -> Result<Complex64> {
    if rho.iter().any(|r| r.re >= 0.0) {
        return Err(Error::Domain(
            "orthant transform needs Re(rho_i) < 0 for every coordinate".into(),
        ));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (gamma, c) in &p.terms {
        if gamma.len() != rho.len() {
            return Err(Error::Dimension(format!(
                "monomial has {} coordinates, rho has {}",
                gamma.len(),
                rho.len()
            )));
        }
        let mut term = *c;
        for (g, r) in gamma.iter().zip(rho) {
            term *= factorial(*g) * (-r).powf(-(*g as f64 + 1.0));
        }
        total += term;
    }
    Ok(total)
}

/// Complex phase vector zeta with zeta . zeta = 0, |Re zeta| = |Im zeta| = 1
/// and Re zeta . x <= -delta0 |x| on the cone.
#[derive(Clone, Copy, Debug)]
pub struct AdmissibleZeta {
    pub zeta: [Complex64; 2],
    pub delta0: f64,
    pub alpha_d: f64,
}

impl AdmissibleZeta {
    pub fn re(&self) -> Vec2 {
        Vec2::new(self.zeta[0].re, self.zeta[1].re)
    }

    pub fn im(&self) -> Vec2 {
        Vec2::new(self.zeta[0].im, self.zeta[1].im)
    }
}

fn rot(v: Vec2, psi: f64) -> Vec2 {
    let (s, c) = psi.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

fn check_angles(half_angle: f64, alpha_d: f64) -> Result<f64> {
    if !(half_angle > 0.0 && half_angle < 0.5 * PI) {
        return Err(Error::Domain(format!(
            "cone half-angle {half_angle} must lie in (0, pi/2)"
        )));
    }
    if !(alpha_d > 0.0) || half_angle + alpha_d >= 0.5 * PI {
        return Err(Error::Domain(format!(
            "need 0 < alpha_d with half_angle + alpha_d < pi/2, got alpha_d = {alpha_d}"
        )));
    }
    Ok((half_angle + alpha_d).cos())
}

/// zeta positioned at angle psi (|psi| <= alpha_d) within the admissible arc
/// around -axis, with Im zeta one of the two perpendicular orientations.
pub fn make_zeta_at(
    sector: &Sector,
    alpha_d: f64,
    psi: f64,
    im_positive: bool,
) -> Result<AdmissibleZeta> {
    let delta0 = check_angles(sector.half_angle(), alpha_d)?;
    if psi.abs() > alpha_d + 1e-14 {
        return Err(Error::Domain(format!(
            "psi = {psi} outside the admissible arc |psi| <= {alpha_d}"
        )));
    }
    let re = -rot(sector.axis(), psi);
    let perp = Vec2::new(-re.y, re.x) * if im_positive { 1.0 } else { -1.0 };
    Ok(AdmissibleZeta {
        zeta: [
            Complex64::new(re.x, perp.x),
            Complex64::new(re.y, perp.y),
        ],
        delta0,
        alpha_d,
    })
}

/// Centered choice psi = 0: Re zeta = -axis.
pub fn make_zeta(sector: &Sector, alpha_d: f64) -> Result<AdmissibleZeta> {
    make_zeta_at(sector, alpha_d, 0.0, true)
}

/// The curve rho(tau) = tau Re zeta + i sqrt(tau^2 + k^2) Im zeta, which
/// satisfies rho . rho + k^2 = 0 and |Re rho| = tau.
#[derive(Clone, Copy, Debug)]
pub struct CgoCurve {
    pub zeta: AdmissibleZeta,
    pub k: f64,
}

impl CgoCurve {
    pub fn new(zeta: AdmissibleZeta, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("wavenumber k = {k} must be positive")));
        }
        Ok(CgoCurve { zeta, k })
    }

    pub fn rho_at(&self, tau: f64) -> Result<[Complex64; 2]> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau = {tau} must be positive")));
        }
        let re = self.zeta.re();
        let im = self.zeta.im();
        let s = (tau * tau + self.k * self.k).sqrt();
        Ok([
            Complex64::new(tau * re.x, s * im.x),
            Complex64::new(tau * re.y, s * im.y),
        ])
    }
}

/// Maximize |L P(zeta)| over the admissible arc (psi grid + both Im
/// orientations), refined by golden-section search. The arc is derived from
/// delta0: alpha_d = acos(delta0) - half_angle.
pub fn best_zeta(
    p: &HomHarmonicPoly,
    sector: &Sector,
    delta0: f64,
    grid_size: usize,
) -> Result<(AdmissibleZeta, f64)> {
    if p.norm() <= 0.0 {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let alpha_d = delta0.clamp(-1.0, 1.0).acos() - sector.half_angle();
    if alpha_d <= 0.0 {
        return Err(Error::Domain(format!(
            "empty admissible arc: acos(delta0) = {} <= half-angle {}",
            delta0.acos(),
            sector.half_angle()
        )));
    }
    let grid_size = grid_size.max(3);
    let value_at = |psi: f64, up: bool| -> Result<f64> {
        let z = make_zeta_at(sector, alpha_d, psi, up)?;
        Ok(laplace_transform(p, sector, z.zeta)?.norm())
    };
    let mut best = (0.0, true, f64::NEG_INFINITY);
    for up in [true, false] {
        for i in 0..grid_size {
            let psi = -alpha_d + 2.0 * alpha_d * i as f64 / (grid_size - 1) as f64;
            let v = value_at(psi, up)?;
            if v > best.2 {
                best = (psi, up, v);
            }
        }
    }
    // golden-section refinement on psi around the best grid point
    let step = 2.0 * alpha_d / (grid_size - 1) as f64;
    let (mut lo, mut hi) = (
        (best.0 - step).max(-alpha_d),
        (best.0 + step).min(alpha_d),
    );
    let up = best.1;
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = value_at(x1, up)?;
    let mut f2 = value_at(x2, up)?;
    for _ in 0..60 {
        if hi - lo < 1e-10 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = value_at(x2, up)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = value_at(x1, up)?;
        }
    }
    let psi = 0.5 * (lo + hi);
    let v = value_at(psi, up)?;
    let (psi, v) = if v >= best.2 { (psi, v) } else { (best.0, best.2) };
    Ok((make_zeta_at(sector, alpha_d, psi, up)?, v))
}

/// c(N, cone, delta0) = min over unit-norm P in the degree-N harmonic family
/// of max over admissible zeta of |L P(zeta)|, by a (t, phi) parameter sweep
/// (a, b) = (cos t, sin t e^{i phi}) with local refinement; asserts c > 0.
pub fn infsup_constant(
    degree: usize,
    sector: &Sector,
    delta0: f64,
    resolution: usize,
) -> Result<f64> {
    if degree > 6 {
        return Err(Error::Domain(format!(
            "inf-sup sweep supports degree <= 6, got {degree}"
        )));
    }
    let resolution = resolution.max(4);
    let zeta_grid = 9;
    let value_of = |t: f64, phi: f64| -> Result<f64> {
        let a = Complex64::new(t.cos(), 0.0);
        let b = Complex64::new(0.0, phi).exp() * t.sin();
        let p = HomHarmonicPoly::new(degree, a, b);
        if p.norm() <= 0.0 {
            return Ok(f64::INFINITY); // degenerate corner of the chart
        }
        let p = p.scaled(Complex64::new(1.0 / p.norm(), 0.0));
        best_zeta(&p, sector, delta0, zeta_grid).map(|(_, v)| v)
    };
    if degree == 0 {
        // constants: one polynomial up to phase
        let c = value_of(0.0, 0.0)?;
        return finish_infsup(c);
    }
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..=resolution {
        let t = 0.5 * PI * i as f64 / resolution as f64;
        for j in 0..resolution {
            let phi = 2.0 * PI * j as f64 / resolution as f64;
            let v = value_of(t, phi)?;
            if v < best.2 {
                best = (t, phi, v);
            }
        }
    }
    // local refinement around the minimizer
    let mut dt = 0.5 * PI / resolution as f64;
    let mut dphi = 2.0 * PI / resolution as f64;
    let (mut t0, mut phi0, mut v0) = best;
    for _ in 0..5 {
        for i in -2..=2 {
            for j in -2..=2 {
                let t = (t0 + 0.5 * dt * i as f64).clamp(0.0, 0.5 * PI);
                let phi = phi0 + 0.5 * dphi * j as f64;
                let v = value_of(t, phi)?;
                if v < v0 {
                    t0 = t;
                    phi0 = phi;
                    v0 = v;
                }
            }
        }
        dt *= 0.5;
        dphi *= 0.5;
    }
    finish_infsup(v0)
}

fn finish_infsup(c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Invariant(format!(
            "inf-sup constant must be positive, got {c}"
        )));
    }
    Ok(c)
}

/// Threshold tau0 = 4 (N+n)! delta0^{-(N+n)} k / c for the lower bound.
pub fn tau0(degree: usize, dim: usize, delta0: f64, k: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c = {c} must be positive")));
    }
    let nn = (degree + dim) as u32;
    Ok(4.0 * factorial(nn) * delta0.powi(-(nn as i32)) * k / c)
}

/// Both sides of the decay upper bound
/// |L P(zeta)| <= (N+n-1)! delta0^{1-N-n} ||P||.
#[derive(Clone, Debug)]
pub struct DecayUpperReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub fn decay_upper_check(
    p: &HomHarmonicPoly,
    sector: &Sector,
    delta0: f64,
    zeta: &AdmissibleZeta,
) -> Result<DecayUpperReport> {
    let lhs = if p.norm() == 0.0 {
        0.0
    } else {
        laplace_transform(p, sector, zeta.zeta)?.norm()
    };
    let exp = (p.degree() + 2) as i32 - 1;
    let rhs = factorial(exp as u32) * delta0.powi(1 - exp - 1) * p.norm();
    Ok(DecayUpperReport {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + 1e-8),
    })
}

/// Minimizer of f(tau) = tau^{-gamma} + tau^{script_n + n + 3} / R:
/// tau_m = (gamma R / (script_n + n + 3))^{1/(script_n + n + 3 + gamma)}.
pub fn bound_curve(script_n: usize, dim: usize, gamma: f64, r_value: f64) -> Result<(f64, f64)> {
    if !(r_value > 0.0) {
        return Err(Error::Domain(format!("R = {r_value} must be positive")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} must lie in (0, 1]")));
    }
    let q = (script_n + dim + 3) as f64;
    let tau_m = (gamma * r_value / q).powf(1.0 / (q + gamma));
    let min_value = tau_m.powf(-gamma) + tau_m.powf(q) / r_value;
    Ok((tau_m, min_value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quarter_plane() -> Sector {
        Sector::new(0.0, 0.5 * PI).unwrap()
    }

    fn one() -> HomHarmonicPoly {
        HomHarmonicPoly::new(0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    #[test]
    fn orthant_constant_is_one() {
        let p = MonomialPoly::constant(2, Complex64::new(1.0, 0.0));
        let rho = vec![Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let v = laplace_transform_orthant(&p, &rho).unwrap();
        assert_relative_eq!(v.re, 1.0, epsilon = 1e-14);
        assert!(v.im.abs() < 1e-14);
        // non-integrable rho rejected
        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        assert!(laplace_transform_orthant(&p, &bad).is_err());
    }

    #[test]
    fn sector_matches_orthant_on_quarter_plane() {
        let sector = quarter_plane();
        let rho = [Complex64::new(-1.0, 0.3), Complex64::new(-0.7, -0.2)];
        for (a, b, n) in [
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 0usize),
            (Complex64::new(0.5, -0.2), Complex64::new(0.3, 0.8), 2),
            (Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), 3),
        ] {
            let p = HomHarmonicPoly::new(n, a, b);
            let via_sector = laplace_transform(&p, &sector, rho).unwrap();
            let via_orthant =
                laplace_transform_orthant(&MonomialPoly::from_harmonic(&p), &rho).unwrap();
            assert!(
                (via_sector - via_orthant).norm() <= 1e-9 * via_orthant.norm().max(1.0),
                "degree {n}: {via_sector} vs {via_orthant}"
            );
        }
    }

    #[test]
    fn sector_matches_2d_brute_force() {
        // half-angle pi/4 sector, P = Re z^2, rho from a valid curve
        let sector = Sector::new(PI / 4.0, 3.0 * PI / 4.0).unwrap();
        let p = HomHarmonicPoly::new(2, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let zeta = make_zeta(&sector, PI / 8.0).unwrap();
        let curve = CgoCurve::new(zeta, 2.0).unwrap();
        let rho = curve.rho_at(3.0).unwrap();
        let exact = laplace_transform(&p, &sector, rho).unwrap();
        // brute force: adaptive angular quadrature of adaptive radial integrals
        // truncated where the exponential tail is below 1e-12
        let decay = -sector.max_real_decay(rho);
        let r_max = (30.0 / decay).max(10.0);
        let quad = AdaptiveSimpson {
            rel_tol: 1e-8,
            max_evals: 4_000_000,
        };
        let brute = quad
            .integrate(sector.theta1, sector.theta2, |theta| {
                let omega = Vec2::new(theta.cos(), theta.sin());
                let ro = rho[0] * omega.x + rho[1] * omega.y;
                let inner = AdaptiveSimpson {
                    rel_tol: 1e-8,
                    max_evals: 2_000_000,
                };
                inner
                    .integrate(0.0, r_max, |r| {
                        (ro * r).exp() * p.eval(r * omega) * r
                    })
                    .unwrap()
            })
            .unwrap();
        assert!(
            (exact - brute).norm() <= 1e-6 * exact.norm(),
            "exact {exact} vs brute {brute}"
        );
    }

    #[test]
    fn zeta_construction_invariants() {
        let sector = quarter_plane();
        let alpha_d = PI / 8.0;
        let z = make_zeta(&sector, alpha_d).unwrap();
        assert_relative_eq!(z.delta0, (3.0 * PI / 8.0).cos(), epsilon = 1e-14);
        let dot = z.zeta[0] * z.zeta[0] + z.zeta[1] * z.zeta[1];
        assert!(dot.norm() < 1e-12);
        assert_relative_eq!(z.re().norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(z.im().norm(), 1.0, epsilon = 1e-12);
        assert!(z.re().dot(&z.im()).abs() < 1e-12);
        // Re zeta . omega <= -delta0 on edge directions, across the arc
        for psi in [-alpha_d, -0.3 * alpha_d, 0.0, 0.7 * alpha_d, alpha_d] {
            for up in [true, false] {
                let z = make_zeta_at(&sector, alpha_d, psi, up).unwrap();
                for theta in [sector.theta1, sector.theta2] {
                    let omega = Vec2::new(theta.cos(), theta.sin());
                    assert!(z.re().dot(&omega) <= -z.delta0 + 1e-12);
                }
            }
        }
        // angle constraint violations
        let wide = Sector::new(0.0, PI - 1e-3).unwrap();
        assert!(make_zeta(&wide, 0.01).is_err());
        assert!(make_zeta(&sector, PI / 4.0 + 0.01).is_err());
        assert!(make_zeta_at(&sector, alpha_d, 2.0 * alpha_d, true).is_err());
    }

    #[test]
    fn zeta_rotation_equivariance() {
        let alpha_d = 0.2;
        let base = Sector::new(-0.4, 0.7).unwrap();
        let ang = 1.234;
        let rotated = Sector::new(base.theta1 + ang, base.theta2 + ang).unwrap();
        let z0 = make_zeta_at(&base, alpha_d, 0.1, true).unwrap();
        let z1 = make_zeta_at(&rotated, alpha_d, 0.1, true).unwrap();
        let re_rot = rot(z0.re(), ang);
        let im_rot = rot(z0.im(), ang);
        assert!((z1.re() - re_rot).norm() < 1e-12);
        assert!((z1.im() - im_rot).norm() < 1e-12);
        assert_relative_eq!(z0.delta0, z1.delta0, epsilon = 1e-14);
    }

    #[test]
    fn cgo_curve_identities() {
        let sector = quarter_plane();
        let z = make_zeta(&sector, 0.3).unwrap();
        for &k in &[1.0, 5.0] {
            let curve = CgoCurve::new(z, k).unwrap();
            for &tau in &[0.1, 1.0, 10.0, 1000.0] {
                let rho = curve.rho_at(tau).unwrap();
                let dot = rho[0] * rho[0] + rho[1] * rho[1] + k * k;
                assert!(dot.norm() < 1e-10 * (tau * tau + k * k), "residual {dot}");
                let re = Vec2::new(rho[0].re, rho[1].re);
                assert_relative_eq!(re.norm(), tau, max_relative = 1e-12);
            }
            // rho(tau)/tau -> zeta with error ~ k^2 / (2 tau^2)
            let tau = 100.0 * k;
            let rho = curve.rho_at(tau).unwrap();
            let diff = ((rho[0] / tau - z.zeta[0]).norm_sqr()
                + (rho[1] / tau - z.zeta[1]).norm_sqr())
            .sqrt();
            assert!(diff <= k * k / (tau * tau), "asymptotic gap {diff}");
        }
        assert!(CgoCurve::new(z, 2.0).unwrap().rho_at(0.0).is_err());
    }

    #[test]
    fn homogeneity_of_laplace_transform() {
        // L P(s rho) = s^{-(N+2)} L P(rho) in 2D
        let sector = Sector::new(0.2, 1.5).unwrap();
        let p = HomHarmonicPoly::new(3, Complex64::new(0.4, 0.3), Complex64::new(-0.2, 1.0));
        let rho = [Complex64::new(-1.2, 0.5), Complex64::new(-0.9, -0.3)];
        let base = laplace_transform(&p, &sector, rho).unwrap();
        for &s in &[0.5, 2.0, 7.0] {
            let scaled = laplace_transform(&p, &sector, [rho[0] * s, rho[1] * s]).unwrap();
            let predicted = base * s.powi(-(3 + 2));
            assert!((scaled - predicted).norm() <= 1e-10 * predicted.norm());
        }
    }

    #[test]
    fn best_zeta_properties() {
        let sector = quarter_plane();
        let delta0 = (3.0 * PI / 8.0).cos();
        let (z, v) = best_zeta(&one(), &sector, delta0, 9).unwrap();
        assert!(v > 0.0);
        assert!(z.delta0 >= delta0 - 1e-12);
        // linearity: doubling P doubles the value, same maximizer
        let p2 = one().scaled(Complex64::new(2.0, 0.0));
        let (z2, v2) = best_zeta(&p2, &sector, delta0, 9).unwrap();
        assert_relative_eq!(v2, 2.0 * v, max_relative = 1e-9);
        assert!((z.re() - z2.re()).norm() < 1e-8);
        // grid self-convergence
        let p = HomHarmonicPoly::new(2, Complex64::new(0.6, 0.1), Complex64::new(-0.4, 0.9));
        let (_, va) = best_zeta(&p, &sector, delta0, 9).unwrap();
        let (_, vb) = best_zeta(&p, &sector, delta0, 18).unwrap();
        assert!((va - vb).abs() <= 1e-6 * vb);
        // empty arc
        assert!(best_zeta(&one(), &sector, (0.25 * PI).cos() + 1e-3, 9).is_err());
    }

    #[test]
    fn infsup_positive_and_stable() {
        let sector = quarter_plane();
        let delta0 = (3.0 * PI / 8.0).cos();
        for n in 0..=4usize {
            let c = infsup_constant(n, &sector, delta0, 8).unwrap();
            assert!(c > 0.0, "degree {n}");
            if n <= 2 {
                let c2 = infsup_constant(n, &sector, delta0, 16).unwrap();
                assert!(
                    (c - c2).abs() <= 0.05 * c2,
                    "degree {n}: refinement moved c from {c2} to {c}"
                );
            }
        }
        assert!(infsup_constant(7, &sector, delta0, 8).is_err());
    }

    #[test]
    fn tau0_arithmetic() {
        assert_relative_eq!(tau0(0, 2, 1.0, 1.0, 4.0).unwrap(), 2.0, epsilon = 1e-14);
        let t = tau0(1, 2, 0.5, 2.0, 0.3).unwrap();
        assert_relative_eq!(tau0(1, 2, 0.5, 4.0, 0.3).unwrap(), 2.0 * t, epsilon = 1e-12);
        assert_relative_eq!(tau0(1, 2, 0.5, 2.0, 0.15).unwrap(), 2.0 * t, epsilon = 1e-12);
        assert!(tau0(1, 2, 0.5, 2.0, 0.0).is_err());
    }

    #[test]
    fn decay_upper_bound_holds() {
        let sector = quarter_plane();
        let delta0 = (3.0 * PI / 8.0).cos();
        let alpha_d = delta0.acos() - sector.half_angle();
        // N = 0 example
        let z = make_zeta(&sector, alpha_d).unwrap();
        let rep = decay_upper_check(&one(), &sector, delta0, &z).unwrap();
        assert!(rep.pass);
        assert_relative_eq!(rep.rhs, 2.0 * PI / delta0, max_relative = 1e-9);
        // random polynomials and zeta positions
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = rng.gen_range(0..=4usize);
            let p = HomHarmonicPoly::new(
                n,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let psi = rng.gen_range(-alpha_d..alpha_d);
            let z = make_zeta_at(&sector, alpha_d, psi, rng.gen_bool(0.5)).unwrap();
            let rep = decay_upper_check(&p, &sector, delta0, &z).unwrap();
            assert!(rep.pass, "lhs {} rhs {}", rep.lhs, rep.rhs);
        }
        // zero polynomial: both sides vanish
        let zp = HomHarmonicPoly::new(2, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let rep = decay_upper_check(&zp, &sector, delta0, &z).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.rhs, 0.0);
    }

    #[test]
    fn lower_bound_along_curve() {
        // centerpiece: |L P(rho(tau))| >= (c/4) ||P|| tau^{-(N+2)} for
        // tau >= tau0, plus the mean-value deviation bound
        let sector = quarter_plane();
        let delta0 = (3.0 * PI / 8.0).cos();
        let k = 2.0;
        for n in 0..=2usize {
            let c = infsup_constant(n, &sector, delta0, 8).unwrap();
            let t0 = tau0(n, 2, delta0, k, c).unwrap();
            for (a, b) in [
                (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
                (Complex64::new(0.3, -0.5), Complex64::new(0.8, 0.2)),
            ] {
                let p = HomHarmonicPoly::new(n, a, b);
                if p.norm() == 0.0 {
                    continue;
                }
                let p = p.scaled(Complex64::new(1.0 / p.norm(), 0.0));
                let (zstar, v_at_zeta) = best_zeta(&p, &sector, delta0, 9).unwrap();
                let curve = CgoCurve::new(zstar, k).unwrap();
                for j in 0..8 {
                    let tau = t0 * 100.0_f64.powf(j as f64 / 7.0);
                    let rho = curve.rho_at(tau).unwrap();
                    let lhs = laplace_transform(&p, &sector, rho).unwrap();
                    let bound = 0.25 * c * p.norm() * tau.powi(-(n as i32 + 2));
                    assert!(
                        lhs.norm() >= bound,
                        "N={n} tau={tau}: |L| = {} < {bound}",
                        lhs.norm()
                    );
                    // deviation |L P(zeta) - tau^{N+2} L P(rho)| <=
                    // (N+2)! delta0^{-(N+2)} k / tau ||P||
                    let dev = (laplace_transform(&p, &sector, zstar.zeta).unwrap()
                        - tau.powi(n as i32 + 2) * lhs)
                        .norm();
                    let dev_bound = factorial(n as u32 + 2)
                        * delta0.powi(-(n as i32 + 2))
                        * k
                        / tau
                        * p.norm();
                    assert!(
                        dev <= dev_bound * (1.0 + 1e-8),
                        "N={n} tau={tau}: deviation {dev} > {dev_bound}"
                    );
                    let _ = v_at_zeta;
                }
            }
        }
    }

    #[test]
    fn bound_curve_minimality() {
        let (tau_m, v) = bound_curve(0, 2, 1.0, 5.0).unwrap();
        assert_relative_eq!(tau_m, 1.0, epsilon = 1e-14);
        let f = |t: f64| t.powf(-1.0) + t.powf(5.0) / 5.0;
        assert!(v <= f(0.9 * tau_m) && v <= f(1.1 * tau_m));
        assert_relative_eq!(v, f(tau_m), epsilon = 1e-14);
        // min value strictly decreasing in R
        let vals: Vec<f64> = [1e2, 1e4, 1e8]
            .iter()
            .map(|&r| bound_curve(1, 2, 0.7, r).unwrap().1)
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2]);
        assert!(bound_curve(0, 2, 1.0, 0.0).is_err());
        assert!(bound_curve(0, 2, 1.5, 1.0).is_err());
    }
}
