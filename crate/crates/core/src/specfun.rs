//! Cylinder special functions: Bessel J_m, Y_m and Hankel H_m^{(1)} with
//! derivatives, for non-negative integer orders up to [`MAX_ORDER`].
//!
//! Evaluation strategy: power series for small argument (x <= 14), Hankel
//! large-argument asymptotics beyond, forward recurrence in the order when
//! m < x and Miller backward recurrence otherwise. The crossover at x = 14
//! keeps both branches below 1e-12 absolute error, with headroom over the
//! 1e-10 contract.

use crate::{Complex64, Error, Result};
use std::f64::consts::PI;

pub const MAX_ORDER: u32 = 200;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CROSSOVER: f64 = 14.0;

/// Validated non-negative cylinder-function order.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CylinderOrder(u32);

impl CylinderOrder {
    pub fn new(m: u32) -> Result<Self> {
        if m > MAX_ORDER {
            return Err(Error::Domain(format!(
                "order {m} exceeds supported maximum {MAX_ORDER}"
            )));
        }
        Ok(CylinderOrder(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

fn check_finite(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {x}")));
    }
    Ok(())
}

pub fn bessel_j(m: CylinderOrder, x: f64) -> Result<f64> {
    check_finite(x)?;
    if x < 0.0 {
        return Err(Error::Domain(format!("negative argument {x}")));
    }
    Ok(jn(m.get(), x))
}

pub fn bessel_y(m: CylinderOrder, x: f64) -> Result<f64> {
    check_finite(x)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "Y_m has a singularity at the origin; got x = {x}"
        )));
    }
    Ok(yn(m.get(), x))
}

/// H_m^{(1)}(x) = J_m(x) + i Y_m(x), exactly by construction.
pub fn hankel1(m: CylinderOrder, x: f64) -> Result<Complex64> {
    check_finite(x)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "H_m^(1) has a singularity at the origin; got x = {x}"
        )));
    }
    Ok(Complex64::new(jn(m.get(), x), yn(m.get(), x)))
}

/// J_m'(x) via the recurrence (J_{m-1} - J_{m+1})/2, with J_{-1} = -J_1.
pub fn bessel_j_prime(m: CylinderOrder, x: f64) -> Result<f64> {
    check_finite(x)?;
    if x < 0.0 {
        return Err(Error::Domain(format!("negative argument {x}")));
    }
    Ok(jn_prime(m.get(), x))
}

pub fn bessel_y_prime(m: CylinderOrder, x: f64) -> Result<f64> {
    check_finite(x)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "Y_m' has a singularity at the origin; got x = {x}"
        )));
    }
    Ok(yn_prime(m.get(), x))
}

pub fn hankel1_prime(m: CylinderOrder, x: f64) -> Result<Complex64> {
    check_finite(x)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!(
            "H_m^(1)' has a singularity at the origin; got x = {x}"
        )));
    }
    Ok(Complex64::new(jn_prime(m.get(), x), yn_prime(m.get(), x)))
}

/// J_m for signed order, using J_{-m} = (-1)^m J_m. Used by the Jacobi-Anger
/// expansions in the Herglotz and scattering modules.
pub(crate) fn jn_signed(m: i32, x: f64) -> f64 {
    if m >= 0 {
        jn(m as u32, x)
    } else {
        let v = jn((-m) as u32, x);
        if m % 2 == 0 {
            v
        } else {
            -v
        }
    }
}

pub(crate) fn jn_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -jn(1, x)
    } else {
        0.5 * (jn(m - 1, x) - jn(m + 1, x))
    }
}

pub(crate) fn yn_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -yn(1, x)
    } else {
        0.5 * (yn(m - 1, x) - yn(m + 1, x))
    }
}

pub(crate) fn jn(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    match m {
        0 => j0(x),
        1 => j1(x),
        _ => {
            if (m as f64) < x {
                // forward recurrence, stable for m < x
                let mut a = j0(x);
                let mut b = j1(x);
                for n in 1..m {
                    let c = (2.0 * n as f64 / x) * b - a;
                    a = b;
                    b = c;
                }
                b
            } else {
                jn_miller(m, x)
            }
        }
    }
}

/// Miller backward recurrence normalized with J_0 + 2 sum_{k>=1} J_{2k} = 1.
fn jn_miller(m: u32, x: f64) -> f64 {
    let start = m as i64 + 40 + x as i64;
    let mut f_np1 = 0.0_f64;
    let mut f_n = 1e-30_f64;
    let mut sum = 0.0_f64;
    let mut result = 0.0_f64;
    let mut n = start;
    while n >= 0 {
        if n as u32 == m {
            result = f_n;
        }
        if n % 2 == 0 {
            sum += if n == 0 { f_n } else { 2.0 * f_n };
        }
        if n > 0 {
            let f_nm1 = (2.0 * n as f64 / x) * f_n - f_np1;
            f_np1 = f_n;
            f_n = f_nm1;
            if f_n.abs() > 1e250 {
                f_n *= 1e-250;
                f_np1 *= 1e-250;
                sum *= 1e-250;
                result *= 1e-250;
            }
        }
        n -= 1;
    }
    result / sum
}

pub(crate) fn yn(m: u32, x: f64) -> f64 {
    match m {
        0 => y0(x),
        1 => y1(x),
        _ => {
            // forward recurrence is stable for Y (the dominant solution)
            let mut a = y0(x);
            let mut b = y1(x);
            for n in 1..m {
                let c = (2.0 * n as f64 / x) * b - a;
                a = b;
                b = c;
                if !b.is_finite() {
                    return f64::NEG_INFINITY;
                }
            }
            b
        }
    }
}

pub(crate) fn j0(x: f64) -> f64 {
    if x <= SERIES_CROSSOVER {
        // sum (-1)^k (x^2/4)^k / (k!)^2
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        hankel_asymptotic(0, x).0
    }
}

pub(crate) fn j1(x: f64) -> f64 {
    if x <= SERIES_CROSSOVER {
        // (x/2) sum (-1)^k (x^2/4)^k / (k! (k+1)!)
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -q / ((k * (k + 1)) as f64);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        0.5 * x * sum
    } else {
        hankel_asymptotic(1, x).0
    }
}

pub(crate) fn y0(x: f64) -> f64 {
    if x <= SERIES_CROSSOVER {
        // (2/pi)[(ln(x/2)+gamma) J0 + sum (-1)^{k+1} H_k (x^2/4)^k/(k!)^2]
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut h = 0.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -q / ((k * k) as f64);
            h += 1.0 / k as f64;
            sum -= term * h;
            if term.abs() < 1e-18 {
                break;
            }
        }
        (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0(x) + sum)
    } else {
        hankel_asymptotic(0, x).1
    }
}

pub(crate) fn y1(x: f64) -> f64 {
    if x <= SERIES_CROSSOVER {
        // (2/pi)(ln(x/2)+gamma) J1 - 2/(pi x)
        //   - (1/pi) sum (-1)^k (H_k + H_{k+1}) (x/2)^{2k+1}/(k!(k+1)!)
        let q = 0.25 * x * x;
        let half = 0.5 * x;
        let mut term = half; // (x/2)^{2k+1}/(k!(k+1)!) at k = 0
        let mut hk = 0.0;
        let mut hk1 = 1.0;
        let mut sum = term * (hk + hk1);
        let mut sign = 1.0;
        for k in 1..60 {
            term *= q / ((k * (k + 1)) as f64);
            sign = -sign;
            hk += 1.0 / k as f64;
            hk1 += 1.0 / (k + 1) as f64;
            sum += sign * term * (hk + hk1);
            if term.abs() < 1e-18 {
                break;
            }
        }
        (2.0 / PI) * ((0.5 * x).ln() + EULER_GAMMA) * j1(x) - 2.0 / (PI * x) - sum / PI
    } else {
        hankel_asymptotic(1, x).1
    }
}

/// Large-argument amplitude/phase expansion for orders 0 and 1, truncated at
/// the smallest term. Returns (J_n, Y_n).
fn hankel_asymptotic(n: u32, x: f64) -> (f64, f64) {
    let mu = (4 * n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k = prod_{j<=k} (mu - (2j-1)^2) / (8 j)
    let mut prev = f64::INFINITY;
    for k in 1..40u32 {
        let t = 2.0 * k as f64 - 1.0;
        a *= (mu - t * t) / (8.0 * k as f64);
        let term = a / x.powi(k as i32);
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - (2.0 * n as f64 + 1.0) * PI / 4.0;
    let amp = (2.0 / (PI * x)).sqrt();
    (
        amp * (p * chi.cos() - q * chi.sin()),
        amp * (p * chi.sin() + q * chi.cos()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn order(m: u32) -> CylinderOrder {
        CylinderOrder::new(m).unwrap()
    }

    /// Independent oracle: truncated power series for J_0, used only here.
    fn j0_series_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        for k in (0..40).rev() {
            let kf = k as f64;
            let term = (0..k).fold(1.0, |acc, j| {
                let jf = (j + 1) as f64;
                -acc * 0.25 * x * x / (jf * jf)
            });
            sum += term;
            let _ = kf;
        }
        sum
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(order(0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(order(1), 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(order(7), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_j0_root_by_bisection_oracle() {
        // bisect the independent series evaluation of J_0 on [2, 3]
        let (mut a, mut b) = (2.0_f64, 3.0_f64);
        assert!(j0_series_oracle(a) > 0.0 && j0_series_oracle(b) < 0.0);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if j0_series_oracle(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let x0 = 0.5 * (a + b);
        assert_abs_diff_eq!(x0, 2.404825557695773, epsilon = 1e-9);
        assert_abs_diff_eq!(bessel_j(order(0), x0).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn hankel_is_j_plus_iy() {
        for &x in &[0.3, 1.0, 5.0, 20.0, 77.0] {
            for m in [0u32, 1, 3, 11] {
                let h = hankel1(order(m), x).unwrap();
                let j = bessel_j(order(m), x).unwrap();
                let y = bessel_y(order(m), x).unwrap();
                assert_eq!(h, Complex64::new(j, y));
            }
        }
    }

    #[test]
    fn wronskian_identity() {
        // J_m Y_m' - J_m' Y_m = 2/(pi x) on a log grid, m <= 20
        let n_pts = 40;
        for i in 0..=n_pts {
            let x = 0.5 * (100.0_f64).powf(i as f64 / n_pts as f64);
            for m in 0..=20u32 {
                let j = bessel_j(order(m), x).unwrap();
                let jp = bessel_j_prime(order(m), x).unwrap();
                let y = bessel_y(order(m), x).unwrap();
                let yp = bessel_y_prime(order(m), x).unwrap();
                let w = j * yp - jp * y;
                assert_abs_diff_eq!(w, 2.0 / (PI * x), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn three_term_recurrence() {
        for &x in &[0.5, 3.3, 14.2, 49.0] {
            for m in 1..=25u32 {
                let lhs = bessel_j(order(m - 1), x).unwrap() + bessel_j(order(m + 1), x).unwrap();
                let rhs = 2.0 * m as f64 / x * bessel_j(order(m), x).unwrap();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn jacobi_anger_partial_sums() {
        // sum_{|m|<=M} i^m J_m(kr) e^{im theta} -> e^{i kr cos theta}
        for &kr in &[0.7, 5.0, 20.0] {
            let m_max = kr as i32 + 40;
            for s in 0..24 {
                let theta = 2.0 * PI * s as f64 / 24.0;
                let mut acc = Complex64::new(0.0, 0.0);
                for m in -m_max..=m_max {
                    let im = Complex64::new(0.0, 1.0).powi(m);
                    let e = Complex64::new(0.0, m as f64 * theta).exp();
                    acc += im * jn_signed(m, kr) * e;
                }
                let exact = Complex64::new(0.0, kr * theta.cos()).exp();
                assert!((acc - exact).norm() < 1e-8, "kr={kr} theta={theta}");
            }
        }
    }

    #[test]
    fn reference_values() {
        // frozen from an independent multiprecision evaluation
        assert_abs_diff_eq!(
            bessel_j(order(0), 1.0).unwrap(),
            0.7651976865579666,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bessel_j(order(1), 1.0).unwrap(),
            0.44005058574493355,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bessel_y(order(0), 1.0).unwrap(),
            0.08825696421567696,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bessel_y(order(1), 1.0).unwrap(),
            -0.7812128213002887,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            bessel_j(order(5), 30.0).unwrap(),
            -0.143240295512077,
            epsilon = 1e-11
        );
        assert_abs_diff_eq!(
            bessel_j(order(40), 10.0).unwrap(),
            6.030895312346907e-21,
            epsilon = 1e-28
        );
    }

    #[test]
    fn domain_errors() {
        assert!(CylinderOrder::new(MAX_ORDER + 1).is_err());
        assert!(bessel_j(order(0), f64::NAN).is_err());
        assert!(bessel_y(order(0), 0.0).is_err());
        assert!(bessel_y(order(0), -1.0).is_err());
        assert!(hankel1(order(2), 0.0).is_err());
    }

    #[test]
    fn deterministic_bit_identical() {
        let a = bessel_j(order(17), 23.456).unwrap();
        let b = bessel_j(order(17), 23.456).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
