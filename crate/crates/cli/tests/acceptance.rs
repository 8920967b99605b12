//! End-to-end acceptance suite: eight criteria, one test each, printing a
//! single PASS/FAIL line per criterion (run with `--nocapture` to see them
//! even on success). Each criterion also enforces a wall-time budget.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::{Duration, Instant};
use tescat::geometry::{build_grid, Contrast, Domain, PotentialSpec};
use tescat::scattering::{far_field, scattered_field_at, solve_total_field, ScatterResult};
use tescat::specfun::{bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, CylinderOrder};
use tescat::teig::{disk_eigenvalues, scan_eigenvalues, MfsParams};
use tescat::Vec2;
use tescat_cli::config::{E1Config, E2Config, E3Config, E4Config};
use tescat_cli::experiments::{e1, e2, e3, e4};
use tescat_cli::output::OutputDir;

fn verdict(criterion: u32, pass: bool, detail: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    let within = elapsed <= budget;
    println!(
        "ACCEPTANCE {criterion}: {} — {detail} [{:.1}s of {:.0}s budget]",
        if pass && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
    assert!(
        within,
        "criterion {criterion} exceeded its {:.0}s budget ({:.1}s)",
        budget.as_secs_f64(),
        elapsed.as_secs_f64()
    );
}

fn jn(m: i32, x: f64) -> f64 {
    let v = bessel_j(CylinderOrder::new(m.unsigned_abs()).unwrap(), x).unwrap();
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

fn square_spec(contrast: f64) -> PotentialSpec {
    PotentialSpec::new(
        Domain::Polygon(tescat::geometry::unit_square()),
        Contrast::constant(contrast),
        0.9,
    )
    .unwrap()
}

fn plane_wave(k: f64, d: Vec2) -> impl Fn(Vec2) -> Complex64 {
    move |x: Vec2| Complex64::new(0.0, k * d.dot(&x)).exp()
}

/// Criterion 1: cylinder-function identities and the plane-wave expansion.
#[test]
fn c1_special_functions() {
    let start = Instant::now();
    let mut worst_wronskian = 0.0_f64;
    let mut worst_recurrence = 0.0_f64;
    for m in 0..=20u32 {
        let order = CylinderOrder::new(m).unwrap();
        for i in 0..200 {
            let x = 0.5 + 49.5 * i as f64 / 199.0;
            // J_m Y_m' - J_m' Y_m = 2/(pi x)
            let w = bessel_j(order, x).unwrap() * bessel_y_prime(order, x).unwrap()
                - bessel_j_prime(order, x).unwrap() * bessel_y(order, x).unwrap();
            let exact = 2.0 / (PI * x);
            worst_wronskian = worst_wronskian.max((w - exact).abs() / exact);
            // C_{m-1} + C_{m+1} = (2m/x) C_m for both kinds
            if m >= 1 {
                let scale = |t: f64| t.abs().max(1.0);
                let rj = jn(m as i32 - 1, x) + jn(m as i32 + 1, x)
                    - 2.0 * m as f64 / x * jn(m as i32, x);
                worst_recurrence =
                    worst_recurrence.max(rj.abs() / scale(2.0 * m as f64 / x * jn(m as i32, x)));
                let y = |mm: u32| bessel_y(CylinderOrder::new(mm).unwrap(), x).unwrap();
                let ry = y(m - 1) + y(m + 1) - 2.0 * m as f64 / x * y(m);
                worst_recurrence =
                    worst_recurrence.max(ry.abs() / scale(2.0 * m as f64 / x * y(m)));
            }
        }
    }
    // e^{i z cos t} = sum_m i^m J_m(z) e^{i m t}, truncated at |m| = 60
    let i_unit = Complex64::new(0.0, 1.0);
    let mut worst_expansion = 0.0_f64;
    for iz in 0..20 {
        let z = 1.0 + 19.0 * iz as f64 / 19.0;
        for it in 0..32 {
            let t = 2.0 * PI * it as f64 / 32.0;
            let mut s = Complex64::new(0.0, 0.0);
            for m in -60..=60i32 {
                s += i_unit.powi(m) * jn(m, z) * (i_unit * (m as f64) * t).exp();
            }
            let exact = (i_unit * z * t.cos()).exp();
            worst_expansion = worst_expansion.max((s - exact).norm());
        }
    }
    verdict(
        1,
        worst_wronskian <= 1e-9 && worst_recurrence <= 1e-9 && worst_expansion < 1e-8,
        &format!(
            "Wronskian err {worst_wronskian:.2e}, recurrence err {worst_recurrence:.2e} \
             (<= 1e-9), plane-wave expansion sup err {worst_expansion:.2e} (< 1e-8)"
        ),
        start,
        Duration::from_secs(10),
    );
}

/// Criterion 2: forward-solver sanity — transparency at zero contrast,
/// first-order accuracy of the weak-contrast linearization, near/far-field
/// consistency at two radii, plane-wave reciprocity.
#[test]
fn c2_forward_solver() {
    let start = Instant::now();
    let d = Vec2::new(1.0, 0.0);

    // zero contrast scatters nothing
    let spec0 = square_spec(0.0);
    let grid0 = build_grid(&spec0.domain, 0.1).unwrap();
    let res0 = solve_total_field(&spec0, plane_wave(3.0, d), 3.0, &grid0, 1e-10).unwrap();
    let ff0 = far_field(&spec0, &res0, &grid0, 64).unwrap();
    let zero_ok = ff0.l2_norm < 1e-12;

    // weak contrast: the far-field deviation from the single-scattering
    // (Born) term, relative to that term, is linear in the contrast —
    // halving the contrast halves it within 20%
    let k = 2.0;
    let born_rel_dev = |eps: f64| {
        let spec = square_spec(eps);
        let grid = build_grid(&spec.domain, 0.05).unwrap();
        let res = solve_total_field(&spec, plane_wave(k, d), k, &grid, 1e-12).unwrap();
        let born = ScatterResult {
            u: res.u_inc.clone(),
            ..res.clone()
        };
        let ff = far_field(&spec, &res, &grid, 64).unwrap();
        let ffb = far_field(&spec, &born, &grid, 64).unwrap();
        let dev: f64 = ff
            .values
            .iter()
            .zip(&ffb.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale: f64 = ffb.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        dev / scale
    };
    let ratio = born_rel_dev(0.05) / born_rel_dev(0.025);
    let born_ok = (ratio - 2.0).abs() <= 0.4;

    // sqrt(r) e^{-ikr} u^s(r theta) matches the far field at two radii
    let k = 3.0;
    let spec = square_spec(1.0);
    let grid = build_grid(&spec.domain, 0.04).unwrap();
    let res = solve_total_field(&spec, plane_wave(k, d), k, &grid, 1e-10).unwrap();
    let ff = far_field(&spec, &res, &grid, 64).unwrap();
    let mut nf_rel = 0.0_f64;
    for &r in &[200.0 / k, 400.0 / k] {
        let pts: Vec<Vec2> = ff
            .angles
            .iter()
            .map(|&t| r * Vec2::new(t.cos(), t.sin()))
            .collect();
        let us = scattered_field_at(&spec, &res, &grid, &pts).unwrap();
        let mut num = 0.0;
        let mut den = 0.0;
        for (usv, ffv) in us.iter().zip(&ff.values) {
            let ext = r.sqrt() * Complex64::new(0.0, -k * r).exp() * usv;
            num += (ext - ffv).norm_sqr();
            den += ffv.norm_sqr();
        }
        nf_rel = nf_rel.max((num / den).sqrt());
    }
    let nf_ok = nf_rel < 0.02;

    // u^s_inf(x_hat; d) = u^s_inf(-d; -x_hat)
    let grid_r = build_grid(&spec.domain, 0.05).unwrap();
    let eval_ff = |dir: Vec2, obs: Vec2| {
        let res = solve_total_field(&spec, plane_wave(k, dir), k, &grid_r, 1e-12).unwrap();
        let c0 = Complex64::new(0.0, PI / 4.0).exp() / (8.0 * PI * k).sqrt() * k * k;
        let mut s = Complex64::new(0.0, 0.0);
        for p in 0..grid_r.len() {
            s += Complex64::new(0.0, -k * obs.dot(&grid_r.nodes[p])).exp()
                * spec.potential(grid_r.nodes[p])
                * res.u[p]
                * grid_r.weights[p];
        }
        c0 * s
    };
    let xh = Vec2::new(0.6, 0.8);
    let a = eval_ff(d, xh);
    let b = eval_ff(-xh, -d);
    let rec_rel = (a - b).norm() / a.norm();
    let rec_ok = rec_rel < 1e-4;

    verdict(
        2,
        zero_ok && born_ok && nf_ok && rec_ok,
        &format!(
            "zero-contrast far field {:.1e}, linearization ratio {ratio:.3} (in [1.6, 2.4]), \
             near/far rel err {nf_rel:.2e} (< 0.02), reciprocity rel err {rec_rel:.2e} (< 1e-4)",
            ff0.l2_norm
        ),
        start,
        Duration::from_secs(120),
    );
}

/// Criterion 3: disk transmission eigenvalues — determinant roots vs the
/// collocation-scan dips, first five, unit contrast, unit radius.
#[test]
fn c3_disk_eigenvalues_two_ways() {
    let start = Instant::now();
    let n_ref = 2.0_f64.sqrt();
    let window = (7.25, 8.3);
    let mut roots: Vec<f64> = disk_eigenvalues(6, window, 1.0, n_ref)
        .unwrap()
        .into_iter()
        .map(|(_, k)| k)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.truncate(5);
    let domain = Domain::disk(Vec2::zeros(), 1.0).unwrap();
    let params = MfsParams {
        n_charge: 40,
        n_colloc: 80,
        charge_offset: 0.2,
    };
    let scan = scan_eigenvalues(&domain, 1.0, window, 0.004, &params).unwrap();
    let mut worst = 0.0_f64;
    let mut matched = 0;
    for &root in &roots {
        if let Some(dip) = scan
            .detected_minima
            .iter()
            .min_by(|a, b| (*a - root).abs().total_cmp(&(*b - root).abs()))
        {
            let rel = (dip - root).abs() / root;
            if rel <= 1e-3 {
                matched += 1;
            }
            worst = worst.max(rel);
        }
    }
    verdict(
        3,
        roots.len() == 5 && matched == 5,
        &format!(
            "{matched}/5 determinant roots matched by scan dips, worst rel err {worst:.2e} (<= 1e-3)"
        ),
        start,
        Duration::from_secs(180),
    );
}

fn tmp_out() -> (tempfile::TempDir, OutputDir) {
    let dir = tempfile::tempdir().unwrap();
    let out = OutputDir::create(dir.path()).unwrap();
    (dir, out)
}

/// Criterion 4: E1 — non-scattering at a disk transmission eigenvalue.
#[test]
fn c4_e1_nonscattering() {
    let start = Instant::now();
    let (_t, out) = tmp_out();
    let report = e1::run(&E1Config::default(), &out).unwrap();
    verdict(
        4,
        report.passed(),
        &format!("{} checks, all must pass", report.checks.len()),
        start,
        Duration::from_secs(300),
    );
}

/// Criterion 5: E2 — corner vanishing of square transmission eigenfunctions.
#[test]
fn c5_e2_corner_vanishing() {
    let start = Instant::now();
    let (_t, out) = tmp_out();
    let report = e2::run(&E2Config::default(), &out).unwrap();
    verdict(
        5,
        report.passed(),
        &format!("{} checks, all must pass", report.checks.len()),
        start,
        Duration::from_secs(600),
    );
}

/// Criterion 6: E3 — strictly positive far-field floor for order-N waves.
#[test]
fn c6_e3_farfield_floor() {
    let start = Instant::now();
    let (_t, out) = tmp_out();
    let report = e3::run(&E3Config::default(), 1, &out).unwrap();
    verdict(
        6,
        report.passed(),
        &format!("{} checks, all must pass", report.checks.len()),
        start,
        Duration::from_secs(900),
    );
}

/// Criterion 7: E4 — cone Laplace-transform lower bound on the sweep.
#[test]
fn c7_e4_cone_bound() {
    let start = Instant::now();
    let (_t, out) = tmp_out();
    let report = e4::run(&E4Config::default(), 1, &out).unwrap();
    verdict(
        7,
        report.passed(),
        &format!("{} checks, all must pass", report.checks.len()),
        start,
        Duration::from_secs(300),
    );
}

/// Criterion 8: identical config + seed produce byte-identical CSV outputs,
/// exercised on the deterministic E1 pipeline and on the seeded, parallel E4
/// sweep (reduced size).
#[test]
fn c8_determinism() {
    let start = Instant::now();
    let run_e1 = || {
        let (t, out) = tmp_out();
        e1::run(&E1Config::default(), &out).unwrap();
        let bytes = std::fs::read(t.path().join("e1_slope.csv")).unwrap();
        (bytes, std::fs::read(t.path().join("e1_contrast.csv")).unwrap())
    };
    let e1_equal = run_e1() == run_e1();

    let e4_cfg = E4Config {
        max_degree: 1,
        n_samples: 8,
        n_tau: 5,
        ..E4Config::default()
    };
    let run_e4 = || {
        let (t, out) = tmp_out();
        e4::run(&e4_cfg, 7, &out).unwrap();
        std::fs::read(t.path().join("e4_sweep.csv")).unwrap()
    };
    let e4_equal = run_e4() == run_e4();

    verdict(
        8,
        e1_equal && e4_equal,
        &format!("repeat-run CSVs byte-identical: e1={e1_equal}, seeded parallel e4={e4_equal}"),
        start,
        Duration::from_secs(120),
    );
}
