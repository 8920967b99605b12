//! E1 — non-scattering at a disk transmission eigenvalue.
//!
//! At a transmission eigenvalue of a constant-contrast disk the interior
//! eigenfunction v is itself a (single-mode) Herglotz wave, and sending that
//! wave at the scatterer produces an (ideally) vanishing far field. The
//! experiment checks two things: the far-field norm with the exact kernel is
//! a tiny fraction of the far-field norm of the same kernel at a detuned
//! wavenumber, and perturbing the incident wave away from the eigenfunction
//! by an L^2 error of size eps produces a far field that scales linearly in
//! eps (log-log slope near 1 over several decades).

use crate::config::E1Config;
use crate::output::{fmt_f64, OutputDir};
use crate::report::ExperimentReport;
use anyhow::{anyhow, Result};
use num_complex::Complex64;
use tescat::geometry::{build_grid, Domain};
use tescat::herglotz::HerglotzKernel;
use tescat::scattering::disk_far_field;
use tescat::teig::{disk_eigenvalues, EigenfieldRepr};
use tescat::Vec2;

pub fn run(cfg: &E1Config, out: &OutputDir) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("E1");
    let a = cfg.radius;
    let contrast = cfg.contrast;
    let n_ref = (1.0 + contrast).sqrt();
    let i_unit = Complex64::new(0.0, 1.0);

    // first transmission eigenvalue in the window
    let roots = disk_eigenvalues(cfg.m_max, (cfg.k_window[0], cfg.k_window[1]), a, n_ref)
        .map_err(|e| anyhow!("{e}"))?;
    let &(m_star, k_star) = roots
        .first()
        .ok_or_else(|| anyhow!("no transmission eigenvalue in the configured window"))?;

    // exact eigenfunction v = A J_m(k r) e^{im theta} as a Herglotz wave:
    // kernel c_m = A / (2 pi i^m)
    let pair = tescat::teig::disk_eigenfunction(m_star, k_star, a, n_ref)
        .map_err(|e| anyhow!("{e}"))?;
    let a_coef = match &pair.repr {
        EigenfieldRepr::DiskMode { a_coef, .. } => *a_coef,
        _ => unreachable!("disk eigenfunction is a disk mode"),
    };
    let c_m = Complex64::new(a_coef, 0.0) / (2.0 * std::f64::consts::PI * i_unit.powi(m_star as i32));
    let g_exact = HerglotzKernel::single_mode(m_star as i32, c_m).map_err(|e| anyhow!("{e}"))?;

    // far field with the exact kernel, on- vs detuned wavenumber
    let ff_star = disk_far_field(a, contrast, k_star, &g_exact, cfg.far_field_dirs)
        .map_err(|e| anyhow!("{e}"))?;
    let ff_detuned = disk_far_field(a, contrast, k_star + cfg.detune, &g_exact, cfg.far_field_dirs)
        .map_err(|e| anyhow!("{e}"))?;
    let ratio = ff_star.l2_norm / ff_detuned.l2_norm;
    report.check(
        "nonscattering_contrast",
        ratio <= 1e-3,
        format!(
            "|u_inf| on-eigenvalue {:.3e} vs detuned {:.3e}, ratio {:.3e} (<= 1e-3)",
            ff_star.l2_norm, ff_detuned.l2_norm, ratio
        ),
    );

    // perturbation family: v_j = v + eps * u_pert with a normalized incident
    // wave in the next angular mode; eps_j = ||v - v_j||_{L^2(disk)}
    let g_pert = HerglotzKernel::single_mode(m_star as i32 + 1, Complex64::new(1.0, 0.0))
        .and_then(|g| g.normalize())
        .map_err(|e| anyhow!("{e}"))?;
    let domain = Domain::disk(Vec2::zeros(), a).map_err(|e| anyhow!("{e}"))?;
    let grid = build_grid(&domain, cfg.grid_h).map_err(|e| anyhow!("{e}"))?;
    let pert_l2: f64 = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&x, &w)| g_pert.evaluate_at(k_star, x).norm_sqr() * w)
        .sum::<f64>()
        .sqrt();
    let ff_pert = disk_far_field(a, contrast, k_star, &g_pert, cfg.far_field_dirs)
        .map_err(|e| anyhow!("{e}"))?;

    let mut rows = Vec::new();
    let mut log_eps = Vec::new();
    let mut log_ff = Vec::new();
    for &eps in &cfg.epsilons {
        let g_j = g_exact
            .add_scaled(&g_pert, Complex64::new(eps, 0.0))
            .map_err(|e| anyhow!("{e}"))?;
        let ff_j = disk_far_field(a, contrast, k_star, &g_j, cfg.far_field_dirs)
            .map_err(|e| anyhow!("{e}"))?;
        let eps_l2 = eps * pert_l2;
        log_eps.push(eps_l2.ln());
        log_ff.push(ff_j.l2_norm.ln());
        rows.push(vec![
            fmt_f64(eps_l2),
            fmt_f64(ff_j.l2_norm),
            fmt_f64(g_j.l2_norm()),
        ]);
    }
    out.write_csv("e1_slope.csv", &["eps_l2", "farfield_norm", "kernel_norm"], &rows)?;
    out.write_csv(
        "e1_contrast.csv",
        &["k", "farfield_norm"],
        &[
            vec![fmt_f64(k_star), fmt_f64(ff_star.l2_norm)],
            vec![fmt_f64(k_star + cfg.detune), fmt_f64(ff_detuned.l2_norm)],
        ],
    )?;

    // least-squares slope of log ||u_inf|| vs log eps
    let n = log_eps.len() as f64;
    let mx = log_eps.iter().sum::<f64>() / n;
    let my = log_ff.iter().sum::<f64>() / n;
    let sxx: f64 = log_eps.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = log_eps
        .iter()
        .zip(&log_ff)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let decades = (log_eps.iter().cloned().fold(f64::MIN, f64::max)
        - log_eps.iter().cloned().fold(f64::MAX, f64::min))
        / std::f64::consts::LN_10;
    report.check(
        "loglog_slope",
        (0.8..=1.2).contains(&slope),
        format!("slope {slope:.4} (in [0.8, 1.2])"),
    );
    report.check(
        "epsilon_decades",
        decades >= 3.0,
        format!("{decades:.2} decades of eps (>= 3)"),
    );
    let max_kernel_norm = cfg
        .epsilons
        .iter()
        .map(|&e| (g_exact.l2_norm().powi(2) + (e * g_pert.l2_norm()).powi(2)).sqrt())
        .fold(0.0_f64, f64::max);
    report.check(
        "kernel_norms_bounded",
        max_kernel_norm <= 2.0 * g_exact.l2_norm() + 1.0,
        format!("max ||g_j|| = {max_kernel_norm:.4e}"),
    );

    report.metadata = serde_json::json!({
        "mode": m_star,
        "k_star": k_star,
        "pattern_norm_perturbation": ff_pert.l2_norm,
        "eigenfunction_residuals": { "trace": pair.residual_trace, "normal": pair.residual_normal },
    });
    Ok(report)
}
