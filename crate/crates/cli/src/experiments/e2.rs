//! E2 — corner vanishing of transmission eigenfunctions on a convex polygon.
//!
//! Scans for the first transmission eigenvalues of the polygon, reconstructs
//! each eigenfunction from the boundary-collocation null direction, and
//! measures shrinking-ball averages of |v| at every vertex. The acceptance
//! surrogate for corner vanishing: the average at the smallest radius is
//! below a small fraction of the domain average and decreases over the last
//! three radii, while the same criterion fails at an edge midpoint.

use crate::config::E2Config;
use crate::output::{fmt_f64, fmt_usize, OutputDir};
use crate::report::ExperimentReport;
use anyhow::{anyhow, Result};
use tescat::geometry::{check_admissibility, Domain};
use tescat::teig::{
    field_profile, reconstruct_eigenfunction, scan_eigenvalues, vanishing_profile,
    VanishingProfile,
};
use tescat::Vec2;

/// Decreasing over the last three radii and small against the domain scale.
fn corner_criterion(profile: &VanishingProfile, ratio: f64) -> (bool, bool) {
    let n = profile.samples.len();
    // radii are emitted largest to smallest
    let smallest = profile.samples[n - 1].1;
    let small_enough = smallest <= ratio * profile.domain_average;
    let decreasing = n >= 3
        && profile.samples[n - 3].1 > profile.samples[n - 2].1
        && profile.samples[n - 2].1 > profile.samples[n - 1].1;
    (small_enough, decreasing)
}

pub fn run(cfg: &E2Config, out: &OutputDir) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("E2");
    let spec = cfg.potential.build().map_err(|e| anyhow!("{e}"))?;
    let admissibility = check_admissibility(&spec);
    if !admissibility.admissible {
        return Err(anyhow!("E2 requires an admissible potential"));
    }
    let contrast = cfg
        .potential
        .contrast
        .is_constant()
        .ok_or_else(|| anyhow!("E2 requires a constant contrast"))?;
    let Domain::Polygon(poly) = &spec.domain else {
        return Err(anyhow!("E2 requires a polygon domain"));
    };
    let poly = poly.clone();
    let domain = spec.domain.clone();

    let params = cfg.mfs.to_params();
    let scan = scan_eigenvalues(
        &domain,
        contrast,
        (cfg.k_range[0], cfg.k_range[1]),
        cfg.scan_step,
        &params,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let scan_rows: Vec<Vec<String>> = scan
        .k_grid
        .iter()
        .zip(&scan.sigma_min)
        .map(|(&k, &s)| vec![fmt_f64(k), fmt_f64(s)])
        .collect();
    out.write_csv("e2_scan.csv", &["k", "sigma_min"], &scan_rows)?;
    if scan.detected_minima.len() < cfg.n_eigen {
        return Err(anyhow!(
            "found {} eigenvalue(s) in the scan range, need {}",
            scan.detected_minima.len(),
            cfg.n_eigen
        ));
    }

    let radii: Vec<f64> = (0..cfg.n_radii)
        .map(|j| cfg.radius_max * cfg.radius_factor.powi(j as i32))
        .collect();
    let mut rows = Vec::new();
    let mut ks = Vec::new();
    for (e_idx, &k_star) in scan.detected_minima.iter().take(cfg.n_eigen).enumerate() {
        let pair = reconstruct_eigenfunction(&domain, contrast, k_star, &params, cfg.sigma_cap)
            .map_err(|e| anyhow!("{e}"))?;
        ks.push(serde_json::json!({
            "k": k_star,
            "residual_trace": pair.residual_trace,
            "residual_normal": pair.residual_normal,
        }));

        let mut all_corners_pass = true;
        for (v_idx, &vertex) in poly.vertices().iter().enumerate() {
            let profile =
                vanishing_profile(&pair, &domain, vertex, &radii).map_err(|e| anyhow!("{e}"))?;
            for &(r, avg) in &profile.samples {
                rows.push(vec![
                    fmt_usize(e_idx),
                    fmt_f64(k_star),
                    format!("vertex_{v_idx}"),
                    fmt_f64(r),
                    fmt_f64(avg),
                    fmt_f64(profile.domain_average),
                ]);
            }
            let (small, decreasing) = corner_criterion(&profile, cfg.corner_ratio);
            all_corners_pass &= small && decreasing;
            report.check(
                &format!("eigenfunction_{e_idx}_vertex_{v_idx}"),
                small && decreasing,
                format!(
                    "smallest-radius average {:.3e} vs domain average {:.3e} (ratio cap {}), decreasing={decreasing}",
                    profile.samples[profile.samples.len() - 1].1,
                    profile.domain_average,
                    cfg.corner_ratio
                ),
            );
        }

        // control: the same criterion must fail at an edge midpoint
        let mid = 0.5 * (poly.vertices()[0] + poly.vertices()[1]);
        let control = field_profile(|x: Vec2| pair.v_at(x), &domain, mid, &radii)
            .map_err(|e| anyhow!("{e}"))?;
        for &(r, avg) in &control.samples {
            rows.push(vec![
                fmt_usize(e_idx),
                fmt_f64(k_star),
                "edge_midpoint".to_string(),
                fmt_f64(r),
                fmt_f64(avg),
                fmt_f64(control.domain_average),
            ]);
        }
        let (c_small, c_decreasing) = corner_criterion(&control, cfg.corner_ratio);
        report.check(
            &format!("eigenfunction_{e_idx}_edge_control_fails"),
            !(c_small && c_decreasing),
            format!(
                "edge-midpoint smallest-radius average {:.3e} vs domain average {:.3e}",
                control.samples[control.samples.len() - 1].1,
                control.domain_average
            ),
        );
        let _ = all_corners_pass;
    }
    out.write_csv(
        "e2_profiles.csv",
        &[
            "eigenfunction",
            "k",
            "site",
            "radius",
            "ball_average",
            "domain_average",
        ],
        &rows,
    )?;

    report.metadata = serde_json::json!({
        "detected_minima": scan.detected_minima,
        "threshold": scan.threshold,
        "eigenfunctions": ks,
        "radii": radii,
    });
    Ok(report)
}
