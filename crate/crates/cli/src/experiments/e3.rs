//! E3 — strictly positive far-field floor for order-N incident waves.
//!
//! For each order N, draws an ensemble of normalized Herglotz kernels whose
//! waves vanish to order exactly N at a chosen polygon vertex, scatters each
//! off the potential, and verifies that every far-field norm stays far above
//! the zero-potential noise floor. The theoretical lower-bound envelope shape
//! is emitted alongside; its double-exponential constants are not reproduced.

use crate::config::E3Config;
use crate::output::{fmt_f64, fmt_usize, OutputDir};
use crate::report::ExperimentReport;
use anyhow::{anyhow, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tescat::cone::bound_curve;
use tescat::geometry::{build_grid, check_admissibility, Domain, PotentialSpec};
use tescat::herglotz::{
    vanishing_constraint_nullspace, vanishing_order, HerglotzKernel, DEFAULT_ORDER_TOL,
};
use tescat::scattering::{far_field, LsOperator};

/// Random unit element of the constraint null space, mapped to a normalized
/// kernel.
fn random_order_kernel(
    basis: &nalgebra::DMatrix<Complex64>,
    rng: &mut ChaCha8Rng,
) -> Result<HerglotzKernel> {
    let r = basis.ncols();
    let w = nalgebra::DVector::<Complex64>::from_iterator(
        r,
        (0..r).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    );
    let c = basis * w;
    HerglotzKernel::from_coeffs(c.iter().cloned().collect())
        .map_err(|e| anyhow!("{e}"))?
        .normalize()
        .map_err(|e| anyhow!("{e}"))
}

pub fn run(cfg: &E3Config, seed: u64, out: &OutputDir) -> Result<ExperimentReport> {
    use rand::SeedableRng;
    let mut report = ExperimentReport::new("E3");
    let spec = cfg.potential.build().map_err(|e| anyhow!("{e}"))?;
    let admissibility = check_admissibility(&spec);
    if !admissibility.admissible {
        return Err(anyhow!("E3 requires an admissible potential"));
    }
    let Domain::Polygon(poly) = &spec.domain else {
        return Err(anyhow!("E3 requires a polygon domain"));
    };
    if cfg.vertex_index >= poly.vertices().len() {
        return Err(anyhow!("vertex index {} out of range", cfg.vertex_index));
    }
    if !admissibility.witnesses.contains(&cfg.vertex_index) {
        return Err(anyhow!(
            "the contrast vanishes at vertex {}; pick a witnessing vertex",
            cfg.vertex_index
        ));
    }
    let x_c = poly.vertices()[cfg.vertex_index];
    let k = cfg.k;

    let grid = build_grid(&spec.domain, cfg.grid_h).map_err(|e| anyhow!("{e}"))?;
    let op = LsOperator::new(&spec, k, &grid).map_err(|e| anyhow!("{e}"))?;
    // zero-potential control shares the grid and incident waves
    let spec0 = PotentialSpec::new(
        spec.domain.clone(),
        tescat::geometry::Contrast::constant(0.0),
        1.0,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let op0 = LsOperator::new(&spec0, k, &grid).map_err(|e| anyhow!("{e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut floors = Vec::new();
    let mut noise_floor = 1e-12_f64;
    let mut max_residual = 0.0_f64;
    let mut all_orders_exact = true;

    for &n_order in &cfg.orders {
        let basis = vanishing_constraint_nullspace(k, x_c, n_order, cfg.m_trunc)
            .map_err(|e| anyhow!("{e}"))?;
        let mut norms = Vec::new();
        let mut scaled = Vec::new();
        for j in 0..cfg.ensemble_size {
            let g = random_order_kernel(&basis, &mut rng)?;
            let vo = vanishing_order(&g, k, x_c, DEFAULT_ORDER_TOL, n_order + 4)
                .map_err(|e| anyhow!("{e}"))?;
            all_orders_exact &= vo.order == n_order;
            let u_inc: Vec<Complex64> =
                grid.nodes.iter().map(|&x| g.evaluate_at(k, x)).collect();
            let result = op.solve(&u_inc, 1e-10).map_err(|e| anyhow!("{e}"))?;
            let ff = far_field(&spec, &result, &grid, cfg.far_field_dirs)
                .map_err(|e| anyhow!("{e}"))?;
            let result0 = op0.solve(&u_inc, 1e-10).map_err(|e| anyhow!("{e}"))?;
            let ff0 = far_field(&spec0, &result0, &grid, cfg.far_field_dirs)
                .map_err(|e| anyhow!("{e}"))?;
            noise_floor = noise_floor.max(ff0.l2_norm);
            max_residual = max_residual.max(result.residual);
            norms.push(ff.l2_norm);
            scaled.push(ff.l2_norm / vo.leading.norm().max(1e-300));
            rows.push(vec![
                fmt_usize(n_order),
                fmt_usize(j),
                fmt_usize(vo.order),
                fmt_f64(vo.leading.norm()),
                fmt_f64(ff.l2_norm),
                fmt_f64(result.residual),
                fmt_f64(ff0.l2_norm),
            ]);
        }
        let min_ff = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean: f64 = scaled.iter().sum::<f64>() / scaled.len() as f64;
        let var: f64 =
            scaled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / scaled.len() as f64;
        let cv = var.sqrt() / mean;
        floors.push(serde_json::json!({
            "order": n_order,
            "empirical_floor": min_ff,
            "coefficient_of_variation_scaled": cv,
        }));
        report.check(
            &format!("order_{n_order}_floor"),
            min_ff > cfg.noise_margin * noise_floor && min_ff > 1e-12,
            format!(
                "min ||u_inf|| = {min_ff:.3e} vs noise floor {noise_floor:.3e} (margin {})",
                cfg.noise_margin
            ),
        );
    }
    report.check(
        "orders_exact",
        all_orders_exact,
        "every sampled kernel has vanishing order exactly N".to_string(),
    );
    report.check(
        "solver_residuals",
        max_residual < 1e-6,
        format!("max solver residual {max_residual:.3e}"),
    );
    out.write_csv(
        "e3_ensemble.csv",
        &[
            "order",
            "sample",
            "detected_order",
            "leading_poly_norm",
            "farfield_norm",
            "solver_residual",
            "control_farfield_norm",
        ],
        &rows,
    )?;

    // theoretical envelope shape: minimum of tau^{-gamma} + tau^{q}/R over
    // tau, as the data-size parameter R grows
    let mut env_rows = Vec::new();
    for &n_order in &cfg.orders {
        for exp in 1..=12 {
            let r_value = 10.0_f64.powi(exp);
            let (tau_m, min_value) = bound_curve(n_order, 2, 1.0, r_value)
                .map_err(|e| anyhow!("{e}"))?;
            env_rows.push(vec![
                fmt_usize(n_order),
                fmt_f64(r_value),
                fmt_f64(tau_m),
                fmt_f64(min_value),
            ]);
        }
    }
    out.write_csv(
        "e3_envelope.csv",
        &["order", "r_value", "tau_m", "envelope_min"],
        &env_rows,
    )?;

    report.metadata = serde_json::json!({
        "vertex": [x_c.x, x_c.y],
        "noise_floor": noise_floor,
        "per_order": floors,
        // symbols from the qualitative bound, reported but not verified:
        // ell >= 2(N + n + 4), script_S, eps_m, gamma = min(1, alpha, beta)
        "unverified_constants": {
            "ell_lower_bounds": cfg.orders.iter().map(|n| 2 * (n + 2 + 4)).collect::<Vec<_>>(),
            "gamma": 1.0,
        },
    });
    Ok(report)
}
