//! Command-line entry point: experiment runner plus utility subcommands.
//! Exit codes: 0 on PASS, 2 when an experiment check fails, 1 on error.

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tescat_cli::config::{self, E1Config, E2Config, E3Config, E4Config};
use tescat_cli::experiments::{e1, e2, e3, e4};
use tescat_cli::output::{fmt_f64, fmt_usize, OutputDir};

#[derive(Parser)]
#[command(name = "tescat", version, about = "scattering laboratory experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON configuration file (defaults reproduce the acceptance setup)
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory for CSVs and the manifest
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// random seed (used by E3 ensembles and E4 sampling)
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// worker-thread count (0 = library default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment (e1 | e2 | e3 | e4)
    Run {
        experiment: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Transmission-eigenvalue utilities
    #[command(subcommand)]
    Teig(TeigCommand),
    /// Far field of one incident Herglotz wave
    Scatter {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tikhonov kernel fit of a target field
    Fit {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cone Laplace-transform utilities
    #[command(subcommand)]
    Cone(ConeCommand),
}

#[derive(Subcommand)]
enum TeigCommand {
    /// Disk eigenvalues from the per-mode determinant
    Disk {
        #[arg(long, default_value_t = 1.0)]
        contrast: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.5)]
        kmin: f64,
        #[arg(long, default_value_t = 8.5)]
        kmax: f64,
        #[arg(long, default_value_t = 6)]
        mmax: u32,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Singular-value scan of a configured domain
    Scan {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum ConeCommand {
    /// Laplace transform of a homogeneous harmonic polynomial over a sector
    Lt {
        #[arg(long, default_value_t = 0)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        a_re: f64,
        #[arg(long, default_value_t = 0.0)]
        a_im: f64,
        #[arg(long, default_value_t = 0.0)]
        b_re: f64,
        #[arg(long, default_value_t = 0.0)]
        b_im: f64,
        #[arg(long, default_value_t = 0.0)]
        sector_start: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        sector_end: f64,
        #[arg(long, default_value_t = -1.0)]
        rho1_re: f64,
        #[arg(long, default_value_t = 0.0)]
        rho1_im: f64,
        #[arg(long, default_value_t = -1.0)]
        rho2_re: f64,
        #[arg(long, default_value_t = 0.0)]
        rho2_im: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn init_threads(n: usize) {
    if n > 0 {
        // ignore failure if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run_experiment(experiment: &str, common: &CommonArgs) -> Result<bool> {
    init_threads(common.threads);
    let out = OutputDir::create(&common.out)?;
    let (report, echo) = match experiment.to_ascii_lowercase().as_str() {
        "e1" => {
            let cfg: E1Config = config::load(common.config.as_deref())?;
            (e1::run(&cfg, &out)?, config::echo(&cfg))
        }
        "e2" => {
            let cfg: E2Config = config::load(common.config.as_deref())?;
            (e2::run(&cfg, &out)?, config::echo(&cfg))
        }
        "e3" => {
            let cfg: E3Config = config::load(common.config.as_deref())?;
            (e3::run(&cfg, common.seed, &out)?, config::echo(&cfg))
        }
        "e4" => {
            let cfg: E4Config = config::load(common.config.as_deref())?;
            (e4::run(&cfg, common.seed, &out)?, config::echo(&cfg))
        }
        other => return Err(anyhow!("unknown experiment '{other}' (expected e1..e4)")),
    };
    report.print();
    out.write_manifest(
        &format!("run {experiment}"),
        echo,
        Some(common.seed),
        serde_json::to_value(&report)?,
    )?;
    Ok(report.passed())
}

fn teig_disk(
    contrast: f64,
    radius: f64,
    kmin: f64,
    kmax: f64,
    mmax: u32,
    out_dir: &Path,
) -> Result<()> {
    let out = OutputDir::create(out_dir)?;
    let n_ref = (1.0 + contrast).sqrt();
    let roots = tescat::teig::disk_eigenvalues(mmax, (kmin, kmax), radius, n_ref)
        .map_err(|e| anyhow!("{e}"))?;
    let rows: Vec<Vec<String>> = roots
        .iter()
        .map(|&(m, k)| vec![fmt_usize(m as usize), fmt_f64(k)])
        .collect();
    out.write_csv("disk_eigenvalues.csv", &["m", "k"], &rows)?;
    for &(m, k) in &roots {
        println!("m = {m}: k = {k:.12}");
    }
    out.write_manifest(
        "teig disk",
        serde_json::json!({
            "contrast": contrast, "radius": radius,
            "kmin": kmin, "kmax": kmax, "mmax": mmax,
        }),
        None,
        serde_json::json!({ "count": roots.len() }),
    )?;
    Ok(())
}

fn teig_scan(common: &CommonArgs) -> Result<()> {
    init_threads(common.threads);
    let cfg: config::TeigScanConfig = config::load(common.config.as_deref())?;
    let out = OutputDir::create(&common.out)?;
    let spec = cfg.potential.build().map_err(|e| anyhow!("{e}"))?;
    let contrast = cfg
        .potential
        .contrast
        .is_constant()
        .ok_or_else(|| anyhow!("the scan requires a constant contrast"))?;
    let scan = tescat::teig::scan_eigenvalues(
        &spec.domain,
        contrast,
        (cfg.k_range[0], cfg.k_range[1]),
        cfg.scan_step,
        &cfg.mfs.to_params(),
    )
    .map_err(|e| anyhow!("{e}"))?;
    let rows: Vec<Vec<String>> = scan
        .k_grid
        .iter()
        .zip(&scan.sigma_min)
        .map(|(&k, &s)| vec![fmt_f64(k), fmt_f64(s)])
        .collect();
    out.write_csv("scan.csv", &["k", "sigma_min"], &rows)?;
    let minima: Vec<Vec<String>> = scan
        .detected_minima
        .iter()
        .map(|&k| vec![fmt_f64(k)])
        .collect();
    out.write_csv("detected_minima.csv", &["k"], &minima)?;
    for k in &scan.detected_minima {
        println!("eigenvalue near k = {k:.8}");
    }
    out.write_manifest(
        "teig scan",
        config::echo(&cfg),
        None,
        serde_json::json!({ "detected": scan.detected_minima, "threshold": scan.threshold }),
    )?;
    Ok(())
}

fn scatter(common: &CommonArgs) -> Result<()> {
    init_threads(common.threads);
    let cfg: config::ScatterConfig = config::load(common.config.as_deref())?;
    let out = OutputDir::create(&common.out)?;
    let spec = cfg.potential.build().map_err(|e| anyhow!("{e}"))?;
    let kernel = match &cfg.kernel {
        Some(v) => tescat::herglotz::HerglotzKernel::from_json(v).map_err(|e| anyhow!("{e}"))?,
        None => tescat::herglotz::HerglotzKernel::single_mode(
            0,
            Complex64::new(1.0 / (2.0 * std::f64::consts::PI), 0.0),
        )
        .map_err(|e| anyhow!("{e}"))?,
    };
    let grid =
        tescat::geometry::build_grid(&spec.domain, cfg.grid_h).map_err(|e| anyhow!("{e}"))?;
    let result = tescat::scattering::solve_total_field(
        &spec,
        |x| kernel.evaluate_at(cfg.k, x),
        cfg.k,
        &grid,
        1e-10,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let ff = tescat::scattering::far_field(&spec, &result, &grid, cfg.far_field_dirs)
        .map_err(|e| anyhow!("{e}"))?;
    let rows: Vec<Vec<String>> = ff
        .angles
        .iter()
        .zip(&ff.values)
        .map(|(&t, v)| vec![fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im)])
        .collect();
    out.write_csv("farfield.csv", &["theta", "re", "im"], &rows)?;
    println!("far-field L2 norm: {:.12e}", ff.l2_norm);
    out.write_manifest(
        "scatter",
        config::echo(&cfg),
        None,
        serde_json::json!({
            "farfield_norm": ff.l2_norm,
            "solver_iterations": result.iterations,
            "solver_residual": result.residual,
            "dense_fallback": result.used_dense_fallback,
        }),
    )?;
    Ok(())
}

fn fit(common: &CommonArgs) -> Result<()> {
    init_threads(common.threads);
    let cfg: config::FitConfig = config::load(common.config.as_deref())?;
    let out = OutputDir::create(&common.out)?;
    let spec = cfg.potential.build().map_err(|e| anyhow!("{e}"))?;
    let target_kernel = match &cfg.target_kernel {
        Some(v) => tescat::herglotz::HerglotzKernel::from_json(v).map_err(|e| anyhow!("{e}"))?,
        None => tescat::herglotz::HerglotzKernel::single_mode(
            2,
            Complex64::new(1.0 / (2.0 * std::f64::consts::PI), 0.0),
        )
        .map_err(|e| anyhow!("{e}"))?,
    };
    let grid =
        tescat::geometry::build_grid(&spec.domain, cfg.grid_h).map_err(|e| anyhow!("{e}"))?;
    let target: Vec<Complex64> = grid
        .nodes
        .iter()
        .map(|&x| target_kernel.evaluate_at(cfg.k, x))
        .collect();
    let fit = tescat::herglotz::fit_kernel(&grid, &target, cfg.k, cfg.m_trunc, cfg.lambda)
        .map_err(|e| anyhow!("{e}"))?;
    out.write_json("fitted_kernel.json", &fit.kernel.to_json())?;
    println!(
        "residual {:.6e}, kernel norm {:.6e}{}",
        fit.residual,
        fit.kernel.l2_norm(),
        if fit.conditioning_warning {
            " (conditioning warning)"
        } else {
            ""
        }
    );
    out.write_manifest(
        "fit",
        config::echo(&cfg),
        None,
        serde_json::json!({
            "residual": fit.residual,
            "kernel_norm": fit.kernel.l2_norm(),
            "conditioning_warning": fit.conditioning_warning,
        }),
    )?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cone_lt(
    degree: usize,
    a: Complex64,
    b: Complex64,
    sector: (f64, f64),
    rho: [Complex64; 2],
    out_dir: &Path,
) -> Result<()> {
    let out = OutputDir::create(out_dir)?;
    let sector = tescat::cone::Sector::new(sector.0, sector.1).map_err(|e| anyhow!("{e}"))?;
    let p = tescat::herglotz::HomHarmonicPoly::new(degree, a, b);
    let value = tescat::cone::laplace_transform(&p, &sector, rho).map_err(|e| anyhow!("{e}"))?;
    println!("L P(rho) = {:.12e} + {:.12e} i", value.re, value.im);
    let mut result = serde_json::json!({
        "value": [value.re, value.im],
        "poly_norm": p.norm(),
    });
    // closed-form cross-check on the coordinate quarter-plane
    if sector.theta1.abs() < 1e-14 && (sector.theta2 - std::f64::consts::FRAC_PI_2).abs() < 1e-14 {
        let mono = tescat::cone::MonomialPoly::from_harmonic(&p);
        let product = tescat::cone::laplace_transform_orthant(&mono, &rho)
            .map_err(|e| anyhow!("{e}"))?;
        result["orthant_product_formula"] = serde_json::json!([product.re, product.im]);
        println!(
            "orthant product formula: {:.12e} + {:.12e} i",
            product.re, product.im
        );
    }
    out.write_json("cone_lt.json", &result)?;
    out.write_manifest(
        "cone lt",
        serde_json::json!({
            "degree": degree,
            "a": [a.re, a.im], "b": [b.re, b.im],
            "sector": [sector.theta1, sector.theta2],
            "rho": [[rho[0].re, rho[0].im], [rho[1].re, rho[1].im]],
        }),
        None,
        result,
    )?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { experiment, common } => run_experiment(&experiment, &common),
        Command::Teig(TeigCommand::Disk {
            contrast,
            radius,
            kmin,
            kmax,
            mmax,
            out,
        }) => {
            teig_disk(contrast, radius, kmin, kmax, mmax, &out)?;
            Ok(true)
        }
        Command::Teig(TeigCommand::Scan { common }) => {
            teig_scan(&common)?;
            Ok(true)
        }
        Command::Scatter { common } => {
            scatter(&common)?;
            Ok(true)
        }
        Command::Fit { common } => {
            fit(&common)?;
            Ok(true)
        }
        Command::Cone(ConeCommand::Lt {
            degree,
            a_re,
            a_im,
            b_re,
            b_im,
            sector_start,
            sector_end,
            rho1_re,
            rho1_im,
            rho2_re,
            rho2_im,
            out,
        }) => {
            cone_lt(
                degree,
                Complex64::new(a_re, a_im),
                Complex64::new(b_re, b_im),
                (sector_start, sector_end),
                [
                    Complex64::new(rho1_re, rho1_im),
                    Complex64::new(rho2_re, rho2_im),
                ],
                &out,
            )?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
