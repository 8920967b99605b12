//! JSON experiment configurations with defaults matching the acceptance
//! setups. Schema errors report the path to the offending key.

use anyhow::{anyhow, Context, Result};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::path::Path;
use tescat::geometry::{Contrast, DomainConfig, PotentialConfig};

/// Parse a config file, reporting the JSON path of the offending key on
/// schema errors.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        anyhow!(
            "schema error in {} at key path '{}': {}",
            path.display(),
            e.path(),
            e.inner()
        )
    })
}

pub fn echo<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serialization cannot fail")
}

fn unit_square_potential(contrast: f64) -> PotentialConfig {
    PotentialConfig {
        domain: DomainConfig::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        },
        contrast: Contrast::constant(contrast),
        hoelder_alpha: 1.0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfsConfig {
    pub n_charge: usize,
    pub n_colloc: usize,
    pub charge_offset: f64,
}

impl Default for MfsConfig {
    fn default() -> Self {
        MfsConfig {
            n_charge: 64,
            n_colloc: 128,
            charge_offset: 0.25,
        }
    }
}

impl MfsConfig {
    pub fn to_params(&self) -> tescat::teig::MfsParams {
        tescat::teig::MfsParams {
            n_charge: self.n_charge,
            n_colloc: self.n_colloc,
            charge_offset: self.charge_offset,
        }
    }
}

/// E1: non-scattering at a disk transmission eigenvalue.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct E1Config {
    pub radius: f64,
    pub contrast: f64,
    /// largest angular mode searched for the eigenvalue
    pub m_max: u32,
    /// window in which the first eigenvalue is located
    pub k_window: [f64; 2],
    /// wavenumber detuning for the contrast ratio
    pub detune: f64,
    /// kernel perturbation sizes for the slope regression
    pub epsilons: Vec<f64>,
    pub far_field_dirs: usize,
    pub grid_h: f64,
}

impl Default for E1Config {
    fn default() -> Self {
        E1Config {
            radius: 1.0,
            contrast: 3.0,
            m_max: 3,
            k_window: [0.5, 4.5],
            detune: 0.05,
            epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            far_field_dirs: 256,
            grid_h: 0.04,
        }
    }
}

/// E2: corner vanishing of reconstructed eigenfunctions on a convex polygon.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct E2Config {
    pub potential: PotentialConfig,
    pub k_range: [f64; 2],
    pub scan_step: f64,
    pub mfs: MfsConfig,
    /// number of eigenfunctions examined (first n detected)
    pub n_eigen: usize,
    /// largest profile radius; successive radii shrink by radius_factor
    pub radius_max: f64,
    pub radius_factor: f64,
    pub n_radii: usize,
    /// reconstruction refuses dips shallower than this indicator value
    pub sigma_cap: f64,
    /// corner average at the smallest radius must be below this fraction of
    /// the domain average
    pub corner_ratio: f64,
}

impl Default for E2Config {
    fn default() -> Self {
        E2Config {
            potential: unit_square_potential(1.0),
            // window around the first square eigenvalues whose interior field
            // has a non-degenerate boundary trace (the lower eigenvalue near
            // 12.85 has a vanishing trace, which makes the edge-midpoint
            // control vacuous)
            k_range: [13.0, 13.8],
            scan_step: 0.01,
            mfs: MfsConfig::default(),
            n_eigen: 2,
            radius_max: 0.32,
            radius_factor: 0.5,
            // stop at radius 0.02: smaller balls bottom out at the
            // reconstruction noise floor and the averages stop decreasing
            n_radii: 5,
            sigma_cap: 2e-3,
            corner_ratio: 0.1,
        }
    }
}

/// E3: strictly positive far-field floor for order-N incident waves.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct E3Config {
    pub potential: PotentialConfig,
    pub k: f64,
    pub orders: Vec<usize>,
    pub ensemble_size: usize,
    pub m_trunc: usize,
    pub vertex_index: usize,
    pub grid_h: f64,
    pub far_field_dirs: usize,
    /// every far-field norm must exceed this multiple of the zero-potential
    /// noise floor
    pub noise_margin: f64,
}

impl Default for E3Config {
    fn default() -> Self {
        E3Config {
            potential: unit_square_potential(1.0),
            k: 3.0,
            orders: vec![0, 1, 2],
            ensemble_size: 16,
            m_trunc: 12,
            vertex_index: 0,
            grid_h: 0.025,
            far_field_dirs: 128,
            noise_margin: 1e3,
        }
    }
}

/// E4: cone Laplace-transform lower bound along the phase curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct E4Config {
    /// sector angle interval (quarter-plane by default)
    pub sector: [f64; 2],
    /// rotation margin of the phase vector beyond the half-angle
    pub alpha_d: f64,
    pub k: f64,
    pub max_degree: usize,
    pub n_samples: usize,
    pub n_tau: usize,
    /// tau sweeps [tau0, tau_span * tau0]
    pub tau_span: f64,
    /// parameter-sweep resolution of the inf-sup search
    pub resolution: usize,
}

impl Default for E4Config {
    fn default() -> Self {
        E4Config {
            sector: [0.0, std::f64::consts::FRAC_PI_2],
            alpha_d: std::f64::consts::FRAC_PI_8,
            k: 1.0,
            max_degree: 4,
            n_samples: 64,
            n_tau: 20,
            tau_span: 100.0,
            resolution: 12,
        }
    }
}

/// `teig scan`: singular-value scan of an arbitrary domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TeigScanConfig {
    pub potential: PotentialConfig,
    pub k_range: [f64; 2],
    pub scan_step: f64,
    pub mfs: MfsConfig,
}

impl Default for TeigScanConfig {
    fn default() -> Self {
        TeigScanConfig {
            potential: unit_square_potential(1.0),
            k_range: [12.3, 13.8],
            scan_step: 0.01,
            mfs: MfsConfig::default(),
        }
    }
}

/// `scatter`: far field of one incident Herglotz wave.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterConfig {
    pub potential: PotentialConfig,
    pub k: f64,
    /// Herglotz kernel as {"M": m, "coeffs": [[re, im], ...]}; default is the
    /// constant density 1/(2 pi)
    pub kernel: Option<serde_json::Value>,
    pub grid_h: f64,
    pub far_field_dirs: usize,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        ScatterConfig {
            potential: unit_square_potential(1.0),
            k: 3.0,
            kernel: None,
            grid_h: 0.025,
            far_field_dirs: 128,
        }
    }
}

/// `fit`: Tikhonov kernel fit of a target field over the domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub potential: PotentialConfig,
    pub k: f64,
    pub m_trunc: usize,
    pub lambda: Option<f64>,
    pub grid_h: f64,
    /// target field: a Herglotz kernel whose wave is sampled on the grid
    pub target_kernel: Option<serde_json::Value>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            potential: unit_square_potential(1.0),
            k: 3.0,
            m_trunc: 8,
            lambda: None,
            grid_h: 0.05,
            target_kernel: None,
        }
    }
}
