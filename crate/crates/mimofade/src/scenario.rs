//! Scenario files: scattering model, antennas, SNRs, grids and tolerances.
//!
//! TOML with explicit units in the key names (`_hz`, `_s`, `_db`, `_deg`).

use std::path::Path;

use mimofade_core::channel::{MimoConfig, ScatteringCluster, ScatteringModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("writing scenario: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("scenario field `{field}`: {msg}")]
    Invalid { field: &'static str, msg: String },
    #[error("no scenario file or bundled scenario named `{0}`")]
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub weight: f64,
    pub kappa: f64,
    pub mean_aoa_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringSpec {
    pub doppler_hz: f64,
    pub symbol_time_s: f64,
    /// Empty means isotropic.
    #[serde(default)]
    pub clusters: Vec<ClusterSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MimoSpec {
    pub n_tx: u32,
    pub n_rx: u32,
}

/// Validation tolerances; defaults follow the acceptance targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Eigen correlation: `min(sigmas · SE, eigen_corr_cap)`.
    pub eigen_corr_sigmas: f64,
    pub eigen_corr_cap: f64,
    /// Relative, for eigen LCR and AFD.
    pub eigen_level_rel: f64,
    /// Crossing entries are only made where the analytic eigen LCR is at
    /// least this many crossings per second.
    pub eigen_lcr_floor: f64,
    pub imi_low_snr_corr: f64,
    pub imi_high_snr_corr: f64,
    pub imi_exact_corr: f64,
    /// Relative, for `E[I_l I_{l−1}]`.
    pub imi_acf_rel: f64,
    /// Relative, for Gaussian-approximation IMI LCR.
    pub imi_lcr_rel: f64,
    /// SNRs whose Gaussian IMI LCR entries are reported but not asserted.
    pub imi_lcr_unasserted_db: Vec<f64>,
    /// SNR at or below which the low-SNR forms are compared.
    pub low_snr_max_db: f64,
    /// SNR at or above which the high-SNR forms are compared.
    pub high_snr_min_db: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eigen_corr_sigmas: 3.0,
            eigen_corr_cap: 0.02,
            eigen_level_rel: 0.05,
            eigen_lcr_floor: 0.01,
            imi_low_snr_corr: 0.02,
            imi_high_snr_corr: 0.03,
            imi_exact_corr: 0.02,
            imi_acf_rel: 0.02,
            imi_lcr_rel: 0.10,
            imi_lcr_unasserted_db: Vec::new(),
            low_snr_max_db: -10.0,
            high_snr_min_db: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub samples: usize,
    pub snr_db: Vec<f64>,
    /// Lags `0..=max_lag`.
    pub max_lag: u32,
    /// Eigenvalue thresholds (linear).
    pub eigen_thresholds: Vec<f64>,
    /// IMI thresholds in standard deviations from the exact mean.
    pub imi_thresholds_sigma: Vec<f64>,
    pub mimo: MimoSpec,
    pub scattering: ScatteringSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

pub const BUNDLED: [(&str, &str); 4] = [
    ("iso-4x4", include_str!("../scenarios/iso-4x4.toml")),
    ("noniso-4x4", include_str!("../scenarios/noniso-4x4.toml")),
    ("iso-12x3", include_str!("../scenarios/iso-12x3.toml")),
    ("noniso-12x3", include_str!("../scenarios/noniso-12x3.toml")),
];

fn invalid(field: &'static str, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field, msg: msg.into() }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = toml::from_str(text)?;
        s.check()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn bundled(name: &str) -> Option<Self> {
        BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| Self::from_toml(t).expect("bundled scenarios parse"))
    }

    /// A file path, or else the name of a bundled scenario.
    pub fn load(spec: &str) -> Result<Self, ScenarioError> {
        let path = Path::new(spec);
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|source| ScenarioError::Io { path: spec.to_string(), source })?;
            return Self::from_toml(&text);
        }
        Self::bundled(spec).ok_or_else(|| ScenarioError::Unknown(spec.to_string()))
    }

    fn check(&self) -> Result<(), ScenarioError> {
        if self.snr_db.is_empty() || self.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(invalid("snr_db", "needs at least one finite value"));
        }
        if self.eigen_thresholds.is_empty() || self.eigen_thresholds.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("eigen_thresholds", "needs at least one positive finite value"));
        }
        if self.imi_thresholds_sigma.is_empty() || self.imi_thresholds_sigma.iter().any(|v| !v.is_finite()) {
            return Err(invalid("imi_thresholds_sigma", "needs at least one finite value"));
        }
        if self.samples < 2 || self.samples > crate::generator::MAX_LEN {
            return Err(invalid("samples", "must lie in [2, 2^26]"));
        }
        self.model()?;
        self.mimo_config()?;
        Ok(())
    }

    pub fn model(&self) -> Result<ScatteringModel, ScenarioError> {
        let sc = &self.scattering;
        let err = |e: mimofade_core::Error| invalid("scattering", e.to_string());
        if sc.clusters.is_empty() {
            return ScatteringModel::isotropic(sc.doppler_hz, sc.symbol_time_s).map_err(err);
        }
        let clusters = sc
            .clusters
            .iter()
            .map(|c| ScatteringCluster::new(c.weight, c.kappa, c.mean_aoa_deg.to_radians()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        ScatteringModel::new(clusters, sc.doppler_hz, sc.symbol_time_s).map_err(err)
    }

    pub fn mimo_config(&self) -> Result<MimoConfig, ScenarioError> {
        MimoConfig::new(self.mimo.n_tx, self.mimo.n_rx).map_err(|e| invalid("mimo", e.to_string()))
    }

    pub fn symbol_time(&self) -> f64 {
        self.scattering.symbol_time_s
    }

    pub fn lags(&self) -> impl Iterator<Item = u32> {
        0..=self.max_lag
    }
}
