//! Temporal correlation of a nonisotropically scattered Rayleigh subchannel.
//!
//! The angle of arrival is a mixture of von Mises densities; each cluster
//! contributes `P_n I_0(√(κ² − a² + j2κa cos θ)) / I_0(κ)` with
//! `a = 2π f_D i T_s`. With every `κ = 0` this is Clarke's `J_0(a)`.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::specfun::{bessel_i_scaled, bessel_i_scaled_unbounded};

/// One von Mises scattering cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCluster {
    weight: f64,
    kappa: f64,
    mean_aoa: f64,
}

impl ScatteringCluster {
    /// `mean_aoa` (radians) is wrapped into `[-π, π)`.
    pub fn new(weight: f64, kappa: f64, mean_aoa: f64) -> Result<Self> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidModel("cluster weight must lie in (0, 1]"));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidModel("cluster concentration must be finite and >= 0"));
        }
        if !mean_aoa.is_finite() {
            return Err(Error::InvalidModel("mean angle of arrival must be finite"));
        }
        Ok(ScatteringCluster { weight, kappa, mean_aoa: wrap_angle(mean_aoa) })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mean_aoa(&self) -> f64 {
        self.mean_aoa
    }
}

fn wrap_angle(theta: f64) -> f64 {
    use core::f64::consts::PI;
    let t = theta - 2.0 * PI * ((theta + PI) / (2.0 * PI)).floor();
    // Rounding can land exactly on π.
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Cluster mixture plus Doppler and symbol timing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringModel {
    clusters: Vec<ScatteringCluster>,
    doppler_hz: f64,
    symbol_time_s: f64,
}

impl ScatteringModel {
    pub fn new(clusters: Vec<ScatteringCluster>, doppler_hz: f64, symbol_time_s: f64) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::InvalidModel("at least one cluster is required"));
        }
        let total: f64 = clusters.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel("cluster weights must sum to 1"));
        }
        if !(doppler_hz > 0.0 && doppler_hz.is_finite()) {
            return Err(Error::InvalidModel("Doppler frequency must be positive"));
        }
        if !(symbol_time_s > 0.0 && symbol_time_s.is_finite()) {
            return Err(Error::InvalidModel("symbol time must be positive"));
        }
        Ok(ScatteringModel { clusters, doppler_hz, symbol_time_s })
    }

    /// Uniform angle of arrival (Clarke/Jakes).
    pub fn isotropic(doppler_hz: f64, symbol_time_s: f64) -> Result<Self> {
        Self::new(alloc::vec![ScatteringCluster::new(1.0, 0.0, 0.0)?], doppler_hz, symbol_time_s)
    }

    pub fn clusters(&self) -> &[ScatteringCluster] {
        &self.clusters
    }

    pub fn doppler_hz(&self) -> f64 {
        self.doppler_hz
    }

    pub fn symbol_time_s(&self) -> f64 {
        self.symbol_time_s
    }

    /// `f_D T_s`, the Doppler frequency normalised to the symbol rate.
    pub fn normalized_doppler(&self) -> f64 {
        self.doppler_hz * self.symbol_time_s
    }

    pub fn is_isotropic(&self) -> bool {
        self.clusters.iter().all(|c| c.kappa == 0.0)
    }

    /// Complex correlation coefficient `ρ_h(i) = E[h(l) h*(l-i)]`.
    pub fn corr_coeff_h(&self, lag: i64) -> Complex64 {
        if lag == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let a = 2.0 * core::f64::consts::PI * self.normalized_doppler() * lag.unsigned_abs() as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &self.clusters {
            let k = c.kappa;
            let w = Complex64::new(k * k - a * a, 2.0 * k * a * c.mean_aoa.cos());
            let z = w.sqrt();
            // I_0(z)/I_0(κ) with both scaled by their own exponentials.
            // Long lags push |z| past the public Bessel cap.
            let num = bessel_i_scaled_unbounded(0, z).expect("finite Bessel argument");
            let den = bessel_i_scaled(0, Complex64::new(k, 0.0)).expect("Bessel argument within range");
            acc += num / den.re * (z.re.abs() - k).exp() * c.weight;
        }
        if lag < 0 {
            acc.conj()
        } else {
            acc
        }
    }

    /// `ϱ_i = |ρ_h(i)|`.
    pub fn corr_mag(&self, lag: i64) -> f64 {
        if lag == 0 {
            1.0
        } else {
            self.corr_coeff_h(lag).norm().min(1.0)
        }
    }

    /// `ρ_h(0..=max_lag)`.
    pub fn acf(&self, max_lag: usize) -> Vec<Complex64> {
        (0..=max_lag as i64).map(|i| self.corr_coeff_h(i)).collect()
    }
}

/// Antenna configuration `N_T × N_R` with derived `M`, `N`, `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MimoConfig {
    n_tx: u32,
    n_rx: u32,
}

impl MimoConfig {
    pub fn new(n_tx: u32, n_rx: u32) -> Result<Self> {
        if n_tx == 0 || n_rx == 0 {
            return Err(Error::DegenerateConfig("antenna counts must be positive"));
        }
        if n_tx.max(n_rx) > 64 {
            return Err(Error::DegenerateConfig("antenna counts above 64 are not supported"));
        }
        Ok(MimoConfig { n_tx, n_rx })
    }

    /// Configuration with `M = m`, `N = n`, laid out as `N_T = m`, `N_R = n`.
    pub fn from_mn(m: u32, n: u32) -> Result<Self> {
        if m > n {
            return Err(Error::DegenerateConfig("M must not exceed N"));
        }
        Self::new(m, n)
    }

    pub fn n_tx(&self) -> u32 {
        self.n_tx
    }

    pub fn n_rx(&self) -> u32 {
        self.n_rx
    }

    /// `M = min(N_T, N_R)`.
    pub fn m(&self) -> u32 {
        self.n_tx.min(self.n_rx)
    }

    /// `N = max(N_T, N_R)`.
    pub fn n(&self) -> u32 {
        self.n_tx.max(self.n_rx)
    }

    /// `ν = N − M`.
    pub fn nu(&self) -> u32 {
        self.n() - self.m()
    }
}
