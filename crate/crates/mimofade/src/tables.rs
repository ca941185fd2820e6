//! Analytic tables behind the CLI subcommands, one row type per table.

use mimofade_core::channel::{MimoConfig, ScatteringModel};
use mimofade_core::eigenstats::{eigen_corr, EigenPdfContext};
use mimofade_core::imistats::{
    imi_corr_approx, imi_corr_maxgap, imi_corr_taylor, imi_gaussian_level_stats, ImiContext, ImiMoments,
    ImiRegime, SnrConfig,
};
use serde::Serialize;

use crate::scenario::Scenario;

/// Unit of mutual-information values in output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfoUnit {
    #[default]
    Nats,
    Bits,
}

impl InfoUnit {
    fn scale(self) -> f64 {
        match self {
            InfoUnit::Nats => 1.0,
            InfoUnit::Bits => std::f64::consts::LOG2_E,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelCorrRow {
    pub lag: u32,
    pub fd_t: f64,
    pub re_rho: f64,
    pub im_rho: f64,
    pub rho_mag: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenCorrRow {
    pub lag: u32,
    pub fd_t: f64,
    pub rho_mag: f64,
    pub corr_same: f64,
    pub corr_cross: f64,
    pub nacf_same: f64,
    pub nacf_cross: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenLevelRow {
    pub threshold: f64,
    pub exceed_prob: f64,
    pub joint_exceed: f64,
    pub lcr: f64,
    pub afd: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImiCorrRow {
    pub snr_db: f64,
    pub lag: u32,
    pub fd_t: f64,
    pub rho_mag: f64,
    pub exact: f64,
    pub low_snr: f64,
    pub high_snr: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImiMomentsRow {
    pub snr_db: f64,
    pub mean: f64,
    pub variance: f64,
    pub mean_low: f64,
    pub var_low: f64,
    pub mean_high: f64,
    pub var_high: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImiLevelRow {
    pub snr_db: f64,
    pub threshold: f64,
    pub normalized_threshold: f64,
    pub exceed_prob: f64,
    pub lcr: f64,
    pub aod: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub m: u32,
    pub n: u32,
    pub taylor_rho2: f64,
    pub taylor_rho4: f64,
    pub max_gap: f64,
}

fn fd_t(model: &ScatteringModel, lag: u32) -> f64 {
    model.normalized_doppler() * lag as f64
}

pub fn channel_corr(sc: &Scenario) -> anyhow::Result<Vec<ChannelCorrRow>> {
    let model = sc.model()?;
    Ok(sc
        .lags()
        .map(|lag| {
            let r = model.corr_coeff_h(lag as i64);
            ChannelCorrRow { lag, fd_t: fd_t(&model, lag), re_rho: r.re, im_rho: r.im, rho_mag: r.norm() }
        })
        .collect())
}

pub fn eigen_corr_table(sc: &Scenario) -> anyhow::Result<Vec<EigenCorrRow>> {
    let model = sc.model()?;
    let mimo = sc.mimo_config()?;
    Ok(sc
        .lags()
        .map(|lag| {
            let rho = model.corr_mag(lag as i64);
            let same = eigen_corr(mimo, lag as i64, rho, true);
            let cross = eigen_corr(mimo, lag as i64, rho, false);
            EigenCorrRow {
                lag,
                fd_t: fd_t(&model, lag),
                rho_mag: rho,
                corr_same: same.corr_coeff,
                corr_cross: cross.corr_coeff,
                nacf_same: same.normalized_corr,
                nacf_cross: cross.normalized_corr,
            }
        })
        .collect())
}

pub fn eigen_level_table(sc: &Scenario) -> anyhow::Result<Vec<EigenLevelRow>> {
    let model = sc.model()?;
    let ctx = EigenPdfContext::new(sc.mimo_config()?);
    let rho1 = model.corr_mag(1);
    sc.eigen_thresholds
        .iter()
        .map(|&th| {
            let s = ctx.level_stats(th, rho1, sc.symbol_time())?;
            Ok(EigenLevelRow { threshold: th, exceed_prob: s.exceed_prob, joint_exceed: s.joint_exceed, lcr: s.lcr, afd: s.afd })
        })
        .collect()
}

fn snr(db: f64, mimo: MimoConfig) -> anyhow::Result<SnrConfig> {
    Ok(SnrConfig::from_db(db, mimo)?)
}

pub fn imi_corr_table(sc: &Scenario) -> anyhow::Result<Vec<ImiCorrRow>> {
    let model = sc.model()?;
    let mimo = sc.mimo_config()?;
    let lags: Vec<(i64, f64)> = sc.lags().map(|l| (l as i64, model.corr_mag(l as i64))).collect();
    let mut rows = Vec::new();
    for &db in &sc.snr_db {
        let snr = snr(db, mimo)?;
        let exact = ImiContext::new(snr)?.corr_many(&lags, ImiRegime::Exact)?;
        for (&(lag, rho), ex) in lags.iter().zip(&exact) {
            rows.push(ImiCorrRow {
                snr_db: db,
                lag: lag as u32,
                fd_t: fd_t(&model, lag as u32),
                rho_mag: rho,
                exact: ex.coeff,
                low_snr: imi_corr_approx(&snr, lag, rho, ImiRegime::LowSnr)?.coeff,
                high_snr: imi_corr_approx(&snr, lag, rho, ImiRegime::HighSnr)?.coeff,
            });
        }
    }
    Ok(rows)
}

pub fn imi_moments_table(sc: &Scenario, unit: InfoUnit) -> anyhow::Result<Vec<ImiMomentsRow>> {
    let mimo = sc.mimo_config()?;
    let k = unit.scale();
    sc.snr_db
        .iter()
        .map(|&db| {
            let snr = snr(db, mimo)?;
            let ex = ImiContext::new(snr)?.moments();
            let lo = ImiMoments::low_snr(&snr);
            let hi = ImiMoments::high_snr(&snr);
            Ok(ImiMomentsRow {
                snr_db: db,
                mean: ex.mean * k,
                variance: ex.variance * k * k,
                mean_low: lo.mean * k,
                var_low: lo.variance * k * k,
                mean_high: hi.mean * k,
                var_high: hi.variance * k * k,
            })
        })
        .collect()
}

/// Gaussian-approximation level statistics at the scenario's thresholds,
/// `μ_I + z σ_I`, using the exact moments and the exact `ρ_I(1)`.
pub fn imi_level_table(sc: &Scenario, unit: InfoUnit) -> anyhow::Result<Vec<ImiLevelRow>> {
    let model = sc.model()?;
    let mimo = sc.mimo_config()?;
    let mut rows = Vec::new();
    for &db in &sc.snr_db {
        let ctx = ImiContext::new(snr(db, mimo)?)?;
        let mom = ctx.moments();
        let rho1 = ctx.corr(1, model.corr_mag(1), ImiRegime::Exact)?.coeff;
        for &z in &sc.imi_thresholds_sigma {
            let th = mom.mean + z * mom.variance.sqrt();
            let s = imi_gaussian_level_stats(&mom, th, rho1, sc.symbol_time())?;
            rows.push(ImiLevelRow {
                snr_db: db,
                threshold: th * unit.scale(),
                normalized_threshold: s.normalized_threshold,
                exceed_prob: s.exceed_prob,
                lcr: s.lcr,
                aod: s.aod,
            });
        }
    }
    Ok(rows)
}

/// `(M, N)` pairs of the published comparison of high-SNR Taylor
/// coefficients and low/high-SNR gaps.
pub const TABLE1_SYSTEMS: [(u32, u32); 7] = [(1, 1), (2, 2), (3, 3), (4, 4), (4, 8), (4, 12), (4, 16)];

pub fn table1() -> anyhow::Result<Vec<Table1Row>> {
    TABLE1_SYSTEMS
        .iter()
        .map(|&(m, n)| {
            let mimo = MimoConfig::from_mn(m, n)?;
            let c = imi_corr_taylor(mimo, 4)?;
            Ok(Table1Row { m, n, taylor_rho2: c[0], taylor_rho4: c[1], max_gap: imi_corr_maxgap(mimo)? })
        })
        .collect()
}
