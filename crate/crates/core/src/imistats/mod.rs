//! Statistics of the instantaneous mutual information
//! `I_l = ln det(I + ω H_l H_l†) = Σ_m ln(1 + ω λ_m(l))`, `ω = η/N_T`, in nats.
//!
//! With `f(x) = ln(1+ωx)` and `A_{jk} = ∫ w f L_j^ν L_k^ν dx`, both exact
//! moments and the ACF are sums of `A_{jk}²/(h_j h_k)`:
//!
//! * `σ² = Σ_{k<M} ‖f L_k‖²/h_k − Σ_{j,k<M} A_{jk}²/(h_j h_k)`,
//! * `r(i) − μ² = Σ_{j≥M} Σ_{k<M} ϱ_i^{2(j−k)} A_{jk}²/(h_j h_k)`.
//!
//! Diagonal entries and `‖f L_k‖² = ∫ w f² L_k²` are finite alternating
//! sums of gamma-weighted log moments. Off-diagonal entries are sums of
//! positive terms,
//! `A_{jk} = −h_k Σ_{s≤k} C(k,s) C(j+ν, ν+s) Ψ(j+k−1−2s, ν+2s)` (j > k),
//! with `Ψ` from [`ln_log_kernel`], so nothing cancels however large `j` is.

mod exceed;
mod gaussian;
mod highsnr;

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

pub use exceed::{
    imi_exceed_exact, imi_joint_exceed_exact, imi_level_stats_exact, mc_block, ExceedEstimate,
    ExceedMethod, McSettings, McTally,
};
pub use gaussian::{
    gaussian_aod, gaussian_lcr, imi_gaussian_aod, imi_gaussian_lcr, imi_gaussian_level_stats,
    ImiLevelStats,
};
pub use highsnr::{
    high_snr_coeff, high_snr_covariance, imi_asymptotic_coeff, ostbc_high_snr_coeff, imi_corr_maxgap, imi_corr_taylor,
    logdet_wishart_moments, MAXGAP_GRID,
};

use crate::channel::MimoConfig;
use crate::eigenstats::{SeriesSum, SERIES_MAX_TERMS, SERIES_TOL};
use crate::error::{Error, Result};
use crate::specfun::{
    factorial, integrate, laguerre_table, ln_binomial, ln_factorial, ln_log_kernel,
    log2_moment_normalized, log_moment_normalized, NeumaierSum, Tolerance,
};

/// Average SNR per receive antenna together with the antenna layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConfig {
    eta: f64,
    mimo: MimoConfig,
}

impl SnrConfig {
    /// `eta` is linear.
    pub fn new(eta: f64, mimo: MimoConfig) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Domain("SNR must be positive and finite"));
        }
        Ok(SnrConfig { eta, mimo })
    }

    pub fn from_db(db: f64, mimo: MimoConfig) -> Result<Self> {
        Self::new(10f64.powf(db / 10.0), mimo)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mimo(&self) -> MimoConfig {
        self.mimo
    }

    /// `ω = η/N_T`.
    pub fn omega(&self) -> f64 {
        self.eta / self.mimo.n_tx() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImiMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

impl ImiMoments {
    fn from_mean_var(mean: f64, variance: f64) -> Self {
        ImiMoments { mean, second_moment: variance + mean * mean, variance }
    }

    /// `μ = η N_R`, `σ² = η² N_R/N_T`.
    pub fn low_snr(snr: &SnrConfig) -> Self {
        let nr = snr.mimo.n_rx() as f64;
        let nt = snr.mimo.n_tx() as f64;
        Self::from_mean_var(snr.eta * nr, snr.eta * snr.eta * nr / nt)
    }

    /// Moments of `Σ ln(ω λ_m)`.
    pub fn high_snr(snr: &SnrConfig) -> Self {
        let (offset, var) = logdet_wishart_moments(snr.mimo);
        Self::from_mean_var(offset + snr.mimo.m() as f64 * snr.omega().ln(), var)
    }
}

/// Which family of formulas produced a correlation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImiRegime {
    Exact,
    LowSnr,
    HighSnr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImiCorrResult {
    pub lag: i64,
    pub acf: f64,
    pub nacf: f64,
    pub coeff: f64,
    pub regime: ImiRegime,
}

/// Precomputed brackets for one SNR and antenna layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ImiContext {
    snr: SnrConfig,
    m: usize,
    nu: u32,
    omega: f64,
    ln_h: Vec<f64>,
    /// `A_{jk}` for `j, k < M`, row-major.
    inner: Vec<f64>,
    /// `∫ w f² L_k²` and its absolute error estimate.
    fsq: Vec<f64>,
    fsq_err: Vec<f64>,
    moments: ImiMoments,
}

impl ImiContext {
    pub fn new(snr: SnrConfig) -> Result<Self> {
        let mimo = snr.mimo;
        let m = mimo.m() as usize;
        let nu = mimo.nu();
        let omega = snr.omega();
        let ln_h: Vec<f64> = (0..m as u32).map(|k| ln_factorial(k + nu) - ln_factorial(k)).collect();
        let span = 2 * (m - 1) + 1;
        let mut e1 = Vec::with_capacity(span);
        let mut e2 = Vec::with_capacity(span);
        for s in 0..span as u32 {
            e1.push(log_moment_normalized(s + nu, omega)?);
            e2.push(log2_moment_normalized(s + nu, omega)?);
        }
        let mut inner = vec![0.0; m * m];
        let mut fsq = vec![0.0; m];
        let mut fsq_err = vec![0.0; m];
        for k in 0..m {
            let (d, _) = laguerre_square_moment(k as u32, nu, omega, &e1, 1)?;
            inner[k * m + k] = d;
            let (f, err) = laguerre_square_moment(k as u32, nu, omega, &e2, 2)?;
            fsq[k] = f;
            fsq_err[k] = err;
        }
        let mut psi = PsiCache::new(nu, omega, m);
        for j in 0..m {
            for k in 0..j {
                let a = -psi.ln_abs_offdiag(j as u32, k as u32)?.exp();
                inner[j * m + k] = a;
                inner[k * m + j] = a;
            }
        }
        let mut mean = NeumaierSum::default();
        let mut var = NeumaierSum::default();
        for k in 0..m {
            let inv_hk = (-ln_h[k]).exp();
            mean.add(inner[k * m + k] * inv_hk);
            var.add(fsq[k] * inv_hk);
            for j in 0..m {
                let a = inner[j * m + k];
                var.add(-a * a * inv_hk * (-ln_h[j]).exp());
            }
        }
        let moments = ImiMoments::from_mean_var(mean.value(), var.value().max(0.0));
        Ok(ImiContext { snr, m, nu, omega, ln_h, inner, fsq, fsq_err, moments })
    }

    pub fn snr(&self) -> SnrConfig {
        self.snr
    }

    pub fn moments(&self) -> ImiMoments {
        self.moments
    }

    /// `r(i) − μ²` for each `ϱ_i` in `rhos`, sharing one pass over `j`.
    ///
    /// The truncation bound uses `Σ_j A_{jk}²/h_j = ‖f L_k‖²` (Parseval): the
    /// part of that norm not yet collected majorises every later term. The
    /// stopping target is [`SERIES_TOL`] relative to the variance.
    pub fn covariance_many(&self, rhos: &[f64]) -> Result<Vec<SeriesSum>> {
        if rhos.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Domain("rho must lie in [0, 1]"));
        }
        let m = self.m;
        let var = self.moments.variance;
        let tol = SERIES_TOL * var.max(f64::MIN_POSITIVE);
        let mut out: Vec<SeriesSum> = rhos
            .iter()
            .map(|&r| SeriesSum { value: if r >= 1.0 { var } else { 0.0 }, terms: 0, tail_bound: 0.0 })
            .collect();
        let mut acc: Vec<NeumaierSum> = vec![NeumaierSum::default(); rhos.len()];
        let mut active: Vec<bool> = rhos.iter().map(|&r| r > 0.0 && r < 1.0).collect();
        if !active.iter().any(|&a| a) {
            return Ok(out);
        }
        let inv_h: Vec<f64> = self.ln_h.iter().map(|l| (-l).exp()).collect();
        let mut resid: Vec<f64> = (0..m)
            .map(|k| self.fsq[k] - (0..m).map(|j| self.inner[j * m + k].powi(2) * inv_h[j]).sum::<f64>())
            .collect();
        let slack: Vec<f64> = (0..m).map(|k| self.fsq_err[k] + 1e-11 * self.fsq[k].abs()).collect();
        let mut psi = PsiCache::new(self.nu, self.omega, m);
        let mut terms = vec![0.0; m];
        for j in m..m + SERIES_MAX_TERMS {
            let ln_hj = ln_factorial(j as u32 + self.nu) - ln_factorial(j as u32);
            for k in 0..m {
                let la = psi.ln_abs_offdiag(j as u32, k as u32)?;
                let a2_hj = (2.0 * la - ln_hj).exp();
                resid[k] -= a2_hj;
                terms[k] = a2_hj * inv_h[k];
            }
            for (idx, &r) in rhos.iter().enumerate() {
                if !active[idx] {
                    continue;
                }
                let r2 = r * r;
                let mut t = 0.0;
                let mut bound = 0.0;
                for k in 0..m {
                    t += r2.powi((j - k) as i32) * terms[k];
                    bound += r2.powi((j + 1 - k) as i32) * (resid[k].max(0.0) + slack[k]) * inv_h[k];
                }
                acc[idx].add(t);
                out[idx] = SeriesSum { value: acc[idx].value(), terms: j, tail_bound: bound };
                if bound <= tol {
                    active[idx] = false;
                }
            }
            if !active.iter().any(|&a| a) {
                return Ok(out);
            }
        }
        let idx = active.iter().position(|&a| a).unwrap_or(0);
        Err(Error::TruncationFailure {
            terms: out[idx].terms,
            partial: out[idx].value,
            tail_bound: out[idx].tail_bound,
        })
    }

    /// `r(i) − μ²`.
    pub fn covariance(&self, rho: f64) -> Result<SeriesSum> {
        Ok(self.covariance_many(&[rho])?[0])
    }

    /// `r(i) = E[I_l I_{l−i}]` for `i ≠ 0`.
    pub fn acf(&self, rho: f64) -> Result<SeriesSum> {
        let c = self.covariance(rho)?;
        Ok(SeriesSum { value: c.value + self.moments.mean.powi(2), ..c })
    }

    /// Correlation at one lag. `rho` is `ϱ_i`; ignored at lag 0.
    pub fn corr(&self, lag: i64, rho: f64, regime: ImiRegime) -> Result<ImiCorrResult> {
        Ok(self.corr_many(&[(lag, rho)], regime)?[0])
    }

    /// Correlation at many lags at once.
    pub fn corr_many(&self, lags: &[(i64, f64)], regime: ImiRegime) -> Result<Vec<ImiCorrResult>> {
        match regime {
            ImiRegime::Exact => {
                let mom = self.moments;
                let rhos: Vec<f64> = lags.iter().map(|&(l, r)| if l == 0 { 1.0 } else { r }).collect();
                let cov = self.covariance_many(&rhos)?;
                Ok(lags
                    .iter()
                    .zip(cov)
                    .map(|(&(lag, _), c)| {
                        let acf = mom.mean * mom.mean + c.value;
                        ImiCorrResult {
                            lag,
                            acf,
                            nacf: acf / mom.second_moment,
                            coeff: c.value / mom.variance,
                            regime,
                        }
                    })
                    .collect())
            }
            _ => lags.iter().map(|&(lag, rho)| imi_corr_approx(&self.snr, lag, rho, regime)).collect(),
        }
    }
}

/// Low- or high-SNR correlation; needs no precomputation.
pub fn imi_corr_approx(snr: &SnrConfig, lag: i64, rho: f64, regime: ImiRegime) -> Result<ImiCorrResult> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain("rho must lie in [0, 1]"));
    }
    let (mom, cov) = match regime {
        ImiRegime::LowSnr => {
            let mom = ImiMoments::low_snr(snr);
            let r = if lag == 0 { 1.0 } else { rho };
            (mom, r * r * mom.variance)
        }
        ImiRegime::HighSnr => {
            let mom = ImiMoments::high_snr(snr);
            let cov = if lag == 0 || rho >= 1.0 { mom.variance } else { high_snr_covariance(snr.mimo, rho)? };
            (mom, cov)
        }
        ImiRegime::Exact => return ImiContext::new(*snr)?.corr(lag, rho, regime),
    };
    let acf = mom.mean * mom.mean + cov;
    Ok(ImiCorrResult { lag, acf, nacf: acf / mom.second_moment, coeff: cov / mom.variance, regime })
}

/// `μ_I`.
pub fn imi_mean(snr: &SnrConfig) -> Result<f64> {
    Ok(ImiContext::new(*snr)?.moments.mean)
}

/// `E[I²]`.
pub fn imi_second_moment(snr: &SnrConfig) -> Result<f64> {
    Ok(ImiContext::new(*snr)?.moments.second_moment)
}

pub fn imi_moments(snr: &SnrConfig) -> Result<ImiMoments> {
    Ok(ImiContext::new(*snr)?.moments)
}

/// `E[I_l I_{l−i}]` at `ϱ_i = rho` (`i ≠ 0`).
pub fn imi_acf(snr: &SnrConfig, rho: f64) -> Result<f64> {
    Ok(ImiContext::new(*snr)?.acf(rho)?.value)
}

pub fn imi_corr(snr: &SnrConfig, lag: i64, rho: f64, regime: ImiRegime) -> Result<ImiCorrResult> {
    imi_corr_approx(snr, lag, rho, regime)
}

/// `∫ w g L_k² dx` where `g = ln^p(1+ωx)`, from the monomial expansion of
/// `L_k²` against normalised log moments `e[s] = E[g(G)]`,
/// `G ~ Gamma(s+ν+1)`. Returns the value and an absolute error estimate.
///
/// When the alternating sum cancels too much, direct quadrature of the
/// (positive) integrand takes over.
fn laguerre_square_moment(k: u32, nu: u32, omega: f64, e: &[f64], power: i32) -> Result<(f64, f64)> {
    let mut acc = NeumaierSum::default();
    let mut size = 0.0;
    for p in 0..=k {
        for q in 0..=k {
            let s = p + q;
            let ln_c = ln_binomial(k + nu, k - p) + ln_binomial(k + nu, k - q) - ln_factorial(p) - ln_factorial(q)
                + ln_factorial(s + nu);
            let t = ln_c.exp() * e[s as usize];
            acc.add(if s % 2 == 0 { t } else { -t });
            size += t.abs();
        }
    }
    let v = acc.value();
    // Each normalised moment carries ~1e-13 relative quadrature error.
    let err = 1e-13 * size;
    if err <= 1e-9 * v.abs() && size.is_finite() {
        return Ok((v, err));
    }
    let d = direct_square_moment(k, nu, omega, power)?;
    Ok((d, 1e-12 * d.abs()))
}

fn direct_square_moment(k: u32, nu: u32, omega: f64, power: i32) -> Result<f64> {
    let kk = (2 * k + nu) as f64;
    let b = kk + 2.0 + 40.0 * (kk + 1.0).sqrt() + 40.0;
    let ln_nu_fact = ln_factorial(nu);
    let n = k as usize + 1;
    let f = |x: f64| {
        if x <= 0.0 {
            return 0.0;
        }
        let mut tab = vec![0.0; n];
        laguerre_table(nu, x, &mut tab);
        let l = tab[k as usize];
        let g = (omega * x).ln_1p().powi(power);
        (nu as f64 * x.ln() - x - ln_nu_fact).exp() * l * l * g
    };
    let mut breaks = vec![0.0];
    for c in [1.0 / omega, kk + 1.0] {
        if c > 0.0 && c < b && c > *breaks.last().unwrap() {
            breaks.push(c);
        }
    }
    breaks.push(b);
    let q = integrate(f, &breaks, Tolerance::new(1e-300, 1e-13), 400_000)?;
    Ok(q.value * factorial(nu))
}

/// Memoised `ln Ψ(α, ν+2s; ω)`, indexed by `s` then `α`.
struct PsiCache {
    nu: u32,
    omega: f64,
    tables: Vec<Vec<f64>>,
}

impl PsiCache {
    fn new(nu: u32, omega: f64, m: usize) -> Self {
        PsiCache { nu, omega, tables: vec![Vec::new(); m] }
    }

    fn ln_psi(&mut self, alpha: u32, s: u32) -> Result<f64> {
        let row = &mut self.tables[s as usize];
        let a = alpha as usize;
        if row.len() <= a {
            row.resize(a + 1, f64::NAN);
        }
        if row[a].is_nan() {
            row[a] = ln_log_kernel(alpha as f64, (self.nu + 2 * s) as f64, self.omega)?;
        }
        Ok(row[a])
    }

    /// `ln |A_{jk}|` for `j ≠ k`.
    fn ln_abs_offdiag(&mut self, j: u32, k: u32) -> Result<f64> {
        let (j, k) = if j > k { (j, k) } else { (k, j) };
        let nu = self.nu;
        let mut logs = [0.0f64; 65];
        let mut peak = f64::NEG_INFINITY;
        for s in 0..=k {
            let l = ln_binomial(k, s) + ln_binomial(j + nu, nu + s) + self.ln_psi(j + k - 1 - 2 * s, s)?;
            logs[s as usize] = l;
            peak = peak.max(l);
        }
        let sum: f64 = logs[..=k as usize].iter().map(|l| (l - peak).exp()).sum();
        Ok(ln_factorial(k + nu) - ln_factorial(k) + peak + sum.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snr(m: u32, n: u32, eta: f64) -> SnrConfig {
        SnrConfig::new(eta, MimoConfig::from_mn(m, n).unwrap()).unwrap()
    }

    #[test]
    fn siso_mean_is_e_e1() {
        let v = imi_mean(&snr(1, 1, 1.0)).unwrap();
        assert!((v - 0.596_347_362_323_194_1).abs() < 1e-12, "{v}");
    }

    #[test]
    fn variance_nonnegative_grid() {
        for (m, n) in [(1, 1), (2, 2), (4, 4), (3, 12)] {
            for eta in [1e-3, 1.0, 1e3] {
                let mom = imi_moments(&snr(m, n, eta)).unwrap();
                assert!(mom.variance > 0.0, "({m},{n}) eta={eta} {mom:?}");
                assert!((mom.second_moment - mom.variance - mom.mean * mom.mean).abs() < 1e-12 * mom.second_moment);
            }
        }
    }

    #[test]
    fn literal_sums_agree_with_direct_quadrature() {
        for (k, nu, w) in [(0u32, 0u32, 1.0), (2, 3, 0.5), (3, 9, 333.3)] {
            let e1: Vec<f64> = (0..=2 * k).map(|s| log_moment_normalized(s + nu, w).unwrap()).collect();
            let (v, _) = laguerre_square_moment(k, nu, w, &e1, 1).unwrap();
            let d = direct_square_moment(k, nu, w, 1).unwrap();
            assert!((v - d).abs() < 1e-9 * d.abs(), "k={k} nu={nu}: {v} vs {d}");
        }
    }

    #[test]
    fn offdiagonal_kernel_sum_matches_quadrature() {
        // ∫ e^{-x} ln(1+x) L_1(x) dx, from an arbitrary-precision evaluation.
        let mut c = PsiCache::new(0, 1.0, 1);
        let v = -c.ln_abs_offdiag(1, 0).unwrap().exp();
        assert!((v + 0.403_652_637_676_805_9).abs() < 1e-12, "{v}");
        let mut c = PsiCache::new(9, 3.0, 3);
        let v = -c.ln_abs_offdiag(5, 2).unwrap().exp();
        assert!((v / -5_975_553.222_302_53 - 1.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn acf_limits() {
        let ctx = ImiContext::new(snr(2, 3, 5.0)).unwrap();
        let mom = ctx.moments();
        assert_eq!(ctx.acf(0.0).unwrap().value, mom.mean * mom.mean);
        let many = ctx.covariance_many(&[0.3, 0.6, 0.9]).unwrap();
        assert!(many[0].value < many[1].value && many[1].value < many[2].value);
        assert!(many[2].value < mom.variance);
        let c = ctx.corr(0, 0.4, ImiRegime::Exact).unwrap();
        assert_eq!((c.coeff, c.nacf), (1.0, 1.0));
    }

    #[test]
    fn low_snr_closed_forms() {
        let s = snr(3, 12, 0.01);
        let c = imi_corr(&s, 2, 0.6, ImiRegime::LowSnr).unwrap();
        assert!((c.coeff - 0.36).abs() < 1e-15);
        assert!((c.nacf - (36.0 + 0.36) / 37.0).abs() < 1e-15);
    }
}
