//! Level crossings of the IMI under a bivariate Gaussian approximation.

use num_traits::Float;

use super::ImiMoments;
use crate::error::{Error, Result};
use crate::specfun::{gaussian_q, integrate, Tolerance};

/// Exceedance, crossing rate and outage duration at one IMI threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImiLevelStats {
    pub threshold: f64,
    /// `(I_th − μ)/σ`.
    pub normalized_threshold: f64,
    pub exceed_prob: f64,
    pub joint_exceed: f64,
    /// Down-crossings per second.
    pub lcr: f64,
    /// Seconds; infinite when the level is never crossed.
    pub aod: f64,
}

/// `(1/(π T_s)) ∫_{π/4 + asin(ρ)/2}^{π/2} exp(−x²/(2 sin²θ)) dθ` with `x` the
/// normalised threshold and `ρ` the lag-one correlation coefficient.
pub fn gaussian_lcr(norm_threshold: f64, rho1: f64, ts: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho1) {
        return Err(Error::Domain("correlation coefficient must lie in [-1, 1]"));
    }
    if !(ts > 0.0) || !norm_threshold.is_finite() {
        return Err(Error::Domain("gaussian_lcr needs a finite threshold and T_s > 0"));
    }
    let half_pi = core::f64::consts::FRAC_PI_2;
    let lo = core::f64::consts::FRAC_PI_4 + rho1.asin() / 2.0;
    if lo >= half_pi {
        return Ok(0.0);
    }
    let x2 = norm_threshold * norm_threshold;
    let f = |t: f64| {
        let s = t.sin();
        if s <= 0.0 {
            0.0
        } else {
            (-x2 / (2.0 * s * s)).exp()
        }
    };
    let q = integrate(f, &[lo, half_pi], Tolerance::new(1e-300, 1e-13), 100_000)?;
    Ok(q.value / (core::f64::consts::PI * ts))
}

/// `(1 − Q(x))/N_I`.
pub fn gaussian_aod(norm_threshold: f64, rho1: f64, ts: f64) -> Result<f64> {
    let n = gaussian_lcr(norm_threshold, rho1, ts)?;
    if n <= 0.0 {
        return Err(Error::InfiniteDuration);
    }
    Ok((1.0 - gaussian_q(norm_threshold)) / n)
}

fn normalize(moments: &ImiMoments, i_th: f64) -> Result<f64> {
    if !(moments.variance > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((i_th - moments.mean) / moments.variance.sqrt())
}

pub fn imi_gaussian_lcr(moments: &ImiMoments, i_th: f64, rho1: f64, ts: f64) -> Result<f64> {
    gaussian_lcr(normalize(moments, i_th)?, rho1, ts)
}

pub fn imi_gaussian_aod(moments: &ImiMoments, i_th: f64, rho1: f64, ts: f64) -> Result<f64> {
    gaussian_aod(normalize(moments, i_th)?, rho1, ts)
}

/// All Gaussian-approximation level statistics; the joint exceedance is
/// implied by `N_I T_s = φ − φφ`.
pub fn imi_gaussian_level_stats(moments: &ImiMoments, i_th: f64, rho1: f64, ts: f64) -> Result<ImiLevelStats> {
    let x = normalize(moments, i_th)?;
    let lcr = gaussian_lcr(x, rho1, ts)?;
    let phi = gaussian_q(x);
    let aod = if lcr > 0.0 { (1.0 - phi) / lcr } else { f64::INFINITY };
    Ok(ImiLevelStats {
        threshold: i_th,
        normalized_threshold: x,
        exceed_prob: phi,
        joint_exceed: phi - lcr * ts,
        lcr,
        aod,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_the_mean() {
        let ts = 0.005;
        assert_eq!(gaussian_lcr(0.0, 1.0, ts).unwrap(), 0.0);
        assert!((gaussian_lcr(0.0, 0.0, ts).unwrap() - 1.0 / (4.0 * ts)).abs() < 1e-10);
        let pi = core::f64::consts::PI;
        let want = (pi - 2.0 * 0.9f64.asin()) / (4.0 * pi * ts);
        assert!((gaussian_lcr(0.0, 0.9, ts).unwrap() - want).abs() < 1e-10);
        assert!((want - 14.36).abs() < 0.01);
        let aod = gaussian_aod(0.0, 0.9, ts).unwrap();
        assert!((aod - 2.0 * pi * ts / (pi - 2.0 * 0.9f64.asin())).abs() < 1e-13);
        assert!((gaussian_aod(0.0, 0.0, ts).unwrap() - 2.0 * ts).abs() < 1e-13);
        assert!(gaussian_aod(0.3, 1.0, ts).is_err());
    }

    #[test]
    fn crossing_rate_is_even_in_threshold() {
        let a = gaussian_lcr(1.3, 0.7, 0.01).unwrap();
        let b = gaussian_lcr(-1.3, 0.7, 0.01).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(gaussian_aod(1.3, 0.7, 0.01).unwrap() > gaussian_aod(-1.3, 0.7, 0.01).unwrap());
    }
}
