//! High-SNR limit `I ≈ Σ_m ln(ω λ_m)`: log-det Wishart moments and the
//! ₄F₃ correlation series.

use alloc::vec::Vec;

use num_traits::Float;

use crate::channel::MimoConfig;
use crate::error::{Error, Result};
use crate::specfun::{digamma_int, harmonic, hyper_4f3, ln_factorial, zeta2};

/// Grid size of the coarse scan preceding golden-section refinement.
pub const MAXGAP_GRID: usize = 256;

/// `(Σ_{m<M} ψ(N−m), Σ_{m<M} ζ(2, N−m))`: mean and variance of
/// `ln det(X X†)` for an `M × N` standard complex Gaussian `X`.
pub fn logdet_wishart_moments(mimo: MimoConfig) -> (f64, f64) {
    let (m, n) = (mimo.m(), mimo.n());
    (0..m).fold((0.0, 0.0), |(a, b), k| (a + digamma_int(n - k), b + zeta2(n - k)))
}

/// `(d, c_d)` with `d = M − m` and `c_d = M!(m+ν)!/(d² N! m!)`.
fn weights(mimo: MimoConfig) -> Vec<(u32, f64)> {
    let (m_big, n, nu) = (mimo.m(), mimo.n(), mimo.nu());
    (0..m_big)
        .map(|m| {
            let d = m_big - m;
            let ln_c = ln_factorial(m_big) + ln_factorial(m + nu) - ln_factorial(n) - ln_factorial(m);
            (d, ln_c.exp() / (d * d) as f64)
        })
        .collect()
}

/// Covariance of the high-SNR IMI between two samples with channel
/// correlation magnitude `rho`.
pub fn high_snr_covariance(mimo: MimoConfig, rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain("high_snr_covariance needs rho in [0, 1)"));
    }
    let z = rho * rho;
    let big = mimo.m() as f64;
    let n = mimo.n() as f64;
    let mut s = 0.0;
    for (d, c) in weights(mimo) {
        let df = d as f64;
        let f = hyper_4f3([df, df, big + 1.0, 1.0], [df + 1.0, df + 1.0, n + 1.0], z)?;
        s += c * z.powi(d as i32) * f;
    }
    Ok(s)
}

/// High-SNR correlation coefficient `ρ_I` as a function of `ϱ`.
pub fn high_snr_coeff(mimo: MimoConfig, rho: f64) -> Result<f64> {
    if rho >= 1.0 {
        return Ok(1.0);
    }
    Ok(high_snr_covariance(mimo, rho)? / logdet_wishart_moments(mimo).1)
}

/// Coefficients of `ϱ², ϱ⁴, …, ϱ^order` in the high-SNR `ρ_I`.
pub fn imi_corr_taylor(mimo: MimoConfig, order: u32) -> Result<Vec<f64>> {
    if mimo.m() > 8 || mimo.n() > 32 {
        return Err(Error::DegenerateConfig("Taylor coefficients need M <= 8 and N <= 32"));
    }
    if order == 0 || order % 2 == 1 {
        return Err(Error::Domain("Taylor order must be a positive even number"));
    }
    let big = mimo.m() as f64;
    let n = mimo.n() as f64;
    let z_norm = logdet_wishart_moments(mimo).1;
    let w = weights(mimo);
    Ok((1..=order / 2)
        .map(|p| {
            let mut c = 0.0;
            for &(d, cd) in &w {
                if d > p {
                    continue;
                }
                // q-th ₄F₃ term; the numerator 1 and the q! cancel.
                let df = d as f64;
                let mut t = 1.0;
                for i in 0..p - d {
                    let i = i as f64;
                    t *= (df + i).powi(2) * (big + 1.0 + i) / ((df + 1.0 + i).powi(2) * (n + 1.0 + i));
                }
                c += cd * t;
            }
            c / z_norm
        })
        .collect())
}

/// `max_{ϱ∈[0,1)} |ϱ² − ρ_I^{high}(ϱ)|`, the largest gap between the low-
/// and high-SNR correlation coefficients.
pub fn imi_corr_maxgap(mimo: MimoConfig) -> Result<f64> {
    let gap = |r: f64| -> Result<f64> { Ok((r * r - high_snr_coeff(mimo, r)?).abs()) };
    let h = 1.0 / MAXGAP_GRID as f64;
    let mut best = (0usize, 0.0);
    for i in 0..MAXGAP_GRID {
        let g = gap(i as f64 * h)?;
        if g > best.1 {
            best = (i, g);
        }
    }
    let mut a = (best.0 as f64 - 1.0).max(0.0) * h;
    let mut b = ((best.0 + 1) as f64 * h).min(1.0 - 1e-9);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (gap(c)?, gap(d)?);
    while b - a > 1e-10 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = gap(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = gap(d)?;
        }
    }
    Ok(best.1.max(gc).max(gd))
}

/// High-SNR `ρ_I` of a single effective channel with `mn` degrees of
/// freedom (orthogonal space-time block coding):
/// `ϱ² ₃F₂(1,1,1; 2, mn+1; ϱ²) / (mn ζ(2, mn))`.
pub fn ostbc_high_snr_coeff(mn: u32, rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) || mn == 0 {
        return Err(Error::Domain("ostbc_high_snr_coeff needs rho in [0, 1) and mn >= 1"));
    }
    let z = rho * rho;
    let b = mn as f64 + 1.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for p in 0..1_000_000 {
        let pf = p as f64;
        // (1)_p³ / ((2)_p (b)_p p!) term ratio.
        term *= (1.0 + pf) * (1.0 + pf) / ((2.0 + pf) * (b + pf)) * z;
        sum += term;
        if term < 1e-17 * sum {
            return Ok(z * sum / (mn as f64 * zeta2(mn)));
        }
    }
    Err(Error::NonConvergence { what: "3F2 series", iterations: 1_000_000 })
}

/// `−ln(1−ϱ²)/H_M`: the square-system (`ν = 0`) high-SNR coefficient
/// collected for large `M`, which decays like `1/ln M`.
pub fn imi_asymptotic_coeff(rho: f64, m: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) || m == 0 {
        return Err(Error::Domain("imi_asymptotic_coeff needs rho in [0, 1) and M >= 1"));
    }
    Ok(-(-rho * rho).ln_1p() / harmonic(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mimo(m: u32, n: u32) -> MimoConfig {
        MimoConfig::from_mn(m, n).unwrap()
    }

    #[test]
    fn wishart_logdet_small_cases() {
        let g = crate::specfun::EULER_GAMMA;
        let pi2 = core::f64::consts::PI.powi(2);
        let (a, b) = logdet_wishart_moments(mimo(1, 1));
        assert!((a + g).abs() < 1e-15 && (b - pi2 / 6.0).abs() < 1e-15);
        let (a, b) = logdet_wishart_moments(mimo(2, 2));
        assert!((a - (1.0 - 2.0 * g)).abs() < 1e-15 && (b - (pi2 / 3.0 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn siso_taylor_pair() {
        let c = imi_corr_taylor(mimo(1, 1), 4).unwrap();
        let z = zeta2(1);
        assert!((c[0] - 1.0 / z).abs() < 1e-15);
        assert!((c[1] - 0.25 / z).abs() < 1e-15);
    }

    #[test]
    fn single_mode_matches_ostbc_form() {
        for n in [1, 2, 5, 12] {
            for r in [0.0, 0.3, 0.9, 0.99] {
                let a = high_snr_coeff(mimo(1, n), r).unwrap();
                let b = ostbc_high_snr_coeff(n, r).unwrap();
                assert!((a - b).abs() < 1e-12, "{n} {r}: {a} {b}");
            }
        }
    }

    #[test]
    fn zero_rho_and_asymptotic_trend() {
        assert_eq!(high_snr_coeff(mimo(3, 5), 0.0).unwrap(), 0.0);
        assert_eq!(imi_asymptotic_coeff(0.0, 7).unwrap(), 0.0);
        let v = imi_asymptotic_coeff(0.9, 100).unwrap();
        assert!((v - 0.3201).abs() < 1e-4, "{v}");
        assert!(imi_asymptotic_coeff(0.9, 10_000).unwrap() < v);
    }
}
