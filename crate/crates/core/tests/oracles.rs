//! Closed forms against independent quadrature and series oracles.

mod common;

use common::{fact, half_line, laguerre_explicit};
use mimofade_core::channel::MimoConfig;
use mimofade_core::eigenstats::{eigen_corr, eigen_moments, laguerre_integral_i1, laguerre_integral_i2, EigenPdfContext};
use mimofade_core::imistats::{high_snr_coeff, ostbc_high_snr_coeff};
use mimofade_core::specfun::{integrate, log2_moment_integral, log_moment_integral, Tolerance};
use proptest::prelude::*;

fn ctx(m: u32, n: u32) -> EigenPdfContext {
    EigenPdfContext::new(MimoConfig::from_mn(m, n).unwrap())
}

fn tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11)
}

/// `∫_0^∞ f` for an `(M, N)` density, cut where it is below 1e-100.
fn outer<F: FnMut(f64) -> f64>(f: F, scale: f64) -> f64 {
    integrate(f, &[0.0, scale, 3.0 * scale, 8.0 * scale, 30.0 * scale], tol(), 2_000_000).unwrap().value
}

fn quadrant<F: Fn(f64, f64) -> f64>(f: F, scale: f64) -> f64 {
    outer(|x| outer(|y| f(x, y), scale), scale)
}

#[test]
fn marginal_pdf_is_normalized_with_closed_form_moments() {
    for m in 1..=4 {
        for n in m..=12 {
            let c = ctx(m, n);
            let scale = (m + n) as f64;
            let total = outer(|x| c.marginal_pdf(x), scale);
            assert!((total - 1.0).abs() < 1e-9, "({m},{n}) {total}");
            let (mean, second) = eigen_moments(c.mimo());
            let q1 = outer(|x| x * c.marginal_pdf(x), scale);
            let q2 = outer(|x| x * x * c.marginal_pdf(x), scale);
            assert!((q1 - mean).abs() < 1e-8 * mean, "({m},{n}) mean {q1} vs {mean}");
            assert!((q2 - second).abs() < 1e-8 * second, "({m},{n}) second {q2} vs {second}");
            assert_eq!(mean, n as f64);
            assert_eq!(second, (n * (n + m)) as f64);
        }
    }
}

#[test]
fn joint_pdf_is_normalized_and_reproduces_lag_correlation() {
    let c = ctx(2, 2);
    for rho in [0.3, 0.7] {
        let total = quadrant(|x, y| c.joint_pdf(x, y, rho).unwrap(), 6.0);
        assert!((total - 1.0).abs() < 1e-6, "rho {rho}: {total}");
        let exy = quadrant(|x, y| x * y * c.joint_pdf(x, y, rho).unwrap(), 6.0);
        let r = eigen_corr(c.mimo(), 1, rho, true);
        // Normalized by the second moment N(N+M).
        let want = r.normalized_corr * 8.0;
        assert!((exy - want).abs() < 1e-5 * want, "rho {rho}: {exy} vs {want}");
    }
}

#[test]
fn unordered_pair_pdf_is_normalized_and_reproduces_cross_moment() {
    for (m, n) in [(2, 2), (2, 5), (3, 3)] {
        let c = ctx(m, n);
        let scale = (m + n) as f64;
        let total = quadrant(|x, y| c.unordered_pair_pdf(x, y).unwrap(), scale);
        assert!((total - 1.0).abs() < 1e-6, "({m},{n}) {total}");
        let exy = quadrant(|x, y| x * y * c.unordered_pair_pdf(x, y).unwrap(), scale);
        let r = eigen_corr(c.mimo(), 0, 1.0, false);
        let nf = n as f64;
        let want = r.normalized_corr * nf * (nf + m as f64);
        assert!((want - (nf * nf - nf)).abs() < 1e-12);
        assert!((exy - want).abs() < 1e-5 * want, "({m},{n}) {exy} vs {want}");
    }
}

#[test]
fn laguerre_integral_examples() {
    assert_eq!(laguerre_integral_i1(3, 3, 2), 180.0);
    assert_eq!(laguerre_integral_i1(5, 2, 0), 0.0);
    assert_eq!(laguerre_integral_i1(4, 3, 1), -20.0);
    assert!((laguerre_integral_i2(2, 0, 1).unwrap() + 0.5).abs() < 1e-15);
    assert!((laguerre_integral_i2(0, 3, 0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    assert!(laguerre_integral_i2(2, 2, 0).is_err());
}

/// Scale of a bracket of `L_j^ν L_k^ν`: `sqrt(h_j h_k)` with `h_k = (k+ν)!/k!`.
fn bracket_scale(j: u32, k: u32, nu: u32) -> f64 {
    (fact(j + nu) / fact(j) * fact(k + nu) / fact(k)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laguerre_bracket_matches_quadrature(j in 0u32..9, k in 0u32..9, nu in 0u32..5) {
        let q = half_line(|x| {
            x.powi(nu as i32 + 1) * (-x).exp() * laguerre_explicit(j, nu, x) * laguerre_explicit(k, nu, x)
        });
        let s = bracket_scale(j, k, nu) * (j.max(k) + nu + 1) as f64;
        prop_assert!((q - laguerre_integral_i1(j, k, nu)).abs() <= 1e-7 * s, "{q}");
    }

    #[test]
    fn log_laguerre_bracket_matches_quadrature(j in 0u32..9, k in 0u32..9, nu in 0u32..5) {
        prop_assume!(j != k);
        let q = half_line(|x| {
            x.ln() * x.powi(nu as i32) * (-x).exp() * laguerre_explicit(j, nu, x) * laguerre_explicit(k, nu, x)
        });
        let s = bracket_scale(j, k, nu);
        prop_assert!((q - laguerre_integral_i2(j, k, nu).unwrap()).abs() <= 1e-7 * s, "{q}");
    }

    #[test]
    fn log_moment_identities_match_quadrature(k in 0u32..24, log_omega in -6.0f64..9.0) {
        let omega = log_omega.exp();
        let q1 = half_line(|x| x.powi(k as i32) * (-x).exp() * (omega * x).ln_1p());
        let q2 = half_line(|x| x.powi(k as i32) * (-x).exp() * (omega * x).ln_1p().powi(2));
        let v1 = log_moment_integral(k, omega).unwrap();
        let v2 = log2_moment_integral(k, omega).unwrap();
        prop_assert!((v1 - q1).abs() <= 1e-8 * q1, "{v1} vs {q1}");
        prop_assert!((v2 - q2).abs() <= 1e-8 * q2, "{v2} vs {q2}");
    }

    #[test]
    fn single_mode_high_snr_matches_hypergeometric_form(n in 1u32..20, rho in 0.0f64..0.999) {
        let mimo = MimoConfig::from_mn(1, n).unwrap();
        let a = high_snr_coeff(mimo, rho).unwrap();
        let b = ostbc_high_snr_coeff(n, rho).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
}

#[test]
fn log_moment_examples() {
    // e·E_1(1).
    assert!((log_moment_integral(0, 1.0).unwrap() - 0.596_347_362_323_194).abs() < 1e-12);
    let w = 1e-6;
    let v = log_moment_integral(3, w).unwrap();
    assert!((v - w * fact(4)).abs() < 1e-9 * w * fact(4) + 10.0 * w * w * fact(5));
    // ∫e^{-x}(ln ω + ln x)² = (ln ω − C)² + π²/6.
    let w: f64 = 1e6;
    let c = 0.577_215_664_901_532_9;
    let want = (w.ln() - c).powi(2) + std::f64::consts::PI.powi(2) / 6.0;
    assert!((log2_moment_integral(0, w).unwrap() - want).abs() < 1e-3 * want);
}
