//! Logarithmic moment integrals against gamma weights.
//!
//! All Meijer-G values the capacity formulas need are integrals of the form
//! `∫ x^k e^{-x} ln^p(1+ωx) dx`; they are evaluated here by quadrature in
//! normalised form (divided by `k!`) so that large `k` cannot overflow.

use num_traits::Float;

use super::quad::{integrate, Tolerance};
use super::series::{factorial, ln_factorial, upper_gamma_q_int};
use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-13;
const MAX_EVALS: usize = 200_000;

fn gamma_weighted<F: Fn(f64) -> f64>(k: u32, omega: f64, g: F) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain("omega must be positive and finite"));
    }
    let kf = k as f64;
    let b = kf + 40.0 * (kf + 1.0).sqrt();
    let lnk = ln_factorial(k);
    let f = |x: f64| {
        if x <= 0.0 {
            return if k == 0 { g(0.0) } else { 0.0 };
        }
        (kf * x.ln() - x - lnk).exp() * g(x)
    };
    let mut breaks = [0.0; 6];
    let mut n = 0;
    breaks[n] = 0.0;
    n += 1;
    for cand in [1.0 / omega, 30.0 / omega, kf] {
        if cand > breaks[n - 1] * 1.5 && cand < 0.5 * b {
            breaks[n] = cand;
            n += 1;
        }
    }
    breaks[n] = b;
    n += 1;
    let q = integrate(f, &breaks[..n], Tolerance::new(1e-300, REL_TOL), MAX_EVALS)?;
    Ok(q.value)
}

/// `E[ln(1+ωG)]` for `G ~ Gamma(k+1, 1)`, i.e. `(1/k!) ∫ x^k e^{-x} ln(1+ωx) dx`.
pub fn log_moment_normalized(k: u32, omega: f64) -> Result<f64> {
    let v = gamma_weighted(k, omega, |x| (omega * x).ln_1p())?;
    Ok(v + log_tail_bound(k, omega, 1))
}

/// `E[ln²(1+ωG)]` for `G ~ Gamma(k+1, 1)`.
pub fn log2_moment_normalized(k: u32, omega: f64) -> Result<f64> {
    let v = gamma_weighted(k, omega, |x| {
        let l = (omega * x).ln_1p();
        l * l
    })?;
    Ok(v + log_tail_bound(k, omega, 2))
}

/// Upper bound on what the finite interval `[0, k + 40√(k+1)]` leaves out.
/// It is always below `1e-16` relative, so it is added rather than merely
/// reported.
fn log_tail_bound(k: u32, omega: f64, power: i32) -> f64 {
    let kf = k as f64;
    let b = kf + 40.0 * (kf + 1.0).sqrt();
    // ln(1+ωx) ≤ ln(1+ωb) + x/b on [b, ∞).
    let l = (omega * b).ln_1p();
    let q0 = upper_gamma_q_int(k + 1, b);
    let q1 = upper_gamma_q_int(k + 2, b) * (kf + 1.0) / b;
    match power {
        1 => q0 * l + q1,
        _ => 2.0 * (q0 * l * l + upper_gamma_q_int(k + 3, b) * (kf + 1.0) * (kf + 2.0) / (b * b)),
    }
}

/// `∫_0^∞ x^k e^{-x} ln(1+ωx) dx` (overflows to `inf` past `k = 170`).
pub fn log_moment_integral(k: u32, omega: f64) -> Result<f64> {
    if k > 256 {
        return Err(Error::Domain("log_moment_integral needs k <= 256"));
    }
    Ok(factorial(k) * log_moment_normalized(k, omega)?)
}

/// `∫_0^∞ x^k e^{-x} ln²(1+ωx) dx`.
pub fn log2_moment_integral(k: u32, omega: f64) -> Result<f64> {
    if k > 256 {
        return Err(Error::Domain("log2_moment_integral needs k <= 256"));
    }
    Ok(factorial(k) * log2_moment_normalized(k, omega)?)
}

/// `ln Ψ(α, β; ω)` with `Ψ = ∫_0^1 exp(-u/(ω(1-u))) u^α (1-u)^β du`.
///
/// This kernel turns the logarithmic Laguerre bracket
/// `∫ x^ν e^{-x} ln(1+ωx) L_j^ν L_k^ν dx` (j ≠ k) into a sum of positive
/// terms. Integrated in the logit variable `s = ln(u/(1-u))`, where the
/// integrand is a single smooth bump.
pub fn ln_log_kernel(alpha: f64, beta: f64, omega: f64) -> Result<f64> {
    if !(alpha > -1.0 && beta > -1.0 && omega > 0.0) {
        return Err(Error::Domain("ln_log_kernel needs alpha, beta > -1 and omega > 0"));
    }
    let a1 = alpha + 1.0;
    let b1 = beta + 1.0;
    let inv_w = if omega.is_finite() { 1.0 / omega } else { 0.0 };
    let ell = |s: f64| -> f64 {
        // ln(1+e^{-s}) and ln(1+e^{s}) without overflow.
        let sp_neg = softplus(-s);
        let sp_pos = softplus(s);
        let e = if inv_w > 0.0 { (s + inv_w.ln()).exp() } else { 0.0 };
        -a1 * sp_neg - b1 * sp_pos - e
    };
    let dell = |s: f64| -> f64 {
        let sig = 1.0 / (1.0 + (-s).exp());
        let e = if inv_w > 0.0 { (s + inv_w.ln()).exp() } else { 0.0 };
        a1 * (1.0 - sig) - b1 * sig - e
    };
    // Peak: dℓ/ds is strictly decreasing, so bracket and bisect.
    let (mut lo, mut hi) = (-1.0, 1.0);
    while dell(lo) < 0.0 {
        lo *= 2.0;
    }
    while dell(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dell(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * (1.0 + mid.abs()) {
            break;
        }
    }
    let s0 = 0.5 * (lo + hi);
    let peak = ell(s0);
    // Expand until the integrand is below e^{-60} of the peak on both sides.
    let mut left = 1.0;
    while ell(s0 - left) - peak > -60.0 {
        left *= 2.0;
    }
    let mut right = 1.0;
    while ell(s0 + right) - peak > -60.0 {
        right *= 2.0;
    }
    let q = integrate(
        |s| (ell(s) - peak).exp(),
        &[s0 - left, s0, s0 + right],
        Tolerance::new(1e-300, REL_TOL),
        MAX_EVALS,
    )?;
    Ok(q.value.ln() + peak)
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Gaussian tail probability `Q(x) = P[Z > x]`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}
