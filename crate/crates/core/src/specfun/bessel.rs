//! Modified Bessel function of the first kind, integer order, complex argument.
//!
//! Three regimes:
//! * `|z| ≤ 2`: ascending power series (no cancellation to speak of);
//! * `|z| > 30` and `order² ≤ |z|`: Hankel expansion with both exponentials;
//! * otherwise: Miller backward recurrence normalised by
//!   `e^z = I_0(z) + 2 Σ_{k≥1} I_k(z)`.
//!
//! The ascending series alone is useless on the imaginary axis (`I_0(jx) =
//! J_0(x)` loses ~`x/2.3` digits), which is why the recurrence exists.

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 64;
pub const MAX_ABS_ARG: f64 = 1e4;

/// `I_n(z)`.
pub fn bessel_i(order: u32, z: Complex64) -> Result<Complex64> {
    let (scaled, log_scale) = bessel_i_parts(order, z)?;
    if log_scale > 709.0 {
        return Err(Error::Overflow);
    }
    Ok(scaled * log_scale.exp())
}

/// `e^{-|Re z|} I_n(z)`; never overflows.
pub fn bessel_i_scaled(order: u32, z: Complex64) -> Result<Complex64> {
    bessel_i_parts(order, z).map(|(v, _)| v)
}

/// Returns `(e^{-|Re z|} I_n(z), |Re z|)`.
fn bessel_i_parts(order: u32, z: Complex64) -> Result<(Complex64, f64)> {
    if order > MAX_ORDER {
        return Err(Error::Domain("bessel_i order exceeds 64"));
    }
    if !(z.norm() <= MAX_ABS_ARG) {
        return Err(Error::Domain("bessel_i needs |z| <= 1e4"));
    }
    Ok(parts_unbounded(order, z))
}

/// `e^{-|Re z|} I_n(z)` without the argument cap. Beyond the cap only the
/// Hankel branch runs, which only improves with `|z|`.
pub(crate) fn bessel_i_scaled_unbounded(order: u32, z: Complex64) -> Result<Complex64> {
    if order > MAX_ORDER || !z.norm().is_finite() {
        return Err(Error::Domain("bessel_i needs order <= 64 and finite z"));
    }
    Ok(parts_unbounded(order, z).0)
}

fn parts_unbounded(order: u32, z: Complex64) -> (Complex64, f64) {
    let r = z.norm();
    // Reduce to Re z ≥ 0 with I_n(-z) = (-1)^n I_n(z).
    let (w, sign) = if z.re < 0.0 {
        (-z, if order % 2 == 1 { -1.0 } else { 1.0 })
    } else {
        (z, 1.0)
    };
    let scale = w.re;
    let v = if r <= 2.0 {
        series(order, w) * (-scale).exp()
    } else if r > 30.0 && (order as f64).powi(2) <= r {
        hankel_scaled(order, w)
    } else {
        miller_scaled(order, w)
    };
    (v * sign, scale)
}

fn series(order: u32, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    let q = half * half;
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 1..=order {
        lead = lead * half / k as f64;
    }
    let mut term = lead;
    let mut sum = term;
    for k in 1..200u32 {
        term = term * q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Hankel asymptotic expansion (DLMF 10.40.5), times `e^{-Re z}`.
fn hankel_scaled(order: u32, z: Complex64) -> Complex64 {
    let mu = 4.0 * (order as f64).powi(2);
    let inv = Complex64::new(1.0, 0.0) / z;
    let mut a = Complex64::new(1.0, 0.0);
    let mut s_plus = a; // Σ (-1)^k a_k / z^k
    let mut s_minus = a; // Σ a_k / z^k
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kk = (2 * k - 1) as f64;
        a = a * inv * ((mu - kk * kk) / (8.0 * k as f64));
        let size = a.norm();
        if size > last {
            break; // asymptotic series started diverging
        }
        last = size;
        if k % 2 == 1 {
            s_plus -= a;
        } else {
            s_plus += a;
        }
        s_minus += a;
        if size < 1e-17 {
            break;
        }
    }
    let root = (z * (2.0 * core::f64::consts::PI)).sqrt();
    // e^{z - Re z} = e^{j Im z};   e^{-z - Re z} = e^{-2 Re z - j Im z}.
    let first = Complex64::from_polar(1.0, z.im) * s_plus / root;
    let branch = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::from_polar(1.0, branch * core::f64::consts::PI * order as f64);
    let second = Complex64::new(0.0, branch) * phase * Complex64::from_polar((-2.0 * z.re).exp(), -z.im) * s_minus
        / root;
    first + second
}

/// Miller backward recurrence, result times `e^{-Re z}`.
fn miller_scaled(order: u32, z: Complex64) -> Complex64 {
    let r = z.norm();
    let big = (order as f64).max(r);
    let start = (2.0 * (big + 15.0 + (40.0 * big).sqrt())) as u32 + 2;
    let two_over_z = Complex64::new(2.0, 0.0) / z;
    let mut next = Complex64::new(0.0, 0.0); // I_{k+1}
    let mut cur = Complex64::new(1.0, 0.0); // I_k, arbitrary scale
    let mut wanted = Complex64::new(0.0, 0.0);
    let mut norm = Complex64::new(0.0, 0.0);
    for k in (1..=start).rev() {
        let prev = cur * two_over_z * k as f64 + next; // I_{k-1}
        next = cur;
        cur = prev;
        // k-1 is the index of `cur` now.
        if k - 1 == order {
            wanted = cur;
        }
        if k > 1 {
            norm += cur * 2.0;
        }
        if cur.norm() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur; // I_0 term
    // Complex division squares the divisor's modulus; normalise first.
    let s = norm.norm();
    // e^{z} / e^{Re z} = e^{j Im z}
    (wanted / s) * Complex64::from_polar(1.0, z.im) / (norm / s)
}
