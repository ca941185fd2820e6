//! Test-local quadrature, independent of the library's integrators.

#![allow(dead_code)]

/// `∫_0^∞ f(x) dx` by the trapezoid rule in `t = ln x`. For integrands that
/// vanish like a power at 0 and exponentially at ∞ the rule converges
/// geometrically in `1/h`.
pub fn log_trapezoid<F: Fn(f64) -> f64>(f: F, t_lo: f64, t_hi: f64, h: f64) -> f64 {
    let n = ((t_hi - t_lo) / h).ceil() as usize;
    let h = (t_hi - t_lo) / n as f64;
    let mut acc = 0.0;
    let mut comp = 0.0;
    for i in 0..=n {
        let t = t_lo + i as f64 * h;
        let x = t.exp();
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        // Kahan: the sum runs over ~10^4 terms of very different size.
        let y = w * f(x) * x - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    acc * h
}

/// `∫_0^∞ f` for gamma-like integrands of moderate order.
pub fn half_line<F: Fn(f64) -> f64>(f: F) -> f64 {
    log_trapezoid(f, -60.0, 6.5, 2e-3)
}

/// Generalized Laguerre polynomial by its explicit sum.
pub fn laguerre_explicit(n: u32, a: u32, x: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..=n {
        let c = binom(n + a, n - i) / fact(i);
        s += if i % 2 == 0 { c } else { -c } * x.powi(i as i32);
    }
    s
}

pub fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binom(n: u32, k: u32) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// `Q(n, z) = e^{-z} Σ_{k<n} z^k/k!`.
pub fn poisson_tail(n: u32, z: f64) -> f64 {
    let mut term = 1.0;
    let mut s = 0.0;
    for k in 0..n {
        if k > 0 {
            term *= z / k as f64;
        }
        s += term;
    }
    s * (-z).exp()
}
