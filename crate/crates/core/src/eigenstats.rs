//! Statistics of the unordered eigenvalues of `H H†` for an i.i.d. Rayleigh
//! channel whose entries decorrelate in time as `ρ_h(i)`.
//!
//! Notation: `w(x) = x^ν e^{-x}`, `h_k = (k+ν)!/k!` is the squared norm of
//! `L_k^ν` under `w`, and
//! `B_{jk}(λ) = ∫_λ^∞ w L_j^ν L_k^ν dx` is the incomplete Laguerre bracket.
//! The joint exceedance series is evaluated through the closed form
//! `B_{jk}(λ) = λ^{ν+1} e^{-λ} [L_{k-1}^{ν+1}(λ) L_j^ν(λ) − L_{j-1}^{ν+1}(λ) L_k^ν(λ)]/(j−k)`
//! (j ≠ k) rather than the alternating double sum, which cancels
//! catastrophically once `j` reaches a few dozen.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::channel::MimoConfig;
use crate::error::{Error, Result};
use crate::specfun::{binomial, factorial, laguerre, rising_ratio, upper_gamma_int, NeumaierSum};

/// Absolute tail target for the joint exceedance series.
pub const SERIES_TOL: f64 = 1e-10;
/// Hard cap on series length.
pub const SERIES_MAX_TERMS: usize = 4096;
/// Pointwise tail target for the bivariate density.
pub const PDF_TAIL_TOL: f64 = 1e-8;

/// A truncated infinite series with a rigorous bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Index of the last `j` included.
    pub terms: usize,
    pub tail_bound: f64,
}

/// Per-configuration constants for the eigenvalue densities.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPdfContext {
    mimo: MimoConfig,
    m: u32,
    nu: u32,
    /// `1/h_k = k!/(k+ν)!` for `k < M`.
    inv_norm: Vec<f64>,
}

impl EigenPdfContext {
    pub fn new(mimo: MimoConfig) -> Self {
        let m = mimo.m();
        let nu = mimo.nu();
        let inv_norm = (0..m).map(|k| 1.0 / rising_ratio(k, nu)).collect();
        EigenPdfContext { mimo, m, nu, inv_norm }
    }

    pub fn mimo(&self) -> MimoConfig {
        self.mimo
    }

    fn weight(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return if self.nu == 0 { 1.0 } else { 0.0 };
        }
        (self.nu as f64 * x.ln() - x).exp()
    }

    fn laguerre_row(&self, x: f64, out: &mut [f64]) {
        crate::specfun::laguerre_table(self.nu, x, out);
    }

    /// Marginal density `p(x) = (1/M) Σ_{m<M} [L_m^ν(x)]² w(x)/h_m`.
    pub fn marginal_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let mut l = vec![0.0; self.m as usize];
        self.laguerre_row(x, &mut l);
        let s: f64 = l.iter().zip(&self.inv_norm).map(|(v, c)| c * v * v).sum();
        s * self.weight(x) / self.m as f64
    }

    /// Joint density of one unordered eigenvalue at time `l` and one at
    /// time `l − i`, given `ϱ_i`.
    pub fn joint_pdf(&self, x: f64, y: f64, rho: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Domain("joint_pdf needs rho in [0, 1)"));
        }
        if x < 0.0 || y < 0.0 {
            return Ok(0.0);
        }
        let base = self.marginal_pdf(x) * self.marginal_pdf(y);
        if rho == 0.0 {
            return Ok(base);
        }
        let m = self.m as usize;
        let nu = self.nu;
        let mf2 = (self.m * self.m) as f64;
        let wxy = self.weight(x) * self.weight(y);
        let mut lx = vec![0.0; m];
        let mut ly = vec![0.0; m];
        self.laguerre_row(x, &mut lx);
        self.laguerre_row(y, &mut ly);
        let r2 = rho * rho;
        // Running L_j at both points, started from j = M-1, M-2.
        let (mut px, mut cx) = (if m >= 2 { lx[m - 2] } else { 0.0 }, lx[m - 1]);
        let (mut py, mut cy) = (if m >= 2 { ly[m - 2] } else { 0.0 }, ly[m - 1]);
        let a = nu as f64;
        let step = |j: usize, prev: f64, cur: f64, t: f64| -> f64 {
            let jf = (j - 1) as f64;
            ((2.0 * jf + a + 1.0 - t) * cur - (jf + a) * prev) / (jf + 1.0)
        };
        // |L_j^ν(t)| ≤ C(j+ν, j) e^{t/2} turns into a pointwise tail bound.
        let env = wxy * ((x + y) / 2.0).exp() / (mf2 * factorial(nu).powi(2));
        let mut acc = NeumaierSum::default();
        let mut tail = f64::INFINITY;
        let mut j = m;
        while j < m + SERIES_MAX_TERMS {
            let nx = step(j, px, cx, x);
            let ny = step(j, py, cy, y);
            px = cx;
            cx = nx;
            py = cy;
            cy = ny;
            let inv_hj = 1.0 / rising_ratio(j as u32, nu);
            let mut s = 0.0;
            for k in 0..m {
                s += self.inv_norm[k] * r2.powi((j - k) as i32) * lx[k] * ly[k];
            }
            acc.add(inv_hj * cx * cy * s * wxy / mf2);
            // Majorise Σ_{j'>j} ϱ^{2(j'-k)} (j'+ν)!/j'! geometrically.
            let jn = (j + 1) as f64;
            let ratio = r2 * (jn + 1.0 + a) / (jn + 1.0);
            if ratio < 1.0 {
                let mut lead = 0.0;
                for k in 0..m {
                    lead += self.inv_norm[k] * (lx[k] * ly[k]).abs() * r2.powi((j + 1 - k) as i32);
                }
                tail = env * lead * rising_ratio(j as u32 + 1, nu) / (1.0 - ratio);
                if tail <= 1e-13 * acc.value().abs().max(base).max(1e-300) || tail < 1e-300 {
                    break;
                }
            }
            j += 1;
        }
        if !(tail <= PDF_TAIL_TOL) {
            return Err(Error::TruncationFailure { terms: j, partial: base + acc.value(), tail_bound: tail });
        }
        Ok((base + acc.value()).max(0.0))
    }

    /// Density of an unordered pair of distinct eigenvalues at the same time.
    pub fn unordered_pair_pdf(&self, x1: f64, x2: f64) -> Result<f64> {
        if self.m < 2 {
            return Err(Error::DegenerateConfig("a pair of eigenvalues needs M >= 2"));
        }
        if x1 < 0.0 || x2 < 0.0 {
            return Ok(0.0);
        }
        let m = self.m as usize;
        let mf = self.m as f64;
        let mut l1 = vec![0.0; m];
        let mut l2 = vec![0.0; m];
        self.laguerre_row(x1, &mut l1);
        self.laguerre_row(x2, &mut l2);
        // Christoffel–Darboux kernel K(x1, x2) without the weights.
        let kern: f64 = (0..m).map(|k| self.inv_norm[k] * l1[k] * l2[k]).sum();
        let w = self.weight(x1) * self.weight(x2);
        let p = mf / (mf - 1.0) * self.marginal_pdf(x1) * self.marginal_pdf(x2) - w * kern * kern / (mf * (mf - 1.0));
        Ok(p.max(0.0))
    }

    /// `B_{kk}(λ)` for `k < M` by the finite alternating sum against
    /// `Γ(p+q+ν+1, λ)`, accumulated in ascending `p+q` order.
    fn diag_bracket(&self, k: u32, lambda: f64) -> f64 {
        let nu = self.nu;
        let mut acc = NeumaierSum::default();
        for s in 0..=2 * k {
            for p in s.saturating_sub(k)..=s.min(k) {
                let q = s - p;
                let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                let c = binomial(k + nu, k - p) * binomial(k + nu, k - q) / (factorial(p) * factorial(q));
                acc.add(sign * c * upper_gamma_int(s + nu + 1, lambda));
            }
        }
        acc.value()
    }

    /// Exceedance probability `φ(λ) = P[λ_m ≥ λ]`.
    pub fn phi_lambda(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 1.0;
        }
        let mut acc = NeumaierSum::default();
        for k in 0..self.m {
            acc.add(self.inv_norm[k as usize] * self.diag_bracket(k, lambda));
        }
        clamp_prob(acc.value() / self.m as f64).0
    }

    /// Joint exceedance `φφ(λ) = P[λ_m(l) ≥ λ, λ_m(l−1) ≥ λ]`.
    ///
    /// The series over `j ≥ M` is cut once a Bessel-inequality bound on the
    /// remainder drops below [`SERIES_TOL`]: for each `k`,
    /// `Σ_j B_{jk}²/h_j = B_{kk}`, so what the partial sums have not yet
    /// collected bounds every later bracket.
    pub fn varphi_lambda(&self, lambda: f64, rho1: f64) -> Result<SeriesSum> {
        if !(0.0..1.0).contains(&rho1) {
            return Err(Error::Domain("varphi_lambda needs rho1 in [0, 1)"));
        }
        let phi = self.phi_lambda(lambda);
        if rho1 == 0.0 || lambda <= 0.0 {
            return Ok(SeriesSum { value: phi * phi, terms: 0, tail_bound: 0.0 });
        }
        let m = self.m as usize;
        let nu = self.nu;
        let a = nu as f64;
        let r2 = rho1 * rho1;
        let mf2 = (m * m) as f64;
        let pre = (a + 1.0) * lambda.ln() - lambda;
        let pre = pre.exp();
        // L_k^ν(λ) and L_{k-1}^{ν+1}(λ) for k < M.
        let lk: Vec<f64> = (0..m as u32).map(|k| laguerre(k, nu, lambda)).collect();
        let lk1: Vec<f64> = (0..m as u32).map(|k| if k == 0 { 0.0 } else { laguerre(k - 1, nu + 1, lambda) }).collect();
        let diag: Vec<f64> = (0..m as u32).map(|k| self.diag_bracket(k, lambda)).collect();
        // Running Bessel residuals R_k = B_kk − Σ_j B_jk²/h_j.
        let mut resid: Vec<f64> = diag.clone();
        for k in 0..m {
            resid[k] -= diag[k] * diag[k] * self.inv_norm[k];
            for j in 0..m {
                if j != k {
                    let b = pre * (lk1[k] * lk[j] - lk1[j] * lk[k]) / (j as f64 - k as f64);
                    resid[k] -= b * b * self.inv_norm[j];
                }
            }
        }
        // Recurrence state for L_j^ν(λ) and L_{j-1}^{ν+1}(λ), j ≥ M.
        let (mut lj_prev, mut lj) = (if m >= 2 { lk[m - 2] } else { 0.0 }, lk[m - 1]);
        let (mut g_prev, mut g) = (
            if m >= 3 { laguerre(m as u32 - 3, nu + 1, lambda) } else { 0.0 },
            lk1[m - 1],
        );
        let mut acc = NeumaierSum::default();
        let mut bound = f64::INFINITY;
        let mut j = m;
        while j < m + SERIES_MAX_TERMS {
            // Advance L^ν from index j-1 to j and L^{ν+1} from j-2 to j-1.
            let jf = (j - 1) as f64;
            let next = ((2.0 * jf + a + 1.0 - lambda) * lj - (jf + a) * lj_prev) / (jf + 1.0);
            lj_prev = lj;
            lj = next;
            let gf = j as f64 - 2.0;
            let gnext = if j == 1 {
                1.0
            } else {
                ((2.0 * gf + a + 2.0 - lambda) * g - (gf + a + 1.0) * g_prev) / (gf + 1.0)
            };
            g_prev = g;
            g = gnext;
            let inv_hj = 1.0 / rising_ratio(j as u32, nu);
            let mut term = 0.0;
            for k in 0..m {
                let b = pre * (lk1[k] * lj - g * lk[k]) / (j - k) as f64;
                let b2h = b * b * inv_hj;
                resid[k] -= b2h;
                term += r2.powi((j - k) as i32) * b2h * self.inv_norm[k];
            }
            acc.add(term / mf2);
            bound = 0.0;
            for k in 0..m {
                let slack = resid[k].max(0.0) + 1e-14 * diag[k].abs();
                bound += r2.powi((j + 1 - k) as i32) * slack * self.inv_norm[k];
            }
            bound /= mf2;
            if bound <= SERIES_TOL {
                break;
            }
            j += 1;
        }
        let value = phi * phi + acc.value();
        if bound > SERIES_TOL {
            return Err(Error::TruncationFailure { terms: j, partial: value, tail_bound: bound });
        }
        Ok(SeriesSum { value: clamp_prob(value).0.min(phi), terms: j, tail_bound: bound })
    }

    /// Exceedance, joint exceedance, LCR and AFD at one threshold.
    pub fn level_stats(&self, lambda: f64, rho1: f64, ts: f64) -> Result<LevelStats> {
        if !(lambda > 0.0) {
            return Err(Error::Domain("threshold must be positive"));
        }
        let phi = self.phi_lambda(lambda);
        let joint = self.varphi_lambda(lambda, rho1)?;
        let down = (phi - joint.value).max(0.0);
        let lcr = down / ts;
        let afd = if down > 0.0 { (1.0 - phi) * ts / down } else { f64::INFINITY };
        Ok(LevelStats {
            threshold: lambda,
            exceed_prob: phi,
            joint_exceed: joint.value,
            joint_lower: phi * phi,
            joint_upper: phi,
            lcr,
            afd,
            series_terms: joint.terms,
            tail_bound: joint.tail_bound,
        })
    }

    /// Down-crossing rate `N_λ = (φ − φφ)/T_s`, crossings per second.
    pub fn eigen_lcr(&self, lambda: f64, rho1: f64, ts: f64) -> Result<f64> {
        self.level_stats(lambda, rho1, ts).map(|s| s.lcr)
    }

    /// Average fade duration `(1 − φ) T_s/(φ − φφ)`, seconds.
    pub fn eigen_afd(&self, lambda: f64, rho1: f64, ts: f64) -> Result<f64> {
        let s = self.level_stats(lambda, rho1, ts)?;
        if s.afd.is_finite() {
            Ok(s.afd)
        } else {
            Err(Error::InfiniteDuration)
        }
    }
}

fn clamp_prob(p: f64) -> (f64, bool) {
    let c = p.clamp(0.0, 1.0);
    (c, (c - p).abs() > 1e-8)
}

/// Level-crossing summary for one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelStats {
    pub threshold: f64,
    pub exceed_prob: f64,
    pub joint_exceed: f64,
    /// `φ²`, the independence value; `joint_exceed` must not fall below it.
    pub joint_lower: f64,
    /// `φ`, the full-correlation value.
    pub joint_upper: f64,
    /// Crossings per second.
    pub lcr: f64,
    /// Seconds; infinite when the level is never crossed.
    pub afd: f64,
    pub series_terms: usize,
    pub tail_bound: f64,
}

/// `(E[λ], E[λ²]) = (N, N(N+M))`.
pub fn eigen_moments(mimo: MimoConfig) -> (f64, f64) {
    let (m, n) = (mimo.m() as f64, mimo.n() as f64);
    (n, n * (n + m))
}

/// Normalized correlation and correlation coefficient between two
/// unordered eigen-channels `i` samples apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCorrResult {
    pub lag: i64,
    pub normalized_corr: f64,
    pub corr_coeff: f64,
    pub same_mode: bool,
}

/// At `i ≠ 0` every pair of unordered eigenvalues shares
/// `E[λ_m(l) λ_n(l−i)] = N² + N ϱ_i²/M`; at `i = 0` the same eigenvalue
/// gives `N(N+M)` and two distinct ones give `N² − N`.
pub fn eigen_corr(mimo: MimoConfig, lag: i64, rho: f64, same_mode: bool) -> EigenCorrResult {
    let (m, n) = (mimo.m() as f64, mimo.n() as f64);
    let second = n * (n + m);
    let var = n * m;
    let r = if lag == 0 {
        if same_mode {
            second
        } else {
            n * n - n
        }
    } else {
        n * n + n * rho * rho / m
    };
    EigenCorrResult { lag, normalized_corr: r / second, corr_coeff: (r - n * n) / var, same_mode }
}

/// `∫ x^{ν+1} e^{-x} L_j^ν L_k^ν dx`.
pub fn laguerre_integral_i1(j: u32, k: u32, nu: u32) -> f64 {
    if j == k {
        (2 * k + nu + 1) as f64 * rising_ratio(k, nu)
    } else if j.abs_diff(k) == 1 {
        let lo = j.min(k);
        -rising_ratio(lo, nu + 1)
    } else {
        0.0
    }
}

/// `∫ ln(x) x^ν e^{-x} L_j^ν L_k^ν dx` for `j ≠ k`.
pub fn laguerre_integral_i2(j: u32, k: u32, nu: u32) -> Result<f64> {
    if j == k {
        return Err(Error::Domain("laguerre_integral_i2 needs j != k"));
    }
    let (lo, hi) = (j.min(k), j.max(k));
    Ok(rising_ratio(lo, nu) / (lo as f64 - hi as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: u32, n: u32) -> EigenPdfContext {
        EigenPdfContext::new(MimoConfig::from_mn(m, n).unwrap())
    }

    #[test]
    fn marginal_special_cases() {
        let c = ctx(1, 1);
        assert!((c.marginal_pdf(0.7) - (-0.7f64).exp()).abs() < 1e-15);
        let c = ctx(1, 4);
        let x = 2.3;
        let chi = x.powi(3) * (-x).exp() / 6.0;
        assert!((c.marginal_pdf(x) - chi).abs() < 1e-15);
    }

    #[test]
    fn phi_closed_forms() {
        let l = 1.3;
        assert!((ctx(1, 1).phi_lambda(l) - (-l).exp()).abs() < 1e-15);
        assert!((ctx(1, 2).phi_lambda(l) - (1.0 + l) * (-l).exp()).abs() < 1e-15);
    }

    #[test]
    fn independence_limits() {
        let c = ctx(3, 5);
        let l = 4.0;
        let p = c.phi_lambda(l);
        let v = c.varphi_lambda(l, 0.0).unwrap();
        assert_eq!(v.value, p * p);
        let pj = c.joint_pdf(2.0, 5.0, 0.0).unwrap();
        assert_eq!(pj, c.marginal_pdf(2.0) * c.marginal_pdf(5.0));
    }

    #[test]
    fn sandwich_and_monotone_in_rho() {
        let c = ctx(4, 4);
        let l = 4.0;
        let p = c.phi_lambda(l);
        let mut last = p * p;
        for r in [0.2, 0.5, 0.8, 0.95, 0.9755] {
            let v = c.varphi_lambda(l, r).unwrap();
            assert!(v.value >= last - 1e-12 && v.value <= p + 1e-12, "r={r} {v:?}");
            last = v.value;
        }
    }

    #[test]
    fn corr_branches() {
        let mimo = MimoConfig::from_mn(2, 2).unwrap();
        assert_eq!(eigen_corr(mimo, 0, 1.0, true).corr_coeff, 1.0);
        assert!((eigen_corr(mimo, 0, 1.0, false).corr_coeff + 0.5).abs() < 1e-15);
        assert!((eigen_corr(mimo, 3, 0.5, true).corr_coeff - 0.0625).abs() < 1e-15);
        assert_eq!(eigen_moments(MimoConfig::from_mn(3, 12).unwrap()), (12.0, 180.0));
    }

    #[test]
    fn closed_form_integrals() {
        assert_eq!(laguerre_integral_i1(3, 3, 2), 180.0);
        assert_eq!(laguerre_integral_i1(5, 2, 0), 0.0);
        assert_eq!(laguerre_integral_i1(4, 3, 1), -20.0);
        assert_eq!(laguerre_integral_i2(2, 0, 1).unwrap(), -0.5);
        assert!((laguerre_integral_i2(0, 3, 0).unwrap() + 1.0 / 3.0).abs() < 1e-16);
        assert!(laguerre_integral_i2(2, 2, 0).is_err());
    }

    #[test]
    fn afd_at_independence() {
        let c = ctx(2, 3);
        let ts = 0.005;
        let l = 2.5;
        let p = c.phi_lambda(l);
        let afd = c.eigen_afd(l, 0.0, ts).unwrap();
        assert!((afd - ts / p).abs() < 1e-12);
    }
}
