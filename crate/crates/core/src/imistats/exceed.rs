//! Exact exceedance probabilities of the IMI,
//! `φ_I = P[I_l > I_th]` and `φφ_I = P[I_l > I_th, I_{l−1} > I_th]`.
//!
//! * `M = 1`: the single eigenvalue is `Gamma(N)`, so both reduce to the
//!   eigen-channel formulas at `λ = (e^{I_th} − 1)/ω`.
//! * `M = 2`: `φ_I` is a one-dimensional integral of incomplete gamma
//!   functions. For `φφ_I`, Cauchy–Binet applied to the Bessel-kernel
//!   determinant of the joint eigenvalue density gives
//!   `φφ_I = Σ_{k1<k2} ϱ^{2(k1+k2−1)} G_{k1k2}² / (h_{k1} h_{k2} 4 ν!(ν+1)!)`,
//!   `G_{k1k2} = 2 ∫ w(y)[L_{k1}(y) B_{1k2}(g(y)) − L_{k2}(y) B_{1k1}(g(y))] dy`,
//!   where `g(y)` is the smallest partner eigenvalue that keeps the pair in
//!   the exceedance region. All `G` share one composite Kronrod rule.
//! * `M > 2`: Monte Carlo over pairs `H_1 = ϱ H_0 + √(1−ϱ²) W`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ImiContext, ImiLevelStats, SnrConfig};
use crate::eigenstats::{EigenPdfContext, SERIES_TOL};
use crate::error::{Error, Result};
use crate::linalg::{gram_into, logdet_identity_plus};
use crate::specfun::{
    factorial, integrate, ln_factorial, upper_gamma_int, upper_gamma_q_int, NeumaierSum, QuadratureRule,
    Tolerance,
};

/// Largest Laguerre index the `M = 2` joint series may reach.
const MAX_INDEX: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExceedMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceedEstimate {
    pub value: f64,
    /// Zero unless `method` is Monte Carlo.
    pub std_error: f64,
    /// Bound on the series truncation (deterministic methods).
    pub tail_bound: f64,
    pub method: ExceedMethod,
}

impl ExceedEstimate {
    fn exact(value: f64, tail_bound: f64, method: ExceedMethod) -> Self {
        ExceedEstimate { value, std_error: 0.0, tail_bound, method }
    }
}

/// Monte Carlo budget: `trials` pairs split over `blocks` independent
/// ChaCha streams of one `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub trials: usize,
    pub seed: u64,
    pub blocks: usize,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings { trials: 1 << 20, seed: 0x5eed, blocks: 64 }
    }
}

/// Counts from a batch of simulated `(I_{l−1}, I_l)` pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McTally {
    pub pairs: u64,
    /// Samples above threshold, counting both members of every pair.
    pub above: u64,
    /// Pairs with both members above.
    pub joint: u64,
}

impl McTally {
    pub fn merge(self, o: McTally) -> McTally {
        McTally { pairs: self.pairs + o.pairs, above: self.above + o.above, joint: self.joint + o.joint }
    }

    pub fn exceed(&self) -> ExceedEstimate {
        let n = 2.0 * self.pairs as f64;
        let p = self.above as f64 / n;
        // Members of a pair are correlated; count pairs, not samples.
        let se = (p * (1.0 - p) / self.pairs as f64).sqrt();
        ExceedEstimate { value: p, std_error: se, tail_bound: 0.0, method: ExceedMethod::MonteCarlo }
    }

    pub fn joint_exceed(&self) -> ExceedEstimate {
        let n = self.pairs as f64;
        let p = self.joint as f64 / n;
        ExceedEstimate {
            value: p,
            std_error: (p * (1.0 - p) / n).sqrt(),
            tail_bound: 0.0,
            method: ExceedMethod::MonteCarlo,
        }
    }

    /// `φ − φφ`, the probability of exactly one specific member being above,
    /// with its standard error.
    pub fn crossing(&self) -> (f64, f64) {
        let n = self.pairs as f64;
        let one = (self.above - 2 * self.joint) as f64 / n;
        let d = one / 2.0;
        (d, (one * (1.0 - one) / n).sqrt() / 2.0)
    }
}

/// One block of Monte Carlo pairs: block `b` of `mc` draws its share of
/// the trials from stream `b` of `mc.seed`.
pub fn mc_block(snr: &SnrConfig, i_th: f64, rho1: f64, mc: &McSettings, block: usize) -> Result<McTally> {
    if !(0.0..=1.0).contains(&rho1) {
        return Err(Error::Domain("rho1 must lie in [0, 1]"));
    }
    if mc.blocks == 0 || block >= mc.blocks {
        return Err(Error::Domain("block index out of range"));
    }
    let per = mc.trials / mc.blocks + usize::from(block < mc.trials % mc.blocks);
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    rng.set_stream(block as u64);
    let mimo = snr.mimo();
    let (nr, nt) = (mimo.n_rx() as usize, mimo.n_tx() as usize);
    let m = mimo.m() as usize;
    let omega = snr.omega();
    let comp = (1.0 - rho1 * rho1).max(0.0).sqrt();
    let half = core::f64::consts::FRAC_1_SQRT_2;
    let mut h0 = vec![Complex64::new(0.0, 0.0); nr * nt];
    let mut h1 = h0.clone();
    let mut g = vec![Complex64::new(0.0, 0.0); m * m];
    let mut work = g.clone();
    let mut tally = McTally::default();
    for _ in 0..per {
        for (a, b) in h0.iter_mut().zip(h1.iter_mut()) {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            let u: f64 = StandardNormal.sample(&mut rng);
            let v: f64 = StandardNormal.sample(&mut rng);
            *a = Complex64::new(x, y) * half;
            *b = *a * rho1 + Complex64::new(u, v) * (half * comp);
        }
        gram_into(&h0, nr, nt, &mut g);
        let i0 = logdet_identity_plus(&g, m, omega, &mut work)?;
        gram_into(&h1, nr, nt, &mut g);
        let i1 = logdet_identity_plus(&g, m, omega, &mut work)?;
        let (a0, a1) = (i0 > i_th, i1 > i_th);
        tally.pairs += 1;
        tally.above += u64::from(a0) + u64::from(a1);
        tally.joint += u64::from(a0 && a1);
    }
    Ok(tally)
}

fn mc_run(snr: &SnrConfig, i_th: f64, rho1: f64, mc: &McSettings) -> Result<McTally> {
    let mut t = McTally::default();
    for b in 0..mc.blocks {
        t = t.merge(mc_block(snr, i_th, rho1, mc, b)?);
    }
    if t.pairs == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one trial"));
    }
    Ok(t)
}

/// `(e^{I} − 1)/ω`: the single-eigenvalue threshold.
fn eigen_threshold(snr: &SnrConfig, i_th: f64) -> f64 {
    i_th.exp_m1() / snr.omega()
}

/// `φ_I`. `mc` is used only when `M > 2`.
pub fn imi_exceed_exact(snr: &SnrConfig, i_th: f64, mc: &McSettings) -> Result<ExceedEstimate> {
    let mimo = snr.mimo();
    if i_th <= 0.0 {
        return Ok(ExceedEstimate::exact(1.0, 0.0, ExceedMethod::ClosedForm));
    }
    match mimo.m() {
        1 => Ok(ExceedEstimate::exact(
            upper_gamma_q_int(mimo.n(), eigen_threshold(snr, i_th)),
            0.0,
            ExceedMethod::ClosedForm,
        )),
        2 => Ok(ExceedEstimate::exact(pair_exceed(snr, i_th)?, 0.0, ExceedMethod::Quadrature)),
        _ => Ok(mc_run(snr, i_th, 0.0, mc)?.exceed()),
    }
}

/// `φφ_I` at lag-one channel correlation `rho1`.
pub fn imi_joint_exceed_exact(snr: &SnrConfig, i_th: f64, rho1: f64, mc: &McSettings) -> Result<ExceedEstimate> {
    if !(0.0..1.0).contains(&rho1) {
        return Err(Error::Domain("rho1 must lie in [0, 1)"));
    }
    let mimo = snr.mimo();
    if i_th <= 0.0 {
        return Ok(ExceedEstimate::exact(1.0, 0.0, ExceedMethod::ClosedForm));
    }
    match mimo.m() {
        1 => {
            let ctx = EigenPdfContext::new(mimo);
            let s = ctx.varphi_lambda(eigen_threshold(snr, i_th), rho1)?;
            Ok(ExceedEstimate::exact(s.value, s.tail_bound, ExceedMethod::ClosedForm))
        }
        2 => {
            let phi = pair_exceed(snr, i_th)?;
            if rho1 == 0.0 {
                return Ok(ExceedEstimate::exact(phi * phi, 0.0, ExceedMethod::Quadrature));
            }
            let (v, tail) = pair_joint_exceed(snr, i_th, rho1, phi)?;
            Ok(ExceedEstimate::exact(v, tail, ExceedMethod::Quadrature))
        }
        _ => Ok(mc_run(snr, i_th, rho1, mc)?.joint_exceed()),
    }
}

/// Level statistics from the exact exceedance probabilities (or from one
/// shared Monte Carlo run when `M > 2`).
pub fn imi_level_stats_exact(
    ctx: &ImiContext,
    i_th: f64,
    rho1: f64,
    ts: f64,
    mc: &McSettings,
) -> Result<ImiLevelStats> {
    let snr = ctx.snr();
    let mom = ctx.moments();
    let (phi, joint, down) = if snr.mimo().m() > 2 {
        let t = mc_run(&snr, i_th, rho1, mc)?;
        (t.exceed().value, t.joint_exceed().value, t.crossing().0)
    } else {
        let p = imi_exceed_exact(&snr, i_th, mc)?.value;
        let j = imi_joint_exceed_exact(&snr, i_th, rho1, mc)?.value;
        (p, j, (p - j).max(0.0))
    };
    let lcr = down / ts;
    Ok(ImiLevelStats {
        threshold: i_th,
        normalized_threshold: (i_th - mom.mean) / mom.variance.sqrt(),
        exceed_prob: phi,
        joint_exceed: joint,
        lcr,
        aod: if down > 0.0 { (1.0 - phi) * ts / down } else { f64::INFINITY },
    })
}

/// Partner threshold for `M = 2`: `(1+ωy)(1+ωx) > e^I ⟺ x > (y_c − y)/(1+ωy)`.
fn partner(y: f64, yc: f64, omega: f64) -> f64 {
    ((yc - y) / (1.0 + omega * y)).max(0.0)
}

fn weight(nu: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    (nu as f64 * x.ln() - x).exp()
}

/// `φ_I` for `M = 2`, with unordered-pair density `w w (x−y)²/(2 ν!(ν+1)!)`.
fn pair_exceed(snr: &SnrConfig, i_th: f64) -> Result<f64> {
    let nu = snr.mimo().nu();
    let omega = snr.omega();
    let yc = eigen_threshold(snr, i_th);
    let (g1, g2, g3) = (factorial(nu), factorial(nu + 1), factorial(nu + 2));
    let norm = 2.0 * g1 * g2;
    // Inner integral over x > g of w(x)(y − x)².
    let inner = |y: f64| {
        let g = partner(y, yc, omega);
        weight(nu, y)
            * (y * y * upper_gamma_int(nu + 1, g) - 2.0 * y * upper_gamma_int(nu + 2, g) + upper_gamma_int(nu + 3, g))
    };
    let mut breaks = vec![0.0];
    for c in [(nu + 2) as f64, 4.0 * (nu + 2) as f64 + 40.0] {
        if c < yc {
            breaks.push(c);
        }
    }
    breaks.push(yc);
    let body = integrate(inner, &breaks, Tolerance::new(1e-300, 1e-12), 200_000)?.value;
    // y ≥ y_c: the partner is unconstrained.
    let rest = g1 * upper_gamma_int(nu + 3, yc) - 2.0 * g2 * upper_gamma_int(nu + 2, yc) + g3 * upper_gamma_int(nu + 1, yc);
    Ok(((body + rest) / norm).clamp(0.0, 1.0))
}

/// `e^{−x/2} L_k^a(x)` for `k < out.len()`.
fn scaled_laguerre(a: u32, x: f64, out: &mut [f64]) {
    let af = a as f64;
    let mut prev = 0.0;
    let mut cur = (-x / 2.0).exp();
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = cur;
        let kf = k as f64;
        let next = ((2.0 * kf + af + 1.0 - x) * cur - (kf + af) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
}

/// `φφ_I` for `M = 2` and `0 < ϱ < 1`; returns the value and tail bound.
fn pair_joint_exceed(snr: &SnrConfig, i_th: f64, rho1: f64, phi: f64) -> Result<(f64, f64)> {
    let nu = snr.mimo().nu();
    let a = nu as f64;
    let omega = snr.omega();
    let yc = eigen_threshold(snr, i_th);
    let r2 = rho1 * rho1;
    // Degree that a worst-case (all mass unspent) tail needs.
    let need = ((SERIES_TOL / phi.max(1e-300)).ln() / r2.ln()).ceil().max(1.0) as usize + 1;
    if need + 1 > MAX_INDEX {
        let tail = r2.powi(MAX_INDEX as i32 - 1) * phi;
        return Err(Error::TruncationFailure { terms: MAX_INDEX, partial: f64::NAN, tail_bound: tail });
    }
    let kmax = need + 1;
    let nk = kmax + 1;
    // Panels: uniform in √y (oscillation of L_k(y)) and in √g (of L_k(g)).
    let span = 4.0 * kmax as f64 + 2.0 * a + 80.0;
    let dt = core::f64::consts::PI / (2.0 * (kmax as f64).sqrt());
    let top = yc.min(span);
    let mut breaks: Vec<f64> = Vec::new();
    let mut t = 0.0;
    while t * t < top {
        breaks.push(t * t);
        t += dt;
    }
    breaks.push(top);
    let gtop = yc.min(span);
    let mut s = dt;
    while s * s < gtop {
        let y = (yc - s * s) / (1.0 + omega * s * s);
        if y < top {
            breaks.push(y);
        }
        s += dt;
    }
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1e-300));
    let rule = QuadratureRule::kronrod_panels(&breaks);

    let mut gmat = vec![0.0; nk * nk];
    let mut ly = vec![0.0; nk];
    let mut lg = vec![0.0; nk];
    let mut lg1 = vec![0.0; nk];
    let mut av = vec![0.0; nk];
    let mut bv = vec![0.0; nk];
    let g_nu1 = factorial(nu + 1);
    for (&y, &wt) in rule.nodes().iter().zip(rule.weights()) {
        if y <= 0.0 && nu > 0 {
            continue;
        }
        let g = partner(y, yc, omega);
        // a_k = w(y) L_k(y), computed as y^ν e^{−y/2} · e^{−y/2} L_k(y).
        scaled_laguerre(nu, y, &mut ly);
        let pre_y = if nu == 0 { (-y / 2.0).exp() } else { (a * y.ln() - y / 2.0).exp() };
        for k in 0..nk {
            av[k] = pre_y * ly[k];
        }
        // b_k = B_{1k}(g), Christoffel–Darboux form; b_1 from gamma tails.
        scaled_laguerre(nu, g, &mut lg);
        scaled_laguerre(nu + 1, g, &mut lg1);
        let l1 = a + 1.0 - g;
        let pre_g = if g > 0.0 { ((a + 1.0) * g.ln() - g / 2.0).exp() } else { 0.0 };
        for k in 0..nk {
            bv[k] = if k == 1 {
                (a + 1.0).powi(2) * upper_gamma_int(nu + 1, g) - 2.0 * (a + 1.0) * upper_gamma_int(nu + 2, g)
                    + upper_gamma_int(nu + 3, g)
            } else {
                let lk1 = if k == 0 { 0.0 } else { lg1[k - 1] };
                pre_g * (lk1 * l1 - lg[k]) / (1.0 - k as f64)
            };
        }
        let c = 2.0 * wt;
        for k1 in 0..nk {
            let (a1, b1) = (av[k1] * c, bv[k1] * c);
            for k2 in k1 + 1..nk.min(need + 2 - k1.min(need + 1)) {
                gmat[k1 * nk + k2] += a1 * bv[k2] - av[k2] * b1;
            }
        }
    }
    // y ≥ y_c: g = 0, so B_{1k} = h_1 δ_{k1}, leaving
    // T_k = ∫_{y_c}^∞ w L_k = −y_c^{ν+1} e^{−y_c} L_{k−1}^{ν+1}(y_c)/k (k ≥ 1).
    let h1 = g_nu1;
    scaled_laguerre(nu + 1, yc, &mut lg1);
    let pre = ((a + 1.0) * yc.ln() - yc / 2.0).exp();
    gmat[1] += 2.0 * h1 * upper_gamma_int(nu + 1, yc);
    for k2 in 2..nk {
        gmat[nk + k2] += 2.0 * h1 * pre * lg1[k2 - 1] / k2 as f64;
    }
    let norm = 4.0 * factorial(nu) * g_nu1;
    let mut weighted = NeumaierSum::default();
    let mut plain = NeumaierSum::default();
    let mut tail = f64::INFINITY;
    let mut degree = 1;
    for d in 1..=need {
        for k1 in 0..=(d - 1) / 2 {
            let k2 = d - k1;
            if k2 >= nk {
                continue;
            }
            let gv = gmat[k1 * nk + k2];
            let ln_hh = ln_factorial(k1 as u32 + nu) - ln_factorial(k1 as u32) + ln_factorial(k2 as u32 + nu)
                - ln_factorial(k2 as u32);
            let t = gv * gv * (-ln_hh).exp() / norm;
            plain.add(t);
            weighted.add(r2.powi(d as i32 - 1) * t);
        }
        degree = d;
        tail = r2.powi(d as i32) * ((phi - plain.value()).max(0.0) + 1e-12);
        if tail <= SERIES_TOL {
            break;
        }
    }
    if plain.value() > phi * (1.0 + 1e-6) + 1e-9 {
        return Err(Error::NonConvergence { what: "pair joint-exceedance quadrature", iterations: degree });
    }
    if tail > SERIES_TOL {
        return Err(Error::TruncationFailure { terms: degree, partial: weighted.value(), tail_bound: tail });
    }
    Ok((weighted.value().clamp(0.0, phi), tail))
}
