//! Estimators of second-order statistics from sampled series, with
//! block-bootstrap standard errors.
//!
//! Eigenvalue series are stored sorted per time step. Unordered-eigenvalue
//! expectations come from averaging over every index pair rather than from
//! random relabelling: at lag `i ≠ 0` that average is `S_l S_{l−i}/M²`,
//! with `S` the per-step eigenvalue sum.
//!
//! Every estimator is a smooth function of block sums of a few per-sample
//! terms. The bootstrap resamples those block sums.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Number of contiguous blocks the bootstrap resamples.
pub const BOOTSTRAP_BLOCKS: usize = 64;
/// Bootstrap replicates per standard error.
pub const BOOTSTRAP_REPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrMode {
    /// Same unordered eigenvalue at both times.
    SameModeEigen,
    /// Two distinct unordered eigenvalues.
    CrossModeEigen,
    /// A single scalar series (the IMI).
    Imi,
}

/// An estimate with its bootstrap standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Per-step eigenvalues in row-major `[step][mode]` order, ascending within
/// a step.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSeries {
    m: usize,
    data: Vec<f64>,
}

impl EigenSeries {
    pub fn new(m: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 || !data.len().is_multiple_of(m) {
            return Err(Error::Domain("eigen series length must be a multiple of M"));
        }
        Ok(EigenSeries { m, data })
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn step(&self, l: usize) -> &[f64] {
        &self.data[l * self.m..(l + 1) * self.m]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The `k`-th sorted eigenvalue over time.
    pub fn mode(&self, k: usize) -> Vec<f64> {
        self.data.iter().skip(k).step_by(self.m).copied().collect()
    }

    /// `Σ_m λ_m(l)` per step.
    pub fn sums(&self) -> Vec<f64> {
        self.data.chunks_exact(self.m).map(|c| c.iter().sum()).collect()
    }
}

/// Split `0..n` into `BOOTSTRAP_BLOCKS` near-equal contiguous ranges
/// (fewer when `n` is small) and return the block index of every sample.
fn block_of(n: usize) -> impl Fn(usize) -> usize {
    let b = BOOTSTRAP_BLOCKS.min(n.max(1));
    move |l| l * b / n.max(1)
}

fn n_blocks(n: usize) -> usize {
    BOOTSTRAP_BLOCKS.min(n.max(1))
}

/// Resample block sums (`[block][k]`) with replacement and return the
/// standard deviation of `stat` over the replicates, or `NaN` when every
/// replicate is degenerate.
pub fn block_bootstrap<F: Fn(&[f64]) -> Option<f64>>(sums: &[Vec<f64>], stat: F, seed: u64) -> f64 {
    let b = sums.len();
    if b < 2 {
        return f64::NAN;
    }
    let k = sums[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![0.0; k];
    let (mut s1, mut s2, mut n) = (0.0, 0.0, 0usize);
    for _ in 0..BOOTSTRAP_REPS {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for _ in 0..b {
            let pick = (rng.next_u64() % b as u64) as usize;
            for (a, s) in acc.iter_mut().zip(&sums[pick]) {
                *a += s;
            }
        }
        if let Some(v) = stat(&acc) {
            if v.is_finite() {
                s1 += v;
                s2 += v * v;
                n += 1;
            }
        }
    }
    if n < 2 {
        return f64::NAN;
    }
    let mean = s1 / n as f64;
    ((s2 / n as f64 - mean * mean).max(0.0) * n as f64 / (n - 1) as f64).sqrt()
}

fn total(sums: &[Vec<f64>]) -> Vec<f64> {
    let mut t = vec![0.0; sums.first().map_or(0, Vec::len)];
    for s in sums {
        for (a, b) in t.iter_mut().zip(s) {
            *a += b;
        }
    }
    t
}

/// `(Σ x_{l−i}, Σ x_l, Σ x_{l−i}², Σ x_l², Σ x_l x_{l−i}, count)` over valid
/// `l`, accumulated per block, for the lag-`i` sample correlation.
fn lag_sums(x: &[f64], lag: usize) -> Vec<Vec<f64>> {
    let n = x.len().saturating_sub(lag);
    let blk = block_of(n);
    let mut out = vec![vec![0.0; 6]; n_blocks(n)];
    for l in 0..n {
        let (a, b) = (x[l], x[l + lag]);
        let s = &mut out[blk(l)];
        s[0] += a;
        s[1] += b;
        s[2] += a * a;
        s[3] += b * b;
        s[4] += a * b;
        s[5] += 1.0;
    }
    out
}

fn pearson(s: &[f64]) -> Option<f64> {
    let n = s[5];
    if n < 1.0 {
        return None;
    }
    let (ma, mb) = (s[0] / n, s[1] / n);
    let va = s[2] / n - ma * ma;
    let vb = s[3] / n - mb * mb;
    if !(va > 0.0 && vb > 0.0) {
        return None;
    }
    Some((s[4] / n - ma * mb) / (va * vb).sqrt())
}

/// Lag-`lag` correlation coefficient of a scalar series.
pub fn series_corr(x: &[f64], lag: usize, seed: u64) -> Result<Estimate> {
    if lag >= x.len() {
        return Err(Error::Domain("lag must be shorter than the series"));
    }
    let sums = lag_sums(x, lag);
    let value = pearson(&total(&sums)).ok_or(Error::DegenerateVariance)?;
    Ok(Estimate { value, std_error: block_bootstrap(&sums, pearson, seed) })
}

/// Correlation coefficient of unordered eigenvalues at `lag`.
///
/// Moments come from the pooled eigenvalues (`Σλ`, `Σλ²` over all steps
/// and modes); the lagged product is the pair average described in the
/// module docs. At lag 0, `SameModeEigen` is identically one and
/// `CrossModeEigen` averages `λ_a λ_b` over `a ≠ b`.
pub fn eigen_corr(series: &EigenSeries, lag: usize, mode: CorrMode, seed: u64) -> Result<Estimate> {
    let m = series.modes();
    let len = series.len();
    if lag >= len {
        return Err(Error::Domain("lag must be shorter than the series"));
    }
    match mode {
        CorrMode::Imi => return Err(Error::Domain("eigen_corr needs an eigen mode")),
        CorrMode::CrossModeEigen if m < 2 => {
            return Err(Error::DegenerateConfig("cross-mode correlation needs M >= 2"))
        }
        CorrMode::SameModeEigen if lag == 0 => return Ok(Estimate { value: 1.0, std_error: 0.0 }),
        _ => {}
    }
    let mf = m as f64;
    let s = series.sums();
    let n = len - lag;
    let blk = block_of(n);
    // [Σλ, Σλ², Σ product, count], with λ pooled over the first n steps.
    let mut sums = vec![vec![0.0; 4]; n_blocks(n)];
    for l in 0..n {
        let step = series.step(l);
        let q: f64 = step.iter().map(|v| v * v).sum();
        let prod = if lag == 0 { (s[l] * s[l] - q) / (mf * (mf - 1.0)) } else { s[l] * s[l + lag] / (mf * mf) };
        let b = &mut sums[blk(l)];
        b[0] += s[l];
        b[1] += q;
        b[2] += prod;
        b[3] += 1.0;
    }
    let stat = |b: &[f64]| -> Option<f64> {
        let steps = b[3];
        if steps < 1.0 {
            return None;
        }
        let mean = b[0] / (steps * mf);
        let var = b[1] / (steps * mf) - mean * mean;
        if !(var > 0.0) {
            return None;
        }
        Some((b[2] / steps - mean * mean) / var)
    };
    let value = stat(&total(&sums)).ok_or(Error::DegenerateVariance)?;
    Ok(Estimate { value, std_error: block_bootstrap(&sums, stat, seed) })
}

/// Crossing statistics of `x` about `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingStats {
    /// Down-crossings per second: half of all crossings over `(L−1) T_s`.
    pub lcr: Estimate,
    /// Mean fade duration in seconds (time at or below the threshold per
    /// down-crossing), if any down-crossing was seen.
    pub afd: Option<Estimate>,
    /// Fraction of samples strictly above the threshold.
    pub exceed: f64,
    /// Pair-averaged for eigenvalues, hence rounded.
    pub down_crossings: usize,
}

/// `(transitions, down-crossings, samples below, samples above, steps)` per
/// block; transition `l−1 → l` belongs to the block of `l`.
fn crossing_sums(x: &[f64], threshold: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let blk = block_of(n);
    let mut out = vec![vec![0.0; 5]; n_blocks(n)];
    for l in 0..n {
        let below = x[l] <= threshold;
        let s = &mut out[blk(l)];
        if below {
            s[2] += 1.0;
        } else {
            s[3] += 1.0;
        }
        if l > 0 {
            let prev = x[l - 1] <= threshold;
            s[0] += f64::from(u8::from(prev != below));
            s[1] += f64::from(u8::from(!prev && below));
            s[4] += 1.0;
        }
    }
    out
}

/// Empirical LCR and AFD. A sample is "above" when it strictly exceeds the
/// threshold.
pub fn crossings(x: &[f64], threshold: f64, ts: f64, seed: u64) -> Result<CrossingStats> {
    if x.len() < 2 {
        return Err(Error::Domain("crossing counts need at least two samples"));
    }
    if !(ts > 0.0) {
        return Err(Error::Domain("sample period must be positive"));
    }
    let sums = crossing_sums(x, threshold);
    let t = total(&sums);
    let lcr = |b: &[f64]| (b[4] > 0.0).then(|| b[0] / 2.0 / (b[4] * ts));
    let afd = |b: &[f64]| (b[1] > 0.0).then(|| b[2] * ts / b[1]);
    let lcr_est = Estimate { value: lcr(&t).unwrap_or(0.0), std_error: block_bootstrap(&sums, lcr, seed) };
    let afd_est = afd(&t).map(|v| Estimate { value: v, std_error: block_bootstrap(&sums, afd, seed ^ 1) });
    Ok(CrossingStats {
        lcr: lcr_est,
        afd: afd_est,
        exceed: t[3] / x.len() as f64,
        down_crossings: t[1] as usize,
    })
}

/// Crossing statistics of unordered eigenvalues, pair-averaged: with `C_l`
/// the number of eigenvalues above the threshold at step `l`, a randomly
/// labelled eigenvalue is above at `l−1` and at or below at `l` with
/// probability `C_{l−1}(M − C_l)/M²`.
pub fn eigen_crossings(series: &EigenSeries, threshold: f64, ts: f64, seed: u64) -> Result<CrossingStats> {
    let len = series.len();
    if len < 2 {
        return Err(Error::Domain("crossing counts need at least two samples"));
    }
    if !(ts > 0.0) {
        return Err(Error::Domain("sample period must be positive"));
    }
    let mf = series.modes() as f64;
    let above = |l: usize| series.step(l).iter().filter(|&&v| v > threshold).count() as f64;
    let blk = block_of(len);
    // Same layout as `crossing_sums`, with pair-averaged indicators.
    let mut sums = vec![vec![0.0; 5]; n_blocks(len)];
    let mut prev = above(0);
    sums[0][2] += 1.0 - prev / mf;
    sums[0][3] += prev / mf;
    for l in 1..len {
        let c = above(l);
        let s = &mut sums[blk(l)];
        let down = prev * (mf - c) / (mf * mf);
        let up = (mf - prev) * c / (mf * mf);
        s[0] += down + up;
        s[1] += down;
        s[2] += 1.0 - c / mf;
        s[3] += c / mf;
        s[4] += 1.0;
        prev = c;
    }
    let t = total(&sums);
    let lcr = |b: &[f64]| (b[4] > 0.0).then(|| b[0] / 2.0 / (b[4] * ts));
    let afd = |b: &[f64]| (b[1] > 0.0).then(|| b[2] * ts / b[1]);
    Ok(CrossingStats {
        lcr: Estimate { value: lcr(&t).unwrap_or(0.0), std_error: block_bootstrap(&sums, lcr, seed) },
        afd: afd(&t).map(|v| Estimate { value: v, std_error: block_bootstrap(&sums, afd, seed ^ 1) }),
        exceed: t[3] / len as f64,
        down_crossings: t[1].round() as usize,
    })
}

/// Pair-averaged `P[λ(l) > th, λ(l−lag) > th]` for a randomly labelled
/// eigenvalue: the mean of `C_l C_{l−lag}/M²`.
pub fn eigen_joint_exceed(series: &EigenSeries, threshold: f64, lag: usize) -> Result<f64> {
    let len = series.len();
    if lag >= len {
        return Err(Error::Domain("lag must be shorter than the series"));
    }
    let mf = series.modes() as f64;
    let c: Vec<f64> = (0..len).map(|l| series.step(l).iter().filter(|&&v| v > threshold).count() as f64).collect();
    let s: f64 = (lag..len).map(|l| c[l] * c[l - lag]).sum();
    Ok(s / (mf * mf * (len - lag) as f64))
}

/// Down-crossing rate alone.
pub fn empirical_lcr(x: &[f64], threshold: f64, ts: f64) -> Result<f64> {
    Ok(crossings(x, threshold, ts, 0)?.lcr.value)
}

/// Mean fade duration; `NoCrossings` when no down-crossing was seen.
pub fn empirical_afd(x: &[f64], threshold: f64, ts: f64) -> Result<f64> {
    crossings(x, threshold, ts, 0)?.afd.map(|e| e.value).ok_or(Error::NoCrossings)
}

/// Fraction of lagged pairs with both samples above the threshold.
pub fn joint_exceed_freq(x: &[f64], threshold: f64, lag: usize) -> Result<f64> {
    if lag >= x.len() {
        return Err(Error::Domain("lag must be shorter than the series"));
    }
    let n = x.len() - lag;
    let c = (0..n).filter(|&l| x[l] > threshold && x[l + lag] > threshold).count();
    Ok(c as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_edge_cases() {
        let c = [3.0; 10];
        assert_eq!(empirical_lcr(&c, 1.0, 0.1).unwrap(), 0.0);
        assert_eq!(empirical_afd(&c, 1.0, 0.1), Err(Error::NoCrossings));
        let alt: Vec<f64> = (0..101).map(|l| if l % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((empirical_lcr(&alt, 0.0, 0.01).unwrap() - 50.0).abs() < 1e-12);
        // Fades are single samples.
        assert!((empirical_afd(&alt, 0.0, 0.01).unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn lag_zero_and_white_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..40_000).map(|_| (rng.next_u32() as f64) / 4294967296.0).collect();
        assert!((series_corr(&x, 0, 1).unwrap().value - 1.0).abs() < 1e-12);
        let e = series_corr(&x, 3, 1).unwrap();
        assert!(e.value.abs() <= 4.0 / 200.0 && e.std_error > 0.0 && e.std_error < 0.02);
        let es = EigenSeries::new(2, x).unwrap();
        assert_eq!(eigen_corr(&es, 0, CorrMode::SameModeEigen, 1).unwrap().value, 1.0);
        assert!(eigen_corr(&es, 5, CorrMode::CrossModeEigen, 1).unwrap().value.abs() < 0.03);
    }

    #[test]
    fn single_mode_pair_average_is_plain_counting() {
        let x: Vec<f64> = (0..500).map(|l| ((l as f64) * 0.37).sin() + 0.1 * ((l * l) as f64).cos()).collect();
        let es = EigenSeries::new(1, x.clone()).unwrap();
        let a = crossings(&x, 0.2, 0.01, 4).unwrap();
        let b = eigen_crossings(&es, 0.2, 0.01, 4).unwrap();
        assert!((a.lcr.value - b.lcr.value).abs() < 1e-12);
        assert!((a.afd.unwrap().value - b.afd.unwrap().value).abs() < 1e-12);
        assert_eq!(a.down_crossings, b.down_crossings);
        assert!((eigen_joint_exceed(&es, 0.2, 1).unwrap() - joint_exceed_freq(&x, 0.2, 1).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn cross_mode_lag_zero_of_independent_uniforms() {
        // Independent U(0,1) pairs: E[λ_a λ_b] = 1/4 equals the mean square
        // of the pooled mean, so the coefficient vanishes.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..200_000).map(|_| (rng.next_u32() as f64) / 4294967296.0).collect();
        let es = EigenSeries::new(2, x).unwrap();
        let e = eigen_corr(&es, 0, CorrMode::CrossModeEigen, 2).unwrap();
        assert!(e.value.abs() < 4.0 * e.std_error + 1e-3, "{e:?}");
    }
}
