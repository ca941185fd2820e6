//! Stationary complex Gaussian fading paths by circulant embedding of the
//! target autocorrelation.
//!
//! The ACF `ρ_h(i)` is kept exact for `i ≤ L/2`, Hann-tapered to zero at
//! `i = L`, and mirrored into a Hermitian circulant of length `2L`. Its DFT
//! is the spectrum. White `CN(0,1)` noise shaped by the square root of the
//! spectrum and inverse-transformed gives a sequence whose first `L`
//! samples carry that ACF. Cutting the ACF off sharply at `L` leaves Gibbs
//! ripple around the singular Doppler edges, about 1% of the spectral
//! mass below zero. The taper leaves a few 1e-4, which is clipped, and the
//! spectrum is rescaled back to unit power. Short paths are embedded at
//! [`MIN_EMBED`] samples and truncated, since a few Doppler periods of ACF
//! are too little for the taper to work on.

use std::sync::Arc;

use mimofade_core::channel::{MimoConfig, ScatteringModel};
use mimofade_core::{Error, Result};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Largest supported path length.
pub const MAX_LEN: usize = 1 << 26;

/// Shortest sequence the spectrum is built for.
pub const MIN_EMBED: usize = 1 << 16;

/// Largest negative spectral mass, as a fraction of the positive mass,
/// that is clipped rather than rejected.
pub const CLIP_TOLERANCE: f64 = 1e-2;

/// Square-rooted, clipped circulant spectrum for one scattering model and
/// path length.
pub struct Spectrum {
    len: usize,
    amplitude: Vec<f64>,
    min_relative: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl Spectrum {
    pub fn new(model: &ScatteringModel, len: usize) -> Result<Self> {
        if !(2..=MAX_LEN).contains(&len) {
            return Err(Error::Domain("path length must lie in [2, 2^26]"));
        }
        let ext = len.max(MIN_EMBED);
        let n = 2 * ext;
        let flat = ext / 2;
        let taper = |i: usize| {
            if i <= flat {
                1.0
            } else {
                let t = (i - flat) as f64 / (ext - flat) as f64;
                0.5 * (1.0 + (std::f64::consts::PI * t).cos())
            }
        };
        let acf = model.acf(ext);
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..ext {
            c[k] = acf[k] * taper(k);
        }
        // taper(ext) = 0, so c[ext] stays zero and the circulant is Hermitian.
        for k in 1..ext {
            c[n - k] = c[k].conj();
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut c);
        let pos: f64 = c.iter().map(|z| z.re.max(0.0)).sum();
        let neg: f64 = c.iter().map(|z| (-z.re).max(0.0)).sum();
        let min_relative = -neg / pos;
        if !(pos > 0.0) || min_relative < -CLIP_TOLERANCE {
            return Err(Error::InvalidSpectrum { min_relative });
        }
        // Unit variance: Σ S_k / n = 1 after clipping.
        let amplitude = c.iter().map(|z| (z.re.max(0.0) / pos).sqrt()).collect();
        Ok(Spectrum { len, amplitude, min_relative, fft: planner.plan_fft_inverse(n) })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Clipped negative spectral mass relative to the positive mass, as a
    /// nonpositive number.
    pub fn min_relative(&self) -> f64 {
        self.min_relative
    }

    /// One subchannel sequence from stream `stream` of `seed`.
    pub fn sample(&self, seed: u64, stream: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let mut buf: Vec<Complex64> = self
            .amplitude
            .iter()
            .map(|&a| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * (a * half)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.len);
        buf
    }
}

/// `n_rx × n_tx` subchannels over `len` steps, stored `[step][rx][tx]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPath {
    pub n_rx: usize,
    pub n_tx: usize,
    pub len: usize,
    pub data: Vec<Complex64>,
}

impl ChannelPath {
    pub fn step(&self, l: usize) -> &[Complex64] {
        let k = self.n_rx * self.n_tx;
        &self.data[l * k..(l + 1) * k]
    }

    /// Subchannel `(r, t)` over time.
    pub fn subchannel(&self, r: usize, t: usize) -> Vec<Complex64> {
        (0..self.len).map(|l| self.step(l)[r * self.n_tx + t]).collect()
    }
}

/// Random stream of subchannel `(r, t)`.
fn stream_of(mimo: MimoConfig, r: usize, t: usize) -> u64 {
    (r * mimo.n_tx() as usize + t) as u64
}

/// Full channel path; every subchannel draws from its own stream of `seed`.
pub fn generate_path(model: &ScatteringModel, mimo: MimoConfig, len: usize, seed: u64) -> Result<ChannelPath> {
    let spec = Spectrum::new(model, len)?;
    let (nr, nt) = (mimo.n_rx() as usize, mimo.n_tx() as usize);
    let subs: Vec<Vec<Complex64>> = (0..nr * nt)
        .into_par_iter()
        .map(|k| spec.sample(seed, stream_of(mimo, k / nt, k % nt)))
        .collect();
    let mut data = vec![Complex64::new(0.0, 0.0); len * nr * nt];
    for (k, s) in subs.iter().enumerate() {
        for (l, v) in s.iter().enumerate() {
            data[l * nr * nt + k] = *v;
        }
    }
    Ok(ChannelPath { n_rx: nr, n_tx: nt, len, data })
}

/// Per-step `M × M` Gram matrices (`H†H` when `N_R ≥ N_T`, else `HH†`) of
/// the path `generate_path` would return, built without holding the whole
/// path: the outer products are summed one larger-dimension index at a
/// time. Stored `[step][row][col]`.
pub fn gram_path(model: &ScatteringModel, mimo: MimoConfig, len: usize, seed: u64) -> Result<Vec<Complex64>> {
    let spec = Spectrum::new(model, len)?;
    let (nr, nt) = (mimo.n_rx() as usize, mimo.n_tx() as usize);
    let tall = nr >= nt;
    let (outer, m) = if tall { (nr, nt) } else { (nt, nr) };
    let mut gram = vec![Complex64::new(0.0, 0.0); len * m * m];
    for o in 0..outer {
        // Vector v(l) of length M; H†H sums v†v over rows, HH† sums v v† over columns.
        let vecs: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|a| {
                let (r, t) = if tall { (o, a) } else { (a, o) };
                spec.sample(seed, stream_of(mimo, r, t))
            })
            .collect();
        gram.par_chunks_mut(m * m).enumerate().for_each(|(l, g)| {
            for a in 0..m {
                for b in 0..m {
                    g[a * m + b] += if tall {
                        vecs[a][l].conj() * vecs[b][l]
                    } else {
                        vecs[a][l] * vecs[b][l].conj()
                    };
                }
            }
        });
    }
    Ok(gram)
}
