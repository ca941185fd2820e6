//! Eigenvalue and IMI trajectories of simulated channel paths.

use mimofade_core::channel::{MimoConfig, ScatteringModel};
use mimofade_core::empirical::EigenSeries;
use mimofade_core::linalg::eig_hermitian_in_place;
use mimofade_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::generator::{gram_path, ChannelPath};

/// Relative tolerance of the per-step trace identity `Σλ = ‖H‖²_F`.
pub const TRACE_TOL: f64 = 1e-9;

/// Sorted eigenvalues of `HH†` (or `H†H`) per step, plus the source seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBundle {
    pub mimo: MimoConfig,
    pub seed: u64,
    pub eigen: EigenSeries,
}

impl TrajectoryBundle {
    pub fn len(&self) -> usize {
        self.eigen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigen.is_empty()
    }

    /// `I_l = Σ_m ln(1 + (η/N_T) λ_m(l))` in nats.
    pub fn imi_series(&self, eta: f64) -> Vec<f64> {
        let omega = eta / self.mimo.n_tx() as f64;
        self.eigen.as_slice().chunks_exact(self.mimo.m() as usize).map(|s| s.iter().map(|l| (omega * l).ln_1p()).sum()).collect()
    }
}

/// Eigenvalues of a sequence of `M × M` Gram matrices, `[step][row][col]`.
pub fn eigen_from_grams(grams: &[Complex64], m: usize) -> Result<EigenSeries> {
    let steps = grams.len() / (m * m);
    let mut out = vec![0.0; steps * m];
    out.par_chunks_mut(m).zip(grams.par_chunks(m * m)).try_for_each_init(
        || vec![Complex64::new(0.0, 0.0); m * m],
        |work, (lam, g)| -> Result<()> {
            work.copy_from_slice(g);
            eig_hermitian_in_place(work, m, lam)?;
            let trace: f64 = (0..m).map(|k| g[k * m + k].re).sum();
            let sum: f64 = lam.iter().sum();
            if (sum - trace).abs() > TRACE_TOL * trace.max(1.0) {
                return Err(Error::NonConvergence { what: "trace identity", iterations: 0 });
            }
            // Round-off can leave a tiny negative eigenvalue of a PSD matrix.
            lam.iter_mut().for_each(|v| *v = v.max(0.0));
            Ok(())
        },
    )?;
    EigenSeries::new(m, out)
}

/// Trajectories of an already generated path.
pub fn extract_trajectories(path: &ChannelPath, mimo: MimoConfig, seed: u64) -> Result<TrajectoryBundle> {
    let m = mimo.m() as usize;
    let mut grams = vec![Complex64::new(0.0, 0.0); path.len * m * m];
    for (l, g) in grams.chunks_exact_mut(m * m).enumerate() {
        mimofade_core::linalg::gram_into(path.step(l), path.n_rx, path.n_tx, g);
    }
    Ok(TrajectoryBundle { mimo, seed, eigen: eigen_from_grams(&grams, m)? })
}

/// Generate and reduce a path in one go, never holding more than one
/// larger-dimension slice of the channel.
pub fn simulate(model: &ScatteringModel, mimo: MimoConfig, len: usize, seed: u64) -> Result<TrajectoryBundle> {
    let grams = gram_path(model, mimo, len, seed)?;
    Ok(TrajectoryBundle { mimo, seed, eigen: eigen_from_grams(&grams, mimo.m() as usize)? })
}
