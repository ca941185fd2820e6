//! Small dense complex linear algebra: Gram matrices, Hermitian eigenvalues
//! by cyclic Jacobi, and log-determinants by Cholesky.
//!
//! Matrices are row-major slices of `Complex64`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};

/// Sweep cap for [`eig_hermitian`].
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// Writes the smaller Gram matrix of the `n_rx × n_tx` matrix `h` into
/// `out` (`H†H` if `n_rx ≥ n_tx`, otherwise `HH†`) and returns its size.
pub fn gram_into(h: &[Complex64], n_rx: usize, n_tx: usize, out: &mut [Complex64]) -> usize {
    debug_assert_eq!(h.len(), n_rx * n_tx);
    if n_rx >= n_tx {
        let m = n_tx;
        for a in 0..m {
            for b in a..m {
                let mut s = Complex64::new(0.0, 0.0);
                for r in 0..n_rx {
                    s += h[r * n_tx + a].conj() * h[r * n_tx + b];
                }
                out[a * m + b] = s;
                out[b * m + a] = s.conj();
            }
        }
        m
    } else {
        let m = n_rx;
        for a in 0..m {
            for b in a..m {
                let mut s = Complex64::new(0.0, 0.0);
                for t in 0..n_tx {
                    s += h[a * n_tx + t] * h[b * n_tx + t].conj();
                }
                out[a * m + b] = s;
                out[b * m + a] = s.conj();
            }
        }
        m
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eig_hermitian(a: &[Complex64], n: usize) -> Result<Vec<f64>> {
    let mut work = a.to_vec();
    let mut out = vec![0.0; n];
    eig_hermitian_in_place(&mut work, n, &mut out)?;
    Ok(out)
}

/// Cyclic Jacobi on `a` (destroyed); eigenvalues ascending into `out`.
pub fn eig_hermitian_in_place(a: &mut [Complex64], n: usize, out: &mut [f64]) -> Result<()> {
    if a.len() != n * n || out.len() != n {
        return Err(Error::Domain("matrix dimensions do not match"));
    }
    let mut scale = 0.0;
    for p in 0..n {
        for q in 0..n {
            let d = (a[p * n + q] - a[q * n + p].conj()).norm();
            scale += a[p * n + q].norm_sqr();
            if d > 1e-12 * (1.0 + a[p * n + q].norm()) {
                return Err(Error::Domain("matrix is not Hermitian"));
            }
        }
    }
    let target = (f64::EPSILON * f64::EPSILON) * scale;
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(a, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "Jacobi eigenvalues", iterations: JACOBI_MAX_SWEEPS });
    }
    for (k, o) in out.iter_mut().enumerate() {
        *o = a[k * n + k].re;
    }
    out.sort_by(|x, y| x.total_cmp(y));
    Ok(())
}

/// One two-sided rotation annihilating `a[p][q]`: a phase on column `q`
/// makes the pivot real, then a real Jacobi rotation finishes it.
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * abs_b);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph = b.conj() / abs_b; // e^{-iφ}
    // Columns: A ← A J with J_pp = c, J_qp = −s e^{-iφ}, J_pq = s, J_qq = c e^{-iφ}.
    for r in 0..n {
        let arp = a[r * n + p];
        let arq = a[r * n + q] * ph;
        a[r * n + p] = arp * c - arq * s;
        a[r * n + q] = arp * s + arq * c;
    }
    // Rows: A ← J† A.
    let phc = ph.conj();
    for r in 0..n {
        let apr = a[p * n + r];
        let aqr = a[q * n + r] * phc;
        a[p * n + r] = apr * c - aqr * s;
        a[q * n + r] = apr * s + aqr * c;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

/// `ln det(I + ω G)` for Hermitian positive semidefinite `G`, by Cholesky.
/// `work` must hold `n²` entries.
pub fn logdet_identity_plus(g: &[Complex64], n: usize, omega: f64, work: &mut [Complex64]) -> Result<f64> {
    for r in 0..n {
        for c in 0..n {
            work[r * n + c] = g[r * n + c] * omega;
        }
        work[r * n + r] += 1.0;
    }
    let mut logdet = 0.0;
    for j in 0..n {
        let mut d = work[j * n + j].re;
        for k in 0..j {
            d -= work[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::Domain("matrix is not positive definite"));
        }
        let l = d.sqrt();
        work[j * n + j] = Complex64::new(l, 0.0);
        logdet += 2.0 * l.ln();
        for i in j + 1..n {
            let mut s = work[i * n + j];
            for k in 0..j {
                s -= work[i * n + k] * work[j * n + k].conj();
            }
            work[i * n + j] = s / l;
        }
    }
    Ok(logdet)
}
