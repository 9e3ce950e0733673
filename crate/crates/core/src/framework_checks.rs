//! First-order Magnus diagnostics and the factorisation of the full
//! propagator into target and error parts.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::computational_block;
use crate::models::{leak_matrix, Driven, Model, OffsetSet};
use crate::operators::{CMatrix, Operator};
use crate::propagation::{propagate_unitary, IntegratorConfig};

/// Simpson samples per window.
const SAMPLES_PER_SEGMENT: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagnusReport {
    pub n_seg: usize,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// `U_err(T) = U_targ(T)^H U_all(T)`, with `U_targ` the leak-free propagator.
pub fn error_propagator<M: Model + ?Sized>(m: &M, off: &OffsetSet, cfg: &IntegratorConfig) -> Result<Operator> {
    let t = m.duration();
    let targ = propagate_unitary(&Driven::new(m, *off, false), t, cfg)?.final_state;
    let all = propagate_unitary(&Driven::new(m, *off, true), t, cfg)?.final_state;
    Operator::new(m.basis(), targ.entries().adjoint() * all.entries())
}

/// `|| P U_err P - I_K ||_F` on the computational subspace.
pub fn subspace_error<M: Model + ?Sized>(m: &M, u_err: &Operator) -> Result<f64> {
    let comp = m.basis().indices_of(&m.computational_labels())?;
    let block = computational_block(u_err.entries(), &comp);
    Ok((block - CMatrix::identity(comp.len(), comp.len())).norm())
}

/// Per-window `int A^H H_leak(t) A dt` for a static frame `A`, each window
/// integrated by composite Simpson.
pub fn magnus_integrals<M: Model + ?Sized>(m: &M, off: &OffsetSet, a: &CMatrix, n_seg: usize) -> Result<Vec<CMatrix>> {
    if !(1..=64).contains(&n_seg) {
        return Err(Error::Config(format!("n_seg must lie in [1, 64], got {n_seg}")));
    }
    let dim = m.basis().len();
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::Dim(format!("frame is {}x{}, model has {dim} levels", a.nrows(), a.ncols())));
    }
    let tau = m.duration() / n_seg as f64;
    let n = SAMPLES_PER_SEGMENT;
    let h = tau / n as f64;
    let ad = a.adjoint();
    Ok((0..n_seg)
        .map(|k| {
            let t0 = k as f64 * tau;
            let mut acc = CMatrix::zeros(dim, dim);
            for j in 0..=n {
                let w = if j == 0 || j == n {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += leak_matrix(m, off, t0 + j as f64 * h) * Complex64::from(w);
            }
            &ad * acc * a * Complex64::from(h / 3.0)
        })
        .collect())
}

/// Frobenius norms of [`magnus_integrals`] and their maximum.
pub fn magnus_residual<M: Model + ?Sized>(m: &M, off: &OffsetSet, a: &CMatrix, n_seg: usize) -> Result<MagnusReport> {
    let residuals: Vec<f64> = magnus_integrals(m, off, a, n_seg)?.iter().map(|x| x.norm()).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    Ok(MagnusReport { n_seg, residuals, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Convention, SingleQubitModel, TransmonParams};

    #[test]
    fn leak_free_error_propagator_is_identity() {
        let p = TransmonParams { lambda: 0.0, ..TransmonParams::default() };
        let m = SingleQubitModel::not_gate(p, Convention::Transmon);
        let u = error_propagator(&m, &OffsetSet::ZERO, &IntegratorConfig::default()).unwrap();
        assert!((u.entries() - CMatrix::identity(3, 3)).norm() < 1e-9);
    }

    #[test]
    fn rejects_segment_counts_out_of_range() {
        let m = SingleQubitModel::not_gate(TransmonParams::default(), Convention::Transmon);
        let a = CMatrix::identity(3, 3);
        assert!(magnus_residual(&m, &OffsetSet::ZERO, &a, 0).is_err());
        assert!(magnus_residual(&m, &OffsetSet::ZERO, &a, 65).is_err());
    }
}
