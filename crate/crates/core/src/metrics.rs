//! Gate, averaged and state fidelities, populations and leakage.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::OffsetSet;
use crate::operators::{CMatrix, DensityMatrix, Operator, Populations, StateVector, ZERO};
use crate::propagation::Channel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityKind {
    TraceGate,
    #[serde(rename = "averaged-1q")]
    Averaged1q,
    #[serde(rename = "averaged-2q")]
    Averaged2q,
    State,
}

/// A fidelity value with the offsets it was computed at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub value: f64,
    pub kind: FidelityKind,
    pub leakage_pop: f64,
    pub offsets: OffsetSet,
}

/// How the complex trace overlap is turned into a real number.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `|Tr(P U P U0^H)| / K`, insensitive to global phase.
    #[default]
    Modulus,
    /// `Re Tr(P U P U0^H) / K`.
    RealPart,
}

/// Block of `u` on the given rows and columns.
pub fn computational_block(u: &CMatrix, comp: &[usize]) -> CMatrix {
    CMatrix::from_fn(comp.len(), comp.len(), |i, j| u[(comp[i], comp[j])])
}

/// `|Tr(P U_f P U0^H)| / K` with `P` the projector on `comp_labels`.
pub fn trace_gate_fidelity<S: AsRef<str>>(u_f: &Operator, u0: &CMatrix, comp_labels: &[S]) -> Result<f64> {
    trace_gate_fidelity_with(u_f, u0, comp_labels, PhaseConvention::Modulus)
}

pub fn trace_gate_fidelity_with<S: AsRef<str>>(
    u_f: &Operator,
    u0: &CMatrix,
    comp_labels: &[S],
    convention: PhaseConvention,
) -> Result<f64> {
    let comp = u_f.basis().indices_of(comp_labels)?;
    let k = comp.len();
    if u0.nrows() != k || u0.ncols() != k {
        return Err(Error::Dim(format!("target is {}x{}, subspace has {k} levels", u0.nrows(), u0.ncols())));
    }
    let block = computational_block(u_f.entries(), &comp);
    let overlap = (block * u0.adjoint()).trace() / k as f64;
    Ok(match convention {
        PhaseConvention::Modulus => overlap.norm(),
        PhaseConvention::RealPart => overlap.re,
    })
}

/// Trapezoid weights on `n` equally spaced points of a closed interval,
/// normalised to sum to one.
fn trapezoid_weights(n: usize) -> Vec<f64> {
    let mut w = vec![1.0; n];
    w[0] = 0.5;
    w[n - 1] = 0.5;
    let total = (n - 1) as f64;
    w.iter().map(|x| x / total).collect()
}

fn embed(values: &CMatrix, comp: &[usize], dim: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    for (k, &i) in comp.iter().enumerate() {
        v[i] = values[k];
    }
    v
}

/// `(1/2 pi) int <U0 phi| Phi(|phi><phi|) |U0 phi> d theta` with
/// `phi = cos theta |0> + sin theta |1>`, trapezoid rule on `n` points.
pub fn averaged_fidelity_1q(channel: &Channel, u0: &CMatrix, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Config(format!("need at least 3 samples, got {n}")));
    }
    check_target(channel, u0, 2)?;
    let comp = channel.computational_indices();
    let dim = channel.basis().len();
    let w = trapezoid_weights(n);
    let mut total = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let th = TAU * k as f64 / (n - 1) as f64;
        let psi = CMatrix::from_column_slice(2, 1, &[th.cos().into(), th.sin().into()]);
        let ideal = embed(&(u0 * &psi), comp, dim);
        total += wk * channel.overlap(psi.as_slice(), &ideal);
    }
    Ok(total)
}

/// Two-qubit average over product states
/// `(cos a |0> + sin a |1>) (x) (cos b |0> + sin b |1>)` on an `n x n` grid.
pub fn averaged_fidelity_2q(channel: &Channel, u0: &CMatrix, n_grid: usize) -> Result<f64> {
    if n_grid < 11 {
        return Err(Error::Config(format!("need at least 11 grid points per axis, got {n_grid}")));
    }
    check_target(channel, u0, 4)?;
    let comp = channel.computational_indices();
    let dim = channel.basis().len();
    let w = trapezoid_weights(n_grid);
    let angle = |k: usize| TAU * k as f64 / (n_grid - 1) as f64;
    let mut total = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let (s1, c1) = angle(i).sin_cos();
        for (j, wj) in w.iter().enumerate() {
            let (s2, c2) = angle(j).sin_cos();
            let amps = [c1 * c2, c1 * s2, s1 * c2, s1 * s2].map(Complex64::from);
            let psi = CMatrix::from_column_slice(4, 1, &amps);
            let ideal = embed(&(u0 * &psi), comp, dim);
            total += wi * wj * channel.overlap(&amps, &ideal);
        }
    }
    Ok(total)
}

fn check_target(channel: &Channel, u0: &CMatrix, k: usize) -> Result<()> {
    let got = channel.computational_indices().len();
    if got != k || u0.nrows() != k || u0.ncols() != k {
        return Err(Error::Dim(format!(
            "expected a {k}-level target and subspace, got {}x{} on {got}",
            u0.nrows(),
            u0.ncols()
        )));
    }
    Ok(())
}

/// Exact single-qubit average for a closed evolution with computational
/// block `B`: with `M = U0^H B`, `a = M00`, `b = M01 + M10`, `d = M11`,
/// `F = 3/8 (|a|^2 + |d|^2) + 1/8 (|b|^2 + 2 Re(a d*))`.
pub fn averaged_fidelity_1q_unitary(block: &CMatrix, u0: &CMatrix) -> f64 {
    let m = u0.adjoint() * block;
    let (a, b, d) = (m[(0, 0)], m[(0, 1)] + m[(1, 0)], m[(1, 1)]);
    0.375 * (a.norm_sqr() + d.norm_sqr()) + 0.125 * (b.norm_sqr() + 2.0 * (a * d.conj()).re)
}

/// `<psi| rho |psi>`, clipped to `[0, 1]`.
pub fn state_fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::Dim(format!("state of dimension {} against {}", rho.dim(), psi.dim())));
    }
    let a = psi.amplitudes();
    let v = (a.adjoint() * rho.entries() * a)[(0, 0)];
    if v.im.abs() > 1e-8 {
        return Err(Error::InvalidOperator(format!("overlap has imaginary part {:e}", v.im)));
    }
    Ok(v.re.clamp(0.0, 1.0))
}

/// Populations of the requested levels, in the order given.
pub fn populations<P: Populations, S: AsRef<str>>(state: &P, labels: &[S]) -> Result<Vec<(String, f64)>> {
    let diag = state.diagonal();
    labels.iter().map(|l| Ok((l.as_ref().to_string(), diag[state.basis().index_of(l.as_ref())?]))).collect()
}

/// `1 - sum of computational populations`.
pub fn leakage_population<P: Populations, S: AsRef<str>>(state: &P, comp_labels: &[S]) -> Result<f64> {
    let diag = state.diagonal();
    let idx = state.basis().indices_of(comp_labels)?;
    let total: f64 = diag.iter().sum();
    let kept: f64 = idx.iter().map(|&i| diag[i]).sum();
    Ok((total - kept).max(0.0))
}

/// Average leakage of a gate over its computational basis inputs.
pub fn gate_leakage(u: &Operator, comp: &[usize]) -> f64 {
    let m = u.entries();
    let k = comp.len() as f64;
    let kept: f64 = comp.iter().flat_map(|&j| comp.iter().map(move |&i| m[(i, j)].norm_sqr())).sum();
    (1.0 - kept / k).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Basis, I, ONE};

    fn not() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn trace_fidelity_global_phase() {
        let mut u = CMatrix::identity(3, 3);
        u.view_mut((0, 0), (2, 2)).copy_from(&(not() * Complex64::from_polar(1.0, 0.7)));
        let op = Operator::new(Basis::levels(3), u).unwrap();
        let f = trace_gate_fidelity(&op, &not(), &["0", "1"]).unwrap();
        assert!((f - 1.0).abs() < 1e-15);
        let re = trace_gate_fidelity_with(&op, &not(), &["0", "1"], PhaseConvention::RealPart).unwrap();
        assert!((re - 0.7f64.cos()).abs() < 1e-15);
        assert!(matches!(trace_gate_fidelity(&op, &CMatrix::identity(3, 3), &["0", "1"]), Err(Error::Dim(_))));
    }

    #[test]
    fn identity_channel_averages_to_one() {
        let ch = Channel::identity(Basis::levels(3), &[0, 1]);
        let f = averaged_fidelity_1q(&ch, &CMatrix::identity(2, 2), 101).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        let ch2 = Channel::identity(Basis::levels(4), &[0, 1, 2, 3]);
        let f2 = averaged_fidelity_2q(&ch2, &CMatrix::identity(4, 4), 11).unwrap();
        assert!((f2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let ph = Complex64::from_polar(1.0, 0.3);
        let block = CMatrix::from_row_slice(2, 2, &[0.1 * ONE, 0.98 * ph, 0.97 * I, 0.2 * ONE]);
        let mut u = CMatrix::identity(3, 3);
        u.view_mut((0, 0), (2, 2)).copy_from(&block);
        let ch = Channel::from_unitary(&Operator::new(Basis::levels(3), u).unwrap(), &[0, 1]);
        let quad = averaged_fidelity_1q(&ch, &not(), 1001).unwrap();
        assert!((quad - averaged_fidelity_1q_unitary(&block, &not())).abs() < 1e-12);
    }

    #[test]
    fn state_fidelity_and_leakage() {
        let b = Basis::levels(4);
        let psi = StateVector::basis_state(b.clone(), "2").unwrap();
        assert_eq!(state_fidelity(&psi.to_density(), &psi).unwrap(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(b.clone());
        assert!((state_fidelity(&mixed, &psi).unwrap() - 0.25).abs() < 1e-15);
        let three = StateVector::basis_state(Basis::levels(3), "2").unwrap();
        assert_eq!(leakage_population(&three, &["0", "1"]).unwrap(), 1.0);
        let zero = StateVector::basis_state(Basis::levels(3), "0").unwrap();
        assert_eq!(leakage_population(&zero, &["0", "1"]).unwrap(), 0.0);
        let pops = populations(&zero, &["0", "1", "2"]).unwrap();
        assert_eq!(pops[0], ("0".to_string(), 1.0));
    }
}
