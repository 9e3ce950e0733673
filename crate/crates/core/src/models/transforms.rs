use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::{Model, OffsetSet, SingleQubitModel};
use crate::error::Result;
use crate::framework_checks::magnus_integrals;
use crate::operators::{expm_hermitian, Basis, CMatrix, Operator, I};

use super::two_qubit::TWO_QUBIT_LABELS;

/// `A1 = exp(i X1)` with
/// `X1 = (dz/2) diag(-1, 1, 3) + [(dx + i dy)(|0><1| + lambda |1><2|) + h.c.]`.
pub fn transform_a1(dx: f64, dy: f64, dz: f64, lambda: f64) -> Operator {
    let mut x = CMatrix::zeros(3, 3);
    x[(0, 0)] = (-0.5 * dz).into();
    x[(1, 1)] = (0.5 * dz).into();
    x[(2, 2)] = (1.5 * dz).into();
    let c = Complex64::new(dx, dy);
    x[(0, 1)] = c;
    x[(1, 0)] = c.conj();
    x[(1, 2)] = c * lambda;
    x[(2, 1)] = (c * lambda).conj();
    Operator::new(Basis::levels(3), expm_hermitian(&x, I)).expect("3x3")
}

/// `A2 = exp(i X2)` on the two-qubit working basis with
/// `X2 = dz (-|02><02| + |11><11| + 3 |20><20|) + [(dx + i dy)(|02><11| + |11><20|) + h.c.]`.
pub fn transform_a2(dx: f64, dy: f64, dz: f64) -> Operator {
    let mut x = CMatrix::zeros(6, 6);
    x[(3, 3)] = (-dz).into();
    x[(4, 4)] = dz.into();
    x[(5, 5)] = (3.0 * dz).into();
    let c = Complex64::new(dx, dy);
    for (i, j) in [(3, 4), (4, 5)] {
        x[(i, j)] = c;
        x[(j, i)] = c.conj();
    }
    Operator::new(Basis::from_labels(&TWO_QUBIT_LABELS), expm_hermitian(&x, I)).expect("6x6")
}

/// `A1 H A1^dagger` for the unperturbed single-qubit Hamiltonian at `t`. The
/// derivative term vanishes because the transformation is static.
pub fn rotated_h1(m: &SingleQubitModel, dx: f64, dy: f64, dz: f64, t: f64) -> Operator {
    let a = transform_a1(dx, dy, dz, m.params.lambda);
    let h = m.matrix(&OffsetSet::ZERO, t, true);
    let rotated = a.entries() * h * a.entries().adjoint();
    Operator::new(Basis::levels(3), rotated).expect("3x3")
}

/// Offsets implied by a transformation with polar parameter `dz`:
/// `amp = sqrt(1 + dz^2) - 1`, `phase = arccos(1 / sqrt(1 + dz^2))`.
/// The detuning offset is left to the caller.
pub fn offsets_from_rotation(dz: f64, det: f64) -> OffsetSet {
    let r = (1.0 + dz * dz).sqrt();
    OffsetSet { amp: r - 1.0, det, phase: (1.0 / r).acos() }
}

/// Largest first-order Magnus leakage residual over `n_seg` equal windows,
/// `max_k || P int_window A^dagger H_leak A dt ||_F` with `P` keeping the
/// computational rows.
pub fn leakage_defect<M: Model + ?Sized>(a: &CMatrix, m: &M, off: &OffsetSet, n_seg: usize) -> Result<f64> {
    let comp = m.basis().indices_of(&m.computational_labels())?;
    Ok(magnus_integrals(m, off, a, n_seg)?
        .iter()
        .map(|x| comp.iter().map(|&i| x.row(i).norm_squared()).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

/// The reference closed form for the rotated Hamiltonian at `Delta = phi = 0`,
/// evaluated literally:
/// `(Omega dy / 2) [-2 |0><0| - 2 |1><1| + (2 + sqrt 2) |2><2|] + alpha |2><2|
///  + (sqrt(1 + dz^2) Omega / 2) (|0><1| e^{-i theta} + sqrt 2 |1><2| e^{-i theta} + h.c.)
///  + (sqrt 2 alpha Omega / 2) [(i dx - dy) |1><2| + h.c.]`, `theta = arccos(1/sqrt(1 + dz^2))`.
///
/// `Omega` is twice the model's 0-1 matrix element and `alpha` its level-2
/// energy, so that the form reduces to the model's Hamiltonian at zero `d`.
pub fn reference_h1(m: &SingleQubitModel, dx: f64, dy: f64, dz: f64, t: f64) -> Operator {
    let h0 = m.matrix(&OffsetSet::ZERO, t, false);
    let om = 2.0 * h0[(0, 1)].norm();
    let alpha = h0[(2, 2)].re;
    let r = (1.0 + dz * dz).sqrt();
    let theta = (1.0 / r).acos();
    let mut h = CMatrix::zeros(3, 3);
    h[(0, 0)] = (-om * dy).into();
    h[(1, 1)] = (-om * dy).into();
    h[(2, 2)] = (0.5 * om * dy * (2.0 + SQRT_2) + alpha).into();
    let c = Complex64::from_polar(0.5 * r * om, -theta);
    let leak = Complex64::new(-dy, dx) * (SQRT_2 * alpha * om / 2.0);
    h[(0, 1)] = c;
    h[(1, 2)] = c * SQRT_2 + leak;
    h[(1, 0)] = h[(0, 1)].conj();
    h[(2, 1)] = h[(1, 2)].conj();
    Operator::new(Basis::levels(3), h).expect("3x3")
}
