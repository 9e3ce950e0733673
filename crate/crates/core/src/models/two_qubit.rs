use std::f64::consts::{FRAC_PI_2, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ladder_operators, Model, OffsetSet};
use crate::error::{Error, Result};
use crate::mhz;
use crate::operators::{Basis, CMatrix, Operator, I, ONE, ZERO};

/// Working basis of the two-transmon model, first digit for qubit 1.
pub const TWO_QUBIT_LABELS: [&str; 6] = ["00", "01", "10", "02", "11", "20"];

/// Two capacitively coupled transmons, qubit 1 flux-modulated at `nu1` with
/// modulation index `beta1`, in the interaction picture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitModel {
    pub g12: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// `omega_2 - omega_1`.
    pub delta1: f64,
    pub nu1: f64,
    pub beta1: f64,
    pub phi1: f64,
    /// Gate duration.
    pub tau: f64,
}

impl Default for TwoQubitModel {
    /// iSWAP settings: resonant modulation `nu1 = delta1`, `phi1 = 3 pi / 2`.
    fn default() -> Self {
        let (g12, beta1) = (mhz(10.0), 1.2);
        TwoQubitModel {
            g12,
            alpha1: mhz(220.0),
            alpha2: mhz(200.0),
            delta1: mhz(500.0),
            nu1: mhz(500.0),
            beta1,
            phi1: 3.0 * FRAC_PI_2,
            tau: iswap_duration(g12, beta1).expect("positive defaults"),
        }
    }
}

impl TwoQubitModel {
    /// Checks `beta1 > 0` and `|delta1 - nu1| < 0.05 min(nu1, delta1)`.
    pub fn validate(&self) -> Result<()> {
        if !(self.beta1 > 0.0) {
            return Err(Error::Config("modulation index beta1 must be positive".into()));
        }
        if !(self.g12 > 0.0 && self.tau > 0.0) {
            return Err(Error::Config("coupling and duration must be positive".into()));
        }
        let ratio = (self.delta1 - self.nu1).abs() / self.nu1.min(self.delta1);
        if !(ratio < 0.05) {
            return Err(Error::Config(format!(
                "modulation detuning |delta1 - nu1| is {:.3} of min(nu1, delta1); must be below 0.05",
                ratio
            )));
        }
        Ok(())
    }

    /// Modulation amplitude `epsilon_1 = beta1 nu1`.
    pub fn epsilon1(&self) -> f64 {
        self.beta1 * self.nu1
    }

    /// Target iSWAP on `{00, 01, 10, 11}`.
    pub fn target() -> CMatrix {
        CMatrix::from_row_slice(
            4,
            4,
            &[
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ZERO, I, ZERO, //
                ZERO, I, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE,
            ],
        )
    }

    /// Jacobi-Anger effective coupling `J1(beta1) g12`.
    pub fn effective_coupling(&self) -> f64 {
        bessel_j1(self.beta1) * self.g12
    }
}

/// Two-qubit interaction-picture Hamiltonian with the exact modulation phase
/// `exp(i beta1 cos(nu1 t + phi1))`. Offsets map to `g12 (1 + amp)`,
/// `nu1 + det`, `phi1 + phase`.
pub fn h_two(m: &TwoQubitModel, off: &OffsetSet, t: f64, include_leak: bool) -> Operator {
    m.operator(off, t, include_leak)
}

impl Model for TwoQubitModel {
    fn basis(&self) -> Basis {
        Basis::from_labels(&TWO_QUBIT_LABELS)
    }

    fn duration(&self) -> f64 {
        self.tau
    }

    fn matrix(&self, off: &OffsetSet, t: f64, include_leak: bool) -> CMatrix {
        let g = (1.0 + off.amp) * self.g12;
        let nu = self.nu1 + off.det;
        let ph = self.phi1 + off.phase;
        let modulation = Complex64::from_polar(1.0, self.beta1 * (nu * t + ph).cos());
        let mut h = CMatrix::zeros(6, 6);
        let mut put = |i: usize, j: usize, v: Complex64| {
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        };
        put(1, 2, Complex64::from_polar(g, self.delta1 * t) * modulation);
        if include_leak {
            put(3, 4, Complex64::from_polar(SQRT_2 * g, (self.delta1 - self.alpha2) * t) * modulation);
            put(4, 5, Complex64::from_polar(SQRT_2 * g, (self.delta1 + self.alpha1) * t) * modulation);
        }
        h
    }

    fn computational_labels(&self) -> Vec<String> {
        ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect()
    }

    fn frequency_scale(&self) -> f64 {
        self.delta1.abs() + self.alpha1.abs().max(self.alpha2.abs()) + self.beta1 * self.nu1.abs()
    }

    /// Per-transmon operators built on 3x3 and restricted to the working basis.
    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let (x1, xp) = ladder_operators(3);
        let id = CMatrix::identity(3, 3);
        let keep: Vec<usize> = TWO_QUBIT_LABELS
            .iter()
            .map(|l| {
                let b = l.as_bytes();
                3 * (b[0] - b'0') as usize + (b[1] - b'0') as usize
            })
            .collect();
        let restrict = |m: CMatrix| CMatrix::from_fn(6, 6, |i, j| m[(keep[i], keep[j])]);
        (
            vec![restrict(x1.kronecker(&id)), restrict(id.kronecker(&x1))],
            vec![restrict(xp.kronecker(&id)), restrict(id.kronecker(&xp))],
        )
    }
}

/// Bessel function of the first kind, order one, by its power series.
pub fn bessel_j1(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = term;
    for k in 1..200 {
        term *= -h2 / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// iSWAP duration from `J1(beta1) g12 tau = pi / 2`.
pub fn iswap_duration(g12: f64, beta1: f64) -> Result<f64> {
    if !(g12 > 0.0) {
        return Err(Error::Config("coupling must be positive".into()));
    }
    let j1 = bessel_j1(beta1);
    if !(beta1 > 0.0) || j1.abs() < 1e-300 {
        return Err(Error::DivergentDuration(format!("J1({beta1}) vanishes")));
    }
    Ok(FRAC_PI_2 / (j1 * g12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        assert!((bessel_j1(1.2) - 0.498_289_057_567_2).abs() < 1e-12);
        assert!((bessel_j1(0.5) - 0.242_268_457_674_873_9).abs() < 1e-14);
        assert_eq!(bessel_j1(0.0), 0.0);
    }

    #[test]
    fn iswap_duration_examples() {
        let tau = iswap_duration(mhz(10.0), 1.2).unwrap();
        assert!((tau - 50.17e-9).abs() < 0.01e-9);
        let half = iswap_duration(mhz(20.0), 1.2).unwrap();
        assert!((2.0 * half - tau).abs() < 1e-18);
        assert!(matches!(iswap_duration(mhz(10.0), 0.0), Err(Error::DivergentDuration(_))));
    }

    #[test]
    fn ground_state_is_decoupled() {
        let m = TwoQubitModel::default();
        for k in 0..7 {
            let h = m.matrix(&OffsetSet::new(0.01, 1e6, 0.1), k as f64 * 7.3e-9, true);
            assert!((0..6).all(|j| h[(0, j)] == ZERO && h[(j, 0)] == ZERO));
            assert!((h[(1, 2)].norm() - 1.01 * m.g12).abs() < 1e-6 * m.g12);
        }
    }

    #[test]
    fn validation_rejects_off_resonant_modulation() {
        let m = TwoQubitModel { nu1: mhz(400.0), ..TwoQubitModel::default() };
        assert!(m.validate().is_err());
        assert!(TwoQubitModel::default().validate().is_ok());
    }

    #[test]
    fn collapse_embedding_annihilates_ground() {
        let (decay, dephase) = TwoQubitModel::default().collapse_operators();
        for op in decay.iter().chain(dephase.iter()) {
            assert!(op.column(0).iter().all(|z| *z == ZERO));
        }
        // Decay on qubit 1 takes |10> to |00> and |20> to sqrt 2 |10>.
        assert_eq!(decay[0][(0, 2)], ONE);
        assert!((decay[0][(2, 5)].re - SQRT_2).abs() < 1e-15);
    }
}
