use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ladder_operators, Convention, Model, OffsetSet};
use crate::mhz;
use crate::operators::{Basis, CMatrix, Operator};
use crate::pulses::sine_duration_for_area;

/// Four-level ladder driven by two pulses `D_a` (0-1) and `D_b` (1-2) with a
/// shared sine envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderModel {
    pub omega_m: f64,
    pub tau: f64,
    pub alpha: f64,
    pub delta01: f64,
    pub delta12: f64,
    pub phi01: f64,
    pub phi12: f64,
    pub theta: f64,
    pub convention: Convention,
}

impl LadderModel {
    /// Transfer `|0> -> |2>` with constant `theta = pi/2`, `phi01 = 0`,
    /// `phi12 = pi`, resonant drives and a cyclic bright-state area of pi.
    pub fn transfer(omega_m: f64, alpha: f64, convention: Convention) -> Self {
        let area = PI / convention.coupling_scale();
        LadderModel {
            omega_m,
            tau: sine_duration_for_area(omega_m, area),
            alpha,
            delta01: 0.0,
            delta12: 0.0,
            phi01: 0.0,
            phi12: PI,
            theta: FRAC_PI_2,
            convention,
        }
    }

    /// Envelope `Omega(t)` including the amplitude offset and normalisation.
    pub fn envelope(&self, off: &OffsetSet, t: f64) -> f64 {
        self.convention.coupling_scale() * (1.0 + off.amp) * self.omega_m * (PI * t / self.tau).sin()
    }

    /// `(Omega_01, Omega_12)` at `t`.
    pub fn drives(&self, off: &OffsetSet, t: f64) -> (f64, f64) {
        let om = self.envelope(off, t);
        (om * (0.5 * self.theta).sin(), om * (0.5 * self.theta).cos())
    }

    /// Normalised state annihilated by the leak-free Hamiltonian at `t`,
    /// proportional to `Omega_12 |0> - Omega_01 e^{-i(p01 - d01 t + p12 - d12 t)} |2>`.
    /// Falls back to `|0>` when both drives vanish.
    pub fn dark_state(&self, off: &OffsetSet, t: f64) -> Vec<Complex64> {
        let (o01, o12) = self.drives(off, t);
        let (d01, d12) = (self.delta01 + off.det, self.delta12 + off.det);
        let (p01, p12) = (self.phi01 + off.phase, self.phi12 + off.phase);
        let n = o01.hypot(o12);
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        if n == 0.0 {
            v[0] = Complex64::new(1.0, 0.0);
            return v;
        }
        v[0] = Complex64::from(o12 / n);
        v[2] = -Complex64::from_polar(o01 / n, -(p01 - d01 * t + p12 - d12 * t));
        v
    }
}

impl Default for LadderModel {
    fn default() -> Self {
        Self::transfer(mhz(30.0), mhz(220.0), Convention::Transmon)
    }
}

/// Ladder Hamiltonian. Offsets act on both drives alike.
///
/// Under `Reference` the leakage phases are `(Delta - alpha) t` and
/// `(Delta - 2 alpha) t` for both drives. Under `Transmon` each cross term
/// carries the detuning of its own transition from the drive: `D_a` sees
/// 1-2 at `Delta01 - alpha` and 2-3 at `Delta01 - 2 alpha`, while `D_b` sees
/// 0-1 at `Delta12 + alpha` and 2-3 at `Delta12 - alpha`.
pub fn h_ladder(m: &LadderModel, off: &OffsetSet, t: f64, include_leak: bool) -> Operator {
    m.operator(off, t, include_leak)
}

impl Model for LadderModel {
    fn basis(&self) -> Basis {
        Basis::levels(4)
    }

    fn duration(&self) -> f64 {
        self.tau
    }

    fn matrix(&self, off: &OffsetSet, t: f64, include_leak: bool) -> CMatrix {
        let (o01, o12) = self.drives(off, t);
        let (d01, d12) = (self.delta01 + off.det, self.delta12 + off.det);
        let (p01, p12) = (self.phi01 + off.phase, self.phi12 + off.phase);
        let a = self.alpha;
        let term = |amp: f64, phase: f64| Complex64::from_polar(amp, phase);
        let mut upper = [[Complex64::new(0.0, 0.0); 4]; 4];
        upper[0][1] += term(o01, p01 - d01 * t);
        upper[1][2] += term(o12, p12 - d12 * t);
        if include_leak {
            let (b01, b23) = match self.convention {
                Convention::Reference => (d12 - a, d12 - 2.0 * a),
                Convention::Transmon => (d12 + a, d12 - a),
            };
            upper[1][2] += term(SQRT_2 * o01, p01 - (d01 - a) * t);
            upper[2][3] += term(3f64.sqrt() * o01, p01 - (d01 - 2.0 * a) * t);
            upper[0][1] += term(o12 / SQRT_2, p12 - b01 * t);
            upper[2][3] += term(1.5f64.sqrt() * o12, p12 - b23 * t);
        }
        let mut h = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in i + 1..4 {
                h[(i, j)] = upper[i][j];
                h[(j, i)] = upper[i][j].conj();
            }
        }
        h
    }

    fn computational_labels(&self) -> Vec<String> {
        (0..4).map(|k| k.to_string()).collect()
    }

    fn frequency_scale(&self) -> f64 {
        2.0 * self.alpha.abs() + self.delta01.abs().max(self.delta12.abs()) + 3.0 * self.omega_m
    }

    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let (x1, xp) = ladder_operators(4);
        (vec![x1], vec![xp])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::ZERO;

    #[test]
    fn reference_cross_drive_entry() {
        let m = LadderModel { phi12: 0.0, ..LadderModel::transfer(mhz(30.0), mhz(220.0), Convention::Reference) };
        let t = 7e-9;
        let h = m.matrix(&OffsetSet::ZERO, t, true);
        let (o01, o12) = m.drives(&OffsetSet::ZERO, t);
        let expected = Complex64::from(o12) + Complex64::from_polar(SQRT_2 * o01, m.alpha * t);
        assert!((h[(1, 2)] - expected).norm() < 1e-9 * m.omega_m);
        let h0 = m.matrix(&OffsetSet::ZERO, t, false);
        assert_eq!(h0[(2, 3)], ZERO);
    }

    #[test]
    fn reference_duration_has_unit_pi_area() {
        let m = LadderModel::transfer(mhz(30.0), mhz(220.0), Convention::Reference);
        assert!((m.tau - 26.18e-9).abs() < 0.005e-9);
        let t = LadderModel::default();
        assert!((t.tau - 2.0 * m.tau).abs() < 1e-15);
    }
}
