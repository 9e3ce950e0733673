use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ladder_operators, Convention, Model, OffsetSet};
use crate::error::Result;
use crate::mhz;
use crate::operators::{Basis, CMatrix, Operator, ONE, ZERO};
use crate::pulses::{gtc_schedule, Controls, DetuningLaw, DragFields, GtcParams, PhaseLaw, PulseSchedule, Segment};

/// Transmon drive parameters shared by the single-qubit gates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    /// Peak Rabi amplitude, rad/s.
    pub omega_m: f64,
    /// Anharmonicity, rad/s, positive.
    pub alpha: f64,
    /// Relative strength of the 1-2 transition.
    pub lambda: f64,
}

impl Default for TransmonParams {
    fn default() -> Self {
        TransmonParams { omega_m: mhz(30.0), alpha: mhz(220.0), lambda: SQRT_2 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HadamardConstruction {
    /// `R_y(pi/2)` followed by `R_x(pi)`, two resonant sine pulses.
    #[default]
    Composite,
    /// One sine pulse with detuning proportional to the envelope so that the
    /// rotation axis is `(x + z)/sqrt 2`.
    DetunedPulse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Not,
    Hadamard,
}

impl GateKind {
    /// Target unitary on the computational subspace.
    pub fn target(self) -> CMatrix {
        match self {
            GateKind::Not => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            GateKind::Hadamard => {
                let h = Complex64::from(FRAC_1_SQRT_2);
                CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
            }
        }
    }
}

/// Three-level driven transmon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitModel {
    pub params: TransmonParams,
    /// Static detuning added to the schedule's detuning law, rad/s.
    pub delta: f64,
    /// Static phase added to the schedule's phase law, rad.
    pub phi: f64,
    pub convention: Convention,
    pub schedule: PulseSchedule,
}

impl SingleQubitModel {
    pub fn new(params: TransmonParams, convention: Convention, schedule: PulseSchedule) -> Self {
        SingleQubitModel { params, delta: 0.0, phi: 0.0, convention, schedule }
    }

    /// Resonant sine pulse rotating by pi about x.
    pub fn not_gate(params: TransmonParams, convention: Convention) -> Self {
        let seg = Segment::sine_with_area(params.omega_m, convention.rotation_area(PI));
        Self::new(params, convention, PulseSchedule::single(seg))
    }

    pub fn hadamard(params: TransmonParams, convention: Convention, construction: HadamardConstruction) -> Self {
        let om = params.omega_m;
        let schedule = match construction {
            HadamardConstruction::Composite => PulseSchedule::new(vec![
                Segment::sine_with_area(om, convention.rotation_area(FRAC_PI_2))
                    .with_phase(PhaseLaw::Constant { value: convention.axis_phase(FRAC_PI_2) }),
                Segment::sine_with_area(om, convention.rotation_area(PI)),
            ]),
            HadamardConstruction::DetunedPulse => {
                // Equal transverse and longitudinal Bloch fields, so the
                // effective rate is sqrt 2 times the resonant one.
                let ratio = -2.0 * convention.coupling_scale();
                let area = convention.rotation_area(PI) / SQRT_2;
                PulseSchedule::single(
                    Segment::sine_with_area(om, area).with_detuning(DetuningLaw::Proportional { ratio }),
                )
            }
        };
        Self::new(params, convention, schedule)
    }

    pub fn gate(kind: GateKind, params: TransmonParams, convention: Convention) -> Self {
        match kind {
            GateKind::Not => Self::not_gate(params, convention),
            GateKind::Hadamard => Self::hadamard(params, convention, HadamardConstruction::Composite),
        }
    }

    /// Five-segment geometric trajectory. Its phase and detuning laws are
    /// written for the transmon normalisation, which is therefore forced.
    pub fn gtc(params: TransmonParams, gtc: &GtcParams) -> Result<Self> {
        Ok(Self::new(params, Convention::Transmon, gtc_schedule(gtc, params.omega_m)?))
    }

    /// Controls at `t` with offsets and the static detuning and phase.
    pub fn controls(&self, off: &OffsetSet, t: f64) -> Controls {
        let mut c = self.schedule.controls_with(t, off);
        c.detuning += self.delta;
        c.phase += self.phi;
        c
    }
}

/// Three-level Hamiltonian for instantaneous controls.
pub fn single_qubit_matrix(
    convention: Convention,
    c: Controls,
    alpha: f64,
    lambda: f64,
    include_leak: bool,
) -> CMatrix {
    match convention {
        Convention::Reference => {
            let mut h = CMatrix::zeros(3, 3);
            let d = c.detuning;
            h[(0, 0)] = (-0.5 * d).into();
            h[(1, 1)] = (0.5 * d).into();
            h[(2, 2)] = (1.5 * d + alpha).into();
            let w = Complex64::from_polar(c.omega, c.phase);
            h[(0, 1)] = w;
            h[(1, 0)] = w.conj();
            if include_leak {
                h[(1, 2)] = w * lambda;
                h[(2, 1)] = (w * lambda).conj();
            }
            h
        }
        Convention::Transmon => {
            let b = [c.omega * c.phase.cos(), c.omega * c.phase.sin(), -c.detuning];
            transmon_b_matrix(b, alpha, lambda, include_leak)
        }
    }
}

/// `(1/2) B.S - alpha |2><2|` with `S_z = diag(1, -1, -3)` and the 1-2
/// matrix elements of `S_x`, `S_y` scaled by `lambda`.
pub fn transmon_b_matrix(b: [f64; 3], alpha: f64, lambda: f64, include_leak: bool) -> CMatrix {
    let mut h = CMatrix::zeros(3, 3);
    h[(0, 0)] = (0.5 * b[2]).into();
    h[(1, 1)] = (-0.5 * b[2]).into();
    h[(2, 2)] = (-1.5 * b[2] - alpha).into();
    let w = Complex64::new(0.5 * b[0], -0.5 * b[1]);
    h[(0, 1)] = w;
    h[(1, 0)] = w.conj();
    if include_leak {
        h[(1, 2)] = w * lambda;
        h[(2, 1)] = (w * lambda).conj();
    }
    h
}

/// Single-qubit Hamiltonian with offsets at time `t`.
pub fn h_single(m: &SingleQubitModel, off: &OffsetSet, t: f64, include_leak: bool) -> Operator {
    m.operator(off, t, include_leak)
}

impl Model for SingleQubitModel {
    fn basis(&self) -> Basis {
        Basis::levels(3)
    }

    fn duration(&self) -> f64 {
        self.schedule.total_time()
    }

    fn matrix(&self, off: &OffsetSet, t: f64, include_leak: bool) -> CMatrix {
        single_qubit_matrix(self.convention, self.controls(off, t), self.params.alpha, self.params.lambda, include_leak)
    }

    fn computational_labels(&self) -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    fn frequency_scale(&self) -> f64 {
        let detuning_peak = self
            .schedule
            .segments
            .iter()
            .map(|s| match s.detuning {
                DetuningLaw::Constant { value } => value.abs(),
                DetuningLaw::Proportional { ratio } => ratio.abs() * self.params.omega_m,
            })
            .fold(0.0, f64::max);
        self.params.alpha.abs()
            + self.params.omega_m * (1.0 + self.params.lambda)
            + 1.5 * (detuning_peak + self.delta.abs())
    }

    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let (x1, xp) = ladder_operators(3);
        (vec![x1], vec![xp])
    }
}

/// Single-qubit model driven by `B0 + B_d` instead of `B0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DragModel {
    pub base: SingleQubitModel,
}

impl DragModel {
    pub fn new(base: SingleQubitModel) -> Result<Self> {
        DragFields::new(base.schedule.clone(), base.params.alpha, OffsetSet::ZERO)?;
        Ok(DragModel { base })
    }

    pub fn fields(&self, off: &OffsetSet) -> DragFields {
        DragFields::new(self.base.schedule.clone(), self.base.params.alpha, *off)
            .expect("anharmonicity checked on construction")
    }
}

impl Model for DragModel {
    fn basis(&self) -> Basis {
        Basis::levels(3)
    }

    fn duration(&self) -> f64 {
        self.base.duration()
    }

    fn matrix(&self, off: &OffsetSet, t: f64, include_leak: bool) -> CMatrix {
        let b = self.fields(off).b(t);
        transmon_b_matrix(b, self.base.params.alpha, self.base.params.lambda, include_leak)
    }

    fn computational_labels(&self) -> Vec<String> {
        self.base.computational_labels()
    }

    fn frequency_scale(&self) -> f64 {
        self.base.frequency_scale() * 1.5
    }

    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        self.base.collapse_operators()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::hermiticity_defect;

    #[test]
    fn reference_entries_at_peak() {
        let p = TransmonParams::default();
        let m = SingleQubitModel::not_gate(p, Convention::Reference);
        let t = m.duration() / 2.0;
        let h = m.matrix(&OffsetSet::ZERO, t, true);
        assert!((h[(0, 1)] - Complex64::from(p.omega_m)).norm() < 1e-6 * p.omega_m);
        assert!((h[(1, 2)] - Complex64::from(SQRT_2 * p.omega_m)).norm() < 1e-6 * p.omega_m);
    }

    #[test]
    fn leak_off_isolates_level_two() {
        for conv in [Convention::Reference, Convention::Transmon] {
            let m = SingleQubitModel::not_gate(TransmonParams::default(), conv);
            let h = m.matrix(&OffsetSet::ZERO, m.duration() / 3.0, false);
            assert_eq!(h[(1, 2)], ZERO);
            assert_eq!(h[(0, 2)], ZERO);
            assert!((h[(2, 2)].re.abs() - m.params.alpha).abs() < 1e-3);
        }
    }

    #[test]
    fn durations() {
        let p = TransmonParams::default();
        let reference = SingleQubitModel::not_gate(p, Convention::Reference).duration();
        assert!((reference - 13.09e-9).abs() < 0.005e-9);
        let transmon = SingleQubitModel::not_gate(p, Convention::Transmon).duration();
        assert!((transmon - 2.0 * reference).abs() < 1e-15);
    }

    #[test]
    fn transmon_form_matches_b_vector() {
        let c = Controls { omega: 1.3, phase: 0.4, detuning: -0.2 };
        let h = single_qubit_matrix(Convention::Transmon, c, 5.0, SQRT_2, true);
        assert!((h[(0, 1)] - Complex64::from_polar(0.65, -0.4)).norm() < 1e-15);
        assert!((h[(2, 2)].re - (1.5 * -0.2 - 5.0)).abs() < 1e-15);
        assert!(hermiticity_defect(&h) < 1e-15);
    }
}
