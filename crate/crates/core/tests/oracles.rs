use std::f64::consts::{FRAC_PI_2, PI};

use leakctl_core::framework_checks::{error_propagator, magnus_residual, subspace_error};
use leakctl_core::metrics::{averaged_fidelity_2q, computational_block, populations, trace_gate_fidelity};
use leakctl_core::mhz;
use leakctl_core::models::{
    bessel_j1, leak_matrix, leakage_defect, offsets_from_rotation, reference_h1, rotated_h1, Convention, Driven,
    GateKind, LadderModel, Model, OffsetSet, SingleQubitModel, TransmonParams, TwoQubitModel,
};
use leakctl_core::operators::{Basis, CMatrix, DensityMatrix, StateVector};
use leakctl_core::propagation::{
    lindblad_evolve, propagate_state, propagate_unitary, Channel, Decoherence, Dissipator, IntegratorConfig,
};
use leakctl_core::tuneup::sweep_fit;
use leakctl_core::tuneup::{
    drag_compare, nelder_mead, robustness_grid, sweep, NelderMeadOptions, Objective, RobustnessSpec, Scenario,
    SeedGrid, SweepAxis, SweepParam, SweepSpec,
};
use num_complex::Complex64;

fn not_optimum() -> OffsetSet {
    OffsetSet::new(0.0031, mhz(-1.556), 0.0)
}

fn not_model() -> SingleQubitModel {
    SingleQubitModel::not_gate(TransmonParams::default(), Convention::Transmon)
}

/// Constant leak term on top of a zero Hamiltonian.
struct ConstantLeak {
    leak: CMatrix,
    tau: f64,
}

impl Model for ConstantLeak {
    fn basis(&self) -> Basis {
        Basis::levels(3)
    }
    fn duration(&self) -> f64 {
        self.tau
    }
    fn matrix(&self, _: &OffsetSet, _: f64, include_leak: bool) -> CMatrix {
        if include_leak {
            self.leak.clone()
        } else {
            CMatrix::zeros(3, 3)
        }
    }
    fn computational_labels(&self) -> Vec<String> {
        vec!["0".into(), "1".into()]
    }
    fn frequency_scale(&self) -> f64 {
        self.leak.norm()
    }
    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        (vec![], vec![])
    }
}

#[test]
fn resonant_quarter_area_pulse_is_sigma_x() {
    let m = SingleQubitModel::not_gate(TransmonParams::default(), Convention::Reference);
    let u = propagate_unitary(&Driven::new(&m, OffsetSet::ZERO, false), m.duration(), &IntegratorConfig::default())
        .unwrap();
    let f = trace_gate_fidelity(&u.final_state, &GateKind::Not.target(), &["0", "1"]).unwrap();
    assert!(f > 1.0 - 1e-9, "fidelity {f}");
}

#[test]
fn closed_system_lindblad_matches_unitary_conjugation() {
    let m = not_model();
    let off = not_optimum();
    let h = Driven::new(&m, off, true);
    let cfg = IntegratorConfig::with_steps(4000);
    let psi = StateVector::new(
        Basis::levels(3),
        vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Complex64::from(0.0)].into(),
    )
    .unwrap();
    let rho = lindblad_evolve(&h, &psi.to_density(), &Dissipator::none(3), m.duration(), &cfg).unwrap().final_state;
    let u = propagate_unitary(&h, m.duration(), &cfg).unwrap().final_state;
    let expect = u.entries() * psi.to_density().entries() * u.entries().adjoint();
    let d = (rho.entries() - expect).norm();
    assert!(d < 1e-7, "difference {d:e}");
}

#[test]
fn modulated_exchange_averages_to_bessel_coupling() {
    let m = TwoQubitModel::default();
    let period = 2.0 * PI / m.nu1;
    let n = 20000;
    let mut acc = Complex64::from(0.0);
    for k in 0..n {
        let t = (k as f64 + 0.5) * period / n as f64;
        let h = m.matrix(&OffsetSet::ZERO, t, false);
        assert!((h[(1, 2)].norm() - m.g12).abs() < 1e-6 * m.g12);
        acc += h[(1, 2)];
    }
    let avg = acc.norm() / n as f64;
    let want = bessel_j1(1.2) * m.g12;
    assert!((bessel_j1(1.2) - 0.4983).abs() < 1e-4);
    assert!((avg - want).abs() < 1e-3 * want, "average {avg}, expected {want}");
}

#[test]
fn bright_state_coupling_follows_envelope() {
    let m = LadderModel::default();
    for k in 1..20 {
        let t = k as f64 / 20.0 * m.duration();
        let h = m.matrix(&OffsetSet::ZERO, t, false);
        let d = m.dark_state(&OffsetSet::ZERO, t);
        let bright = [-d[2].conj(), Complex64::from(0.0), d[0].conj(), Complex64::from(0.0)];
        let coupling: Complex64 = (0..4).map(|i| bright[i].conj() * h[(i, 1)]).sum();
        let om = m.envelope(&OffsetSet::ZERO, t);
        assert!((coupling.norm() - om).abs() < 1e-9 * m.omega_m);
    }
}

#[test]
fn stirap_populations_pass_through_the_intermediate_level() {
    let s = Scenario::stirap(LadderModel::default());
    let m = LadderModel::default();
    let psi0 = StateVector::basis_state(m.basis(), "0").unwrap();
    let cfg = IntegratorConfig::default().sampled(50);
    let res = propagate_state(&Driven::new(&m, OffsetSet::ZERO, false), &psi0, m.duration(), &cfg).unwrap();
    let labels = m.computational_labels();
    let p1 = |psi: &StateVector| populations(psi, &labels).unwrap()[1].1;
    let mid = res.samples.iter().map(|(_, p)| p1(p)).fold(0.0, f64::max);
    assert!(mid > 0.1, "peak intermediate population {mid}");
    assert!(p1(&res.final_state) < 1e-3);
    let f = s.evaluate(&OffsetSet::ZERO, Objective::LeakFree).unwrap();
    assert!(f > 1.0 - 1e-9, "leak-free transfer {f}");
}

#[test]
fn uncorrected_fidelities_match_reference_values() {
    let not = Scenario::not_gate();
    let f = Scenario::hadamard().evaluate(&OffsetSet::ZERO, Objective::Decoherent).unwrap();
    assert!((f - 0.9946).abs() < 1e-3, "Hadamard decoherent {f}");
    let f = Scenario::stirap(LadderModel::default()).evaluate(&OffsetSet::ZERO, Objective::Trace).unwrap();
    assert!((f - 0.9988).abs() < 1e-3, "STIRAP {f}");
    let f = not.evaluate(&not_optimum(), Objective::Decoherent).unwrap();
    assert!((f - 0.9998).abs() < 5e-4, "NOT decoherent at optimum {f}");
}

#[test]
fn uncorrected_not_trace_fidelity_matches_reference() {
    let f = Scenario::not_gate().evaluate(&OffsetSet::ZERO, Objective::Trace).unwrap();
    assert!((f - 0.9963).abs() < 1e-3, "NOT trace {f}");
}

#[test]
fn iswap_decoherent_average_is_grid_converged() {
    let s = Scenario::iswap(TwoQubitModel::default()).unwrap();
    let m = TwoQubitModel::default();
    let comp = m.basis().indices_of(&m.computational_labels()).unwrap();
    let (decay, dephase) = m.collapse_operators();
    let diss = Dissipator::new(&decay, &dephase, &Decoherence::default());
    let ch =
        Channel::lindblad(&Driven::new(&m, OffsetSet::ZERO, true), &diss, &comp, m.duration(), &s.integrator).unwrap();
    let u0 = TwoQubitModel::target();
    let f33 = averaged_fidelity_2q(&ch, &u0, 33).unwrap();
    let f65 = averaged_fidelity_2q(&ch, &u0, 65).unwrap();
    assert!((f33 - 0.9974).abs() < 1e-3, "iSWAP decoherent {f33}");
    assert!((f33 - f65).abs() < 1e-5, "grid 33 vs 65: {f33} {f65}");
}

#[test]
fn offsets_reduce_final_leakage() {
    let s = Scenario::not_gate();
    let before = s.report(&OffsetSet::ZERO, Objective::Trace).unwrap().leakage_pop;
    let after = s.report(&not_optimum(), Objective::Trace).unwrap().leakage_pop;
    assert!(after < before, "leakage {before} -> {after}");
}

#[test]
fn joint_detuning_phase_sweep_beats_single_axes() {
    let s = Scenario::hadamard();
    let det = SweepAxis::symmetric(SweepParam::Det, mhz(5.0), 21);
    let phase = SweepAxis::symmetric(SweepParam::Phase, 0.03 * PI, 21);
    let best = |spec: SweepSpec| {
        sweep(&s, &spec, Objective::Trace).unwrap().iter().filter_map(|r| r.fidelity).fold(0.0, f64::max)
    };
    let both = best(SweepSpec::two(det, phase));
    let d = best(SweepSpec::one(det));
    let p = best(SweepSpec::one(phase));
    assert!(both > d && both > p, "2D {both}, det {d}, phase {p}");
}

#[test]
fn not_phase_sweep_is_concave_with_vertex_near_zero() {
    let axis = SweepAxis::symmetric(SweepParam::Phase, 0.15 * PI, 41);
    let (rows, fit) = sweep_fit(&Scenario::not_gate(), axis, Objective::Averaged).unwrap();
    assert_eq!(rows.len(), 41);
    assert!(fit.a < 0.0, "a = {}", fit.a);
    assert!(fit.b.abs() < 0.01, "b = {}", fit.b);
    assert!(fit.vertex().abs() < 0.02 * PI, "vertex = {}", fit.vertex());
}

#[test]
fn robustness_grid_centre_is_the_tuned_fidelity() {
    let s = Scenario::not_gate();
    let cells = robustness_grid(&s, &not_optimum(), &RobustnessSpec::single_qubit(3), Objective::Decoherent).unwrap();
    assert_eq!(cells.len(), 27);
    let f0 = s.evaluate(&not_optimum(), Objective::Decoherent).unwrap();
    for c in cells.iter().filter(|c| c.errors == OffsetSet::ZERO) {
        assert_eq!(c.fidelity, f0);
    }
}

#[test]
fn drag_and_offsets_agree_at_large_anharmonicity() {
    let p = TransmonParams { alpha: 100.0 * mhz(220.0), ..TransmonParams::default() };
    let s =
        Scenario::single(GateKind::Not, p, Convention::Transmon).with_integrator(IntegratorConfig::with_steps(20000));
    let r = drag_compare(GateKind::Not, p, &s, SeedGrid(3), &NelderMeadOptions::default()).unwrap();
    let v = [r.f_uncorrected, r.f_drag, r.f_sso];
    let spread = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 5e-4, "{v:?}");
}

#[test]
fn error_propagator_improves_at_tuned_offsets() {
    let m = not_model();
    let cfg = IntegratorConfig::default();
    let at = |off: OffsetSet| {
        let u = error_propagator(&m, &off, &cfg).unwrap();
        let e = u.entries();
        assert!((e.adjoint() * e - CMatrix::identity(3, 3)).norm() < 1e-8);
        subspace_error(&m, &u).unwrap()
    };
    let (before, after) = (at(OffsetSet::ZERO), at(not_optimum()));
    assert!(after < before, "{before} -> {after}");
}

#[test]
fn magnus_residual_of_constant_leak_is_exact() {
    let mut leak = CMatrix::zeros(3, 3);
    leak[(1, 2)] = Complex64::new(3.0e8, 1.0e8);
    leak[(2, 1)] = leak[(1, 2)].conj();
    let m = ConstantLeak { leak: leak.clone(), tau: 20e-9 };
    let r = magnus_residual(&m, &OffsetSet::ZERO, &CMatrix::identity(3, 3), 4).unwrap();
    for v in &r.residuals {
        assert!((v - 5e-9 * leak.norm()).abs() < 1e-12 * v);
    }
}

#[test]
fn magnus_residual_is_linear_in_leak_strength() {
    let p = TransmonParams::default();
    let half = TransmonParams { lambda: 0.5 * p.lambda, ..p };
    let a = CMatrix::identity(3, 3);
    let full = magnus_residual(&SingleQubitModel::not_gate(p, Convention::Transmon), &OffsetSet::ZERO, &a, 8).unwrap();
    let halved =
        magnus_residual(&SingleQubitModel::not_gate(half, Convention::Transmon), &OffsetSet::ZERO, &a, 8).unwrap();
    for (f, h) in full.residuals.iter().zip(&halved.residuals) {
        assert!((h - 0.5 * f).abs() < 1e-12 * f);
    }
    let zero = TransmonParams { lambda: 0.0, ..p };
    let d = leakage_defect(&a, &SingleQubitModel::not_gate(zero, Convention::Transmon), &OffsetSet::ZERO, 4).unwrap();
    assert_eq!(d, 0.0);
}

#[test]
fn leakage_defect_matches_direct_quadrature() {
    let m = not_model();
    let n = 40000;
    let dt = m.duration() / n as f64;
    let mut acc = CMatrix::zeros(3, 3);
    for k in 0..n {
        acc += leak_matrix(&m, &OffsetSet::ZERO, (k as f64 + 0.5) * dt) * Complex64::from(dt);
    }
    let want = (acc.row(0).norm_squared() + acc.row(1).norm_squared()).sqrt();
    let got = leakage_defect(&CMatrix::identity(3, 3), &m, &OffsetSet::ZERO, 1).unwrap();
    assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
}

#[test]
fn tuned_frame_does_not_increase_leakage_defect() {
    let m = not_model();
    let scale = 0.3;
    let defect = |u: &[f64]| {
        let a = leakctl_core::models::transform_a1(scale * u[0], scale * u[1], scale * u[2], m.params.lambda);
        leakage_defect(a.entries(), &m, &OffsetSet::ZERO, 4)
    };
    let at_identity = defect(&[0.0, 0.0, 0.0]).unwrap();
    let (_, best, _) = nelder_mead(defect, &[0.0, 0.0, 0.0], 0.2, &NelderMeadOptions::default()).unwrap();
    assert!(best <= at_identity);
}

#[test]
fn rotation_at_zero_is_the_model_hamiltonian() {
    for conv in [Convention::Transmon, Convention::Reference] {
        let m = SingleQubitModel::not_gate(TransmonParams::default(), conv);
        let t = 0.37 * m.duration();
        let h = m.matrix(&OffsetSet::ZERO, t, true);
        assert_eq!(rotated_h1(&m, 0.0, 0.0, 0.0, t).entries(), &h);
        assert!((reference_h1(&m, 0.0, 0.0, 0.0, t).entries() - &h).norm() < 1e-9 * h.norm());
    }
}

/// The reference rotated form against the numeric rotation over `|d| <= 0.05`.
#[test]
fn reference_rotated_form_matches_numeric_rotation() {
    let m = not_model();
    let t = 0.5 * m.duration();
    let norm = m.matrix(&OffsetSet::ZERO, t, true).norm();
    let mut worst = 0.0f64;
    for d in [-0.05, -0.02, 0.02, 0.05] {
        for (dx, dy, dz) in [(d, 0.0, 0.0), (0.0, d, 0.0), (0.0, 0.0, d), (d, d, d)] {
            let gap = (rotated_h1(&m, dx, dy, dz, t).entries() - reference_h1(&m, dx, dy, dz, t).entries()).norm();
            worst = worst.max(gap / norm);
        }
    }
    assert!(worst < 1e-3, "relative gap {worst:.3e}");
}

/// The reference NOT offsets mapped back to a rotation through the
/// amplitude relation.
#[test]
fn tuned_rotation_weakens_leak_coupling() {
    let m = not_model();
    let r = 1.0 + 0.003;
    let dz = (r * r - 1.0f64).sqrt();
    assert!((offsets_from_rotation(dz, 0.0).amp - 0.003).abs() < 1e-12);
    let t = 0.5 * m.duration();
    let at0 = rotated_h1(&m, 0.0, 0.0, 0.0, t).entries()[(1, 2)].norm();
    let at = rotated_h1(&m, 0.0, 0.0, dz, t).entries()[(1, 2)].norm();
    assert!(at < at0 * (1.0 - 1e-9), "|H12| {at0:.12e} -> {at:.12e}");
}

#[test]
fn dark_state_at_quarter_mixing_has_equal_weights() {
    let m = LadderModel { theta: FRAC_PI_2, ..LadderModel::default() };
    let d = m.dark_state(&OffsetSet::ZERO, 0.3 * m.duration());
    assert!((d[0].norm() - d[2].norm()).abs() < 1e-12);
    let rho = DensityMatrix::new(m.basis(), CMatrix::from_fn(4, 4, |i, j| d[i] * d[j].conj())).unwrap();
    assert!((rho.entries()[(1, 1)].norm()) < 1e-15);
    let _ = computational_block(rho.entries(), &[0, 2]);
}
