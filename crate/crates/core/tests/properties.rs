use std::f64::consts::PI;

use leakctl_core::mhz;
use leakctl_core::models::{
    Convention, CrosstalkModel, Driven, GateKind, LadderModel, Model, OffsetSet, SingleQubitModel, TransmonParams,
    TwoQubitModel,
};
use leakctl_core::operators::{
    hermiticity_defect, unitarity_defect, Basis, CMatrix, CVector, DensityMatrix, StateVector,
};
use leakctl_core::propagation::{
    lindblad_evolve, propagate_unitary, Decoherence, Dissipator, IntegratorConfig, Method,
};
use leakctl_core::pulses::GtcParams;
use leakctl_core::tuneup::{fit_quadratic, quantize_offsets, Objective, Resolution, Scenario, Target, TWO_QUBIT_STEPS};
use num_complex::Complex64;
use proptest::prelude::*;

fn offsets() -> impl Strategy<Value = OffsetSet> {
    (-0.1..0.1f64, -5.0..5.0f64, -0.15..0.15f64).prop_map(|(a, d, p)| OffsetSet::new(a, mhz(d), p * PI))
}

fn gate() -> impl Strategy<Value = GateKind> {
    prop_oneof![Just(GateKind::Not), Just(GateKind::Hadamard)]
}

fn convention() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::Transmon), Just(Convention::Reference)]
}

fn all_models(off_t: f64, zeta: f64) -> Vec<Box<dyn Model>> {
    let p = TransmonParams::default();
    let not = SingleQubitModel::not_gate(p, Convention::Transmon);
    vec![
        Box::new(not.clone()),
        Box::new(SingleQubitModel::gate(GateKind::Hadamard, p, Convention::Reference)),
        Box::new(SingleQubitModel::gtc(p, &GtcParams::hadamard()).unwrap()),
        Box::new(CrosstalkModel::new(not, mhz(zeta), 1)),
        Box::new(TwoQubitModel::default()),
        Box::new(LadderModel { delta01: mhz(off_t), ..LadderModel::default() }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonians_are_hermitian(off in offsets(), s in 0.0..1.0f64, d in -3.0..3.0f64, leak in any::<bool>()) {
        for m in all_models(d, d) {
            let h = m.matrix(&off, s * m.duration(), leak);
            prop_assert!(hermiticity_defect(&h) <= 1e-12 * h.norm().max(1.0));
        }
    }

    #[test]
    fn single_qubit_propagators_are_unitary(off in offsets(), kind in gate(), conv in convention()) {
        let m = SingleQubitModel::gate(kind, TransmonParams::default(), conv);
        let u = propagate_unitary(&Driven::new(&m, off, true), m.duration(), &IntegratorConfig::default()).unwrap();
        prop_assert!(u.diagnostics.unitarity_defect < 1e-10);
        prop_assert!(unitarity_defect(u.final_state.entries()) < 1e-10);
    }

    #[test]
    fn lindblad_preserves_trace_and_positivity(off in offsets(), re in proptest::collection::vec(-1.0..1.0f64, 6)) {
        let m = SingleQubitModel::not_gate(TransmonParams::default(), Convention::Transmon);
        let amps: Vec<Complex64> = re.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        prop_assume!(amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3);
        let psi = StateVector::new(Basis::levels(3), CVector::from_vec(amps)).unwrap();
        let (decay, dephase) = m.collapse_operators();
        let deco = Decoherence::new(mhz(0.2), mhz(0.2));
        let diss = Dissipator::new(&decay, &dephase, &deco);
        let res = lindblad_evolve(&Driven::new(&m, off, true), &psi.to_density(), &diss, m.duration(), &IntegratorConfig::default()).unwrap();
        let rho: &DensityMatrix = &res.final_state;
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(rho.trace().im.abs() < 1e-9);
        prop_assert!(hermiticity_defect(rho.entries()) < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn dark_state_is_annihilated(off in offsets(), s in 0.0..1.0f64, theta in 0.0..PI, p01 in -PI..PI, p12 in -PI..PI, d in -5.0..5.0f64) {
        let m = LadderModel { theta, phi01: p01, phi12: p12, delta01: mhz(d), delta12: mhz(-d), ..LadderModel::default() };
        let t = s * m.duration();
        let h = m.matrix(&off, t, false);
        let v = CVector::from_vec(m.dark_state(&off, t));
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        prop_assert!((h * v).norm() < 1e-10 * m.omega_m);
    }

    #[test]
    fn gtc_phase_round_trip(gamma in -2.0 * PI..2.0 * PI, chi0 in 0.1..1.4f64, chi1 in 0.0..0.6f64, chi3 in 1.7..2.9f64, xi0 in -PI..PI) {
        let p = GtcParams { chi0, xi0, gamma_g: gamma, chi1, chi3 };
        let back = p.gamma_from_xi2(p.xi2().unwrap());
        prop_assert!((back - gamma).abs() < 1e-12 * gamma.abs().max(1.0));
    }

    #[test]
    fn spectator_flip_mirrors_zz_sign(off in offsets(), zeta in -2.0..2.0f64) {
        let base = SingleQubitModel::gate(GateKind::Hadamard, TransmonParams::default(), Convention::Transmon);
        let one = |spec: u8, z: f64| {
            let m: Box<dyn Model> = Box::new(CrosstalkModel::new(base.clone(), mhz(z), spec));
            Scenario::from_models("x", vec![m], Target::Gate(GateKind::Hadamard.target()), 1.0)
                .evaluate(&off, Objective::Trace)
                .unwrap()
        };
        prop_assert!((one(1, zeta) - one(0, -zeta)).abs() < 1e-10);
    }

    #[test]
    fn quantisation_is_idempotent_and_bounded(off in offsets()) {
        let res = Resolution::coarse(1.0 / 30.0);
        let q = quantize_offsets(&off, &res).unwrap();
        prop_assert_eq!(quantize_offsets(&q, &res).unwrap(), q);
        prop_assert!((q.amp - off.amp).abs() <= 0.5 * res.amp + 1e-15);
        prop_assert!((q.det - off.det).abs() <= 0.5 * res.det + 1e-6);
        prop_assert!((q.phase - off.phase).abs() <= 0.5 * res.phase + 1e-15);
    }

    #[test]
    fn quadratic_fit_recovers_exact_parabola(a in -5.0..-0.1f64, b in -0.5..0.5f64, c in 0.9..1.0f64) {
        let xs: Vec<f64> = (0..21).map(|k| -0.1 + 0.01 * k as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|x| a * x * x + b * x + c).collect();
        let fit = fit_quadratic(&xs, &fs, 1.0).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-8 && (fit.b - b).abs() < 1e-8 && (fit.c - c).abs() < 1e-10);
    }
}

/// Offsets near each scenario's optimum, where convergence matters most.
fn near_optimum(name: &str) -> OffsetSet {
    match name {
        "not" => OffsetSet::new(0.0031, mhz(-1.556), 0.0),
        "hadamard" => OffsetSet::new(0.0029, mhz(-1.549), 0.0065 * PI),
        _ => OffsetSet::new(0.0086, mhz(0.483), -0.0242 * PI),
    }
}

fn base_steps(name: &str) -> usize {
    if name == "iswap" {
        TWO_QUBIT_STEPS
    } else {
        2000
    }
}

#[test]
fn step_halving_converges() {
    for name in ["not", "hadamard", "iswap"] {
        let n = base_steps(name);
        let off = near_optimum(name);
        let coarse = Scenario::by_name(name).unwrap().with_integrator(IntegratorConfig::with_steps(n));
        let fine = Scenario::by_name(name).unwrap().with_integrator(IntegratorConfig::with_steps(2 * n));
        let d =
            (coarse.evaluate(&off, Objective::Trace).unwrap() - fine.evaluate(&off, Objective::Trace).unwrap()).abs();
        assert!(d < 1e-6, "{name}: step halving changed the fidelity by {d:e}");
    }
}

#[test]
fn integrators_agree() {
    for name in ["not", "hadamard", "iswap"] {
        let n = base_steps(name);
        let off = near_optimum(name);
        let pe = Scenario::by_name(name).unwrap().with_integrator(IntegratorConfig::with_steps(n));
        let rk = Scenario::by_name(name).unwrap().with_integrator(IntegratorConfig::with_steps(n).method(Method::Rk4));
        let d = (pe.evaluate(&off, Objective::Trace).unwrap() - rk.evaluate(&off, Objective::Trace).unwrap()).abs();
        assert!(d < 1e-6, "{name}: integrators differ by {d:e}");
    }
}

#[test]
fn decoherent_fidelity_converges_in_steps() {
    let off = near_optimum("not");
    let a = Scenario::not_gate().with_integrator(IntegratorConfig::with_steps(2000));
    let b = Scenario::not_gate().with_integrator(IntegratorConfig::with_steps(4000));
    let d = (a.evaluate(&off, Objective::Decoherent).unwrap() - b.evaluate(&off, Objective::Decoherent).unwrap()).abs();
    assert!(d < 1e-6, "Lindblad step halving changed the fidelity by {d:e}");
}

#[test]
fn identity_hamiltonian_gives_identity_channel() {
    let h = leakctl_core::propagation::FnHamiltonian::new(Basis::levels(3), |_| CMatrix::zeros(3, 3));
    let u = propagate_unitary(&h, 1e-8, &IntegratorConfig::default()).unwrap();
    assert!((u.final_state.entries() - CMatrix::identity(3, 3)).norm() < 1e-14);
}
