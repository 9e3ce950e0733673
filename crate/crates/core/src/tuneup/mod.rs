//! Offset sweeps, quadratic fits, offset optimisation and tolerance studies.
//!
//! Everything is driven through a [`Scenario`], which bundles one or more
//! models (several when a spectator state is averaged over), the target and
//! the integrator settings, and maps an [`OffsetSet`] to a fidelity.

mod optimize;
mod studies;
mod sweep;

pub use optimize::{nelder_mead, optimize_offsets, Bounds, NelderMeadOptions, OptimizeResult, SeedGrid};
pub use studies::{
    drag_compare, gtc_crosstalk_study, quantize_offsets, robustness_grid, CrosstalkRow, CrosstalkStudy, DragComparison,
    Resolution, RobustnessCell, RobustnessSpec,
};
pub use sweep::{fit_quadratic, sweep, sweep_fit, QuadFit, SweepAxis, SweepParam, SweepRow, SweepSpec};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    averaged_fidelity_1q, averaged_fidelity_1q_unitary, averaged_fidelity_2q, computational_block, gate_leakage,
    leakage_population, state_fidelity, trace_gate_fidelity_with, FidelityKind, FidelityReport, PhaseConvention,
};
use crate::models::{
    Convention, CrosstalkModel, Driven, GateKind, HadamardConstruction, LadderModel, Model, OffsetSet,
    SingleQubitModel, TransmonParams, TwoQubitModel,
};
use crate::operators::{Basis, CMatrix, StateVector};
use crate::propagation::{
    lindblad_evolve, propagate_state, propagate_unitary, Channel, Decoherence, Dissipator, IntegratorConfig,
};
use crate::pulses::GtcParams;

/// Quantity a scenario reports for a given set of offsets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Closed system without leakage couplings.
    LeakFree,
    /// Closed system with leakage; trace gate fidelity or state fidelity.
    #[default]
    Trace,
    /// Closed system with leakage; input-averaged fidelity.
    Averaged,
    /// Leakage and decoherence; input-averaged or state fidelity.
    Decoherent,
}

/// What the evolution should achieve.
#[derive(Clone, Debug)]
pub enum Target {
    /// Unitary on the computational subspace.
    Gate(CMatrix),
    /// Transfer from a basis state to a given state.
    State { initial: String, target: Vec<Complex64> },
}

/// A model family plus target and numerical settings.
pub struct Scenario {
    pub name: String,
    /// Results are averaged over these models with equal weight.
    pub models: Vec<Box<dyn Model>>,
    pub target: Target,
    pub integrator: IntegratorConfig,
    pub decoherence: Decoherence,
    /// How the trace overlap becomes a fidelity for `Objective::Trace`.
    pub trace_phase: PhaseConvention,
    /// Trapezoid points for the single-qubit average.
    pub samples_1q: usize,
    /// Grid points per axis for the two-qubit average.
    pub grid_2q: usize,
    /// Units of the offsets in fits and reports: `(1, 2 pi MHz, pi)`.
    pub fit_units: [f64; 3],
    /// Amplitude offset per unit of the physical coupling used for
    /// quantisation: `2 pi MHz / Omega_m` or `2 pi MHz / g12`.
    pub amp_per_mhz: f64,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario").field("name", &self.name).field("models", &self.models.len()).finish()
    }
}

/// Default `(1, 2 pi MHz, pi)` units.
pub const FIT_UNITS: [f64; 3] = [1.0, crate::TAU * 1e6, PI];

/// Step count used for the two-qubit scenario, whose fast `e^{i Delta t}`
/// phases need a finer grid than the default floor.
pub const TWO_QUBIT_STEPS: usize = 6000;

impl Scenario {
    pub fn from_models(name: &str, models: Vec<Box<dyn Model>>, target: Target, amp_per_mhz: f64) -> Self {
        Scenario {
            name: name.to_string(),
            models,
            target,
            integrator: IntegratorConfig::default(),
            decoherence: Decoherence::default(),
            trace_phase: PhaseConvention::default(),
            samples_1q: 1001,
            grid_2q: 33,
            fit_units: FIT_UNITS,
            amp_per_mhz,
        }
    }

    pub fn single(kind: GateKind, params: TransmonParams, convention: Convention) -> Self {
        let m = SingleQubitModel::gate(kind, params, convention);
        let name = match kind {
            GateKind::Not => "not",
            GateKind::Hadamard => "hadamard",
        };
        Self::from_models(name, vec![Box::new(m)], Target::Gate(kind.target()), crate::mhz(1.0) / params.omega_m)
    }

    pub fn not_gate() -> Self {
        Self::single(GateKind::Not, TransmonParams::default(), Convention::default())
    }

    pub fn hadamard() -> Self {
        Self::single(GateKind::Hadamard, TransmonParams::default(), Convention::default())
    }

    /// Single-pulse Hadamard, the comparator for the trajectory scheme.
    pub fn rabi_hadamard(params: TransmonParams, zeta: f64) -> Self {
        let base = SingleQubitModel::hadamard(params, Convention::Transmon, HadamardConstruction::DetunedPulse);
        Self::crosstalk("rabi", base, zeta, crate::mhz(1.0) / params.omega_m)
    }

    /// Single-qubit model on a spectator-coupled space, averaged over the
    /// spectator in `|0>` and `|1>`.
    pub fn crosstalk(name: &str, base: SingleQubitModel, zeta: f64, amp_per_mhz: f64) -> Self {
        let models: Vec<Box<dyn Model>> =
            (0..2).map(|s| Box::new(CrosstalkModel::new(base.clone(), zeta, s)) as Box<dyn Model>).collect();
        Self::from_models(name, models, Target::Gate(GateKind::Hadamard.target()), amp_per_mhz)
    }

    /// Geometric trajectory Hadamard with ZZ coupling to a spectator.
    pub fn gtc(params: TransmonParams, gtc: &GtcParams, zeta: f64) -> Result<Self> {
        let base = SingleQubitModel::gtc(params, gtc)?;
        Ok(Self::crosstalk("gtc", base, zeta, crate::mhz(1.0) / params.omega_m))
    }

    pub fn iswap(model: TwoQubitModel) -> Result<Self> {
        model.validate()?;
        let amp = crate::mhz(1.0) / model.g12;
        let mut s = Self::from_models("iswap", vec![Box::new(model)], Target::Gate(TwoQubitModel::target()), amp);
        s.integrator = IntegratorConfig::with_steps(TWO_QUBIT_STEPS);
        Ok(s)
    }

    /// `|0> -> |2>` transfer on the four-level ladder.
    pub fn stirap(model: LadderModel) -> Self {
        let mut target = vec![Complex64::from(0.0); 4];
        target[2] = Complex64::from(1.0);
        let amp = crate::mhz(1.0) / model.omega_m;
        Self::from_models("stirap", vec![Box::new(model)], Target::State { initial: "0".into(), target }, amp)
    }

    /// Scenario by name with default parameters.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "not" => Ok(Self::not_gate()),
            "hadamard" => Ok(Self::hadamard()),
            "iswap" => Self::iswap(TwoQubitModel::default()),
            "stirap" => Ok(Self::stirap(LadderModel::default())),
            "gtc" => Self::gtc(TransmonParams::default(), &GtcParams::hadamard(), 0.0),
            "rabi" => Ok(Self::rabi_hadamard(TransmonParams::default(), 0.0)),
            other => Err(Error::Config(format!("unknown scenario `{other}`"))),
        }
    }

    pub fn with_integrator(mut self, cfg: IntegratorConfig) -> Self {
        self.integrator = cfg;
        self
    }

    pub fn with_decoherence(mut self, deco: Decoherence) -> Self {
        self.decoherence = deco;
        self
    }

    pub fn duration(&self) -> f64 {
        self.models[0].duration()
    }

    /// Fidelity at `off` for the chosen objective.
    pub fn evaluate(&self, off: &OffsetSet, objective: Objective) -> Result<f64> {
        Ok(self.report(off, objective)?.value)
    }

    /// Fidelity and leakage at `off`, averaged over the scenario's models.
    pub fn report(&self, off: &OffsetSet, objective: Objective) -> Result<FidelityReport> {
        if !off.is_finite() {
            return Err(Error::Config("offsets must be finite".into()));
        }
        let mut value = 0.0;
        let mut leak = 0.0;
        let mut kind = FidelityKind::TraceGate;
        for m in &self.models {
            let (v, l, k) = self.evaluate_model(m.as_ref(), off, objective)?;
            value += v;
            leak += l;
            kind = k;
        }
        let n = self.models.len() as f64;
        Ok(FidelityReport { value: value / n, kind, leakage_pop: leak / n, offsets: *off })
    }

    fn evaluate_model(&self, m: &dyn Model, off: &OffsetSet, objective: Objective) -> Result<(f64, f64, FidelityKind)> {
        let basis = m.basis();
        let comp = basis.indices_of(&m.computational_labels())?;
        let include_leak = objective != Objective::LeakFree;
        let h = Driven::new(m, *off, include_leak);
        let t = m.duration();
        match (&self.target, objective) {
            (Target::Gate(u0), Objective::Decoherent) => {
                let (decay, dephase) = m.collapse_operators();
                let diss = Dissipator::new(&decay, &dephase, &self.decoherence);
                let ch = Channel::lindblad(&h, &diss, &comp, t, &self.integrator)?;
                let (f, kind) = self.averaged(&ch, u0)?;
                let leak = channel_leakage(&ch, &comp);
                Ok((f, leak, kind))
            }
            (Target::Gate(u0), Objective::Averaged) => {
                let u = propagate_unitary(&h, t, &self.integrator)?.final_state;
                let leak = gate_leakage(&u, &comp);
                if comp.len() == 2 {
                    let f = averaged_fidelity_1q_unitary(&computational_block(u.entries(), &comp), u0);
                    Ok((f, leak, FidelityKind::Averaged1q))
                } else {
                    let (f, kind) = self.averaged(&Channel::from_unitary(&u, &comp), u0)?;
                    Ok((f, leak, kind))
                }
            }
            (Target::Gate(u0), _) => {
                let u = propagate_unitary(&h, t, &self.integrator)?.final_state;
                let labels = m.computational_labels();
                let f = trace_gate_fidelity_with(&u, u0, &labels, self.trace_phase)?;
                Ok((f, gate_leakage(&u, &comp), FidelityKind::TraceGate))
            }
            (Target::State { initial, target }, objective) => {
                let psi0 = StateVector::basis_state(basis.clone(), initial)?;
                let want = StateVector::new(basis.clone(), target.clone().into())?;
                let labels = m.computational_labels();
                let (f, leak) = if objective == Objective::Decoherent {
                    let (decay, dephase) = m.collapse_operators();
                    let diss = Dissipator::new(&decay, &dephase, &self.decoherence);
                    let rho = lindblad_evolve(&h, &psi0.to_density(), &diss, t, &self.integrator)?.final_state;
                    (state_fidelity(&rho, &want)?, leakage_population(&rho, &labels)?)
                } else {
                    let psi = propagate_state(&h, &psi0, t, &self.integrator)?.final_state;
                    (state_fidelity(&psi.to_density(), &want)?, leakage_population(&psi, &labels)?)
                };
                Ok((f, leak, FidelityKind::State))
            }
        }
    }

    fn averaged(&self, ch: &Channel, u0: &CMatrix) -> Result<(f64, FidelityKind)> {
        match ch.computational_indices().len() {
            2 => Ok((averaged_fidelity_1q(ch, u0, self.samples_1q)?, FidelityKind::Averaged1q)),
            4 => Ok((averaged_fidelity_2q(ch, u0, self.grid_2q)?, FidelityKind::Averaged2q)),
            k => Err(Error::Dim(format!("no averaged fidelity for a {k}-level subspace"))),
        }
    }

    /// Basis of the first model.
    pub fn basis(&self) -> Basis {
        self.models[0].basis()
    }
}

/// Mean population outside the computational levels over the basis inputs.
fn channel_leakage(ch: &Channel, comp: &[usize]) -> f64 {
    let k = comp.len();
    let mut total = 0.0;
    for a in 0..k {
        let mut psi = vec![Complex64::from(0.0); k];
        psi[a] = Complex64::from(1.0);
        let rho = ch.apply_pure(&psi);
        let kept: f64 = comp.iter().map(|&i| rho[(i, i)].re).sum();
        let all: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
        total += (all - kept).max(0.0);
    }
    total / k as f64
}
