//! Time-dependent Hamiltonians for the four scenarios, static offsets, and the
//! transformation diagnostics.

mod crosstalk;
mod ladder;
mod single;
mod transforms;
mod two_qubit;

pub use crosstalk::{h_crosstalk, CrosstalkModel};
pub use ladder::{h_ladder, LadderModel};
pub use single::{
    h_single, single_qubit_matrix, transmon_b_matrix, DragModel, GateKind, HadamardConstruction, SingleQubitModel,
    TransmonParams,
};
pub use transforms::{leakage_defect, offsets_from_rotation, reference_h1, rotated_h1, transform_a1, transform_a2};
pub use two_qubit::{bessel_j1, h_two, iswap_duration, TwoQubitModel};

use serde::{Deserialize, Serialize};

use crate::operators::{Basis, CMatrix, Operator};
use crate::propagation::Hamiltonian;

/// Static offsets of drive amplitude (fractional), detuning (rad/s) and
/// phase (rad). For the two-qubit model they act on the coupling, the
/// modulation frequency and the modulation phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OffsetSet {
    pub amp: f64,
    pub det: f64,
    pub phase: f64,
}

impl OffsetSet {
    pub const ZERO: OffsetSet = OffsetSet { amp: 0.0, det: 0.0, phase: 0.0 };

    pub fn new(amp: f64, det: f64, phase: f64) -> Self {
        OffsetSet { amp, det, phase }
    }

    pub fn is_finite(&self) -> bool {
        self.amp.is_finite() && self.det.is_finite() && self.phase.is_finite()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.amp, self.det, self.phase]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        OffsetSet { amp: v[0], det: v[1], phase: v[2] }
    }

    /// Componentwise sum, used to add calibration errors to tuned offsets.
    pub fn plus(&self, other: &OffsetSet) -> OffsetSet {
        OffsetSet { amp: self.amp + other.amp, det: self.det + other.det, phase: self.phase + other.phase }
    }
}

/// Normalisation of the single-qubit and ladder drive terms.
///
/// `Reference` uses couplings `Omega e^{i phi}` with the leakage level at
/// `3 Delta / 2 + alpha`. `Transmon` uses the three-level transmon form
/// `(1/2) B.S - alpha |2><2|`, i.e. couplings `(Omega/2) e^{-i phi}`, which
/// is the normalisation under which the reference fidelities are recovered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Reference,
    #[default]
    Transmon,
}

impl Convention {
    /// Envelope area giving a Bloch rotation by `angle`.
    pub fn rotation_area(self, angle: f64) -> f64 {
        match self {
            Convention::Reference => 0.5 * angle,
            Convention::Transmon => angle,
        }
    }

    /// Drive phase that rotates about the equatorial axis at azimuth `axis`.
    pub fn axis_phase(self, axis: f64) -> f64 {
        match self {
            Convention::Reference => -axis,
            Convention::Transmon => axis,
        }
    }

    /// Coupling prefactor applied to the envelope.
    pub fn coupling_scale(self) -> f64 {
        match self {
            Convention::Reference => 1.0,
            Convention::Transmon => 0.5,
        }
    }
}

/// A parametrised physical model: Hamiltonian as a function of offsets,
/// time and whether the leakage couplings are present.
pub trait Model: Sync {
    fn basis(&self) -> Basis;
    fn duration(&self) -> f64;
    fn matrix(&self, off: &OffsetSet, t: f64, include_leak: bool) -> CMatrix;
    /// Labels of the computational subspace, in the order the target acts on.
    fn computational_labels(&self) -> Vec<String>;
    /// Largest relevant angular frequency, used to size the time grid.
    fn frequency_scale(&self) -> f64;
    /// Decay and dephasing operators, one of each per physical transmon.
    fn collapse_operators(&self) -> (Vec<CMatrix>, Vec<CMatrix>);

    fn operator(&self, off: &OffsetSet, t: f64, include_leak: bool) -> Operator {
        Operator::new(self.basis(), self.matrix(off, t, include_leak)).expect("model basis matches matrix")
    }
}

/// A model with fixed offsets and leakage switch, usable by the propagators.
#[derive(Clone, Copy, Debug)]
pub struct Driven<'a, M: Model + ?Sized> {
    pub model: &'a M,
    pub offsets: OffsetSet,
    pub include_leak: bool,
}

impl<'a, M: Model + ?Sized> Driven<'a, M> {
    pub fn new(model: &'a M, offsets: OffsetSet, include_leak: bool) -> Self {
        Driven { model, offsets, include_leak }
    }
}

impl<M: Model + ?Sized> Hamiltonian for Driven<'_, M> {
    fn basis(&self) -> Basis {
        self.model.basis()
    }

    fn matrix(&self, t: f64) -> CMatrix {
        self.model.matrix(&self.offsets, t, self.include_leak)
    }

    fn frequency_scale(&self, _t_final: f64) -> f64 {
        self.model.frequency_scale() * (1.0 + self.offsets.amp.abs()) + self.offsets.det.abs()
    }
}

/// Leakage part of a model: `H(leak on) - H(leak off)`.
pub fn leak_matrix<M: Model + ?Sized>(m: &M, off: &OffsetSet, t: f64) -> CMatrix {
    m.matrix(off, t, true) - m.matrix(off, t, false)
}

/// `X_1 = sum sqrt(j+1) |j><j+1|` and `X_phi = sum j |j><j|` truncated at `dim`.
pub fn ladder_operators(dim: usize) -> (CMatrix, CMatrix) {
    let mut x1 = CMatrix::zeros(dim, dim);
    let mut xp = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        if j + 1 < dim {
            x1[(j, j + 1)] = ((j + 1) as f64).sqrt().into();
        }
        xp[(j, j)] = (j as f64).into();
    }
    (x1, xp)
}
