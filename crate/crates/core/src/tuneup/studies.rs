use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{optimize_offsets, Bounds, NelderMeadOptions, Objective, OptimizeResult, Scenario, SeedGrid, Target};
use crate::error::{Error, Result};
use crate::models::{Convention, DragModel, GateKind, Model, OffsetSet, SingleQubitModel, TransmonParams};
use crate::par;
use crate::pulses::GtcParams;

/// Calibration-error half-ranges and grid size for the tolerance panels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSpec {
    /// `(eps_amp, eps_det, eps_phase)` half-widths.
    pub half: [f64; 3],
    /// Points per axis, odd so that the zero-error point is on the grid.
    pub n: usize,
}

impl RobustnessSpec {
    /// `+-0.02`, `+-2 pi 0.2 MHz`, `+-0.02 pi`.
    pub fn single_qubit(n: usize) -> Self {
        RobustnessSpec { half: [0.02, crate::mhz(0.2), 0.02 * PI], n }
    }

    /// `+-0.01`, `+-2 pi 0.2 MHz`, `+-0.02 pi`.
    pub fn two_qubit(n: usize) -> Self {
        RobustnessSpec { half: [0.01, crate::mhz(0.2), 0.02 * PI], n }
    }
}

/// One point of a two-parameter tolerance panel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobustnessCell {
    /// Pair of error components varied, e.g. `("amp", "det")`.
    pub panel: (&'static str, &'static str),
    pub errors: OffsetSet,
    pub fidelity: f64,
}

const PANELS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
const NAMES: [&str; 3] = ["amp", "det", "phase"];

/// Fidelity with calibration errors added to fixed offsets, over the three
/// pairwise panels `(amp, det)`, `(amp, phase)`, `(det, phase)`.
pub fn robustness_grid(
    scenario: &Scenario,
    off_opt: &OffsetSet,
    spec: &RobustnessSpec,
    objective: Objective,
) -> Result<Vec<RobustnessCell>> {
    if spec.n < 2 {
        return Err(Error::Config("robustness grid needs at least 2 points per axis".into()));
    }
    let axis = |k: usize| -> Vec<f64> {
        (0..spec.n).map(|j| spec.half[k] * (-1.0 + 2.0 * j as f64 / (spec.n - 1) as f64)).collect()
    };
    let mut points = Vec::new();
    for &(a, b) in &PANELS {
        for x in axis(a) {
            for y in axis(b) {
                let mut e = [0.0; 3];
                e[a] = x;
                e[b] = y;
                points.push(((NAMES[a], NAMES[b]), OffsetSet::from_array(e)));
            }
        }
    }
    par::map(&points, |(panel, eps)| {
        let fidelity = scenario.evaluate(&off_opt.plus(eps), objective)?;
        Ok(RobustnessCell { panel: *panel, errors: *eps, fidelity })
    })
    .into_iter()
    .collect()
}

/// Step sizes for offset quantisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub amp: f64,
    pub det: f64,
    pub phase: f64,
}

impl Resolution {
    /// `2 pi 0.1 MHz` on coupling and detuning, `0.01 pi` on phase.
    /// `amp_per_mhz` converts a coupling step in `2 pi MHz` to a fraction.
    pub fn coarse(amp_per_mhz: f64) -> Self {
        Resolution { amp: 0.1 * amp_per_mhz, det: crate::mhz(0.1), phase: 0.01 * PI }
    }

    /// `2 pi 0.01 MHz` on coupling and detuning, `0.001 pi` on phase.
    pub fn fine(amp_per_mhz: f64) -> Self {
        Resolution { amp: 0.01 * amp_per_mhz, det: crate::mhz(0.01), phase: 0.001 * PI }
    }
}

/// Rounds each component to the nearest multiple of its resolution.
pub fn quantize_offsets(off: &OffsetSet, res: &Resolution) -> Result<OffsetSet> {
    let r = [res.amp, res.det, res.phase];
    if !r.iter().all(|v| *v > 0.0 && v.is_finite()) {
        return Err(Error::Config("resolutions must be positive".into()));
    }
    let v = off.as_array();
    Ok(OffsetSet::from_array([0, 1, 2].map(|k| (v[k] / r[k]).round() * r[k] + 0.0)))
}

/// Decoherent averaged fidelities of the same gate without correction,
/// with DRAG fields, and with tuned static offsets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DragComparison {
    pub f_uncorrected: f64,
    pub f_drag: f64,
    pub f_sso: f64,
    pub sso: OptimizeResult,
}

pub fn drag_compare(
    kind: GateKind,
    params: TransmonParams,
    scenario_template: &Scenario,
    seed: SeedGrid,
    opts: &NelderMeadOptions,
) -> Result<DragComparison> {
    let base = SingleQubitModel::gate(kind, params, Convention::Transmon);
    let target = Target::Gate(kind.target());
    let amp = crate::mhz(1.0) / params.omega_m;
    let configure = |mut s: Scenario| {
        s.integrator = scenario_template.integrator;
        s.decoherence = scenario_template.decoherence;
        s.trace_phase = scenario_template.trace_phase;
        s.samples_1q = scenario_template.samples_1q;
        s
    };
    let plain = configure(Scenario::from_models("gate", vec![Box::new(base.clone())], target.clone(), amp));
    let drag_model: Box<dyn Model> = Box::new(DragModel::new(base)?);
    let drag = configure(Scenario::from_models("drag", vec![drag_model], target, amp));
    let sso = optimize_offsets(&plain, Objective::Trace, &Bounds::default(), seed, opts)?;
    Ok(DragComparison {
        f_uncorrected: plain.evaluate(&OffsetSet::ZERO, Objective::Decoherent)?,
        f_drag: drag.evaluate(&OffsetSet::ZERO, Objective::Decoherent)?,
        f_sso: plain.evaluate(&sso.offsets, Objective::Decoherent)?,
        sso,
    })
}

/// Fidelity of the trajectory and single-pulse Hadamards at one ZZ strength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrosstalkRow {
    pub zeta: f64,
    pub f_gtc: f64,
    pub f_rabi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosstalkStudy {
    pub gtc: OptimizeResult,
    pub rabi: OptimizeResult,
    pub rows: Vec<CrosstalkRow>,
}

/// Both schemes are tuned once at `zeta = 0` on the leak-only objective and
/// then evaluated with decoherence across `zetas`, averaging the spectator
/// over `|0>` and `|1>`.
pub fn gtc_crosstalk_study(
    zetas: &[f64],
    params: TransmonParams,
    gtc: &GtcParams,
    template: &Scenario,
    seed: SeedGrid,
    opts: &NelderMeadOptions,
) -> Result<CrosstalkStudy> {
    let configure = |mut s: Scenario| {
        s.integrator = template.integrator;
        s.decoherence = template.decoherence;
        s.trace_phase = template.trace_phase;
        s.samples_1q = template.samples_1q;
        s
    };
    let bounds = Bounds::default();
    let gtc_opt =
        optimize_offsets(&configure(Scenario::gtc(params, gtc, 0.0)?), Objective::Trace, &bounds, seed, opts)?;
    let rabi_opt =
        optimize_offsets(&configure(Scenario::rabi_hadamard(params, 0.0)), Objective::Trace, &bounds, seed, opts)?;
    let rows = par::map(zetas, |&zeta| -> Result<CrosstalkRow> {
        let g = configure(Scenario::gtc(params, gtc, zeta)?);
        let r = configure(Scenario::rabi_hadamard(params, zeta));
        Ok(CrosstalkRow {
            zeta,
            f_gtc: g.evaluate(&gtc_opt.offsets, Objective::Decoherent)?,
            f_rabi: r.evaluate(&rabi_opt.offsets, Objective::Decoherent)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CrosstalkStudy { gtc: gtc_opt, rabi: rabi_opt, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantisation() {
        let res = Resolution::coarse(1.0 / 30.0);
        assert_eq!(quantize_offsets(&OffsetSet::ZERO, &res).unwrap(), OffsetSet::ZERO);
        let q = quantize_offsets(&OffsetSet::new(0.0031, crate::mhz(-1.556), -0.0402 * PI), &res).unwrap();
        assert!((q.det - crate::mhz(-1.6)).abs() < 1e-6);
        assert!((q.phase + 0.04 * PI).abs() < 1e-12);
        assert!((q.amp - 0.1 / 30.0).abs() < 1e-15);
        let bad = Resolution { amp: 0.0, ..res };
        assert!(quantize_offsets(&OffsetSet::ZERO, &bad).is_err());
    }
}
