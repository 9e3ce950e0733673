//! Browser bindings: an offset sweep, a population trajectory and an offset
//! optimisation for the default scenarios. Inputs use MHz for detunings and
//! units of pi for phases; every function returns a JSON string.

use std::f64::consts::PI;

use leakctl_core::metrics::populations;
use leakctl_core::models::{Driven, OffsetSet};
use leakctl_core::operators::StateVector;
use leakctl_core::propagation::propagate_state;
use leakctl_core::tuneup::{
    optimize_offsets, sweep, Bounds, NelderMeadOptions, Objective, Scenario, SeedGrid, SweepAxis, SweepParam,
    SweepSpec, Target,
};
use leakctl_core::{mhz, Error};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn scenario(name: &str) -> Result<Scenario, JsError> {
    if name == "iswap" {
        return Err(JsError::new("the two-qubit scenario is too slow for the browser demo"));
    }
    Scenario::by_name(name).map_err(js)
}

fn offsets(amp: f64, det_mhz: f64, phase_pi: f64) -> OffsetSet {
    OffsetSet::new(amp, mhz(det_mhz), phase_pi * PI)
}

/// Axis value in display units: fraction, MHz or pi.
fn display(param: SweepParam, x: f64) -> f64 {
    match param {
        SweepParam::Amp => x,
        SweepParam::Det => x / mhz(1.0),
        SweepParam::Phase => x / PI,
    }
}

fn natural(param: SweepParam, x: f64) -> f64 {
    match param {
        SweepParam::Amp => x,
        SweepParam::Det => mhz(x),
        SweepParam::Phase => x * PI,
    }
}

/// Leak-only fidelity along one offset axis, the other two held at zero.
/// Returns `{"param", "x": [...], "fidelity": [...], "leakage": [...]}`.
#[wasm_bindgen]
pub fn offset_sweep(name: &str, param: &str, lo: f64, hi: f64, n: usize) -> Result<String, JsError> {
    let s = scenario(name)?;
    let p = SweepParam::parse(param).map_err(js)?;
    let axis = SweepAxis::new(p, natural(p, lo), natural(p, hi), n);
    let rows = sweep(&s, &SweepSpec::one(axis), Objective::Trace).map_err(js)?;
    let x: Vec<f64> = rows.iter().map(|r| display(p, r.x)).collect();
    let f: Vec<Option<f64>> = rows.iter().map(|r| r.fidelity).collect();
    let l: Vec<Option<f64>> = rows.iter().map(|r| r.leakage).collect();
    Ok(json!({"param": p.name(), "x": x, "fidelity": f, "leakage": l}).to_string())
}

/// Level populations over the pulse at the given offsets, sampled every
/// `stride` steps. Returns `{"labels", "t_ns": [...], "populations": [[...]]}`.
#[wasm_bindgen]
pub fn population_trajectory(
    name: &str,
    amp: f64,
    det_mhz: f64,
    phase_pi: f64,
    stride: usize,
) -> Result<String, JsError> {
    let s = scenario(name)?;
    let m = s.models[0].as_ref();
    let labels = m.basis().labels().to_vec();
    let initial = match &s.target {
        Target::State { initial, .. } => initial.clone(),
        Target::Gate(_) => m.computational_labels()[0].clone(),
    };
    let psi0 = StateVector::basis_state(m.basis(), &initial).map_err(js)?;
    let h = Driven::new(m, offsets(amp, det_mhz, phase_pi), true);
    let res = propagate_state(&h, &psi0, m.duration(), &s.integrator.sampled(stride.max(1))).map_err(js)?;
    let mut t_ns = Vec::with_capacity(res.samples.len());
    let mut pops = Vec::with_capacity(res.samples.len());
    for (t, psi) in &res.samples {
        t_ns.push(t * 1e9);
        pops.push(populations(psi, &labels).map_err(js)?.into_iter().map(|(_, p)| p).collect::<Vec<_>>());
    }
    Ok(json!({"labels": labels, "t_ns": t_ns, "populations": pops}).to_string())
}

/// Leak-only offset optimisation. Returns the tuned offsets in display units
/// with the fidelity before and after.
#[wasm_bindgen]
pub fn optimize(name: &str, seed_grid: usize) -> Result<String, JsError> {
    let s = scenario(name)?;
    let r = optimize_offsets(
        &s,
        Objective::Trace,
        &Bounds::default(),
        SeedGrid(seed_grid.max(1)),
        &NelderMeadOptions::default(),
    )
    .map_err(js)?;
    Ok(json!({
        "amp": r.offsets.amp,
        "det_mhz": r.offsets.det / mhz(1.0),
        "phase_pi": r.offsets.phase / PI,
        "uncorrected": r.baseline,
        "tuned": r.fidelity,
        "evaluations": r.evaluations,
    })
    .to_string())
}
