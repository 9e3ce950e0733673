//! The subcommands. Each writes its tables and a summary through a [`Sink`].

use std::f64::consts::PI;

use leakctl_core::framework_checks::{error_propagator, magnus_residual, subspace_error};
use leakctl_core::metrics::populations;
use leakctl_core::models::{Driven, GateKind, OffsetSet};
use leakctl_core::operators::{CMatrix, StateVector};
use leakctl_core::propagation::propagate_state;
use leakctl_core::tuneup::{
    drag_compare, fit_quadratic, gtc_crosstalk_study, optimize_offsets, quantize_offsets, robustness_grid,
    sweep as run_sweep, NelderMeadOptions, Objective, OptimizeResult, Resolution, RobustnessSpec, Scenario, SeedGrid,
    SweepSpec,
};
use leakctl_core::{mhz, TAU};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::{Cell, Sink, Table};
use crate::Failure;

/// Offsets with readable companions in MHz and units of pi.
#[derive(Serialize)]
struct Offsets {
    amp: f64,
    det: f64,
    phase: f64,
    det_mhz: f64,
    phase_pi: f64,
}

fn offsets(o: &OffsetSet) -> Offsets {
    Offsets { amp: o.amp, det: o.det, phase: o.phase, det_mhz: o.det / (TAU * 1e6), phase_pi: o.phase / PI }
}

fn optimizer(o: &OptimizeResult) -> Value {
    json!({
        "offsets": offsets(&o.offsets),
        "baseline": o.baseline,
        "fidelity": o.fidelity,
        "evaluations": o.evaluations,
        "iterations": o.iterations,
    })
}

/// Fixed offsets from the config, or the optimiser's result.
fn tuned(cfg: &Config, s: &Scenario) -> Result<(OffsetSet, Option<OptimizeResult>), Failure> {
    match cfg.offsets {
        Some(o) => Ok((o.offsets(), None)),
        None => {
            let r = optimize_offsets(
                s,
                cfg.objective,
                &cfg.bounds(),
                SeedGrid(cfg.seed_grid),
                &NelderMeadOptions::default(),
            )?;
            Ok((r.offsets, Some(r)))
        }
    }
}

pub fn run(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let s = cfg.scenario()?;
    let (sso, opt) = tuned(cfg, &s)?;
    let zero = OffsetSet::ZERO;
    let unc = s.report(&zero, Objective::Trace)?;
    let tuned = s.report(&sso, Objective::Trace)?;
    let unc_d = s.evaluate(&zero, Objective::Decoherent)?;
    let tuned_d = s.evaluate(&sso, Objective::Decoherent)?;

    let model = s.models[0].as_ref();
    let labels = model.basis().labels().to_vec();
    let initial = cfg.initial_label(&s);
    let psi0 = StateVector::basis_state(model.basis(), &initial)?;
    let integ = s.integrator.sampled(cfg.sample_stride);
    let mut header = vec!["run".to_string(), "t".to_string()];
    header.extend(labels.iter().map(|l| format!("P{l}")));
    let mut table = Table::new(&header);
    let mut finals = serde_json::Map::new();
    for (name, off) in [("uncorrected", zero), ("sso", sso)] {
        let res = propagate_state(&Driven::new(model, off, true), &psi0, model.duration(), &integ)?;
        for (t, psi) in &res.samples {
            let mut row = vec![Cell::from(name), Cell::from(*t)];
            row.extend(populations(psi, &labels)?.into_iter().map(|(_, p)| Cell::from(p)));
            table.push(row);
        }
        let last: serde_json::Map<String, Value> =
            populations(&res.final_state, &labels)?.into_iter().map(|(l, p)| (format!("P{l}"), json!(p))).collect();
        finals.insert(name.to_string(), Value::Object(last));
    }
    sink.csv("populations", &table)?;
    let results = json!({
        "scenario": s.name,
        "fidelity_kind": format!("{:?}", tuned.kind),
        "F_uncorrected": unc.value,
        "F_sso": tuned.value,
        "F_uncorrected_decoherent": unc_d,
        "F_sso_decoherent": tuned_d,
        "leakage_uncorrected": unc.leakage_pop,
        "leakage_sso": tuned.leakage_pop,
        "offsets": offsets(&sso),
        "optimizer": opt.as_ref().map(optimizer),
        "initial": initial,
        "final_populations": finals,
    });
    sink.summary("run", cfg, &results)
}

pub fn sweep(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let s = cfg.scenario()?;
    let x = cfg.sweep.x.axis();
    let mut spec = match &cfg.sweep.y {
        Some(y) => SweepSpec::two(x, y.axis()),
        None => SweepSpec::one(x),
    };
    spec.fixed = cfg.sweep.fixed.offsets();
    let rows = run_sweep(&s, &spec, cfg.objective)?;
    let mut header = vec![x.param.name()];
    if let Some(y) = &cfg.sweep.y {
        header.push(y.param.name());
    }
    header.extend(["fidelity", "leakage", "error"]);
    let mut table = Table::new(&header);
    let opt = |v: Option<f64>| v.map(Cell::from).unwrap_or_else(|| Cell::from(""));
    for r in &rows {
        let mut row = vec![Cell::from(r.x)];
        if cfg.sweep.y.is_some() {
            row.push(opt(r.y));
        }
        row.extend([opt(r.fidelity), opt(r.leakage), Cell::from(r.error.clone().unwrap_or_default())]);
        table.push(row);
    }
    sink.csv("sweep", &table)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    let best = rows
        .iter()
        .filter_map(|r| r.fidelity.map(|f| (f, r)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(f, r)| json!({"x": r.x, "y": r.y, "fidelity": f}));
    let fit = if cfg.sweep.y.is_none() && failed == 0 {
        let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
        let fs: Vec<f64> = rows.iter().filter_map(|r| r.fidelity).collect();
        match fit_quadratic(&xs, &fs, s.fit_units[x.param.index()]) {
            Ok(f) => {
                let mut t = Table::new(&["param", "unit", "a", "b", "c", "rms", "vertex"]);
                t.push(vec![
                    Cell::from(x.param.name()),
                    Cell::from(f.unit),
                    Cell::from(f.a),
                    Cell::from(f.b),
                    Cell::from(f.c),
                    Cell::from(f.rms),
                    Cell::from(f.vertex()),
                ]);
                sink.csv("fit", &t)?;
                json!({"a": f.a, "b": f.b, "c": f.c, "rms": f.rms, "unit": f.unit, "vertex": f.vertex()})
            }
            Err(e) => json!({"error": e.to_string()}),
        }
    } else {
        Value::Null
    };
    let results = json!({
        "scenario": s.name,
        "rows": rows.len(),
        "failed_points": failed,
        "best": best,
        "fit": fit,
    });
    sink.summary("sweep", cfg, &results)?;
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} sweep points failed; see the error column")));
    }
    Ok(())
}

pub fn optimize(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let s = cfg.scenario()?;
    let r = optimize_offsets(&s, cfg.objective, &cfg.bounds(), SeedGrid(cfg.seed_grid), &NelderMeadOptions::default())?;
    let mut t = Table::new(&["objective", "amp", "det", "phase", "baseline", "fidelity", "evaluations", "iterations"]);
    t.push(vec![
        Cell::from(objective_name(cfg.objective)),
        Cell::from(r.offsets.amp),
        Cell::from(r.offsets.det),
        Cell::from(r.offsets.phase),
        Cell::from(r.baseline),
        Cell::from(r.fidelity),
        Cell::from(r.evaluations),
        Cell::from(r.iterations),
    ]);
    sink.csv("optimize", &t)?;
    sink.summary("optimize", cfg, &json!({"scenario": s.name, "result": optimizer(&r)}))
}

fn objective_name(o: Objective) -> String {
    serde_json::to_value(o).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn robustness(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let s = cfg.scenario()?;
    let (sso, opt) = tuned(cfg, &s)?;
    let spec = if cfg.scenario == "iswap" {
        RobustnessSpec::two_qubit(cfg.robustness_n)
    } else {
        RobustnessSpec::single_qubit(cfg.robustness_n)
    };
    let cells = robustness_grid(&s, &sso, &spec, cfg.objective)?;
    let mut t = Table::new(&["panel", "eps_amp", "eps_det", "eps_phase", "fidelity"]);
    let mut minima = serde_json::Map::new();
    for c in &cells {
        let panel = format!("{}-{}", c.panel.0, c.panel.1);
        let entry = minima.entry(panel.clone()).or_insert(json!(f64::INFINITY));
        if c.fidelity < entry.as_f64().unwrap_or(f64::INFINITY) {
            *entry = json!(c.fidelity);
        }
        t.push(vec![
            Cell::from(panel),
            Cell::from(c.errors.amp),
            Cell::from(c.errors.det),
            Cell::from(c.errors.phase),
            Cell::from(c.fidelity),
        ]);
    }
    sink.csv("robustness", &t)?;
    let mut quant = serde_json::Map::new();
    for (name, res) in [("coarse", Resolution::coarse(s.amp_per_mhz)), ("fine", Resolution::fine(s.amp_per_mhz))] {
        let q = quantize_offsets(&sso, &res)?;
        quant.insert(name.into(), json!({"offsets": offsets(&q), "fidelity": s.evaluate(&q, cfg.objective)?}));
    }
    let results = json!({
        "scenario": s.name,
        "offsets": offsets(&sso),
        "fidelity": s.evaluate(&sso, cfg.objective)?,
        "optimizer": opt.as_ref().map(optimizer),
        "half_ranges": {"amp": spec.half[0], "det": spec.half[1], "phase": spec.half[2]},
        "panel_minima": minima,
        "quantized": quant,
    });
    sink.summary("robustness", cfg, &results)
}

pub fn gtc(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let p = cfg.transmon_params();
    let template = cfg.configure(Scenario::rabi_hadamard(p, 0.0));
    let zetas: Vec<f64> = cfg.zetas.iter().map(|z| z.0).collect();
    let study = gtc_crosstalk_study(
        &zetas,
        p,
        &cfg.gtc_params(),
        &template,
        SeedGrid(cfg.seed_grid),
        &NelderMeadOptions::default(),
    )?;
    let mut t = Table::new(&["zeta", "zeta_mhz", "f_gtc", "f_rabi"]);
    for r in &study.rows {
        t.push(vec![Cell::from(r.zeta), Cell::from(r.zeta / mhz(1.0)), Cell::from(r.f_gtc), Cell::from(r.f_rabi)]);
    }
    sink.csv("crosstalk", &t)?;
    let results = json!({
        "gtc": optimizer(&study.gtc),
        "rabi": optimizer(&study.rabi),
        "rows": study.rows,
    });
    sink.summary("gtc", cfg, &results)
}

pub fn drag(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let kind = match cfg.scenario.as_str() {
        "not" => GateKind::Not,
        "hadamard" => GateKind::Hadamard,
        other => return Err(Failure::config(format!("drag supports the not and hadamard scenarios, not `{other}`"))),
    };
    let template = cfg.scenario()?;
    let c =
        drag_compare(kind, cfg.transmon_params(), &template, SeedGrid(cfg.seed_grid), &NelderMeadOptions::default())?;
    let mut t = Table::new(&["gate", "f_uncorrected", "f_drag", "f_sso", "amp", "det", "phase"]);
    t.push(vec![
        Cell::from(cfg.scenario.as_str()),
        Cell::from(c.f_uncorrected),
        Cell::from(c.f_drag),
        Cell::from(c.f_sso),
        Cell::from(c.sso.offsets.amp),
        Cell::from(c.sso.offsets.det),
        Cell::from(c.sso.offsets.phase),
    ]);
    sink.csv("drag", &t)?;
    let results = json!({
        "gate": cfg.scenario,
        "f_uncorrected": c.f_uncorrected,
        "f_drag": c.f_drag,
        "f_sso": c.f_sso,
        "sso": optimizer(&c.sso),
    });
    sink.summary("drag", cfg, &results)
}

pub fn framework(cfg: &Config, sink: &mut Sink) -> Result<(), Failure> {
    let s = cfg.scenario()?;
    let (sso, opt) = tuned(cfg, &s)?;
    let model = s.models[0].as_ref();
    let dim = model.basis().len();
    let identity = CMatrix::identity(dim, dim);
    let mut t = Table::new(&["run", "window", "residual"]);
    let mut runs = serde_json::Map::new();
    for (name, off) in [("uncorrected", OffsetSet::ZERO), ("sso", sso)] {
        let u_err = error_propagator(model, &off, &s.integrator)?;
        let magnus = magnus_residual(model, &off, &identity, cfg.n_seg)?;
        for (k, r) in magnus.residuals.iter().enumerate() {
            t.push(vec![Cell::from(name), Cell::from(k), Cell::from(*r)]);
        }
        runs.insert(
            name.into(),
            json!({
                "offsets": offsets(&off),
                "subspace_error": subspace_error(model, &u_err)?,
                "max_magnus_residual": magnus.max_residual,
            }),
        );
    }
    sink.csv("magnus", &t)?;
    let results = json!({
        "scenario": s.name,
        "n_seg": cfg.n_seg,
        "optimizer": opt.as_ref().map(optimizer),
        "runs": runs,
    });
    sink.summary("framework", cfg, &results)
}
