use serde::{Deserialize, Serialize};

use super::{Objective, Scenario};
use crate::error::{Error, Result};
use crate::models::OffsetSet;
use crate::par;

/// Half-widths of the search box in natural units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub amp: f64,
    pub det: f64,
    pub phase: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { amp: 0.15, det: crate::mhz(10.0), phase: 0.2 * std::f64::consts::PI }
    }
}

impl Bounds {
    fn as_array(&self) -> [f64; 3] {
        [self.amp, self.det, self.phase]
    }

    fn validate(&self) -> Result<()> {
        if self.as_array().iter().all(|b| *b > 0.0 && b.is_finite()) {
            Ok(())
        } else {
            Err(Error::Config("optimizer bounds must be positive and finite".into()))
        }
    }
}

/// Points per axis of the coarse seed grid. The origin is always evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedGrid(pub usize);

impl Default for SeedGrid {
    fn default() -> Self {
        SeedGrid(7)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when the spread of simplex values drops below this...
    pub ftol: f64,
    /// ...and the simplex fits in a box of this size.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            ftol: 1e-7,
            xtol: 1e-3,
            max_iter: 500,
        }
    }
}

/// Minimises `f` over the box `[-1, 1]^d` starting from a simplex of
/// size `step` around `x0`. Points are clamped to the box. Returns the best
/// point, its value and the iteration count.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, opts: &NelderMeadOptions) -> Result<(Vec<f64>, f64, usize)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let d = x0.len();
    let clamp = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(-1.0, 1.0)).collect() };
    let mut eval = |x: &[f64]| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Opt(format!("objective is not finite at {x:?}")))
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let x0 = clamp(x0.to_vec());
    simplex.push((x0.clone(), eval(&x0)?));
    for i in 0..d {
        let mut x = x0.clone();
        x[i] = if x[i] + step <= 1.0 { x[i] + step } else { x[i] - step };
        let v = eval(&x)?;
        simplex.push((x, v));
    }
    let mut iter = 0;
    while iter < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let size = (0..d)
            .map(|i| {
                let (lo, hi) = simplex
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0[i]), hi.max(p.0[i])));
                hi - lo
            })
            .fold(0.0, f64::max);
        if spread < opts.ftol && size < opts.xtol {
            break;
        }
        iter += 1;
        let centroid: Vec<f64> = (0..d).map(|i| simplex[..d].iter().map(|p| p.0[i]).sum::<f64>() / d as f64).collect();
        let toward = |coef: f64, from: &[f64]| -> Vec<f64> {
            clamp((0..d).map(|i| centroid[i] + coef * (centroid[i] - from[i])).collect())
        };
        let worst = simplex[d].0.clone();
        let xr = toward(opts.reflection, &worst);
        let fr = eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = toward(opts.reflection * opts.expansion, &worst);
            let fe = eval(&xe)?;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (coef, accept_below) = if fr < simplex[d].1 {
            (opts.reflection * opts.contraction, fr)
        } else {
            (-opts.contraction, simplex[d].1)
        };
        let xc = toward(coef, &worst);
        let fc = eval(&xc)?;
        if fc <= accept_below {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for p in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = (0..d).map(|i| best[i] + opts.shrink * (p.0[i] - best[i])).collect();
            let v = eval(&x)?;
            *p = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    Ok((x, v, iter))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub offsets: OffsetSet,
    pub fidelity: f64,
    /// Fidelity at zero offsets.
    pub baseline: f64,
    pub evaluations: usize,
    pub iterations: usize,
}

/// Coarse grid over the bounds (origin included), then Nelder-Mead in
/// coordinates scaled by the bounds.
pub fn optimize_offsets(
    scenario: &Scenario,
    objective: Objective,
    bounds: &Bounds,
    seed: SeedGrid,
    opts: &NelderMeadOptions,
) -> Result<OptimizeResult> {
    bounds.validate()?;
    let b = bounds.as_array();
    let to_offsets = |u: &[f64]| OffsetSet::new(u[0] * b[0], u[1] * b[1], u[2] * b[2]);
    let n = seed.0.max(1);
    let axis: Vec<f64> =
        if n == 1 { vec![0.0] } else { (0..n).map(|k| -1.0 + 2.0 * k as f64 / (n - 1) as f64).collect() };
    let mut seeds = vec![vec![0.0; 3]];
    for &a in &axis {
        for &d in &axis {
            for &p in &axis {
                if a != 0.0 || d != 0.0 || p != 0.0 {
                    seeds.push(vec![a, d, p]);
                }
            }
        }
    }
    let values = par::map(&seeds, |u| scenario.evaluate(&to_offsets(u), objective));
    let mut best = 0;
    let mut fs = Vec::with_capacity(values.len());
    for (k, v) in values.into_iter().enumerate() {
        let v = v?;
        if !v.is_finite() {
            return Err(Error::Opt(format!("objective is not finite at seed {:?}", seeds[k])));
        }
        if v > fs.get(best).copied().unwrap_or(f64::NEG_INFINITY) {
            best = k;
        }
        fs.push(v);
    }
    let baseline = fs[0];
    let mut evaluations = seeds.len();
    let step = if n > 1 { 1.0 / (n - 1) as f64 } else { 0.1 };
    let (u, neg, iterations) = nelder_mead(
        |u| {
            evaluations += 1;
            scenario.evaluate(&to_offsets(u), objective).map(|f| -f)
        },
        &seeds[best],
        step,
        opts,
    )?;
    let (offsets, fidelity) =
        if -neg >= fs[best] { (to_offsets(&u), -neg) } else { (to_offsets(&seeds[best]), fs[best]) };
    Ok(OptimizeResult { offsets, fidelity, baseline, evaluations, iterations })
}
