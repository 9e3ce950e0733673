use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Objective, Scenario};
use crate::error::{Error, Result};
use crate::models::OffsetSet;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Amp,
    Det,
    Phase,
}

impl SweepParam {
    pub fn index(self) -> usize {
        match self {
            SweepParam::Amp => 0,
            SweepParam::Det => 1,
            SweepParam::Phase => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Amp => "amp",
            SweepParam::Det => "det",
            SweepParam::Phase => "phase",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "amp" => Ok(SweepParam::Amp),
            "det" => Ok(SweepParam::Det),
            "phase" => Ok(SweepParam::Phase),
            other => Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

/// One swept offset with its range in natural units (fraction, rad/s, rad).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl SweepAxis {
    pub fn new(param: SweepParam, lo: f64, hi: f64, n: usize) -> Self {
        SweepAxis { param, lo, hi, n }
    }

    /// Symmetric range `[-half, half]`.
    pub fn symmetric(param: SweepParam, half: f64, n: usize) -> Self {
        SweepAxis { param, lo: -half, hi: half, n }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.n - 1) as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Config(format!("sweep range [{}, {}] must satisfy lo < hi", self.lo, self.hi)));
        }
        if self.n < 5 {
            return Err(Error::Config(format!("sweep needs at least 5 points, got {}", self.n)));
        }
        Ok(())
    }
}

/// One or two swept offsets on top of `fixed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    #[serde(default)]
    pub fixed: OffsetSet,
}

impl SweepSpec {
    pub fn one(axis: SweepAxis) -> Self {
        SweepSpec { axes: vec![axis], fixed: OffsetSet::ZERO }
    }

    pub fn two(x: SweepAxis, y: SweepAxis) -> Self {
        SweepSpec { axes: vec![x, y], fixed: OffsetSet::ZERO }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config("a sweep has one or two axes".into()));
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::Config("the two sweep axes must differ".into()));
        }
        self.axes.iter().try_for_each(SweepAxis::validate)
    }

    /// Grid points in emission order, the first axis slowest.
    pub fn points(&self) -> Vec<(f64, Option<f64>, OffsetSet)> {
        let set = |base: OffsetSet, p: SweepParam, v: f64| {
            let mut a = base.as_array();
            a[p.index()] = v;
            OffsetSet::from_array(a)
        };
        let xa = &self.axes[0];
        let mut out = Vec::new();
        for x in xa.values() {
            let off = set(self.fixed, xa.param, x);
            match self.axes.get(1) {
                None => out.push((x, None, off)),
                Some(ya) => {
                    for y in ya.values() {
                        out.push((x, Some(y), set(off, ya.param, y)));
                    }
                }
            }
        }
        out
    }
}

/// A grid point; failed points carry the error and no fidelity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub y: Option<f64>,
    pub fidelity: Option<f64>,
    pub leakage: Option<f64>,
    pub error: Option<String>,
}

/// Evaluates the objective on every grid point. Points are computed in
/// parallel and returned in grid order.
pub fn sweep(scenario: &Scenario, spec: &SweepSpec, objective: Objective) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    Ok(par::map(&points, |(x, y, off)| match scenario.report(off, objective) {
        Ok(r) => SweepRow { x: *x, y: *y, fidelity: Some(r.value), leakage: Some(r.leakage_pop), error: None },
        Err(e) => SweepRow { x: *x, y: *y, fidelity: None, leakage: None, error: Some(e.to_string()) },
    }))
}

/// `F ~ a u^2 + b u + c` with `u = x / unit`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms: f64,
    pub unit: f64,
}

impl QuadFit {
    pub fn eval(&self, x: f64) -> f64 {
        let u = x / self.unit;
        self.a * u * u + self.b * u + self.c
    }

    /// Stationary point in natural units.
    pub fn vertex(&self) -> f64 {
        -self.b / (2.0 * self.a) * self.unit
    }
}

/// Least-squares parabola through `(x, f)` in the scaled variable `x / unit`.
pub fn fit_quadratic(xs: &[f64], fs: &[f64], unit: f64) -> Result<QuadFit> {
    if xs.len() != fs.len() {
        return Err(Error::Fit("abscissae and values differ in length".into()));
    }
    if xs.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 points, got {}", xs.len())));
    }
    if !(unit > 0.0) {
        return Err(Error::Fit("unit must be positive".into()));
    }
    let n = xs.len();
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let u = xs[i] / unit;
        [u * u, u, 1.0][j]
    });
    let rhs = DVector::from_column_slice(fs);
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::Fit("design matrix is rank deficient".into()));
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    let resid = &design * &coef - rhs;
    let rms = (resid.norm_squared() / n as f64).sqrt();
    Ok(QuadFit { a: coef[0], b: coef[1], c: coef[2], rms, unit })
}

/// One-dimensional sweep followed by a fit in the scenario's units.
pub fn sweep_fit(scenario: &Scenario, axis: SweepAxis, objective: Objective) -> Result<(Vec<SweepRow>, QuadFit)> {
    let rows = sweep(scenario, &SweepSpec::one(axis), objective)?;
    let (xs, fs): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| r.fidelity.map(|f| (r.x, f))).unzip();
    let fit = fit_quadratic(&xs, &fs, scenario.fit_units[axis.param.index()])?;
    Ok((rows, fit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_parabola() {
        let xs: Vec<f64> = (0..9).map(|k| -2.0 + 0.5 * k as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|x| -1.3 * x * x + 0.2 * x + 0.99).collect();
        let fit = fit_quadratic(&xs, &fs, 1.0).unwrap();
        assert!((fit.a + 1.3).abs() < 1e-10 && (fit.b - 0.2).abs() < 1e-10 && (fit.c - 0.99).abs() < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_quadratic(&[1.0; 6], &[0.5; 6], 1.0), Err(Error::Fit(_))));
        assert!(matches!(fit_quadratic(&[1.0, 2.0], &[0.5, 0.4], 1.0), Err(Error::Fit(_))));
        let spec = SweepSpec::one(SweepAxis::new(SweepParam::Amp, 0.1, 0.1, 11));
        assert!(spec.validate().is_err());
        let spec = SweepSpec::one(SweepAxis::new(SweepParam::Amp, -0.1, 0.1, 4));
        assert!(spec.validate().is_err());
    }

    #[test]
    fn grid_order() {
        let spec = SweepSpec::two(
            SweepAxis::new(SweepParam::Det, -1.0, 1.0, 5),
            SweepAxis::new(SweepParam::Phase, 0.0, 4.0, 5),
        );
        let pts = spec.points();
        assert_eq!(pts.len(), 25);
        assert_eq!((pts[1].0, pts[1].1), (-1.0, Some(1.0)));
        assert_eq!(pts[6].2, OffsetSet::new(0.0, -0.5, 1.0));
    }
}
