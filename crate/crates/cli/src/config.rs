//! JSON run configuration. Every field has a default, unknown fields are
//! rejected, and numeric fields accept literals such as `"2pi*30MHz"`,
//! `"-0.15pi"` or `"3pi/2"`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::Path;

use leakctl_core::metrics::PhaseConvention;
use leakctl_core::models::{
    Convention, GateKind, HadamardConstruction, LadderModel, OffsetSet, SingleQubitModel, TransmonParams, TwoQubitModel,
};
use leakctl_core::propagation::{Decoherence, DissipatorNorm, IntegratorConfig};
use leakctl_core::pulses::GtcParams;
use leakctl_core::tuneup::{Bounds, Objective, Scenario, SweepAxis, SweepParam, Target};
use leakctl_core::{mhz, Error, Result};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

/// A real number in SI units (rad/s for angular frequencies, rad for
/// angles), written either as a JSON number or as a literal string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Quantity(pub f64);

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Q;
        impl Visitor<'_> for Q {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a literal such as \"2pi*30MHz\" or \"-0.15pi\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Quantity, E> {
                Ok(Quantity(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Quantity, E> {
                Ok(Quantity(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Quantity, E> {
                Ok(Quantity(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Quantity, E> {
                parse_quantity(v).map(Quantity).map_err(E::custom)
            }
        }
        d.deserialize_any(Q)
    }
}

const UNITS: [(&str, f64); 4] = [("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3), ("Hz", 1.0)];

/// Parses `[sign] factor ('*' factor)* ['/' number]` where a factor is a
/// number, `pi`, a number followed by `pi`, or a number followed by a
/// frequency unit. A frequency unit needs a `2pi` factor, so that every
/// frequency ends up angular.
pub fn parse_quantity(text: &str) -> std::result::Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse quantity `{text}`");
    if s.is_empty() {
        return Err(bad());
    }
    let (sign, body) = match s.as_bytes()[0] {
        b'-' => (-1.0, &s[1..]),
        b'+' => (1.0, &s[1..]),
        _ => (1.0, &s[..]),
    };
    if body.starts_with(['+', '-']) {
        return Err(bad());
    }
    let (body, denom) = match body.rsplit_once('/') {
        Some((b, d)) => (b, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let mut value = sign / denom;
    let (mut pi_factor, mut unit) = (false, false);
    for factor in body.split('*') {
        if let Some(num) = factor.strip_suffix("pi") {
            pi_factor = true;
            value *= PI * if num.is_empty() { 1.0 } else { num.parse::<f64>().map_err(|_| bad())? };
            continue;
        }
        if let Some((num, scale)) = UNITS.iter().find_map(|(u, k)| factor.strip_suffix(u).map(|n| (n, *k))) {
            unit = true;
            value *= scale * num.parse::<f64>().map_err(|_| bad())?;
            continue;
        }
        value *= factor.parse::<f64>().map_err(|_| bad())?;
    }
    if unit && !pi_factor {
        return Err(format!("`{text}` has a frequency unit but no 2pi factor; write e.g. \"2pi*30MHz\""));
    }
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

fn q(v: f64) -> Quantity {
    Quantity(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransmonConfig {
    pub omega_m: Quantity,
    pub alpha: Quantity,
    pub lambda: Quantity,
}

impl Default for TransmonConfig {
    fn default() -> Self {
        TransmonConfig { omega_m: q(mhz(30.0)), alpha: q(mhz(220.0)), lambda: q(SQRT_2) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoQubitConfig {
    pub g12: Quantity,
    pub alpha1: Quantity,
    pub alpha2: Quantity,
    pub delta1: Quantity,
    pub nu1: Quantity,
    pub beta1: Quantity,
    pub phi1: Quantity,
}

impl Default for TwoQubitConfig {
    fn default() -> Self {
        let m = TwoQubitModel::default();
        TwoQubitConfig {
            g12: q(m.g12),
            alpha1: q(m.alpha1),
            alpha2: q(m.alpha2),
            delta1: q(m.delta1),
            nu1: q(m.nu1),
            beta1: q(m.beta1),
            phi1: q(m.phi1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderConfig {
    pub omega_m: Quantity,
    pub alpha: Quantity,
    pub theta: Quantity,
    pub phi01: Quantity,
    pub phi12: Quantity,
}

impl Default for LadderConfig {
    fn default() -> Self {
        let m = LadderModel::default();
        LadderConfig {
            omega_m: q(m.omega_m),
            alpha: q(m.alpha),
            theta: q(m.theta),
            phi01: q(m.phi01),
            phi12: q(m.phi12),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GtcConfig {
    pub chi0: Quantity,
    pub xi0: Quantity,
    pub gamma_g: Quantity,
    pub chi1: Quantity,
    pub chi3: Quantity,
}

impl Default for GtcConfig {
    fn default() -> Self {
        let p = GtcParams::hadamard();
        GtcConfig { chi0: q(p.chi0), xi0: q(p.xi0), gamma_g: q(p.gamma_g), chi1: q(p.chi1), chi3: q(p.chi3) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoherenceConfig {
    pub kappa1: Quantity,
    pub kappa_phi: Quantity,
    pub norm: DissipatorNorm,
}

impl Default for DecoherenceConfig {
    fn default() -> Self {
        let d = Decoherence::default();
        DecoherenceConfig { kappa1: q(d.kappa1), kappa_phi: q(d.kappa_phi), norm: d.norm }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OffsetConfig {
    pub amp: Quantity,
    pub det: Quantity,
    pub phase: Quantity,
}

impl Default for OffsetConfig {
    fn default() -> Self {
        OffsetConfig { amp: q(0.0), det: q(0.0), phase: q(0.0) }
    }
}

impl OffsetConfig {
    pub fn offsets(&self) -> OffsetSet {
        OffsetSet::new(self.amp.0, self.det.0, self.phase.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub param: SweepParam,
    pub lo: Quantity,
    pub hi: Quantity,
    pub n: usize,
}

impl AxisConfig {
    pub fn axis(&self) -> SweepAxis {
        SweepAxis::new(self.param, self.lo.0, self.hi.0, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub x: AxisConfig,
    pub y: Option<AxisConfig>,
    /// Offsets held fixed on the axes that are not swept.
    pub fixed: OffsetConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            x: AxisConfig { param: SweepParam::Phase, lo: q(-0.15 * PI), hi: q(0.15 * PI), n: 41 },
            y: None,
            fixed: OffsetConfig::default(),
        }
    }
}

/// Everything a run needs. Serialised back in full into every summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// `not`, `hadamard`, `iswap`, `stirap`, `gtc` or `rabi`.
    pub scenario: String,
    pub convention: Convention,
    pub hadamard: HadamardConstruction,
    pub transmon: TransmonConfig,
    pub two_qubit: TwoQubitConfig,
    pub ladder: LadderConfig,
    pub gtc: GtcConfig,
    /// ZZ strength for the `gtc` and `rabi` scenarios.
    pub zeta: Quantity,
    /// Rates, or `true` for the defaults and `false` for none.
    #[serde(deserialize_with = "decoherence_or_bool")]
    pub decoherence: DecoherenceConfig,
    /// `modulus` or `real_part` of the trace overlap.
    pub trace_phase: PhaseConvention,
    /// Objective the optimiser maximises.
    pub objective: Objective,
    /// Fixed offsets for `run`; when absent the offsets are optimised.
    /// Fixed offsets, or `null` / `"optimize"` to optimise them.
    #[serde(deserialize_with = "offsets_or_optimize")]
    pub offsets: Option<OffsetConfig>,
    /// Half-widths of the optimiser's search box.
    pub bounds: OffsetConfig,
    /// Integrator steps; `None` keeps the scenario default.
    pub steps: Option<usize>,
    pub seed_grid: usize,
    /// Initial basis label for population trajectories.
    pub initial: Option<String>,
    /// Steps between population samples.
    pub sample_stride: usize,
    pub sweep: SweepConfig,
    pub robustness_n: usize,
    /// ZZ strengths for the `gtc` comparison.
    pub zetas: Vec<Quantity>,
    /// Windows for the Magnus diagnostics.
    pub n_seg: usize,
}

fn decoherence_or_bool<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DecoherenceConfig, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Flag(bool),
        Rates(DecoherenceConfig),
    }
    Ok(match Either::deserialize(d)? {
        Either::Flag(true) => DecoherenceConfig::default(),
        Either::Flag(false) => DecoherenceConfig { kappa1: q(0.0), kappa_phi: q(0.0), ..DecoherenceConfig::default() },
        Either::Rates(r) => r,
    })
}

fn offsets_or_optimize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<OffsetConfig>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Word(String),
        Fixed(OffsetConfig),
    }
    match Option::<Either>::deserialize(d)? {
        None => Ok(None),
        Some(Either::Word(w)) if w == "optimize" => Ok(None),
        Some(Either::Word(w)) => {
            Err(de::Error::custom(format!("offsets must be an object or \"optimize\", got `{w}`")))
        }
        Some(Either::Fixed(o)) => Ok(Some(o)),
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            scenario: "not".into(),
            convention: Convention::default(),
            hadamard: HadamardConstruction::default(),
            transmon: TransmonConfig::default(),
            two_qubit: TwoQubitConfig::default(),
            ladder: LadderConfig::default(),
            gtc: GtcConfig::default(),
            zeta: q(0.0),
            decoherence: DecoherenceConfig::default(),
            trace_phase: PhaseConvention::default(),
            objective: Objective::Trace,
            offsets: None,
            bounds: {
                let b = Bounds::default();
                OffsetConfig { amp: q(b.amp), det: q(b.det), phase: q(b.phase) }
            },
            steps: None,
            seed_grid: 7,
            initial: None,
            sample_stride: 20,
            sweep: SweepConfig::default(),
            robustness_n: 5,
            zetas: [0.0, 0.25, 0.5, 1.0, 2.0].iter().map(|z| q(mhz(*z))).collect(),
            n_seg: 8,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn bounds(&self) -> Bounds {
        Bounds { amp: self.bounds.amp.0, det: self.bounds.det.0, phase: self.bounds.phase.0 }
    }

    pub fn transmon_params(&self) -> TransmonParams {
        TransmonParams {
            omega_m: self.transmon.omega_m.0,
            alpha: self.transmon.alpha.0,
            lambda: self.transmon.lambda.0,
        }
    }

    pub fn gtc_params(&self) -> GtcParams {
        let g = &self.gtc;
        GtcParams { chi0: g.chi0.0, xi0: g.xi0.0, gamma_g: g.gamma_g.0, chi1: g.chi1.0, chi3: g.chi3.0 }
    }

    pub fn two_qubit_model(&self) -> Result<TwoQubitModel> {
        let c = &self.two_qubit;
        let tau = leakctl_core::models::iswap_duration(c.g12.0, c.beta1.0)?;
        Ok(TwoQubitModel {
            g12: c.g12.0,
            alpha1: c.alpha1.0,
            alpha2: c.alpha2.0,
            delta1: c.delta1.0,
            nu1: c.nu1.0,
            beta1: c.beta1.0,
            phi1: c.phi1.0,
            tau,
        })
    }

    pub fn ladder_model(&self) -> LadderModel {
        let c = &self.ladder;
        LadderModel {
            theta: c.theta.0,
            phi01: c.phi01.0,
            phi12: c.phi12.0,
            ..LadderModel::transfer(c.omega_m.0, c.alpha.0, self.convention)
        }
    }

    /// Scenario with the configured integrator and decoherence.
    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        let p = self.transmon_params();
        let amp_per_mhz = mhz(1.0) / p.omega_m;
        let s = match self.scenario.as_str() {
            "not" => Scenario::single(GateKind::Not, p, self.convention),
            "hadamard" => {
                let m = SingleQubitModel::hadamard(p, self.convention, self.hadamard);
                Scenario::from_models(
                    "hadamard",
                    vec![Box::new(m)],
                    Target::Gate(GateKind::Hadamard.target()),
                    amp_per_mhz,
                )
            }
            "iswap" => Scenario::iswap(self.two_qubit_model()?)?,
            "stirap" => Scenario::stirap(self.ladder_model()),
            "gtc" => Scenario::gtc(p, &self.gtc_params(), self.zeta.0)?,
            "rabi" => Scenario::rabi_hadamard(p, self.zeta.0),
            other => {
                return Err(Error::Config(format!(
                    "unknown scenario `{other}`; expected not, hadamard, iswap, stirap, gtc or rabi"
                )))
            }
        };
        Ok(self.configure(s))
    }

    /// Applies the configured step count and decoherence to `s`.
    pub fn configure(&self, mut s: Scenario) -> Scenario {
        if let Some(n) = self.steps {
            s.integrator = IntegratorConfig { n_steps: Some(n), ..s.integrator };
        }
        s.trace_phase = self.trace_phase;
        s.decoherence = Decoherence {
            kappa1: self.decoherence.kappa1.0,
            kappa_phi: self.decoherence.kappa_phi.0,
            norm: self.decoherence.norm,
        };
        s
    }

    /// Checks that are cheaper to do up front than to discover mid-run.
    pub fn validate(&self) -> Result<()> {
        let p = self.transmon_params();
        if !(p.omega_m > 0.0 && p.alpha.is_finite() && p.lambda >= 0.0) {
            return Err(Error::Config("transmon omega_m must be positive and lambda non-negative".into()));
        }
        let d = &self.decoherence;
        if !(d.kappa1.0 >= 0.0 && d.kappa_phi.0 >= 0.0) {
            return Err(Error::Config("decoherence rates must be non-negative".into()));
        }
        if self.seed_grid == 0 {
            return Err(Error::Config("seed_grid must be at least 1".into()));
        }
        if let Some(n) = self.steps {
            if n < 100 {
                return Err(Error::Config(format!("steps must be at least 100, got {n}")));
            }
        }
        if self.sample_stride == 0 {
            return Err(Error::Config("sample_stride must be at least 1".into()));
        }
        if self.offsets.is_some_and(|o| !o.offsets().is_finite()) {
            return Err(Error::Config("offsets must be finite".into()));
        }
        Ok(())
    }

    /// Default initial state for population trajectories.
    pub fn initial_label(&self, scenario: &Scenario) -> String {
        if let Some(l) = &self.initial {
            return l.clone();
        }
        match &scenario.target {
            Target::State { initial, .. } => initial.clone(),
            Target::Gate(_) if self.scenario == "iswap" => "01".into(),
            Target::Gate(_) => scenario.models[0].computational_labels()[0].clone(),
        }
    }
}
