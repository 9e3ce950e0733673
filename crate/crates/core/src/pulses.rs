//! Control waveforms: sine envelopes, segmented schedules, STIRAP drive pairs,
//! geometric trajectory schedules and DRAG correction fields.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::OffsetSet;

/// Amplitude envelope of one segment, in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Envelope {
    /// `peak * sin(pi t / duration)`.
    Sine {
        peak: f64,
    },
    Constant {
        value: f64,
    },
}

/// Phase law of one segment, in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PhaseLaw {
    Constant {
        value: f64,
    },
    /// `base + rate * integral_0^t envelope`. The integral is taken over the
    /// programmed envelope, so amplitude offsets do not feed back into it.
    AreaTracking {
        base: f64,
        rate: f64,
    },
}

/// Detuning law of one segment, in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DetuningLaw {
    Constant {
        value: f64,
    },
    /// `ratio * envelope(t)`, again on the programmed envelope.
    Proportional {
        ratio: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub envelope: Envelope,
    pub phase: PhaseLaw,
    pub detuning: DetuningLaw,
}

/// Instantaneous drive controls.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Controls {
    pub omega: f64,
    pub phase: f64,
    pub detuning: f64,
}

impl Segment {
    /// Resonant, zero-phase sine segment.
    pub fn sine(peak: f64, duration: f64) -> Self {
        Segment {
            duration,
            envelope: Envelope::Sine { peak },
            phase: PhaseLaw::Constant { value: 0.0 },
            detuning: DetuningLaw::Constant { value: 0.0 },
        }
    }

    /// Sine segment whose duration is solved from the required area.
    pub fn sine_with_area(peak: f64, area: f64) -> Self {
        Self::sine(peak, sine_duration_for_area(peak, area))
    }

    pub fn with_phase(mut self, phase: PhaseLaw) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_detuning(mut self, detuning: DetuningLaw) -> Self {
        self.detuning = detuning;
        self
    }

    /// Envelope at local time `t`. The closed form is evaluated even outside
    /// `[0, duration]`, which finite differences at the edges rely on.
    pub fn envelope_at(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::Sine { peak } => {
                if self.duration > 0.0 {
                    peak * (PI * t / self.duration).sin()
                } else {
                    0.0
                }
            }
            Envelope::Constant { value } => value,
        }
    }

    /// `integral_0^t envelope`, closed form.
    pub fn envelope_integral(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::Sine { peak } => {
                if self.duration > 0.0 {
                    peak * self.duration / PI * (1.0 - (PI * t / self.duration).cos())
                } else {
                    0.0
                }
            }
            Envelope::Constant { value } => value * t,
        }
    }

    pub fn phase_at(&self, t: f64) -> f64 {
        match self.phase {
            PhaseLaw::Constant { value } => value,
            PhaseLaw::AreaTracking { base, rate } => base + rate * self.envelope_integral(t),
        }
    }

    pub fn detuning_at(&self, t: f64) -> f64 {
        match self.detuning {
            DetuningLaw::Constant { value } => value,
            DetuningLaw::Proportional { ratio } => ratio * self.envelope_at(t),
        }
    }

    pub fn controls_at(&self, t: f64) -> Controls {
        Controls { omega: self.envelope_at(t), phase: self.phase_at(t), detuning: self.detuning_at(t) }
    }

    pub fn area(&self) -> f64 {
        pulse_area(self)
    }
}

/// Duration of a sine pulse of the given peak that has the given area.
pub fn sine_duration_for_area(peak: f64, area: f64) -> f64 {
    PI * area / (2.0 * peak)
}

/// `Omega_m sin(pi t / T)` on `[0, T]`.
pub fn sine_envelope(omega_m: f64, duration: f64) -> Result<Segment> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::Config(format!("pulse duration must be positive, got {duration}")));
    }
    if !(omega_m > 0.0 && omega_m.is_finite()) {
        return Err(Error::Config(format!("peak amplitude must be positive, got {omega_m}")));
    }
    Ok(Segment::sine(omega_m, duration))
}

/// Area of the segment envelope by adaptive Simpson quadrature.
pub fn pulse_area(seg: &Segment) -> f64 {
    if seg.duration <= 0.0 {
        return 0.0;
    }
    let f = |t: f64| seg.envelope_at(t);
    let (a, b) = (0.0, seg.duration);
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = seg.duration * fa.abs().max(fm.abs()).max(fb.abs()).max(1.0);
    adaptive_simpson(&f, a, b, fa, fm, fb, whole, 1e-12 * scale, 40)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Ordered segments played back to back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
}

impl PulseSchedule {
    pub fn new(segments: Vec<Segment>) -> Self {
        PulseSchedule { segments }
    }

    pub fn single(seg: Segment) -> Self {
        PulseSchedule { segments: vec![seg] }
    }

    pub fn total_time(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment index and local time for `t`. Times before the start or after
    /// the end map into the first or last nonempty segment.
    pub fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let mut start = 0.0;
        let mut last = None;
        for (k, seg) in self.segments.iter().enumerate() {
            if seg.duration <= 0.0 {
                continue;
            }
            if last.is_none() && t < start {
                return Some((k, t - start));
            }
            if t < start + seg.duration {
                return Some((k, t - start));
            }
            last = Some((k, start));
            start += seg.duration;
        }
        last.map(|(k, s)| (k, t - s))
    }

    /// Programmed controls at `t`.
    pub fn controls(&self, t: f64) -> Controls {
        match self.locate(t) {
            Some((k, local)) => self.segments[k].controls_at(local),
            None => Controls::default(),
        }
    }

    /// Controls with static offsets applied: amplitude scaled by `1 + amp`,
    /// detuning shifted by `det`, phase shifted by `phase`.
    pub fn controls_with(&self, t: f64, off: &OffsetSet) -> Controls {
        let c = self.controls(t);
        Controls { omega: (1.0 + off.amp) * c.omega, phase: c.phase + off.phase, detuning: c.detuning + off.det }
    }

    /// Segment boundary times, including 0 and the total time.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut acc = 0.0;
        for s in &self.segments {
            acc += s.duration;
            out.push(acc);
        }
        out
    }
}

/// STIRAP drive pair sharing the envelope `Omega_m sin(pi t / tau)`:
/// `Omega_01 = Omega sin(theta/2)`, `Omega_12 = Omega cos(theta/2)`.
/// The common envelope must have area pi.
pub fn stirap_pair(theta: f64, omega_m: f64, tau: f64) -> Result<(Segment, Segment)> {
    stirap_pair_with_area(theta, omega_m, tau, PI)
}

/// As [`stirap_pair`] with an explicit required envelope area.
pub fn stirap_pair_with_area(theta: f64, omega_m: f64, tau: f64, area: f64) -> Result<(Segment, Segment)> {
    let common = sine_envelope(omega_m, tau)?;
    let got = pulse_area(&common);
    if ((got - area) / area).abs() > 1e-6 {
        return Err(Error::Config(format!("STIRAP envelope area {got:.9} differs from the required {area:.9}")));
    }
    let a = Segment::sine(omega_m * (0.5 * theta).sin(), tau);
    let b = Segment::sine(omega_m * (0.5 * theta).cos(), tau);
    Ok((a, b))
}

/// Sine-envelope duration with area pi, `pi^2 / (2 Omega_m)`.
pub fn stirap_duration(omega_m: f64) -> f64 {
    sine_duration_for_area(omega_m, PI)
}

/// Parameters of the five-segment geometric trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtcParams {
    pub chi0: f64,
    pub xi0: f64,
    pub gamma_g: f64,
    pub chi1: f64,
    pub chi3: f64,
}

impl GtcParams {
    /// Hadamard trajectory with the triangular choice `chi1 = 0`,
    /// `chi3 = 0.7 pi`.
    pub fn hadamard() -> Self {
        GtcParams { chi0: PI / 4.0, xi0: 0.0, gamma_g: 1.5 * PI, chi1: 0.0, chi3: 0.7 * PI }
    }

    /// `xi2 = xi0 + 2 gamma_g / (cos chi1 - cos chi3)`.
    pub fn xi2(&self) -> Result<f64> {
        let d = self.chi1.cos() - self.chi3.cos();
        if d.abs() < 1e-14 {
            return Err(Error::DegenerateTrajectory("cos chi1 equals cos chi3".into()));
        }
        Ok(self.xi0 + 2.0 * self.gamma_g / d)
    }

    /// Geometric phase recovered from an azimuthal endpoint.
    pub fn gamma_from_xi2(&self, xi2: f64) -> f64 {
        (xi2 - self.xi0) * (self.chi1.cos() - self.chi3.cos()) / 2.0
    }
}

/// Target of the trajectory,
/// `U = [[cos g + i sin g cos chi0, i sin g sin chi0 e^{-i xi0}],
///       [i sin g sin chi0 e^{i xi0}, cos g - i sin g cos chi0]]`.
pub fn gtc_target(chi0: f64, xi0: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = gamma.sin_cos();
    let off = Complex64::new(0.0, s * chi0.sin());
    [
        [Complex64::new(c, s * chi0.cos()), off * Complex64::from_polar(1.0, -xi0)],
        [off * Complex64::from_polar(1.0, xi0), Complex64::new(c, -s * chi0.cos())],
    ]
}

/// Five sine-envelope segments tracing the closed trajectory
/// `chi0 -> chi1 -> (xi sweep) -> chi3 -> (xi sweep back) -> chi0`.
///
/// Areas are `|chi0-chi1|`, `|xi2-xi0| |sin chi1 cos chi1|`, `|chi3-chi1|`,
/// `|xi0-xi2| |sin chi3 cos chi3|`, `|chi3-chi0|`. The azimuthal segments
/// carry the detuning `-Omega tan chi` and a phase that follows the pulse
/// area at rate `1/(sin chi cos chi)`.
pub fn gtc_schedule(p: &GtcParams, omega_m: f64) -> Result<PulseSchedule> {
    if !(omega_m > 0.0) {
        return Err(Error::Config("peak amplitude must be positive".into()));
    }
    let xi2 = p.xi2()?;
    let polar = |from: f64, to: f64, phase: f64| {
        Segment::sine_with_area(omega_m, (to - from).abs()).with_phase(PhaseLaw::Constant { value: phase })
    };
    let azimuthal = |chi: f64, span: f64, base: f64| -> Result<Segment> {
        let sc = chi.sin() * chi.cos();
        if chi.cos().abs() < 1e-12 && span.abs() > 0.0 {
            return Err(Error::DegenerateTrajectory(format!(
                "azimuthal arc at chi = {chi} needs an unbounded detuning"
            )));
        }
        if sc == 0.0 || span == 0.0 {
            return Ok(Segment::sine(omega_m, 0.0));
        }
        Ok(Segment::sine_with_area(omega_m, (span * sc).abs())
            .with_phase(PhaseLaw::AreaTracking { base, rate: 1.0 / sc })
            .with_detuning(DetuningLaw::Proportional { ratio: -chi.tan() }))
    };
    Ok(PulseSchedule::new(vec![
        polar(p.chi0, p.chi1, p.xi0 - FRAC_PI_2),
        azimuthal(p.chi1, xi2 - p.xi0, p.xi0 + PI)?,
        polar(p.chi1, p.chi3, xi2 + FRAC_PI_2),
        azimuthal(p.chi3, p.xi0 - xi2, xi2 + PI)?,
        polar(p.chi0, p.chi3, p.xi0 - FRAC_PI_2),
    ]))
}

/// DRAG correction for the three-level Hamiltonian `(1/2) B.S - alpha |2><2|`
/// with `B0 = (Omega cos phi, Omega sin phi, -Delta)` and
/// `B_d = (1/(2 alpha)) (-dB_y/dt + B_z B_x, dB_x/dt + B_z B_y, 0)`.
///
/// The overall sign is the one that removes leakage for this Hamiltonian,
/// where the 1-2 transition sits at `-alpha` from the drive.
#[derive(Clone, Debug, PartialEq)]
pub struct DragFields {
    pub schedule: PulseSchedule,
    pub alpha: f64,
    pub offsets: OffsetSet,
    /// Central-difference step, `T / 1e4` by default.
    pub step: f64,
}

pub fn drag_fields(schedule: &PulseSchedule, alpha: f64) -> Result<DragFields> {
    DragFields::new(schedule.clone(), alpha, OffsetSet::default())
}

impl DragFields {
    pub fn new(schedule: PulseSchedule, alpha: f64, offsets: OffsetSet) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::SingularAnharmonicity);
        }
        let step = schedule.total_time() / 1e4;
        Ok(DragFields { schedule, alpha, offsets, step })
    }

    pub fn b0(&self, t: f64) -> [f64; 3] {
        let c = self.schedule.controls_with(t, &self.offsets);
        [c.omega * c.phase.cos(), c.omega * c.phase.sin(), -c.detuning]
    }

    pub fn bd(&self, t: f64) -> [f64; 3] {
        let h = self.step;
        let (lo, hi) = (self.b0(t - h), self.b0(t + h));
        let dx = (hi[0] - lo[0]) / (2.0 * h);
        let dy = (hi[1] - lo[1]) / (2.0 * h);
        let b = self.b0(t);
        let k = 1.0 / (2.0 * self.alpha);
        [k * (-dy + b[2] * b[0]), k * (dx + b[2] * b[1]), 0.0]
    }

    /// `B0 + B_d`.
    pub fn b(&self, t: f64) -> [f64; 3] {
        let (b0, bd) = (self.b0(t), self.bd(t));
        [b0[0] + bd[0], b0[1] + bd[1], b0[2] + bd[2]]
    }
}
