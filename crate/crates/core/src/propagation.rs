//! Time-ordered unitary propagation and Lindblad master-equation integration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ladder_operators;
use crate::operators::{
    hermiticity_defect, unitarity_defect, unitary_step, Basis, CMatrix, DensityMatrix, Operator, StateVector, I, ONE,
    ZERO,
};
use crate::TAU;

/// Anything that yields a Hermitian matrix as a function of time.
pub trait Hamiltonian: Sync {
    fn basis(&self) -> Basis;
    fn matrix(&self, t: f64) -> CMatrix;

    /// Largest angular frequency over `[0, t_final]`; the default samples the
    /// Frobenius norm on a coarse grid.
    fn frequency_scale(&self, t_final: f64) -> f64 {
        (0..=64).map(|k| self.matrix(t_final * k as f64 / 64.0).norm()).fold(0.0, f64::max)
    }
}

/// Closure-backed Hamiltonian.
pub struct FnHamiltonian<F> {
    pub basis: Basis,
    pub f: F,
}

impl<F: Fn(f64) -> CMatrix + Sync> FnHamiltonian<F> {
    pub fn new(basis: Basis, f: F) -> Self {
        FnHamiltonian { basis, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Sync> Hamiltonian for FnHamiltonian<F> {
    fn basis(&self) -> Basis {
        self.basis.clone()
    }
    fn matrix(&self, t: f64) -> CMatrix {
        (self.f)(t)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Product of `exp(-i H(t_mid) dt)`.
    #[default]
    PiecewiseExponential,
    Rk4,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Number of time steps; `None` picks `max(2000, ceil(20 T f / 2 pi))`
    /// with `f` the Hamiltonian's frequency scale.
    pub n_steps: Option<usize>,
    pub method: Method,
    /// Record a sample every `sample_stride` steps; 0 disables sampling.
    pub sample_stride: usize,
}

impl IntegratorConfig {
    pub fn with_steps(n: usize) -> Self {
        IntegratorConfig { n_steps: Some(n), ..Default::default() }
    }

    pub fn sampled(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// Step count for a run of length `t_final`.
    pub fn steps_for<H: Hamiltonian + ?Sized>(&self, h: &H, t_final: f64) -> Result<usize> {
        match self.n_steps {
            Some(n) if n < 100 => Err(Error::Config(format!("n_steps must be at least 100, got {n}"))),
            Some(n) => Ok(n),
            None => Ok(default_steps(h.frequency_scale(t_final), t_final)),
        }
    }
}

pub fn default_steps(frequency_scale: f64, t_final: f64) -> usize {
    let n = (20.0 * t_final * frequency_scale / TAU).ceil();
    if n.is_finite() {
        (n as usize).max(2000)
    } else {
        2000
    }
}

/// Defects recorded for every run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub n_steps: usize,
    /// `||U^H U - I||_F` of the final propagator (unitary runs).
    pub unitarity_defect: f64,
    /// Largest `|tr rho(t) - tr rho(0)|` seen (Lindblad runs).
    pub trace_defect: f64,
    /// Smallest eigenvalue of the final density matrix (Lindblad runs).
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult<S> {
    pub final_state: S,
    pub samples: Vec<(f64, S)>,
    pub diagnostics: Diagnostics,
}

fn check_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Integration(format!("non-finite {what}")))
    }
}

/// `U(T) = T exp(-i int_0^T H dt)`.
pub fn propagate_unitary<H: Hamiltonian + ?Sized>(
    h: &H,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult<Operator>> {
    let basis = h.basis();
    let n = cfg.steps_for(h, t_final)?;
    let dim = basis.len();
    let dt = t_final / n as f64;
    let mut u = CMatrix::identity(dim, dim);
    let mut samples = Vec::new();
    let push = |t: f64, u: &CMatrix, samples: &mut Vec<(f64, Operator)>| {
        samples.push((t, Operator::new(basis.clone(), u.clone()).expect("square")));
    };
    if cfg.sample_stride > 0 {
        push(0.0, &u, &mut samples);
    }
    for k in 0..n {
        let t0 = k as f64 * dt;
        u = match cfg.method {
            Method::PiecewiseExponential => unitary_step(&h.matrix(t0 + 0.5 * dt), dt) * &u,
            Method::Rk4 => rk4_unitary_step(h, &u, t0, dt),
        };
        if cfg.sample_stride > 0 && ((k + 1) % cfg.sample_stride == 0 || k + 1 == n) {
            push(t0 + dt, &u, &mut samples);
        }
    }
    check_finite(&u, "propagator")?;
    let defect = unitarity_defect(&u);
    if defect > 1e-3 {
        return Err(Error::Integration(format!("propagator lost unitarity ({defect:e})")));
    }
    Ok(EvolutionResult {
        final_state: Operator::new(h.basis(), u).expect("square"),
        samples,
        diagnostics: Diagnostics { n_steps: n, unitarity_defect: defect, ..Default::default() },
    })
}

fn rk4_unitary_step<H: Hamiltonian + ?Sized>(h: &H, u: &CMatrix, t0: f64, dt: f64) -> CMatrix {
    let f = |t: f64, y: &CMatrix| h.matrix(t) * y * (-I);
    let k1 = f(t0, u);
    let k2 = f(t0 + 0.5 * dt, &(u + &k1 * Complex64::from(0.5 * dt)));
    let k3 = f(t0 + 0.5 * dt, &(u + &k2 * Complex64::from(0.5 * dt)));
    let k4 = f(t0 + dt, &(u + &k3 * Complex64::from(dt)));
    u + (k1 + (k2 + k3) * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0)
}

/// Pure-state evolution with optional sampling, via the unitary propagator.
pub fn propagate_state<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult<StateVector>> {
    let res = propagate_unitary(h, t_final, cfg)?;
    let samples = res.samples.iter().map(|(t, u)| Ok((*t, psi0.evolve(u.entries())?))).collect::<Result<Vec<_>>>()?;
    Ok(EvolutionResult { final_state: psi0.evolve(res.final_state.entries())?, samples, diagnostics: res.diagnostics })
}

/// Normalisation of the dissipator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipatorNorm {
    /// `(1/2) sum (kappa_u / 2) L(X_u)`: net `kappa_u / 4`.
    #[default]
    Reference,
    /// `sum (kappa_u / 2) L(X_u)`.
    Conventional,
}

/// Decay and dephasing rates, rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoherence {
    pub kappa1: f64,
    pub kappa_phi: f64,
    #[serde(default)]
    pub norm: DissipatorNorm,
}

impl Default for Decoherence {
    fn default() -> Self {
        Decoherence { kappa1: TAU * 2e3, kappa_phi: TAU * 2e3, norm: DissipatorNorm::Reference }
    }
}

impl Decoherence {
    pub fn new(kappa1: f64, kappa_phi: f64) -> Self {
        Decoherence { kappa1, kappa_phi, norm: DissipatorNorm::Reference }
    }

    /// Coefficient multiplying `L(X_u)` per unit rate.
    pub fn prefactor(&self) -> f64 {
        match self.norm {
            DissipatorNorm::Reference => 0.25,
            DissipatorNorm::Conventional => 0.5,
        }
    }
}

/// `X_1` and `X_phi` truncated at `dim`.
pub fn collapse_ops(dim: usize) -> Result<(Operator, Operator)> {
    if dim < 2 {
        return Err(Error::Dim("collapse operators need at least two levels".into()));
    }
    let (x1, xp) = ladder_operators(dim);
    Ok((Operator::new(Basis::levels(dim), x1)?, Operator::new(Basis::levels(dim), xp)?))
}

#[derive(Clone, Debug)]
struct SparseJump {
    coefficient: f64,
    entries: Vec<(usize, usize, Complex64)>,
}

/// Fixed Lindblad dissipator `sum_k c_k L(A_k)`.
#[derive(Clone, Debug)]
pub struct Dissipator {
    jumps: Vec<SparseJump>,
    /// `sum_k c_k A_k^H A_k`.
    loss: CMatrix,
}

impl Dissipator {
    pub fn new(decay: &[CMatrix], dephasing: &[CMatrix], deco: &Decoherence) -> Self {
        let dim = decay.first().or(dephasing.first()).map_or(0, |m| m.nrows());
        let mut jumps = Vec::new();
        let mut loss = CMatrix::zeros(dim, dim);
        let pre = deco.prefactor();
        let groups = [(decay, deco.kappa1), (dephasing, deco.kappa_phi)];
        for (ops, kappa) in groups {
            if kappa == 0.0 {
                continue;
            }
            for a in ops {
                let c = pre * kappa;
                let mut entries = Vec::new();
                for i in 0..a.nrows() {
                    for j in 0..a.ncols() {
                        if a[(i, j)] != ZERO {
                            entries.push((i, j, a[(i, j)]));
                        }
                    }
                }
                loss += a.adjoint() * a * Complex64::from(c);
                jumps.push(SparseJump { coefficient: c, entries });
            }
        }
        Dissipator { jumps, loss }
    }

    /// No dissipation.
    pub fn none(dim: usize) -> Self {
        Dissipator { jumps: Vec::new(), loss: CMatrix::zeros(dim, dim) }
    }

    /// Adds `sum_k c_k A_k rho A_k^H` to `out`.
    fn add_jumps(&self, rho: &CMatrix, out: &mut CMatrix) {
        for jump in &self.jumps {
            let c = Complex64::from(jump.coefficient);
            for &(i, k, a) in &jump.entries {
                for &(j, l, b) in &jump.entries {
                    out[(i, j)] += c * a * rho[(k, l)] * b.conj();
                }
            }
        }
    }
}

/// Right-hand side `-i (H_eff rho - rho H_eff^H) + jumps` with
/// `H_eff = H - (i/2) sum c A^H A`.
fn lindblad_rhs(h_eff: &CMatrix, diss: &Dissipator, rho: &CMatrix, out: &mut CMatrix) {
    let hr = h_eff * rho;
    // rho H_eff^H = (H_eff rho^H)^H = (H_eff rho)^H for Hermitian rho; the
    // stage inputs are only approximately Hermitian, so compute it directly.
    let rh = rho * h_eff.adjoint();
    *out = (hr - rh) * (-I);
    diss.add_jumps(rho, out);
}

fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// RK4 integration of several density matrices sharing the same generator.
fn lindblad_batch<H: Hamiltonian + ?Sized>(
    h: &H,
    rhos: &mut [CMatrix],
    diss: &Dissipator,
    t_final: f64,
    n: usize,
    mut on_step: impl FnMut(usize, f64, &[CMatrix]),
) -> Result<f64> {
    let dt = t_final / n as f64;
    let half = Complex64::from(0.5 * dt);
    let full = Complex64::from(dt);
    let sixth = Complex64::from(dt / 6.0);
    let traces0: Vec<Complex64> = rhos.iter().map(|r| r.trace()).collect();
    let mut worst_trace = 0.0f64;
    let mut h_prev_end: Option<CMatrix> = None;
    let loss_half = &diss.loss * Complex64::new(0.0, 0.5);
    let dim = rhos.first().map_or(0, |r| r.nrows());
    let (mut k1, mut k2, mut k3, mut k4) =
        (CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim));
    for step in 0..n {
        let t0 = step as f64 * dt;
        let h0 = match h_prev_end.take() {
            Some(m) => m,
            None => h.matrix(t0) - &loss_half,
        };
        let hm = h.matrix(t0 + 0.5 * dt) - &loss_half;
        let h1 = h.matrix(t0 + dt) - &loss_half;
        for rho in rhos.iter_mut() {
            lindblad_rhs(&h0, diss, rho, &mut k1);
            lindblad_rhs(&hm, diss, &(&*rho + &k1 * half), &mut k2);
            lindblad_rhs(&hm, diss, &(&*rho + &k2 * half), &mut k3);
            lindblad_rhs(&h1, diss, &(&*rho + &k3 * full), &mut k4);
            *rho += (&k1 + (&k2 + &k3) * Complex64::from(2.0) + &k4) * sixth;
            symmetrize(rho);
        }
        h_prev_end = Some(h1);
        for (rho, tr0) in rhos.iter().zip(&traces0) {
            worst_trace = worst_trace.max((rho.trace() - tr0).norm());
        }
        if !worst_trace.is_finite() || worst_trace > 1e-5 {
            return Err(Error::Integration(format!("trace drift {worst_trace:e} at t = {:e}", t0 + dt)));
        }
        on_step(step, t0 + dt, rhos);
    }
    for rho in rhos.iter() {
        check_finite(rho, "density matrix")?;
    }
    Ok(worst_trace)
}

/// Lindblad evolution of one density matrix.
pub fn lindblad_evolve<H: Hamiltonian + ?Sized>(
    h: &H,
    rho0: &DensityMatrix,
    diss: &Dissipator,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult<DensityMatrix>> {
    let basis = h.basis();
    if rho0.dim() != basis.len() {
        return Err(Error::Dim("initial state does not match the Hamiltonian".into()));
    }
    let n = cfg.steps_for(h, t_final)?;
    let mut rhos = vec![rho0.entries().clone()];
    let mut samples = Vec::new();
    if cfg.sample_stride > 0 {
        samples.push((0.0, rho0.clone()));
    }
    let stride = cfg.sample_stride;
    let trace_defect = lindblad_batch(h, &mut rhos, diss, t_final, n, |step, t, rs| {
        if stride > 0 && ((step + 1) % stride == 0 || step + 1 == n) {
            samples.push((t, DensityMatrix::from_raw(basis.clone(), rs[0].clone())));
        }
    })?;
    let rho = DensityMatrix::from_raw(basis.clone(), rhos.pop().expect("one state"));
    let min_eigenvalue = rho.min_eigenvalue();
    Ok(EvolutionResult {
        final_state: rho,
        samples,
        diagnostics: Diagnostics { n_steps: n, trace_defect, min_eigenvalue, unitarity_defect: 0.0 },
    })
}

/// Linear map on operators supported on a set of computational levels,
/// stored as the images of the matrix units `|i><j|`.
#[derive(Clone, Debug)]
pub struct Channel {
    basis: Basis,
    comp: Vec<usize>,
    /// Image of `|comp[i]><comp[j]|` at index `i * k + j`.
    images: Vec<CMatrix>,
    pub diagnostics: Diagnostics,
}

impl Channel {
    pub fn from_unitary(u: &Operator, comp: &[usize]) -> Self {
        let m = u.entries();
        let k = comp.len();
        let mut images = Vec::with_capacity(k * k);
        for &i in comp {
            for &j in comp {
                images.push(m.column(i) * m.column(j).adjoint());
            }
        }
        Channel {
            basis: u.basis().clone(),
            comp: comp.to_vec(),
            images,
            diagnostics: Diagnostics { unitarity_defect: unitarity_defect(m), ..Default::default() },
        }
    }

    /// Identity map on the given levels.
    pub fn identity(basis: Basis, comp: &[usize]) -> Self {
        let u = Operator::identity(basis);
        Self::from_unitary(&u, comp)
    }

    /// Builds the channel by evolving `k^2` valid density matrices and
    /// recovering the matrix-unit images by linearity.
    pub fn lindblad<H: Hamiltonian + ?Sized>(
        h: &H,
        diss: &Dissipator,
        comp: &[usize],
        t_final: f64,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        let basis = h.basis();
        let dim = basis.len();
        let n = cfg.steps_for(h, t_final)?;
        let k = comp.len();
        let unit = |i: usize, j: usize, c: Complex64| {
            let mut m = CMatrix::zeros(dim, dim);
            m[(i, j)] = c;
            m
        };
        // Inputs: |i><i|, then for i < j the real and imaginary superpositions.
        let mut inputs = Vec::new();
        for &i in comp {
            inputs.push(unit(i, i, ONE));
        }
        let mut pairs = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let (i, j) = (comp[a], comp[b]);
                let p = unit(i, i, ONE) + unit(j, j, ONE);
                inputs.push((&p + unit(i, j, ONE) + unit(j, i, ONE)) * Complex64::from(0.5));
                inputs.push((&p + unit(i, j, -I) + unit(j, i, I)) * Complex64::from(0.5));
                pairs.push((a, b));
            }
        }
        let trace_defect = lindblad_batch(h, &mut inputs, diss, t_final, n, |_, _, _| {})?;
        let mut images = vec![CMatrix::zeros(dim, dim); k * k];
        for a in 0..k {
            images[a * k + a] = inputs[a].clone();
        }
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let x = &inputs[k + 2 * p];
            let y = &inputs[k + 2 * p + 1];
            let diag = &images[a * k + a] + &images[b * k + b];
            let s = x * Complex64::from(2.0) - &diag;
            let d = y * Complex64::from(2.0) - &diag;
            images[a * k + b] = (&s + &d * I) * Complex64::from(0.5);
            images[b * k + a] = (&s - &d * I) * Complex64::from(0.5);
        }
        let min_eigenvalue = inputs
            .iter()
            .map(|r| DensityMatrix::from_raw(basis.clone(), r.clone()).min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        Ok(Channel {
            basis,
            comp: comp.to_vec(),
            images,
            diagnostics: Diagnostics { n_steps: n, trace_defect, min_eigenvalue, unitarity_defect: 0.0 },
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn computational_indices(&self) -> &[usize] {
        &self.comp
    }

    /// Output for the pure input `sum_i psi_i |comp[i]>`.
    pub fn apply_pure(&self, psi: &[Complex64]) -> CMatrix {
        let k = self.comp.len();
        let dim = self.basis.len();
        let mut out = CMatrix::zeros(dim, dim);
        for i in 0..k {
            for j in 0..k {
                let c = psi[i] * psi[j].conj();
                if c != ZERO {
                    out += &self.images[i * k + j] * c;
                }
            }
        }
        out
    }

    /// `<phi| Phi(|psi><psi|) |phi>` for `phi` given on the full basis.
    pub fn overlap(&self, psi: &[Complex64], phi: &[Complex64]) -> f64 {
        let k = self.comp.len();
        let mut total = ZERO;
        for i in 0..k {
            for j in 0..k {
                let c = psi[i] * psi[j].conj();
                if c == ZERO {
                    continue;
                }
                let img = &self.images[i * k + j];
                let mut e = ZERO;
                for (r, pr) in phi.iter().enumerate() {
                    if *pr == ZERO {
                        continue;
                    }
                    for (s, ps) in phi.iter().enumerate() {
                        if *ps != ZERO {
                            e += pr.conj() * img[(r, s)] * ps;
                        }
                    }
                }
                total += c * e;
            }
        }
        total.re
    }

    /// Largest Hermiticity defect among the diagonal images, a sanity check.
    pub fn hermiticity_defect(&self) -> f64 {
        let k = self.comp.len();
        (0..k).map(|a| hermiticity_defect(&self.images[a * k + a])).fold(0.0, f64::max)
    }
}
