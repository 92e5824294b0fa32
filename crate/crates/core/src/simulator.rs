//! Spectral-Galerkin simulation of
//!
//! ```text
//! ∂ₜφ = ∂ₓ²φ + φ − φ³ + √(2ε)·ξ(t, x)
//! ```
//!
//! truncated to wavenumbers `|k| ≤ K`, and mean-first-passage-time estimation
//! of the transition `φ ≡ −1 → φ ≡ +1`.
//!
//! Coefficients refer to an orthonormal basis: `e^{2πikx/L}/√L` (periodic,
//! `φ_{−k} = conj φ_k` implicit) or `1/√L, √(2/L)·cos(πkx/L)` (Neumann). In
//! this basis every mode receives an independent Wiener increment of
//! intensity `2ε`, and the cubic term is `N_k = −(1/L)·Σ_{k₁+k₂+k₃=k} φ_{k₁}φ_{k₂}φ_{k₃}`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BoundaryCondition, SystemParams};

pub const MIN_MODES: usize = 8;
pub const DEFAULT_MODES: usize = 16;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Smallest `2^a·3^b` strictly above `n`.
fn smooth_size_above(n: usize) -> usize {
    let mut best = usize::MAX;
    let mut p2 = 1;
    while p2 <= 2 * n + 2 {
        let mut candidate = p2;
        while candidate <= n {
            candidate *= 3;
        }
        best = best.min(candidate);
        p2 *= 2;
    }
    best
}

/// Galerkin coefficients at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    pub bc: BoundaryCondition,
    pub length: f64,
    /// `φ_k` for `k = 0..=K`; purely real for Neumann and for `k = 0`.
    pub coeffs: Vec<Complex64>,
    pub t: f64,
}

impl SpectralState {
    pub fn zero(bc: BoundaryCondition, length: f64, modes: usize) -> Self {
        Self { bc, length, coeffs: vec![Complex64::new(0.0, 0.0); modes + 1], t: 0.0 }
    }

    /// The uniform field `φ ≡ value`.
    pub fn uniform(bc: BoundaryCondition, length: f64, modes: usize, value: f64) -> Self {
        let mut state = Self::zero(bc, length, modes);
        state.coeffs[0] = Complex64::new(value * length.sqrt(), 0.0);
        state
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Spatial mean `(1/L)∫φ dx`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / self.length.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Real-space samples on `n` points of one period of the basis: `[0, L)`
    /// for periodic and `[0, 2L)` for Neumann. The imaginary parts of the
    /// reconstruction are returned alongside.
    pub fn reconstruct(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut buffer = vec![Complex64::new(0.0, 0.0); n];
        fill_collocation_buffer(self.bc, self.length, &self.coeffs, &mut buffer);
        FftPlanner::new().plan_fft_inverse(n).process(&mut buffer);
        buffer.iter().map(|c| (c.re, c.im)).unzip()
    }
}

/// Writes the coefficients into an unnormalized inverse-FFT buffer whose
/// transform is the field on the collocation grid.
fn fill_collocation_buffer(bc: BoundaryCondition, length: f64, coeffs: &[Complex64], buffer: &mut [Complex64]) {
    let n = buffer.len();
    buffer.fill(Complex64::new(0.0, 0.0));
    match bc {
        BoundaryCondition::Periodic => {
            let scale = 1.0 / length.sqrt();
            buffer[0] = coeffs[0] * scale;
            for (k, c) in coeffs.iter().enumerate().skip(1) {
                buffer[k] = c * scale;
                buffer[n - k] = c.conj() * scale;
            }
        }
        BoundaryCondition::Neumann => {
            buffer[0] = Complex64::new(coeffs[0].re / length.sqrt(), 0.0);
            let half = 0.5 * (2.0 / length).sqrt();
            for (k, c) in coeffs.iter().enumerate().skip(1) {
                let v = Complex64::new(c.re * half, 0.0);
                buffer[k] = v;
                buffer[n - k] = v;
            }
        }
    }
}

/// Galerkin-truncated drift of the SPDE.
#[derive(Clone)]
pub struct GalerkinModel {
    bc: BoundaryCondition,
    length: f64,
    modes: usize,
    linear: Vec<f64>,
    cubic: bool,
    grid: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GalerkinModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GalerkinModel")
            .field("bc", &self.bc)
            .field("length", &self.length)
            .field("modes", &self.modes)
            .field("linear", &self.linear)
            .field("cubic", &self.cubic)
            .field("grid", &self.grid)
            .finish()
    }
}

impl GalerkinModel {
    /// Model with cutoff `K = modes` and linear rates `λ_k = −1 + q_k²`.
    pub fn new(bc: BoundaryCondition, length: f64, modes: usize) -> Result<Self> {
        crate::params::validate_length(length)?;
        if modes < 1 {
            return Err(Error::InvalidParameter {
                name: "modes",
                value: modes as f64,
                reason: "need at least one mode",
            });
        }
        let unit = bc.wavenumber_unit(length);
        let linear = (0..=modes).map(|k| -1.0 + (unit * k as f64).powi(2)).collect();
        // cubic products reach wavenumber 3K; a grid above 4K keeps |k| ≤ K alias-free
        let grid = smooth_size_above(4 * modes);
        let mut planner = FftPlanner::new();
        Ok(Self {
            bc,
            length,
            modes,
            linear,
            cubic: true,
            grid,
            forward: planner.plan_fft_forward(grid),
            inverse: planner.plan_fft_inverse(grid),
        })
    }

    /// Replaces the linear rates `λ_k`.
    pub fn with_linear(mut self, linear: Vec<f64>) -> Result<Self> {
        if linear.len() != self.modes + 1 || linear.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "linear",
                value: linear.len() as f64,
                reason: "need one finite rate per mode k = 0..=K",
            });
        }
        self.linear = linear;
        Ok(self)
    }

    /// Drops the cubic term, leaving independent Ornstein–Uhlenbeck modes.
    pub fn without_cubic(mut self) -> Self {
        self.cubic = false;
        self
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Size of the collocation grid used for the cubic product.
    pub fn grid_size(&self) -> usize {
        self.grid
    }

    /// Scratch space for [`nonlinear_term_into`](Self::nonlinear_term_into).
    pub fn workspace(&self) -> Workspace {
        let scratch_len = self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len());
        Workspace {
            buffer: vec![Complex64::new(0.0, 0.0); self.grid],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            nonlinear: vec![Complex64::new(0.0, 0.0); self.modes + 1],
        }
    }

    /// `N_k = −⟨φ³, e_k⟩` for `k = 0..=K`, evaluated pseudospectrally.
    pub fn nonlinear_term(&self, state: &SpectralState) -> Vec<Complex64> {
        let mut ws = self.workspace();
        self.nonlinear_term_into(&state.coeffs, &mut ws);
        ws.nonlinear
    }

    /// Writes `N_k` into `ws.nonlinear`.
    pub fn nonlinear_term_into(&self, coeffs: &[Complex64], ws: &mut Workspace) {
        if !self.cubic {
            ws.nonlinear.fill(Complex64::new(0.0, 0.0));
            return;
        }
        fill_collocation_buffer(self.bc, self.length, coeffs, &mut ws.buffer);
        self.inverse.process_with_scratch(&mut ws.buffer, &mut ws.scratch);
        for v in ws.buffer.iter_mut() {
            let x = v.re;
            *v = Complex64::new(x * x * x, 0.0);
        }
        self.forward.process_with_scratch(&mut ws.buffer, &mut ws.scratch);
        let m = self.grid as f64;
        match self.bc {
            BoundaryCondition::Periodic => {
                let scale = -self.length.sqrt() / m;
                for (k, out) in ws.nonlinear.iter_mut().enumerate() {
                    *out = ws.buffer[k] * scale;
                }
                ws.nonlinear[0].im = 0.0;
            }
            BoundaryCondition::Neumann => {
                let base = -self.length / m;
                let norm0 = 1.0 / self.length.sqrt();
                let norm = (2.0 / self.length).sqrt();
                for (k, out) in ws.nonlinear.iter_mut().enumerate() {
                    let n = if k == 0 { norm0 } else { norm };
                    *out = Complex64::new(base * n * ws.buffer[k].re, 0.0);
                }
            }
        }
    }

    /// Gaussian draws consumed by one step.
    pub fn noise_len(&self) -> usize {
        match self.bc {
            BoundaryCondition::Periodic => 2 * self.modes + 1,
            BoundaryCondition::Neumann => self.modes + 1,
        }
    }
}

/// Reusable buffers for the pseudospectral product.
#[derive(Debug, Clone)]
pub struct Workspace {
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
    nonlinear: Vec<Complex64>,
}

/// Exponential-time-differencing Euler–Maruyama integrator.
///
/// Each mode advances as `φ ← e^{−λdt}φ + (1 − e^{−λdt})/λ·N + σ·ζ` with the
/// exact Ornstein–Uhlenbeck standard deviation `σ² = ε(1 − e^{−2λdt})/λ`.
#[derive(Debug, Clone)]
pub struct EtdStepper {
    model: GalerkinModel,
    dt: f64,
    decay: Vec<f64>,
    drift_weight: Vec<f64>,
    noise_scale: Vec<f64>,
}

impl EtdStepper {
    pub fn new(model: GalerkinModel, eps: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter { name: "dt", value: dt, reason: "time step must be finite and > 0" });
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "noise intensity must be finite and >= 0",
            });
        }
        let mut decay = Vec::with_capacity(model.modes + 1);
        let mut drift_weight = Vec::with_capacity(model.modes + 1);
        let mut noise_scale = Vec::with_capacity(model.modes + 1);
        for &lambda in &model.linear {
            decay.push((-lambda * dt).exp());
            if lambda == 0.0 {
                drift_weight.push(dt);
                noise_scale.push((2.0 * eps * dt).sqrt());
            } else {
                drift_weight.push(-(-lambda * dt).exp_m1() / lambda);
                noise_scale.push((eps * -(-2.0 * lambda * dt).exp_m1() / lambda).sqrt());
            }
        }
        Ok(Self { model, dt, decay, drift_weight, noise_scale })
    }

    pub fn model(&self) -> &GalerkinModel {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` by one step with the given standard normal draws
    /// (`noise.len() == model.noise_len()`).
    pub fn step(&self, state: &mut SpectralState, noise: &[f64], ws: &mut Workspace) {
        debug_assert_eq!(noise.len(), self.model.noise_len());
        self.model.nonlinear_term_into(&state.coeffs, ws);
        let periodic = self.model.bc == BoundaryCondition::Periodic;
        for k in 0..state.coeffs.len() {
            let kick = if periodic && k > 0 {
                Complex64::new(noise[2 * k - 1], noise[2 * k]) * std::f64::consts::FRAC_1_SQRT_2
            } else {
                Complex64::new(noise[k], 0.0)
            };
            state.coeffs[k] =
                state.coeffs[k] * self.decay[k] + ws.nonlinear[k] * self.drift_weight[k] + kick * self.noise_scale[k];
        }
        state.t += self.dt;
    }
}

/// Transition direction: `−1 → +1` or its mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Up,
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: SystemParams,
    /// Mode cutoff `K`.
    pub modes: usize,
    pub dt: f64,
    pub t_max: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// Spatial-mean level that counts as committed to the target well.
    pub crossing_threshold: f64,
}

impl SimConfig {
    pub fn new(params: SystemParams) -> Self {
        Self {
            params,
            modes: DEFAULT_MODES,
            dt: DEFAULT_DT,
            t_max: 1e4,
            n_traj: 500,
            seed: 0,
            crossing_threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, value: f64, reason| Err(Error::InvalidParameter { name, value, reason });
        if self.modes < MIN_MODES {
            return bad("modes", self.modes as f64, "mode cutoff must be at least 8");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt", self.dt, "time step must be finite and > 0");
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad("tmax", self.t_max, "horizon must be finite and > 0");
        }
        if self.n_traj < 1 {
            return bad("ntraj", 0.0, "need at least one trajectory");
        }
        if !(self.crossing_threshold > 0.0 && self.crossing_threshold < 1.0) {
            return bad("crossing_threshold", self.crossing_threshold, "threshold must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn stepper(&self) -> Result<EtdStepper> {
        self.validate()?;
        let model = GalerkinModel::new(self.params.bc, self.params.length, self.modes)?;
        EtdStepper::new(model, self.params.eps, self.dt)
    }

    fn max_steps(&self) -> u64 {
        (self.t_max / self.dt).ceil() as u64
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Passage {
    Crossed { time: f64 },
    Censored,
}

/// Per-trajectory random stream: the trajectory index selects a ChaCha stream.
pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// Integrates from `φ ≡ ∓1` until the spatial mean reaches `±threshold` or `t_max`.
pub fn run_to_transition(
    stepper: &EtdStepper,
    config: &SimConfig,
    trajectory: u64,
    direction: Direction,
) -> Result<Passage> {
    let model = stepper.model();
    let sign = direction.sign();
    let mut rng = trajectory_rng(config.seed, trajectory);
    let mut state = SpectralState::uniform(model.bc, model.length, model.modes, -sign);
    let mut ws = model.workspace();
    let mut noise = vec![0.0; model.noise_len()];
    let threshold = config.crossing_threshold;
    for step in 1..=config.max_steps() {
        for z in noise.iter_mut() {
            *z = sign * rng.sample::<f64, _>(StandardNormal);
        }
        stepper.step(&mut state, &noise, &mut ws);
        let progress = sign * state.mean();
        if !progress.is_finite() {
            return Err(Error::BlowUp { seed: config.seed, trajectory, step });
        }
        if progress >= threshold {
            return Ok(Passage::Crossed { time: step as f64 * stepper.dt() });
        }
    }
    Ok(Passage::Censored)
}

/// One ensemble member, including failures.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub trajectory: u64,
    pub outcome: std::result::Result<Passage, Error>,
}

/// Runs all trajectories in parallel; records are ordered by trajectory index.
pub fn simulate_ensemble(config: &SimConfig, direction: Direction) -> Result<Vec<TrajectoryRecord>> {
    let stepper = config.stepper()?;
    Ok((0..config.n_traj as u64)
        .into_par_iter()
        .map(|trajectory| TrajectoryRecord {
            trajectory,
            outcome: run_to_transition(&stepper, config, trajectory, direction),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfptEstimate {
    pub mean_passage_time: f64,
    pub std_error: f64,
    pub n_completed: usize,
    pub n_censored: usize,
    pub n_failed: usize,
    pub rate: f64,
    /// 95% interval for the rate from the delta method.
    pub rate_ci: (f64, f64),
}

impl MfptEstimate {
    /// Statistics over the completed trajectories.
    pub fn from_records(records: &[TrajectoryRecord], t_max: f64) -> Result<Self> {
        let times: Vec<f64> = records
            .iter()
            .filter_map(|r| match r.outcome {
                Ok(Passage::Crossed { time }) => Some(time),
                _ => None,
            })
            .collect();
        let n_censored = records.iter().filter(|r| matches!(r.outcome, Ok(Passage::Censored))).count();
        let n_failed = records.iter().filter(|r| r.outcome.is_err()).count();
        if times.is_empty() {
            return Err(Error::EstimateUnavailable { n_traj: records.len(), t_max });
        }
        let n = times.len() as f64;
        let mean = times.iter().sum::<f64>() / n;
        let variance =
            if times.len() > 1 { times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        let std_error = (variance / n).sqrt();
        let rate = 1.0 / mean;
        let half_width = 1.96 * std_error / (mean * mean);
        Ok(Self {
            mean_passage_time: mean,
            std_error,
            n_completed: times.len(),
            n_censored,
            n_failed,
            rate,
            rate_ci: (rate - half_width, rate + half_width),
        })
    }
}

/// Ensemble records together with their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MfptRun {
    pub records: Vec<TrajectoryRecord>,
    pub estimate: MfptEstimate,
}

pub fn estimate_mfpt(config: &SimConfig) -> Result<MfptEstimate> {
    Ok(run_mfpt(config)?.estimate)
}

pub fn run_mfpt(config: &SimConfig) -> Result<MfptRun> {
    let records = simulate_ensemble(config, Direction::Up)?;
    let estimate = MfptEstimate::from_records(&records, config.t_max)?;
    Ok(MfptRun { records, estimate })
}
