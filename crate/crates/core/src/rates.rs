//! Kramers rate prefactors: the classical determinant formulas, their
//! bifurcation-corrected versions and the universal scaling functions.
//!
//! Throughout, `s = √(3ε/(4L))` is the width of the quartic normal form
//! along the bifurcating direction, and scaling functions are evaluated at
//! `α = (eigenvalue)/s`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instanton::{activation_energy, solve_m_from_length};
use crate::params::{validate_length, BoundaryCondition, SystemParams};
use crate::quadrature::{integrate_to_infinity, integrate_with_breakpoints, Tolerance};
use crate::specfun::{
    bessel_i14_scaled, bessel_k14_scaled, erfc, erfcx, legendre_defect, EllipticModulus, QuarterOrder, GAMMA_QUARTER,
    GAMMA_THREE_QUARTERS,
};
use crate::spectrum::{mu0, mu1_approx, mu1_numerical, DEFAULT_HESSIAN_MODES};

/// Largest noise intensity accepted by the corrected prefactor.
pub const MAX_EPS: f64 = 0.5;

/// Below this argument the scaling functions use their `α → 0` limits.
const ALPHA_LIMIT: f64 = 1e-14;

/// `Ψ₊(0) = Ψ₋(0) = Γ(1/4)·2^{−5/4}/√π`.
pub fn psi_at_zero() -> f64 {
    GAMMA_QUARTER * 2f64.powf(-1.25) / PI.sqrt()
}

fn check_alpha(function: &'static str, alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { function, value: alpha, domain: "[0, ∞)" })
    }
}

/// `Ψ₊(α) = √(α(1+α)/(8π))·e^{α²/16}·K_{1/4}(α²/16)`.
pub fn psi_plus(alpha: f64) -> Result<f64> {
    check_alpha("psi_plus", alpha)?;
    if alpha < ALPHA_LIMIT {
        return Ok(psi_at_zero());
    }
    Ok((alpha * (1.0 + alpha) / (8.0 * PI)).sqrt() * bessel_k14_scaled(alpha * alpha / 16.0)?)
}

/// `Ψ₋(α) = √(πα(1+α)/32)·e^{−α²/64}·[I_{−1/4} + I_{1/4}](α²/64)`.
pub fn psi_minus(alpha: f64) -> Result<f64> {
    check_alpha("psi_minus", alpha)?;
    if alpha < ALPHA_LIMIT {
        return Ok((PI / 32.0).sqrt() * 2f64.powf(1.75) / GAMMA_THREE_QUARTERS);
    }
    let z = alpha * alpha / 64.0;
    let bessel = bessel_i14_scaled(QuarterOrder::Minus, z)? + bessel_i14_scaled(QuarterOrder::Plus, z)?;
    Ok((PI * alpha * (1.0 + alpha) / 32.0).sqrt() * bessel)
}

/// `Ψ̃₊(α) = √(π/8)·(1+α)·e^{α²/8}·[1 − erf(α/2^{3/2})]`.
pub fn psi_plus_tilde(alpha: f64) -> Result<f64> {
    check_alpha("psi_plus_tilde", alpha)?;
    Ok((PI / 8.0).sqrt() * (1.0 + alpha) * erfcx(alpha / (2.0 * SQRT_2)))
}

/// Standard normal distribution function `½[1 + erf(x/√2)]`.
pub fn phi_switch(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

fn ln_sinh(x: f64) -> f64 {
    if x < 1.0 {
        x.sinh().ln()
    } else {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn quartic_width(length: f64, eps: f64) -> f64 {
    (3.0 * eps / (4.0 * length)).sqrt()
}

fn validate_eps(eps: f64) -> Result<f64> {
    if eps.is_finite() && eps > 0.0 && eps <= MAX_EPS {
        Ok(eps)
    } else {
        Err(Error::InvalidParameter { name: "eps", value: eps, reason: "noise intensity must lie in (0, 0.5]" })
    }
}

/// Which transition state governs the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    UniformSaddle,
    InstantonSaddle,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::UniformSaddle => "uniform_saddle",
            Regime::InstantonSaddle => "instanton_saddle",
        }
    }
}

/// Source of the second instanton eigenvalue in the Neumann correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecondEigenvalue {
    /// The small-`m` approximation `3m`.
    #[default]
    ThreeM,
    /// Diagonalization of the instanton Hessian with this many modes.
    Numerical { modes: usize },
}

impl SecondEigenvalue {
    pub fn numerical() -> Self {
        SecondEigenvalue::Numerical { modes: DEFAULT_HESSIAN_MODES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateOptions {
    pub second_eigenvalue: SecondEigenvalue,
}

/// All ingredients of `Γ = Γ₀·e^{−ΔW/ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub bc: BoundaryCondition,
    #[serde(rename = "L")]
    pub length: f64,
    pub eps: f64,
    pub regime: Regime,
    /// Instanton modulus; absent on the uniform branch.
    pub m: Option<f64>,
    #[serde(rename = "deltaW")]
    pub delta_w: f64,
    /// Classical prefactor, `+∞` exactly at the critical length.
    pub gamma0_classical: f64,
    /// `gamma0_corrected / gamma0_classical`; 0 where the classical value is infinite.
    pub correction_factor: f64,
    pub gamma0_corrected: f64,
    /// Explicit power of `ε` carried by both prefactors.
    pub eps_exponent: f64,
    pub rate: f64,
}

struct Prefactors {
    ln_classical: Option<f64>,
    ln_corrected: f64,
    m: Option<f64>,
    eps_exponent: f64,
}

fn evaluate(length: f64, eps: f64, bc: BoundaryCondition, options: RateOptions) -> Result<Prefactors> {
    let s = quartic_width(length, eps);
    let lc = bc.critical_length();
    match (bc, bc.is_uniform_saddle(length)) {
        (BoundaryCondition::Neumann, true) => {
            let lambda1 = (PI / length).powi(2) - 1.0;
            // λ₁/sin L without cancellation near L = π
            let ratio = (PI + length) / (length * length * sinc(PI - length));
            let base = -(2f64.powf(0.75) * PI).ln();
            let ln_sinh = ln_sinh(SQRT_2 * length);
            let ln_corrected = base + 0.5 * (ln_sinh + ratio.ln() - (lambda1 + s).ln()) + psi_plus(lambda1 / s)?.ln();
            let ln_classical = (length < lc).then(|| base + 0.5 * (ln_sinh - length.sin().ln()));
            Ok(Prefactors { ln_classical, ln_corrected, m: None, eps_exponent: 0.0 })
        }
        (BoundaryCondition::Periodic, true) => {
            let lambda1 = (2.0 * PI / length).powi(2) - 1.0;
            let ratio = 2.0 * (2.0 * PI + length) / (length * length * sinc(0.5 * (2.0 * PI - length)));
            let base = -(2.0 * PI).ln();
            let ln_sinh = ln_sinh(length * FRAC_1_SQRT_2);
            let ln_corrected = base + ratio.ln() + ln_sinh - (lambda1 + s).ln() + psi_plus_tilde(lambda1 / s)?.ln();
            let ln_classical = (length < lc).then(|| base + ln_sinh - (0.5 * length).sin().ln());
            Ok(Prefactors { ln_classical, ln_corrected, m: None, eps_exponent: 0.0 })
        }
        (BoundaryCondition::Neumann, false) => {
            let m = solve_m_from_length(length, bc)?;
            let ln_classical = neumann_instanton_ln_classical(length, m)?;
            let mu1 = match options.second_eigenvalue {
                SecondEigenvalue::ThreeM => mu1_approx(m),
                SecondEigenvalue::Numerical { modes } => mu1_numerical(length, modes)?,
            };
            let correction = 0.5 * (mu1 / (mu1 + s)).sqrt() * psi_minus(mu1 / s)?;
            Ok(Prefactors {
                ln_classical: Some(ln_classical),
                ln_corrected: ln_classical + correction.ln(),
                m: Some(m.value()),
                eps_exponent: 0.0,
            })
        }
        (BoundaryCondition::Periodic, false) => {
            let m = solve_m_from_length(length, bc)?;
            let ln_classical = periodic_instanton_ln_classical(length, eps, m)?;
            let switch = phi_switch(3.0 * m.value() / (2.0 * (3.0 * eps / length).sqrt()));
            Ok(Prefactors {
                ln_classical: Some(ln_classical),
                ln_corrected: ln_classical + switch.ln(),
                m: Some(m.value()),
                eps_exponent: -0.5,
            })
        }
    }
}

/// `(1/π)|μ₀|·√(sinh(√2L)/(√2·|(1−m)K − (1+m)E|))`.
fn neumann_instanton_ln_classical(length: f64, m: EllipticModulus) -> Result<f64> {
    let defect = legendre_defect(m)?;
    Ok(-PI.ln() + mu0(m).abs().ln() + 0.5 * (ln_sinh(SQRT_2 * length) - (SQRT_2 * defect).ln()))
}

/// `L·|μ₀|/(2π)^{3/2}·√(2m(1−m)²/((1+m)^{5/2}·|(1+m)E − (1−m)K|))·sinh(L/√2)·ε^{−1/2}`.
fn periodic_instanton_ln_classical(length: f64, eps: f64, m: EllipticModulus) -> Result<f64> {
    let mv = m.value();
    let defect = legendre_defect(m)?;
    let ln_root = 0.5 * ((2.0 * mv).ln() + 2.0 * (1.0 - mv).ln() - 2.5 * (1.0 + mv).ln() - defect.ln());
    Ok(length.ln() + mu0(m).abs().ln() - 1.5 * (2.0 * PI).ln() + ln_root + ln_sinh(length * FRAC_1_SQRT_2)
        - 0.5 * eps.ln())
}

/// Classical Kramers prefactor. `eps` enters only the periodic instanton branch.
pub fn prefactor_classical(length: f64, bc: BoundaryCondition, eps: f64) -> Result<f64> {
    validate_length(length)?;
    let lc = bc.critical_length();
    if length == lc {
        return Err(Error::DivergentClassicalPrefactor { bc, length });
    }
    if length < lc {
        // ε does not enter; any admissible value works
        let p = evaluate(length, MAX_EPS, bc, RateOptions::default())?;
        return Ok(p.ln_classical.expect("classical prefactor below the critical length").exp());
    }
    let m = solve_m_from_length(length, bc)?;
    let ln = match bc {
        BoundaryCondition::Neumann => neumann_instanton_ln_classical(length, m)?,
        BoundaryCondition::Periodic => {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "eps",
                    value: eps,
                    reason: "the periodic instanton prefactor scales with eps^(-1/2)",
                });
            }
            periodic_instanton_ln_classical(length, eps, m)?
        }
    };
    Ok(ln.exp())
}

/// Corrected prefactor with the default options (`μ₁ ≈ 3m`).
pub fn prefactor_corrected(length: f64, eps: f64, bc: BoundaryCondition) -> Result<RateBreakdown> {
    prefactor_corrected_with(length, eps, bc, RateOptions::default())
}

pub fn prefactor_corrected_with(
    length: f64,
    eps: f64,
    bc: BoundaryCondition,
    options: RateOptions,
) -> Result<RateBreakdown> {
    validate_length(length)?;
    validate_eps(eps)?;
    let p = evaluate(length, eps, bc, options)?;
    let delta_w = activation_energy(length, bc)?;
    let gamma0_corrected = p.ln_corrected.exp();
    let (gamma0_classical, correction_factor) = match p.ln_classical {
        Some(ln) => (ln.exp(), (p.ln_corrected - ln).exp()),
        None => (f64::INFINITY, 0.0),
    };
    Ok(RateBreakdown {
        bc,
        length,
        eps,
        regime: if bc.is_uniform_saddle(length) { Regime::UniformSaddle } else { Regime::InstantonSaddle },
        m: p.m,
        delta_w,
        gamma0_classical,
        correction_factor,
        gamma0_corrected,
        eps_exponent: p.eps_exponent,
        rate: (p.ln_corrected - delta_w / eps).exp(),
    })
}

/// Full Kramers rate `Γ₀·e^{−ΔW/ε}` with the corrected prefactor.
pub fn kramers_rate(params: &SystemParams) -> Result<RateBreakdown> {
    prefactor_corrected(params.length, params.eps, params.bc)
}

/// `Σ_{k=1}^{K} mult_k·ln(η_k/|λ_k|)` at the uniform saddle.
fn log_determinant_sum(length: f64, bc: BoundaryCondition, k_max: usize) -> f64 {
    let unit = bc.wavenumber_unit(length);
    (1..=k_max)
        .map(|k| {
            let inv_q2 = (unit * k as f64).powi(-2);
            bc.multiplicity(k) as f64 * ((2.0 * inv_q2).ln_1p() - (-inv_q2).ln_1p())
        })
        .sum()
}

fn check_determinant_input(length: f64, bc: BoundaryCondition, k_max: usize) -> Result<()> {
    validate_length(length)?;
    let critical = bc.critical_length();
    if length >= critical {
        return Err(Error::UnsupportedSaddle { length, critical });
    }
    if k_max < 10 {
        return Err(Error::InvalidParameter {
            name: "K_max",
            value: k_max as f64,
            reason: "the determinant product needs at least 10 factors",
        });
    }
    Ok(())
}

fn prefactor_from_log_sum(sum: f64) -> f64 {
    // k = 0 contributes η₀/|λ₀| = 2 and the prefactor |λ₀| = 1
    (0.5 * (2f64.ln() + sum)).exp() / (2.0 * PI)
}

/// `(1/2π)·|λ₀|·√(∏_{k≤K} η_k/|λ_k|)` truncated at `K = k_max`, without extrapolation.
pub fn prefactor_from_determinants_truncated(length: f64, bc: BoundaryCondition, k_max: usize) -> Result<f64> {
    check_determinant_input(length, bc, k_max)?;
    Ok(prefactor_from_log_sum(log_determinant_sum(length, bc, k_max)))
}

/// Truncated determinant product with Richardson extrapolation of the log-sum
/// in `1/K` through `K`, `K/2`, `K/4`.
pub fn prefactor_from_determinants(length: f64, bc: BoundaryCondition, k_max: usize) -> Result<f64> {
    check_determinant_input(length, bc, k_max)?;
    let s1 = log_determinant_sum(length, bc, k_max / 4);
    let s2 = log_determinant_sum(length, bc, k_max / 2);
    let s4 = log_determinant_sum(length, bc, k_max);
    let (h1, h2, h4) = (4.0 / k_max as f64, 2.0 / k_max as f64, 1.0 / k_max as f64);
    // quadratic fit S(h) = S∞ + a h + b h² through the three points, evaluated at h = 0
    let limit = s1 * h2 * h4 / ((h1 - h2) * (h1 - h4))
        + s2 * h1 * h4 / ((h2 - h1) * (h2 - h4))
        + s4 * h1 * h2 / ((h4 - h1) * (h4 - h2));
    Ok(prefactor_from_log_sum(limit))
}

/// Quartic potential `u(φ) = ½Lλ₁φ² + cφ⁴` along a bifurcating direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticNormalForm {
    pub lambda1: f64,
    pub quartic_coeff: f64,
    pub length: f64,
}

impl QuarticNormalForm {
    /// Normal form along `√2·cos(πx/L)`, where `c = 3L/8`.
    pub fn along_cosine(lambda1: f64, length: f64) -> Self {
        Self { lambda1, quartic_coeff: 0.375 * length, length }
    }

    pub fn energy(&self, phi: f64) -> f64 {
        let phi2 = phi * phi;
        0.5 * self.length * self.lambda1 * phi2 + self.quartic_coeff * phi2 * phi2
    }
}

/// `∫_ℝ exp(−u(φ)/ε) dφ` by adaptive quadrature to `1e-10` relative accuracy.
pub fn quartic_integral(nf: &QuarticNormalForm, eps: f64) -> Result<f64> {
    if !(nf.quartic_coeff.is_finite() && nf.quartic_coeff > 0.0) {
        return Err(Error::Domain {
            function: "quartic_integral",
            value: nf.quartic_coeff,
            domain: "quartic coefficient > 0",
        });
    }
    if !(eps.is_finite() && eps > 0.0) || !nf.lambda1.is_finite() || nf.length.is_nan() || nf.length <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            reason: "quartic integral needs finite eps > 0, finite lambda1 and L > 0",
        });
    }
    let q = 0.5 * nf.length * nf.lambda1 / eps;
    let p = nf.quartic_coeff / eps;
    let tol = Tolerance::relative(1e-11);
    if q >= 0.0 {
        // integrate in units of the natural width
        let width = if q > 0.0 { (1.0 / q).sqrt().min(p.powf(-0.25)) } else { p.powf(-0.25) };
        let half = integrate_to_infinity(
            |y| {
                let x = width * y;
                (-(q * x * x + p * x * x * x * x)).exp()
            },
            0.0,
            tol,
        )?;
        Ok(2.0 * width * half)
    } else {
        // double well: minima at x² = −q/(2p); shift the exponent by its minimum
        let x_min = (-q / (2.0 * p)).sqrt();
        let u_min = -q * q / (4.0 * p);
        let g = |x: f64| (-(q * x * x + p * x * x * x * x - u_min)).exp();
        let core = integrate_with_breakpoints(g, 0.0, 2.0 * x_min, &[x_min], tol)?;
        let tail = integrate_to_infinity(g, 2.0 * x_min, tol)?;
        Ok(2.0 * (core + tail) * (-u_min).exp())
    }
}
