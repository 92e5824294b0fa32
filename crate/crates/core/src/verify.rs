//! Deterministic self-checks: special-function identities, limits,
//! continuity across the critical lengths and determinant convergence.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::field::energy_functional;
use crate::instanton::{activation_energy, instanton_energy_gap, length_from_modulus, InstantonDescription};
use crate::params::BoundaryCondition;
use crate::quadrature::{integrate_to_infinity, integrate_with_breakpoints, Tolerance};
use crate::rates::{self, prefactor_classical, prefactor_corrected, prefactor_from_determinants};
use crate::specfun::{bessel_i14, bessel_k14, elliptic_e, elliptic_k, EllipticModulus, QuarterOrder, GAMMA_QUARTER};
use crate::spectrum::{instanton_hessian, mu0, DEFAULT_ZERO_MODE_THRESHOLD};

type ScalingFn = fn(f64) -> Result<f64>;

/// The scaling functions under test; replaceable so the harness can be checked against a faulty one.
#[derive(Clone, Copy)]
pub struct ScalingFunctions {
    pub psi_plus: ScalingFn,
    pub psi_minus: ScalingFn,
    pub psi_plus_tilde: ScalingFn,
}

impl Default for ScalingFunctions {
    fn default() -> Self {
        Self { psi_plus: rates::psi_plus, psi_minus: rates::psi_minus, psi_plus_tilde: rates::psi_plus_tilde }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<34} {:>12} {:>10}  status", "check", "measured", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<34} {:>12.3e} {:>10.1e}  {}",
                c.name,
                c.measured,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Skip the adaptive-quadrature oracles.
    pub quick: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Runs every check; a check whose evaluation errors is reported as failed with an infinite deviation.
pub fn run_checks(functions: &ScalingFunctions, options: VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    let mut add = |name: &'static str, tolerance: f64, measured: Result<f64>| {
        let measured = measured.unwrap_or(f64::INFINITY);
        checks.push(Check { name, measured, tolerance, passed: measured <= tolerance });
    };

    add("legendre relation", 1e-10, legendre_relation());
    add("psi_plus asymptote", 1e-3, (functions.psi_plus)(1000.0).map(|v| (v - 1.0).abs()));
    add("psi_minus asymptote", 1e-3, (functions.psi_minus)(1000.0).map(|v| (v / 2.0 - 1.0).abs()));
    add("psi_plus_tilde asymptote", 1e-3, (functions.psi_plus_tilde)(1000.0).map(|v| (v - 1.0).abs()));
    add("psi small-alpha limits", 1e-12, scaling_zero_limits(functions));
    add("determinant product", 1e-6, determinant_check());
    add("neumann critical limit", 1e-3, neumann_critical_limit());
    add("periodic critical limit", 1e-3, periodic_critical_limit());
    add("periodic factor 2", 1e-3, periodic_factor_two());
    add("periodic continuity", 1e-3, continuity(BoundaryCondition::Periodic, 2.0 * PI * 1e-7, 1e-6));
    add("neumann continuity", 5e-2, continuity(BoundaryCondition::Neumann, PI * 1e-6, 1e-6));
    add("activation energy continuity", 1e-6, activation_continuity());
    add("instanton energy", 1e-8, instanton_energy_check());
    add("instanton mu0", 1e-6, mu0_check());
    add("periodic zero mode", 1e-6, zero_mode_check());
    if !options.quick {
        add("quartic integral identity", 1e-8, quartic_identity());
        add("double-well identity", 1e-8, double_well_identity());
        add("psi_plus quadrature", 1e-5, max_oracle_gap(functions.psi_plus, psi_plus_quadrature));
        add("psi_minus quadrature", 1e-5, max_oracle_gap(functions.psi_minus, psi_minus_quadrature));
        add("psi_plus_tilde quadrature", 1e-5, max_oracle_gap(functions.psi_plus_tilde, psi_plus_tilde_quadrature));
    }
    VerifyReport { checks }
}

fn legendre_relation() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let (a, b) = (EllipticModulus::new(m)?, EllipticModulus::new(1.0 - m)?);
        let lhs = elliptic_e(a) * elliptic_k(b)? + elliptic_e(b) * elliptic_k(a)? - elliptic_k(a)? * elliptic_k(b)?;
        worst = worst.max((lhs - PI / 2.0).abs());
    }
    Ok(worst)
}

fn scaling_zero_limits(functions: &ScalingFunctions) -> Result<f64> {
    let psi0 = rates::psi_at_zero();
    Ok(rel((functions.psi_plus)(0.0)?, psi0)
        .max(rel((functions.psi_minus)(0.0)?, psi0))
        .max(rel((functions.psi_plus_tilde)(0.0)?, (PI / 8.0).sqrt())))
}

fn determinant_check() -> Result<f64> {
    let l = PI / 2.0;
    Ok(rel(
        prefactor_from_determinants(l, BoundaryCondition::Neumann, 10_000)?,
        prefactor_classical(l, BoundaryCondition::Neumann, 0.1)?,
    ))
}

fn neumann_critical_limit() -> Result<f64> {
    let constant = GAMMA_QUARTER / (2.0 * (3.0 * PI.powi(7)).powf(0.25)) * (SQRT_2 * PI).sinh().sqrt();
    let eps = 1e-8;
    Ok(rel(prefactor_corrected(PI, eps, BoundaryCondition::Neumann)?.gamma0_corrected * eps.powf(0.25), constant))
}

fn periodic_critical_limit() -> Result<f64> {
    let constant = (SQRT_2 * PI).sinh() / (3f64.sqrt() * PI);
    let eps = 1e-8;
    Ok(rel(prefactor_corrected(2.0 * PI, eps, BoundaryCondition::Periodic)?.gamma0_corrected * eps.sqrt(), constant))
}

fn periodic_factor_two() -> Result<f64> {
    let constant = (SQRT_2 * PI).sinh() / (3f64.sqrt() * PI);
    let eps = 1e-6;
    let classical = prefactor_classical(2.0 * PI * (1.0 + 1e-7), BoundaryCondition::Periodic, eps)?;
    Ok(rel(classical * eps.sqrt(), 2.0 * constant))
}

fn continuity(bc: BoundaryCondition, offset: f64, eps: f64) -> Result<f64> {
    let lc = bc.critical_length();
    let left = prefactor_corrected(lc - offset, eps, bc)?.gamma0_corrected;
    let right = prefactor_corrected(lc + offset, eps, bc)?.gamma0_corrected;
    Ok(rel(right, left))
}

fn activation_continuity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
        let lc = bc.critical_length();
        worst = worst.max((activation_energy(lc - 1e-7, bc)? - activation_energy(lc + 1e-7, bc)?).abs());
    }
    Ok(worst)
}

fn instanton_energy_check() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for bc in [BoundaryCondition::Periodic, BoundaryCondition::Neumann] {
        let m = EllipticModulus::new(0.5)?;
        let l = length_from_modulus(m, bc)?;
        let field = InstantonDescription::new(l, bc)?.profile(512)?;
        worst = worst.max((energy_functional(&field) + l / 4.0 - instanton_energy_gap(m, bc)?).abs());
    }
    Ok(worst)
}

fn mu0_check() -> Result<f64> {
    let m = EllipticModulus::new(0.5)?;
    let l = length_from_modulus(m, BoundaryCondition::Neumann)?;
    Ok((instanton_hessian(l, BoundaryCondition::Neumann, 256)?.lowest() - mu0(m)).abs())
}

fn zero_mode_check() -> Result<f64> {
    let spectrum = instanton_hessian(8.0, BoundaryCondition::Periodic, 256)?;
    let closest = spectrum
        .modes
        .iter()
        .filter(|mode| mode.value.abs() <= 1e3 * DEFAULT_ZERO_MODE_THRESHOLD)
        .map(|mode| mode.value.abs())
        .fold(f64::INFINITY, f64::min);
    Ok(closest)
}

fn quartic_identity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for q in [0.5, 1.0, 2.0] {
        for p in [0.25, 1.0, 4.0] {
            let quad = integrate_to_infinity(|x| (-q * x * x - p * x.powi(4)).exp(), 0.0, Tolerance::relative(1e-13))?;
            let z = q * q / (8.0 * p);
            let closed = 0.25 * (q / p).sqrt() * z.exp() * bessel_k14(z)?;
            worst = worst.max(rel(closed, quad));
        }
    }
    Ok(worst)
}

fn double_well_identity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for nu in [0.5f64, 1.0, 2.0] {
        for mu in [0.25, 1.0, 4.0] {
            let peak = (nu / mu).sqrt();
            let g = |x: f64| (2.0 * nu * x * x - mu * x.powi(4)).exp();
            let tol = Tolerance::relative(1e-13);
            let quad = integrate_with_breakpoints(g, 0.0, 2.0 * peak, &[peak], tol)?
                + integrate_to_infinity(g, 2.0 * peak, tol)?;
            let z = nu * nu / (2.0 * mu);
            let bessel = bessel_i14(QuarterOrder::Minus, z)? + bessel_i14(QuarterOrder::Plus, z)?;
            let closed = PI / 4.0 * (nu / mu).sqrt() * z.exp() * bessel;
            worst = worst.max(rel(closed, quad));
        }
    }
    Ok(worst)
}

/// `√((1+α)/(2π))·∫_ℝ exp(−αy²/2 − y⁴/2) dy`.
pub fn psi_plus_quadrature(alpha: f64) -> Result<f64> {
    let half =
        integrate_to_infinity(|y| (-(0.5 * alpha * y * y + 0.5 * y.powi(4))).exp(), 0.0, Tolerance::relative(1e-13))?;
    Ok(((1.0 + alpha) / (2.0 * PI)).sqrt() * 2.0 * half)
}

/// `√((1+α)/(2π))·∫_ℝ exp(−(u(y) − u_min)) dy` with `u = −αy²/4 + y⁴/2`.
pub fn psi_minus_quadrature(alpha: f64) -> Result<f64> {
    let u_min = -alpha * alpha / 32.0;
    let g = |y: f64| (-(-0.25 * alpha * y * y + 0.5 * y.powi(4) - u_min)).exp();
    let y_min = (alpha / 4.0).sqrt();
    let tol = Tolerance::relative(1e-13);
    let half = if y_min > 0.0 {
        integrate_with_breakpoints(g, 0.0, 2.0 * y_min, &[y_min], tol)? + integrate_to_infinity(g, 2.0 * y_min, tol)?
    } else {
        integrate_to_infinity(g, 0.0, tol)?
    };
    Ok(((1.0 + alpha) / (2.0 * PI)).sqrt() * 2.0 * half)
}

/// `(1+α)·∫₀^∞ r·exp(−αr²/2 − r⁴/2) dr`, the radial form of the two-mode integral.
pub fn psi_plus_tilde_quadrature(alpha: f64) -> Result<f64> {
    let radial = integrate_to_infinity(
        |r| r * (-(0.5 * alpha * r * r + 0.5 * r.powi(4))).exp(),
        0.0,
        Tolerance::relative(1e-13),
    )?;
    Ok((1.0 + alpha) * radial)
}

fn max_oracle_gap(f: ScalingFn, oracle: fn(f64) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        worst = worst.max(rel(f(alpha)?, oracle(alpha)?));
    }
    Ok(worst)
}
