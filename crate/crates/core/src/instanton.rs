//! Transition states of the Ginzburg–Landau energy and their energies.
//!
//! Below the critical length the transition state is the uniform saddle
//! `φ ≡ 0`. Above it the saddle is an instanton
//!
//! ```text
//! φ(x) = ±√(2m/(m+1)) · sn(x/√(m+1) + shift, m)
//! ```
//!
//! with `m` fixed by `c·√(m+1)·K(m) = L` (`c = 4` periodic, `c = 2` Neumann).
//! The periodic family carries a free phase; the Neumann pair uses the fixed
//! shift `K(m)` and a sign.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldConfiguration;
use crate::params::{validate_length, BoundaryCondition};
use crate::specfun::{elliptic_e, elliptic_k, jacobi_sn, EllipticModulus};

const M_LOWER: f64 = 1e-16;
const M_UPPER: f64 = 1.0 - f64::EPSILON / 2.0;

fn length_factor(bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Periodic => 4.0,
        BoundaryCondition::Neumann => 2.0,
    }
}

/// Interval length of the instanton with parameter `m` (inverse of [`solve_m_from_length`]).
pub fn length_from_modulus(m: EllipticModulus, bc: BoundaryCondition) -> Result<f64> {
    Ok(length_factor(bc) * (1.0 + m.value()).sqrt() * elliptic_k(m)?)
}

/// Largest length whose instanton modulus is representable below 1.
pub fn max_instanton_length(bc: BoundaryCondition) -> f64 {
    length_from_modulus(EllipticModulus::new(M_UPPER).unwrap(), bc).unwrap()
}

/// Solves `c·√(1+m)·K(m) = L` for `m ∈ (0, 1)`: bisection, then a guarded Newton polish.
pub fn solve_m_from_length(length: f64, bc: BoundaryCondition) -> Result<EllipticModulus> {
    validate_length(length)?;
    let critical = bc.critical_length();
    if length <= critical {
        return Err(Error::NoInstantonRegime { bc, length, critical });
    }
    let max_length = max_instanton_length(bc);
    if length > max_length {
        return Err(Error::LengthOutOfRange { length, max_length });
    }
    let residual = |m: f64| length_from_modulus(EllipticModulus::new(m).unwrap(), bc).unwrap() - length;

    let (mut lo, mut hi) = (M_LOWER, M_UPPER);
    if residual(lo) >= 0.0 {
        return EllipticModulus::new(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut m = if residual(lo).abs() <= residual(hi).abs() { lo } else { hi };

    let c = length_factor(bc);
    for _ in 0..3 {
        let r = residual(m);
        if r == 0.0 {
            break;
        }
        let mm = EllipticModulus::new(m)?;
        let (k, e) = (elliptic_k(mm)?, elliptic_e(mm));
        let dk = (e - (1.0 - m) * k) / (2.0 * m * (1.0 - m));
        let slope = c * (k / (2.0 * (1.0 + m).sqrt()) + (1.0 + m).sqrt() * dk);
        let next = m - r / slope;
        if next > 0.0 && next < 1.0 && residual(next).abs() < r.abs() {
            m = next;
        } else {
            break;
        }
    }
    EllipticModulus::new(m)
}

/// Sign of a Neumann instanton branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// A concrete instanton transition state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstantonDescription {
    pub bc: BoundaryCondition,
    pub length: f64,
    pub m: EllipticModulus,
    /// Argument shift of `sn`: the free phase (periodic) or `K(m)` (Neumann).
    pub phase: f64,
    pub sign: Sign,
    pub amplitude: f64,
}

impl InstantonDescription {
    /// The instanton at `length`, with phase 0 (periodic) or the `+` branch (Neumann).
    pub fn new(length: f64, bc: BoundaryCondition) -> Result<Self> {
        let m = solve_m_from_length(length, bc)?;
        let phase = match bc {
            BoundaryCondition::Periodic => 0.0,
            BoundaryCondition::Neumann => elliptic_k(m)?,
        };
        let mv = m.value();
        Ok(Self { bc, length, m, phase, sign: Sign::Plus, amplitude: (2.0 * mv / (mv + 1.0)).sqrt() })
    }

    /// Sets the phase of a periodic instanton. Neumann instantons keep their fixed shift.
    pub fn with_phase(mut self, phase: f64) -> Self {
        if self.bc == BoundaryCondition::Periodic {
            self.phase = phase;
        }
        self
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        let scale = (1.0 + self.m.value()).sqrt();
        Ok(self.sign.factor() * self.amplitude * jacobi_sn(x / scale + self.phase, self.m)?)
    }

    /// Samples the profile on the `n_x`-point grid of its boundary conditions.
    pub fn profile(&self, n_x: usize) -> Result<FieldConfiguration> {
        let n = n_x.max(1);
        let values = (0..n)
            .map(|i| self.value_at(crate::field::grid_point(self.bc, self.length, n, i)))
            .collect::<Result<Vec<_>>>()?;
        FieldConfiguration::new(self.bc, self.length, values)
    }
}

/// Energy of the instanton with parameter `m` above the stable states `φ ≡ ±1`:
/// `(1/(3√(1+m)))·[8E(m) − (1−m)(3m+5)/(1+m)·K(m)]` for periodic conditions,
/// half of it for Neumann.
pub fn instanton_energy_gap(m: EllipticModulus, bc: BoundaryCondition) -> Result<f64> {
    let mv = m.value();
    let (k, e) = (elliptic_k(m)?, elliptic_e(m));
    let periodic = (8.0 * e - (1.0 - mv) * (3.0 * mv + 5.0) / (1.0 + mv) * k) / (3.0 * (1.0 + mv).sqrt());
    Ok(match bc {
        BoundaryCondition::Periodic => periodic,
        BoundaryCondition::Neumann => 0.5 * periodic,
    })
}

/// Activation energy `ΔW = H[φ_t] − H[φ₋]`: `L/4` on the uniform branch, the
/// instanton energy gap above the critical length.
pub fn activation_energy(length: f64, bc: BoundaryCondition) -> Result<f64> {
    validate_length(length)?;
    if bc.is_uniform_saddle(length) {
        Ok(0.25 * length)
    } else {
        instanton_energy_gap(solve_m_from_length(length, bc)?, bc)
    }
}
