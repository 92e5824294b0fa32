use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary conditions on the interval `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    Neumann,
}

impl BoundaryCondition {
    /// Length at which the uniform saddle `φ ≡ 0` bifurcates into instantons.
    pub fn critical_length(self) -> f64 {
        match self {
            BoundaryCondition::Periodic => 2.0 * PI,
            BoundaryCondition::Neumann => PI,
        }
    }

    /// Spacing of the Laplacian wavenumbers, `2π/L` or `π/L`.
    pub fn wavenumber_unit(self, length: f64) -> f64 {
        match self {
            BoundaryCondition::Periodic => 2.0 * PI / length,
            BoundaryCondition::Neumann => PI / length,
        }
    }

    /// Multiplicity of the `k`-th Laplacian eigenvalue.
    pub fn multiplicity(self, k: usize) -> u32 {
        match (self, k) {
            (BoundaryCondition::Periodic, k) if k > 0 => 2,
            _ => 1,
        }
    }

    /// `true` when `L` lies on the uniform-saddle side, `L ≤ L_c`.
    pub fn is_uniform_saddle(self, length: f64) -> bool {
        length <= self.critical_length()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Periodic => "periodic",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "periodic" => Ok(BoundaryCondition::Periodic),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(format!("unknown boundary condition `{other}` (expected periodic or neumann)")),
        }
    }
}

/// Full physical input: interval length, noise intensity and boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub length: f64,
    pub eps: f64,
    pub bc: BoundaryCondition,
}

impl SystemParams {
    pub fn new(length: f64, eps: f64, bc: BoundaryCondition) -> Result<Self> {
        validate_length(length)?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "noise intensity must be finite and > 0",
            });
        }
        Ok(Self { length, eps, bc })
    }

    pub fn critical_length(&self) -> f64 {
        self.bc.critical_length()
    }
}

pub(crate) fn validate_length(length: f64) -> Result<f64> {
    if length.is_finite() && length > 0.0 {
        Ok(length)
    } else {
        Err(Error::InvalidParameter { name: "L", value: length, reason: "interval length must be finite and > 0" })
    }
}
