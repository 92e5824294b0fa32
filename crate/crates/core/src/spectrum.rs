//! Spectra of the linearized operator `−d²/dx² + 3φ² − 1` at stable states,
//! uniform saddles and instantons.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{periodic_extension, FieldConfiguration, DEFAULT_GRID_POINTS};
use crate::instanton::InstantonDescription;
use crate::params::{validate_length, BoundaryCondition};
use crate::specfun::EllipticModulus;

pub const DEFAULT_ZERO_MODE_THRESHOLD: f64 = 1e-6;
pub const MIN_HESSIAN_MODES: usize = 64;
pub const DEFAULT_HESSIAN_MODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Stable,
    Transition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralMode {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizationSpectrum {
    pub bc: BoundaryCondition,
    pub state: StateKind,
    /// Ascending eigenvalues with multiplicities.
    pub modes: Vec<SpectralMode>,
}

impl LinearizationSpectrum {
    /// Eigenvalues repeated according to multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().flat_map(|mode| std::iter::repeat_n(mode.value, mode.multiplicity)).collect()
    }

    pub fn lowest(&self) -> f64 {
        self.modes[0].value
    }

    /// Counted eigenvalues below `−threshold`.
    pub fn negative_count(&self, threshold: f64) -> usize {
        self.modes.iter().filter(|m| m.value < -threshold).map(|m| m.multiplicity).sum()
    }

    /// Counted eigenvalues with `|λ| ≤ threshold`.
    pub fn zero_count(&self, threshold: f64) -> usize {
        self.modes.iter().filter(|m| m.value.abs() <= threshold).map(|m| m.multiplicity).sum()
    }
}

/// Closed-form spectrum at `φ ≡ ±1` (stable) or `φ ≡ 0` (transition), for
/// wavenumber indices `0..=k_max`.
pub fn uniform_spectrum(
    length: f64,
    bc: BoundaryCondition,
    state: StateKind,
    k_max: usize,
) -> Result<LinearizationSpectrum> {
    validate_length(length)?;
    if k_max < 1 {
        return Err(Error::InvalidParameter {
            name: "K_max",
            value: k_max as f64,
            reason: "at least one nonzero wavenumber is required",
        });
    }
    let base = match state {
        StateKind::Stable => 2.0,
        StateKind::Transition => -1.0,
    };
    let unit = bc.wavenumber_unit(length);
    let modes = (0..=k_max)
        .map(|k| SpectralMode { value: base + (unit * k as f64).powi(2), multiplicity: bc.multiplicity(k) as usize })
        .collect();
    Ok(LinearizationSpectrum { bc, state, modes })
}

/// Galerkin eigenvalues of `−d²/dx² + 3φ² − 1` around `field`.
///
/// The basis holds `n_modes` cosines for Neumann conditions and wavenumbers
/// `0..=n_modes/2` (cosine and sine pairs) for periodic ones. The potential
/// enters through its discrete Fourier coefficients on the field grid.
pub fn hessian_spectrum(field: &FieldConfiguration, n_modes: usize, state: StateKind) -> Result<LinearizationSpectrum> {
    if let Some(index) = field.first_non_finite() {
        return Err(Error::NonFiniteField { index });
    }
    if n_modes < MIN_HESSIAN_MODES {
        return Err(Error::InvalidParameter {
            name: "N",
            value: n_modes as f64,
            reason: "the Hessian basis needs at least 64 modes",
        });
    }
    let bc = field.bc();
    let length = field.length();
    let potential: Vec<f64> = field.values().iter().map(|&phi| 3.0 * phi * phi - 1.0).collect();
    let (mut data, _) = periodic_extension(bc, length, &potential);
    let points = data.len();
    FftPlanner::new().plan_fft_forward(points).process(&mut data);
    let coefficient = |n: i64| -> Complex64 {
        let n = n.unsigned_abs() as usize;
        if n >= points / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            data[n]
        }
    };

    let matrix = match bc {
        BoundaryCondition::Periodic => {
            let k_max = n_modes / 2;
            let size = 2 * k_max + 1;
            let scale = length / points as f64;
            let a = |n: i64| scale * coefficient(n).re;
            let b = |n: i64| -scale * coefficient(n).im * (n.signum() as f64);
            let q = bc.wavenumber_unit(length);
            // basis order: constant, then (cos k, sin k) for k = 1..=k_max
            let mut h = DMatrix::<f64>::zeros(size, size);
            h[(0, 0)] = a(0) / length;
            for k in 1..=k_max {
                let (ck, sk) = (2 * k - 1, 2 * k);
                let ki = k as i64;
                h[(0, ck)] = std::f64::consts::SQRT_2 * a(ki) / length;
                h[(0, sk)] = std::f64::consts::SQRT_2 * b(ki) / length;
                h[(ck, 0)] = h[(0, ck)];
                h[(sk, 0)] = h[(0, sk)];
                for j in 1..=k_max {
                    let (cj, sj) = (2 * j - 1, 2 * j);
                    let ji = j as i64;
                    h[(cj, ck)] = (a(ji - ki) + a(ji + ki)) / length;
                    h[(sj, sk)] = (a(ji - ki) - a(ji + ki)) / length;
                    h[(cj, sk)] = (b(ji + ki) + b(ki - ji)) / length;
                    h[(sk, cj)] = h[(cj, sk)];
                }
                let kinetic = (q * k as f64).powi(2);
                h[(ck, ck)] += kinetic;
                h[(sk, sk)] += kinetic;
            }
            h
        }
        BoundaryCondition::Neumann => {
            let scale = length / points as f64;
            let c = |n: i64| scale * coefficient(n).re;
            let norm = |k: usize| if k == 0 { 1.0 } else { std::f64::consts::SQRT_2 };
            let q = bc.wavenumber_unit(length);
            let mut h = DMatrix::<f64>::zeros(n_modes, n_modes);
            for j in 0..n_modes {
                for k in 0..n_modes {
                    let (ji, ki) = (j as i64, k as i64);
                    h[(j, k)] = norm(j) * norm(k) * 0.5 * (c(ji - ki) + c(ji + ki)) / length;
                }
                h[(j, j)] += (q * j as f64).powi(2);
            }
            h
        }
    };

    let mut values: Vec<f64> = SymmetricEigen::new(matrix).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(LinearizationSpectrum {
        bc,
        state,
        modes: values.into_iter().map(|value| SpectralMode { value, multiplicity: 1 }).collect(),
    })
}

/// Hessian spectrum of the instanton at `length`, sampled on the default grid.
pub fn instanton_hessian(length: f64, bc: BoundaryCondition, n_modes: usize) -> Result<LinearizationSpectrum> {
    let field = InstantonDescription::new(length, bc)?.profile(DEFAULT_GRID_POINTS.max(n_modes))?;
    hessian_spectrum(&field, n_modes, StateKind::Transition)
}

/// Negative instanton eigenvalue `1 − 2√(m² − m + 1)/(m + 1)`.
pub fn mu0(m: EllipticModulus) -> f64 {
    let m = m.value();
    1.0 - 2.0 * (m * m - m + 1.0).sqrt() / (m + 1.0)
}

/// Small-`m` approximation `3m` of the second instanton eigenvalue.
pub fn mu1_approx(m: EllipticModulus) -> f64 {
    3.0 * m.value()
}

/// Second Hessian eigenvalue of the Neumann instanton at `length`, from numerical diagonalization.
pub fn mu1_numerical(length: f64, n_modes: usize) -> Result<f64> {
    let spectrum = instanton_hessian(length, BoundaryCondition::Neumann, n_modes)?;
    Ok(spectrum.modes[1].value)
}
