//! Field configurations sampled on a uniform grid and their spectral
//! calculus (differentiation and quadrature consistent with the boundary
//! conditions).
//!
//! Periodic fields live on `xᵢ = iL/N`, `i = 0..N`, endpoint excluded.
//! Neumann fields live on `xᵢ = iL/(N−1)`, both endpoints included, and are
//! treated through their even extension to the period `2L`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::params::{validate_length, BoundaryCondition};

pub const MIN_GRID_POINTS: usize = 16;
pub const DEFAULT_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfiguration {
    bc: BoundaryCondition,
    length: f64,
    values: Vec<f64>,
}

impl FieldConfiguration {
    pub fn new(bc: BoundaryCondition, length: f64, values: Vec<f64>) -> Result<Self> {
        validate_length(length)?;
        if values.len() < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter {
                name: "N_x",
                value: values.len() as f64,
                reason: "a field needs at least 16 grid points",
            });
        }
        Ok(Self { bc, length, values })
    }

    /// Samples `f` on the grid of `n` points for `bc`.
    pub fn from_fn<F: Fn(f64) -> f64>(bc: BoundaryCondition, length: f64, n: usize, f: F) -> Result<Self> {
        let values = (0..n).map(|i| f(grid_point(bc, length, n, i))).collect();
        Self::new(bc, length, values)
    }

    pub fn uniform(bc: BoundaryCondition, length: f64, n: usize, value: f64) -> Result<Self> {
        Self::new(bc, length, vec![value; n])
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|i| grid_point(self.bc, self.length, n, i)).collect()
    }

    /// Index of the first non-finite sample, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_finite())
    }

    /// Spectral derivative of the given order, sampled on the same grid.
    pub fn derivative(&self, order: u32) -> Vec<f64> {
        let (mut data, period) = self.periodic_extension();
        let p = data.len();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(p).process(&mut data);
        let unit = 2.0 * std::f64::consts::PI / period;
        for (j, c) in data.iter_mut().enumerate() {
            let k = if j <= p / 2 { j as f64 } else { j as f64 - p as f64 };
            if p % 2 == 0 && j == p / 2 && order % 2 == 1 {
                *c = Complex64::new(0.0, 0.0);
                continue;
            }
            *c *= Complex64::new(0.0, k * unit).powu(order);
        }
        planner.plan_fft_inverse(p).process(&mut data);
        data.iter().take(self.len()).map(|c| c.re / p as f64).collect()
    }

    /// Spectrally accurate `∫₀^L g(x) dx` for samples `g` on this field's grid.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.len(), "samples must live on the field grid");
        let n = samples.len();
        match self.bc {
            BoundaryCondition::Periodic => self.length / n as f64 * samples.iter().sum::<f64>(),
            BoundaryCondition::Neumann => {
                let h = self.length / (n - 1) as f64;
                h * (samples.iter().sum::<f64>() - 0.5 * (samples[0] + samples[n - 1]))
            }
        }
    }

    /// Samples of one full period: the field itself (periodic) or its even
    /// extension to `[0, 2L)` (Neumann).
    pub(crate) fn periodic_extension(&self) -> (Vec<Complex64>, f64) {
        periodic_extension(self.bc, self.length, &self.values)
    }
}

pub(crate) fn periodic_extension(bc: BoundaryCondition, length: f64, values: &[f64]) -> (Vec<Complex64>, f64) {
    match bc {
        BoundaryCondition::Periodic => (values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), length),
        BoundaryCondition::Neumann => {
            let n = values.len();
            let mut ext: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            ext.extend(values[1..n - 1].iter().rev().map(|&v| Complex64::new(v, 0.0)));
            (ext, 2.0 * length)
        }
    }
}

pub fn grid_point(bc: BoundaryCondition, length: f64, n: usize, i: usize) -> f64 {
    match bc {
        BoundaryCondition::Periodic => length * i as f64 / n as f64,
        BoundaryCondition::Neumann => length * i as f64 / (n - 1) as f64,
    }
}

/// `H[φ] = ∫₀^L [½(φ')² + ¼φ⁴ − ½φ²] dx`.
pub fn energy_functional(field: &FieldConfiguration) -> f64 {
    let slope = field.derivative(1);
    let density: Vec<f64> = field
        .values()
        .iter()
        .zip(&slope)
        .map(|(&phi, &dphi)| {
            let phi2 = phi * phi;
            0.5 * dphi * dphi + 0.25 * phi2 * phi2 - 0.5 * phi2
        })
        .collect();
    field.integrate(&density)
}

/// `max |φ'' + φ − φ³|` under spectral differentiation.
pub fn stationarity_residual(field: &FieldConfiguration) -> f64 {
    let curvature = field.derivative(2);
    field.values().iter().zip(&curvature).map(|(&phi, &d2)| (d2 + phi - phi * phi * phi).abs()).fold(0.0, f64::max)
}
