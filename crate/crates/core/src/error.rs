use thiserror::Error;

use crate::params::BoundaryCondition;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain {domain}")]
    Domain { function: &'static str, value: f64, domain: &'static str },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },

    #[error("no instanton for {bc} boundary conditions at L = {length} (critical length {critical}); the uniform saddle applies")]
    NoInstantonRegime { bc: BoundaryCondition, length: f64, critical: f64 },

    #[error("L = {length} lies beyond the largest length representable by a modulus m < 1 in double precision ({max_length})")]
    LengthOutOfRange { length: f64, max_length: f64 },

    #[error("classical Kramers prefactor diverges at the critical length L = {length} ({bc})")]
    DivergentClassicalPrefactor { bc: BoundaryCondition, length: f64 },

    #[error("determinant product requires a uniform saddle (L < {critical}), got L = {length}")]
    UnsupportedSaddle { length: f64, critical: f64 },

    #[error("field contains a non-finite value at grid index {index}")]
    NonFiniteField { index: usize },

    #[error("trajectory {trajectory} (seed {seed}) blew up at step {step}")]
    BlowUp { seed: u64, trajectory: u64, step: u64 },

    #[error("all {n_traj} trajectories were censored at t_max = {t_max}; raise t_max or eps")]
    EstimateUnavailable { n_traj: usize, t_max: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailed { tolerance: f64, estimate: f64 },
}
