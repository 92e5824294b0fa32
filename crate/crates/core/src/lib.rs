//! Noise-activated transition rates for the stochastic Ginzburg–Landau
//! equation
//!
//! ```text
//! ∂ₜφ = ∂ₓₓφ + φ − φ³ + √(2ε) ξ(x, t),   x ∈ [0, L]
//! ```
//!
//! with periodic or zero-flux (Neumann) boundary conditions.
//!
//! The crate provides
//!
//! * [`specfun`]: complete elliptic integrals, Jacobi `sn`, the modified
//!   Bessel functions of order ±1/4 and the error function;
//! * [`instanton`]: transition-state profiles, the length–modulus relation
//!   and activation energies;
//! * [`spectrum`]: linearization spectra, closed form and by diagonalizing
//!   the Hessian in the Fourier/cosine basis;
//! * [`rates`]: classical Kramers prefactors and the bifurcation-corrected
//!   prefactors built from the universal scaling functions;
//! * [`simulator`]: a spectral-Galerkin Monte Carlo integrator and
//!   mean-first-passage-time estimator used to validate the rates;
//! * [`verify`]: the deterministic self-check suite behind `gl-kramers verify`.

pub mod error;
pub mod field;
pub mod instanton;
pub mod params;
pub mod quadrature;
pub mod rates;
pub mod simulator;
pub mod specfun;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use params::{BoundaryCondition, SystemParams};
