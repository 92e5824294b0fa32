//! Double-precision special functions: complete elliptic integrals and the
//! Jacobi elliptic sine, modified Bessel functions of order ±1/4, the error
//! function and a Lanczos gamma function.
//!
//! Every function is a pure function of its arguments. NaN inputs are
//! rejected with [`Error::Domain`](crate::Error::Domain) instead of being
//! propagated.

mod bessel;
mod elliptic;
mod erf;
mod gamma;

pub use bessel::{
    bessel_i14, bessel_i14_prime, bessel_i14_scaled, bessel_k14, bessel_k14_prime, bessel_k14_scaled, QuarterOrder,
};
pub use elliptic::{
    elliptic_e, elliptic_k, jacobi_elliptic, jacobi_sn, legendre_defect, EllipticModulus, JacobiTriple,
};
pub use erf::{erf, erfc, erfcx};
pub use gamma::gamma;

/// Γ(1/4).
pub const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;
/// Γ(3/4).
pub const GAMMA_THREE_QUARTERS: f64 = 1.225_416_702_465_177_6;
