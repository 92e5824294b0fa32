//! Modified Bessel functions of order ±1/4.
//!
//! `I_ν` is summed from its power series up to `z = 25` and taken from the
//! large-argument asymptotic series beyond. `K_{1/4}` uses the reflection
//! formula `K_ν = π/(2 sin νπ) (I_{−ν} − I_ν)` for `z ≤ 2` and Steed's
//! continued fraction (Temme's normalization) above.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::gamma::gamma;

const SERIES_LIMIT: f64 = 25.0;
const K_CROSSOVER: f64 = 2.0;
const NU: f64 = 0.25;

/// Order of `I_ν` supported by this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuarterOrder {
    /// ν = −1/4
    Minus,
    /// ν = +1/4
    Plus,
}

impl QuarterOrder {
    pub fn nu(self) -> f64 {
        match self {
            QuarterOrder::Minus => -NU,
            QuarterOrder::Plus => NU,
        }
    }
}

fn check_arg(function: &'static str, z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { function, value: z, domain: "(0, ∞)" })
    }
}

/// `(Σ termₖ, Σ (2k+ν)/z · termₖ)` for the series of `I_ν(z)`.
fn i_series(nu: f64, z: f64) -> (f64, f64) {
    let half = 0.5 * z;
    let q = half * half;
    let mut term = half.powf(nu) / gamma(1.0 + nu);
    let mut sum = term;
    let mut dsum = nu * term;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        dsum += (2.0 * kf + nu) * term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (sum, dsum / z)
}

/// `e^{−z} I_ν(z) √(2πz)` from the asymptotic series, accurate for large `z`.
fn i_asymptotic_reduced(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = -term * (mu - odd * odd) / (kf * 8.0 * z);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn i_scaled(nu: f64, z: f64) -> f64 {
    if z <= SERIES_LIMIT {
        i_series(nu, z).0 * (-z).exp()
    } else {
        i_asymptotic_reduced(nu, z) / (2.0 * PI * z).sqrt()
    }
}

/// Returns `(e^z K_{1/4}(z), e^z K_{5/4}(z))` by Steed's method, `z ≥ 2`.
fn k_steed_scaled(z: f64) -> (f64, f64) {
    let a1 = 0.25 - NU * NU;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k_nu = (PI / (2.0 * z)).sqrt() / s;
    let k_nu1 = k_nu * (NU + z + 0.5 - h) / z;
    (k_nu, k_nu1)
}

fn reflection_factor() -> f64 {
    PI / (2.0 * (NU * PI).sin())
}

/// `I_ν(z)` for ν = ±1/4 and `z > 0`.
pub fn bessel_i14(order: QuarterOrder, z: f64) -> Result<f64> {
    check_arg("bessel_i14", z)?;
    if z <= SERIES_LIMIT {
        Ok(i_series(order.nu(), z).0)
    } else {
        Ok(i_scaled(order.nu(), z) * z.exp())
    }
}

/// Exponentially scaled `e^{−z} I_ν(z)`; finite for arbitrarily large `z`.
pub fn bessel_i14_scaled(order: QuarterOrder, z: f64) -> Result<f64> {
    check_arg("bessel_i14_scaled", z)?;
    Ok(i_scaled(order.nu(), z))
}

/// Derivative `I'_ν(z)`, using `I'_ν = I_{ν+1} + (ν/z) I_ν` beyond the series range.
pub fn bessel_i14_prime(order: QuarterOrder, z: f64) -> Result<f64> {
    check_arg("bessel_i14_prime", z)?;
    let nu = order.nu();
    if z <= SERIES_LIMIT {
        Ok(i_series(nu, z).1)
    } else {
        Ok((i_scaled(nu + 1.0, z) + nu / z * i_scaled(nu, z)) * z.exp())
    }
}

/// `K_{1/4}(z)` for `z > 0`.
pub fn bessel_k14(z: f64) -> Result<f64> {
    check_arg("bessel_k14", z)?;
    if z <= K_CROSSOVER {
        let (minus, _) = i_series(-NU, z);
        let (plus, _) = i_series(NU, z);
        Ok(reflection_factor() * (minus - plus))
    } else {
        Ok(k_steed_scaled(z).0 * (-z).exp())
    }
}

/// Exponentially scaled `e^{z} K_{1/4}(z)`.
pub fn bessel_k14_scaled(z: f64) -> Result<f64> {
    check_arg("bessel_k14_scaled", z)?;
    if z <= K_CROSSOVER {
        Ok(bessel_k14(z)? * z.exp())
    } else {
        Ok(k_steed_scaled(z).0)
    }
}

/// Derivative `K'_{1/4}(z)`.
pub fn bessel_k14_prime(z: f64) -> Result<f64> {
    check_arg("bessel_k14_prime", z)?;
    if z <= K_CROSSOVER {
        let (_, dminus) = i_series(-NU, z);
        let (_, dplus) = i_series(NU, z);
        Ok(reflection_factor() * (dminus - dplus))
    } else {
        let (k, k1) = k_steed_scaled(z);
        Ok((NU / z * k - k1) * (-z).exp())
    }
}
