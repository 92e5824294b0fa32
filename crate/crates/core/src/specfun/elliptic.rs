use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 40;

/// Elliptic parameter `m` (the square of the modulus `k`), restricted to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&m) {
            Ok(Self(m))
        } else {
            Err(Error::Domain { function: "EllipticModulus", value: m, domain: "[0, 1]" })
        }
    }

    pub const ZERO: EllipticModulus = EllipticModulus(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Complete elliptic integral of the first kind,
/// `K(m) = ∫₀^{π/2} dθ / √(1 − m sin²θ)`, for `0 ≤ m < 1`.
///
/// Computed as `π / (2 AGM(1, √(1−m)))`.
pub fn elliptic_k(m: EllipticModulus) -> Result<f64> {
    let m = m.value();
    if m >= 1.0 {
        return Err(Error::Domain { function: "elliptic_k", value: m, domain: "[0, 1)" });
    }
    let (a, _) = agm(1.0, (1.0 - m).sqrt(), m.sqrt());
    Ok(PI / (2.0 * a))
}

/// Complete elliptic integral of the second kind,
/// `E(m) = ∫₀^{π/2} √(1 − m sin²θ) dθ`, for `0 ≤ m ≤ 1`.
pub fn elliptic_e(m: EllipticModulus) -> f64 {
    let m = m.value();
    if m == 1.0 {
        return 1.0;
    }
    let (a, weighted) = agm(1.0, (1.0 - m).sqrt(), m.sqrt());
    let k = PI / (2.0 * a);
    k * (1.0 - 0.5 * weighted)
}

/// AGM of `(a, b)` together with `Σₙ 2ⁿ cₙ²`, where `c₀` is supplied and
/// `cₙ₊₁ = (aₙ − bₙ)/2`.
fn agm(mut a: f64, mut b: f64, c0: f64) -> (f64, f64) {
    let mut weighted = c0 * c0;
    let mut pow2 = 1.0;
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let c = 0.5 * (a - b);
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
        pow2 *= 2.0;
        weighted += pow2 * c * c;
    }
    (a, weighted)
}

/// `(1+m)E(m) − (1−m)K(m)`, which vanishes like `3πm/4` as `m → 0`.
///
/// Below `m = 0.1` the difference is summed from the hypergeometric series
/// of `K` and `E` so the leading cancellation is exact.
pub fn legendre_defect(m: EllipticModulus) -> Result<f64> {
    let mv = m.value();
    if mv >= 0.1 {
        if mv == 1.0 {
            return Ok(2.0);
        }
        return Ok((1.0 + mv) * elliptic_e(m) - (1.0 - mv) * elliptic_k(m)?);
    }
    // K = π/2 Σ cₙ mⁿ, E = π/2 Σ cₙ mⁿ/(1−2n), cₙ = [(2n)!/(4ⁿ n!²)]².
    let mut sum = 0.0;
    let mut c_prev = 1.0;
    let mut e_prev = 1.0;
    let mut central = 1.0; // (2n)!/(4ⁿ n!²)
    let mut power = 1.0;
    for n in 1..80 {
        let nf = n as f64;
        central *= (2.0 * nf - 1.0) / (2.0 * nf);
        let c = central * central;
        let e = c / (1.0 - 2.0 * nf);
        power *= mv;
        let term = (e + e_prev - c + c_prev) * power;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        c_prev = c;
        e_prev = e;
    }
    Ok(FRAC_PI_2 * sum)
}

/// The three Jacobi elliptic functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// `sn(u, m)`, `cn(u, m)` and `dn(u, m)` by the descending Landen (AGM) scheme.
pub fn jacobi_elliptic(u: f64, m: EllipticModulus) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(Error::Domain { function: "jacobi_elliptic", value: u, domain: "finite u" });
    }
    let m = m.value();
    if m == 0.0 {
        return Ok(JacobiTriple { sn: u.sin(), cn: u.cos(), dn: 1.0 });
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(JacobiTriple { sn: u.tanh(), cn: sech, dn: sech });
    }

    let mut a = [0.0_f64; AGM_MAX_ITER + 1];
    let mut c = [0.0_f64; AGM_MAX_ITER + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while c[n].abs() > AGM_TOL && n < AGM_MAX_ITER {
        let (an, bn) = (a[n], b);
        a[n + 1] = 0.5 * (an + bn);
        c[n + 1] = 0.5 * (an - bn);
        b = (an * bn).sqrt();
        n += 1;
    }

    let mut phi = 2f64.powi(n as i32) * a[n] * u;
    let mut phi_above = phi;
    for j in (1..=n).rev() {
        phi_above = phi;
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = if n == 0 { (1.0 - m * sn * sn).sqrt() } else { cn / (phi_above - phi).cos() };
    Ok(JacobiTriple { sn, cn, dn })
}

/// Jacobi elliptic sine `sn(u, m)`.
pub fn jacobi_sn(u: f64, m: EllipticModulus) -> Result<f64> {
    jacobi_elliptic(u, m).map(|t| t.sn)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus(m: f64) -> EllipticModulus {
        EllipticModulus::new(m).unwrap()
    }

    /// Midpoint rule on the π-periodic, even integrand converges exponentially.
    fn k_by_quadrature(m: f64) -> f64 {
        let n = 4000;
        let h = FRAC_PI_2 / n as f64;
        (0..n)
            .map(|i| {
                let s = ((i as f64 + 0.5) * h).sin();
                h / (1.0 - m * s * s).sqrt()
            })
            .sum()
    }

    fn e_by_quadrature(m: f64) -> f64 {
        let n = 4000;
        let h = FRAC_PI_2 / n as f64;
        (0..n)
            .map(|i| {
                let s = ((i as f64 + 0.5) * h).sin();
                h * (1.0 - m * s * s).sqrt()
            })
            .sum()
    }

    /// RK4 on y'' = −(1+m)y + 2m y³, y(0)=0, y'(0)=1.
    fn sn_by_ode(u: f64, m: f64) -> f64 {
        let steps = 20_000;
        let h = u / steps as f64;
        let f = |y: f64, v: f64| (v, -(1.0 + m) * y + 2.0 * m * y * y * y);
        let (mut y, mut v) = (0.0, 1.0);
        for _ in 0..steps {
            let (k1y, k1v) = f(y, v);
            let (k2y, k2v) = f(y + 0.5 * h * k1y, v + 0.5 * h * k1v);
            let (k3y, k3v) = f(y + 0.5 * h * k2y, v + 0.5 * h * k2v);
            let (k4y, k4v) = f(y + h * k3y, v + h * k3v);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        y
    }

    #[test]
    fn k_reference_values() {
        assert_eq!(elliptic_k(modulus(0.0)).unwrap(), FRAC_PI_2);
        let k_half = elliptic_k(modulus(0.5)).unwrap();
        assert!((k_half - 1.854_074_677).abs() < 1e-9);
        for m in [0.1, 0.5, 0.9, 0.99] {
            let k = elliptic_k(modulus(m)).unwrap();
            let oracle = k_by_quadrature(m);
            assert!((k / oracle - 1.0).abs() < 1e-12, "m={m}: {k} vs {oracle}");
        }
        let k99 = elliptic_k(modulus(0.99)).unwrap();
        assert!(k99 > 3.3 && k99.is_finite());
    }

    #[test]
    fn k_domain() {
        assert!(matches!(elliptic_k(modulus(1.0)), Err(Error::Domain { .. })));
        assert!(EllipticModulus::new(-0.1).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
    }

    #[test]
    fn e_reference_values() {
        assert_eq!(elliptic_e(modulus(0.0)), FRAC_PI_2);
        assert_eq!(elliptic_e(modulus(1.0)), 1.0);
        assert!((elliptic_e(modulus(0.5)) - 1.350_643_881).abs() < 1e-9);
        for m in [0.1, 0.5, 0.9, 0.999] {
            let e = elliptic_e(modulus(m));
            assert!((e / e_by_quadrature(m) - 1.0).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn monotone_in_m() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        for w in grid.windows(2) {
            let (a, b) = (modulus(w[0]), modulus(w[1]));
            assert!(elliptic_k(b).unwrap() > elliptic_k(a).unwrap());
            assert!(elliptic_e(b) < elliptic_e(a));
        }
    }

    #[test]
    fn legendre_relation() {
        for m in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let (a, b) = (modulus(m), modulus(1.0 - m));
            let (k, kp) = (elliptic_k(a).unwrap(), elliptic_k(b).unwrap());
            let (e, ep) = (elliptic_e(a), elliptic_e(b));
            assert!((e * kp + ep * k - k * kp - FRAC_PI_2).abs() < 1e-10, "m={m}");
        }
    }

    #[test]
    fn defect_series_matches_direct_evaluation() {
        for m in [1e-3, 0.02, 0.0999] {
            let direct = (1.0 + m) * elliptic_e(modulus(m)) - (1.0 - m) * elliptic_k(modulus(m)).unwrap();
            let series = legendre_defect(modulus(m)).unwrap();
            assert!((series / direct - 1.0).abs() < 1e-11, "m={m}: {series} vs {direct}");
        }
        let tiny = 1e-12;
        let d = legendre_defect(modulus(tiny)).unwrap();
        assert!((d / (0.75 * PI * tiny) - 1.0).abs() < 1e-9);
        assert_eq!(legendre_defect(EllipticModulus::ZERO).unwrap(), 0.0);
    }

    #[test]
    fn sn_special_cases() {
        for m in [0.0, 0.3, 0.9, 1.0] {
            assert_eq!(jacobi_sn(0.0, modulus(m)).unwrap(), 0.0);
        }
        for u in [0.3, 1.7, -4.0] {
            assert_eq!(jacobi_sn(u, modulus(0.0)).unwrap(), u.sin());
            assert!((jacobi_sn(u, modulus(1.0)).unwrap() - u.tanh()).abs() < 1e-15);
        }
        assert!(jacobi_sn(f64::INFINITY, modulus(0.5)).is_err());
    }

    #[test]
    fn sn_matches_pendulum_ode() {
        let oracle = sn_by_ode(1.0, 0.5);
        let sn = jacobi_sn(1.0, modulus(0.5)).unwrap();
        assert!((sn - oracle).abs() < 1e-10, "{sn} vs {oracle}");
        let oracle = sn_by_ode(2.5, 0.9);
        assert!((jacobi_sn(2.5, modulus(0.9)).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn sn_quarter_and_full_period() {
        for m in [0.1, 0.5, 0.9, 0.999] {
            let mm = modulus(m);
            let k = elliptic_k(mm).unwrap();
            assert!((jacobi_sn(k, mm).unwrap() - 1.0).abs() < 1e-12, "m={m}");
            for u in [0.2, 1.1, 2.9] {
                let shifted = jacobi_sn(u + 4.0 * k, mm).unwrap();
                assert!((shifted - jacobi_sn(u, mm).unwrap()).abs() < 1e-10, "m={m}, u={u}");
            }
        }
    }

    #[test]
    fn triple_identities() {
        for (u, m) in [(0.4, 0.2), (1.9, 0.7), (-3.3, 0.95)] {
            let t = jacobi_elliptic(u, modulus(m)).unwrap();
            assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() < 1e-14);
            assert!((m * t.sn * t.sn + t.dn * t.dn - 1.0).abs() < 1e-14);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(10_000))]
        #[test]
        fn sn_bounded(u in -200.0f64..200.0, m in 0.0f64..=1.0) {
            let sn = jacobi_sn(u, modulus(m)).unwrap();
            proptest::prop_assert!(sn.abs() <= 1.0 + 1e-15);
        }
    }
}
