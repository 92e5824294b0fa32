use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation (g = 7), with reflection
/// below 1/2. Relative accuracy is about 1e-15 on moderate arguments.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{GAMMA_QUARTER, GAMMA_THREE_QUARTERS};

    #[test]
    fn integer_and_half_integer_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn quarter_values_and_reflection() {
        assert!((gamma(0.25) / GAMMA_QUARTER - 1.0).abs() < 1e-14);
        assert!((gamma(0.75) / GAMMA_THREE_QUARTERS - 1.0).abs() < 1e-14);
        // Γ(1/4)Γ(3/4) = π√2
        assert!((GAMMA_QUARTER * GAMMA_THREE_QUARTERS - PI * 2f64.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.25) + 4.0 * GAMMA_THREE_QUARTERS).abs() < 1e-13);
    }
}
