//! Gamma function on the positive axis.

use crate::error::{domain, Result};
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

/// Γ(x) for x > 0.
///
/// Integer and half-integer arguments are built by the recurrence
/// Γ(x+1) = xΓ(x) from Γ(1) = 1 and Γ(1/2) = √π, which is exact up to
/// rounding in the product. Other arguments use a Lanczos approximation.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma_fn requires x > 0, got {x}"));
    }
    let twice = 2.0 * x;
    if twice == twice.round() && x <= 171.0 {
        return Ok(gamma_half_integer(twice as u32));
    }
    Ok(lanczos(x))
}

/// Γ(m/2) for a positive integer m.
pub fn gamma_half_integer(twice_x: u32) -> f64 {
    debug_assert!(twice_x > 0);
    let (mut acc, mut t) = if twice_x % 2 == 0 {
        (1.0, 2u32)
    } else {
        (PI.sqrt(), 1u32)
    };
    while t < twice_x {
        acc *= t as f64 / 2.0;
        t += 2;
    }
    acc
}

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    if x < 100.0 {
        return Ok(gamma_fn(x)?.ln());
    }
    // Stirling series, accurate to rounding for x ≥ 100.
    let z = 1.0 / (x * x);
    let series = (1.0 / 12.0 - z * (1.0 / 360.0 - z * (1.0 / 1260.0 - z / 1680.0))) / x;
    Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series)
}

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// k! as a float.
pub fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// Binomial coefficient C(k, l).
pub fn binomial(k: u32, l: u32) -> f64 {
    if l > k {
        return 0.0;
    }
    let l = l.min(k - l);
    (0..l).fold(1.0, |acc, j| acc * (k - j) as f64 / (j + 1) as f64)
}
