//! Gamma and beta functions.
//!
//! Gamma uses the Lanczos approximation (g = 7, 9 coefficients, the GSL
//! parameter set) with the reflection formula for arguments below 1/2. This
//! gives relative accuracy around 1e-14 uniformly on the range the library
//! needs, with no external dependency.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_core(x: f64) -> f64 {
    // Gamma(x) for x >= 0.5
    let x = x - 1.0;
    let mut t = LANCZOS_P[0];
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        t += p / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * t
}

/// Euler Gamma function, extended to negative non-integer arguments by
/// reflection.
pub fn gamma_fn(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::domain("gamma: non-finite argument"));
    }
    if a <= 0.0 && a == a.floor() {
        return Err(Error::domain(format!("gamma: pole at non-positive integer {a}")));
    }
    if a < 0.5 {
        // Gamma(a) Gamma(1-a) = pi / sin(pi a)
        let s = (PI * a).sin();
        Ok(PI / (s * lanczos_core(1.0 - a)))
    } else {
        Ok(lanczos_core(a))
    }
}

/// 1 / Gamma(a), entire in `a`: returns 0 at the poles of Gamma. Used where a
/// vanishing coefficient is the correct limit.
pub fn recip_gamma(a: f64) -> f64 {
    if a <= 0.0 && a == a.floor() {
        return 0.0;
    }
    match gamma_fn(a) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// log |Gamma(a)| for a > 0.
pub fn ln_gamma(a: f64) -> Result<f64> {
    if a <= 0.0 {
        return Err(Error::domain("ln_gamma: argument must be positive"));
    }
    if a < 0.5 {
        let s = (PI * a).sin();
        return Ok(PI.ln() - s.ln() - ln_gamma(1.0 - a)?);
    }
    let x = a - 1.0;
    let mut t = LANCZOS_P[0];
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        t += p / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (x + 0.5) * w.ln() - w + t.ln())
}

/// Euler beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("beta: arguments must be positive, got ({a}, {b})")));
    }
    // via logs to avoid overflow for large arguments
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}
