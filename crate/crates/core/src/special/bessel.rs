//! Bessel functions of the first kind J_nu for real order nu > -1/2.
//!
//! Power series up to z = max(12, 2 nu), Hankel asymptotic expansion beyond.
//! The switchover is validated in tests against quadrature of the integral
//! representation over [-1, 1].

use crate::error::{Error, Result};
use crate::special::gamma::recip_gamma;
#[cfg(test)]
use crate::special::gamma::gamma_fn;
use std::f64::consts::PI;

fn check_order(nu: f64) -> Result<()> {
    if !(nu > -0.5) {
        return Err(Error::domain(format!("bessel_j: order must exceed -1/2, got {nu}")));
    }
    Ok(())
}

fn series_scaled(nu: f64, z: f64) -> f64 {
    // J_nu(z) / z^nu = 2^{-nu} sum_k (-1)^k (z^2/4)^k / (k! Gamma(nu+k+1))
    let q = 0.25 * z * z;
    let mut term = recip_gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..400 {
        term *= -q / (k as f64 * (nu + k as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum * 2f64.powf(-nu)
}

fn hankel_asymptotic(nu: f64, z: f64) -> f64 {
    // J_nu(z) ~ sqrt(2/(pi z)) [P cos(w) - Q sin(w)], w = z - nu pi/2 - pi/4
    let w = z - 0.5 * nu * PI - 0.25 * PI;
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        term *= (mu4 - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * z);
        if term.abs() > prev {
            break; // asymptotic series: stop at the smallest term
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    (2.0 / (PI * z)).sqrt() * (p * w.cos() - q * w.sin())
}

/// J_nu(z) for z >= 0, nu > -1/2.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    if z < 0.0 {
        return Err(Error::domain("bessel_j: argument must be nonnegative"));
    }
    if z == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if z <= 12f64.max(2.0 * nu) {
        Ok(series_scaled(nu, z) * z.powf(nu))
    } else {
        Ok(hankel_asymptotic(nu, z))
    }
}

/// J_nu(z) / z^nu, finite at z = 0 (value 1 / (2^nu Gamma(nu+1))).
pub fn bessel_j_scaled(nu: f64, z: f64) -> Result<f64> {
    check_order(nu)?;
    if z < 0.0 {
        return Err(Error::domain("bessel_j_scaled: argument must be nonnegative"));
    }
    if z <= 12f64.max(2.0 * nu) {
        Ok(series_scaled(nu, z))
    } else {
        Ok(hankel_asymptotic(nu, z) / z.powf(nu))
    }
}

/// Approximate k-th positive zero of J_nu (McMahon's expansion). Used as
/// panel boundaries for oscillatory integrals; a few percent error is fine.
pub fn bessel_zero_approx(nu: f64, k: usize) -> f64 {
    let beta = (k as f64 + 0.5 * nu - 0.25) * PI;
    let mu4 = 4.0 * nu * nu;
    beta - (mu4 - 1.0) / (8.0 * beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad1d::integrate;

    /// Quadrature oracle: the integral representation
    /// J_nu(z) = z^nu / (2^nu sqrt(pi) Gamma(nu+1/2)) Int_{-1}^{1} (1-t^2)^{nu-1/2} cos(zt) dt.
    fn bessel_j_quadrature(nu: f64, z: f64) -> f64 {
        // substitute t = sin(phi) so the endpoint singularity vanishes:
        // (1-t^2)^{nu-1/2} dt = cos(phi)^{2 nu} dphi
        let mut f = |phi: f64| (phi.cos()).powf(2.0 * nu) * (z * phi.sin()).cos();
        let integral = integrate(&mut f, -0.5 * PI, 0.5 * PI, 1e-13);
        z.powf(nu) / (2f64.powf(nu) * PI.sqrt() * gamma_fn(nu + 0.5).unwrap()) * integral
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn half_integer_closed_form() {
        let z = 2.0;
        let expect = (2.0 / (PI * z)).sqrt() * z.sin();
        assert!((bessel_j(0.5, z).unwrap() - expect).abs() < 1e-13);
        // also past the series/asymptotic switchover
        let z = 40.0;
        let expect = (2.0 / (PI * z)).sqrt() * z.sin();
        assert!((bessel_j(0.5, z).unwrap() - expect).abs() < 1e-11);
    }

    #[test]
    fn against_quadrature_oracle() {
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.5] {
            for &z in &[0.3, 1.0, 3.0, 8.0, 11.9, 12.1, 20.0, 55.0] {
                let ours = bessel_j(nu, z).unwrap();
                let oracle = bessel_j_quadrature(nu, z);
                assert!(
                    (ours - oracle).abs() < 1e-10,
                    "nu={nu} z={z}: {ours} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn elementary_bound_near_zero() {
        // |J_nu(z)| <= z^nu / (2^nu Gamma(nu+1)) for small z
        for &nu in &[0.0, 0.5, 1.0] {
            for &z in &[1e-3f64, 0.1, 0.5] {
                let bound = z.powf(nu) * 2f64.powf(-nu) * recip_gamma(nu + 1.0);
                assert!(bessel_j(nu, z).unwrap().abs() <= bound * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn zeros_are_near_sign_changes() {
        for k in 1..6 {
            let z = bessel_zero_approx(0.0, k);
            let before = bessel_j(0.0, z - 0.3).unwrap();
            let after = bessel_j(0.0, z + 0.3).unwrap();
            assert!(before * after < 0.0, "zero {k} misplaced");
        }
    }
}
