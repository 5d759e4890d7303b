//! The normalizing constants tying the singular-integral and Fourier
//! definitions of the operators together, plus the Fourier transform of the
//! unit sphere's surface measure.

use crate::error::{Error, Result};
use crate::special::bessel::bessel_j_scaled;
use crate::special::gamma::gamma_fn;
use crate::types::Dimension;
use std::f64::consts::PI;

fn check_s_unit(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("normalizing constant needs s in (0,1), got {s}")));
    }
    Ok(())
}

/// c_{d,s} = 2^{2s} s Gamma(d/2 + s) / (pi^{d/2} Gamma(1 - s)),
/// the reciprocal of Int (1 - cos h_1) / |h|^{d+2s} dh.
pub fn const_c(d: Dimension, s: f64) -> Result<f64> {
    check_s_unit(s)?;
    let df = d.as_f64();
    Ok(2f64.powf(2.0 * s) * s * gamma_fn(0.5 * df + s)? / (PI.powf(0.5 * df) * gamma_fn(1.0 - s)?))
}

/// kappa_{d,s} = (d + 2s) c_{d,s}.
pub fn const_kappa(d: Dimension, s: f64) -> Result<f64> {
    Ok((d.as_f64() + 2.0 * s) * const_c(d, s)?)
}

/// k_{d,s} = 2^s Gamma((d+s+1)/2) / (pi^{d/2} Gamma((1-s)/2)),
/// the reciprocal of Int h_1 sin(h_1) / |h|^{d+s+1} dh.
pub fn const_k(d: Dimension, s: f64) -> Result<f64> {
    check_s_unit(s)?;
    let df = d.as_f64();
    Ok(2f64.powf(s) * gamma_fn(0.5 * (df + s + 1.0))?
        / (PI.powf(0.5 * df) * gamma_fn(0.5 * (1.0 - s))?))
}

/// g_{d,s} = Gamma(d/2 - s) / (pi^{d/2} 2^{2s} Gamma(s)), the Riesz kernel
/// constant; needs 0 < s < d/2.
pub fn const_g(d: Dimension, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 0.5 * d.as_f64()) {
        return Err(Error::domain(format!("g_{{d,s}} needs 0 < s < d/2, got s={s}")));
    }
    let df = d.as_f64();
    Ok(gamma_fn(0.5 * df - s)? / (PI.powf(0.5 * df) * 2f64.powf(2.0 * s) * gamma_fn(s)?))
}

/// gamma_{d,s} = Gamma((d+2-2s)/2) / (2^{2s} pi^{d/2} Gamma(1+s))
///             = (d - 2s)/(2s) * g_{d,s}; needs 0 < s < d/2.
pub fn const_gamma_pot(d: Dimension, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 0.5 * d.as_f64()) {
        return Err(Error::domain(format!("gamma_{{d,s}} needs 0 < s < d/2, got s={s}")));
    }
    let df = d.as_f64();
    Ok(gamma_fn(0.5 * (df + 2.0 - 2.0 * s))?
        / (2f64.powf(2.0 * s) * PI.powf(0.5 * df) * gamma_fn(1.0 + s)?))
}

/// Surface measure of the unit sphere S^{d-1} in R^d.
pub fn sphere_surface(d: Dimension) -> f64 {
    let df = d.as_f64();
    2.0 * PI.powf(0.5 * df) / gamma_fn(0.5 * df).expect("d/2 > 0")
}

/// Which angular moment of the sphere transform to take.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SphereMoment {
    /// Int_{S^{d-1}} e^{-i r eta.w} dsigma(w)
    Zero,
    /// Int_{S^{d-1}} (eta.w)^2 e^{-i r eta.w} dsigma(w)
    Two,
}

/// Radial profile of the Fourier transform of the sphere's surface measure,
/// with nu = (d-2)/2:
///   moment 0: (2 pi)^{d/2} J_nu(r) / r^nu
///   moment 2: (2 pi)^{d/2} ( J_nu(r)/r^nu - (d-1) J_{nu+1}(r)/r^{nu+1} )
pub fn sphere_fourier_radial(r: f64, d: Dimension, moment: SphereMoment) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::domain("sphere_fourier_radial: r must be nonnegative"));
    }
    let nu = 0.5 * (d.as_f64() - 2.0);
    let pref = (2.0 * PI).powf(0.5 * d.as_f64());
    match moment {
        SphereMoment::Zero => Ok(pref * bessel_j_scaled(nu, r)?),
        SphereMoment::Two => Ok(pref
            * (bessel_j_scaled(nu, r)? - (d.as_f64() - 1.0) * bessel_j_scaled(nu + 1.0, r)?)),
    }
}
