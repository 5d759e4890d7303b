//! Pointwise closed-form kernels: the fundamental solution, heat and Poisson
//! kernels, the classical half-space Dirichlet-to-Neumann integrals, and the
//! psi-profile pair behind the Poisson-type approximation kernel.
//!
//! All kernels have the isotropic structure a(|x|) I + b(|x|) xhat (x) xhat;
//! rotation equivariance and the stated homogeneities are exact by
//! construction. Sigma-integrals between the two moduli are evaluated by
//! adaptive Gauss panels exactly as written, one code path for every s.

use crate::error::{Error, Result};
use crate::quad1d::{integrate, integrate_log};
use crate::special::{bessel_j, bessel_laplace_integral, const_gamma_pot, gamma_fn};
use crate::symbol::ElasticModuli;
use crate::types::Dimension;
use crate::util::{dot, norm, Vec3};
use std::f64::consts::PI;

/// d x d matrix from the isotropic pair (a, b) at direction xhat.
fn isotropic_matrix(d: usize, x: &Vec3, a: f64, b: f64) -> [[f64; 3]; 3] {
    let n2 = dot(d, x, x);
    let mut m = [[0.0; 3]; 3];
    for i in 0..d {
        m[i][i] = a;
        if n2 > 0.0 {
            for j in 0..d {
                // product ordered so symmetry is bitwise exact
                m[i][j] += b * (x[i] * x[j] / n2);
            }
        }
    }
    m
}

/// Fundamental solution of the fractional operator, s in (0, d/2):
///
///   Psi^s(x) = gamma_{d,s} / (mu^s (2mu+lambda)^s) [ ((2s-1)(2mu+lambda)^s + mu^s)/(d-2s)
///              |x|^{2s-d} I  +  ((2mu+lambda)^s - mu^s) |x|^{2s-d} xhat (x) xhat ].
pub fn fundamental_solution(
    d: Dimension,
    x: &Vec3,
    s: f64,
    m: &ElasticModuli,
) -> Result<[[f64; 3]; 3]> {
    let dd = d.val();
    let r = norm(dd, x);
    if r == 0.0 {
        return Err(Error::singular("fundamental solution at x = 0"));
    }
    if !(s > 0.0 && s < 0.5 * d.as_f64()) {
        return Err(Error::domain(format!("fundamental solution needs s in (0, d/2), got {s}")));
    }
    let gam = const_gamma_pot(d, s)?;
    let mus = m.mu().powf(s);
    let lons = m.p_mod().powf(s);
    let pref = gam / (mus * lons) * r.powf(2.0 * s - d.as_f64());
    let a = pref * ((2.0 * s - 1.0) * lons + mus) / (d.as_f64() - 2.0 * s);
    let b = pref * (lons - mus);
    Ok(isotropic_matrix(dd, x, a, b))
}

/// Scalar heat kernel profile H(x, t) = (4 pi t)^{-d/2} exp(-|x|^2/(4t)).
fn gauss_heat(d: f64, r2: f64, t: f64) -> f64 {
    (4.0 * PI * t).powf(-0.5 * d) * (-r2 / (4.0 * t)).exp()
}

/// Matrix heat kernel
///   W(x, t) = H(x, mu t) I + Int_{mu t}^{(2mu+lambda) t} Hess H(x, sigma) dsigma,
/// the Hessian integral reduced to its radial profiles:
/// -Int H/(2 sigma) dsigma on the identity and +Int H/(4 sigma^2) dsigma on
/// x (x) x.
pub fn heat_kernel(d: Dimension, x: &Vec3, t: f64, m: &ElasticModuli) -> Result<[[f64; 3]; 3]> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("heat kernel needs t > 0, got {t}")));
    }
    let dd = d.val();
    let df = d.as_f64();
    let r2 = dot(dd, x, x);
    let a1 = gauss_heat(df, r2, m.mu() * t);
    let (lo, hi) = (m.mu() * t, m.p_mod() * t);
    let (a2, a3) = if (hi - lo).abs() < 1e-300 {
        (0.0, 0.0)
    } else {
        let a2 = integrate(&mut |sg: f64| gauss_heat(df, r2, sg) / (2.0 * sg), lo, hi, 1e-14);
        let a3 = integrate(&mut |sg: f64| gauss_heat(df, r2, sg) / (4.0 * sg * sg), lo, hi, 1e-14);
        (a2, a3)
    };
    Ok(isotropic_matrix(dd, x, a1 - a2, a3 * r2))
}

/// Poisson kernel of the extension system, the three-term closed form:
/// the mu-weighted Poisson-type term, minus the sigma-integrated identity
/// term, plus the sigma-integrated projector term.
pub fn poisson_kernel(
    d: Dimension,
    x: &Vec3,
    t: f64,
    s: f64,
    m: &ElasticModuli,
) -> Result<[[f64; 3]; 3]> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("poisson kernel needs t > 0, got {t}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("poisson kernel needs s in (0,1), got {s}")));
    }
    let dd = d.val();
    let df = d.as_f64();
    let r2 = dot(dd, x, x);
    let c0 = gamma_fn(0.5 * df + s)? / (PI.powf(0.5 * df) * gamma_fn(s)?);
    let t2s = t.powf(2.0 * s);
    let p1 = m.mu().powf(s) * c0 * t2s / (r2 + m.mu() * t * t).powf(0.5 * (df + 2.0 * s));
    let (lo, hi) = (m.mu(), m.p_mod());
    let (p2, p3) = if (hi - lo).abs() < 1e-300 {
        (0.0, 0.0)
    } else {
        let p2 = 0.5 * c0 * t2s
            * integrate(
                &mut |sg: f64| sg.powf(s - 1.0) / (r2 + sg * t * t).powf(0.5 * (df + 2.0 * s)),
                lo,
                hi,
                1e-14,
            );
        let p3 = 0.5 * (df + 2.0 * s) * c0 * t2s
            * integrate(
                &mut |sg: f64| {
                    sg.powf(s - 1.0) / (r2 + sg * t * t).powf(0.5 * (df + 2.0 * s) + 1.0)
                },
                lo,
                hi,
                1e-14,
            );
        (p2, p3)
    };
    Ok(isotropic_matrix(dd, x, p1 - p2, p3 * r2))
}

/// Mass of the Poisson kernel by radial quadrature with a certified
/// power-law tail; equals the identity matrix.
pub fn poisson_mass(d: Dimension, t: f64, s: f64, m: &ElasticModuli) -> Result<[[f64; 3]; 3]> {
    if !(t > 0.0) {
        return Err(Error::domain("poisson mass needs t > 0"));
    }
    let dd = d.val();
    let df = d.as_f64();
    let sigma = crate::special::sphere_surface(d);
    let profile = |r: f64| -> (f64, f64) {
        let x = [r, 0.0, 0.0];
        match poisson_kernel(d, &x, t, s, m) {
            Ok(k) => (k[1][1], k[0][0] - k[1][1]),
            Err(_) => (0.0, 0.0),
        }
    };
    let r_peak = t * m.p_mod().sqrt().max(m.mu().sqrt()).max(1.0);
    let r_cut = 100.0 * r_peak;
    let mut f_a = |r: f64| profile(r).0 * r.powf(df - 1.0);
    let mut f_b = |r: f64| profile(r).1 * r.powf(df - 1.0);
    let mut ia = integrate_log(&mut f_a, 1e-9 * r_peak, r_cut, 6, 16);
    let mut ib = integrate_log(&mut f_b, 1e-9 * r_peak, r_cut, 6, 16);
    // tail: both profiles decay like r^{-1-2s} after the r^{d-1} measure
    let tail_a = f_a(r_cut) * r_cut / (2.0 * s);
    let tail_b = f_b(r_cut) * r_cut / (2.0 * s);
    // the power-law extrapolation is accurate to O((r_peak/r_cut)^2) of
    // itself once the integrand is in its asymptotic regime; reject only
    // when the tail itself is no longer a small correction
    if (tail_a.abs() + tail_b.abs()) * sigma > 5e-2 {
        return Err(Error::accuracy(format!(
            "poisson mass tail estimate {:.3e} too large at truncation {r_cut}",
            (tail_a.abs() + tail_b.abs()) * sigma
        )));
    }
    ia += tail_a;
    ib += tail_b;
    let diag = sigma * (ia + ib / df);
    let mut out = [[0.0; 3]; 3];
    for i in 0..dd {
        out[i][i] = diag;
    }
    Ok(out)
}

/// Half-space Dirichlet-to-Neumann operator by PV quadrature: the two
/// singular integrals with |x-y|^{-d-1} kernels, second-difference
/// regularized, weights from the classical moduli.
pub fn dtn_halfspace_apply(
    f: &crate::quadrature::SampledField,
    x: &Vec3,
    m_tilde: &ElasticModuli,
    spec: &crate::quadrature::QuadratureSpec,
) -> Result<Vec3> {
    let d = f.dim();
    let df = d as f64;
    let omega_d = 2.0 * PI.powf(0.5 * (df + 1.0)) / gamma_fn(0.5 * (df + 1.0))?;
    let mu_t = m_tilde.mu();
    let la_t = m_tilde.lambda();
    let w_iso = 2.0 * mu_t * mu_t / (3.0 * mu_t + la_t) * 2.0 / omega_d;
    let w_proj = mu_t * (mu_t + la_t) / (3.0 * mu_t + la_t) * 2.0 * (df + 1.0) / omega_d;
    crate::quadrature::sd_operator_raw(f, x, 1.0, w_iso, w_proj, spec)
}

/// The identity c_{d,1/2} = 2/omega_d tying the half-space weights to the
/// operator normalization; returns both sides.
pub fn dtn_constant_identity(d: Dimension) -> Result<(f64, f64)> {
    let omega_d = 2.0 * PI.powf(0.5 * (d.as_f64() + 1.0)) / gamma_fn(0.5 * (d.as_f64() + 1.0))?;
    Ok((crate::special::const_c(d, 0.5)?, 2.0 / omega_d))
}

/// The profile pair (psi_1, psi_2) of the approximation kernel,
/// nu = (d-2)/2:
///
///   psi_1(r) = (2 pi)^{-d/2} Int t^{d/2+2s} e^{-rt} [J_nu(t) + 2s J_{nu+1}(t)/t] dt
///   psi_2(r) = (2 pi)^{-d/2} Int t^{d/2+2s} e^{-rt} [2s J_nu(t) - 2s d J_{nu+1}(t)/t] dt.
///
/// Moderate damping: panels between consecutive Bessel zeros with averaging
/// of the alternating tail. Small r (degenerate damping): the hypergeometric
/// closed form of the Laplace-Bessel moment.
pub fn psi_profiles(r: f64, s: f64, d: Dimension) -> Result<(f64, f64)> {
    if r < 0.0 {
        return Err(Error::domain("psi profiles need r >= 0"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain("psi profiles need s in (0,1)"));
    }
    let df = d.as_f64();
    let nu = 0.5 * (df - 2.0);
    let pref = (2.0 * PI).powf(-0.5 * df);
    let mu1 = 0.5 * df + 2.0 * s + 1.0;
    let mu2 = 0.5 * df + 2.0 * s;
    let r_eff = r.max(1e-14);
    let (i1, i2) = if r >= 0.02 {
        (
            damped_bessel_moment(r, mu1, nu)?,
            damped_bessel_moment(r, mu2, nu + 1.0)?,
        )
    } else {
        (
            bessel_laplace_integral(r_eff, 1.0, mu1, nu)?,
            bessel_laplace_integral(r_eff, 1.0, mu2, nu + 1.0)?,
        )
    };
    let psi1 = pref * (i1 + 2.0 * s * i2);
    let psi2 = pref * (2.0 * s * i1 - 2.0 * s * df * i2);
    Ok((psi1, psi2))
}

/// Int_0^inf t^{mu-1} e^{-rt} J_nu(t) dt by zero-panel summation with one
/// averaging pass on the alternating tail.
pub(crate) fn damped_bessel_moment(r: f64, mu: f64, nu: f64) -> Result<f64> {
    use crate::special::bessel_zero_approx;
    let mut f = |t: f64| -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        t.powf(mu - 1.0) * (-r * t).exp() * bessel_j(nu, t).unwrap_or(0.0)
    };
    let z1 = bessel_zero_approx(nu, 1);
    let mut partial = integrate(&mut f, 0.0, z1, 1e-12);
    let mut averaged = partial;
    let mut prev_avg;
    let mut lo = z1;
    let mut peak: f64 = partial.abs();
    for k in 2..200_000 {
        let hi = bessel_zero_approx(nu, k);
        let panel = integrate(&mut f, lo, hi, 1e-12);
        partial += panel;
        prev_avg = averaged;
        averaged = partial - 0.5 * panel;
        peak = peak.max(panel.abs());
        if panel.abs() < 1e-16 * peak.max(1e-300)
            || (panel.abs() < 1e-11 * peak
                && (averaged - prev_avg).abs() < 1e-11 * averaged.abs().max(1e-9))
        {
            return Ok(averaged);
        }
        lo = hi;
    }
    Err(Error::accuracy("damped Bessel moment did not converge"))
}

/// The approximation kernel
///   Upsilon^{s,eps}(x) = |x|^{-d-2s} ( psi_1(eps/|x|) I + psi_2(eps/|x|) xhat (x) xhat ).
pub fn upsilon_kernel(d: Dimension, x: &Vec3, eps: f64, s: f64) -> Result<[[f64; 3]; 3]> {
    let dd = d.val();
    let r = norm(dd, x);
    if r == 0.0 {
        return Err(Error::singular("upsilon kernel at x = 0"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("upsilon kernel needs eps > 0"));
    }
    let (psi1, psi2) = psi_profiles(eps / r, s, d)?;
    let w = r.powf(-(d.as_f64() + 2.0 * s));
    Ok(isotropic_matrix(dd, x, w * psi1, w * psi2))
}
