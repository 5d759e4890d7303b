//! Shared machinery for real-space singular-integral evaluation: sampled
//! fields (closed-form or grid-interpolated), angular node sets, and radial
//! panel layouts.

use crate::error::{Error, Result};
use crate::fields::{PeriodicGrid, VectorField};
use crate::quad1d::gauss_legendre;
use crate::util::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Resolution and truncation knobs for singular-integral evaluation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// inner cutoff (the eps of truncated operators); 0 for PV forms
    pub r_inner: f64,
    /// outer truncation radius
    pub r_outer: f64,
    /// Gauss order per radial panel
    pub n_radial: usize,
    /// azimuthal resolution
    pub n_angular: usize,
    /// target accuracy for tail certificates
    pub tol: f64,
}

impl QuadratureSpec {
    pub fn new(r_inner: f64, r_outer: f64, n_radial: usize, n_angular: usize, tol: f64) -> Result<Self> {
        if !(r_inner >= 0.0 && r_inner < r_outer) {
            return Err(Error::domain("quadrature needs 0 <= r_inner < r_outer"));
        }
        if n_radial < 4 || n_angular < 4 {
            return Err(Error::domain("quadrature resolutions must be >= 4"));
        }
        if !(tol > 0.0) {
            return Err(Error::domain("quadrature tolerance must be positive"));
        }
        Ok(QuadratureSpec { r_inner, r_outer, n_radial, n_angular, tol })
    }

    /// Default spec for a field living in a box of side `len`.
    pub fn for_box(len: f64) -> Self {
        QuadratureSpec {
            r_inner: 0.0,
            r_outer: 1.2 * len,
            n_radial: 10,
            n_angular: 64,
            tol: 1e-5,
        }
    }

    /// Coarsened copy for nested inner integrals.
    pub fn coarser(&self) -> Self {
        QuadratureSpec {
            r_inner: self.r_inner,
            r_outer: self.r_outer,
            n_radial: (self.n_radial / 2).max(6),
            n_angular: (self.n_angular / 2).max(16),
            tol: self.tol * 10.0,
        }
    }
}

enum Source {
    Closure(Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>),
    Grid { grid: PeriodicGrid, data: Vec<f64> },
}

/// A vector field the singular-integral engine can evaluate anywhere:
/// a closed-form closure or a grid field with cubic (Catmull-Rom)
/// interpolation, zero outside its box. Carries a support radius around a
/// center and an optional Gaussian envelope certificate
/// |u(y)| <= amp * exp(-alpha |y - center|^2) outside the support, used for
/// honest truncation-error accounting (amp = 0 disables the certificate).
pub struct SampledField {
    d: usize,
    source: Source,
    center: Vec3,
    support_radius: f64,
    env_amp: f64,
    env_alpha: f64,
}

impl SampledField {
    pub fn from_closure(
        d: usize,
        f: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static,
        center: Vec3,
        support_radius: f64,
    ) -> Self {
        SampledField {
            d,
            source: Source::Closure(Arc::new(f)),
            center,
            support_radius,
            env_amp: 0.0,
            env_alpha: 0.0,
        }
    }

    /// Attach the Gaussian envelope certificate.
    pub fn with_envelope(mut self, amp: f64, alpha: f64) -> Self {
        self.env_amp = amp;
        self.env_alpha = alpha;
        self
    }

    /// Wrap a grid field; evaluation interpolates with a cubic kernel inside
    /// the box and returns zero outside.
    pub fn from_grid(u: &VectorField) -> Self {
        let grid = *u.grid();
        let d = grid.d();
        let l = grid.len();
        let mut center = [0.0; 3];
        for c in center.iter_mut().take(d) {
            *c = 0.5 * l;
        }
        SampledField {
            d,
            source: Source::Grid { grid, data: u.data().to_vec() },
            center,
            support_radius: 0.5 * l * (d as f64).sqrt(),
            env_amp: 0.0,
            env_alpha: 0.0,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn center(&self) -> &Vec3 {
        &self.center
    }

    #[inline]
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn eval(&self, x: &Vec3) -> Vec3 {
        match &self.source {
            Source::Closure(f) => f(x),
            Source::Grid { grid, data } => {
                let d = self.d;
                let l = grid.len();
                for ax in 0..d {
                    if x[ax] < 0.0 || x[ax] >= l {
                        return [0.0; 3];
                    }
                }
                let n = grid.n();
                let h = grid.spacing();
                let np = grid.num_points();
                // per-axis base index and Catmull-Rom weights
                let mut base = [0usize; 3];
                let mut wts = [[0.0f64; 4]; 3];
                for ax in 0..d {
                    let g = x[ax] / h;
                    let i0 = g.floor() as i64;
                    let t = g - i0 as f64;
                    base[ax] = i0.rem_euclid(n as i64) as usize;
                    let t2 = t * t;
                    let t3 = t2 * t;
                    wts[ax] = [
                        0.5 * (-t3 + 2.0 * t2 - t),
                        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
                        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
                        0.5 * (t3 - t2),
                    ];
                }
                let mut out = [0.0; 3];
                let taps = 4usize.pow(d as u32);
                for t in 0..taps {
                    let mut rem = t;
                    let mut w = 1.0;
                    let mut ij = [0usize; 3];
                    for ax in 0..d {
                        let k = rem % 4;
                        rem /= 4;
                        w *= wts[ax][k];
                        ij[ax] = (base[ax] + n + k - 1) % n;
                    }
                    if w == 0.0 {
                        continue;
                    }
                    let idx = grid.ravel(&ij);
                    for c in 0..d {
                        out[c] += w * data[c * np + idx];
                    }
                }
                out
            }
        }
    }

    /// Envelope value at radius `r` from the center (certificate bound).
    fn envelope_at(&self, r: f64) -> f64 {
        if self.env_amp == 0.0 {
            return 0.0;
        }
        self.env_amp * (-self.env_alpha * r * r).exp()
    }
}

/// Full-sphere angular nodes (for first-difference forms).
pub(crate) fn full_sphere_nodes(d: usize, n_azimuth: usize) -> Vec<(Vec3, f64)> {
    let mut nodes = Vec::new();
    if d == 2 {
        let w = 2.0 * PI / n_azimuth as f64;
        for j in 0..n_azimuth {
            let th = (j as f64 + 0.5) * w;
            nodes.push(([th.cos(), th.sin(), 0.0], w));
        }
    } else {
        let m = (n_azimuth / 2).max(4);
        let (mu, wmu) = gauss_legendre(m);
        let wa = 2.0 * PI / n_azimuth as f64;
        for (cm, cw) in mu.iter().zip(&wmu) {
            let sin_phi = (1.0 - cm * cm).sqrt();
            for j in 0..n_azimuth {
                let az = (j as f64 + 0.5) * wa;
                nodes.push(([sin_phi * az.cos(), sin_phi * az.sin(), *cm], cw * wa));
            }
        }
    }
    nodes
}

/// Radial Gauss nodes (rho, weight) covering [rho0, rho1]: log-spaced panels
/// near the inner end, switching to linear panels of width `lin_step` once
/// wider, `order` Gauss points per panel.
pub(crate) fn radial_nodes(rho0: f64, rho1: f64, lin_step: f64, order: usize) -> Vec<(f64, f64)> {
    assert!(rho0 > 0.0 && rho1 > rho0);
    let (xs, ws) = gauss_legendre(order);
    let mut nodes = Vec::new();
    let growth = 10f64.powf(1.0 / 6.0);
    let mut lo = rho0;
    while lo < rho1 {
        let width = (lo * (growth - 1.0)).min(lin_step);
        let hi = (lo + width).min(rho1);
        let c = 0.5 * (lo + hi);
        let hw = 0.5 * (hi - lo);
        for (x, w) in xs.iter().zip(&ws) {
            nodes.push((c + hw * x, w * hw));
        }
        lo = hi;
    }
    nodes
}

/// Certified bound on the neglected mass beyond `rho_end` when the field is
/// treated as zero there; errors out if above tolerance.
pub(crate) fn tail_certificate(
    u: &SampledField,
    x: &Vec3,
    rho_end: f64,
    kernel_pow: f64, // integrand ~ rho^{-1-kernel_pow}
    weight_scale: f64,
    spec: &QuadratureSpec,
) -> Result<()> {
    if u.env_amp == 0.0 {
        return Ok(());
    }
    let dist = crate::util::norm(u.d, &crate::util::sub(u.d, x, &u.center));
    let r_from_center = (rho_end - dist).max(u.support_radius);
    let sigma = crate::special::sphere_surface(crate::types::Dimension::new(u.d)?);
    let bound = 2.0
        * weight_scale
        * sigma
        * u.envelope_at(r_from_center)
        * rho_end.powf(-kernel_pow)
        / kernel_pow.max(1e-6);
    if bound > spec.tol {
        return Err(Error::accuracy(format!(
            "truncation tail bound {bound:.3e} exceeds tolerance {:.3e}; field decays too slowly \
             for r_outer = {}",
            spec.tol, spec.r_outer
        )));
    }
    Ok(())
}
