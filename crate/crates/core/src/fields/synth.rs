//! Synthetic fields used by the verification suites, the CLI `apply`
//! command, and the cross-route tests: Gaussian-envelope modulated waves
//! centered in the box, chosen so envelope mass at the boundary is far below
//! the tolerances the suites test at, and band-limited random fields.

use super::grid::{PeriodicGrid, VectorField};
use crate::util::{SplitMix64, Vec3};
use std::f64::consts::PI;

/// A Gaussian envelope exp(-|x - c|^2 / (2 w^2)) carrying a cosine wave with
/// integer wavenumbers `k` (so the carrier is grid-periodic) and polarization
/// `pol`.
#[derive(Clone, Debug)]
pub struct GaussianWave {
    pub center: Vec3,
    pub width: f64,
    pub wavevec: Vec3, // cycles per unit length
    pub pol: Vec3,
    pub phase: f64,
    pub d: usize,
}

impl GaussianWave {
    pub fn eval(&self, x: &Vec3) -> Vec3 {
        let mut r2 = 0.0;
        for ax in 0..self.d {
            let dx = x[ax] - self.center[ax];
            r2 += dx * dx;
        }
        let env = (-r2 / (2.0 * self.width * self.width)).exp();
        let carrier =
            (2.0 * PI * crate::util::dot(self.d, &self.wavevec, x) + self.phase).cos();
        crate::util::scale(self.d, &self.pol, env * carrier)
    }

    /// Bound C e^{-alpha r^2} on the envelope: (C, alpha).
    pub fn envelope_bound(&self) -> (f64, f64) {
        let amp = crate::util::norm(self.d, &self.pol);
        (amp, 1.0 / (2.0 * self.width * self.width))
    }
}

/// Standard test wave: centered, width len/12, wavenumbers (3, -2[, 1]),
/// oblique polarization. Envelope mass at the box boundary is
/// exp(-(len/2)^2/(2 (len/12)^2)) = exp(-18) ~ 1.5e-8 of the peak.
pub fn standard_wave(grid: &PeriodicGrid) -> GaussianWave {
    let d = grid.d();
    let l = grid.len();
    let mut center = [0.0; 3];
    let mut wavevec = [0.0; 3];
    let mut pol = [0.0; 3];
    let kint = [3.0, -2.0, 1.0];
    for ax in 0..d {
        center[ax] = 0.5 * l;
        wavevec[ax] = kint[ax] / l;
        pol[ax] = 1.0 / (1.0 + ax as f64);
    }
    GaussianWave { center, width: l / 12.0, wavevec, pol, phase: 0.3, d }
}

/// Sample a Gaussian wave on the grid.
pub fn gaussian_wave_field(grid: PeriodicGrid, wave: &GaussianWave) -> VectorField {
    VectorField::from_fn(grid, |x| wave.eval(x))
}

/// Random band-limited field: modes with |k|_inf <= kmax, conjugate-symmetric
/// coefficients drawn from a seeded generator, unit-normalized.
pub fn random_band_limited(grid: PeriodicGrid, kmax: i64, seed: u64) -> VectorField {
    let d = grid.d();
    let l = grid.len();
    let mut rng = SplitMix64::new(seed);
    // build as a sum of real cosine modes: deterministic and exactly real
    let mut modes: Vec<(Vec3, Vec3, f64)> = Vec::new();
    let kr = -kmax..=kmax;
    let mut push = |rng: &mut SplitMix64, k: [i64; 3]| {
        if k.iter().all(|&c| c == 0) {
            return;
        }
        let mut wavevec = [0.0; 3];
        for ax in 0..3 {
            wavevec[ax] = k[ax] as f64 / l;
        }
        let mut pol = [0.0; 3];
        for p in pol.iter_mut().take(d) {
            *p = rng.uniform(-1.0, 1.0);
        }
        let phase = rng.uniform(0.0, 2.0 * PI);
        modes.push((wavevec, pol, phase));
    };
    if d == 2 {
        for k0 in kr.clone() {
            for k1 in kr.clone() {
                push(&mut rng, [k0, k1, 0]);
            }
        }
    } else {
        for k0 in kr.clone() {
            for k1 in kr.clone() {
                for k2 in kr.clone() {
                    push(&mut rng, [k0, k1, k2]);
                }
            }
        }
    }
    let mut u = VectorField::from_fn(grid, |x| {
        let mut v = [0.0; 3];
        for (wavevec, pol, phase) in &modes {
            let c = (2.0 * PI * crate::util::dot(d, wavevec, x) + phase).cos();
            for ax in 0..d {
                v[ax] += pol[ax] * c;
            }
        }
        v
    });
    let norm = u.l2_norm();
    if norm > 0.0 {
        for v in u.data_mut() {
            *v /= norm;
        }
    }
    u
}

/// Remove the componentwise mean.
pub fn remove_mean(u: &mut VectorField) {
    let mean = u.mean();
    let d = u.grid().d();
    for c in 0..d {
        for v in u.comp_mut(c) {
            *v -= mean[c];
        }
    }
}
