//! Interaction stencils for piecewise-multilinear (Q1) hat functions on a
//! uniform grid against the singular kernels of the bilinear form.
//!
//! For hats phi_i, phi_j with node offset delta = j - i, define
//!
//!   W0(delta)    = 1/2 Int Int (phi_i(x)-phi_i(y)) (phi_j(x)-phi_j(y)) |x-y|^{-d-2s} dy dx
//!   W2_ab(delta) = same with the extra projector factor z_a z_b / |z|^2, z = x - y.
//!
//! Both depend on delta only, so the full Galerkin matrix is a convolution
//! stencil. Scaling: W(delta; h) = h^{d-2s} W(delta; 1), so tables are built
//! at unit spacing.
//!
//! Pairing x <-> y collapses the double integral onto the hat
//! cross-correlation M(z) = Int phi_0(x) phi_delta(x + z) dx, a tensor
//! product of cubic B-splines:
//!
//!   W(delta) = 1/2 Int (2 M(0) - M(z) - M(-z)) K(z) dz.
//!
//! The integrand vanishes to second order at z = 0 and is piecewise
//! polynomial of degree <= 3d along any ray, so the radial integral is
//! evaluated exactly per angular direction (polynomial recovery between knot
//! crossings + elementary kernel moments, analytic tail to infinity). The
//! only discretization left is the angular rule.

use crate::error::{Error, Result};
use crate::quad1d::gauss_legendre;
use crate::util::Vec3;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct StencilTable {
    d: usize,
    s: f64,
    max_offset: i64,
    side: usize,
    w0: Vec<f64>,
    /// packed symmetric matrices (xx, yy, zz, xy, xz, yz)
    w2: Vec<[f64; 6]>,
}

/// Cubic B-spline profile: the cross-correlation of two unit tents,
/// B(t) = Int tent(x) tent(x + t) dx, supported on |t| < 2, C^2.
#[inline]
fn bspline(t: f64) -> f64 {
    let a = t.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        let u = 2.0 - a;
        u * u * u / 6.0
    } else {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    }
}

/// M(z) = prod_ax B(z_ax - delta_ax).
#[inline]
fn correlation(d: usize, delta: &Vec3, z: &Vec3) -> f64 {
    let mut v = 1.0;
    for ax in 0..d {
        v *= bspline(z[ax] - delta[ax]);
        if v == 0.0 {
            return 0.0;
        }
    }
    v
}

/// 2 M(0) - M(rho w) - M(-rho w).
#[inline]
fn sd_correlation(d: usize, delta: &Vec3, m0: f64, omega: &Vec3, rho: f64) -> f64 {
    let zp = crate::util::scale(d, omega, rho);
    let zm = crate::util::scale(d, omega, -rho);
    2.0 * m0 - correlation(d, delta, &zp) - correlation(d, delta, &zm)
}

/// Knot-crossing radii of both rays against the B-spline knots
/// {delta_ax - 2, ..., delta_ax + 2}, and the radius past which both rays
/// leave the support of M.
fn ray_breakpoints(d: usize, omega: &Vec3, delta: &Vec3, breaks: &mut Vec<f64>) -> f64 {
    breaks.clear();
    let mut exit = f64::INFINITY;
    for ax in 0..d {
        let w = omega[ax];
        if w.abs() < 1e-14 {
            continue;
        }
        for m in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let knot = delta[ax] + m;
            for sign in [1.0, -1.0] {
                let rho = knot / (sign * w);
                if rho > 1e-13 {
                    breaks.push(rho);
                }
            }
        }
        let span = (delta[ax] + 2.0).abs().max((delta[ax] - 2.0).abs());
        exit = exit.min(span / w.abs());
    }
    breaks.push(exit);
    breaks.retain(|r| *r <= exit * (1.0 + 1e-12));
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // relative dedup: near-coincident crossings produce sliver segments on
    // which polynomial recovery is catastrophically ill-conditioned
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + *b));
    exit
}

const MAX_DEG: usize = 10; // degree 3d plus headroom

/// Recover polynomial coefficients through the samples (Newton form ->
/// monomials). `n` samples determine degree n-1.
fn poly_through(rs: &[f64], fs: &[f64], mono: &mut [f64; MAX_DEG]) {
    let n = rs.len();
    let mut dd = [0.0f64; MAX_DEG];
    dd[..n].copy_from_slice(fs);
    let mut coef = [0.0f64; MAX_DEG];
    coef[0] = dd[0];
    for order in 1..n {
        for k in 0..(n - order) {
            dd[k] = (dd[k + 1] - dd[k]) / (rs[k + order] - rs[k]);
        }
        coef[order] = dd[0];
    }
    mono.fill(0.0);
    let mut basis = [0.0f64; MAX_DEG];
    basis[0] = 1.0;
    for (j, &cj) in coef.iter().enumerate().take(n) {
        for (p, &b) in basis.iter().enumerate().take(j + 1) {
            mono[p] += cj * b;
        }
        if j + 1 < n {
            let mut next = [0.0f64; MAX_DEG];
            for (p, &b) in basis.iter().enumerate().take(j + 1) {
                next[p + 1] += b;
                next[p] -= rs[j] * b;
            }
            basis = next;
        }
    }
}

/// Integral over (0, infinity) of SD(rho) rho^{-1-2s} along one ray. The
/// singular first segment uses exact polynomial recovery of SD/rho^2 in the
/// scaled variable rho/rho_1 (perfectly conditioned); later segments carry a
/// smooth integrand and use Gauss quadrature, which is exact to roundoff for
/// the polynomial-times-smooth-kernel product at these panel ratios.
fn ray_integral(d: usize, delta: &Vec3, m0: f64, omega: &Vec3, s: f64, breaks: &[f64], exit: f64) -> f64 {
    let deg = 3 * d; // SD is a polynomial of degree <= 3d on each segment
    let mut total = 0.0;
    let mut lo = 0.0f64;
    let mut ts = [0.0f64; MAX_DEG];
    let mut fs = [0.0f64; MAX_DEG];
    let mut mono = [0.0f64; MAX_DEG];
    let (gx, gw) = gauss_legendre(12);
    for &hi in breaks {
        // slivers from near-coincident crossings contribute below roundoff
        if hi <= lo * (1.0 + 1e-9) + 1e-13 {
            continue;
        }
        if lo == 0.0 {
            // SD = rho^2 q(rho), q of degree deg-2; recover q in tau = rho/hi
            let n = deg - 1;
            for k in 0..n {
                let tau = (k as f64 + 0.5) / n as f64;
                let r = hi * tau;
                ts[k] = tau;
                fs[k] = sd_correlation(d, delta, m0, omega, r) / (r * r);
            }
            poly_through(&ts[..n], &fs[..n], &mut mono);
            let mut seg = 0.0;
            for (p, &c) in mono.iter().enumerate().take(n) {
                seg += c / (p as f64 + 2.0 - 2.0 * s);
            }
            total += seg * hi.powf(2.0 - 2.0 * s);
        } else {
            let c = 0.5 * (lo + hi);
            let hw = 0.5 * (hi - lo);
            for (x, w) in gx.iter().zip(&gw) {
                let r = c + hw * x;
                total += w * hw * sd_correlation(d, delta, m0, omega, r) * r.powf(-1.0 - 2.0 * s);
            }
        }
        lo = hi;
    }
    // analytic tail: SD = 2 M(0) beyond the support exit
    if m0 != 0.0 {
        total += 2.0 * m0 * exit.powf(-2.0 * s) / (2.0 * s);
    }
    total
}

/// Angular nodes over the half sphere, weights summing to half the sphere
/// surface (the integrands here are even in z).
pub(crate) fn half_sphere_nodes(d: usize, n_azimuth: usize) -> Vec<(Vec3, f64)> {
    let mut nodes = Vec::new();
    if d == 2 {
        let w = PI / n_azimuth as f64;
        for j in 0..n_azimuth {
            let th = (j as f64 + 0.5) * w;
            nodes.push(([th.cos(), th.sin(), 0.0], w));
        }
    } else {
        let m = (n_azimuth / 2).max(4);
        let (mu, wmu) = gauss_legendre(m);
        let wa = 2.0 * PI / n_azimuth as f64;
        for (cm, cw) in mu.iter().zip(&wmu) {
            let c = 0.5 * (cm + 1.0); // cos(polar) in (0, 1): upper hemisphere
            let sin_phi = (1.0 - c * c).sqrt();
            for j in 0..n_azimuth {
                let az = (j as f64 + 0.5) * wa;
                nodes.push(([sin_phi * az.cos(), sin_phi * az.sin(), c], 0.5 * cw * wa));
            }
        }
    }
    nodes
}

/// Angles in (0, pi) at which the radial breakpoint pattern changes for this
/// offset: axis directions plus every tan(theta) = knot_2 / knot_1 ratio.
/// The angular profile is analytic between consecutive such angles.
fn kink_angles_2d(delta: &Vec3) -> Vec<f64> {
    let mut angles = vec![0.0, 0.5 * PI, PI];
    for m1 in [-2.0f64, -1.0, 0.0, 1.0, 2.0] {
        let p = delta[0] + m1;
        for m2 in [-2.0f64, -1.0, 0.0, 1.0, 2.0] {
            let q = delta[1] + m2;
            if p == 0.0 && q == 0.0 {
                continue;
            }
            let th = q.atan2(p); // in (-pi, pi]
            let th = if th < 0.0 { th + PI } else { th };
            if th > 1e-12 && th < PI - 1e-12 {
                angles.push(th);
            }
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    angles
}

/// Both stencil weights for one offset. In 2D the angular integral is split
/// at the kink angles with Gauss panels in between (the integrand is
/// analytic there); in 3D a product rule over the hemisphere is used.
fn weights(d: usize, s: f64, delta_i: &[i64; 3], angular_3d: &[(Vec3, f64)]) -> (f64, [f64; 6]) {
    let mut delta = [0.0f64; 3];
    for ax in 0..d {
        delta[ax] = delta_i[ax] as f64;
    }
    let m0 = correlation(d, &delta, &[0.0; 3]);
    let mut w0 = 0.0;
    let mut w2 = [0.0f64; 6];
    let mut breaks: Vec<f64> = Vec::with_capacity(64);
    let mut accumulate = |omega: &Vec3, wo: f64, breaks: &mut Vec<f64>| {
        let exit = ray_breakpoints(d, omega, &delta, breaks);
        let ray = ray_integral(d, &delta, m0, omega, s, breaks, exit);
        // half-sphere doubling cancels the 1/2 of the paired form exactly
        let contrib = wo * ray;
        w0 += contrib;
        w2[0] += contrib * omega[0] * omega[0];
        w2[1] += contrib * omega[1] * omega[1];
        w2[2] += contrib * omega[2] * omega[2];
        w2[3] += contrib * omega[0] * omega[1];
        w2[4] += contrib * omega[0] * omega[2];
        w2[5] += contrib * omega[1] * omega[2];
    };
    if d == 2 {
        let kinks = kink_angles_2d(&delta);
        let (xs, ws) = gauss_legendre(16);
        for pair in kinks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let c = 0.5 * (a + b);
            let hw = 0.5 * (b - a);
            for (x, w) in xs.iter().zip(&ws) {
                let th = c + hw * x;
                let omega = [th.cos(), th.sin(), 0.0];
                accumulate(&omega, w * hw, &mut breaks);
            }
        }
    } else {
        for (omega, wo) in angular_3d {
            accumulate(omega, *wo, &mut breaks);
        }
    }
    (w0, w2)
}

impl StencilTable {
    /// Build the table covering |delta|_inf <= max_offset at spacing h.
    pub fn build(d: usize, s: f64, h: f64, max_offset: i64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("stencil order must lie in (0,1), got {s}")));
        }
        if !(d == 2 || d == 3) {
            return Err(Error::domain("stencil supports d in {2,3}"));
        }
        if !(h > 0.0) {
            return Err(Error::domain("grid spacing must be positive"));
        }
        let side = (2 * max_offset + 1) as usize;
        let count = side.pow(d as u32);
        let scale = h.powf(d as f64 - 2.0 * s);
        let angular = if d == 3 { half_sphere_nodes(3, 64) } else { Vec::new() };
        let entries: Vec<Option<(f64, [f64; 6])>> = (0..count)
            .into_par_iter()
            .map(|flat| {
                let mut delta = [0i64; 3];
                let mut rem = flat;
                for ax in (0..d).rev() {
                    delta[ax] = (rem % side) as i64 - max_offset;
                    rem /= side;
                }
                // compute only the canonical half; mirror delta -> -delta
                let lead = (0..d).map(|ax| delta[ax]).find(|&v| v != 0).unwrap_or(0);
                if lead < 0 {
                    return None;
                }
                Some(weights(d, s, &delta, &angular))
            })
            .collect();
        let mut w0 = vec![0.0; count];
        let mut w2 = vec![[0.0; 6]; count];
        for flat in 0..count {
            let (v0, v2) = entries[flat].unwrap_or_else(|| entries[count - 1 - flat].unwrap());
            w0[flat] = v0 * scale;
            w2[flat] = v2.map(|v| v * scale);
        }
        Ok(StencilTable { d, s, max_offset, side, w0, w2 })
    }

    #[inline]
    pub fn max_offset(&self) -> i64 {
        self.max_offset
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn order(&self) -> f64 {
        self.s
    }

    #[inline]
    fn flat(&self, delta: &[i64; 3]) -> Option<usize> {
        let mut flat = 0usize;
        for ax in 0..self.d {
            if delta[ax].abs() > self.max_offset {
                return None;
            }
            flat = flat * self.side + (delta[ax] + self.max_offset) as usize;
        }
        Some(flat)
    }

    /// Scalar-kernel weight; None when the offset leaves the table.
    #[inline]
    pub fn w0(&self, delta: &[i64; 3]) -> Option<f64> {
        self.flat(delta).map(|f| self.w0[f])
    }

    /// Projector-kernel weight, packed (xx, yy, zz, xy, xz, yz).
    #[inline]
    pub fn w2(&self, delta: &[i64; 3]) -> Option<[f64; 6]> {
        self.flat(delta).map(|f| self.w2[f])
    }

    /// Unpack a packed weight into a matrix.
    pub fn unpack(w: &[f64; 6]) -> [[f64; 3]; 3] {
        [[w[0], w[3], w[4]], [w[3], w[1], w[5]], [w[4], w[5], w[2]]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad1d::gl_panel;

    /// Fourier-route oracle:
    ///   W0(delta) = (1/c_{d,s}) Int (2 pi |xi|)^{2s} |hat phi(xi)|^2 cos(2 pi xi . delta) dxi,
    /// reduced to the positive quadrant with product-cosine parity.
    fn fourier_w0_2d(s: f64, delta: [f64; 2]) -> f64 {
        let c = crate::special::const_c(crate::types::Dimension::new(2).unwrap(), s).unwrap();
        let sinc2 = |t: f64| -> f64 {
            if t.abs() < 1e-8 {
                1.0 - t * t / 3.0
            } else {
                let v = t.sin() / t;
                v * v
            }
        };
        let f = |a: f64, b: f64| -> f64 {
            let n2 = a * a + b * b;
            if n2 == 0.0 {
                return 0.0;
            }
            let w = (4.0 * PI * PI * n2).powf(s);
            let hat2 = sinc2(PI * a) * sinc2(PI * a) * sinc2(PI * b) * sinc2(PI * b);
            w * hat2 * (2.0 * PI * a * delta[0]).cos() * (2.0 * PI * b * delta[1]).cos()
        };
        // per-axis panel width resolves both the sinc^4 structure and the
        // cos oscillation of that axis' offset
        let sub_a = 1 + delta[0].abs() as usize;
        let sub_b = 1 + delta[1].abs() as usize;
        let k = 150usize;
        let (na, nb) = (k * sub_a, k * sub_b);
        let (wa, wb) = (1.0 / sub_a as f64, 1.0 / sub_b as f64);
        let total: f64 = (0..nb)
            .into_par_iter()
            .map(|ib| {
                let mut row = 0.0;
                for ia in 0..na {
                    let mut inner = |b: f64| {
                        gl_panel(&mut |a: f64| f(a, b), ia as f64 * wa, (ia + 1) as f64 * wa, 12)
                    };
                    row += gl_panel(&mut inner, ib as f64 * wb, (ib + 1) as f64 * wb, 12);
                }
                row
            })
            .sum();
        4.0 * total / c
    }

    /// Truncation-tail bound of the oracle's [0, K]^2 box: the along-axis
    /// strips dominate, integrand ~ (2 pi a)^{2s} sinc^4(pi a) * transverse.
    fn oracle_tail_bound(s: f64, k: f64) -> f64 {
        let c = crate::special::const_c(crate::types::Dimension::new(2).unwrap(), s).unwrap();
        let strip = (2.0 * PI).powf(2.0 * s) * k.powf(2.0 * s - 3.0) / (3.0 - 2.0 * s)
            * (3.0 / 8.0)
            / PI.powi(4)
            * (2.0 / 3.0);
        2.0 * (4.0 / c) * strip
    }

    /// Fourier oracle for the off-diagonal projector weight; the quadrant
    /// reduction of xi_1 xi_2 cos(2 pi xi.delta) carries sin*sin parity.
    fn fourier_w2xy_2d(s: f64, delta: [f64; 2]) -> f64 {
        let kappa =
            crate::special::const_kappa(crate::types::Dimension::new(2).unwrap(), s).unwrap();
        let sinc2 = |t: f64| -> f64 {
            if t.abs() < 1e-8 {
                1.0 - t * t / 3.0
            } else {
                let v = t.sin() / t;
                v * v
            }
        };
        let f = |a: f64, b: f64| -> f64 {
            let n2 = a * a + b * b;
            if n2 == 0.0 {
                return 0.0;
            }
            let w = (4.0 * PI * PI * n2).powf(s) * 2.0 * s * a * b / n2;
            let hat2 = sinc2(PI * a) * sinc2(PI * a) * sinc2(PI * b) * sinc2(PI * b);
            -w * hat2 * (2.0 * PI * a * delta[0]).sin() * (2.0 * PI * b * delta[1]).sin()
        };
        // per-axis panel width resolves both the sinc^4 structure and the
        // cos oscillation of that axis' offset
        let sub_a = 1 + delta[0].abs() as usize;
        let sub_b = 1 + delta[1].abs() as usize;
        let k = 150usize;
        let (na, nb) = (k * sub_a, k * sub_b);
        let (wa, wb) = (1.0 / sub_a as f64, 1.0 / sub_b as f64);
        let total: f64 = (0..nb)
            .into_par_iter()
            .map(|ib| {
                let mut row = 0.0;
                for ia in 0..na {
                    let mut inner = |b: f64| {
                        gl_panel(&mut |a: f64| f(a, b), ia as f64 * wa, (ia + 1) as f64 * wa, 12)
                    };
                    row += gl_panel(&mut inner, ib as f64 * wb, (ib + 1) as f64 * wb, 12);
                }
                row
            })
            .sum();
        4.0 * total / kappa
    }

    use rayon::prelude::*;

    #[test]
    fn near_stencils_match_fourier_oracle() {
        let s = 0.6;
        let table = StencilTable::build(2, s, 1.0, 4).unwrap();
        let scale = fourier_w0_2d(s, [0.0, 0.0]).abs();
        let tol = 2e-6 * scale + 2.0 * oracle_tail_bound(s, 150.0);
        for delta in [[0i64, 0, 0], [1, 0, 0], [1, 1, 0], [2, 0, 0], [2, 1, 0]] {
            let ours = table.w0(&delta).unwrap();
            let oracle = fourier_w0_2d(s, [delta[0] as f64, delta[1] as f64]);
            assert!(
                (ours - oracle).abs() < tol,
                "delta {delta:?}: {ours} vs {oracle}"
            );
        }
    }

    #[test]
    fn far_stencils_match_fourier_oracle() {
        let s = 0.35;
        let table = StencilTable::build(2, s, 1.0, 6).unwrap();
        let scale = fourier_w0_2d(s, [0.0, 0.0]).abs();
        let tol = 2e-6 * scale + 2.0 * oracle_tail_bound(s, 150.0);
        for delta in [[3i64, 0, 0], [4, 2, 0], [5, 5, 0]] {
            let ours = table.w0(&delta).unwrap();
            let oracle = fourier_w0_2d(s, [delta[0] as f64, delta[1] as f64]);
            assert!(
                (ours - oracle).abs() < tol,
                "delta {delta:?}: {ours} vs {oracle}"
            );
        }
    }

    #[test]
    fn projector_stencil_matches_fourier_oracle() {
        let s = 0.5;
        let table = StencilTable::build(2, s, 1.0, 3).unwrap();
        let scale = fourier_w0_2d(s, [0.0, 0.0]).abs();
        let tol = 2e-6 * scale + 2.0 * oracle_tail_bound(s, 150.0);
        for delta in [[1i64, 1, 0], [2, 1, 0], [3, 2, 0]] {
            let ours = table.w2(&delta).unwrap()[3];
            let oracle = fourier_w2xy_2d(s, [delta[0] as f64, delta[1] as f64]);
            assert!(
                (ours - oracle).abs() < tol,
                "delta {delta:?}: {ours} vs {oracle}"
            );
        }
    }

    #[test]
    fn stencil_row_sum_matches_lattice_tail() {
        // sum over the full lattice of W0 is E(phi, 1) = 0, so the windowed
        // sum must equal minus the tail, which behaves like the kernel
        // integral beyond the window: 2 pi (m+1/2)^{-2s} / (2s) in 2d
        let s = 0.5;
        let m = 20i64;
        let table = StencilTable::build(2, s, 1.0, m).unwrap();
        let mut sum = 0.0;
        for a in -m..=m {
            for b in -m..=m {
                sum += table.w0(&[a, b, 0]).unwrap();
            }
        }
        let tail = 2.0 * PI * (m as f64 + 0.5).powf(-2.0 * s) / (2.0 * s);
        assert!(
            (sum - tail).abs() < 0.2 * tail,
            "row sum {sum} vs expected lattice tail {tail}"
        );
    }

    #[test]
    fn w2_trace_equals_w0() {
        let table = StencilTable::build(2, 0.45, 1.0, 3).unwrap();
        for delta in [[0i64, 0, 0], [1, 0, 0], [2, 2, 0], [3, 1, 0]] {
            let w0 = table.w0(&delta).unwrap();
            let w2 = table.w2(&delta).unwrap();
            let tr = w2[0] + w2[1];
            assert!((tr - w0).abs() < 1e-10 * w0.abs().max(1e-10), "delta {delta:?}");
        }
    }

    #[test]
    fn spacing_scaling_law() {
        let a = StencilTable::build(2, 0.7, 1.0, 2).unwrap();
        let b = StencilTable::build(2, 0.7, 0.25, 2).unwrap();
        let factor = 0.25f64.powf(2.0 - 2.0 * 0.7);
        for delta in [[0i64, 0, 0], [1, 1, 0]] {
            let ra = a.w0(&delta).unwrap() * factor;
            let rb = b.w0(&delta).unwrap();
            assert!((ra - rb).abs() < 1e-12 * rb.abs());
        }
    }

    #[test]
    fn three_dimensional_trace_identity() {
        let table = StencilTable::build(3, 0.5, 1.0, 2).unwrap();
        for delta in [[0i64, 0, 0], [1, 0, 0], [1, 1, 1]] {
            let w0 = table.w0(&delta).unwrap();
            let w2 = table.w2(&delta).unwrap();
            let tr = w2[0] + w2[1] + w2[2];
            assert!(
                (tr - w0).abs() < 1e-8 * w0.abs().max(1e-8),
                "delta {delta:?}: trace {tr} vs {w0}"
            );
        }
    }
}
