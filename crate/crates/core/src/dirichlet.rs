//! Variational solver for the nonlocal Dirichlet problem: the operator
//! applied on a bounded domain with zero exterior data, discretized by
//! piecewise-multilinear hats on the mask-interior nodes.
//!
//! The stiffness is the exact free-space bilinear form of the hats, which on
//! a uniform grid is a convolution stencil (see `stencil`): no boundary
//! truncation enters, memory stays O(window), and the matrix-vector product
//! is a masked convolution evaluated matrix-free inside conjugate gradients
//! with deterministic per-row summation.

use crate::error::{Error, Result};
use crate::fields::{PeriodicGrid, VectorField};
use crate::quadrature::{frac_lame_pv, QuadratureSpec, SampledField};
use crate::special::{const_c, const_kappa};
use crate::stencil::StencilTable;
use crate::symbol::ElasticModuli;
use crate::types::Dimension;
use crate::util::Vec3;
use rayon::prelude::*;
use std::sync::Arc;

/// Geometry descriptor of the domain.
#[derive(Clone, Debug)]
pub enum MaskGeometry {
    /// centered ball of the given radius
    Ball { radius: f64 },
    /// axis-aligned box [lo, hi] in physical coordinates
    Box { lo: Vec3, hi: Vec3 },
    /// arbitrary cell set
    Cells,
}

/// Subset of grid cells defining the domain, with complement-zero extension
/// semantics. `inside[c]` refers to the cell whose low corner is grid point
/// c; the domain must keep a margin of at least half its diameter to the box
/// boundary so periodic copies stay uncoupled at tested tolerances.
#[derive(Clone, Debug)]
pub struct DomainMask {
    grid: PeriodicGrid,
    inside: Vec<bool>,
    geometry: MaskGeometry,
}

impl DomainMask {
    pub fn new(grid: PeriodicGrid, inside: Vec<bool>, geometry: MaskGeometry) -> Result<Self> {
        if inside.len() != grid.num_points() {
            return Err(Error::domain("mask length must equal the cell count"));
        }
        let n_in = inside.iter().filter(|&&b| b).count();
        if n_in == 0 {
            return Err(Error::domain("mask must contain at least one cell"));
        }
        if n_in == inside.len() {
            return Err(Error::domain("mask complement must be nonempty"));
        }
        // bounding box of inside cells, in cell units
        let n = grid.n();
        let d = grid.d();
        let mut lo = [n as i64; 3];
        let mut hi = [0i64; 3];
        for (idx, &b) in inside.iter().enumerate() {
            if !b {
                continue;
            }
            let ij = grid.unravel(idx);
            for ax in 0..d {
                lo[ax] = lo[ax].min(ij[ax] as i64);
                hi[ax] = hi[ax].max(ij[ax] as i64 + 1);
            }
        }
        let mut diam = 0i64;
        for ax in 0..d {
            diam = diam.max(hi[ax] - lo[ax]);
        }
        let diam = diam as f64;
        for ax in 0..d {
            let margin = lo[ax].min(n as i64 - hi[ax]) as f64;
            if margin + 1e-9 < 0.5 * diam {
                return Err(Error::domain(format!(
                    "mask margin {margin} cells on axis {ax} is below half the domain diameter \
                     {diam:.1} cells"
                )));
            }
        }
        Ok(DomainMask { grid, inside, geometry })
    }

    /// Centered ball: cells whose centers lie inside the ball.
    pub fn ball(grid: PeriodicGrid, radius: f64) -> Result<Self> {
        let d = grid.d();
        let h = grid.spacing();
        let c = 0.5 * grid.len();
        let inside: Vec<bool> = (0..grid.num_points())
            .map(|idx| {
                let ij = grid.unravel(idx);
                let mut r2 = 0.0;
                for ax in 0..d {
                    let xc = (ij[ax] as f64 + 0.5) * h - c;
                    r2 += xc * xc;
                }
                r2 < radius * radius
            })
            .collect();
        DomainMask::new(grid, inside, MaskGeometry::Ball { radius })
    }

    /// Centered axis-aligned box with the given half-widths.
    pub fn centered_box(grid: PeriodicGrid, half_widths: &Vec3) -> Result<Self> {
        let d = grid.d();
        let h = grid.spacing();
        let c = 0.5 * grid.len();
        let inside: Vec<bool> = (0..grid.num_points())
            .map(|idx| {
                let ij = grid.unravel(idx);
                (0..d).all(|ax| {
                    let xc = (ij[ax] as f64 + 0.5) * h - c;
                    xc.abs() < half_widths[ax]
                })
            })
            .collect();
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for ax in 0..d {
            lo[ax] = c - half_widths[ax];
            hi[ax] = c + half_widths[ax];
        }
        DomainMask::new(grid, inside, MaskGeometry::Box { lo, hi })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn geometry(&self) -> &MaskGeometry {
        &self.geometry
    }

    #[inline]
    pub fn cell_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    /// Basis nodes: grid nodes all of whose incident cells are inside, so
    /// every hat is supported in the closed domain and the exterior
    /// condition holds exactly.
    pub fn interior_nodes(&self) -> Vec<usize> {
        let grid = self.grid;
        let d = grid.d();
        let n = grid.n() as i64;
        (0..grid.num_points())
            .filter(|&idx| {
                let ij = grid.unravel(idx);
                let corners = 1usize << d;
                (0..corners).all(|c| {
                    let mut cell = [0usize; 3];
                    for ax in 0..d {
                        let off = ((c >> ax) & 1) as i64;
                        let coord = ij[ax] as i64 - off;
                        if coord < 0 || coord >= n {
                            return false;
                        }
                        cell[ax] = coord as usize;
                    }
                    self.inside[grid.ravel(&cell)]
                })
            })
            .collect()
    }
}

/// Assembled Galerkin system: stencil-backed stiffness over the interior
/// nodes plus the load vector; symmetric positive definite by coercivity.
pub struct GalerkinSystem {
    grid: PeriodicGrid,
    nodes: Vec<usize>,
    coords: Vec<[i64; 3]>,
    table: Arc<StencilTable>,
    a_iso: f64,
    a_proj: f64,
    load: Vec<f64>,
}

impl GalerkinSystem {
    pub fn num_dof(&self) -> usize {
        self.nodes.len() * self.grid.d()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    /// Stiffness entry between (node i, component a) and (node j, component b).
    pub fn entry(&self, i: usize, a: usize, j: usize, b: usize) -> f64 {
        let mut delta = [0i64; 3];
        for ax in 0..self.grid.d() {
            delta[ax] = self.coords[j][ax] - self.coords[i][ax];
        }
        let w0 = self.table.w0(&delta).unwrap_or(0.0);
        let w2 = StencilTable::unpack(&self.table.w2(&delta).unwrap_or([0.0; 6]));
        let mut v = 2.0 * self.a_proj * w2[a][b];
        if a == b {
            v += 2.0 * self.a_iso * w0;
        }
        v
    }

    /// Matrix-vector product, deterministic per-row summation.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let d = self.grid.d();
        let nn = self.nodes.len();
        debug_assert_eq!(v.len(), nn * d);
        (0..nn * d)
            .into_par_iter()
            .map(|row| {
                let i = row / d;
                let a = row % d;
                let ci = self.coords[i];
                let mut acc = 0.0;
                for j in 0..nn {
                    let mut delta = [0i64; 3];
                    for ax in 0..d {
                        delta[ax] = self.coords[j][ax] - ci[ax];
                    }
                    let w0 = self.table.w0(&delta).unwrap_or(0.0);
                    let w2 = self.table.w2(&delta).unwrap_or([0.0; 6]);
                    let w2m = StencilTable::unpack(&w2);
                    for b in 0..d {
                        let mut s = 2.0 * self.a_proj * w2m[a][b];
                        if a == b {
                            s += 2.0 * self.a_iso * w0;
                        }
                        acc += s * v[j * d + b];
                    }
                }
                acc
            })
            .collect()
    }
}

/// Assemble the Galerkin system for the masked domain.
pub fn assemble(mask: &DomainMask, s: f64, m: &ElasticModuli, f: &VectorField) -> Result<GalerkinSystem> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain("dirichlet order must lie in (0,1)"));
    }
    let grid = *mask.grid();
    if f.grid() != &grid {
        return Err(Error::domain("forcing lives on a different grid"));
    }
    let d = grid.d();
    let dd = Dimension::new(d)?;
    let nodes = mask.interior_nodes();
    if nodes.is_empty() {
        return Err(Error::domain("mask admits no interior basis nodes"));
    }
    let coords: Vec<[i64; 3]> = nodes
        .iter()
        .map(|&idx| {
            let ij = grid.unravel(idx);
            [ij[0] as i64, ij[1] as i64, ij[2] as i64]
        })
        .collect();
    // maximal node offset inside the mask bounding box
    let mut max_off = 1i64;
    for ax in 0..d {
        let lo = coords.iter().map(|c| c[ax]).min().unwrap();
        let hi = coords.iter().map(|c| c[ax]).max().unwrap();
        max_off = max_off.max(hi - lo);
    }
    let table = crate::quadrature::cached_stencil(d, s, grid.spacing(), max_off)?;
    let mus = m.mu().powf(s);
    let lons = m.p_mod().powf(s);
    let a_iso = ((2.0 * s + 1.0) * mus - lons) / (4.0 * s) * const_c(dd, s)?;
    let a_proj = (lons - mus) / (4.0 * s) * const_kappa(dd, s)?;
    // load vector <f, phi_i> with f taken as its Q1 interpolant: tensor mass
    // stencil (h/6, 2h/3, h/6) per axis
    let h = grid.spacing();
    let m1 = [h / 6.0, 2.0 * h / 3.0, h / 6.0];
    let n = grid.n() as i64;
    let np = grid.num_points();
    let load: Vec<f64> = (0..nodes.len() * d)
        .into_par_iter()
        .map(|row| {
            let i = row / d;
            let comp = row % d;
            let ci = coords[i];
            let mut acc = 0.0;
            let taps = 3usize.pow(d as u32);
            for t in 0..taps {
                let mut rem = t;
                let mut w = 1.0;
                let mut jj = [0usize; 3];
                let mut ok = true;
                for ax in 0..d {
                    let o = (rem % 3) as i64 - 1;
                    rem /= 3;
                    w *= m1[(o + 1) as usize];
                    let c = ci[ax] + o;
                    if c < 0 || c >= n {
                        ok = false;
                        break;
                    }
                    jj[ax] = c as usize;
                }
                if ok {
                    acc += w * f.data()[comp * np + grid.ravel(&jj)];
                }
            }
            acc
        })
        .collect();
    Ok(GalerkinSystem { grid, nodes, coords, table, a_iso, a_proj, load })
}

/// Conjugate-gradient solve outcome.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    pub relative_residual: f64,
    /// energy E(u_h, u_h) = u^T S u (equals b^T u at convergence)
    pub energy: f64,
    /// <f, u_h> for the energy identity
    pub load_pairing: f64,
    /// smallest and largest Ritz values of the stiffness seen by CG;
    /// theta_h = ritz_min / h^d is the discrete coercivity constant against
    /// the grid L2 norm
    pub ritz_min: f64,
    pub ritz_max: f64,
    pub condition_estimate: f64,
}

/// Solve the Dirichlet problem; returns the solution extended by zero
/// outside the domain, plus the solve report.
pub fn solve_dirichlet(
    mask: &DomainMask,
    f: &VectorField,
    s: f64,
    m: &ElasticModuli,
) -> Result<(VectorField, SolveReport)> {
    let system = assemble(mask, s, m, f)?;
    let (coeffs, report) = cg_solve(&system, 1e-10, 8000)?;
    let grid = *mask.grid();
    let d = grid.d();
    let np = grid.num_points();
    let mut u = VectorField::zeros(grid);
    for (i, &node) in system.nodes.iter().enumerate() {
        for c in 0..d {
            u.data_mut()[c * np + node] = coeffs[i * d + c];
        }
    }
    Ok((u, report))
}

fn cg_solve(system: &GalerkinSystem, tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveReport)> {
    let n = system.num_dof();
    let b = system.load.clone();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                energy: 0.0,
                load_pairing: 0.0,
                ritz_min: 0.0,
                ritz_max: 0.0,
                condition_estimate: 1.0,
            },
        ));
    }
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = r.iter().map(|v| v * v).sum::<f64>();
    // Lanczos tridiagonal from CG coefficients for Ritz estimates
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let ap = system.matvec(&p);
        let pap = p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        if pap <= 0.0 {
            return Err(Error::Solver(format!(
                "stiffness not positive definite along a search direction (pAp = {pap:.3e})"
            )));
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = r.iter().map(|v| v * v).sum::<f64>();
        alphas.push(alpha);
        if (rs_new.sqrt() / bnorm) <= tol {
            rs = rs_new;
            break;
        }
        let beta = rs_new / rs;
        betas.push(beta);
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
    }
    let rel = rs.sqrt() / bnorm;
    if rel > tol {
        return Err(Error::Solver(format!(
            "conjugate gradients stalled at relative residual {rel:.3e} after {iterations} iterations"
        )));
    }
    // Ritz values from the Lanczos tridiagonal built out of (alpha, beta)
    let (ritz_min, ritz_max) = ritz_extremes(&alphas, &betas);
    let energy = {
        let ax = system.matvec(&x);
        x.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>()
    };
    let load_pairing = x.iter().zip(&b).map(|(a, b)| a * b).sum::<f64>();
    Ok((
        x,
        SolveReport {
            iterations,
            relative_residual: rel,
            energy,
            load_pairing,
            ritz_min,
            ritz_max,
            condition_estimate: if ritz_min > 0.0 { ritz_max / ritz_min } else { f64::INFINITY },
        },
    ))
}

/// Extremal eigenvalues of the CG Lanczos tridiagonal by bisection on the
/// Sturm sequence.
fn ritz_extremes(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    if k == 0 {
        return (0.0, 0.0);
    }
    // tridiagonal entries (Saad): d_1 = 1/alpha_1,
    // d_j = 1/alpha_j + beta_{j-1}/alpha_{j-1}, e_j = sqrt(beta_j)/alpha_j
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k.saturating_sub(1)];
    diag[0] = 1.0 / alphas[0];
    for j in 1..k {
        diag[j] = 1.0 / alphas[j] + betas[j - 1] / alphas[j - 1];
    }
    for j in 0..k - 1 {
        off[j] = betas[j].sqrt() / alphas[j];
    }
    let count_below = |x: f64| -> usize {
        let mut count = 0;
        let mut q = diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for j in 1..k {
            let e2 = off[j - 1] * off[j - 1];
            q = diag[j] - x - e2 / if q.abs() < 1e-300 { 1e-300 } else { q };
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let hi0 = diag
        .iter()
        .enumerate()
        .map(|(j, &dj)| {
            let mut g = dj.abs();
            if j > 0 {
                g += off[j - 1].abs();
            }
            if j + 1 < k {
                g += off[j].abs();
            }
            g
        })
        .fold(0.0f64, f64::max);
    let bisect = |target: usize| -> f64 {
        let mut lo = 0.0;
        let mut hi = hi0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (bisect(1), bisect(k))
}

/// Pointwise residual check: the PV operator applied to the cubic
/// interpolant of the discrete solution, compared to the forcing at interior
/// nodes away from the boundary. Returns the maximum relative deviation.
pub fn residual_check(
    u_h: &VectorField,
    mask: &DomainMask,
    f: &VectorField,
    s: f64,
    m: &ElasticModuli,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let grid = *mask.grid();
    let d = grid.d();
    let np = grid.num_points();
    let field = SampledField::from_grid(u_h);
    // sample nodes well inside: keep those whose hat neighborhood of radius
    // `inset` cells is fully interior
    let nodes = mask.interior_nodes();
    let inset = 4i64;
    let n = grid.n() as i64;
    let interior_set: std::collections::HashSet<usize> = nodes.iter().cloned().collect();
    let mut samples = Vec::new();
    for &node in &nodes {
        let ij = grid.unravel(node);
        let mut deep = true;
        'outer: for o0 in -inset..=inset {
            for o1 in -inset..=inset {
                let c0 = ij[0] as i64 + o0;
                let c1 = ij[1] as i64 + o1;
                if c0 < 0 || c0 >= n || c1 < 0 || c1 >= n {
                    deep = false;
                    break 'outer;
                }
                let mut probe = ij;
                probe[0] = c0 as usize;
                probe[1] = c1 as usize;
                if !interior_set.contains(&grid.ravel(&probe)) {
                    deep = false;
                    break 'outer;
                }
            }
        }
        if deep {
            samples.push(node);
        }
    }
    if samples.is_empty() {
        return Err(Error::precondition("no sample nodes away from the boundary"));
    }
    // scale: max |f| over the sampled set
    let mut fscale = 0.0f64;
    for &node in &samples {
        for c in 0..d {
            fscale = fscale.max(f.data()[c * np + node].abs());
        }
    }
    let deviations: Vec<f64> = samples
        .par_iter()
        .map(|&node| {
            let x = grid.point(node);
            let lv = frac_lame_pv(&field, &x, s, m, spec).unwrap_or([f64::NAN; 3]);
            let mut worst = 0.0f64;
            for c in 0..d {
                let dev = (lv[c] - f.data()[c * np + node]).abs();
                worst = worst.max(dev);
            }
            worst
        })
        .collect();
    let max_dev = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(max_dev / fscale.max(1e-300))
}

/// Closed-form solution of the constant-forcing scalar problem on a ball:
/// (-Delta)^s u = 1 in B_R, u = 0 outside has
/// u(x) = Gamma(d/2) / (2^{2s} Gamma(d/2+s) Gamma(1+s)) (R^2 - |x|^2)_+^s.
pub fn ball_profile_constant(d: Dimension, s: f64, radius: f64, r: f64) -> Result<f64> {
    let df = d.as_f64();
    let c = crate::special::gamma_fn(0.5 * df)?
        / (2f64.powf(2.0 * s)
            * crate::special::gamma_fn(0.5 * df + s)?
            * crate::special::gamma_fn(1.0 + s)?);
    Ok(c * (radius * radius - r * r).max(0.0).powf(s))
}
