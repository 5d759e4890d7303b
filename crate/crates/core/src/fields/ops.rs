//! Spectral application of the operator family: matrix-valued multipliers,
//! the fractional vector calculus, Riesz potentials and the resolvent solve.
//!
//! Zero-mode policy: positive powers and the fractional gradient/divergence
//! annihilate constants; the Riesz potential maps the zero mode to zero and
//! requires mean-zero input; the resolvent maps it to mean/q. Odd (first
//! order) multipliers zero the unpaired Nyquist rows so real fields map to
//! real fields exactly.

use super::fft::{fft_forward, fft_inverse_with_residue};
use super::grid::{MatrixField, PeriodicGrid, ScalarField, SpectralVectorField, VectorField};
use crate::error::{Error, Result};
use crate::symbol::{self, ElasticModuli, SymbolMatrix};
use crate::util::Vec3;
use num_complex::Complex64;
use rayon::prelude::*;

const REAL_RESIDUE_TOL: f64 = 1e-12;

fn check_residue(residue: f64) -> Result<()> {
    if residue > REAL_RESIDUE_TOL {
        return Err(Error::accuracy(format!(
            "spectral output has imaginary residue {residue:.3e} (conjugate-symmetry violation)"
        )));
    }
    Ok(())
}

/// Apply a matrix-valued Fourier multiplier to a vector field. The symbol
/// closure receives the frequency vector (cycles per length) and its integer
/// wavenumbers; it must be defined at every grid frequency including zero.
pub fn apply_multiplier<F>(u: &VectorField, sym: F) -> Result<VectorField>
where
    F: Fn(&Vec3, &[i64; 3]) -> Result<SymbolMatrix> + Sync,
{
    let grid = *u.grid();
    let d = grid.d();
    let np = grid.num_points();
    let uh = fft_forward(u);
    let mut wh = SpectralVectorField::zeros(grid);
    // gather per-mode vectors, multiply, scatter; map-style parallelism keeps
    // the result independent of the thread count
    let rows: Result<Vec<[Complex64; 3]>> = (0..np)
        .into_par_iter()
        .map(|idx| {
            let (xi, k) = grid.frequency(idx);
            let mut s = sym(&xi, &k).map_err(|e| {
                Error::Singularity(format!("symbol at frequency {:?}: {e}", &xi[..d]))
            })?;
            // Nyquist rows alias xi and -xi onto the same coefficient, so the
            // projector direction is ill-defined there; keep the rotation
            // invariant isotropic average. Exact for band-limited fields.
            if grid.on_nyquist(&k) {
                let mut tr = 0.0;
                for i in 0..d {
                    tr += s.entry(i, i);
                }
                s = SymbolMatrix::scaled_identity(d, tr / d as f64);
            }
            let mut re = [0.0; 3];
            let mut im = [0.0; 3];
            for c in 0..d {
                let v = uh.comp(c)[idx];
                re[c] = v.re;
                im[c] = v.im;
            }
            let (wre, wim) = s.apply_complex(&re, &im);
            let mut row = [Complex64::new(0.0, 0.0); 3];
            for c in 0..d {
                row[c] = Complex64::new(wre[c], wim[c]);
            }
            Ok(row)
        })
        .collect();
    let rows = rows?;
    for c in 0..d {
        let plane = wh.comp_mut(c);
        for (idx, row) in rows.iter().enumerate() {
            plane[idx] = row[c];
        }
    }
    let (out, residue) = fft_inverse_with_residue(&wh);
    check_residue(residue)?;
    Ok(out)
}

/// Spectral fractional operator: multiplier M^s(xi), constants annihilated.
pub fn frac_lame_apply(u: &VectorField, s: f64, m: &ElasticModuli) -> Result<VectorField> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::domain(format!("operator power must lie in (0, 1], got {s}")));
    }
    let d = u.grid().d();
    apply_multiplier(u, |xi, _| symbol::lame_symbol_power(d, xi, s, m))
}

/// Componentwise fractional Laplacian with exponent `sigma` in (0, 2]
/// (multiplier (2 pi |xi|)^{2 sigma}), zero mode annihilated.
pub fn frac_laplacian_apply(u: &VectorField, sigma: f64) -> Result<VectorField> {
    if !(sigma > 0.0 && sigma <= 2.0) {
        return Err(Error::domain(format!("laplacian power must lie in (0, 2], got {sigma}")));
    }
    let d = u.grid().d();
    apply_multiplier(u, |xi, _| {
        let n2 = crate::util::dot(d, &xi, &xi);
        let w = if n2 == 0.0 {
            0.0
        } else {
            (4.0 * std::f64::consts::PI * std::f64::consts::PI * n2).powf(sigma)
        };
        Ok(SymbolMatrix::scaled_identity(d, w))
    })
}

/// Shared machinery for first-order (odd) multipliers: returns the complex
/// scalar g(xi) = (2 pi |xi|)^{s-1} 2 pi i xi_axis per axis, with zero mode
/// and Nyquist rows zeroed.
fn grad_factor(grid: &PeriodicGrid, xi: &Vec3, k: &[i64; 3], s: f64) -> [Complex64; 3] {
    let d = grid.d();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    let n2 = crate::util::dot(d, &xi, &xi);
    if n2 == 0.0 || grid.on_nyquist(k) {
        return out;
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let w = (two_pi * n2.sqrt()).powf(s - 1.0);
    for (ax, o) in out.iter_mut().enumerate().take(d) {
        *o = Complex64::new(0.0, w * two_pi * xi[ax]);
    }
    out
}

/// Fractional gradient: row j, column k holds the k-th fractional partial of
/// component j.
pub fn frac_gradient(u: &VectorField, s: f64) -> Result<MatrixField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("gradient order must lie in (0,1), got {s}")));
    }
    let grid = *u.grid();
    let d = grid.d();
    let np = grid.num_points();
    let uh = fft_forward(u);
    let mut out = MatrixField::zeros(grid);
    for j in 0..d {
        for ax in 0..d {
            let mut tmp: Vec<Complex64> = (0..np)
                .into_par_iter()
                .map(|idx| {
                    let (xi, k) = grid.frequency(idx);
                    let g = grad_factor(&grid, &xi, &k, s);
                    uh.comp(j)[idx] * g[ax]
                })
                .collect();
            super::fft::fft_nd(&grid, &mut tmp, false);
            let scale = 1.0 / (np as f64).sqrt();
            let dst = out.comp_mut(j, ax);
            for (o, v) in dst.iter_mut().zip(tmp.iter()) {
                *o = v.re * scale;
            }
        }
    }
    Ok(out)
}

/// Fractional divergence of a vector field.
pub fn frac_divergence(u: &VectorField, s: f64) -> Result<ScalarField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("divergence order must lie in (0,1), got {s}")));
    }
    let grid = *u.grid();
    let d = grid.d();
    let np = grid.num_points();
    let uh = fft_forward(u);
    let plane: Vec<Complex64> = (0..np)
        .into_par_iter()
        .map(|idx| {
            let (xi, k) = grid.frequency(idx);
            let g = grad_factor(&grid, &xi, &k, s);
            let mut acc = Complex64::new(0.0, 0.0);
            for ax in 0..d {
                acc += uh.comp(ax)[idx] * g[ax];
            }
            acc
        })
        .collect();
    let mut tmp = plane;
    super::fft::fft_nd(&grid, &mut tmp, false);
    let scale = 1.0 / (np as f64).sqrt();
    let mut out = ScalarField::zeros(grid);
    for (o, v) in out.data_mut().iter_mut().zip(tmp.iter()) {
        *o = v.re * scale;
    }
    Ok(out)
}

/// Fractional gradient of a scalar field (vector output).
pub fn frac_gradient_scalar(w: &ScalarField, s: f64) -> Result<VectorField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("gradient order must lie in (0,1), got {s}")));
    }
    let grid = *w.grid();
    let d = grid.d();
    let np = grid.num_points();
    let mut wh: Vec<Complex64> = w.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    super::fft::fft_nd(&grid, &mut wh, true);
    let fscale = 1.0 / (np as f64).sqrt();
    let mut out = VectorField::zeros(grid);
    for ax in 0..d {
        let mut plane: Vec<Complex64> = (0..np)
            .map(|idx| {
                let (xi, k) = grid.frequency(idx);
                let g = grad_factor(&grid, &xi, &k, s);
                wh[idx] * fscale * g[ax]
            })
            .collect();
        super::fft::fft_nd(&grid, &mut plane, false);
        let dst = out.comp_mut(ax);
        for (o, v) in dst.iter_mut().zip(plane.iter()) {
            *o = v.re * fscale;
        }
    }
    Ok(out)
}

/// Row-wise fractional divergence of a matrix field:
/// (div^s sigma)_j = sum_k D^s_k sigma_{jk}.
pub fn frac_divergence_matrix(sig: &MatrixField, s: f64) -> Result<VectorField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("divergence order must lie in (0,1), got {s}")));
    }
    let grid = *sig.grid();
    let d = grid.d();
    let np = grid.num_points();
    let scale = 1.0 / (np as f64).sqrt();
    let mut out = VectorField::zeros(grid);
    for j in 0..d {
        let mut acc = vec![Complex64::new(0.0, 0.0); np];
        for ax in 0..d {
            let mut plane: Vec<Complex64> =
                sig.comp(j, ax).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            super::fft::fft_nd(&grid, &mut plane, true);
            for (idx, a) in acc.iter_mut().enumerate() {
                let (xi, k) = grid.frequency(idx);
                let g = grad_factor(&grid, &xi, &k, s);
                *a += plane[idx] * scale * g[ax];
            }
        }
        super::fft::fft_nd(&grid, &mut acc, false);
        let dst = out.comp_mut(j);
        for (o, v) in dst.iter_mut().zip(acc.iter()) {
            *o = v.re * scale;
        }
    }
    Ok(out)
}

/// Fractional stress tensor
/// sigma^s(u) = 2 mu^s grad^s_sym u + ((2mu+lambda)^s - 2 mu^s) (tr grad^s_sym u) I.
pub fn frac_stress(u: &VectorField, s: f64, m: &ElasticModuli) -> Result<MatrixField> {
    let grid = *u.grid();
    let d = grid.d();
    let g = frac_gradient(u, s)?;
    let mus = m.mu().powf(s);
    let lons = m.p_mod().powf(s);
    let mut out = MatrixField::zeros(grid);
    let np = grid.num_points();
    // trace of the symmetric part equals the trace of the gradient
    let mut trace = vec![0.0; np];
    for ax in 0..d {
        for (t, v) in trace.iter_mut().zip(g.comp(ax, ax).iter()) {
            *t += v;
        }
    }
    for i in 0..d {
        for j in 0..d {
            let (gi, gj) = (g.comp(i, j), g.comp(j, i));
            let dst = out.comp_mut(i, j);
            for idx in 0..np {
                let sym = 0.5 * (gi[idx] + gj[idx]);
                dst[idx] = 2.0 * mus * sym;
                if i == j {
                    dst[idx] += (lons - 2.0 * mus) * trace[idx];
                }
            }
        }
    }
    Ok(out)
}

/// Riesz potential: multiplier [M^s]^{-1} with the zero mode mapped to zero.
/// Requires mean-zero input.
pub fn riesz_potential_apply(u: &VectorField, s: f64, m: &ElasticModuli) -> Result<VectorField> {
    let d = u.grid().d();
    if !(s > 0.0 && s < 0.5 * d as f64) {
        return Err(Error::domain(format!("potential order must lie in (0, d/2), got {s}")));
    }
    let mean = u.mean();
    let mean_norm = crate::util::norm(d, &mean);
    let scale = u.l2_norm() / u.grid().len().powi(d as i32 / 2).max(1.0);
    if mean_norm > 1e-12 * scale.max(1e-300) {
        return Err(Error::precondition(format!(
            "riesz potential requires mean-zero input, got |mean| = {mean_norm:.3e}"
        )));
    }
    apply_multiplier(u, |xi, _| {
        if crate::util::dot(d, &xi, &xi) == 0.0 {
            Ok(SymbolMatrix::zero(d))
        } else {
            symbol::lame_symbol_inverse_power(d, xi, s, m)
        }
    })
}

/// Solve (L^s + q) u = f exactly at the symbol level.
pub fn solve_resolvent(f: &VectorField, s: f64, q: f64, m: &ElasticModuli) -> Result<VectorField> {
    let d = f.grid().d();
    apply_multiplier(f, |xi, _| symbol::resolvent_symbol(d, xi, s, q, m))
}

/// <L^s u, u> computed by Plancherel (no inverse transform), cell-volume
/// weighted like `l2_inner`.
pub fn lame_energy(u: &VectorField, s: f64, m: &ElasticModuli) -> Result<f64> {
    let grid = *u.grid();
    let d = grid.d();
    let np = grid.num_points();
    let uh = fft_forward(u);
    let terms: Result<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|idx| {
            let (xi, _) = grid.frequency(idx);
            let sym = if crate::util::dot(d, &xi, &xi) == 0.0 {
                SymbolMatrix::zero(d)
            } else {
                symbol::lame_symbol_power(d, &xi, s, m)?
            };
            let mut re = [0.0; 3];
            let mut im = [0.0; 3];
            for c in 0..d {
                re[c] = uh.comp(c)[idx].re;
                im[c] = uh.comp(c)[idx].im;
            }
            let (sre, sim) = sym.apply_complex(&re, &im);
            Ok(crate::util::dot(d, &sre, &re) + crate::util::dot(d, &sim, &im))
        })
        .collect();
    Ok(crate::util::compensated_sum(&terms?) * grid.cell_volume())
}

/// ||(-Delta)^{s/2} u||^2 by Plancherel, cell-volume weighted.
pub fn gagliardo_energy(u: &VectorField, s: f64) -> f64 {
    let grid = *u.grid();
    let d = grid.d();
    let np = grid.num_points();
    let uh = fft_forward(u);
    let terms: Vec<f64> = (0..np)
        .into_par_iter()
        .map(|idx| {
            let (xi, _) = grid.frequency(idx);
            let n2 = crate::util::dot(d, &xi, &xi);
            if n2 == 0.0 {
                return 0.0;
            }
            let w = (4.0 * std::f64::consts::PI * std::f64::consts::PI * n2).powf(s);
            let mut acc = 0.0;
            for c in 0..d {
                acc += w * uh.comp(c)[idx].norm_sqr();
            }
            acc
        })
        .collect();
    crate::util::compensated_sum(&terms) * grid.cell_volume()
}
