//! Multi-dimensional FFT passes over grid fields, unitary normalization.

use super::grid::{PeriodicGrid, SpectralVectorField, VectorField};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// In-place d-dimensional transform of one component plane (row-major).
/// No normalization; the callers apply the unitary 1/sqrt(N) factor.
pub(super) fn fft_nd(grid: &PeriodicGrid, data: &mut [Complex64], forward: bool) {
    let n = grid.n();
    let d = grid.d();
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // axis = last: contiguous lines
    for line in data.chunks_exact_mut(n) {
        fft.process_with_scratch(line, &mut scratch);
    }
    // remaining axes: gather strided lines
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for ax in (0..d - 1).rev() {
        // stride between consecutive entries along `ax`
        let stride = n.pow((d - 1 - ax) as u32);
        let np = grid.num_points();
        let lines = np / n;
        for l in 0..lines {
            // base index of this line: distribute l over the other axes and
            // set the digit at `ax` to zero
            let mut digits = [0usize; 3];
            let mut rem = l;
            for a in (0..d).rev() {
                if a == ax {
                    continue;
                }
                digits[a] = rem % n;
                rem /= n;
            }
            digits[ax] = 0;
            let base = grid.ravel(&digits);
            for i in 0..n {
                buf[i] = data[base + i * stride];
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for i in 0..n {
                data[base + i * stride] = buf[i];
            }
        }
    }
}

/// Unitary forward transform of a real vector field. Conjugate symmetry is
/// exact mathematically for real input; the roundoff asymmetry of the passes
/// is projected out so amplifying multipliers cannot blow it up.
pub fn fft_forward(u: &VectorField) -> SpectralVectorField {
    let grid = *u.grid();
    let np = grid.num_points();
    let n = grid.n();
    let scale = 1.0 / (np as f64).sqrt();
    let mut out = SpectralVectorField::zeros(grid);
    let planes: Vec<Vec<Complex64>> = (0..grid.d())
        .into_par_iter()
        .map(|c| {
            let mut plane: Vec<Complex64> =
                u.comp(c).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft_nd(&grid, &mut plane, true);
            for v in plane.iter_mut() {
                *v *= scale;
            }
            // project onto the conjugate-symmetric subspace
            for idx in 0..np {
                let ij = grid.unravel(idx);
                let mut neg = [0usize; 3];
                for ax in 0..grid.d() {
                    neg[ax] = (n - ij[ax]) % n;
                }
                let nidx = grid.ravel(&neg);
                if nidx < idx {
                    continue;
                }
                let avg = 0.5 * (plane[idx] + plane[nidx].conj());
                plane[idx] = avg;
                plane[nidx] = avg.conj();
            }
            plane
        })
        .collect();
    for (c, plane) in planes.into_iter().enumerate() {
        out.comp_mut(c).copy_from_slice(&plane);
    }
    out
}

/// Unitary inverse transform; returns the real part and the relative size of
/// the discarded imaginary residue.
pub fn fft_inverse_with_residue(uh: &SpectralVectorField) -> (VectorField, f64) {
    let grid = *uh.grid();
    let np = grid.num_points();
    let scale = 1.0 / (np as f64).sqrt();
    let mut out = VectorField::zeros(grid);
    let planes: Vec<(Vec<f64>, f64, f64)> = (0..grid.d())
        .into_par_iter()
        .map(|c| {
            let mut plane: Vec<Complex64> = uh.comp(c).to_vec();
            fft_nd(&grid, &mut plane, false);
            let mut re = Vec::with_capacity(np);
            let mut re_sq = 0.0;
            let mut im_sq = 0.0;
            for v in &plane {
                let r = v.re * scale;
                let i = v.im * scale;
                re.push(r);
                re_sq += r * r;
                im_sq += i * i;
            }
            (re, re_sq, im_sq)
        })
        .collect();
    let mut re_sq = 0.0;
    let mut im_sq = 0.0;
    for (c, (plane, rs, is)) in planes.into_iter().enumerate() {
        out.comp_mut(c).copy_from_slice(&plane);
        re_sq += rs;
        im_sq += is;
    }
    let residue = if re_sq > 0.0 { (im_sq / re_sq).sqrt() } else { im_sq.sqrt() };
    (out, residue)
}

/// Unitary inverse transform, discarding the imaginary part.
pub fn fft_inverse(uh: &SpectralVectorField) -> VectorField {
    fft_inverse_with_residue(uh).0
}
