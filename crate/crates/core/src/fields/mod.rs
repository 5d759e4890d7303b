//! Periodic-grid spectral engine: FFT transforms, matrix-valued Fourier
//! multipliers, the fractional vector calculus, Riesz potentials, and the
//! resolvent solver. The periodic box stands in for free space; test fields
//! are Gaussian-enveloped and centered so wrap-around is negligible at the
//! tested tolerances.

mod fft;
mod grid;
mod ops;
pub mod synth;

pub use fft::{fft_forward, fft_inverse, fft_inverse_with_residue};
pub use grid::{MatrixField, PeriodicGrid, ScalarField, SpectralVectorField, VectorField};
pub use ops::{
    apply_multiplier, frac_divergence, frac_divergence_matrix, frac_gradient,
    frac_gradient_scalar, frac_lame_apply, frac_laplacian_apply, frac_stress, gagliardo_energy,
    lame_energy, riesz_potential_apply, solve_resolvent,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::ElasticModuli;
    use crate::types::Dimension;
    use std::f64::consts::PI;

    fn grid2(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(Dimension::new(2).unwrap(), n, 4.0).unwrap()
    }

    fn moduli(mu: f64, lambda: f64) -> ElasticModuli {
        ElasticModuli::new(mu, lambda).unwrap()
    }

    /// plane wave with integer wavenumbers and fixed polarization
    fn plane_wave(grid: PeriodicGrid, k: [i64; 3], pol: [f64; 3]) -> VectorField {
        let l = grid.len();
        let d = grid.d();
        VectorField::from_fn(grid, |x| {
            let mut ph = 0.0;
            for ax in 0..d {
                ph += k[ax] as f64 / l * x[ax];
            }
            crate::util::scale(d, &pol, (2.0 * PI * ph).cos())
        })
    }

    #[test]
    fn identity_multiplier_is_identity() {
        let grid = grid2(16);
        let u = synth::gaussian_wave_field(grid, &synth::standard_wave(&grid));
        let w = apply_multiplier(&u, |_, _| Ok(crate::symbol::SymbolMatrix::identity(2))).unwrap();
        assert!(u.rel_l2_distance(&w) < 1e-13);
    }

    #[test]
    fn constants_are_annihilated() {
        let grid = grid2(8);
        let m = moduli(1.0, 0.5);
        let u = VectorField::from_fn(grid, |_| [1.0, -2.0, 0.0]);
        for &s in &[0.5, 1.0] {
            let w = frac_lame_apply(&u, s, &m).unwrap();
            assert!(w.l2_norm() < 1e-13, "s={s}");
        }
    }

    #[test]
    fn plane_wave_eigenvalues() {
        let grid = grid2(32);
        let m = moduli(1.3, 0.6);
        let s = 0.6;
        let l = grid.len();
        let xi_norm = (2f64).sqrt() * 1.0 / l; // k = (1,1)
        // longitudinal polarization parallel to xi
        let u_lon = plane_wave(grid, [1, 1, 0], [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0]);
        let w = frac_lame_apply(&u_lon, s, &m).unwrap();
        let eig = m.p_mod().powf(s) * (2.0 * PI * xi_norm).powf(2.0 * s);
        let mut expect = u_lon.clone();
        for v in expect.data_mut() {
            *v *= eig;
        }
        assert!(w.rel_l2_distance(&expect) < 1e-12);
        // transverse polarization
        let u_tra = plane_wave(grid, [1, 1, 0], [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0]);
        let w = frac_lame_apply(&u_tra, s, &m).unwrap();
        let eig = m.mu().powf(s) * (2.0 * PI * xi_norm).powf(2.0 * s);
        let mut expect = u_tra.clone();
        for v in expect.data_mut() {
            *v *= eig;
        }
        assert!(w.rel_l2_distance(&expect) < 1e-12);
    }

    #[test]
    fn scalar_reduction_matches_fractional_laplacian() {
        let grid = grid2(32);
        let m = moduli(1.7, -1.7);
        let s = 0.45;
        let u = synth::gaussian_wave_field(grid, &synth::standard_wave(&grid));
        let a = frac_lame_apply(&u, s, &m).unwrap();
        let mut b = frac_laplacian_apply(&u, s).unwrap();
        let c = m.mu().powf(s);
        for v in b.data_mut() {
            *v *= c;
        }
        assert!(a.rel_l2_distance(&b) < 1e-12);
    }

    #[test]
    fn strong_coupling_coefficient_vanishes() {
        // lambda = ((2s+1)^{1/s} - 2) mu at s = 1/2 gives lambda = 2 mu and
        // the uncoupled kernel coefficient (2s+1) mu^s - (2mu+lambda)^s = 0
        let s: f64 = 0.5;
        let mu: f64 = 1.3;
        let lambda = ((2.0 * s + 1.0f64).powf(1.0 / s) - 2.0) * mu;
        assert!((lambda - 2.0 * mu).abs() < 1e-12);
        let coeff = (2.0 * s + 1.0) * mu.powf(s) - (2.0 * mu + lambda).powf(s);
        assert!(coeff.abs() < 1e-12);
    }

    #[test]
    fn divgrad_composition_and_decomposition() {
        let grid = grid2(32);
        let m = moduli(1.2, 0.8);
        let s = 0.35;
        let u = synth::random_band_limited(grid, 4, 23);
        // div^s grad^s of each component = -(-Delta)^s of it (the printed
        // transform conventions give the composition this sign)
        let mut scalar_in = ScalarField::zeros(grid);
        scalar_in.data_mut().copy_from_slice(u.comp(0));
        let g = frac_gradient_scalar(&scalar_in, s).unwrap();
        let div_g = frac_divergence(&g, s).unwrap();
        let lap = frac_laplacian_apply(&u, s).unwrap();
        let mut resid = 0.0f64;
        for (a, b) in div_g.data().iter().zip(lap.comp(0).iter()) {
            resid = resid.max((a + b).abs());
        }
        let scale = lap
            .comp(0)
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        assert!(resid / scale < 1e-12, "composition defect {}", resid / scale);

        // L^s u = -mu^s (div^s grad^s) u - ((2mu+lambda)^s - mu^s) grad^s div^s u
        let lame = frac_lame_apply(&u, s, &m).unwrap();
        let div_u = frac_divergence(&u, s).unwrap();
        let grad_div = frac_gradient_scalar(&div_u, s).unwrap();
        let mut recon = VectorField::zeros(grid);
        for c in 0..2 {
            let mut sc = ScalarField::zeros(grid);
            sc.data_mut().copy_from_slice(u.comp(c));
            let gc = frac_gradient_scalar(&sc, s).unwrap();
            let dgc = frac_divergence(&gc, s).unwrap();
            for (idx, o) in recon.comp_mut(c).iter_mut().enumerate() {
                *o = -m.mu().powf(s) * dgc.data()[idx]
                    - (m.p_mod().powf(s) - m.mu().powf(s)) * grad_div.comp(c)[idx];
            }
        }
        assert!(lame.rel_l2_distance(&recon) < 1e-12);
    }

    #[test]
    fn stress_divergence_form() {
        let grid = grid2(32);
        let m = moduli(0.9, 1.1);
        let s = 0.7;
        let u = synth::random_band_limited(grid, 3, 99);
        let sig = frac_stress(&u, s, &m).unwrap();
        let div_sig = frac_divergence_matrix(&sig, s).unwrap();
        let lame = frac_lame_apply(&u, s, &m).unwrap();
        let mut neg = div_sig;
        for v in neg.data_mut() {
            *v = -*v;
        }
        assert!(lame.rel_l2_distance(&neg) < 1e-11);
        // rigid translation: zero stress
        let c = VectorField::from_fn(grid, |_| [0.3, -0.7, 0.0]);
        let sc = frac_stress(&c, s, &m).unwrap();
        assert!(sc.frobenius_norm() < 1e-13);
    }

    #[test]
    fn riesz_potential_inverts_operator() {
        let grid = grid2(32);
        let m = moduli(1.1, 0.4);
        let s = 0.55;
        let mut u = synth::random_band_limited(grid, 5, 41);
        synth::remove_mean(&mut u);
        let w = riesz_potential_apply(&u, s, &m).unwrap();
        let back = frac_lame_apply(&w, s, &m).unwrap();
        assert!(back.rel_l2_distance(&u) < 1e-11);
        // nonzero mean is rejected
        let bad = VectorField::from_fn(grid, |_| [1.0, 0.0, 0.0]);
        assert!(riesz_potential_apply(&bad, s, &m).is_err());
    }

    #[test]
    fn resolvent_solves_and_is_bounded() {
        let grid = grid2(16);
        let m = moduli(1.0, 0.2);
        let (s, q) = (0.6, 0.8);
        let f = synth::random_band_limited(grid, 3, 5);
        let u = solve_resolvent(&f, s, q, &m).unwrap();
        let mut lhs = frac_lame_apply(&u, s, &m).unwrap();
        for (a, b) in lhs.data_mut().iter_mut().zip(u.data().iter()) {
            *a += q * b;
        }
        assert!(lhs.rel_l2_distance(&f) < 1e-12);
        assert!(u.l2_norm() <= f.l2_norm() / q * (1.0 + 1e-12));
        // constant forcing: u = f / q
        let fc = VectorField::from_fn(grid, |_| [2.0, 1.0, 0.0]);
        let uc = solve_resolvent(&fc, s, q, &m).unwrap();
        let mut expect = fc.clone();
        for v in expect.data_mut() {
            *v /= q;
        }
        assert!(uc.rel_l2_distance(&expect) < 1e-13);
    }

    #[test]
    fn translation_equivariance_and_self_adjointness() {
        let grid = grid2(16);
        let m = moduli(1.4, -0.2);
        let s = 0.5;
        let u = synth::random_band_limited(grid, 3, 17);
        let v = synth::random_band_limited(grid, 3, 18);
        // cyclic shift commutes
        let shift = [3i64, -5, 0];
        let a = frac_lame_apply(&u.shifted(&shift), s, &m).unwrap();
        let b = frac_lame_apply(&u, s, &m).unwrap().shifted(&shift);
        assert!(a.rel_l2_distance(&b) < 1e-12);
        // self-adjointness
        let lu = frac_lame_apply(&u, s, &m).unwrap();
        let lv = frac_lame_apply(&v, s, &m).unwrap();
        let x = lu.l2_inner(&v);
        let y = u.l2_inner(&lv);
        assert!((x - y).abs() < 1e-12 * x.abs().max(y.abs()).max(1e-6));
    }

    #[test]
    fn symbol_level_coercivity_sandwich() {
        let grid = grid2(16);
        let m = moduli(0.7, 1.9);
        for &s in &[0.25, 0.5, 0.75] {
            for seed in 0..5 {
                let u = synth::random_band_limited(grid, 4, 1000 + seed);
                let num = lame_energy(&u, s, &m).unwrap();
                let den = gagliardo_energy(&u, s);
                let lo = m.mu().min(m.p_mod()).powf(s);
                let hi = m.mu().max(m.p_mod()).powf(s);
                let ratio = num / den;
                assert!(
                    ratio >= lo * (1.0 - 1e-10) && ratio <= hi * (1.0 + 1e-10),
                    "s={s} seed={seed}: ratio {ratio} not in [{lo}, {hi}]"
                );
            }
        }
    }

    #[test]
    fn consistency_at_order_limits() {
        let grid = grid2(32);
        let m = moduli(1.1, 0.9);
        let u = synth::random_band_limited(grid, 3, 4);
        // s -> 1: approaches the classical operator
        let classical = frac_lame_apply(&u, 1.0, &m).unwrap();
        let mut prev = f64::INFINITY;
        for &s in &[0.9, 0.99, 0.999] {
            let w = frac_lame_apply(&u, s, &m).unwrap();
            let rel = w.rel_l2_distance(&classical);
            assert!(rel < prev, "not monotone at s={s}");
            prev = rel;
        }
        assert!(prev < 1e-2);
        // s -> 0: approaches the identity on mean-zero fields
        let mut u0 = u.clone();
        synth::remove_mean(&mut u0);
        let mut prev = f64::INFINITY;
        for &s in &[0.1, 0.01, 0.001] {
            let w = frac_lame_apply(&u0, s, &m).unwrap();
            let rel = w.rel_l2_distance(&u0);
            assert!(rel < prev, "not monotone at s={s}");
            prev = rel;
        }
        assert!(prev < 1e-2);
    }
}
