//! Property tests over randomized parameters: structural invariants that
//! must hold for every admissible input, not just the tuned examples.

use fraclame::fields::{self, synth, PeriodicGrid, VectorField};
use fraclame::symbol::{self, ElasticModuli, SymbolMatrix};
use fraclame::types::Dimension;
use proptest::prelude::*;

fn moduli_strategy() -> impl Strategy<Value = ElasticModuli> {
    (0.2f64..3.0, -1.9f64..3.0).prop_map(|(mu, ratio)| {
        // lambda sampled relative to mu keeps 2 mu + lambda > 0
        ElasticModuli::new(mu, ratio * mu).expect("inside the elliptic cone")
    })
}

fn xi_strategy() -> impl Strategy<Value = [f64; 3]> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(a, b)| {
        let mut xi = [a, b, 0.0];
        if xi[0].abs() + xi[1].abs() < 1e-3 {
            xi[0] = 1.0;
        }
        xi
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_power_semigroup(
        m in moduli_strategy(),
        xi in xi_strategy(),
        s in 0.05f64..0.95,
        t in 0.05f64..0.45,
    ) {
        let t = t.min(1.0 - s - 1e-3);
        prop_assume!(t > 0.01);
        let a = symbol::lame_symbol_power(2, &xi, s, &m).unwrap();
        let b = symbol::lame_symbol_power(2, &xi, t, &m).unwrap();
        let c = symbol::lame_symbol_power(2, &xi, s + t, &m).unwrap();
        let defect = a.matmul(&b).sub(&c).frobenius() / c.frobenius();
        prop_assert!(defect < 1e-12, "semigroup defect {defect}");
    }

    #[test]
    fn symbol_is_symmetric_positive(
        m in moduli_strategy(),
        xi in xi_strategy(),
        s in 0.05f64..1.0,
    ) {
        let a = symbol::lame_symbol_power(2, &xi, s, &m).unwrap();
        prop_assert!(a.symmetry_defect() == 0.0);
        // quadratic form positive on a few directions
        for v in [[1.0, 0.0, 0.0], [0.3, -0.9, 0.0], [0.7, 0.7, 0.0]] {
            let av = a.apply(&v);
            let q = av[0] * v[0] + av[1] * v[1];
            prop_assert!(q > 0.0, "not positive definite: {q}");
        }
    }

    #[test]
    fn resolvent_contracts(
        m in moduli_strategy(),
        xi in xi_strategy(),
        s in 0.05f64..0.95,
        q in 0.1f64..5.0,
    ) {
        let r = symbol::resolvent_symbol(2, &xi, s, q, &m).unwrap();
        // spectral radius of the resolvent is at most 1/q
        let v = [0.6, -0.8, 0.0];
        let rv = r.apply(&v);
        let norm_rv = (rv[0] * rv[0] + rv[1] * rv[1]).sqrt();
        prop_assert!(norm_rv <= 1.0 / q + 1e-12);
        let _ = SymbolMatrix::identity(2);
    }

    #[test]
    fn ellipticity_rejected_outside_cone(mu in -2.0f64..0.0, lambda in -4.0f64..4.0) {
        prop_assert!(ElasticModuli::new(mu, lambda).is_err());
    }
}

proptest! {
    // FFT-backed cases are costlier; fewer cases suffice
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transform_round_trip_and_conjugate_symmetry(seed in 0u64..5000) {
        let grid = PeriodicGrid::new(Dimension::new(2).unwrap(), 16, 4.0).unwrap();
        let u = synth::random_band_limited(grid, 5, seed);
        let uh = fields::fft_forward(&u);
        prop_assert!(uh.conjugate_symmetry_defect() < 1e-13);
        let back = fields::fft_inverse(&uh);
        prop_assert!(u.rel_l2_distance(&back) < 1e-13);
    }

    #[test]
    fn operator_annihilates_constants_and_is_selfadjoint(
        seed in 0u64..5000,
        s in 0.1f64..0.9,
    ) {
        let grid = PeriodicGrid::new(Dimension::new(2).unwrap(), 16, 4.0).unwrap();
        let m = ElasticModuli::new(1.0, 0.7).unwrap();
        let c = VectorField::from_fn(grid, |_| [0.8, -0.3, 0.0]);
        let lc = fields::frac_lame_apply(&c, s, &m).unwrap();
        prop_assert!(lc.l2_norm() < 1e-12);
        let u = synth::random_band_limited(grid, 4, seed);
        let v = synth::random_band_limited(grid, 4, seed.wrapping_add(1));
        let lu = fields::frac_lame_apply(&u, s, &m).unwrap();
        let lv = fields::frac_lame_apply(&v, s, &m).unwrap();
        let a = lu.l2_inner(&v);
        let b = u.l2_inner(&lv);
        prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(b.abs()).max(1e-9));
    }
}
