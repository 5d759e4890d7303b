//! Special functions and normalizing constants.
//!
//! Everything here is pure and thread-safe; each closed form is paired with
//! an independent quadrature oracle in the test suites.

mod bessel;
mod constants;
mod gamma;
mod hyper;
mod kcal;

pub use bessel::{bessel_j, bessel_j_scaled, bessel_zero_approx};
pub use constants::{
    const_c, const_g, const_gamma_pot, const_k, const_kappa, sphere_fourier_radial,
    sphere_surface, SphereMoment,
};
pub use gamma::{beta_fn, gamma_fn, ln_gamma, recip_gamma};
pub use hyper::{bessel_laplace_direct, bessel_laplace_integral, hyp2f1_z_neg, hypergeom_f};
pub use kcal::{bessel_k_cal, bessel_k_cal_deriv, dtn_constant};
