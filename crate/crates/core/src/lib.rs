//! Numerical calculus for the fractional Lame-Navier operator: exact symbol
//! algebra, an FFT multiplier engine on periodic grids, singular-integral
//! quadrature for the equivalent real-space forms, closed-form kernels, a
//! half-space extension solver realizing the operator as a weighted
//! Dirichlet-to-Neumann map, and a Galerkin solver for the nonlocal Dirichlet
//! problem. Every object that admits two independent computational routes is
//! cross-validated between them.

pub mod error;
pub mod types;
pub mod util;

pub mod quad1d;
pub mod special;
pub mod stencil;
pub mod symbol;

pub mod fields;
pub mod quadrature;

pub mod kernels;

pub mod extension;

pub mod dirichlet;

pub mod io;

pub mod cli;
pub mod verify;

pub use error::{Error, Result};
pub use types::{Dimension, FracOrder};
