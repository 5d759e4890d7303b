//! Uniform periodic box discretization and the field containers living on it.

use crate::error::{Error, Result};
use crate::types::Dimension;
use crate::util::Vec3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Uniform periodic grid on [0, L)^d with n points per axis (n a power of
/// two, n >= 8). Grid frequencies are k/L for integer k in [-n/2, n/2).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    d: Dimension,
    n: usize,
    len: f64,
}

impl PeriodicGrid {
    pub fn new(d: Dimension, n: usize, len: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::domain(format!(
                "grid resolution must be a power of two >= 8, got {n}"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::domain(format!("box length must be positive, got {len}")));
        }
        Ok(PeriodicGrid { d, n, len })
    }

    #[inline]
    pub fn dim(&self) -> Dimension {
        self.d
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d.val()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.len
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.len / self.n as f64
    }

    /// Total number of grid points n^d.
    #[inline]
    pub fn num_points(&self) -> usize {
        self.n.pow(self.d.val() as u32)
    }

    /// Cell volume h^d.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d.val() as i32)
    }

    /// Decompose a flat row-major index into per-axis indices.
    #[inline]
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for ax in (0..self.d.val()).rev() {
            out[ax] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// Flatten per-axis indices (row-major, axis 0 slowest).
    #[inline]
    pub fn ravel(&self, ij: &[usize; 3]) -> usize {
        let mut idx = 0usize;
        for ax in 0..self.d.val() {
            idx = idx * self.n + ij[ax];
        }
        idx
    }

    /// Physical coordinates of a grid point.
    #[inline]
    pub fn point(&self, idx: usize) -> Vec3 {
        let ij = self.unravel(idx);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for ax in 0..self.d.val() {
            x[ax] = ij[ax] as f64 * h;
        }
        x
    }

    /// Signed integer wavenumber of an axis index: k in [-n/2, n/2).
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Frequency vector (cycles per length) and integer wavenumbers of a
    /// flat spectral index.
    #[inline]
    pub fn frequency(&self, idx: usize) -> (Vec3, [i64; 3]) {
        let ij = self.unravel(idx);
        let mut xi = [0.0; 3];
        let mut k = [0i64; 3];
        for ax in 0..self.d.val() {
            k[ax] = self.wavenumber(ij[ax]);
            xi[ax] = k[ax] as f64 / self.len;
        }
        (xi, k)
    }

    /// Whether any axis of the spectral index sits on the unpaired Nyquist row.
    #[inline]
    pub fn on_nyquist(&self, k: &[i64; 3]) -> bool {
        let ny = -(self.n as i64) / 2;
        (0..self.d.val()).any(|ax| k[ax] == ny)
    }
}

/// Real vector field sampled on a periodic grid; component-major storage,
/// each component an n^d row-major plane.
#[derive(Clone, Debug)]
pub struct VectorField {
    grid: PeriodicGrid,
    data: Vec<f64>,
}

/// Real scalar field on a periodic grid.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: PeriodicGrid,
    data: Vec<f64>,
}

/// Real d x d matrix field; component (i, j) is plane i*d + j.
#[derive(Clone, Debug)]
pub struct MatrixField {
    grid: PeriodicGrid,
    data: Vec<f64>,
}

/// Complex Fourier coefficients of a vector field (conjugate-symmetric for
/// fields coming from real data).
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: PeriodicGrid,
    data: Vec<Complex64>,
}

macro_rules! field_common {
    ($t:ident, $elem:ty) => {
        impl $t {
            #[inline]
            pub fn grid(&self) -> &PeriodicGrid {
                &self.grid
            }

            #[inline]
            pub fn data(&self) -> &[$elem] {
                &self.data
            }

            #[inline]
            pub fn data_mut(&mut self) -> &mut [$elem] {
                &mut self.data
            }
        }
    };
}

field_common!(VectorField, f64);
field_common!(ScalarField, f64);
field_common!(MatrixField, f64);
field_common!(SpectralVectorField, Complex64);

impl VectorField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        let len = grid.d() * grid.num_points();
        VectorField { grid, data: vec![0.0; len] }
    }

    pub fn from_data(grid: PeriodicGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.d() * grid.num_points() {
            return Err(Error::domain("vector field data length mismatch"));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("vector field contains non-finite entries"));
        }
        Ok(VectorField { grid, data })
    }

    /// Sample a closure at every grid point.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(&Vec3) -> Vec3 + Sync) -> Self {
        use rayon::prelude::*;
        let np = grid.num_points();
        let d = grid.d();
        let mut data = vec![0.0; d * np];
        let values: Vec<Vec3> = (0..np)
            .into_par_iter()
            .map(|idx| f(&grid.point(idx)))
            .collect();
        for c in 0..d {
            for (idx, v) in values.iter().enumerate() {
                data[c * np + idx] = v[c];
            }
        }
        VectorField { grid, data }
    }

    #[inline]
    pub fn comp(&self, c: usize) -> &[f64] {
        let np = self.grid.num_points();
        &self.data[c * np..(c + 1) * np]
    }

    #[inline]
    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let np = self.grid.num_points();
        &mut self.data[c * np..(c + 1) * np]
    }

    /// Vector value at a flat grid index.
    #[inline]
    pub fn value(&self, idx: usize) -> Vec3 {
        let np = self.grid.num_points();
        let mut v = [0.0; 3];
        for c in 0..self.grid.d() {
            v[c] = self.data[c * np + idx];
        }
        v
    }

    #[inline]
    pub fn set_value(&mut self, idx: usize, v: &Vec3) {
        let np = self.grid.num_points();
        for c in 0..self.grid.d() {
            self.data[c * np + idx] = v[c];
        }
    }

    /// Componentwise mean over the grid.
    pub fn mean(&self) -> Vec3 {
        let np = self.grid.num_points() as f64;
        let mut m = [0.0; 3];
        for c in 0..self.grid.d() {
            m[c] = crate::util::compensated_sum(self.comp(c)) / np;
        }
        m
    }

    /// Grid L2 norm, including the cell volume weight.
    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).sqrt()
    }

    /// Grid L2 inner product (cell-volume weighted), deterministic order.
    pub fn l2_inner(&self, other: &VectorField) -> f64 {
        assert_eq!(self.grid, other.grid);
        let products: Vec<f64> = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .collect();
        crate::util::compensated_sum(&products) * self.grid.cell_volume()
    }

    /// Relative L2 distance to another field.
    pub fn rel_l2_distance(&self, other: &VectorField) -> f64 {
        let mut diff = self.clone();
        for (a, b) in diff.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        let denom = other.l2_norm();
        if denom == 0.0 {
            diff.l2_norm()
        } else {
            diff.l2_norm() / denom
        }
    }

    /// Cyclic shift by whole grid cells along each axis.
    pub fn shifted(&self, shift: &[i64; 3]) -> VectorField {
        let grid = self.grid;
        let n = grid.n() as i64;
        let np = grid.num_points();
        let mut out = VectorField::zeros(grid);
        for idx in 0..np {
            let ij = grid.unravel(idx);
            let mut src = [0usize; 3];
            for ax in 0..grid.d() {
                src[ax] = ((ij[ax] as i64 - shift[ax]).rem_euclid(n)) as usize;
            }
            let sidx = grid.ravel(&src);
            for c in 0..grid.d() {
                out.data[c * np + idx] = self.data[c * np + sidx];
            }
        }
        out
    }
}

impl ScalarField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        ScalarField { grid, data: vec![0.0; grid.num_points()] }
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(&Vec3) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let data: Vec<f64> = (0..grid.num_points())
            .into_par_iter()
            .map(|idx| f(&grid.point(idx)))
            .collect();
        ScalarField { grid, data }
    }

    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.data.iter().map(|a| a * a).collect();
        (crate::util::compensated_sum(&sq) * self.grid.cell_volume()).sqrt()
    }
}

impl MatrixField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        let d = grid.d();
        MatrixField { grid, data: vec![0.0; d * d * grid.num_points()] }
    }

    #[inline]
    pub fn comp(&self, i: usize, j: usize) -> &[f64] {
        let np = self.grid.num_points();
        let c = i * self.grid.d() + j;
        &self.data[c * np..(c + 1) * np]
    }

    #[inline]
    pub fn comp_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let np = self.grid.num_points();
        let c = i * self.grid.d() + j;
        &mut self.data[c * np..(c + 1) * np]
    }

    pub fn frobenius_norm(&self) -> f64 {
        let sq: Vec<f64> = self.data.iter().map(|a| a * a).collect();
        (crate::util::compensated_sum(&sq) * self.grid.cell_volume()).sqrt()
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        let len = grid.d() * grid.num_points();
        SpectralVectorField { grid, data: vec![Complex64::new(0.0, 0.0); len] }
    }

    #[inline]
    pub fn comp(&self, c: usize) -> &[Complex64] {
        let np = self.grid.num_points();
        &self.data[c * np..(c + 1) * np]
    }

    #[inline]
    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        let np = self.grid.num_points();
        &mut self.data[c * np..(c + 1) * np]
    }

    /// Worst conjugate-symmetry defect relative to the coefficient scale;
    /// zero (to roundoff) for transforms of real fields.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let grid = self.grid;
        let np = grid.num_points();
        let n = grid.n();
        let mut scale = 0.0f64;
        for v in &self.data {
            scale = scale.max(v.norm());
        }
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for idx in 0..np {
            let ij = grid.unravel(idx);
            let mut neg = [0usize; 3];
            for ax in 0..grid.d() {
                neg[ax] = (n - ij[ax]) % n;
            }
            let nidx = grid.ravel(&neg);
            for c in 0..grid.d() {
                let a = self.data[c * np + idx];
                let b = self.data[c * np + nidx].conj();
                worst = worst.max((a - b).norm());
            }
        }
        worst / scale
    }
}
