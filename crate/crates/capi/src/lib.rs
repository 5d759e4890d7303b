//! C ABI for the core library: opaque handles, integer error codes, and
//! flat-array views. Every function is `extern "C"`; panics are caught at
//! the boundary and surfaced as `FRACLAME_ERR_INTERNAL`.
//!
//! Memory rules: objects returned as pointers are owned by the library and
//! must be released with the matching `_free` function; buffers passed in
//! are caller-owned and only read during the call.

use fraclame::dirichlet::{solve_dirichlet, DomainMask};
use fraclame::extension::{dtn_neumann, neumann_constant};
use fraclame::fields::{self, PeriodicGrid, VectorField};
use fraclame::kernels;
use fraclame::quadrature::{frac_lame_pv, QuadratureSpec, SampledField};
use fraclame::symbol::{self, ElasticModuli};
use fraclame::types::Dimension;
use libc::{c_double, c_int, size_t};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Success.
pub const FRACLAME_OK: c_int = 0;
/// An argument violates the mathematical domain of the call.
pub const FRACLAME_ERR_DOMAIN: c_int = 1;
/// Evaluation at a genuine singularity.
pub const FRACLAME_ERR_SINGULARITY: c_int = 2;
/// A requested accuracy could not be certified.
pub const FRACLAME_ERR_ACCURACY: c_int = 3;
/// An iterative solver failed.
pub const FRACLAME_ERR_SOLVER: c_int = 4;
/// Null pointer or malformed buffer.
pub const FRACLAME_ERR_ARGUMENT: c_int = 5;
/// Unexpected internal failure (a bug; never expected).
pub const FRACLAME_ERR_INTERNAL: c_int = 6;

fn code_of(e: &fraclame::Error) -> c_int {
    use fraclame::Error::*;
    match e {
        Domain(_) | Config(_) | Precondition(_) => FRACLAME_ERR_DOMAIN,
        Singularity(_) => FRACLAME_ERR_SINGULARITY,
        Accuracy(_) => FRACLAME_ERR_ACCURACY,
        Solver(_) => FRACLAME_ERR_SOLVER,
        Io(_) => FRACLAME_ERR_INTERNAL,
    }
}

fn guarded(f: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => FRACLAME_ERR_INTERNAL,
    }
}

/// Opaque handle: elastic moduli with the ellipticity conditions enforced.
pub struct FraclameModuli(ElasticModuli);

/// Opaque handle: a real vector field on a periodic grid.
pub struct FraclameField {
    field: VectorField,
}

/// Create a moduli handle; fails unless mu > 0 and 2 mu + lambda > 0.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fraclame_moduli_new(
    mu: c_double,
    lambda: c_double,
    out: *mut *mut FraclameModuli,
) -> c_int {
    if out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| match ElasticModuli::new(mu, lambda) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(FraclameModuli(m)));
            FRACLAME_OK
        }
        Err(e) => code_of(&e),
    })
}

/// Release a moduli handle (accepts null).
///
/// # Safety
/// `m` must come from `fraclame_moduli_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fraclame_moduli_free(m: *mut FraclameModuli) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Create a field handle from a component-major buffer of length
/// d * n^d (component c occupies the c-th plane, row-major grid order).
///
/// # Safety
/// `data` must point to `d * n^d` readable doubles; `out` to one pointer.
#[no_mangle]
pub unsafe extern "C" fn fraclame_field_new(
    d: size_t,
    n: size_t,
    box_length: c_double,
    data: *const c_double,
    out: *mut *mut FraclameField,
) -> c_int {
    if data.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let dim = match Dimension::new(d) {
            Ok(v) => v,
            Err(e) => return code_of(&e),
        };
        let grid = match PeriodicGrid::new(dim, n, box_length) {
            Ok(g) => g,
            Err(e) => return code_of(&e),
        };
        let len = d * grid.num_points();
        let slice = std::slice::from_raw_parts(data, len);
        match VectorField::from_data(grid, slice.to_vec()) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(FraclameField { field: f }));
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Copy a field's payload into a caller buffer of length d * n^d.
///
/// # Safety
/// `f` must be a live field handle; `data` must have room for d * n^d doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclame_field_copy_out(
    f: *const FraclameField,
    data: *mut c_double,
) -> c_int {
    if f.is_null() || data.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let field = &(*f).field;
        let src = field.data();
        std::ptr::copy_nonoverlapping(src.as_ptr(), data, src.len());
        FRACLAME_OK
    })
}

/// Release a field handle (accepts null).
///
/// # Safety
/// `f` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fraclame_field_free(f: *mut FraclameField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Spectral application of the fractional operator: out = L^s(in).
/// `s` lies in (0, 1].
///
/// # Safety
/// All handles must be live; `out` receives a new field handle.
#[no_mangle]
pub unsafe extern "C" fn fraclame_apply_spectral(
    input: *const FraclameField,
    s: c_double,
    moduli: *const FraclameModuli,
    out: *mut *mut FraclameField,
) -> c_int {
    if input.is_null() || moduli.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| match fields::frac_lame_apply(&(*input).field, s, &(*moduli).0) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(FraclameField { field: f }));
            FRACLAME_OK
        }
        Err(e) => code_of(&e),
    })
}

/// Solve (L^s + q) u = f spectrally.
///
/// # Safety
/// As `fraclame_apply_spectral`.
#[no_mangle]
pub unsafe extern "C" fn fraclame_solve_resolvent(
    forcing: *const FraclameField,
    s: c_double,
    q: c_double,
    moduli: *const FraclameModuli,
    out: *mut *mut FraclameField,
) -> c_int {
    if forcing.is_null() || moduli.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| match fields::solve_resolvent(&(*forcing).field, s, q, &(*moduli).0) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(FraclameField { field: f }));
            FRACLAME_OK
        }
        Err(e) => code_of(&e),
    })
}

/// Principal-value evaluation of the operator at one point of a grid-backed
/// field (cubic interpolation off nodes). `x` has d entries; `out` receives
/// d components.
///
/// # Safety
/// `x` must point to d doubles, `out` to d writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclame_apply_pointwise(
    input: *const FraclameField,
    x: *const c_double,
    s: c_double,
    moduli: *const FraclameModuli,
    r_outer: c_double,
    out: *mut c_double,
) -> c_int {
    if input.is_null() || moduli.is_null() || x.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let field = &(*input).field;
        let d = field.grid().d();
        let mut xv = [0.0; 3];
        for (ax, v) in xv.iter_mut().enumerate().take(d) {
            *v = *x.add(ax);
        }
        let sampled = SampledField::from_grid(field);
        let spec = match QuadratureSpec::new(0.0, r_outer, 8, 48, 1e-3) {
            Ok(sp) => sp,
            Err(e) => return code_of(&e),
        };
        match frac_lame_pv(&sampled, &xv, s, &(*moduli).0, &spec) {
            Ok(v) => {
                for (ax, val) in v.iter().enumerate().take(d) {
                    *out.add(ax) = *val;
                }
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Fundamental solution matrix at a point, row-major d x d into `out`.
///
/// # Safety
/// `x` must point to d doubles, `out` to d*d writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclame_fundamental_solution(
    d: size_t,
    x: *const c_double,
    s: c_double,
    moduli: *const FraclameModuli,
    out: *mut c_double,
) -> c_int {
    if moduli.is_null() || x.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let dim = match Dimension::new(d) {
            Ok(v) => v,
            Err(e) => return code_of(&e),
        };
        let mut xv = [0.0; 3];
        for (ax, v) in xv.iter_mut().enumerate().take(d) {
            *v = *x.add(ax);
        }
        match kernels::fundamental_solution(dim, &xv, s, &(*moduli).0) {
            Ok(k) => {
                for i in 0..d {
                    for j in 0..d {
                        *out.add(i * d + j) = k[i][j];
                    }
                }
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Poisson kernel matrix at (x, t), row-major d x d into `out`.
///
/// # Safety
/// As `fraclame_fundamental_solution`.
#[no_mangle]
pub unsafe extern "C" fn fraclame_poisson_kernel(
    d: size_t,
    x: *const c_double,
    t: c_double,
    s: c_double,
    moduli: *const FraclameModuli,
    out: *mut c_double,
) -> c_int {
    if moduli.is_null() || x.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let dim = match Dimension::new(d) {
            Ok(v) => v,
            Err(e) => return code_of(&e),
        };
        let mut xv = [0.0; 3];
        for (ax, v) in xv.iter_mut().enumerate().take(d) {
            *v = *x.add(ax);
        }
        match kernels::poisson_kernel(dim, &xv, t, s, &(*moduli).0) {
            Ok(k) => {
                for i in 0..d {
                    for j in 0..d {
                        *out.add(i * d + j) = k[i][j];
                    }
                }
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Weighted Neumann trace of the half-space extension: out gets the
/// extrapolated limit field, which equals 2 Gamma(1-s)/(2^{2s} Gamma(s))
/// times the operator applied to the boundary data.
///
/// # Safety
/// As `fraclame_apply_spectral`.
#[no_mangle]
pub unsafe extern "C" fn fraclame_dtn_neumann(
    boundary: *const FraclameField,
    s: c_double,
    moduli: *const FraclameModuli,
    out: *mut *mut FraclameField,
) -> c_int {
    if boundary.is_null() || moduli.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let t_seq: Vec<f64> = (0..6).map(|k| 0.02 * 0.55f64.powi(k)).collect();
        match dtn_neumann(&(*boundary).field, s, &(*moduli).0, &t_seq) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(FraclameField { field: f }));
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// The Neumann trace constant 2 Gamma(1-s)/(2^{2s} Gamma(s)).
#[no_mangle]
pub extern "C" fn fraclame_neumann_constant(s: c_double, out: *mut c_double) -> c_int {
    if out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| match neumann_constant(s) {
        Ok(v) => {
            unsafe { *out = v };
            FRACLAME_OK
        }
        Err(e) => code_of(&e),
    })
}

/// Solve the homogeneous-exterior Dirichlet problem on a centered ball with
/// constant forcing (fx, fy[, fz]); `out` receives the solution field
/// extended by zero.
///
/// # Safety
/// As `fraclame_apply_spectral`.
#[no_mangle]
pub unsafe extern "C" fn fraclame_solve_dirichlet_ball(
    d: size_t,
    n: size_t,
    box_length: c_double,
    radius: c_double,
    s: c_double,
    moduli: *const FraclameModuli,
    fx: c_double,
    fy: c_double,
    fz: c_double,
    out: *mut *mut FraclameField,
) -> c_int {
    if moduli.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        let dim = match Dimension::new(d) {
            Ok(v) => v,
            Err(e) => return code_of(&e),
        };
        let grid = match PeriodicGrid::new(dim, n, box_length) {
            Ok(g) => g,
            Err(e) => return code_of(&e),
        };
        let mask = match DomainMask::ball(grid, radius) {
            Ok(m) => m,
            Err(e) => return code_of(&e),
        };
        let f = VectorField::from_fn(grid, move |_| [fx, fy, fz]);
        match solve_dirichlet(&mask, &f, s, &(*moduli).0) {
            Ok((u, _report)) => {
                *out = Box::into_raw(Box::new(FraclameField { field: u }));
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Entries of the symbol matrix M^s(xi), row-major d x d into `out`.
///
/// # Safety
/// `xi` must point to d doubles, `out` to d*d writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fraclame_symbol_power(
    d: size_t,
    xi: *const c_double,
    s: c_double,
    moduli: *const FraclameModuli,
    out: *mut c_double,
) -> c_int {
    if moduli.is_null() || xi.is_null() || out.is_null() {
        return FRACLAME_ERR_ARGUMENT;
    }
    guarded(|| {
        if d != 2 && d != 3 {
            return FRACLAME_ERR_DOMAIN;
        }
        let mut xv = [0.0; 3];
        for (ax, v) in xv.iter_mut().enumerate().take(d) {
            *v = *xi.add(ax);
        }
        match symbol::lame_symbol_power(d, &xv, s, &(*moduli).0) {
            Ok(k) => {
                for i in 0..d {
                    for j in 0..d {
                        *out.add(i * d + j) = k.entry(i, j);
                    }
                }
                FRACLAME_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_lifecycle_and_validation() {
        unsafe {
            let mut m: *mut FraclameModuli = std::ptr::null_mut();
            assert_eq!(fraclame_moduli_new(1.0, 0.5, &mut m), FRACLAME_OK);
            assert!(!m.is_null());
            fraclame_moduli_free(m);
            let mut bad: *mut FraclameModuli = std::ptr::null_mut();
            assert_eq!(fraclame_moduli_new(-1.0, 0.0, &mut bad), FRACLAME_ERR_DOMAIN);
            assert!(bad.is_null());
        }
    }

    #[test]
    fn field_round_trip_and_apply() {
        unsafe {
            let (d, n, len) = (2usize, 16usize, 4.0);
            let np = n * n;
            let mut data = vec![0.0f64; d * np];
            for (i, v) in data.iter_mut().enumerate() {
                let idx = i % np;
                let (a, b) = (idx / n, idx % n);
                let x = a as f64 * len / n as f64;
                let y = b as f64 * len / n as f64;
                *v = (2.0 * std::f64::consts::PI * (x + y) / len).cos();
            }
            let mut f: *mut FraclameField = std::ptr::null_mut();
            assert_eq!(fraclame_field_new(d, n, len, data.as_ptr(), &mut f), FRACLAME_OK);
            let mut m: *mut FraclameModuli = std::ptr::null_mut();
            fraclame_moduli_new(1.0, 0.3, &mut m);
            let mut w: *mut FraclameField = std::ptr::null_mut();
            assert_eq!(fraclame_apply_spectral(f, 0.5, m, &mut w), FRACLAME_OK);
            let mut out = vec![0.0f64; d * np];
            assert_eq!(fraclame_field_copy_out(w, out.as_mut_ptr()), FRACLAME_OK);
            assert!(out.iter().any(|v| v.abs() > 1e-6));
            // resolvent solve runs
            let mut r: *mut FraclameField = std::ptr::null_mut();
            assert_eq!(fraclame_solve_resolvent(f, 0.5, 1.0, m, &mut r), FRACLAME_OK);
            fraclame_field_free(r);
            fraclame_field_free(w);
            fraclame_field_free(f);
            fraclame_moduli_free(m);
        }
    }

    #[test]
    fn kernel_and_symbol_entries() {
        unsafe {
            let mut m: *mut FraclameModuli = std::ptr::null_mut();
            fraclame_moduli_new(1.0, 0.5, &mut m);
            let x = [0.7f64, -0.3];
            let mut k = [0.0f64; 4];
            assert_eq!(
                fraclame_fundamental_solution(2, x.as_ptr(), 0.4, m, k.as_mut_ptr()),
                FRACLAME_OK
            );
            assert!(k[0] > 0.0 && (k[1] - k[2]).abs() < 1e-15);
            // singular at the origin
            let zero = [0.0f64, 0.0];
            assert_eq!(
                fraclame_fundamental_solution(2, zero.as_ptr(), 0.4, m, k.as_mut_ptr()),
                FRACLAME_ERR_SINGULARITY
            );
            let mut p = [0.0f64; 4];
            assert_eq!(
                fraclame_poisson_kernel(2, x.as_ptr(), 1.0, 0.5, m, p.as_mut_ptr()),
                FRACLAME_OK
            );
            assert!(p[0] > 0.0);
            let xi = [0.5f64, 0.2];
            let mut sym = [0.0f64; 4];
            assert_eq!(fraclame_symbol_power(2, xi.as_ptr(), 0.5, m, sym.as_mut_ptr()), FRACLAME_OK);
            assert!((sym[1] - sym[2]).abs() < 1e-15);
            let mut c = 0.0f64;
            assert_eq!(fraclame_neumann_constant(0.5, &mut c), FRACLAME_OK);
            assert!((c - 1.0).abs() < 1e-12); // 2 Gamma(1/2)/(2 Gamma(1/2)) = 1
            fraclame_moduli_free(m);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert_eq!(
                fraclame_moduli_new(1.0, 0.0, std::ptr::null_mut()),
                FRACLAME_ERR_ARGUMENT
            );
            let mut out = 0.0f64;
            assert_eq!(
                fraclame_apply_pointwise(
                    std::ptr::null(),
                    std::ptr::null(),
                    0.5,
                    std::ptr::null(),
                    1.0,
                    &mut out
                ),
                FRACLAME_ERR_ARGUMENT
            );
        }
    }
}
