//! Cross-validation suites: every independently computable route to the same
//! object is compared at a pinned tolerance. Each check reports its measured
//! value; the suites back the CLI `verify` command and the acceptance tests.

use crate::error::{Error, Result};
use crate::extension::{self, ExtensionSlab};
use crate::fields::{self, synth, PeriodicGrid, VectorField};
use crate::kernels;
use crate::quadrature::{self, QuadratureSpec, SampledField};
use crate::special;
use crate::symbol::{self, ElasticModuli, SymbolMatrix};
use crate::types::Dimension;
use crate::util::{norm, SplitMix64, Vec3};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub test: String,
    pub status: String,
    pub measured: f64,
    pub tolerance: f64,
    /// wall time of the computation backing this check, when tracked;
    /// excluded from reports so identical configurations produce identical
    /// bytes
    #[serde(skip)]
    pub seconds: f64,
}

impl Check {
    fn new(test: impl Into<String>, measured: f64, tolerance: f64) -> Check {
        Check {
            test: test.into(),
            status: if measured.is_finite() && measured <= tolerance { "pass" } else { "fail" }
                .to_string(),
            measured,
            tolerance,
            seconds: 0.0,
        }
    }

    fn timed(test: impl Into<String>, measured: f64, tolerance: f64, t0: std::time::Instant) -> Check {
        let mut c = Check::new(test, measured, tolerance);
        c.seconds = t0.elapsed().as_secs_f64();
        c
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub const SUITES: &[&str] = &[
    "symbols",
    "constants",
    "kernels",
    "extension",
    "peridynamics",
    "dirichlet",
];

/// Run one suite (or `all`).
pub fn run_suite(name: &str, seed: u64) -> Result<Report> {
    let checks = match name {
        "symbols" => suite_symbols(seed)?,
        "constants" => suite_constants()?,
        "kernels" => suite_kernels(seed)?,
        "extension" => suite_extension(seed)?,
        "peridynamics" => suite_peridynamics(seed)?,
        "dirichlet" => suite_dirichlet()?,
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, seed)?.checks);
            }
            all
        }
        other => {
            return Err(Error::Config(format!(
                "unknown suite '{other}'; expected one of {SUITES:?} or 'all'"
            )))
        }
    };
    Ok(Report { suite: name.to_string(), seed, checks })
}

fn random_moduli(rng: &mut SplitMix64) -> ElasticModuli {
    let mu = rng.uniform(0.3, 2.5);
    let lambda = rng.uniform(-1.9 * mu, 3.0 * mu);
    ElasticModuli::new(mu, lambda).expect("sampled in the elliptic cone")
}

fn random_xi(rng: &mut SplitMix64, d: usize) -> Vec3 {
    let mut xi = [0.0; 3];
    for x in xi.iter_mut().take(d) {
        *x = rng.uniform(-3.0, 3.0);
    }
    if norm(d, &xi) < 1e-3 {
        xi[0] = 0.7;
    }
    xi
}

/// Criterion 1 (symbol algebra) and criterion 11 (seminorm sandwich), plus
/// the symbol half of criterion 6.
fn suite_symbols(seed: u64) -> Result<Vec<Check>> {
    let mut rng = SplitMix64::new(seed);
    let mut checks = Vec::new();
    // semigroup, inverse, rotation over a randomized parameter grid
    let mut worst_semigroup = 0.0f64;
    let mut worst_inverse = 0.0f64;
    let mut worst_rotation = 0.0f64;
    let mut worst_heat = 0.0f64;
    for _ in 0..120 {
        let d = if rng.next_f64() < 0.5 { 2 } else { 3 };
        let m = random_moduli(&mut rng);
        let xi = random_xi(&mut rng, d);
        let s = rng.uniform(0.05, 0.95);
        let t = rng.uniform(-0.4, (1.0 - s).min(0.5));
        if s + t > -0.49 * d as f64 && (s + t).abs() > 1e-3 && t.abs() > 1e-3 {
            let a = symbol::lame_symbol_power(d, &xi, s, &m)?;
            let b = symbol::lame_symbol_power(d, &xi, t, &m)?;
            let c = symbol::lame_symbol_power(d, &xi, s + t, &m)?;
            worst_semigroup =
                worst_semigroup.max(a.matmul(&b).sub(&c).frobenius() / c.frobenius().max(1e-300));
        }
        let inv = symbol::lame_symbol_inverse_power(d, &xi, s.min(0.9), &m)?;
        let fwd = symbol::lame_symbol_power(d, &xi, s.min(0.9), &m)?;
        worst_inverse = worst_inverse
            .max(inv.matmul(&fwd).sub(&SymbolMatrix::identity(d)).frobenius());
        // rotation equivariance in 2d (random planar rotation)
        if d == 2 {
            let th = rng.uniform(0.0, 2.0 * PI);
            let (c2, s2) = (th.cos(), th.sin());
            let rxi = [c2 * xi[0] - s2 * xi[1], s2 * xi[0] + c2 * xi[1], 0.0];
            let a = symbol::lame_symbol_power(2, &xi, s, &m)?;
            let b = symbol::lame_symbol_power(2, &rxi, s, &m)?;
            let mut rar = [[0.0f64; 3]; 3];
            let r = [[c2, -s2], [s2, c2]];
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = 0.0;
                    for k in 0..2 {
                        for l in 0..2 {
                            acc += r[i][k] * a.entry(k, l) * r[j][l];
                        }
                    }
                    rar[i][j] = acc;
                }
            }
            let mut defect = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    defect = defect.max((b.entry(i, j) - rar[i][j]).abs());
                }
            }
            worst_rotation = worst_rotation.max(defect / b.frobenius().max(1e-300));
        }
        // heat symbol vs scaled-and-squared exponential series
        let tt = rng.uniform(0.01, 0.6);
        let h = symbol::heat_symbol(d, &xi, tt, &m)?;
        let a = symbol::lame_symbol(d, &xi, &m);
        let series = matrix_exp_series(d, &a, -tt);
        worst_heat = worst_heat.max(h.sub(&series).frobenius() / series.frobenius().max(1e-12));
    }
    checks.push(Check::new("symbols/semigroup_power_product", worst_semigroup, 1e-12));
    checks.push(Check::new("symbols/inverse_power_identity", worst_inverse, 1e-12));
    checks.push(Check::new("symbols/rotation_equivariance", worst_rotation, 1e-12));
    checks.push(Check::new("symbols/heat_vs_exponential_series", worst_heat, 1e-12));
    // criterion 6, symbol half: half-space DtN symbol vs half power
    let mut worst_dtn = 0.0f64;
    for _ in 0..40 {
        let d = if rng.next_f64() < 0.5 { 2 } else { 3 };
        let mt = random_moduli(&mut rng);
        let xi = random_xi(&mut rng, d);
        let m = symbol::dtn_equivalent_moduli(&mt)?;
        let dtn = symbol::dtn_halfspace_symbol(d, &xi, &mt)?;
        let half = symbol::lame_symbol_power(d, &xi, 0.5, &m)?;
        worst_dtn = worst_dtn.max(dtn.sub(&half).frobenius() / half.frobenius());
    }
    checks.push(Check::new("symbols/dtn_halfspace_vs_half_power", worst_dtn, 1e-12));
    // criterion 11: Korn sandwich on 100 random fields
    let grid = PeriodicGrid::new(Dimension::new(2)?, 16, 4.0)?;
    let mut violations = 0usize;
    for k in 0..100 {
        let s = [0.25, 0.5, 0.75][k % 3];
        let m = random_moduli(&mut rng);
        let u = synth::random_band_limited(grid, 4, seed.wrapping_add(1000 + k as u64));
        let num = fields::lame_energy(&u, s, &m)?;
        let den = fields::gagliardo_energy(&u, s);
        let ratio = num / den;
        let lo = m.mu().min(m.p_mod()).powf(s);
        let hi = (1.0 + 2.0 * s) * m.mu().max(m.p_mod()).powf(s);
        if !(ratio >= lo * (1.0 - 1e-10) && ratio <= hi * (1.0 + 1e-10)) {
            violations += 1;
        }
    }
    checks.push(Check::new("symbols/korn_sandwich_violations", violations as f64, 0.0));
    Ok(checks)
}

fn matrix_exp_series(d: usize, a: &SymbolMatrix, factor: f64) -> SymbolMatrix {
    let mut squarings = 0u32;
    let mut scale = factor;
    while a.frobenius() * scale.abs() > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let mut scaled = a.entries();
    for row in scaled.iter_mut().take(d) {
        for x in row.iter_mut().take(d) {
            *x *= scale;
        }
    }
    let scaled = SymbolMatrix::from_entries(d, scaled);
    let mut result = SymbolMatrix::identity(d);
    let mut term = SymbolMatrix::identity(d);
    for k in 1..60 {
        term = term.matmul(&scaled);
        let mut m = term.entries();
        for row in m.iter_mut().take(d) {
            for x in row.iter_mut().take(d) {
                *x /= k as f64;
            }
        }
        term = SymbolMatrix::from_entries(d, m);
        let mut r = result.entries();
        for i in 0..d {
            for j in 0..d {
                r[i][j] += term.entry(i, j);
            }
        }
        result = SymbolMatrix::from_entries(d, r);
        if term.frobenius() < 1e-17 * result.frobenius() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// Criterion 2: the Gamma closed forms of c_{d,s} and k_{d,s} against their
/// defining integrals, and the exact value c_{2,1/2} = 1/(2 pi).
fn suite_constants() -> Result<Vec<Check>> {
    use crate::quad1d::{integrate, integrate_log, integrate_oscillatory_tail};
    let mut checks = Vec::new();
    let one_minus_j0 = |r: f64| -> f64 {
        if r > 0.1 {
            return 1.0 - special::bessel_j(0.0, r).unwrap();
        }
        let q = 0.25 * r * r;
        let mut term = q;
        let mut sum = q;
        for k in 2..30 {
            term *= q / ((k * k) as f64);
            sum += if k % 2 == 0 { -term } else { term };
            if term < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    };
    let one_minus_sinc = |r: f64| -> f64 {
        if r > 0.1 {
            return 1.0 - r.sin() / r;
        }
        let q = r * r;
        q / 6.0 - q * q / 120.0 + q * q * q / 5040.0 - q * q * q * q / 362880.0
    };
    let mut worst_c = 0.0f64;
    let mut worst_k = 0.0f64;
    for d in [2usize, 3] {
        let dd = Dimension::new(d)?;
        for &s in &[0.25, 0.5, 0.75] {
            // 1/c: radial reduction of the (1-cos) integral
            let angular = |r: f64| -> f64 {
                if d == 2 {
                    2.0 * PI * one_minus_j0(r)
                } else {
                    4.0 * PI * one_minus_sinc(r)
                }
            };
            let split = 40.0;
            let near = integrate_log(&mut |r: f64| angular(r) * r.powf(-1.0 - 2.0 * s), 1e-40, 1.0, 6, 16)
                + integrate(&mut |r: f64| angular(r) * r.powf(-1.0 - 2.0 * s), 1.0, split, 1e-11);
            let const_tail =
                if d == 2 { 2.0 * PI } else { 4.0 * PI } * split.powf(-2.0 * s) / (2.0 * s);
            let osc = if d == 2 {
                -2.0 * PI
                    * integrate_oscillatory_tail(
                        &mut |r: f64| special::bessel_j(0.0, r).unwrap() * r.powf(-1.0 - 2.0 * s),
                        split,
                        PI,
                        4000,
                    )
            } else {
                -4.0 * PI
                    * integrate_oscillatory_tail(
                        &mut |r: f64| r.sin() / r * r.powf(-1.0 - 2.0 * s),
                        split,
                        PI,
                        4000,
                    )
            };
            let integral = near + const_tail + osc;
            let closed = 1.0 / special::const_c(dd, s)?;
            worst_c = worst_c.max(((integral - closed) / closed).abs());
            // 1/k: radial reduction of the h1 sin(h1) integral
            let integral_k = if d == 2 {
                2.0 * PI
                    * (integrate_log(
                        &mut |r: f64| special::bessel_j(1.0, r).unwrap() * r.powf(-s - 1.0),
                        1e-40,
                        1.0,
                        6,
                        16,
                    ) + integrate(
                        &mut |r: f64| special::bessel_j(1.0, r).unwrap() * r.powf(-s - 1.0),
                        1.0,
                        30.0,
                        1e-12,
                    ) + integrate_oscillatory_tail(
                        &mut |r: f64| special::bessel_j(1.0, r).unwrap() * r.powf(-s - 1.0),
                        30.0,
                        PI,
                        4000,
                    ))
            } else {
                let f = |r: f64| {
                    let g = if r < 1e-4 {
                        r / 3.0 - r.powi(3) / 30.0
                    } else {
                        (r.sin() - r * r.cos()) / (r * r)
                    };
                    4.0 * PI * g * r.powf(-s - 1.0)
                };
                integrate_log(&mut { f }, 1e-40, 1.0, 6, 16)
                    + integrate(&mut { f }, 1.0, 30.0, 1e-12)
                    + integrate_oscillatory_tail(&mut { f }, 30.0, PI, 4000)
            };
            let closed_k = 1.0 / special::const_k(dd, s)?;
            worst_k = worst_k.max(((integral_k - closed_k) / closed_k).abs());
        }
    }
    checks.push(Check::new("constants/c_gamma_formula_vs_integral", worst_c, 1e-5));
    checks.push(Check::new("constants/k_gamma_formula_vs_integral", worst_k, 1e-5));
    let c_half = special::const_c(Dimension::new(2)?, 0.5)?;
    checks.push(Check::new(
        "constants/c_2_half_equals_inv_two_pi",
        (c_half - 1.0 / (2.0 * PI)).abs(),
        1e-12,
    ));
    // kappa = (d+2s) c across the grid
    let mut worst_kappa = 0.0f64;
    for d in [2usize, 3] {
        let dd = Dimension::new(d)?;
        for &s in &[0.25, 0.5, 0.75] {
            let lhs = special::const_kappa(dd, s)?;
            let rhs = (d as f64 + 2.0 * s) * special::const_c(dd, s)?;
            worst_kappa = worst_kappa.max(((lhs - rhs) / rhs).abs());
        }
    }
    checks.push(Check::new("constants/kappa_identity", worst_kappa, 1e-14));
    Ok(checks)
}

/// Criteria 7, 8, 9: fundamental solution, Poisson kernel, psi profiles.
fn suite_kernels(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let d2 = Dimension::new(2)?;
    // 7a: windowed FT of the fundamental solution vs the inverse symbol
    {
        let s = 0.4;
        let m = ElasticModuli::new(1.0, 0.6)?;
        let xi = [0.55, 0.35, 0.0];
        let acc = windowed_kernel_transform(
            |x| kernels::fundamental_solution(d2, x, s, &m),
            &xi,
            6.0,
            18.0,
            480,
            1.0,
            s,
            &m,
        )?;
        let inv = symbol::lame_symbol_inverse_power(2, &xi, s, &m)?;
        let mut worst = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max((acc[a][b] - inv.entry(a, b)).abs() / inv.entry(0, 0).abs());
            }
        }
        checks.push(Check::new("kernels/fundamental_ft_vs_inverse_symbol", worst, 1e-2));
    }
    // 7b: spectral potential inversion on mean-zero fields
    {
        let grid = PeriodicGrid::new(d2, 32, 4.0)?;
        let mut u = synth::random_band_limited(grid, 5, seed.wrapping_add(7));
        synth::remove_mean(&mut u);
        let m = ElasticModuli::new(1.1, 0.4)?;
        let s = 0.55;
        let w = fields::riesz_potential_apply(&u, s, &m)?;
        let back = fields::frac_lame_apply(&w, s, &m)?;
        checks.push(Check::new(
            "kernels/riesz_inverts_operator",
            back.rel_l2_distance(&u),
            1e-11,
        ));
    }
    // 7c: scalar-reduction coefficient identity of the fundamental solution
    {
        let s = 0.45;
        let mu = 1.3f64;
        let m = ElasticModuli::new(mu, -mu)?;
        let x = [0.8, -0.4, 0.0];
        let k = kernels::fundamental_solution(d2, &x, s, &m)?;
        let scalar = special::const_g(d2, s)? / mu.powf(s)
            * norm(2, &x).powf(2.0 * s - 2.0);
        let mut worst = (k[0][0] - scalar).abs().max((k[1][1] - scalar).abs());
        worst = worst.max(k[0][1].abs());
        checks.push(Check::new(
            "kernels/riesz_kernel_scalar_reduction",
            worst / scalar,
            1e-13,
        ));
    }
    // 8: Poisson kernel checks
    {
        let m = ElasticModuli::new(1.0, 0.9)?;
        let mut worst_mass = 0.0f64;
        for &t in &[0.5, 1.0, 2.0] {
            let mass = kernels::poisson_mass(d2, t, 0.5, &m)?;
            worst_mass = worst_mass.max((mass[0][0] - 1.0).abs().max((mass[1][1] - 1.0).abs()));
        }
        checks.push(Check::new("kernels/poisson_mass_identity", worst_mass, 1e-4));
        // dilation
        let s = 0.6;
        let (x, t) = ([0.8, -0.2, 0.0], 0.7);
        let k1 = kernels::poisson_kernel(d2, &x, t, s, &m)?;
        let k2 = kernels::poisson_kernel(d2, &[x[0] / t, x[1] / t, 0.0], 1.0, s, &m)?;
        let mut worst = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max((k1[a][b] - k2[a][b] / (t * t)).abs() / k1[0][0].abs());
            }
        }
        checks.push(Check::new("kernels/poisson_dilation", worst, 1e-12));
        // s = 1/2 symbol semigroup
        let mut worst_semi = 0.0f64;
        let mut rng = SplitMix64::new(seed.wrapping_add(21));
        for _ in 0..25 {
            let mm = random_moduli(&mut rng);
            let xi = random_xi(&mut rng, 2);
            let (t1, t2) = (rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0));
            let a = symbol::poisson_symbol(2, &xi, t1, 0.5, &mm)?;
            let b = symbol::poisson_symbol(2, &xi, t2, 0.5, &mm)?;
            let c = symbol::poisson_symbol(2, &xi, t1 + t2, 0.5, &mm)?;
            worst_semi =
                worst_semi.max(a.matmul(&b).sub(&c).frobenius() / c.frobenius().max(1e-10));
        }
        checks.push(Check::new("kernels/poisson_symbol_semigroup_half", worst_semi, 1e-12));
        // closed form vs Gamma-integral form through the heat kernel
        let s = 0.35;
        let m2 = ElasticModuli::new(1.2, 0.5)?;
        let (x, t) = ([0.5, 0.3, 0.0], 0.8);
        let closed = kernels::poisson_kernel(d2, &x, t, s, &m2)?;
        let pref = t.powf(2.0 * s) / (2f64.powf(2.0 * s) * special::gamma_fn(s)?);
        let mut worst_int = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                let mut f = |r: f64| {
                    let wk = kernels::heat_kernel(d2, &x, r, &m2).unwrap();
                    wk[a][b] * (-t * t / (4.0 * r)).exp() * r.powf(-s - 1.0)
                };
                let via = pref * crate::quad1d::integrate_log(&mut f, 1e-7, 1e12, 6, 16);
                worst_int = worst_int.max((closed[a][b] - via).abs() / closed[0][0].abs());
            }
        }
        checks.push(Check::new("kernels/poisson_closed_vs_gamma_integral", worst_int, 1e-8));
    }
    // 9: psi profiles and the kernel mass
    {
        let mut worst_psi2 = 0.0f64;
        let mut worst_psi1 = 0.0f64;
        for d in [2usize, 3] {
            let dd = Dimension::new(d)?;
            for &s in &[0.3, 0.5, 0.75] {
                let kappa = special::const_kappa(dd, s)?;
                let (p1, p2) = kernels::psi_profiles(1e-3, s, dd)?;
                worst_psi1 = worst_psi1.max(p1.abs() / kappa);
                worst_psi2 = worst_psi2.max((p2 + kappa).abs() / kappa);
            }
        }
        checks.push(Check::new("kernels/psi1_vanishes_at_zero", worst_psi1, 5e-2));
        checks.push(Check::new("kernels/psi2_limit_minus_kappa", worst_psi2, 1e-2));
        // upsilon mass: diagonal of the integrated kernel vanishes
        let d = d2;
        let s = 0.4;
        let eps = 0.5;
        let kappa = special::const_kappa(d, s)?;
        let mut fa = |r: f64| {
            let (p1, p2) = kernels::psi_profiles(eps / r, s, d).unwrap();
            (p1 + p2 / 2.0) * r.powf(-(2.0 + 2.0 * s)) * r
        };
        let end: f64 = 60.0;
        let (p1e, p2e) = kernels::psi_profiles(eps / end, s, d)?;
        let total = special::sphere_surface(d)
            * (crate::quad1d::integrate_log(&mut fa, 1e-5, 0.05, 6, 16)
                + crate::quad1d::integrate(&mut fa, 0.05, end, 1e-11)
                + (p1e + p2e / 2.0) * end.powf(-2.0 * s) / (2.0 * s));
        checks.push(Check::new(
            "kernels/upsilon_zero_mass",
            total.abs() / (kappa * eps.powf(-2.0 * s)),
            1e-3,
        ));
    }
    Ok(checks)
}

#[allow(clippy::too_many_arguments)]
fn windowed_kernel_transform(
    kernel: impl Fn(&Vec3) -> Result<[[f64; 3]; 3]>,
    xi: &Vec3,
    win: f64,
    k_box: f64,
    n: usize,
    r0: f64,
    s: f64,
    m: &ElasticModuli,
) -> Result<[[f64; 3]; 3]> {
    let d2 = Dimension::new(2)?;
    let mut acc = [[0.0f64; 3]; 3];
    // polar core
    let n_ang = 128;
    for ja in 0..n_ang {
        let th = (ja as f64 + 0.5) * 2.0 * PI / n_ang as f64;
        let omj = [th.cos(), th.sin(), 0.0];
        let wo = 2.0 * PI / n_ang as f64;
        let f = |r: f64| -> f64 {
            let x = [r * omj[0], r * omj[1], 0.0];
            let window = (-(r * r) / (2.0 * win * win)).exp();
            (2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])).cos() * window * r
        };
        let moment =
            crate::quad1d::integrate_log(&mut |r: f64| f(r) * r.powf(2.0 * s - 2.0), 1e-10, r0, 6, 16);
        let kdir = kernels::fundamental_solution(d2, &omj, s, m)?;
        for a in 0..2 {
            for b in 0..2 {
                acc[a][b] += kdir[a][b] * moment * wo;
            }
        }
    }
    // cartesian shell
    let w = 2.0 * k_box / n as f64;
    for i in 0..n {
        for j in 0..n {
            let x = [-k_box + (i as f64 + 0.5) * w, -k_box + (j as f64 + 0.5) * w, 0.0];
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 <= r0 * r0 {
                continue;
            }
            let kmat = kernel(&x)?;
            let window = (-r2 / (2.0 * win * win)).exp();
            let phase = (2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])).cos();
            for a in 0..2 {
                for b in 0..2 {
                    acc[a][b] += kmat[a][b] * window * phase * w * w;
                }
            }
        }
    }
    Ok(acc)
}

/// Criteria 6 (real-space half) and 10: the extension tower.
fn suite_extension(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let d2 = Dimension::new(2)?;
    // 10a: Neumann extrapolation vs the operator, three orders
    {
        let grid = PeriodicGrid::new(d2, 64, 4.0)?;
        let u = synth::random_band_limited(grid, 3, seed.wrapping_add(17));
        let m = ElasticModuli::new(1.1, 0.3)?;
        let mut worst = 0.0f64;
        for &s in &[0.25, 0.5, 0.75] {
            let t_seq: Vec<f64> = (0..6).map(|k| 0.02 * 0.55f64.powi(k)).collect();
            let neum = extension::dtn_neumann(&u, s, &m, &t_seq)?;
            let mut expect = fields::frac_lame_apply(&u, s, &m)?;
            let c = extension::neumann_constant(s)?;
            for v in expect.data_mut() {
                *v *= c;
            }
            worst = worst.max(neum.rel_l2_distance(&expect));
        }
        checks.push(Check::new("extension/neumann_vs_operator", worst, 1e-3));
    }
    // 10b: PDE residual of the Poisson extension
    {
        let grid = PeriodicGrid::new(d2, 64, 4.0)?;
        let u = synth::random_band_limited(grid, 2, seed.wrapping_add(19));
        let m = ElasticModuli::new(1.0, 0.6)?;
        let mut levels = Vec::new();
        let mut t = 0.1f64;
        while t <= 2.0 {
            levels.push(t);
            t *= 1.07;
        }
        let slab = ExtensionSlab::new(grid, levels)?;
        let mut worst = 0.0f64;
        for &s in &[0.25, 0.5, 0.75] {
            let f = extension::extend(&u, s, &m, &slab)?;
            worst = worst.max(extension::pde_residual(&f)?);
        }
        checks.push(Check::new("extension/pde_residual", worst, 1e-4));
    }
    // 10c: per-mode expansion exponent 2s
    {
        let mut worst = 0.0f64;
        for &s in &[0.25, 0.5, 0.75] {
            let a = 3.1;
            let ts = [1e-3, 5e-4, 2.5e-4, 1.25e-4];
            let ys: Vec<f64> = ts
                .iter()
                .map(|&t| 1.0 - special::bessel_k_cal(s, a * t).unwrap())
                .collect();
            let slope = ((ys[0] / ys[3]).ln()) / ((ts[0] / ts[3]).ln());
            worst = worst.max((slope - 2.0 * s).abs());
        }
        checks.push(Check::new("extension/per_mode_exponent", worst, 0.05));
    }
    // 10d: energy identity between the weighted slab energy and the form
    {
        let grid = PeriodicGrid::new(d2, 32, 8.0)?;
        let wave = synth::GaussianWave {
            center: [4.0, 4.0, 0.0],
            width: 1.2,
            wavevec: [1.0 / 8.0, -1.0 / 8.0, 0.0],
            pol: [0.8, 0.4, 0.0],
            phase: 0.5,
            d: 2,
        };
        let u = synth::gaussian_wave_field(grid, &wave);
        let m = ElasticModuli::new(1.0, 0.4)?;
        let mut worst = 0.0f64;
        for &s in &[0.35, 0.5, 0.65] {
            let slab = ExtensionSlab::graded(grid, 1e-4, 24.0)?;
            let f = extension::extend(&u, s, &m, &slab)?;
            let b = 2.0 * extension::weighted_energy(&f)?;
            let expect = fields::lame_energy(&u, s, &m)? * extension::neumann_constant(s)?;
            worst = worst.max(((b - expect) / expect).abs());
        }
        checks.push(Check::new("extension/energy_identity", worst, 1e-2));
    }
    // 6b: real-space half-space DtN vs the operator at s = 1/2
    {
        let mt = ElasticModuli::new(1.0, 0.5)?;
        let m = symbol::dtn_equivalent_moduli(&mt)?;
        let pol = [0.7, -0.4, 0.0];
        let u = SampledField::from_closure(
            2,
            move |x: &Vec3| {
                let e = (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp();
                [pol[0] * e, pol[1] * e, 0.0]
            },
            [0.0; 3],
            7.0,
        )
        .with_envelope(0.9, 0.5);
        let spec = QuadratureSpec::new(0.0, 12.0, 12, 96, 1e-4)?;
        let mut worst = 0.0f64;
        for x in [[0.0, 0.0, 0.0], [0.5, -0.4, 0.0], [-0.3, 0.8, 0.0]] {
            let dtn = kernels::dtn_halfspace_apply(&u, &x, &mt, &spec)?;
            let pv = quadrature::frac_lame_pv(&u, &x, 0.5, &m, &spec)?;
            let mut diff = [0.0; 3];
            for c in 0..2 {
                diff[c] = dtn[c] - pv[c];
            }
            worst = worst.max(norm(2, &diff) / norm(2, &pv).max(1e-6));
        }
        checks.push(Check::new("extension/dtn_real_space_vs_half_power", worst, 2e-3));
        let (c_half, two_over_omega) = kernels::dtn_constant_identity(d2)?;
        checks.push(Check::new(
            "extension/dtn_constant_identity",
            (c_half - two_over_omega).abs() / c_half,
            1e-12,
        ));
    }
    Ok(checks)
}

/// Criteria 3, 4, 5: spectral vs quadrature routes and the state-based
/// operator.
fn suite_peridynamics(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let d2 = Dimension::new(2)?;
    let grid = PeriodicGrid::new(d2, 64, 8.0)?;
    let l = grid.len();
    let wave = synth::GaussianWave {
        center: [0.5 * l, 0.5 * l, 0.0],
        width: l / 16.0,
        wavevec: [3.0 / l, -2.0 / l, 0.0],
        pol: [1.0, 0.5, 0.0],
        phase: 0.3,
        d: 2,
    };
    let m = ElasticModuli::new(1.0, 0.8)?;
    let (amp, alpha) = wave.envelope_bound();
    let center = wave.center;
    let wave_eval = wave.clone();
    let sampled = SampledField::from_closure(
        2,
        move |x: &Vec3| wave_eval.eval(x),
        center,
        6.0 * wave.width,
    )
    .with_envelope(amp, alpha);
    // 3: cross-route equality over the comparison block. The quadrature
    // route is a free-space operator, so the spectral reference runs on an
    // 8x padded embedding of the same wave (image-bump coupling through the
    // slow kernel tail drops to ~2e-4); the n = 64 comparison block keeps
    // the stated resolution.
    {
        let pad = 8usize;
        let grid_pad = PeriodicGrid::new(d2, 64 * pad, l * pad as f64)?;
        let shift = 0.5 * (l * pad as f64) - 0.5 * l;
        let wave_pad = synth::GaussianWave {
            center: [center[0] + shift, center[1] + shift, 0.0],
            ..wave.clone()
        };
        let u_pad = synth::gaussian_wave_field(grid_pad, &wave_pad);
        let offset = (shift / grid_pad.spacing()).round() as usize;
        // the carrier phase is position dependent, so the quadrature field
        // is built from the padded wave in padded coordinates
        let wave_pad_eval = wave_pad.clone();
        let sampled_pad = SampledField::from_closure(
            2,
            move |x: &Vec3| wave_pad_eval.eval(x),
            wave_pad.center,
            6.0 * wave.width,
        )
        .with_envelope(amp, alpha);
        let spec = QuadratureSpec::new(0.0, 1.4 * l, 8, 48, 1e-4)?;
        let t0 = std::time::Instant::now();
        let mut worst = 0.0f64;
        for &s in &[0.25, 0.5, 0.75] {
            let spectral = fields::frac_lame_apply(&u_pad, s, &m)?;
            let np_pad = grid_pad.num_points();
            use rayon::prelude::*;
            let block: Vec<(usize, Vec3)> = (0..64usize * 64)
                .map(|t| {
                    let (bi, bj) = (t / 64, t % 64);
                    let ij = [bi + offset, bj + offset, 0];
                    (grid_pad.ravel(&ij), grid_pad.point(grid_pad.ravel(&ij)))
                })
                .collect();
            let values: Vec<Vec3> = block
                .par_iter()
                .map(|(_, xp)| {
                    quadrature::frac_lame_pv(&sampled_pad, xp, s, &m, &spec)
                        .unwrap_or([f64::NAN; 3])
                })
                .collect();
            let mut num = 0.0;
            let mut den = 0.0;
            for ((idx, _), v) in block.iter().zip(values.iter()) {
                for c in 0..2 {
                    let sv = spectral.data()[c * np_pad + idx];
                    num += (v[c] - sv).powi(2);
                    den += sv * sv;
                }
            }
            worst = worst.max((num / den).sqrt());
        }
        checks.push(Check::timed("peridynamics/cross_route_operator", worst, 1e-3, t0));
    }
    // 4: vector-calculus decomposition, spectral and quadrature routes
    {
        let mut worst_spectral = 0.0f64;
        let u = synth::random_band_limited(grid, 3, seed.wrapping_add(3));
        for &s in &[0.35, 0.6] {
            let lame = fields::frac_lame_apply(&u, s, &m)?;
            let div_u = fields::frac_divergence(&u, s)?;
            let grad_div = fields::frac_gradient_scalar(&div_u, s)?;
            let mut recon = VectorField::zeros(grid);
            let np = grid.num_points();
            for c in 0..2 {
                let mut sc = fields::ScalarField::zeros(grid);
                sc.data_mut().copy_from_slice(u.comp(c));
                let gc = fields::frac_gradient_scalar(&sc, s)?;
                let dgc = fields::frac_divergence(&gc, s)?;
                for idx in 0..np {
                    recon.comp_mut(c)[idx] = -m.mu().powf(s) * dgc.data()[idx]
                        - (m.p_mod().powf(s) - m.mu().powf(s)) * grad_div.comp(c)[idx];
                }
            }
            worst_spectral = worst_spectral.max(lame.rel_l2_distance(&recon));
        }
        checks.push(Check::new(
            "peridynamics/decomposition_spectral",
            worst_spectral,
            1e-12,
        ));
        // quadrature route at sampled points: the composition identities
        // give L^s u = mu^s (scalar fractional laplacian, componentwise)
        // - ((2mu+lambda)^s - mu^s) grad^s(div^s u)
        let spec = QuadratureSpec::new(0.0, 1.4 * l, 10, 64, 1e-3)?;
        let s = 0.5;
        let cds = special::const_c(d2, s)?;
        let mut worst_quad = 0.0f64;
        let pts = [[4.2, 3.9, 0.0], [3.6, 4.4, 0.0]];
        for x in pts {
            let pv = quadrature::frac_lame_pv(&sampled, &x, s, &m, &spec)?;
            let lap = quadrature::sd_operator_raw(&sampled, &x, 2.0 * s, cds, 0.0, &spec)?;
            let gd = quadrature::nonlocal_grad_of_div(&sampled, &x, s, &spec)?;
            let mut diff = [0.0; 3];
            for c in 0..2 {
                let dec = m.mu().powf(s) * lap[c]
                    - (m.p_mod().powf(s) - m.mu().powf(s)) * gd[c];
                diff[c] = dec - pv[c];
            }
            worst_quad = worst_quad.max(norm(2, &diff) / norm(2, &pv).max(1e-6));
        }
        checks.push(Check::new("peridynamics/decomposition_quadrature", worst_quad, 2e-3));
    }
    // 5: state-based equivalence at 20 sampled points + literal mode
    {
        let spec = QuadratureSpec::new(0.0, 1.4 * l, 8, 48, 1e-3)?;
        let s = 0.5;
        let mut rng = SplitMix64::new(seed.wrapping_add(5));
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = [
                0.5 * l + rng.uniform(-1.2, 1.2),
                0.5 * l + rng.uniform(-1.2, 1.2),
                0.0,
            ];
            let sb = quadrature::state_based_apply(&sampled, &x, s, &m, &spec)?;
            let pv = quadrature::frac_lame_pv(&sampled, &x, s, &m, &spec)?;
            let mut diff = [0.0; 3];
            for c in 0..2 {
                diff[c] = sb[c] - pv[c];
            }
            worst = worst.max(norm(2, &diff) / norm(2, &pv).max(1e-6));
        }
        checks.push(Check::new("peridynamics/state_based_vs_operator", worst, 2e-3));
        // literal double-integral mode at coarse resolution, one point
        let coarse = QuadratureSpec::new(1e-4, 1.2 * l, 6, 24, 1e-2)?;
        let x = [0.5 * l + 0.4, 0.5 * l + 0.2, 0.0];
        let lit = quadrature::state_based_apply_literal(&sampled, &x, s, &m, &coarse)?;
        let red = quadrature::state_based_apply(&sampled, &x, s, &m, &spec)?;
        let mut diff = [0.0; 3];
        for c in 0..2 {
            diff[c] = lit[c] - red[c];
        }
        checks.push(Check::new(
            "peridynamics/literal_vs_reduced",
            norm(2, &diff) / norm(2, &red).max(1e-6),
            5e-2,
        ));
        // s = 1 reduction of the state-based constants
        let (mu, lambda) = (1.7f64, 0.9f64);
        let c2_at_1 = (2.0 * mu + lambda) - 3.0 * mu;
        let c2_formula = (2.0 * mu + lambda).powf(1.0) - 3.0 * mu.powf(1.0);
        checks.push(Check::new(
            "peridynamics/state_constants_classical_limit",
            (c2_at_1 - c2_formula).abs(),
            1e-14,
        ));
    }
    Ok(checks)
}

/// Criterion 12: the Dirichlet solver against the closed-form ball solution.
fn suite_dirichlet() -> Result<Vec<Check>> {
    use crate::dirichlet::{ball_profile_constant, solve_dirichlet, DomainMask};
    let mut checks = Vec::new();
    let d2 = Dimension::new(2)?;
    let grid = PeriodicGrid::new(d2, 64, 8.0)?;
    let s = 0.75;
    let radius = 2.0;
    let mu = 1.0f64;
    let m = ElasticModuli::new(mu, -mu)?;
    let mask = DomainMask::ball(grid, radius)?;
    let f = VectorField::from_fn(grid, |_| [1.0, 0.0, 0.0]);
    let (u, report) = solve_dirichlet(&mask, &f, s, &m)?;
    let np = grid.num_points();
    let c = 0.5 * grid.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for idx in 0..np {
        let x = grid.point(idx);
        let r = ((x[0] - c).powi(2) + (x[1] - c).powi(2)).sqrt();
        let exact = ball_profile_constant(d2, s, radius, r)? / mu.powf(s);
        num += (u.data()[idx] - exact).powi(2);
        den += exact * exact;
    }
    checks.push(Check::new("dirichlet/ball_vs_closed_form_l2", (num / den).sqrt(), 5e-2));
    checks.push(Check::new(
        "dirichlet/energy_identity",
        (report.energy - report.load_pairing).abs() / report.energy.abs().max(1e-300),
        1e-9,
    ));
    // f = 0 gives u = 0 exactly
    let zero = VectorField::zeros(grid);
    let (u0, _) = solve_dirichlet(&mask, &zero, s, &m)?;
    checks.push(Check::new(
        "dirichlet/zero_forcing_zero_solution",
        u0.data().iter().map(|v| v.abs()).fold(0.0, f64::max),
        0.0,
    ));
    checks.push(Check::new(
        "dirichlet/coercivity_floor_positive",
        if report.ritz_min > 0.0 { 0.0 } else { 1.0 },
        0.0,
    ));
    Ok(checks)
}
