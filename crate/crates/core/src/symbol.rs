//! Per-frequency matrix algebra for the operator family.
//!
//! Every symbol produced here is a real symmetric d x d matrix of the
//! isotropic form  alpha I + beta xihat (x) xihat : the multiplier matrix
//! M(xi), its powers, inverse powers, heat and Poisson profiles, resolvent,
//! and the classical half-space Dirichlet-to-Neumann symbol. All are computed
//! in the eigenbasis {xihat} + {xihat}^perp, as scalar functions of the two
//! eigenvalues, so the matrix structure is exact.
//!
//! Frequencies follow the transform convention with kernel e^{-2 pi i x.xi},
//! so a frequency vector xi carries cycles per unit length and the scalar
//! multiplier of the (negative) Laplacian is (2 pi |xi|)^2.

use crate::error::{Error, Result};
use crate::special::bessel_k_cal;
use crate::util::{dot, Vec3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lame moduli (mu, lambda) with the rank-one ellipticity conditions
/// mu > 0 and 2 mu + lambda > 0 enforced at construction.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModuliRaw", into = "ModuliRaw")]
pub struct ElasticModuli {
    mu: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct ModuliRaw {
    mu: f64,
    lambda: f64,
}

impl TryFrom<ModuliRaw> for ElasticModuli {
    type Error = Error;
    fn try_from(r: ModuliRaw) -> Result<Self> {
        ElasticModuli::new(r.mu, r.lambda)
    }
}

impl From<ElasticModuli> for ModuliRaw {
    fn from(m: ElasticModuli) -> Self {
        ModuliRaw { mu: m.mu, lambda: m.lambda }
    }
}

impl ElasticModuli {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && 2.0 * mu + lambda > 0.0) {
            return Err(Error::domain(format!(
                "ellipticity requires mu > 0 and 2 mu + lambda > 0, got mu={mu}, lambda={lambda}"
            )));
        }
        Ok(ElasticModuli { mu, lambda })
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The longitudinal modulus 2 mu + lambda.
    #[inline]
    pub fn p_mod(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }
}

/// A real symmetric d x d matrix attached to a frequency. For xi != 0 its
/// eigenvectors are xi/|xi| and its orthogonal complement.
#[derive(Copy, Clone, Debug)]
pub struct SymbolMatrix {
    d: usize,
    m: [[f64; 3]; 3],
}

impl SymbolMatrix {
    /// alpha I + beta xihat (x) xihat. For xi = 0 the projector part is
    /// dropped (beta must then be 0 by the caller's convention).
    pub fn isotropic(d: usize, xi: &Vec3, alpha: f64, beta: f64) -> Self {
        let mut m = [[0.0; 3]; 3];
        let n2 = dot(d, xi, xi);
        for i in 0..d {
            m[i][i] = alpha;
        }
        if n2 > 0.0 && beta != 0.0 {
            for i in 0..d {
                for j in 0..d {
                    // product ordered so symmetry is bitwise exact
                    m[i][j] += beta * (xi[i] * xi[j] / n2);
                }
            }
        }
        SymbolMatrix { d, m }
    }

    pub fn zero(d: usize) -> Self {
        SymbolMatrix { d, m: [[0.0; 3]; 3] }
    }

    pub fn identity(d: usize) -> Self {
        Self::isotropic(d, &[0.0; 3], 1.0, 0.0)
    }

    pub fn scaled_identity(d: usize, alpha: f64) -> Self {
        Self::isotropic(d, &[0.0; 3], alpha, 0.0)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn entries(&self) -> [[f64; 3]; 3] {
        self.m
    }

    /// Rebuild from raw entries (symmetry is the caller's responsibility).
    pub fn from_entries(d: usize, m: [[f64; 3]; 3]) -> Self {
        SymbolMatrix { d, m }
    }

    /// Matrix-vector product on the first d components.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut r = [0.0; 3];
        for i in 0..self.d {
            for j in 0..self.d {
                r[i] += self.m[i][j] * v[j];
            }
        }
        r
    }

    /// Apply to a complex vector held as (re, im) pair.
    pub fn apply_complex(&self, re: &Vec3, im: &Vec3) -> (Vec3, Vec3) {
        (self.apply(re), self.apply(im))
    }

    pub fn matmul(&self, other: &SymbolMatrix) -> SymbolMatrix {
        debug_assert_eq!(self.d, other.d);
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.d {
            for j in 0..self.d {
                let mut s = 0.0;
                for k in 0..self.d {
                    s += self.m[i][k] * other.m[k][j];
                }
                m[i][j] = s;
            }
        }
        SymbolMatrix { d: self.d, m }
    }

    pub fn sub(&self, other: &SymbolMatrix) -> SymbolMatrix {
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.d {
            for j in 0..self.d {
                m[i][j] = self.m[i][j] - other.m[i][j];
            }
        }
        SymbolMatrix { d: self.d, m }
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                s += self.m[i][j] * self.m[i][j];
            }
        }
        s.sqrt()
    }

    /// Largest symmetry defect |m_ij - m_ji|.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.d {
            for j in 0..self.d {
                worst = worst.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        worst
    }
}

/// Eigenvalues (longitudinal along xi, transverse) of the power-family
/// symbols at |xi|.
fn power_eigs(xi_norm: f64, s: f64, m: &ElasticModuli) -> (f64, f64) {
    let w = (2.0 * PI * xi_norm).powf(2.0 * s);
    (m.p_mod().powf(s) * w, m.mu().powf(s) * w)
}

/// M(xi) = mu (2 pi |xi|)^2 I + (mu + lambda)(2 pi)^2 xi (x) xi.
pub fn lame_symbol(d: usize, xi: &Vec3, m: &ElasticModuli) -> SymbolMatrix {
    let n2 = dot(d, xi, xi);
    let w = (2.0 * PI) * (2.0 * PI) * n2;
    SymbolMatrix::isotropic(d, xi, m.mu() * w, (m.mu() + m.lambda()) * w)
}

/// M^s(xi) for s in (-d/2, 1]\{0} (s = 1 reproduces M exactly). At xi = 0:
/// the zero matrix for s > 0, an error for s <= 0.
pub fn lame_symbol_power(d: usize, xi: &Vec3, s: f64, m: &ElasticModuli) -> Result<SymbolMatrix> {
    if !(s > -0.5 * d as f64 && s <= 1.0) || s == 0.0 {
        return Err(Error::domain(format!(
            "symbol power must lie in (-d/2, 1] and be nonzero, got {s}"
        )));
    }
    let n = dot(d, xi, xi).sqrt();
    if n == 0.0 {
        if s > 0.0 {
            return Ok(SymbolMatrix::zero(d));
        }
        return Err(Error::singular("negative symbol power at xi = 0"));
    }
    let (lon, tra) = power_eigs(n, s, m);
    Ok(SymbolMatrix::isotropic(d, xi, tra, lon - tra))
}

/// [M^s(xi)]^{-1} for s in (0, d/2); xi must be nonzero.
pub fn lame_symbol_inverse_power(
    d: usize,
    xi: &Vec3,
    s: f64,
    m: &ElasticModuli,
) -> Result<SymbolMatrix> {
    if !(s > 0.0 && s < 0.5 * d as f64) {
        return Err(Error::domain(format!(
            "inverse symbol power needs s in (0, d/2), got {s}"
        )));
    }
    let n = dot(d, xi, xi).sqrt();
    if n == 0.0 {
        return Err(Error::singular("inverse symbol power at xi = 0"));
    }
    let (lon, tra) = power_eigs(n, s, m);
    Ok(SymbolMatrix::isotropic(d, xi, 1.0 / tra, 1.0 / lon - 1.0 / tra))
}

/// e^{-t M(xi)}; identity at xi = 0.
pub fn heat_symbol(d: usize, xi: &Vec3, t: f64, m: &ElasticModuli) -> Result<SymbolMatrix> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("heat symbol needs t > 0, got {t}")));
    }
    let n2 = dot(d, xi, xi);
    if n2 == 0.0 {
        return Ok(SymbolMatrix::identity(d));
    }
    let w = 4.0 * PI * PI * n2 * t;
    let tra = (-m.mu() * w).exp();
    let lon = (-m.p_mod() * w).exp();
    Ok(SymbolMatrix::isotropic(d, xi, tra, lon - tra))
}

/// Poisson symbol Kcal_s(2 pi sqrt(mu) |xi| t) I + (...) projector part;
/// identity at xi = 0.
pub fn poisson_symbol(d: usize, xi: &Vec3, t: f64, s: f64, m: &ElasticModuli) -> Result<SymbolMatrix> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("poisson symbol needs t > 0, got {t}")));
    }
    let n = dot(d, xi, xi).sqrt();
    if n == 0.0 {
        return Ok(SymbolMatrix::identity(d));
    }
    let tra = bessel_k_cal(s, 2.0 * PI * m.mu().sqrt() * n * t)?;
    let lon = bessel_k_cal(s, 2.0 * PI * m.p_mod().sqrt() * n * t)?;
    Ok(SymbolMatrix::isotropic(d, xi, tra, lon - tra))
}

/// (M^s(xi) + q I)^{-1}; equals q^{-1} I at xi = 0.
pub fn resolvent_symbol(
    d: usize,
    xi: &Vec3,
    s: f64,
    q: f64,
    m: &ElasticModuli,
) -> Result<SymbolMatrix> {
    if !(q > 0.0) {
        return Err(Error::domain(format!("resolvent needs q > 0, got {q}")));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::domain(format!("resolvent symbol power must lie in (0,1], got {s}")));
    }
    let n = dot(d, xi, xi).sqrt();
    if n == 0.0 {
        return Ok(SymbolMatrix::scaled_identity(d, 1.0 / q));
    }
    let (lon, tra) = power_eigs(n, s, m);
    let tra_r = 1.0 / (tra + q);
    let lon_r = 1.0 / (lon + q);
    Ok(SymbolMatrix::isotropic(d, xi, tra_r, lon_r - tra_r))
}

/// Symbol of the first d components of the half-space Dirichlet-to-Neumann
/// map for the classical system with moduli (mu~, lambda~): eigenvalues
/// mu~ (2 pi |xi|) transverse and 2 mu~ (2 mu~ + lambda~)/(3 mu~ + lambda~)
/// (2 pi |xi|) longitudinal. Coincides with M^{1/2} under the modulus map
/// mu = mu~^2, 2 mu + lambda = (2 mu~ (2 mu~+lambda~)/(3 mu~+lambda~))^2.
pub fn dtn_halfspace_symbol(d: usize, xi: &Vec3, m_tilde: &ElasticModuli) -> Result<SymbolMatrix> {
    let n = dot(d, xi, xi).sqrt();
    if n == 0.0 {
        return Err(Error::singular("half-space DtN symbol at xi = 0"));
    }
    let w = 2.0 * PI * n;
    let tra = m_tilde.mu() * w;
    let lon = 2.0 * m_tilde.mu() * m_tilde.p_mod() / (3.0 * m_tilde.mu() + m_tilde.lambda()) * w;
    Ok(SymbolMatrix::isotropic(d, xi, tra, lon - tra))
}

/// Moduli (mu, lambda) for which M^{1/2} coincides with the half-space DtN
/// symbol of (mu~, lambda~).
pub fn dtn_equivalent_moduli(m_tilde: &ElasticModuli) -> Result<ElasticModuli> {
    let mu = m_tilde.mu() * m_tilde.mu();
    let lon = 2.0 * m_tilde.mu() * m_tilde.p_mod() / (3.0 * m_tilde.mu() + m_tilde.lambda());
    ElasticModuli::new(mu, lon * lon - 2.0 * mu)
}
