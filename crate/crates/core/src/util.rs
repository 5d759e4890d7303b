//! Small numeric helpers: fixed-size vector algebra for d <= 3, deterministic
//! reductions, a seedable PRNG for reproducible test fields, and finite
//! difference weights on arbitrary nodes.

/// Positions and vectors are carried as `[f64; 3]`; only the first `d`
/// components are meaningful.
pub type Vec3 = [f64; 3];

pub fn dot(d: usize, a: &Vec3, b: &Vec3) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        s += a[i] * b[i];
    }
    s
}

pub fn norm(d: usize, a: &Vec3) -> f64 {
    dot(d, a, a).sqrt()
}

pub fn scale(d: usize, a: &Vec3, c: f64) -> Vec3 {
    let mut r = [0.0; 3];
    for i in 0..d {
        r[i] = c * a[i];
    }
    r
}

pub fn add(d: usize, a: &Vec3, b: &Vec3) -> Vec3 {
    let mut r = [0.0; 3];
    for i in 0..d {
        r[i] = a[i] + b[i];
    }
    r
}

pub fn sub(d: usize, a: &Vec3, b: &Vec3) -> Vec3 {
    let mut r = [0.0; 3];
    for i in 0..d {
        r[i] = a[i] - b[i];
    }
    r
}

/// Kahan-compensated sum in a fixed left-to-right order. Used wherever a
/// reduction must be bit-reproducible across thread counts: parallel stages
/// write indexed partials, the final sum happens here sequentially.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// SplitMix64: tiny deterministic PRNG for reproducible random fields.
/// State evolution is independent of platform and thread count.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Finite difference weights on arbitrarily spaced nodes (Fornberg's
/// recursion). Returns weights `w` such that `sum w[i] f(x[i])` approximates
/// the `m`-th derivative of `f` at `x0`.
pub fn fd_weights(x0: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > m, "need more nodes than the derivative order");
    // c[k][j]: weight of node j for the k-th derivative
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c[m].clone()
}

/// Least-squares fit of `y ~ a + b * g(x)`; returns (a, b).
pub fn fit_affine(xs: &[f64], ys: &[f64], g: impl Fn(f64) -> f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mut sg, mut sgg, mut sy, mut sgy) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let gx = g(x);
        sg += gx;
        sgg += gx * gx;
        sy += y;
        sgy += gx * y;
    }
    let det = n * sgg - sg * sg;
    if det.abs() < 1e-300 {
        return (sy / n, 0.0);
    }
    let a = (sgg * sy - sg * sgy) / det;
    let b = (n * sgy - sg * sy) / det;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_weights_reproduce_classical_stencils() {
        // second derivative on uniform nodes -> [1, -2, 1] / h^2
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] + 2.0).abs() < 1e-12);
        assert!((w[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fd_weights_nonuniform_exact_on_polynomials() {
        let nodes = [0.1, 0.17, 0.4, 0.55, 0.9];
        let x0 = 0.4;
        let w = fd_weights(x0, &nodes, 1);
        // exact for cubics
        let f = |x: f64| 1.0 + 2.0 * x - x.powi(2) + 0.5 * x.powi(3);
        let df = |x: f64| 2.0 - 2.0 * x + 1.5 * x.powi(2);
        let approx: f64 = nodes.iter().zip(&w).map(|(&x, &wi)| wi * f(x)).sum();
        assert!((approx - df(x0)).abs() < 1e-9);
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
