//! Quadrature engines.
//!
//! Three rules cover everything in this crate:
//!
//! * Gauss–Hermite for smooth Gaussian expectations at small variance,
//! * Gauss–Legendre panels for smooth integrands on finite intervals,
//! * tanh–sinh (double exponential) for integrable endpoint singularities
//!   such as `x^α` at 0 or the peak of the arccosine-kernel integrand as
//!   the correlation approaches 1.
//!
//! Adaptive Simpson is kept as an independent cross-check route; the
//! library's closed forms and fixed-node rules are verified against it in
//! tests and in the CLI `verify` command.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Quadrature backend selector for the `V`/`W` transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussHermite,
    AdaptiveSimpson,
}

/// Node budget and scheme for transform evaluation.
///
/// `node_count` is the 1-D Gauss–Hermite size; 2-D tensor grids use
/// `node_count / 2` per axis. Error estimates come from node-count doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub node_count: usize,
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            node_count: 128,
            scheme: Scheme::GaussHermite,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::Config(format!(
                "node_count must be >= 8, got {}",
                self.node_count
            )));
        }
        Ok(())
    }
}

fn leak_cached(
    cache: &'static OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>>,
    n: usize,
    build: impl FnOnce(usize) -> (Vec<f64>, Vec<f64>),
) -> &'static (Vec<f64>, Vec<f64>) {
    let mut map = cache
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("quadrature cache poisoned");
    map.entry(n).or_insert_with(|| Box::leak(Box::new(build(n))))
}

/// Nodes and weights for `∫ e^{−x²} f(x) dx ≈ Σ wᵢ f(xᵢ)`.
pub fn gauss_hermite(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    leak_cached(&CACHE, n, hermite_nodes)
}

/// Nodes and weights for `∫_{−1}^{1} f(x) dx ≈ Σ wᵢ f(xᵢ)`.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    leak_cached(&CACHE, n, legendre_nodes)
}

// Newton iteration on the orthonormal Hermite recurrence; initial guesses
// follow the classic gauher scheme.
fn hermite_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let pim4 = 0.751_125_544_464_943; // pi^{-1/4}
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    (nodes, weights)
}

/// `∫_a^b f` by an n-node Gauss–Legendre panel.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (&xi, &wi) in x.iter().zip(w.iter()) {
        sum += wi * f(mid + half * xi);
    }
    sum * half
}

/// Recursive adaptive Simpson with Richardson error control. Returns the
/// integral and an error estimate.
pub fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> (f64, f64) {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return (left + right + delta / 15.0, delta.abs() / 15.0);
        }
        let (lv, le) = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        let (rv, re) = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        (lv + rv, le + re)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// tanh–sinh rule on `(a, b)` with level doubling until the change is below
/// `tol`. Handles integrable endpoint singularities. Returns the value and
/// the last level-to-level change as the error estimate.
///
/// Node positions near the endpoints are computed from their stable offset
/// `(b−a)·σ(2u)` rather than `mid + half·tanh(u)`, which would cancel to a
/// handful of significant bits exactly where singular integrands need the
/// most precision.
pub fn tanh_sinh(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_level: u32) -> (f64, f64) {
    let width = b - a;
    let half = 0.5 * width;
    let t_max = 3.8_f64;
    let mut prev = f64::NAN;
    let mut cur = f64::NAN;
    let mut err = f64::INFINITY;
    for level in 2..=max_level {
        let n = 1_u64 << level;
        let h = t_max / n as f64;
        let mut sum = 0.0;
        for k in -(n as i64)..=(n as i64) {
            let t = k as f64 * h;
            let u = 0.5 * std::f64::consts::PI * t.sinh();
            // logistic form of (1 + tanh u)/2: distance from the lower
            // endpoint as a fraction of the interval
            let x = if u <= 0.0 {
                let e = (2.0 * u).exp();
                a + width * e / (1.0 + e)
            } else {
                let e = (-2.0 * u).exp();
                b - width * e / (1.0 + e)
            };
            let du = u.cosh();
            let w = half * 0.5 * std::f64::consts::PI * t.cosh() / (du * du);
            if x <= a || x >= b || w == 0.0 || !w.is_finite() {
                continue;
            }
            sum += w * f(x);
        }
        cur = sum * h;
        if !prev.is_nan() {
            err = (cur - prev).abs();
            if err < tol * cur.abs().max(1.0) {
                return (cur, err);
            }
        }
        prev = cur;
    }
    (cur, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hermite_integrates_monomials() {
        // ∫ e^{-x²} dx = √π, ∫ x² e^{-x²} dx = √π/2, ∫ x⁸ e^{-x²} = 105√π/16
        let (x, w) = gauss_hermite(128);
        let total: f64 = w.iter().sum();
        assert!((total - PI.sqrt()).abs() < 1e-13);
        let m2: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi * xi).sum();
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
        let m8: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((m8 - 105.0 * PI.sqrt() / 16.0).abs() < 1e-11);
    }

    #[test]
    fn legendre_integrates_polynomials_and_cos() {
        let got = integrate_gl(|x| x * x, 0.0, 1.0, 64);
        assert!((got - 1.0 / 3.0).abs() < 1e-14);
        let got = integrate_gl(f64::cos, 0.0, PI / 2.0, 64);
        assert!((got - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_matches_known_integral() {
        let (v, e) = adaptive_simpson(&|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-12, 40);
        assert!((v - PI.sqrt()).abs() < 1e-10, "v={v} err={e}");
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let (v, _) = tanh_sinh(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-13, 10);
        assert!((v - 2.0).abs() < 1e-11, "v={v}");
        // ∫_0^1 ln(x) dx = -1
        let (v, _) = tanh_sinh(&|x: f64| x.ln(), 0.0, 1.0, 1e-13, 10);
        assert!((v + 1.0).abs() < 1e-11, "v={v}");
    }

    #[test]
    fn spec_rejects_tiny_node_count() {
        let spec = QuadratureSpec {
            node_count: 4,
            scheme: Scheme::GaussHermite,
        };
        assert!(spec.validate().is_err());
    }
}
