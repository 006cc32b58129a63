#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rhsolve::boundary::{BoundaryGrid, BoundaryTrace};
use rhsolve::curves::{builtin_ellipse_family, CurveFamily, TrigPoly};
use rhsolve::newton::NewtonProblem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random trigonometric polynomial of the given degree bounded below by `floor`.
pub fn positive_trig_poly(rng: &mut ChaCha8Rng, degree: usize, mean: f64, floor: f64) -> TrigPoly {
    loop {
        let cos = (1..=degree).map(|k| rng.gen_range(-0.4..0.4) / k as f64).collect();
        let sin = (1..=degree).map(|k| rng.gen_range(-0.4..0.4) / k as f64).collect();
        let p = TrigPoly::new(mean, cos, sin);
        if p.sampled_min(1024).1 > floor {
            return p;
        }
    }
}

/// Ellipse family with `theta`-dependent axes and rotation whose largest aspect ratio is about `aspect`.
pub fn random_ellipse(rng: &mut ChaCha8Rng, aspect: f64) -> CurveFamily {
    let h = 0.45 * (aspect - 1.0);
    let (d, b, f0): (f64, f64, f64) = (rng.gen_range(0.0..6.3), rng.gen_range(0.0..6.3), rng.gen_range(-0.5..0.5));
    let p = TrigPoly::new(0.9 * (1.0 + h), vec![0.9 * h * d.cos()], vec![0.9 * h * d.sin()]);
    let q = TrigPoly::new(1.0, vec![0.1 * b.sin()], vec![0.1 * b.cos()]);
    let phi = TrigPoly::new(f0, vec![0.0], vec![0.3]);
    builtin_ellipse_family(p, q, phi).unwrap()
}

/// Random band-limited real trace of degree `degree`.
pub fn band_limited_real(rng: &mut ChaCha8Rng, grid: BoundaryGrid, degree: usize) -> BoundaryTrace {
    let modes: Vec<(f64, f64)> = (0..=degree).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    BoundaryTrace::from_real_fn(grid, |t| {
        modes.iter().enumerate().map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin()).sum()
    })
    .unwrap()
}

/// Random boundary values of a polynomial of degree `degree` with coefficients of size `scale`.
pub fn band_limited_holomorphic(rng: &mut ChaCha8Rng, grid: BoundaryGrid, degree: usize, scale: f64) -> BoundaryTrace {
    let c: Vec<Complex64> = (0..=degree)
        .map(|_| scale * Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    BoundaryTrace::from_fn(grid, |t| c.iter().enumerate().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * t)).sum())
        .unwrap()
}

/// Empirical order `log(r_K / r_{K-1}) / log(r_{K-1} / r_{K-2})` over the last
/// three residuals above a roundoff floor.
pub fn convergence_order(history: &[f64], floor: f64) -> Option<f64> {
    let mut h = history.to_vec();
    while h.len() > 3 && *h.last().unwrap() < floor {
        h.pop();
    }
    if h.len() < 3 {
        return None;
    }
    let k = h.len();
    Some((h[k - 1] / h[k - 2]).ln() / (h[k - 2] / h[k - 3]).ln())
}

/// Least-squares line through `(x, y)`: slope, intercept and `R^2`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx, sxy * sxy / (sxx * syy))
}

/// `A(x) = x^2 - c` on the reals with `B(x) g = g / (2x)`.
pub struct Quadratic(pub f64);

impl NewtonProblem for Quadratic {
    type Point = f64;
    type Residual = f64;

    fn residual(&self, x: &f64) -> rhsolve::Result<f64> {
        Ok(x * x - self.0)
    }

    fn apply_right_inverse(&self, x: &f64, g: &f64) -> rhsolve::Result<f64> {
        Ok(g / (2.0 * x))
    }

    fn apply_derivative(&self, x: &f64, v: &f64) -> rhsolve::Result<f64> {
        Ok(2.0 * x * v)
    }

    fn point_norm(&self, x: &f64) -> f64 {
        x.abs()
    }

    fn residual_norm(&self, r: &f64) -> f64 {
        r.abs()
    }

    fn point_axpy(&self, x: &f64, t: f64, dx: &f64) -> f64 {
        x + t * dx
    }

    fn residual_axpy(&self, r: &f64, t: f64, s: &f64) -> f64 {
        r + t * s
    }

    fn sample_residual(&self, rng: &mut ChaCha8Rng) -> f64 {
        if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(-1.0..1.0)
    }
}
