//! Families of Jordan curves `{gamma_theta}` given by real defining functions
//! `rho(theta, w)`, with the Wirtinger calculus the solvers need.

mod builtin;
mod config;
mod divisor;
mod eta;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use builtin::{builtin_circle_family, builtin_circle_family_complex, builtin_ellipse_family};
pub use config::{FamilySpec, FourierSpec};
pub use divisor::divisor_transform;
pub use eta::{curvature_floor_check, eta_decompose, CurvatureReport, EtaDecomposition};

/// Real trigonometric polynomial `c0 + sum_k a_k cos(k theta) + b_k sin(k theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub c0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(c0: f64) -> Self {
        Self { c0, cos: Vec::new(), sin: Vec::new() }
    }

    pub fn new(c0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        Self { c0, cos, sin }
    }

    /// Parses the flat list `[c0, a1, b1, a2, b2, ...]`.
    pub fn from_flat(list: &[f64]) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::InvalidInput("empty Fourier coefficient list".into()));
        }
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        for (i, &v) in list[1..].iter().enumerate() {
            if i % 2 == 0 {
                cos.push(v);
            } else {
                sin.push(v);
            }
        }
        sin.resize(cos.len(), 0.0);
        Ok(Self { c0: list[0], cos, sin })
    }

    /// Trigonometric polynomial of the given degree interpolating `f` at
    /// equispaced nodes.
    pub fn fit(f: impl Fn(f64) -> f64, degree: usize) -> Self {
        let n = (2 * degree + 2).next_power_of_two().max(16);
        let samples: Vec<f64> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
        let c = crate::boundary::spectral::forward_real(&samples);
        let cos = (1..=degree).map(|k| 2.0 * c[k].re).collect();
        let sin = (1..=degree).map(|k| -2.0 * c[k].im).collect();
        Self { c0: c[0].re, cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.c0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kt = (k + 1) as f64 * theta;
            v += a * kt.cos() + b * kt.sin();
        }
        v
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        let mut v = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let m = (k + 1) as f64;
            let kt = m * theta;
            v += m * (b * kt.cos() - a * kt.sin());
        }
        v
    }

    /// Lower bound of the polynomial sampled on a fine grid.
    pub fn sampled_min(&self, samples: usize) -> (f64, f64) {
        (0..samples)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / samples as f64;
                (t, self.eval(t))
            })
            .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }
}

/// Broad classification of a family, used for dispatch and reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Circle { center_re: TrigPoly, center_im: TrigPoly, radius: TrigPoly },
    Ellipse,
    Transformed,
    Reflected,
}

/// Closed-form evaluators of a defining function `rho(theta, w)`.
///
/// `d_w` is the Wirtinger derivative `(d_x - i d_y)/2` in `w`; since `rho` is
/// real, `d_wbar` is its conjugate.
pub trait DefiningFunction: Send + Sync {
    fn rho(&self, theta: f64, w: Complex64) -> f64;
    fn d_w(&self, theta: f64, w: Complex64) -> Complex64;
    fn d_wbar(&self, theta: f64, w: Complex64) -> Complex64 {
        self.d_w(theta, w).conj()
    }
    fn d_theta(&self, theta: f64, w: Complex64) -> f64;

    /// Radius at which the ray of angle `direction` meets `gamma_theta`.
    fn reference_radius(&self, theta: f64, direction: f64) -> Result<f64> {
        ray_bisection(self, theta, direction)
    }

    fn kind(&self) -> FamilyKind;
}

fn ray_bisection<D: DefiningFunction + ?Sized>(d: &D, theta: f64, direction: f64) -> Result<f64> {
    let dir = Complex64::from_polar(1.0, direction);
    if d.rho(theta, Complex64::new(0.0, 0.0)) >= 0.0 {
        return Err(Error::ZeroNotEnclosed { theta });
    }
    let mut hi = 1.0;
    let mut tries = 0;
    while d.rho(theta, dir * hi) <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::ZeroNotEnclosed { theta });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d.rho(theta, dir * mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Shared handle to a defining function; cheap to clone and safe to share
/// between threads.
#[derive(Clone)]
pub struct CurveFamily(Arc<dyn DefiningFunction>);

impl fmt::Debug for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("CurveFamily").field(&self.0.kind()).finish()
    }
}

impl CurveFamily {
    pub fn new(d: impl DefiningFunction + 'static) -> Self {
        Self(Arc::new(d))
    }

    pub fn rho(&self, theta: f64, w: Complex64) -> f64 {
        self.0.rho(theta, w)
    }

    pub fn d_w(&self, theta: f64, w: Complex64) -> Complex64 {
        self.0.d_w(theta, w)
    }

    pub fn d_wbar(&self, theta: f64, w: Complex64) -> Complex64 {
        self.0.d_wbar(theta, w)
    }

    pub fn d_theta(&self, theta: f64, w: Complex64) -> f64 {
        self.0.d_theta(theta, w)
    }

    pub fn reference_radius(&self, theta: f64, direction: f64) -> Result<f64> {
        self.0.reference_radius(theta, direction)
    }

    pub fn kind(&self) -> FamilyKind {
        self.0.kind()
    }

    /// `R(theta)` when the family is `|w| = R(theta)`.
    pub fn radial_profile(&self) -> Option<TrigPoly> {
        match self.0.kind() {
            FamilyKind::Circle { center_re, center_im, radius } => {
                let centered = center_re.is_constant()
                    && center_re.c0 == 0.0
                    && center_im.is_constant()
                    && center_im.c0 == 0.0;
                centered.then_some(radius)
            }
            _ => None,
        }
    }

    /// Family with the parameter reversed: `rho_hat(tau, w) = rho(-tau, w)`.
    pub fn reflected(&self) -> CurveFamily {
        CurveFamily::new(builtin::Reflected(self.clone()))
    }

    /// Residual trace `rho(theta_j, w_j)` along a boundary trace.
    pub fn residuals(&self, trace: &crate::boundary::BoundaryTrace) -> Vec<f64> {
        let grid = trace.grid();
        trace.values().iter().enumerate().map(|(j, &w)| self.rho(grid.node(j), w)).collect()
    }

    /// Sampled `C^2` size of `rho` on `[0, 2 pi] x {|w| <= radius}`: the largest
    /// of `|rho|`, its first partials and its second partials, the latter by
    /// central differences of the closed-form first derivatives.
    pub fn sampled_c2_norm(&self, radius: f64, samples: usize) -> f64 {
        let h = 1e-5;
        let mut best = 0.0f64;
        let rings = 8;
        for i in 0..samples {
            let theta = 2.0 * PI * i as f64 / samples as f64;
            for ring in 0..=rings {
                let r = radius * ring as f64 / rings as f64;
                for s in 0..samples {
                    let w = Complex64::from_polar(r, 2.0 * PI * s as f64 / samples as f64);
                    let grad = |t: f64, w: Complex64| {
                        let dw = self.d_w(t, w);
                        [self.d_theta(t, w), 2.0 * dw.re, -2.0 * dw.im]
                    };
                    let g0 = grad(theta, w);
                    let first = g0.iter().fold(self.rho(theta, w).abs(), |m, v| m.max(v.abs()));
                    let dirs = [(h, Complex64::new(0.0, 0.0)), (0.0, Complex64::new(h, 0.0)), (0.0, Complex64::new(0.0, h))];
                    let mut second = 0.0f64;
                    for (dt, dz) in dirs {
                        let gp = grad(theta + dt, w + dz);
                        let gm = grad(theta - dt, w - dz);
                        for c in 0..3 {
                            second = second.max(((gp[c] - gm[c]) / (2.0 * h)).abs());
                        }
                    }
                    best = best.max(first).max(second);
                }
            }
        }
        best
    }
}
