use num_complex::Complex64;

use super::quadrature::GaussLegendre;
use crate::boundary::spectral;

/// `C^infinity` step `S` on `[0, 1]`, `S(0) = 0`, `S(1) = 1`, flat at both ends.
pub fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

pub fn smoothstep_derivative(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / ((a + b) * (a + b))
}

/// Radial cutoff on `A(q,1)` switching over `t = ln|z| / ln q` in `[t_start, t_end]`.
///
/// The outer cutoff equals 1 near `|z| = 1` and vanishes for `t >= t_end`; the
/// inner one equals 1 near `|z| = q` and vanishes for `t <= t_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub q: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub outer: bool,
}

impl Cutoff {
    fn x(&self, r: f64) -> f64 {
        (r.ln() / self.q.ln() - self.t_start) / (self.t_end - self.t_start)
    }

    pub fn value(&self, r: f64) -> f64 {
        let s = smoothstep(self.x(r));
        if self.outer {
            1.0 - s
        } else {
            s
        }
    }

    /// `d chi / dr`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        let d = smoothstep_derivative(self.x(r)) / ((self.t_end - self.t_start) * r * self.q.ln());
        if self.outer {
            -d
        } else {
            d
        }
    }

    /// `dbar chi = chi'(r) e^{i theta} / 2`.
    pub fn dbar(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        z / r * (0.5 * self.radial_derivative(r))
    }

    /// Radial interval carrying the transition.
    pub fn band(&self) -> (f64, f64) {
        (self.q.powf(self.t_end), self.q.powf(self.t_start))
    }
}

/// `T0 phi(z) = -(1/pi) int phi(zeta) / (zeta - z) dA(zeta)` for densities
/// supported on radial bands, evaluated mode by mode in the angle.
///
/// The angular integral is done exactly on the Fourier modes of the sampled
/// density; the radial one by Gauss–Legendre on each band.
#[derive(Debug, Clone)]
pub struct PompeiuOperator {
    pub bands: Vec<(f64, f64)>,
    pub angular: usize,
    pub panels: usize,
    rule: GaussLegendre,
}

/// Density sampler: values of `phi` on the circle of radius `r` at `m` equispaced angles.
pub type Density<'a> = dyn Fn(f64, usize) -> Vec<Complex64> + 'a;

impl PompeiuOperator {
    pub fn new(bands: Vec<(f64, f64)>, angular: usize, radial_order: usize, panels: usize) -> Self {
        Self { bands, angular, panels, rule: GaussLegendre::new(radial_order) }
    }

    /// Radial nodes and weights on `[a, b]`.
    pub fn radial_nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.rule.on_interval(a, b, self.panels)
    }

    fn modes(&self, density: &Density, r: f64) -> Vec<(i64, Complex64)> {
        let m = self.angular;
        let c = spectral::forward(&density(r, m));
        (0..m).map(|j| (spectral::mode_of(j, m), c[j])).collect()
    }

    /// Values of `T0 phi` on `|z| = 1` and on `|z| = q` at `n` equispaced nodes.
    /// The bands must lie strictly inside `q < |z| < 1`.
    pub fn boundary_traces(&self, density: &Density, q: f64, n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let zero = Complex64::new(0.0, 0.0);
        let mut outer = vec![zero; n];
        let mut inner = vec![zero; n];
        let half = (n / 2) as i64;
        for &(a, b) in &self.bands {
            for (r, w) in self.radial_nodes(a, b) {
                for (k, c) in self.modes(density, r) {
                    let mode = k - 1;
                    if mode <= -half || mode >= half {
                        continue;
                    }
                    let slot = spectral::slot_of(mode, n);
                    if k <= 0 {
                        outer[slot] += 2.0 * w * c * r.powi((1 - k) as i32);
                    } else {
                        inner[slot] -= 2.0 * w * c * (q / r).powi((k - 1) as i32);
                    }
                }
            }
        }
        (spectral::inverse(&outer), spectral::inverse(&inner))
    }

    /// `T0 phi(z)` at an arbitrary point of the annulus.
    pub fn eval(&self, density: &Density, z: Complex64) -> Complex64 {
        let r = z.norm();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, b) in &self.bands {
            let split = r.clamp(a, b);
            if split > a {
                for (rho, w) in self.radial_nodes(a, split) {
                    let ratio = rho / z;
                    for (k, c) in self.modes(density, rho) {
                        if k <= 0 {
                            acc += 2.0 * w * c * ratio.powi((1 - k) as i32);
                        }
                    }
                }
            }
            if split < b {
                for (rho, w) in self.radial_nodes(split, b) {
                    let ratio = z / rho;
                    for (k, c) in self.modes(density, rho) {
                        if k >= 1 {
                            acc -= 2.0 * w * c * ratio.powi((k - 1) as i32);
                        }
                    }
                }
            }
        }
        acc
    }
}

/// `dbar u` at `z` by central differences of step `h`.
pub fn dbar_fd(u: impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
    let dx = (u(z + h) - u(z - h)) / (2.0 * h);
    let dy = (u(z + Complex64::new(0.0, h)) - u(z - Complex64::new(0.0, h))) / (2.0 * h);
    0.5 * (dx + Complex64::i() * dy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn angles(m: usize) -> impl Iterator<Item = f64> {
        (0..m).map(move |j| 2.0 * PI * j as f64 / m as f64)
    }

    #[test]
    fn cutoffs_switch_on_their_bands() {
        let q = 0.5;
        let c0 = Cutoff { q, t_start: 0.25, t_end: 1.0 / 3.0, outer: true };
        let c1 = Cutoff { q, t_start: 2.0 / 3.0, t_end: 0.75, outer: false };
        assert_eq!(c0.value(1.0), 1.0);
        assert_eq!(c0.value(q.powf(0.4)), 0.0);
        assert_eq!(c1.value(q), 1.0);
        assert_eq!(c1.value(q.powf(0.6)), 0.0);
        let (a, b) = c0.band();
        assert!((a - q.powf(1.0 / 3.0)).abs() < 1e-15 && (b - q.powf(0.25)).abs() < 1e-15);
        for k in 1..10 {
            let r = a + (b - a) * k as f64 / 10.0;
            let fd = (c0.value(r + 1e-7) - c0.value(r - 1e-7)) / 2e-7;
            assert!((fd - c0.radial_derivative(r)).abs() < 1e-5 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn constant_density_on_a_band() {
        let (a, b) = (0.6, 0.8);
        let op = PompeiuOperator::new(vec![(a, b)], 16, 32, 1);
        let one = |_r: f64, m: usize| vec![Complex64::new(1.0, 0.0); m];
        for z in [Complex64::from_polar(0.7, 0.3), Complex64::from_polar(0.95, 2.0), Complex64::from_polar(0.5, -1.0)] {
            let r = z.norm().clamp(a, b);
            let exact = (r * r - a * a) / z;
            assert!((op.eval(&one, z) - exact).norm() < 1e-14);
            let d = dbar_fd(|w| op.eval(&one, w), z, 1e-4);
            let inside = z.norm() > a && z.norm() < b;
            assert!((d - if inside { 1.0 } else { 0.0 }).norm() < 1e-5);
        }
    }

    #[test]
    fn smooth_density_dbar_reproduces_it() {
        let cut = Cutoff { q: 0.5, t_start: 0.25, t_end: 1.0 / 3.0, outer: true };
        let phi = move |z: Complex64| {
            let r = z.norm();
            let bump = cut.radial_derivative(r);
            bump * (z * z + Complex64::new(0.3, -0.2) * z.conj())
        };
        let density = move |r: f64, m: usize| angles(m).map(|t| phi(Complex64::from_polar(r, t))).collect();
        let op = PompeiuOperator::new(vec![cut.band()], 32, 32, 2);
        let (a, b) = cut.band();
        for k in 1..6 {
            let z = Complex64::from_polar(a + (b - a) * k as f64 / 6.0, 0.7 * k as f64);
            let d = dbar_fd(|w| op.eval(&density, w), z, 1e-5);
            assert!((d - phi(z)).norm() < 1e-5 * (1.0 + phi(z).norm()), "{d} vs {}", phi(z));
        }
    }

    #[test]
    fn boundary_traces_agree_with_pointwise_evaluation() {
        let cut = Cutoff { q: 0.4, t_start: 2.0 / 3.0, t_end: 0.75, outer: false };
        let density = move |r: f64, m: usize| {
            angles(m)
                .map(|t| {
                    let z = Complex64::from_polar(r, t);
                    cut.dbar(z) * (Complex64::new(1.0, 0.5) + z.inv().powi(3))
                })
                .collect()
        };
        let op = PompeiuOperator::new(vec![cut.band()], 64, 32, 1);
        let (outer, inner) = op.boundary_traces(&density, 0.4, 32);
        for j in [0, 5, 17] {
            let t = 2.0 * PI * j as f64 / 32.0;
            assert!((outer[j] - op.eval(&density, Complex64::from_polar(1.0, t))).norm() < 1e-13);
            assert!((inner[j] - op.eval(&density, Complex64::from_polar(0.4, t))).norm() < 1e-13);
        }
    }
}
