//! Discrete boundary calculus on circles.
//!
//! A [`BoundaryTrace`] holds complex samples of a function on one boundary
//! circle at the nodes of a [`BoundaryGrid`]; it is identified with its
//! trigonometric interpolant. On top of it live the conjugate function
//! (Hilbert transform), winding numbers, discrete Hölder norms, the Cauchy
//! extension to the interior and zero location.

mod extension;
pub mod spectral;
mod zeros;

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use extension::{cauchy_extend, Domain, HolomorphicExtension};
pub use zeros::{locate_zeros, locate_zeros_with, LocatedZero, ZeroSearchOptions};

/// Equispaced nodes `theta_j = 2 pi j / N` on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    node_count: usize,
}

impl BoundaryGrid {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < 16 || !node_count.is_power_of_two() {
            return Err(Error::InvalidGrid(node_count));
        }
        Ok(Self { node_count })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.node_count as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.node_count as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.node_count).map(move |j| self.node(j))
    }
}

/// Complex samples of a function on a boundary circle.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    grid: BoundaryGrid,
    values: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn new(grid: BoundaryGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::LengthMismatch { expected: grid.node_count(), got: values.len() });
        }
        if let Some(j) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: BoundaryGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(theta)` at the grid nodes.
    pub fn from_fn(grid: BoundaryGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn from_real_fn(grid: BoundaryGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(|t| Complex64::new(f(t), 0.0)).collect())
    }

    pub(crate) fn from_parts_unchecked(grid: BoundaryGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> BoundaryGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.values.iter().enumerate().map(|(j, &z)| f(self.grid.node(j), z)).collect();
        Self { grid: self.grid, values }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|_, z| z * s)
    }

    /// Pointwise `self - other`; panics on grid mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, values }
    }

    /// Value of the trigonometric interpolant at an arbitrary angle.
    pub fn interpolate(&self, theta: f64) -> Complex64 {
        spectral::interpolate(&spectral::forward(&self.values), theta)
    }

    /// Spectral theta-derivative of the interpolant, sampled on the grid.
    pub fn derivative(&self) -> Self {
        Self { grid: self.grid, values: spectral::derivative(&self.values) }
    }

    /// Trigonometric coefficients of the interpolant.
    pub fn trig_coefficients(&self) -> TrigCoefficients {
        TrigCoefficients { coeffs: spectral::forward(&self.values) }
    }

    /// Largest strictly-negative-mode coefficient relative to the largest coefficient.
    pub fn negative_mode_leakage(&self) -> f64 {
        spectral::negative_mode_leakage(&self.values)
    }

    /// Writes `theta,re,im` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,re,im\n");
        for (j, z) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", self.grid.node(j), z.re, z.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("theta,re,im") => {}
            other => return Err(Error::InvalidInput(format!("bad trace header {other:?}"))),
        }
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::InvalidInput(format!("row {row}: expected 3 fields")));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("row {row}: {e}")))
            };
            values.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        let grid = BoundaryGrid::new(values.len())?;
        Self::new(grid, values)
    }
}

/// Coefficients `c_k`, `-N/2 < k <= N/2`, of a trace's interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigCoefficients {
    coeffs: Vec<Complex64>,
}

impl TrigCoefficients {
    pub fn node_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient multiplying `exp(i k theta)`; zero outside the resolved band.
    pub fn get(&self, k: i64) -> Complex64 {
        let n = self.coeffs.len() as i64;
        if k <= -n / 2 || k > n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[spectral::slot_of(k, self.coeffs.len())]
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.coeffs.len();
        self.coeffs.iter().enumerate().map(move |(j, c)| (spectral::mode_of(j, n), *c))
    }

    pub fn fft_order(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Inverse transform back to grid values.
    pub fn synthesize(&self) -> Vec<Complex64> {
        spectral::inverse(&self.coeffs)
    }
}

pub fn trig_coefficients(trace: &BoundaryTrace) -> TrigCoefficients {
    trace.trig_coefficients()
}

const REAL_TOLERANCE: f64 = 1e-10;

pub(crate) fn require_real(trace: &BoundaryTrace) -> Result<Vec<f64>> {
    let scale = 1.0 + trace.values.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let im = trace.max_imag();
    if im > REAL_TOLERANCE * scale {
        return Err(Error::NonRealInput(im));
    }
    Ok(trace.real_parts())
}

/// Conjugate function of a real trace, normalised to zero mean.
pub fn hilbert_transform(trace: &BoundaryTrace) -> Result<BoundaryTrace> {
    let u = require_real(trace)?;
    BoundaryTrace::from_real(trace.grid, &spectral::hilbert_real(&u))
}

/// Winding number together with the distance of the raw increment from an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub winding: i64,
    pub residue: f64,
}

/// Adjacent phase differences above this are treated as unresolved.
pub const MAX_RESOLVED_PHASE_JUMP: f64 = 0.9 * PI;

/// Winding number with a zero floor relative to the largest sample.
pub fn winding_number(trace: &BoundaryTrace) -> Result<i64> {
    let floor = 1e-12 * trace.sup_norm();
    Ok(winding_report(trace, floor)?.winding)
}

/// Winding number by phase unwrapping; fails loudly on near-zeros and coarse grids.
pub fn winding_report(trace: &BoundaryTrace, floor: f64) -> Result<WindingReport> {
    let v = &trace.values;
    if let Some((node, z)) = v.iter().enumerate().find(|(_, z)| z.norm() <= floor) {
        return Err(Error::ZeroOnBoundary { node, modulus: z.norm() });
    }
    let n = v.len();
    let mut total = 0.0;
    for j in 0..n {
        let next = (j + 1) % n;
        let jump = (v[next] / v[j]).arg();
        if jump.abs() > MAX_RESOLVED_PHASE_JUMP {
            return Err(Error::UnresolvedPhase { node: j, next, jump });
        }
        total += jump;
    }
    let turns = total / (2.0 * PI);
    let winding = turns.round();
    Ok(WindingReport { winding: winding as i64, residue: (turns - winding).abs() })
}

/// Discrete Hölder quantities of a trace.
///
/// `c_alpha` is the maximum of `|u_i - u_j| / |e^{i theta_i} - e^{i theta_j}|^alpha`
/// over all node pairs; `c1_alpha` is `sup|u| + c_alpha(u) + c_alpha(u')` with
/// `u'` the spectral derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderNormReport {
    pub sup_norm: f64,
    pub alpha: f64,
    pub c_alpha: f64,
    pub c1_alpha: f64,
}

fn holder_seminorm(values: &[Complex64], alpha: f64) -> f64 {
    let n = values.len();
    let denom: Vec<f64> = (0..n)
        .map(|m| (2.0 * (PI * m as f64 / n as f64).sin()).abs().powf(alpha))
        .collect();
    let mut best = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let q = (values[i] - values[j]).norm() / denom[j - i];
            if q > best {
                best = q;
            }
        }
    }
    best
}

pub fn holder_norms(trace: &BoundaryTrace, alpha: f64) -> HolderNormReport {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    let sup_norm = trace.sup_norm();
    let c_alpha = holder_seminorm(&trace.values, alpha);
    let du = spectral::derivative(&trace.values);
    let c1_alpha = sup_norm + c_alpha + holder_seminorm(&du, alpha);
    HolderNormReport { sup_norm, alpha, c_alpha, c1_alpha }
}
