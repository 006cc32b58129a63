use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{spectral, BoundaryTrace};
use crate::error::{Error, Result};

/// The two planar domains handled here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Domain {
    /// Unit disc, one boundary circle.
    Disc,
    /// `A(q,1) = {q < |z| < 1}`; traces are ordered outer circle first.
    Annulus { q: f64 },
}

impl Domain {
    pub fn component_count(&self) -> usize {
        match self {
            Domain::Disc => 1,
            Domain::Annulus { .. } => 2,
        }
    }

    pub fn inner_radius(&self) -> f64 {
        match self {
            Domain::Disc => 0.0,
            Domain::Annulus { q } => *q,
        }
    }
}

/// Cauchy integral of boundary traces over the oriented boundary.
///
/// For trigonometric interpolants the integral is exact in coefficient space:
/// the outer circle contributes its non-negative modes as a power series, the
/// inner circle of radius `q` its negative modes as a series in `q/z`.
#[derive(Debug, Clone)]
pub struct HolomorphicExtension {
    outer: Vec<Complex64>,
    inner: Vec<Complex64>,
    q: f64,
}

impl HolomorphicExtension {
    pub fn from_traces(traces: &[BoundaryTrace], domain: Domain) -> Result<Self> {
        if traces.len() != domain.component_count() {
            return Err(Error::InvalidInput(format!(
                "expected {} traces, got {}",
                domain.component_count(),
                traces.len()
            )));
        }
        let n = traces[0].len();
        let c0 = spectral::forward(traces[0].values());
        let outer: Vec<Complex64> = (0..n / 2).map(|k| c0[k]).collect();
        let (inner, q) = match domain {
            Domain::Disc => (Vec::new(), 0.0),
            Domain::Annulus { q } => {
                let n1 = traces[1].len();
                let c1 = spectral::forward(traces[1].values());
                let inner = (1..n1 / 2).map(|m| c1[n1 - m]).collect();
                (inner, q)
            }
        };
        Ok(Self { outer, inner, q })
    }

    /// Builds an extension directly from Laurent data: `outer[k]` multiplies
    /// `z^k` and `inner[m-1]` multiplies `(q/z)^m`.
    pub fn from_laurent(outer: Vec<Complex64>, inner: Vec<Complex64>, q: f64) -> Self {
        Self { outer, inner, q }
    }

    pub fn outer_coefficients(&self) -> &[Complex64] {
        &self.outer
    }

    pub fn inner_coefficients(&self) -> &[Complex64] {
        &self.inner
    }

    /// Values on the circle `|z| = r` at `n` equispaced nodes.
    pub fn circle_values(&self, r: f64, n: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        let half = (n / 2) as i64;
        let mut rk = 1.0;
        for (k, a) in self.outer.iter().enumerate() {
            if k as i64 >= half {
                break;
            }
            c[k] += a * rk;
            rk *= r;
        }
        let w = self.q / r;
        let mut wm = w;
        for (m, b) in self.inner.iter().enumerate() {
            if (m + 1) as i64 >= half {
                break;
            }
            c[n - 1 - m] += b * wm;
            wm *= w;
        }
        spectral::inverse(&c)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.derivative(z, 0)
    }

    /// `order`-th complex derivative at `z`.
    pub fn derivative(&self, z: Complex64, order: u32) -> Complex64 {
        let p = order as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        // power-series part via Horner on the differentiated coefficients
        for k in (p..self.outer.len()).rev() {
            let mut fall = 1.0;
            for i in 0..p {
                fall *= (k - i) as f64;
            }
            acc = acc * z + self.outer[k] * fall;
        }
        if !self.inner.is_empty() {
            let w = self.q / z;
            let mut tail = Complex64::new(0.0, 0.0);
            for m in (1..=self.inner.len()).rev() {
                let mut rise = 1.0;
                for i in 0..p {
                    rise *= (m + i) as f64;
                }
                tail = (tail + self.inner[m - 1] * rise) * w;
            }
            if p > 0 {
                let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
                tail *= sign * z.powi(-(p as i32));
            }
            acc += tail;
        }
        acc
    }
}

/// Evaluates the holomorphic extension of the traces at interior points.
pub fn cauchy_extend(traces: &[BoundaryTrace], domain: Domain, points: &[Complex64]) -> Result<Vec<Complex64>> {
    let ext = HolomorphicExtension::from_traces(traces, domain)?;
    let margin = traces[0].grid().spacing();
    let mut radii = vec![1.0];
    if let Domain::Annulus { q } = domain {
        radii.push(q);
    }
    points
        .iter()
        .map(|&z| {
            let r = z.norm();
            let inside = match domain {
                Domain::Disc => r < 1.0,
                Domain::Annulus { q } => r > q && r < 1.0,
            };
            if !inside || radii.iter().any(|&rad| (r - rad).abs() <= margin) {
                return Err(Error::PointTooCloseToBoundary { re: z.re, im: z.im, margin });
            }
            Ok(ext.eval(z))
        })
        .collect()
}
