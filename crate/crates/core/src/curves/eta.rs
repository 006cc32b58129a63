use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::CurveFamily;
use crate::boundary::{hilbert_transform, BoundaryTrace, MAX_RESOLVED_PHASE_JUMP};
use crate::error::{Error, Result};

/// `eta = w conj(dbar_w rho) = exp(a + i b)` along a trace, with `b_tilde = T(b)`.
#[derive(Debug, Clone)]
pub struct EtaDecomposition {
    pub eta: Vec<Complex64>,
    pub a: BoundaryTrace,
    pub b: BoundaryTrace,
    pub b_tilde: BoundaryTrace,
    pub eta_winding: i64,
}

impl EtaDecomposition {
    /// Largest relative deviation of `exp(a + i b)` from `eta`.
    pub fn roundtrip_error(&self) -> f64 {
        self.eta
            .iter()
            .zip(self.a.values().iter().zip(self.b.values()))
            .map(|(e, (a, b))| (Complex64::new(a.re, b.re).exp() - e).norm() / e.norm())
            .fold(0.0, f64::max)
    }
}

pub fn eta_decompose(family: &CurveFamily, trace: &BoundaryTrace) -> Result<EtaDecomposition> {
    let grid = trace.grid();
    let n = trace.len();
    let mut eta = Vec::with_capacity(n);
    for (j, &w) in trace.values().iter().enumerate() {
        let e = w * family.d_wbar(grid.node(j), w).conj();
        if e.norm() == 0.0 || !e.norm().is_finite() {
            return Err(Error::ZeroOnTrace(j));
        }
        eta.push(e);
    }
    let mut b = Vec::with_capacity(n);
    b.push(eta[0].arg());
    for j in 1..n {
        let jump = (eta[j] / eta[j - 1]).arg();
        if jump.abs() > MAX_RESOLVED_PHASE_JUMP {
            return Err(Error::UnresolvedPhase { node: j - 1, next: j, jump });
        }
        b.push(b[j - 1] + jump);
    }
    let closing = b[n - 1] + (eta[0] / eta[n - 1]).arg() - b[0];
    let winding = (closing / (2.0 * PI)).round() as i64;
    if winding != 0 {
        return Err(Error::EtaWindingNonzero(winding));
    }
    let a: Vec<f64> = eta.iter().map(|e| e.norm().ln()).collect();
    let a = BoundaryTrace::from_real(grid, &a)?;
    let b = BoundaryTrace::from_real(grid, &b)?;
    let b_tilde = hilbert_transform(&b)?;
    Ok(EtaDecomposition { eta, a, b, b_tilde, eta_winding: 0 })
}

/// Distances from degeneracy along a trace.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub min_dbar_rho: f64,
    pub min_dbar_rho_node: usize,
    pub min_eta: f64,
    pub min_eta_node: usize,
    pub warnings: Vec<String>,
}

pub const CURVATURE_WARN_FLOOR: f64 = 1e-6;

pub fn curvature_floor_check(family: &CurveFamily, trace: &BoundaryTrace) -> CurvatureReport {
    let grid = trace.grid();
    let mut report = CurvatureReport {
        min_dbar_rho: f64::INFINITY,
        min_dbar_rho_node: 0,
        min_eta: f64::INFINITY,
        min_eta_node: 0,
        warnings: Vec::new(),
    };
    for (j, &w) in trace.values().iter().enumerate() {
        let d = family.d_wbar(grid.node(j), w).norm();
        if d < report.min_dbar_rho {
            report.min_dbar_rho = d;
            report.min_dbar_rho_node = j;
        }
        let e = d * w.norm();
        if e < report.min_eta {
            report.min_eta = e;
            report.min_eta_node = j;
        }
    }
    if report.min_dbar_rho < CURVATURE_WARN_FLOOR {
        report.warnings.push(format!(
            "|dbar rho| = {:e} at node {} is below {:e}",
            report.min_dbar_rho, report.min_dbar_rho_node, CURVATURE_WARN_FLOOR
        ));
    }
    if report.min_eta < CURVATURE_WARN_FLOOR {
        report.warnings.push(format!(
            "|eta| = {:e} at node {} is below {:e}",
            report.min_eta, report.min_eta_node, CURVATURE_WARN_FLOOR
        ));
    }
    report
}
