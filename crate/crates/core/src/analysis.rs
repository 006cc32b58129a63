//! Harmonic measure on `A(q,1)`, the zero/winding identity
//! `c_log(log R) = sum_j h1(z_j) + k1` and the surjectivity of zero placement.

use num_complex::Complex64;
use serde::Serialize;

use crate::annulus::{harmonic_extend_annulus, solve_annulus_radial, AnnulusSolution, RadialOptions};
use crate::boundary::{BoundaryGrid, BoundaryTrace};
use crate::curves::TrigPoly;
use crate::error::{Error, Result};

/// `h1(z) = ln|z| / ln q`: equal to 1 on `|z| = q` and 0 on `|z| = 1`.
pub fn harmonic_measure(q: f64, z: Complex64) -> f64 {
    z.norm().ln() / q.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroMeasure {
    pub re: f64,
    pub im: f64,
    pub mult: u32,
    pub h1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Flux of `u_R` through the inner circle, i.e. `c_log` of the harmonic extension of `log R`.
    pub lhs: f64,
    /// `sum_j h1(z_j) + k1`.
    pub rhs: f64,
    pub diff: f64,
    /// Winding on `|z| = q`, counterclockwise.
    pub k1: i64,
    pub zeros: Vec<ZeroMeasure>,
}

/// `c_log` of the harmonic extension of `(log R0, log R1)`.
pub fn log_flux(r0: &TrigPoly, r1: &TrigPoly, q: f64, grid: usize) -> Result<f64> {
    let grid = BoundaryGrid::new(grid)?;
    let log = |r: &TrigPoly| -> Result<BoundaryTrace> {
        let mut v = Vec::with_capacity(grid.node_count());
        for t in grid.nodes() {
            let x = r.eval(t);
            if x <= 0.0 {
                return Err(Error::ZeroNotEnclosed { theta: t });
            }
            v.push(x.ln());
        }
        BoundaryTrace::from_real(grid, &v)
    };
    Ok(harmonic_extend_annulus(&log(r0)?, &log(r1)?, q)?.c_log)
}

/// Checks `c_log(log R) = sum_j h1(z_j) + k1` on a solution whose families are
/// the centred circles `|w| = R0`, `|w| = R1`.
pub fn check_identity(solution: &AnnulusSolution) -> Result<IdentityReport> {
    let mut radii = Vec::with_capacity(2);
    for (j, fam) in solution.families.iter().enumerate() {
        radii.push(fam.radial_profile().ok_or(Error::NotRadialFamily(j))?);
    }
    let lhs = log_flux(&radii[0], &radii[1], solution.q, solution.traces[0].len())?;
    let zeros: Vec<ZeroMeasure> = solution
        .zeros
        .iter()
        .map(|z| ZeroMeasure {
            re: z.position.re,
            im: z.position.im,
            mult: z.multiplicity,
            h1: harmonic_measure(solution.q, z.position),
        })
        .collect();
    let k1 = solution.windings.gamma1_disc;
    let rhs = zeros.iter().map(|z| z.mult as f64 * z.h1).sum::<f64>() + k1 as f64;
    Ok(IdentityReport { lhs, rhs, diff: (lhs - rhs).abs(), k1, zeros })
}

/// Data of the solution with the fewest zeros for a given flux `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroSelection {
    pub k1: i64,
    /// Radius of the single zero, absent when `s` is an integer.
    pub zero_radius: Option<f64>,
}

impl ZeroSelection {
    pub fn zero_count(&self) -> usize {
        usize::from(self.zero_radius.is_some())
    }
}

pub fn minimal_zero_selector(s: f64, q: f64) -> ZeroSelection {
    if (s - s.round()).abs() < 1e-12 {
        return ZeroSelection { k1: s.round() as i64, zero_radius: None };
    }
    let k1 = s.floor();
    ZeroSelection { k1: k1 as i64, zero_radius: Some(q.powf(s - k1)) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurjectivityPoint {
    pub target: f64,
    pub zero_count: usize,
    /// `sum_j h1(z_j)` modulo 1.
    pub phi_value: f64,
    pub error: f64,
}

/// Realizes each target `t` in `[0, 1)` as `sum_j h1(z_j) mod 1` of the
/// solution for `R0 = 1`, `R1 = q^t`.
pub fn surjectivity_demo(targets: &[f64], q: f64, grid: usize) -> Result<Vec<SurjectivityPoint>> {
    targets
        .iter()
        .map(|&t| {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidInput(format!("target {t} outside [0, 1)")));
            }
            let sol = solve_annulus_radial(
                &TrigPoly::constant(1.0),
                &TrigPoly::constant(q.powf(t)),
                q,
                &RadialOptions { grid, psi: 0.0 },
            )?;
            let sum: f64 = sol.zeros.iter().map(|z| z.multiplicity as f64 * harmonic_measure(q, z.position)).sum();
            let phi_value = sum.rem_euclid(1.0);
            let raw = (phi_value - t).abs();
            let error = raw.min(1.0 - raw);
            Ok(SurjectivityPoint { target: t, zero_count: sol.zeros.len(), phi_value, error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> TrigPoly {
        TrigPoly::constant(v)
    }

    #[test]
    fn harmonic_measure_values() {
        let q: f64 = 0.3;
        assert!((harmonic_measure(q, Complex64::from_polar(q, 1.0)) - 1.0).abs() < 1e-15);
        assert_eq!(harmonic_measure(q, Complex64::from_polar(1.0, 2.0)), 0.0);
        assert!((harmonic_measure(q, Complex64::new(q.sqrt(), 0.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_on_closed_forms() {
        let q = 0.5;
        let z = solve_annulus_radial(&c(1.0), &c(0.5), q, &RadialOptions::default()).unwrap();
        let rep = check_identity(&z).unwrap();
        assert_eq!((rep.k1, rep.zeros.len()), (1, 0));
        assert!((rep.lhs - 1.0).abs() < 1e-14 && rep.diff < 1e-14);

        let one = solve_annulus_radial(&c(1.0), &c(1.0), q, &RadialOptions::default()).unwrap();
        let rep = check_identity(&one).unwrap();
        assert!(rep.lhs.abs() < 1e-15 && rep.diff < 1e-15);

        let p = solve_annulus_radial(&c(1.0), &c(q.powf(0.3)), q, &RadialOptions::default()).unwrap();
        let rep = check_identity(&p).unwrap();
        assert!((rep.lhs - 0.3).abs() < 1e-12);
        assert_eq!(rep.k1, 0);
        assert_eq!(rep.zeros.len(), 1);
        assert!(rep.diff < 1e-6);
    }

    #[test]
    fn selector_examples() {
        let q: f64 = 0.5;
        assert_eq!(minimal_zero_selector(2.0, q), ZeroSelection { k1: 2, zero_radius: None });
        let half = minimal_zero_selector(0.5, q);
        assert_eq!((half.k1, half.zero_count()), (0, 1));
        let neg = minimal_zero_selector(-0.25, q);
        assert_eq!(neg.k1, -1);
        assert!((neg.zero_radius.unwrap() - q.powf(0.75)).abs() < 1e-15);
        let sol = solve_annulus_radial(&c(1.0), &c(q.powf(-0.25)), q, &RadialOptions::default()).unwrap();
        assert_eq!(sol.zeros.len(), 1);
        assert_eq!(sol.windings.gamma1_disc, -1);
        assert!((sol.zeros[0].position.norm() - neg.zero_radius.unwrap()).abs() < 1e-8);
    }

    #[test]
    fn surjectivity_examples() {
        let pts = surjectivity_demo(&[0.0, 0.5], 0.5, 128).unwrap();
        assert_eq!(pts[0].zero_count, 0);
        assert_eq!(pts[0].phi_value, 0.0);
        assert_eq!(pts[1].zero_count, 1);
        assert!(pts[1].error < 1e-6);
        assert!(surjectivity_demo(&[1.0], 0.5, 128).is_err());
    }
}
