use num_complex::Complex64;

use super::harmonic::harmonic_extend_annulus;
use super::{AnnulusSolution, SolveMethod};
use crate::boundary::{BoundaryGrid, BoundaryTrace};
use crate::curves::{builtin_circle_family, TrigPoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    pub grid: usize,
    /// Argument of the zero, when there is one.
    pub psi: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self { grid: 256, psi: 0.0 }
    }
}

fn log_radius(r: &TrigPoly, grid: BoundaryGrid) -> Result<Vec<f64>> {
    grid.nodes()
        .map(|t| {
            let v = r.eval(t);
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(Error::ZeroNotEnclosed { theta: t })
            }
        })
        .collect()
}

/// Solution of `|f| = R0` on `|z| = 1`, `|f| = R1` on `|z| = q` with the
/// fewest zeros: `f = (z - z1) z^k1 e^F`, where `s = c_log` of the harmonic
/// extension of `log R`, `k1 = floor(s)` and `|z1| = q^{s - k1}`. No zero is
/// needed when `s` is an integer.
pub fn solve_annulus_radial(r0: &TrigPoly, r1: &TrigPoly, q: f64, opts: &RadialOptions) -> Result<AnnulusSolution> {
    let grid = BoundaryGrid::new(opts.grid)?;
    let d0 = BoundaryTrace::from_real(grid, &log_radius(r0, grid)?)?;
    let d1 = BoundaryTrace::from_real(grid, &log_radius(r1, grid)?)?;
    let s = harmonic_extend_annulus(&d0, &d1, q)?.c_log;
    let (k1, zeros) = if (s - s.round()).abs() < 1e-12 {
        (s.round() as i64, Vec::new())
    } else {
        let k1 = s.floor();
        (k1 as i64, vec![Complex64::from_polar(q.powf(s - k1), opts.psi)])
    };
    solve_annulus_radial_with_zeros(r0, r1, q, &zeros, k1, opts.grid)
}

/// `f = prod_j (z - z_j) z^k1 e^F` with `F` chosen so that `|f| = R0`, `R1` on
/// the two circles. Consistent data need `c_log = sum_j h1(z_j) + k1`; any
/// mismatch is left in the boundary residual.
pub fn solve_annulus_radial_with_zeros(
    r0: &TrigPoly,
    r1: &TrigPoly,
    q: f64,
    zeros: &[Complex64],
    k1: i64,
    grid: usize,
) -> Result<AnnulusSolution> {
    let grid = BoundaryGrid::new(grid)?;
    if let Some(z) = zeros.iter().find(|z| !(z.norm() > q && z.norm() < 1.0)) {
        return Err(Error::InvalidInput(format!("zero {z} is not inside the annulus")));
    }
    let product = |z: Complex64| zeros.iter().fold(Complex64::new(1.0, 0.0), |p, zj| p * (z - zj));
    let n = grid.node_count();
    let circle = |r: f64| -> Vec<Complex64> { grid.nodes().map(|t| Complex64::from_polar(r, t)).collect() };
    let (z0, z1) = (circle(1.0), circle(q));
    let u0: Vec<f64> = log_radius(r0, grid)?.iter().zip(&z0).map(|(l, z)| l - product(*z).norm().ln()).collect();
    let u1: Vec<f64> = log_radius(r1, grid)?
        .iter()
        .zip(&z1)
        .map(|(l, z)| l - product(*z).norm().ln() - k1 as f64 * q.ln())
        .collect();
    let h = harmonic_extend_annulus(&BoundaryTrace::from_real(grid, &u0)?, &BoundaryTrace::from_real(grid, &u1)?, q)?;
    let f0 = h.holomorphic.circle_values(1.0, n);
    let f1 = h.holomorphic.circle_values(q, n);
    let build = |zs: &[Complex64], fs: &[Complex64]| -> Vec<Complex64> {
        zs.iter().zip(fs).map(|(z, f)| product(*z) * z.powi(k1 as i32) * f.exp()).collect()
    };
    let traces = [BoundaryTrace::new(grid, build(&z0, &f0))?, BoundaryTrace::new(grid, build(&z1, &f1))?];
    let zero = TrigPoly::constant(0.0);
    let families = [builtin_circle_family(zero.clone(), r0.clone())?, builtin_circle_family(zero, r1.clone())?];
    AnnulusSolution::assemble(q, SolveMethod::Radial, traces, families, None, None, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> TrigPoly {
        TrigPoly::constant(v)
    }

    #[test]
    fn half_power_inner_radius_gives_one_zero() {
        let q: f64 = 0.5;
        let sol = solve_annulus_radial(&c(1.0), &c(q.sqrt()), q, &RadialOptions::default()).unwrap();
        assert_eq!(sol.zeros.len(), 1);
        assert!((sol.zeros[0].position.norm() - 0.5f64.sqrt()).abs() < 1e-8);
        assert!(sol.residual_sup() < 1e-12);
        assert_eq!(sol.windings.gamma0, 1);
        assert_eq!(sol.windings.gamma1_disc, 0);
    }

    #[test]
    fn integer_exponent_needs_no_zero() {
        let q: f64 = 0.4;
        let sol = solve_annulus_radial(&c(1.0), &c(q * q), q, &RadialOptions::default()).unwrap();
        assert!(sol.zeros.is_empty());
        assert_eq!(sol.windings.gamma0, 2);
        assert_eq!(sol.windings.gamma1_disc, 2);
        for (j, f) in sol.traces[0].values().iter().enumerate() {
            let z = Complex64::from_polar(1.0, sol.traces[0].grid().node(j));
            assert!((f - z * z).norm() < 1e-12);
        }
    }

    #[test]
    fn varying_radii_are_matched() {
        let q = 0.3;
        let r0 = TrigPoly::new(1.0, vec![0.2], vec![0.1]);
        let r1 = TrigPoly::new(0.6, vec![0.0], vec![0.1]);
        let sol = solve_annulus_radial(&r0, &r1, q, &RadialOptions { grid: 256, psi: 1.0 }).unwrap();
        for (k, r) in [&r0, &r1].iter().enumerate() {
            let grid = sol.traces[k].grid();
            for (j, f) in sol.traces[k].values().iter().enumerate() {
                assert!((f.norm() - r.eval(grid.node(j))).abs() < 1e-8);
            }
        }
        assert!(sol.zeros.len() <= 1);
    }
}
