use num_complex::Complex64;

use super::{CurveFamily, DefiningFunction, FamilyKind};
use crate::boundary::{spectral, BoundaryTrace};
use crate::error::{Error, Result};

struct Divided {
    base: CurveFamily,
    coeffs: Vec<Complex64>,
}

impl Divided {
    fn g(&self, theta: f64) -> Complex64 {
        spectral::interpolate(&self.coeffs, theta)
    }
}

impl DefiningFunction for Divided {
    fn rho(&self, theta: f64, w: Complex64) -> f64 {
        self.base.rho(theta, self.g(theta) * w)
    }

    fn d_w(&self, theta: f64, w: Complex64) -> Complex64 {
        let g = self.g(theta);
        self.base.d_w(theta, g * w) * g
    }

    fn d_theta(&self, theta: f64, w: Complex64) -> f64 {
        let g = self.g(theta);
        let dg = spectral::interpolate_derivative(&self.coeffs, theta);
        self.base.d_theta(theta, g * w) + 2.0 * (self.base.d_w(theta, g * w) * dg * w).re
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::Transformed
    }
}

/// The family `gamma_theta / g(theta)`, i.e. `rho~(theta, w) = rho(theta, g(theta) w)`.
///
/// If `f~` solves the transformed problem then `g f~` solves the original one.
pub fn divisor_transform(family: &CurveFamily, multiplier: &BoundaryTrace) -> Result<CurveFamily> {
    let floor = 1e-12 * multiplier.sup_norm();
    if let Some(j) = multiplier.values().iter().position(|v| v.norm() <= floor) {
        return Err(Error::MultiplierVanishes(j));
    }
    let coeffs = spectral::forward(multiplier.values());
    Ok(CurveFamily::new(Divided { base: family.clone(), coeffs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryGrid;
    use crate::curves::{builtin_circle_family, builtin_ellipse_family, TrigPoly};

    #[test]
    fn trivial_multipliers() {
        let grid = BoundaryGrid::new(64).unwrap();
        let fam = builtin_ellipse_family(TrigPoly::constant(2.0), TrigPoly::constant(1.0), TrigPoly::constant(0.3)).unwrap();
        let one = BoundaryTrace::from_fn(grid, |_| Complex64::new(1.0, 0.0)).unwrap();
        let same = divisor_transform(&fam, &one).unwrap();
        let w = Complex64::new(0.4, -1.1);
        for t in [0.0, 1.0, 2.5] {
            assert!((same.rho(t, w) - fam.rho(t, w)).abs() < 1e-14);
            assert!((same.d_w(t, w) - fam.d_w(t, w)).norm() < 1e-14);
        }

        let unit = builtin_circle_family(TrigPoly::constant(0.0), TrigPoly::constant(1.0)).unwrap();
        let z = BoundaryTrace::from_fn(grid, |t| Complex64::from_polar(1.0, t)).unwrap();
        let moved = divisor_transform(&unit, &z).unwrap();
        for t in [0.1, 1.7, 4.0] {
            assert!((moved.rho(t, w) - unit.rho(t, w)).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_derivative_matches_finite_difference() {
        let grid = BoundaryGrid::new(64).unwrap();
        let fam = builtin_circle_family(TrigPoly::constant(0.0), TrigPoly::new(1.0, vec![0.2], vec![0.1])).unwrap();
        let g = BoundaryTrace::from_fn(grid, |t| Complex64::from_polar(1.0, t) - 0.5).unwrap();
        let tf = divisor_transform(&fam, &g).unwrap();
        let w = Complex64::new(0.7, 0.3);
        let h = 1e-6;
        for t in [0.3, 2.0] {
            let fd = (tf.rho(t + h, w) - tf.rho(t - h, w)) / (2.0 * h);
            assert!((tf.d_theta(t, w) - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn vanishing_multiplier_is_rejected() {
        let grid = BoundaryGrid::new(16).unwrap();
        let g = BoundaryTrace::from_fn(grid, |t| Complex64::from_polar(1.0, t) - 1.0).unwrap();
        let fam = builtin_circle_family(TrigPoly::constant(0.0), TrigPoly::constant(1.0)).unwrap();
        assert!(matches!(divisor_transform(&fam, &g), Err(Error::MultiplierVanishes(0))));
    }
}
