use num_complex::Complex64;

use super::{CurveFamily, DefiningFunction, FamilyKind, TrigPoly};
use crate::error::{Error, Result};

const CHECK_NODES: usize = 512;

struct CircleFamily {
    cx: TrigPoly,
    cy: TrigPoly,
    radius: TrigPoly,
}

impl CircleFamily {
    fn center(&self, theta: f64) -> Complex64 {
        Complex64::new(self.cx.eval(theta), self.cy.eval(theta))
    }
}

impl DefiningFunction for CircleFamily {
    fn rho(&self, theta: f64, w: Complex64) -> f64 {
        let r = self.radius.eval(theta);
        (w - self.center(theta)).norm_sqr() - r * r
    }

    fn d_w(&self, theta: f64, w: Complex64) -> Complex64 {
        (w - self.center(theta)).conj()
    }

    fn d_wbar(&self, theta: f64, w: Complex64) -> Complex64 {
        w - self.center(theta)
    }

    fn d_theta(&self, theta: f64, w: Complex64) -> f64 {
        let dc = Complex64::new(self.cx.derivative(theta), self.cy.derivative(theta));
        let r = self.radius.eval(theta);
        -2.0 * ((w - self.center(theta)) * dc.conj()).re - 2.0 * r * self.radius.derivative(theta)
    }

    fn reference_radius(&self, theta: f64, direction: f64) -> Result<f64> {
        let c = self.center(theta);
        let r = self.radius.eval(theta);
        let proj = (c * Complex64::from_polar(1.0, -direction)).re;
        let disc = proj * proj + r * r - c.norm_sqr();
        if r <= c.norm() || disc < 0.0 {
            return Err(Error::ZeroNotEnclosed { theta });
        }
        Ok(proj + disc.sqrt())
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::Circle { center_re: self.cx.clone(), center_im: self.cy.clone(), radius: self.radius.clone() }
    }
}

/// Circles `|w - c(theta)| = R(theta)`; `center` is the real part of `c`.
pub fn builtin_circle_family(center: TrigPoly, radius: TrigPoly) -> Result<CurveFamily> {
    builtin_circle_family_complex(center, TrigPoly::constant(0.0), radius)
}

/// Circle family with a complex centre `center_re + i center_im`.
pub fn builtin_circle_family_complex(center_re: TrigPoly, center_im: TrigPoly, radius: TrigPoly) -> Result<CurveFamily> {
    let fam = CircleFamily { cx: center_re, cy: center_im, radius };
    for j in 0..CHECK_NODES {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / CHECK_NODES as f64;
        if fam.radius.eval(theta) - fam.center(theta).norm() <= 0.0 {
            return Err(Error::ZeroNotEnclosed { theta });
        }
    }
    Ok(CurveFamily::new(fam))
}

struct EllipseFamily {
    p: TrigPoly,
    q: TrigPoly,
    phi: TrigPoly,
}

impl EllipseFamily {
    /// Rotated coordinates `(x_hat, y_hat)` of `w` and the axes at `theta`.
    fn frame(&self, theta: f64, w: Complex64) -> (f64, f64, f64, f64, f64) {
        let phi = self.phi.eval(theta);
        let wh = w * Complex64::from_polar(1.0, -phi);
        (wh.re, wh.im, self.p.eval(theta), self.q.eval(theta), phi)
    }
}

impl DefiningFunction for EllipseFamily {
    fn rho(&self, theta: f64, w: Complex64) -> f64 {
        let (x, y, p, q, _) = self.frame(theta, w);
        (x / p).powi(2) + (y / q).powi(2) - 1.0
    }

    fn d_w(&self, theta: f64, w: Complex64) -> Complex64 {
        let (x, y, p, q, phi) = self.frame(theta, w);
        Complex64::from_polar(1.0, -phi) * Complex64::new(x / (p * p), -y / (q * q))
    }

    fn d_wbar(&self, theta: f64, w: Complex64) -> Complex64 {
        let (x, y, p, q, phi) = self.frame(theta, w);
        Complex64::from_polar(1.0, phi) * Complex64::new(x / (p * p), y / (q * q))
    }

    fn d_theta(&self, theta: f64, w: Complex64) -> f64 {
        let (x, y, p, q, _) = self.frame(theta, w);
        let dphi = self.phi.derivative(theta);
        let dp = self.p.derivative(theta);
        let dq = self.q.derivative(theta);
        2.0 * x * dphi * y / (p * p) - 2.0 * x * x * dp / p.powi(3) - 2.0 * y * dphi * x / (q * q)
            - 2.0 * y * y * dq / q.powi(3)
    }

    fn reference_radius(&self, theta: f64, direction: f64) -> Result<f64> {
        let (_, _, p, q, phi) = self.frame(theta, Complex64::new(0.0, 0.0));
        let t = direction - phi;
        Ok(1.0 / ((t.cos() / p).powi(2) + (t.sin() / q).powi(2)).sqrt())
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::Ellipse
    }
}

/// Ellipses centred at 0 with semi-axes `p(theta)`, `q(theta)` rotated by `phi(theta)`.
pub fn builtin_ellipse_family(p: TrigPoly, q: TrigPoly, phi: TrigPoly) -> Result<CurveFamily> {
    for j in 0..CHECK_NODES {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / CHECK_NODES as f64;
        if !(p.eval(theta) > 0.0 && q.eval(theta) > 0.0) {
            return Err(Error::DegenerateAxis { theta });
        }
    }
    Ok(CurveFamily::new(EllipseFamily { p, q, phi }))
}

pub(crate) struct Reflected(pub(crate) CurveFamily);

impl DefiningFunction for Reflected {
    fn rho(&self, tau: f64, w: Complex64) -> f64 {
        self.0.rho(-tau, w)
    }

    fn d_w(&self, tau: f64, w: Complex64) -> Complex64 {
        self.0.d_w(-tau, w)
    }

    fn d_wbar(&self, tau: f64, w: Complex64) -> Complex64 {
        self.0.d_wbar(-tau, w)
    }

    fn d_theta(&self, tau: f64, w: Complex64) -> f64 {
        -self.0.d_theta(-tau, w)
    }

    fn reference_radius(&self, tau: f64, direction: f64) -> Result<f64> {
        self.0.reference_radius(-tau, direction)
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::Reflected
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(v: f64) -> TrigPoly {
        TrigPoly::constant(v)
    }

    #[test]
    fn circle_examples() {
        let unit = builtin_circle_family(c(0.0), c(1.0)).unwrap();
        assert_eq!(unit.rho(0.0, Complex64::new(1.0, 0.0)), 0.0);
        assert_eq!(unit.rho(0.0, Complex64::new(0.0, 0.0)), -1.0);

        let exp_cos = builtin_circle_family(c(0.0), TrigPoly::fit(|t| t.cos().exp(), 24)).unwrap();
        assert!(exp_cos.rho(PI / 2.0, Complex64::new(0.0, 1.0)).abs() < 1e-14);

        let shifted = builtin_circle_family(c(0.2), c(1.0)).unwrap();
        for k in 0..8 {
            assert!(shifted.rho(k as f64, Complex64::new(1.2, 0.0)).abs() < 1e-15);
        }
        assert!(matches!(builtin_circle_family(c(1.5), c(1.0)), Err(Error::ZeroNotEnclosed { .. })));
    }

    #[test]
    fn ellipse_examples() {
        let round = builtin_ellipse_family(c(1.0), c(1.0), c(0.0)).unwrap();
        for k in 0..8 {
            let t = k as f64;
            assert!(round.rho(t, Complex64::from_polar(1.0, t)).abs() < 1e-15);
        }
        let e = builtin_ellipse_family(c(2.0), c(1.0), c(0.0)).unwrap();
        assert_eq!(e.rho(0.0, Complex64::new(2.0, 0.0)), 0.0);
        assert_eq!(e.rho(0.0, Complex64::new(0.0, 1.0)), 0.0);
        assert!((e.d_wbar(0.0, Complex64::new(2.0, 0.0)) - 0.5).norm() < 1e-15);
        assert!(matches!(
            builtin_ellipse_family(c(1.0), TrigPoly::new(0.5, vec![1.0], vec![0.0]), c(0.0)),
            Err(Error::DegenerateAxis { .. })
        ));
    }

    #[test]
    fn reference_radius_lies_on_curve() {
        let e = builtin_ellipse_family(
            TrigPoly::new(2.0, vec![0.3], vec![0.1]),
            c(1.0),
            TrigPoly::new(0.2, vec![0.0], vec![0.4]),
        )
        .unwrap();
        let circ = builtin_circle_family_complex(c(0.1), c(-0.2), TrigPoly::new(1.0, vec![0.1], vec![0.0])).unwrap();
        for fam in [e, circ] {
            for k in 0..16 {
                let t = 0.4 * k as f64;
                let dir = 1.3 * k as f64;
                let r = fam.reference_radius(t, dir).unwrap();
                assert!(fam.rho(t, Complex64::from_polar(r, dir)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reflection_reverses_parameter() {
        let fam = builtin_circle_family(c(0.0), TrigPoly::new(1.0, vec![0.0], vec![0.3])).unwrap();
        let refl = fam.reflected();
        let w = Complex64::new(0.3, 0.8);
        assert_eq!(refl.rho(0.7, w), fam.rho(-0.7, w));
        assert_eq!(refl.d_theta(0.7, w), -fam.d_theta(-0.7, w));
    }
}
