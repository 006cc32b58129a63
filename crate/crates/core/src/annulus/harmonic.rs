use num_complex::Complex64;

use crate::boundary::{spectral, BoundaryTrace, HolomorphicExtension};
use crate::error::{Error, Result};

/// Harmonic function on `A(q,1)` written as
/// `u = c_log ln|z| + Re F(z)`, `F` holomorphic on the annulus.
#[derive(Debug, Clone)]
pub struct LaurentHarmonic {
    pub q: f64,
    pub c_log: f64,
    /// `F(z) = outer[0] + sum_k outer[k] z^k + sum_m inner[m-1] (q/z)^m`.
    pub holomorphic: HolomorphicExtension,
}

impl LaurentHarmonic {
    pub fn eval(&self, z: Complex64) -> f64 {
        self.c_log * z.norm().ln() + self.holomorphic.eval(z).re
    }

    /// Coefficient of `z^k` in `F`, for any integer `k`.
    pub fn laurent_coefficient(&self, k: i64) -> Complex64 {
        let outer = self.holomorphic.outer_coefficients();
        let inner = self.holomorphic.inner_coefficients();
        if k >= 0 {
            outer.get(k as usize).copied().unwrap_or_default()
        } else {
            let m = (-k) as usize;
            inner.get(m - 1).map(|c| c * self.q.powi(m as i32)).unwrap_or_default()
        }
    }
}

/// Solves the Dirichlet problem on `A(q,1)` with data `d0` on `|z| = 1` and
/// `d1` on `|z| = q`, mode by mode.
pub fn harmonic_extend_annulus(d0: &BoundaryTrace, d1: &BoundaryTrace, q: f64) -> Result<LaurentHarmonic> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput(format!("annulus parameter q = {q} outside (0, 1)")));
    }
    let n = d0.len();
    if d1.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: d1.len() });
    }
    let u0 = crate::boundary::require_real(d0)?;
    let u1 = crate::boundary::require_real(d1)?;
    let half = n / 2;
    if q.powi(half as i32) == 0.0 {
        let usable = (f64::MIN_POSITIVE.ln() / q.ln()).floor() as usize;
        return Err(Error::ModeConditioning { q, usable });
    }
    let c0 = spectral::forward_real(&u0);
    let c1 = spectral::forward_real(&u1);
    let c_log = (c1[0].re - c0[0].re) / q.ln();
    let mut outer = vec![Complex64::new(c0[0].re, 0.0)];
    let mut inner = Vec::with_capacity(half);
    let mut qk = 1.0;
    for k in 1..half {
        qk *= q;
        let det = 1.0 - qk * qk;
        let (a0, a1) = (2.0 * c0[k], 2.0 * c1[k]);
        outer.push((a0 - a1 * qk) / det);
        inner.push(((a1 - a0 * qk) / det).conj());
    }
    Ok(LaurentHarmonic { q, c_log, holomorphic: HolomorphicExtension::from_laurent(outer, inner, q) })
}
