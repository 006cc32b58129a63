//! FFT-backed spectral primitives on the equispaced circle grid.
//!
//! Coefficient vectors are stored in FFT order: slot `j` holds the mode
//! `k = j` for `j <= N/2` and `k = j - N` otherwise, normalised so that
//! `values[m] = sum_k c_k exp(i k theta_m)`.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Signed mode number stored in FFT slot `j` of a length-`n` vector.
#[inline]
pub fn mode_of(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT slot holding mode `k`, for `-n/2 < k <= n/2`.
#[inline]
pub fn slot_of(k: i64, n: usize) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (n as i64 + k) as usize
    }
}

pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf
}

pub fn forward_real(values: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&buf)
}

/// Conjugate function with zero mean: mode `k` is multiplied by `-i sign(k)`.
/// The Nyquist mode has no conjugate partner on the grid and is dropped.
pub fn hilbert_real(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut c = forward_real(values);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = mode_of(j, n);
        *cj = if k == 0 || 2 * k == n as i64 {
            Complex64::new(0.0, 0.0)
        } else if k > 0 {
            *cj * Complex64::new(0.0, -1.0)
        } else {
            *cj * Complex64::new(0.0, 1.0)
        };
    }
    inverse(&c).into_iter().map(|z| z.re).collect()
}

/// `u + i T(u)`: boundary values of the holomorphic function on the disc whose
/// real part has boundary values `u` and whose imaginary part vanishes at 0.
pub fn holomorphic_completion(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c = forward_real(values);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = mode_of(j, n);
        if k > 0 && 2 * k != n as i64 {
            *cj *= 2.0;
        } else if k != 0 {
            *cj = Complex64::new(0.0, 0.0);
        }
    }
    inverse(&c)
}

/// Removes strictly negative modes and the Nyquist mode.
pub fn project_nonnegative(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = mode_of(j, n);
        if k < 0 || 2 * k == n as i64 {
            *cj = Complex64::new(0.0, 0.0);
        }
    }
    inverse(&c)
}

/// Spectral derivative in theta; the Nyquist mode is dropped.
pub fn derivative(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut c = forward(values);
    for (j, cj) in c.iter_mut().enumerate() {
        let k = mode_of(j, n);
        *cj = if 2 * k == n as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            *cj * Complex64::new(0.0, k as f64)
        };
    }
    inverse(&c)
}

/// Evaluates the trigonometric interpolant with coefficients `c` (FFT order) at `theta`.
pub fn interpolate(c: &[Complex64], theta: f64) -> Complex64 {
    let n = c.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter().enumerate() {
        let k = mode_of(j, n) as f64;
        acc += cj * Complex64::from_polar(1.0, k * theta);
    }
    acc
}

/// Theta-derivative of the trigonometric interpolant.
pub fn interpolate_derivative(c: &[Complex64], theta: f64) -> Complex64 {
    let n = c.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, cj) in c.iter().enumerate() {
        let k = mode_of(j, n);
        if 2 * k == n as i64 {
            continue;
        }
        acc += cj * Complex64::new(0.0, k as f64) * Complex64::from_polar(1.0, k as f64 * theta);
    }
    acc
}

/// Trigonometric interpolant resampled on `new_n` nodes; modes that do not fit
/// and the Nyquist mode are dropped.
pub fn resample(values: &[Complex64], new_n: usize) -> Vec<Complex64> {
    let n = values.len();
    let c = forward(values);
    let mut out = vec![Complex64::new(0.0, 0.0); new_n];
    let half = (n.min(new_n) / 2) as i64;
    for (j, cj) in c.iter().enumerate() {
        let k = mode_of(j, n);
        if k.abs() < half {
            out[slot_of(k, new_n)] = *cj;
        }
    }
    inverse(&out)
}

/// Largest coefficient with `|k| > n/4`, relative to `max(1, largest coefficient)`.
pub fn spectral_tail(values: &[Complex64]) -> f64 {
    let n = values.len();
    let c = forward(values);
    let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tail = c
        .iter()
        .enumerate()
        .filter(|(j, _)| 4 * mode_of(*j, n).unsigned_abs() > n as u64)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    tail / scale
}

/// Largest modulus among strictly negative modes, relative to the largest mode.
pub fn negative_mode_leakage(values: &[Complex64]) -> f64 {
    let n = values.len();
    let c = forward(values);
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let neg = c
        .iter()
        .enumerate()
        .filter(|(j, _)| mode_of(*j, n) < 0)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    neg / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
    }

    #[test]
    fn slots_and_modes_are_inverse() {
        for n in [16usize, 64] {
            for j in 0..n {
                assert_eq!(slot_of(mode_of(j, n), n), j);
            }
        }
    }

    #[test]
    fn completion_of_cos_is_exp() {
        let th = grid(32);
        let u: Vec<f64> = th.iter().map(|t| t.cos()).collect();
        let f = holomorphic_completion(&u);
        for (t, z) in th.iter().zip(&f) {
            assert!((z - Complex64::from_polar(1.0, *t)).norm() < 1e-14);
        }
    }

    #[test]
    fn resampling_preserves_band_limited_traces() {
        let th = grid(32);
        let v: Vec<Complex64> = th.iter().map(|t| Complex64::from_polar(1.0, 3.0 * t) + 0.5).collect();
        let up = resample(&v, 128);
        for (j, z) in up.iter().enumerate() {
            let t = 2.0 * PI * j as f64 / 128.0;
            assert!((z - Complex64::from_polar(1.0, 3.0 * t) - 0.5).norm() < 1e-14);
        }
        let back = resample(&up, 32);
        assert!(back.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(spectral_tail(&v) < 1e-15);
    }

    #[test]
    fn interpolation_hits_off_grid_points() {
        let th = grid(64);
        let v: Vec<Complex64> = th.iter().map(|t| Complex64::new((3.0 * t).sin(), t.cos())).collect();
        let c = forward(&v);
        let t: f64 = 0.123;
        let expect = Complex64::new((3.0 * t).sin(), t.cos());
        assert!((interpolate(&c, t) - expect).norm() < 1e-13);
        let dexp = Complex64::new(3.0 * (3.0 * t).cos(), -t.sin());
        assert!((interpolate_derivative(&c, t) - dexp).norm() < 1e-12);
    }
}
