//! Riemann–Hilbert problem on the unit disc with the ansatz `f = z^n e^g`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{holder_norms, spectral, BoundaryGrid, BoundaryTrace, HolderNormReport};
use crate::curves::{eta_decompose, CurveFamily, EtaDecomposition, TrigPoly};
use crate::error::{Error, Result};
use crate::newton::{iterate_monitored, Damping, IterateOptions, NewtonCertificate, NewtonProblem, SamplingOptions};

/// Linear problem `2 Re(d_w rho(theta, f) h) = rhs` at a boundary trace `f`.
#[derive(Debug, Clone)]
pub struct LinearRHSystem {
    pub family: CurveFamily,
    /// `dbar_w rho(theta, f(theta))`.
    pub a_trace: BoundaryTrace,
    pub eta_dec: EtaDecomposition,
    pub rhs: BoundaryTrace,
}

impl LinearRHSystem {
    pub fn new(family: &CurveFamily, f_trace: &BoundaryTrace, rhs: BoundaryTrace) -> Result<Self> {
        let grid = f_trace.grid();
        let a: Vec<Complex64> =
            f_trace.values().iter().enumerate().map(|(j, &w)| family.d_wbar(grid.node(j), w)).collect();
        Ok(Self {
            family: family.clone(),
            a_trace: BoundaryTrace::new(grid, a)?,
            eta_dec: eta_decompose(family, f_trace)?,
            rhs,
        })
    }

    /// The Newton system with right-hand side `-rho(theta, f(theta))`.
    pub fn newton(family: &CurveFamily, f_trace: &BoundaryTrace) -> Result<Self> {
        let r: Vec<f64> = family.residuals(f_trace).into_iter().map(|v| -v).collect();
        Self::new(family, f_trace, BoundaryTrace::from_real(f_trace.grid(), &r)?)
    }
}

/// `h / f` for the right inverse: `(1/2) e^{b~ - i b} (phi + i T phi)` with
/// `phi = e^{-a - b~} g`.
pub(crate) fn log_step(eta: &EtaDecomposition, g_rhs: &[f64]) -> Vec<Complex64> {
    let phi: Vec<f64> = g_rhs
        .iter()
        .zip(eta.a.values().iter().zip(eta.b_tilde.values()))
        .map(|(g, (a, bt))| (-a.re - bt.re).exp() * g)
        .collect();
    let completed = spectral::holomorphic_completion(&phi);
    completed
        .iter()
        .zip(eta.b.values().iter().zip(eta.b_tilde.values()))
        .map(|(c, (b, bt))| 0.5 * Complex64::new(bt.re, -b.re).exp() * c)
        .collect()
}

/// Applies the explicit right inverse of `h -> 2 Re(d_w rho(., f) h)`.
pub fn right_inverse_apply(sys: &LinearRHSystem, f_trace: &BoundaryTrace, g_rhs: &BoundaryTrace) -> Result<BoundaryTrace> {
    let g = crate::boundary::require_real(g_rhs)?;
    let step = log_step(&sys.eta_dec, &g);
    let h = f_trace.values().iter().zip(&step).map(|(f, s)| f * s).collect();
    BoundaryTrace::new(f_trace.grid(), h)
}

/// Defect `2 Re(d_w rho(., f) h) - g` of a candidate solution `h`.
pub fn linear_defect(sys: &LinearRHSystem, h: &BoundaryTrace, g_rhs: &BoundaryTrace) -> f64 {
    sys.a_trace
        .values()
        .iter()
        .zip(h.values())
        .zip(g_rhs.values())
        .map(|((a, h), g)| (2.0 * (a.conj() * h).re - g.re).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub step_norm: f64,
    pub predicted_residual: f64,
    pub actual_residual: f64,
}

/// One Newton step of length `damping` from `f_trace`, using `sys.rhs` as the
/// right-hand side. The step is taken in the logarithm, `f -> f e^{t h / f}`.
pub fn newton_step_diagnostics(sys: &LinearRHSystem, f_trace: &BoundaryTrace, damping: f64) -> Result<StepDiagnostics> {
    let h = right_inverse_apply(sys, f_trace, &sys.rhs)?;
    let step_norm = damping * h.sup_norm();
    let grid = f_trace.grid();
    let rho = sys.family.residuals(f_trace);
    let mut predicted = 0.0f64;
    for (j, &r) in rho.iter().enumerate() {
        let lin = 2.0 * (sys.a_trace.values()[j].conj() * h.values()[j]).re;
        predicted = predicted.max((r + damping * lin).abs());
    }
    let moved: Vec<Complex64> = f_trace
        .values()
        .iter()
        .zip(h.values())
        .map(|(f, h)| f * (damping * h / f).exp())
        .collect();
    let moved = BoundaryTrace::new(grid, moved)?;
    let actual = sys.family.residuals(&moved).into_iter().map(f64::abs).fold(0.0, f64::max);
    Ok(StepDiagnostics { step_norm, predicted_residual: predicted, actual_residual: actual })
}

#[derive(Debug, Clone)]
pub struct DiscOptions {
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    pub sampling: Option<SamplingOptions>,
    /// Starting boundary values of `g`; defaults to the reference-radius fit.
    pub initial_guess: Option<BoundaryTrace>,
    /// The grid is doubled, up to this size, while `g` is not resolved.
    pub max_grid: usize,
}

impl Default for DiscOptions {
    fn default() -> Self {
        Self {
            grid: 256,
            tol: 1e-10,
            max_iter: 40,
            damping: Damping::default(),
            sampling: Some(SamplingOptions::default()),
            initial_guess: None,
            max_grid: 16384,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DiscSolution {
    pub winding: i64,
    pub g_trace: BoundaryTrace,
    pub f_trace: BoundaryTrace,
    pub residual_sup: f64,
    pub residual_holder: HolderNormReport,
    pub newton_history: Vec<f64>,
    pub certificate: Option<NewtonCertificate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscSummary {
    pub winding: i64,
    pub residual_sup: f64,
    pub newton_history: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<NewtonCertificate>,
}

impl DiscSolution {
    fn assemble(family: &CurveFamily, n: i64, g: BoundaryTrace, history: Vec<f64>, certificate: Option<NewtonCertificate>) -> Result<Self> {
        let f_trace = f_from_g(&g, n);
        let res = family.residuals(&f_trace);
        let residual_sup = res.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let residual_holder = holder_norms(&BoundaryTrace::from_real(g.grid(), &res)?, 0.5);
        Ok(Self { winding: n, g_trace: g, f_trace, residual_sup, residual_holder, newton_history: history, certificate })
    }

    pub fn summary(&self) -> DiscSummary {
        DiscSummary {
            winding: self.winding,
            residual_sup: self.residual_sup,
            newton_history: self.newton_history.clone(),
            certificate: self.certificate.clone(),
        }
    }

    /// The same solution rotated so that `Im g` has zero mean.
    pub fn gauge_aligned(&self) -> Self {
        let shift = Complex64::new(0.0, -self.g_trace.trig_coefficients().get(0).im);
        let g = self.g_trace.map(|_, v| v + shift);
        let f_trace = f_from_g(&g, self.winding);
        Self { g_trace: g, f_trace, ..self.clone() }
    }
}

/// `f_j = e^{i n theta_j} exp(g_j)`.
pub fn f_from_g(g: &BoundaryTrace, n: i64) -> BoundaryTrace {
    g.map(|t, v| Complex64::from_polar(1.0, n as f64 * t) * v.exp())
}

/// Newton problem in the unknown `g`; residual `rho(theta, z^n e^g)`.
pub struct DiscProblem {
    pub family: CurveFamily,
    pub n: i64,
    pub grid: BoundaryGrid,
}

impl DiscProblem {
    fn f_trace(&self, g: &[Complex64]) -> BoundaryTrace {
        f_from_g(&BoundaryTrace::from_parts_unchecked(self.grid, g.to_vec()), self.n)
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

impl NewtonProblem for DiscProblem {
    type Point = Vec<Complex64>;
    type Residual = Vec<f64>;

    fn residual(&self, g: &Vec<Complex64>) -> Result<Vec<f64>> {
        Ok(self.family.residuals(&self.f_trace(g)))
    }

    fn apply_right_inverse(&self, g: &Vec<Complex64>, r: &Vec<f64>) -> Result<Vec<Complex64>> {
        let eta = eta_decompose(&self.family, &self.f_trace(g))?;
        Ok(spectral::project_nonnegative(&log_step(&eta, r)))
    }

    fn apply_derivative(&self, g: &Vec<Complex64>, v: &Vec<Complex64>) -> Result<Vec<f64>> {
        let f = self.f_trace(g);
        Ok(f.values()
            .iter()
            .zip(v)
            .enumerate()
            .map(|(j, (f, v))| 2.0 * (self.family.d_w(self.grid.node(j), *f) * f * v).re)
            .collect())
    }

    fn point_norm(&self, x: &Vec<Complex64>) -> f64 {
        x.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn residual_norm(&self, r: &Vec<f64>) -> f64 {
        sup(r)
    }

    fn point_axpy(&self, x: &Vec<Complex64>, t: f64, dx: &Vec<Complex64>) -> Vec<Complex64> {
        x.iter().zip(dx).map(|(a, b)| a + t * b).collect()
    }

    fn residual_axpy(&self, r: &Vec<f64>, t: f64, s: &Vec<f64>) -> Vec<f64> {
        r.iter().zip(s).map(|(a, b)| a + t * b).collect()
    }

    fn sample_residual(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let modes: Vec<(f64, f64)> = (0..=8).map(|k| {
            let s = 1.0 / (1.0 + k as f64);
            (s * rng.gen_range(-1.0..1.0), s * rng.gen_range(-1.0..1.0))
        }).collect();
        self.grid
            .nodes()
            .map(|t| modes.iter().enumerate().map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin()).sum())
            .collect()
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let modes: Vec<Complex64> = (0..=8)
            .map(|k| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + k as f64))
            .collect();
        self.grid
            .nodes()
            .map(|t| modes.iter().enumerate().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * t)).sum())
            .collect()
    }
}

/// `u + i T u` with `u = log r(theta)`, `r` the radius of `gamma_theta` along the ray of angle `n theta`.
pub fn initial_guess(family: &CurveFamily, n: i64, grid: BoundaryGrid) -> Result<BoundaryTrace> {
    let u = grid
        .nodes()
        .map(|t| family.reference_radius(t, n as f64 * t).map(f64::ln))
        .collect::<Result<Vec<f64>>>()?;
    BoundaryTrace::new(grid, spectral::holomorphic_completion(&u))
}

/// Relative size of the upper half of the spectrum of `g` above which the grid is doubled.
pub const REFINE_TAIL: f64 = 1e-10;

pub fn solve_disc(family: &CurveFamily, n: i64, opts: &DiscOptions) -> Result<DiscSolution> {
    if n < 0 {
        return Err(Error::InvalidInput(format!("winding {n} is negative")));
    }
    let mut grid = BoundaryGrid::new(opts.grid)?;
    let mut g = match &opts.initial_guess {
        Some(g) if g.len() == opts.grid => g.values().to_vec(),
        Some(g) => return Err(Error::LengthMismatch { expected: opts.grid, got: g.len() }),
        None => initial_guess(family, n, grid)?.into_values(),
    };
    let mut history: Vec<f64> = Vec::new();
    let mut certificate = None;
    let mut damped = false;
    loop {
        let problem = DiscProblem { family: family.clone(), n, grid };
        let steps = history.len().saturating_sub(1);
        let it = IterateOptions {
            tol: opts.tol,
            max_iter: opts.max_iter.saturating_sub(steps),
            damping: opts.damping,
            sampling: if certificate.is_none() { opts.sampling } else { None },
        };
        let can_refine = 2 * grid.node_count() <= opts.max_grid;
        let mut stop = |x: &Vec<Complex64>| can_refine && spectral::spectral_tail(x) > REFINE_TAIL;
        let out = match iterate_monitored(&problem, g, &it, &mut stop) {
            Ok(out) => out,
            Err(Error::NoConvergence { history: h, .. }) => {
                history.pop();
                history.extend(h);
                return Err(Error::NoConvergence { iterations: history.len() - 1, history });
            }
            Err(e) => return Err(e),
        };
        history.pop();
        history.extend(&out.history);
        damped |= out.damped;
        if certificate.is_none() {
            certificate = out.certificate;
        }
        let converged = *history.last().unwrap() <= opts.tol;
        if converged || !out.stopped {
            if damped {
                if let Some(c) = certificate.as_mut() {
                    c.applicable = false;
                }
            }
            let g = BoundaryTrace::new(grid, out.x)?;
            return DiscSolution::assemble(family, n, g, history, certificate);
        }
        grid = BoundaryGrid::new(2 * grid.node_count())?;
        g = spectral::resample(&out.x, grid.node_count());
    }
}

/// Closed-form solution for `|f| = R(theta)`: `f = z^n exp(u + i T u)`, `u = log R`.
pub fn solve_disc_circle_closed_form(radius: &TrigPoly, n: i64, grid: BoundaryGrid) -> Result<DiscSolution> {
    let mut u = Vec::with_capacity(grid.node_count());
    for t in grid.nodes() {
        let r = radius.eval(t);
        if r <= 0.0 {
            return Err(Error::ZeroNotEnclosed { theta: t });
        }
        u.push(r.ln());
    }
    let g = BoundaryTrace::new(grid, spectral::holomorphic_completion(&u))?;
    let family = crate::curves::builtin_circle_family(TrigPoly::constant(0.0), radius.clone())?;
    DiscSolution::assemble(&family, n, g, vec![], None)
}

/// Largest `|d_theta rho + 2 Re(d_w rho f')|` along a trace: the boundary
/// condition differentiated in `theta`.
pub fn differentiated_boundary_defect(family: &CurveFamily, f_trace: &BoundaryTrace) -> f64 {
    let grid = f_trace.grid();
    let df = f_trace.derivative();
    f_trace
        .values()
        .iter()
        .zip(df.values())
        .enumerate()
        .map(|(j, (f, d))| {
            let t = grid.node(j);
            (family.d_theta(t, *f) + 2.0 * (family.d_w(t, *f) * d).re).abs()
        })
        .fold(0.0, f64::max)
}
