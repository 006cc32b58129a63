//! Generic Newton iteration `x <- x - B(x) A(x)` through a right inverse, with
//! a sampled Begehr–Efendiev certificate `4 w1 (w1 + 1)(w2 + 1) w3 < 1`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonlinear equation `A(x) = 0` together with a right inverse of its derivative.
pub trait NewtonProblem {
    type Point: Clone;
    type Residual: Clone;

    fn residual(&self, x: &Self::Point) -> Result<Self::Residual>;
    /// `B(x) g` with `DA(x) B(x) g = g`.
    fn apply_right_inverse(&self, x: &Self::Point, g: &Self::Residual) -> Result<Self::Point>;
    /// `DA(x) v`.
    fn apply_derivative(&self, x: &Self::Point, v: &Self::Point) -> Result<Self::Residual>;

    fn point_norm(&self, x: &Self::Point) -> f64;
    fn residual_norm(&self, r: &Self::Residual) -> f64;
    /// Norm used for `w1`, `w2`, `w3` in the certificate.
    fn certificate_residual_norm(&self, r: &Self::Residual) -> f64 {
        self.residual_norm(r)
    }

    /// `x + t dx`.
    fn point_axpy(&self, x: &Self::Point, t: f64, dx: &Self::Point) -> Self::Point;
    /// `r + t s`.
    fn residual_axpy(&self, r: &Self::Residual, t: f64, s: &Self::Residual) -> Self::Residual;

    fn sample_residual(&self, rng: &mut ChaCha8Rng) -> Self::Residual;
    fn sample_point(&self, rng: &mut ChaCha8Rng) -> Self::Point;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementMethod {
    Sampled,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonCertificate {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub product: f64,
    pub certified: bool,
    pub measurement_method: MeasurementMethod,
    /// Cleared when damping was needed during the run.
    pub applicable: bool,
    /// Set when linear solves fell back to least squares.
    pub fallback: bool,
}

impl NewtonCertificate {
    pub fn from_omegas(omega1: f64, omega2: f64, omega3: f64, method: MeasurementMethod) -> Self {
        let product = 4.0 * omega1 * (omega1 + 1.0) * (omega2 + 1.0) * omega3;
        Self {
            omega1,
            omega2,
            omega3,
            product,
            certified: product < 1.0,
            measurement_method: method,
            applicable: true,
            fallback: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingOptions {
    pub seed: u64,
    pub directions: usize,
    pub pairs: usize,
    /// Radius of the ball around `x0` in which Lipschitz quotients are probed;
    /// `None` uses twice the first Newton step.
    pub radius: Option<f64>,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self { seed: 0x5eed, directions: 16, pairs: 8, radius: None }
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::SamplingFailed(format!("non-finite {what}")))
    }
}

pub fn certify<P: NewtonProblem>(problem: &P, x0: &P::Point, opts: &SamplingOptions) -> Result<NewtonCertificate> {
    let wrap = |e: Error| Error::SamplingFailed(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let a0 = problem.residual(x0).map_err(wrap)?;
    let omega3 = finite(problem.certificate_residual_norm(&a0), "residual norm")?;

    let mut omega1 = 0.0f64;
    for _ in 0..opts.directions.max(1) {
        let g = problem.sample_residual(&mut rng);
        let gn = problem.certificate_residual_norm(&g);
        if gn == 0.0 {
            continue;
        }
        let bg = problem.apply_right_inverse(x0, &g).map_err(wrap)?;
        omega1 = omega1.max(finite(problem.point_norm(&bg) / gn, "right-inverse quotient")?);
    }

    let radius = match opts.radius {
        Some(r) => r,
        None => {
            let step = problem.apply_right_inverse(x0, &a0).map_err(wrap)?;
            (2.0 * problem.point_norm(&step)).max(1e-6)
        }
    };
    let mut omega2 = 0.0f64;
    for _ in 0..opts.pairs {
        let d1 = problem.sample_point(&mut rng);
        let d2 = problem.sample_point(&mut rng);
        let v = problem.sample_point(&mut rng);
        let (n1, n2, nv) = (problem.point_norm(&d1), problem.point_norm(&d2), problem.point_norm(&v));
        if n1 == 0.0 || n2 == 0.0 || nv == 0.0 {
            continue;
        }
        let x1 = problem.point_axpy(x0, radius / n1, &d1);
        let x2 = problem.point_axpy(x0, -radius / n2, &d2);
        let dist = problem.point_norm(&problem.point_axpy(&x1, -1.0, &x2));
        if dist == 0.0 {
            continue;
        }
        let j1 = problem.apply_derivative(&x1, &v).map_err(wrap)?;
        let j2 = problem.apply_derivative(&x2, &v).map_err(wrap)?;
        let diff = problem.certificate_residual_norm(&problem.residual_axpy(&j1, -1.0, &j2));
        omega2 = omega2.max(finite(diff / (dist * nv), "Lipschitz quotient")?);
    }
    Ok(NewtonCertificate::from_omegas(omega1, omega2, omega3, MeasurementMethod::Sampled))
}

/// Step-length control: each step starts at `initial_step`; if the residual
/// grows the step is halved up to `max_halvings` times before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Damping {
    pub initial_step: f64,
    pub max_halvings: usize,
}

impl Default for Damping {
    fn default() -> Self {
        Self { initial_step: 1.0, max_halvings: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    pub sampling: Option<SamplingOptions>,
}

impl Default for IterateOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 40, damping: Damping::default(), sampling: Some(SamplingOptions::default()) }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome<X> {
    pub x: X,
    /// Residual norms, starting with the initial one.
    pub history: Vec<f64>,
    pub certificate: Option<NewtonCertificate>,
    pub damped: bool,
    pub stopped: bool,
}

impl<X> NewtonOutcome<X> {
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

pub fn iterate<P: NewtonProblem>(problem: &P, x0: P::Point, opts: &IterateOptions) -> Result<NewtonOutcome<P::Point>> {
    iterate_monitored(problem, x0, opts, &mut |_| false)
}

/// As [`iterate`], but `stop` is consulted on the initial point and after each
/// accepted step; returning `true` ends the run with `stopped` set.
pub fn iterate_monitored<P: NewtonProblem>(
    problem: &P,
    x0: P::Point,
    opts: &IterateOptions,
    stop: &mut dyn FnMut(&P::Point) -> bool,
) -> Result<NewtonOutcome<P::Point>> {
    let mut certificate = match &opts.sampling {
        Some(s) => Some(certify(problem, &x0, s)?),
        None => None,
    };
    let mut x = x0;
    let mut a = problem.residual(&x)?;
    let mut r = problem.residual_norm(&a);
    let mut history = vec![r];
    let mut damped = false;
    let mut stopped = stop(&x);
    while r > opts.tol && !stopped {
        if history.len() > opts.max_iter {
            return Err(Error::NoConvergence { iterations: opts.max_iter, history });
        }
        let dx = problem.apply_right_inverse(&x, &a)?;
        let mut t = opts.damping.initial_step;
        let mut halvings = 0;
        loop {
            let cand = problem.point_axpy(&x, -t, &dx);
            let ca = problem.residual(&cand)?;
            let cr = problem.residual_norm(&ca);
            if cr.is_finite() && (cr < r || halvings == 0 && cr == r) {
                x = cand;
                a = ca;
                r = cr;
                break;
            }
            if halvings == opts.damping.max_halvings {
                history.push(cr);
                return Err(Error::NoConvergence { iterations: history.len() - 1, history });
            }
            halvings += 1;
            damped = true;
            t *= 0.5;
        }
        history.push(r);
        stopped = stop(&x);
    }
    if damped {
        if let Some(c) = certificate.as_mut() {
            c.applicable = false;
        }
    }
    Ok(NewtonOutcome { x, history, certificate, damped, stopped })
}
