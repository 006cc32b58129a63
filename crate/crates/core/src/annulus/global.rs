use std::cell::Cell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::glue::{glue_construct, GlueOptions};
use super::{AnnulusSolution, SolveMethod};
use crate::boundary::{holder_norms, spectral, BoundaryGrid, BoundaryTrace, HolomorphicExtension};
use crate::curves::{eta_decompose, CurveFamily, EtaDecomposition};
use crate::disc::log_step;
use crate::error::{Error, Result};
use crate::newton::{iterate, Damping, IterateOptions, NewtonProblem, SamplingOptions};

/// Truncation of the series `(I - E)^{-1} = sum_j E^j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannOptions {
    pub max_terms: usize,
    /// Contraction ratio above which the series is declared divergent.
    pub max_ratio: f64,
    /// Relative size of the remainder at which the series stops.
    pub rel_tol: f64,
    /// Remainders below this relative size are accepted even when they stall.
    pub roundoff_floor: f64,
    /// Remainders below this absolute size are accepted even when they stall.
    pub absolute_floor: f64,
}

impl Default for NeumannOptions {
    fn default() -> Self {
        Self { max_terms: 20, max_ratio: 0.9, rel_tol: 1e-14, roundoff_floor: 1e-12, absolute_floor: 1e-15 }
    }
}

#[derive(Debug, Clone)]
pub struct AnnulusOptions {
    pub glue: GlueOptions,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    pub sampling: Option<SamplingOptions>,
    pub neumann: NeumannOptions,
    /// Laurent modes per side in the least-squares fallback.
    pub fallback_modes: usize,
}

impl Default for AnnulusOptions {
    fn default() -> Self {
        Self {
            glue: GlueOptions::default(),
            tol: 1e-10,
            max_iter: 40,
            damping: Damping::default(),
            sampling: Some(SamplingOptions::default()),
            neumann: NeumannOptions::default(),
            fallback_modes: 80,
        }
    }
}

/// Holomorphic function on the annulus in the scaled Laurent basis:
/// `outer[k]` multiplies `z^k`, `inner[m-1]` multiplies `(q/z)^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPair {
    pub outer: Vec<Complex64>,
    pub inner: Vec<Complex64>,
}

impl LaurentPair {
    /// Cauchy projection of two boundary traces: non-negative modes from the
    /// outer circle, negative ones from the inner circle.
    pub fn from_traces(outer: &[Complex64], inner: &[Complex64]) -> Self {
        let n = outer.len();
        let c0 = spectral::forward(outer);
        let c1 = spectral::forward(inner);
        Self { outer: c0[..n / 2].to_vec(), inner: (1..n / 2).map(|m| c1[n - m]).collect() }
    }

    fn axpy(&self, t: f64, other: &Self) -> Self {
        let f = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x + t * y).collect();
        Self { outer: f(&self.outer, &other.outer), inner: f(&self.inner, &other.inner) }
    }

    pub fn extension(&self, q: f64) -> HolomorphicExtension {
        HolomorphicExtension::from_laurent(self.outer.clone(), self.inner.clone(), q)
    }
}

/// Newton problem `Psi(h) = (rho0(theta, h|Gamma0), rho1(theta, h|Gamma1)) = 0`
/// over holomorphic functions on the annulus.
pub struct AnnulusProblem {
    pub families: [CurveFamily; 2],
    /// The inner family seen from the collar coordinate `zeta = q / z`.
    reflected: CurveFamily,
    pub q: f64,
    pub grid: BoundaryGrid,
    pub neumann: NeumannOptions,
    pub fallback_modes: usize,
    fallback_used: Cell<bool>,
    max_terms_used: Cell<usize>,
}

fn reverse(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n).map(|j| v[(n - j) % n]).collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

struct Linearization {
    t0: Vec<Complex64>,
    t1: Vec<Complex64>,
    eta0: EtaDecomposition,
    eta1: EtaDecomposition,
}

impl AnnulusProblem {
    pub fn new(families: [CurveFamily; 2], q: f64, grid: BoundaryGrid, neumann: NeumannOptions, fallback_modes: usize) -> Self {
        let reflected = families[1].reflected();
        Self {
            families,
            reflected,
            q,
            grid,
            neumann,
            fallback_modes,
            fallback_used: Cell::new(false),
            max_terms_used: Cell::new(0),
        }
    }

    /// Whether any linear solve fell back to least squares.
    pub fn fallback_used(&self) -> bool {
        self.fallback_used.get()
    }

    /// Largest number of Neumann terms used by a linear solve.
    pub fn neumann_terms(&self) -> usize {
        self.max_terms_used.get()
    }

    pub fn traces(&self, x: &LaurentPair) -> (Vec<Complex64>, Vec<Complex64>) {
        let ext = x.extension(self.q);
        let n = self.grid.node_count();
        (ext.circle_values(1.0, n), ext.circle_values(self.q, n))
    }

    fn linearize(&self, x: &LaurentPair) -> Result<Linearization> {
        let (t0, t1) = self.traces(x);
        let eta0 = eta_decompose(&self.families[0], &BoundaryTrace::from_parts_unchecked(self.grid, t0.clone()))?;
        let eta1 = eta_decompose(&self.reflected, &BoundaryTrace::from_parts_unchecked(self.grid, reverse(&t1)))?;
        Ok(Linearization { t0, t1, eta0, eta1 })
    }

    fn derivative_at(&self, t0: &[Complex64], t1: &[Complex64], v: &LaurentPair) -> Vec<f64> {
        let (v0, v1) = self.traces(v);
        let mut out = Vec::with_capacity(2 * v0.len());
        for (fam, t, v) in [(&self.families[0], t0, &v0), (&self.families[1], t1, &v1)] {
            out.extend(t.iter().zip(v).enumerate().map(|(j, (t, v))| 2.0 * (fam.d_w(self.grid.node(j), *t) * v).re));
        }
        out
    }

    /// Sum of the collar right inverses minus the Pompeiu correction of their
    /// cutoff sum. By the Cauchy–Pompeiu formula this is the Cauchy projection
    /// of `H0` (outer circle) and `H1` (inner circle).
    fn b_hat(&self, lin: &Linearization, g: &[f64]) -> LaurentPair {
        let n = self.grid.node_count();
        let s0 = log_step(&lin.eta0, &g[..n]);
        let h0: Vec<Complex64> = lin.t0.iter().zip(&s0).map(|(t, s)| t * s).collect();
        let g1: Vec<f64> = (0..n).map(|j| g[n + (n - j) % n]).collect();
        let s1 = reverse(&log_step(&lin.eta1, &g1));
        let h1: Vec<Complex64> = lin.t1.iter().zip(&s1).map(|(t, s)| t * s).collect();
        LaurentPair::from_traces(&h0, &h1)
    }

    fn neumann_solve(&self, lin: &Linearization, g: &[f64]) -> Result<LaurentPair> {
        let gn = sup(g);
        let mut total = self.b_hat(lin, g);
        if gn == 0.0 {
            return Ok(total);
        }
        let mut e: Vec<f64> = g.to_vec();
        let mut en = gn;
        let mut v = total.clone();
        for term in 1..=self.neumann.max_terms {
            let dv = self.derivative_at(&lin.t0, &lin.t1, &v);
            e = e.iter().zip(&dv).map(|(a, b)| a - b).collect();
            let next = sup(&e);
            if next <= self.neumann.rel_tol * gn {
                self.max_terms_used.set(self.max_terms_used.get().max(term));
                return Ok(total);
            }
            let ratio = next / en;
            if ratio > self.neumann.max_ratio {
                if next <= self.neumann.roundoff_floor * gn || next <= self.neumann.absolute_floor {
                    self.max_terms_used.set(self.max_terms_used.get().max(term));
                    return Ok(total);
                }
                return Err(Error::NeumannDiverges { ratio, terms: term });
            }
            en = next;
            v = self.b_hat(lin, &e);
            total = total.axpy(1.0, &v);
        }
        Err(Error::NeumannDiverges { ratio: en / gn, terms: self.neumann.max_terms })
    }

    /// Least-squares solve of `DPsi v = g` over a truncated Laurent basis.
    fn least_squares(&self, lin: &Linearization, g: &[f64]) -> Result<LaurentPair> {
        let n = self.grid.node_count();
        let k = self.fallback_modes.min(n / 2 - 1);
        let zero = Complex64::new(0.0, 0.0);
        let mut basis = Vec::with_capacity(2 * (2 * k + 1));
        for idx in 0..=2 * k {
            for unit in [Complex64::new(1.0, 0.0), Complex64::i()] {
                let mut p = LaurentPair { outer: vec![zero; n / 2], inner: vec![zero; n / 2 - 1] };
                if idx <= k {
                    p.outer[idx] = unit;
                } else {
                    p.inner[idx - k - 1] = unit;
                }
                basis.push(p);
            }
        }
        let cols: Vec<Vec<f64>> = basis.iter().map(|p| self.derivative_at(&lin.t0, &lin.t1, p)).collect();
        let a = DMatrix::from_fn(2 * n, cols.len(), |i, j| cols[j][i]);
        let b = DVector::from_column_slice(g);
        let svd = a.svd(true, true);
        let eps = 1e-12 * svd.singular_values.max();
        let c = svd.solve(&b, eps).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let mut out = LaurentPair { outer: vec![zero; n / 2], inner: vec![zero; n / 2 - 1] };
        for (j, p) in basis.iter().enumerate() {
            out = out.axpy(c[j], p);
        }
        Ok(out)
    }

    fn residual_traces(&self, r: &[f64]) -> (BoundaryTrace, BoundaryTrace) {
        let n = self.grid.node_count();
        let real = |v: &[f64]| BoundaryTrace::from_parts_unchecked(self.grid, v.iter().map(|&x| Complex64::new(x, 0.0)).collect());
        (real(&r[..n]), real(&r[n..]))
    }
}

impl NewtonProblem for AnnulusProblem {
    type Point = LaurentPair;
    type Residual = Vec<f64>;

    fn residual(&self, x: &LaurentPair) -> Result<Vec<f64>> {
        let (t0, t1) = self.traces(x);
        let mut out = self.families[0].residuals(&BoundaryTrace::from_parts_unchecked(self.grid, t0));
        out.extend(self.families[1].residuals(&BoundaryTrace::from_parts_unchecked(self.grid, t1)));
        Ok(out)
    }

    fn apply_right_inverse(&self, x: &LaurentPair, g: &Vec<f64>) -> Result<LaurentPair> {
        let lin = self.linearize(x)?;
        match self.neumann_solve(&lin, g) {
            Ok(v) => Ok(v),
            Err(Error::NeumannDiverges { .. }) => {
                self.fallback_used.set(true);
                self.least_squares(&lin, g)
            }
            Err(e) => Err(e),
        }
    }

    fn apply_derivative(&self, x: &LaurentPair, v: &LaurentPair) -> Result<Vec<f64>> {
        let (t0, t1) = self.traces(x);
        Ok(self.derivative_at(&t0, &t1, v))
    }

    fn point_norm(&self, x: &LaurentPair) -> f64 {
        let (t0, t1) = self.traces(x);
        t0.iter().chain(&t1).map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn residual_norm(&self, r: &Vec<f64>) -> f64 {
        sup(r)
    }

    fn certificate_residual_norm(&self, r: &Vec<f64>) -> f64 {
        let (a, b) = self.residual_traces(r);
        holder_norms(&a, 0.5).c1_alpha.max(holder_norms(&b, 0.5).c1_alpha)
    }

    fn point_axpy(&self, x: &LaurentPair, t: f64, dx: &LaurentPair) -> LaurentPair {
        x.axpy(t, dx)
    }

    fn residual_axpy(&self, r: &Vec<f64>, t: f64, s: &Vec<f64>) -> Vec<f64> {
        r.iter().zip(s).map(|(a, b)| a + t * b).collect()
    }

    fn sample_residual(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.grid.node_count());
        for _ in 0..2 {
            let modes: Vec<(f64, f64)> = (0..=8)
                .map(|k| {
                    let s = 1.0 / (1.0 + k as f64);
                    (s * rng.gen_range(-1.0..1.0), s * rng.gen_range(-1.0..1.0))
                })
                .collect();
            out.extend(self.grid.nodes().map(|t| {
                modes.iter().enumerate().map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin()).sum::<f64>()
            }));
        }
        out
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> LaurentPair {
        let n = self.grid.node_count();
        let mut draw = |len: usize| -> Vec<Complex64> {
            (0..len)
                .map(|k| {
                    if k <= 8 {
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + k as f64)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        };
        let outer = draw(n / 2);
        let inner = draw(n / 2 - 1);
        LaurentPair { outer, inner }
    }
}

/// Glues collar solutions of windings `(n0, n1)` and refines them by Newton's
/// method on the annulus.
pub fn solve_annulus(
    families: (&CurveFamily, &CurveFamily),
    windings: (i64, i64),
    q: f64,
    opts: &AnnulusOptions,
) -> Result<AnnulusSolution> {
    let glued = glue_construct(families, windings, q, &opts.glue)?;
    let grid = glued.traces[0].grid();
    let fams = [families.0.clone(), families.1.clone()];
    let problem = AnnulusProblem::new(fams.clone(), q, grid, opts.neumann, opts.fallback_modes);
    let x0 = LaurentPair::from_traces(glued.traces[0].values(), glued.traces[1].values());
    let it = IterateOptions { tol: opts.tol, max_iter: opts.max_iter, damping: opts.damping, sampling: opts.sampling };
    let out = iterate(&problem, x0, &it)?;
    let mut certificate = out.certificate;
    if let Some(c) = certificate.as_mut() {
        c.fallback = problem.fallback_used();
    }
    let (t0, t1) = problem.traces(&out.x);
    let traces = [BoundaryTrace::new(grid, t0)?, BoundaryTrace::new(grid, t1)?];
    AnnulusSolution::assemble(q, SolveMethod::Glue, traces, fams, Some(glued.report), certificate, out.history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{builtin_circle_family, TrigPoly};

    fn circle(r: f64) -> CurveFamily {
        builtin_circle_family(TrigPoly::constant(0.0), TrigPoly::constant(r)).unwrap()
    }

    #[test]
    fn unit_circles_converge_quadratically() {
        let (a, b) = (circle(1.0), circle(1.0));
        let sol = solve_annulus((&a, &b), (6, 6), 0.5, &AnnulusOptions::default()).unwrap();
        assert!(sol.residual_sup() < 1e-10, "{:?}", sol.newton_history);
        assert_eq!(sol.windings.gamma0, 6);
        assert_eq!(sol.windings.gamma1_coherent, 6);
        assert_eq!(sol.zeros.iter().map(|z| z.multiplicity).sum::<u32>(), 12);
        let cert = sol.certificate.unwrap();
        assert!(cert.product.is_finite());
        assert!(!cert.fallback);
    }

    #[test]
    fn neumann_series_is_a_right_inverse() {
        let (a, b) = (circle(1.0), circle(0.8));
        let q = 0.5;
        let glued = glue_construct((&a, &b), (5, 5), q, &GlueOptions::default()).unwrap();
        let grid = glued.traces[0].grid();
        let p = AnnulusProblem::new([a, b], q, grid, NeumannOptions::default(), 48);
        let x = LaurentPair::from_traces(glued.traces[0].values(), glued.traces[1].values());
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
        let g = p.sample_residual(&mut rng);
        let v = p.apply_right_inverse(&x, &g).unwrap();
        let back = p.apply_derivative(&x, &v).unwrap();
        let err = back.iter().zip(&g).map(|(u, w)| (u - w).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12 * sup(&g), "{err}");
        assert!(!p.fallback_used());
        assert!(p.neumann_terms() >= 2);
    }

    #[test]
    fn least_squares_fallback_is_flagged() {
        let (a, b) = (circle(1.0), circle(1.0));
        let q = 0.5;
        let glued = glue_construct((&a, &b), (6, 6), q, &GlueOptions::default()).unwrap();
        let grid = glued.traces[0].grid();
        let strict = NeumannOptions { max_ratio: 1e-6, ..Default::default() };
        let p = AnnulusProblem::new([a, b], q, grid, strict, 80);
        let x = LaurentPair::from_traces(glued.traces[0].values(), glued.traces[1].values());
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let g = p.sample_residual(&mut rng);
        let v = p.apply_right_inverse(&x, &g).unwrap();
        assert!(p.fallback_used());
        let back = p.apply_derivative(&x, &v).unwrap();
        let err = back.iter().zip(&g).map(|(u, w)| (u - w).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8 * sup(&g), "{err}");
    }
}
