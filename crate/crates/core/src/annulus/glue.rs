use num_complex::Complex64;
use serde::Serialize;

use super::pompeiu::Density;
use super::{AnnulusDomain, CollarGeometry};
use crate::boundary::{BoundaryGrid, BoundaryTrace, Domain, HolomorphicExtension};
use crate::curves::CurveFamily;
use crate::disc::{solve_disc, DiscOptions, DiscSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GlueOptions {
    pub grid: usize,
    /// Options of the two collar disc solves.
    pub disc: DiscOptions,
    pub geometry: CollarGeometry,
    pub radial_order: usize,
    pub radial_panels: usize,
    /// Largest admissible collar decay `max(s0^n0, (q/s1)^n1)`.
    pub glue_threshold: f64,
    /// Largest admissible pre-Newton residual.
    pub newton_basin_bound: f64,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self {
            grid: 256,
            disc: DiscOptions { sampling: None, ..Default::default() },
            geometry: CollarGeometry::default(),
            radial_order: 32,
            radial_panels: 1,
            glue_threshold: 0.5,
            newton_basin_bound: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlueReport {
    pub windings: (i64, i64),
    pub collar_radii: (f64, f64),
    pub grid: usize,
    /// `max(s0^n0, (q/s1)^n1)`.
    pub collar_decay: f64,
    /// Largest modulus of the collar solutions on the inner edges of their collars.
    pub collar_norm: f64,
    /// Largest modulus of `dbar f_n` on the transition bands.
    pub dbar_norm: f64,
    /// Largest modulus of the correction `u_n` on the boundary.
    pub correction_norm: f64,
    pub pre_newton_residual: f64,
}

/// The glued function `h_n = sum_j chi_j f_nj - T0(dbar sum_j chi_j f_nj)`.
#[derive(Debug, Clone)]
pub struct GluedFunction {
    pub q: f64,
    /// Boundary values on `|z| = 1` and on `|z| = q`.
    pub traces: [BoundaryTrace; 2],
    pub outer_collar: DiscSolution,
    /// Collar solution on `Gamma_1` in the coordinate `zeta = q / z`.
    pub inner_collar: DiscSolution,
    outer_ext: HolomorphicExtension,
    inner_ext: HolomorphicExtension,
    pub report: GlueReport,
}

impl GluedFunction {
    /// `f_n0(z)`.
    pub fn outer_collar_eval(&self, z: Complex64) -> Complex64 {
        self.outer_ext.eval(z)
    }

    /// `f_n1(z) = F_1(q / z)`.
    pub fn inner_collar_eval(&self, z: Complex64) -> Complex64 {
        self.inner_ext.eval(self.q / z)
    }

    /// Closed form of `h_n`: the Pompeiu correction cancels the cutoffs, leaving
    /// `F_0(z) + F_1(q/z) - F_1(0)`.
    pub fn direct_eval(&self, z: Complex64) -> Complex64 {
        self.outer_ext.eval(z) + self.inner_ext.eval(self.q / z) - self.inner_ext.eval(Complex64::new(0.0, 0.0))
    }
}

/// Values on `|z| = r` of `F(q/z)`, `F` holomorphic on the disc.
fn reflected_circle_values(ext: &HolomorphicExtension, q: f64, r: f64, m: usize) -> Vec<Complex64> {
    let v = ext.circle_values(q / r, m);
    (0..m).map(|j| v[(m - j) % m]).collect()
}

fn sup_residual(family: &CurveFamily, trace: &BoundaryTrace) -> f64 {
    family.residuals(trace).into_iter().map(f64::abs).fold(0.0, f64::max)
}

/// Builds an approximate annulus solution of winding `n0` on `|z| = 1` and
/// coherent winding `n1` on `|z| = q` from two collar disc solutions.
pub fn glue_construct(
    families: (&CurveFamily, &CurveFamily),
    windings: (i64, i64),
    q: f64,
    opts: &GlueOptions,
) -> Result<GluedFunction> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput(format!("annulus parameter q = {q} outside (0, 1)")));
    }
    let (n0, n1) = windings;
    let g = &opts.geometry;
    let (s0, s1) = (q.powf(g.outer_band.1), q.powf(g.inner_band.0));
    let collar_decay = s0.powi(n0 as i32).max((q / s1).powi(n1 as i32));
    if collar_decay >= opts.glue_threshold {
        return Err(Error::GlueTooCoarse(format!(
            "collar decay {collar_decay:.3e} at windings ({n0}, {n1}) is not below {:.3e}",
            opts.glue_threshold
        )));
    }
    let disc = DiscOptions { grid: opts.grid, ..opts.disc.clone() };
    let outer_collar = solve_disc(families.0, n0, &disc)?;
    let inner_collar = solve_disc(&families.1.reflected(), n1, &disc)?;
    let n = opts.grid.max(outer_collar.f_trace.len()).max(inner_collar.f_trace.len());
    let grid = BoundaryGrid::new(n)?;
    let outer_ext = HolomorphicExtension::from_traces(std::slice::from_ref(&outer_collar.f_trace), Domain::Disc)?;
    let inner_ext = HolomorphicExtension::from_traces(std::slice::from_ref(&inner_collar.f_trace), Domain::Disc)?;

    let domain = AnnulusDomain::new(q, n, *g, opts.radial_order, opts.radial_panels)?;
    let (c0, c1) = domain.cutoffs();
    let dbar_norm = std::cell::Cell::new(0.0f64);
    let density = |r: f64, m: usize| -> Vec<Complex64> {
        let d0 = 0.5 * c0.radial_derivative(r);
        let d1 = 0.5 * c1.radial_derivative(r);
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        if d0 != 0.0 {
            for (o, f) in out.iter_mut().zip(outer_ext.circle_values(r, m)) {
                *o += f * d0;
            }
        }
        if d1 != 0.0 {
            for (o, f) in out.iter_mut().zip(reflected_circle_values(&inner_ext, q, r, m)) {
                *o += f * d1;
            }
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o *= Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            dbar_norm.set(dbar_norm.get().max(o.norm()));
        }
        out
    };
    let (u0, u1) = domain.pompeiu().boundary_traces(&density as &Density, q, n);
    let correction_norm = u0.iter().chain(&u1).map(|v| v.norm()).fold(0.0, f64::max);

    let f0 = outer_ext.circle_values(1.0, n);
    let f1 = reflected_circle_values(&inner_ext, q, q, n);
    let h0 = BoundaryTrace::new(grid, f0.iter().zip(&u0).map(|(f, u)| f - u).collect())?;
    let h1 = BoundaryTrace::new(grid, f1.iter().zip(&u1).map(|(f, u)| f - u).collect())?;

    let m = 4 * n;
    let collar_norm = outer_ext
        .circle_values(s0, m)
        .iter()
        .chain(&inner_ext.circle_values(q / s1, m))
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let pre_newton_residual = sup_residual(families.0, &h0).max(sup_residual(families.1, &h1));
    let report = GlueReport {
        windings,
        collar_radii: (s0, s1),
        grid: n,
        collar_decay,
        collar_norm,
        dbar_norm: dbar_norm.get(),
        correction_norm,
        pre_newton_residual,
    };
    if pre_newton_residual.is_nan() || pre_newton_residual > opts.newton_basin_bound {
        return Err(Error::GlueTooCoarse(format!(
            "pre-Newton residual {pre_newton_residual:.3e} exceeds the basin bound {:.3e}",
            opts.newton_basin_bound
        )));
    }
    Ok(GluedFunction { q, traces: [h0, h1], outer_collar, inner_collar, outer_ext, inner_ext, report })
}
