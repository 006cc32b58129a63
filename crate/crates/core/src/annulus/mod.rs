//! Riemann–Hilbert problems on the annulus `A(q,1) = {q < |z| < 1}`.

mod global;
mod glue;
mod harmonic;
mod pompeiu;
mod quadrature;
mod radial;

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{locate_zeros, winding_number, BoundaryTrace, Domain, LocatedZero};
use crate::curves::CurveFamily;
use crate::error::{Error, Result};
use crate::newton::NewtonCertificate;

pub use global::{solve_annulus, AnnulusOptions, AnnulusProblem, LaurentPair, NeumannOptions};
pub use glue::{glue_construct, GlueOptions, GlueReport, GluedFunction};
pub use harmonic::{harmonic_extend_annulus, LaurentHarmonic};
pub use pompeiu::{dbar_fd, smoothstep, smoothstep_derivative, Cutoff, Density, PompeiuOperator};
pub use quadrature::GaussLegendre;
pub use radial::{solve_annulus_radial, solve_annulus_radial_with_zeros, RadialOptions};

/// Transition bands of the two cutoffs, in `t = ln|z| / ln q`.
///
/// The outer cutoff falls from 1 to 0 over `outer_band`, so the outer collar
/// is `{|z| > q^{outer_band.1}}`; the inner cutoff rises over `inner_band`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarGeometry {
    pub outer_band: (f64, f64),
    pub inner_band: (f64, f64),
}

impl Default for CollarGeometry {
    fn default() -> Self {
        Self { outer_band: (0.25, 1.0 / 3.0), inner_band: (2.0 / 3.0, 0.75) }
    }
}

/// Annulus with its collar radii, cutoffs and band quadrature.
#[derive(Debug, Clone)]
pub struct AnnulusDomain {
    pub q: f64,
    /// `s0 = q^{1/3}`: inner edge of the outer collar.
    pub s0: f64,
    /// `s1 = q^{2/3}`: outer edge of the inner collar.
    pub s1: f64,
    pub grid: usize,
    pub geometry: CollarGeometry,
    pompeiu: PompeiuOperator,
}

impl AnnulusDomain {
    pub fn new(q: f64, grid: usize, geometry: CollarGeometry, radial_order: usize, panels: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidInput(format!("annulus parameter q = {q} outside (0, 1)")));
        }
        let (a, b) = geometry.outer_band;
        let (c, d) = geometry.inner_band;
        if !(0.0 < a && a < b && b < c && c < d && d < 1.0) {
            return Err(Error::InvalidInput(format!("collar bands {geometry:?} are not ordered inside (0, 1)")));
        }
        crate::boundary::BoundaryGrid::new(grid)?;
        let mut domain = Self {
            q,
            s0: q.powf(b),
            s1: q.powf(c),
            grid,
            geometry,
            pompeiu: PompeiuOperator::new(Vec::new(), grid, radial_order, panels),
        };
        let (c0, c1) = domain.cutoffs();
        domain.pompeiu.bands = vec![c0.band(), c1.band()];
        Ok(domain)
    }

    pub fn cutoffs(&self) -> (Cutoff, Cutoff) {
        let g = self.geometry;
        (
            Cutoff { q: self.q, t_start: g.outer_band.0, t_end: g.outer_band.1, outer: true },
            Cutoff { q: self.q, t_start: g.inner_band.0, t_end: g.inner_band.1, outer: false },
        )
    }

    pub fn pompeiu(&self) -> &PompeiuOperator {
        &self.pompeiu
    }

    /// Radial nodes `r_i` of a band with area weights `2 pi r_i w_i`.
    pub fn band_area_weights(&self, band: usize) -> Vec<(f64, f64)> {
        let (a, b) = self.pompeiu.bands[band];
        self.pompeiu
            .radial_nodes(a, b)
            .into_iter()
            .map(|(r, w)| (r, 2.0 * std::f64::consts::PI * r * w))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Windings {
    /// Winding of `f` along `|z| = 1`, counterclockwise.
    pub gamma0: i64,
    /// Winding along `|z| = q` traversed clockwise, as part of the oriented boundary.
    pub gamma1_coherent: i64,
    /// Winding along `|z| = q` traversed counterclockwise.
    pub gamma1_disc: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryResiduals {
    pub gamma0: f64,
    pub gamma1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Radial,
    Glue,
}

#[derive(Debug, Clone)]
pub struct AnnulusSolution {
    pub q: f64,
    pub method: SolveMethod,
    /// Boundary values on `|z| = 1` and on `|z| = q`.
    pub traces: [BoundaryTrace; 2],
    pub families: [CurveFamily; 2],
    pub windings: Windings,
    pub zeros: Vec<LocatedZero>,
    pub residuals: BoundaryResiduals,
    pub glue: Option<GlueReport>,
    pub certificate: Option<NewtonCertificate>,
    pub newton_history: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusSummary {
    pub q: f64,
    pub method: SolveMethod,
    pub grid: usize,
    pub windings: Windings,
    pub zeros: Vec<LocatedZero>,
    pub residuals: BoundaryResiduals,
    pub glue: Option<GlueReport>,
    pub certificate: Option<NewtonCertificate>,
    pub newton_history: Vec<f64>,
}

/// Tolerance handed to the zero locator for annulus solutions.
pub const ZERO_TOLERANCE: f64 = 1e-12;

impl AnnulusSolution {
    pub(crate) fn assemble(
        q: f64,
        method: SolveMethod,
        traces: [BoundaryTrace; 2],
        families: [CurveFamily; 2],
        glue: Option<GlueReport>,
        certificate: Option<NewtonCertificate>,
        newton_history: Vec<f64>,
    ) -> Result<Self> {
        let gamma0 = winding_number(&traces[0])?;
        let gamma1_disc = winding_number(&traces[1])?;
        let zeros = locate_zeros(&traces, Domain::Annulus { q }, ZERO_TOLERANCE)?;
        let sup = |f: &CurveFamily, t: &BoundaryTrace| f.residuals(t).into_iter().map(f64::abs).fold(0.0, f64::max);
        let residuals = BoundaryResiduals { gamma0: sup(&families[0], &traces[0]), gamma1: sup(&families[1], &traces[1]) };
        Ok(Self {
            q,
            method,
            windings: Windings { gamma0, gamma1_coherent: -gamma1_disc, gamma1_disc },
            traces,
            families,
            zeros,
            residuals,
            glue,
            certificate,
            newton_history,
        })
    }

    pub fn residual_sup(&self) -> f64 {
        self.residuals.gamma0.max(self.residuals.gamma1)
    }

    pub fn summary(&self) -> AnnulusSummary {
        AnnulusSummary {
            q: self.q,
            method: self.method,
            grid: self.traces[0].len(),
            windings: self.windings,
            zeros: self.zeros.clone(),
            residuals: self.residuals,
            glue: self.glue.clone(),
            certificate: self.certificate.clone(),
            newton_history: self.newton_history.clone(),
        }
    }

    /// The solution multiplied by the unimodular constant that makes the
    /// Fourier coefficient of mode `gamma0` on `|z| = 1` real and positive.
    pub fn gauge_aligned(&self) -> Self {
        let c = self.traces[0].trig_coefficients().get(self.windings.gamma0);
        if c.norm() == 0.0 {
            return self.clone();
        }
        let rot = (c / c.norm()).conj();
        let traces = [self.traces[0].scale(rot), self.traces[1].scale(rot)];
        Self { traces, ..self.clone() }
    }

    /// Largest boundary distance to another pair of traces after aligning both gauges.
    pub fn gauge_distance(&self, other: &AnnulusSolution) -> f64 {
        let (a, b) = (self.gauge_aligned(), other.gauge_aligned());
        a.traces
            .iter()
            .zip(&b.traces)
            .flat_map(|(s, t)| s.values().iter().zip(t.values()).map(|(x, y): (&Complex64, &Complex64)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}
