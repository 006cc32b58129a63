//! Zero location by argument-principle subdivision in `(log r, theta)` cells.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{winding_number, BoundaryTrace, Domain, HolomorphicExtension};
use crate::error::{Error, Result};

/// A located zero and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocatedZero {
    #[serde(flatten, with = "complex_re_im")]
    pub position: Complex64,
    #[serde(rename = "mult")]
    pub multiplicity: u32,
}

mod complex_re_im {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let v = ReIm::deserialize(d)?;
        Ok(Complex64::new(v.re, v.im))
    }
}

#[derive(Debug, Clone)]
pub struct ZeroSearchOptions {
    /// Seed of the jitter sequence applied to cut lines.
    pub seed: u64,
    pub max_retries: usize,
    /// Clusters of several zeros inside a cell this small are reported as one multiple zero.
    pub min_cell: f64,
    /// Search region stops this far (relative) from each boundary circle.
    pub boundary_gap: f64,
    pub max_cells: usize,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        Self { seed: 0x5eed, max_retries: 8, min_cell: 1e-7, boundary_gap: 1e-9, max_cells: 200_000 }
    }
}

#[derive(Debug, Clone, Copy)]
enum Cell {
    Central { r: f64 },
    Ring { r0: f64, r1: f64 },
    Sector { r0: f64, r1: f64, t0: f64, t1: f64 },
}

impl Cell {
    fn diameter(&self) -> f64 {
        match *self {
            Cell::Central { r } => 2.0 * r,
            Cell::Ring { r1, .. } => 2.0 * r1,
            Cell::Sector { r0, r1, t0, t1 } => {
                let a = Complex64::from_polar(r0, t0);
                let b = Complex64::from_polar(r1, t1);
                let c = Complex64::from_polar(r1, t0);
                let d = Complex64::from_polar(r0, t1);
                (a - b).norm().max((c - d).norm()).max(r1 * (t1 - t0).min(2.0 * PI))
            }
        }
    }

    fn center(&self) -> Complex64 {
        match *self {
            Cell::Central { .. } => Complex64::new(0.0, 0.0),
            Cell::Ring { r0, r1 } => Complex64::new((r0 * r1).sqrt(), 0.0),
            Cell::Sector { r0, r1, t0, t1 } => Complex64::from_polar((r0 * r1).sqrt(), 0.5 * (t0 + t1)),
        }
    }

    fn contains(&self, z: Complex64) -> bool {
        let slack = 1e-12;
        let r = z.norm();
        match *self {
            Cell::Central { r: rc } => r <= rc * (1.0 + slack),
            Cell::Ring { r0, r1 } => r >= r0 * (1.0 - slack) && r <= r1 * (1.0 + slack),
            Cell::Sector { r0, r1, t0, t1 } => {
                if r < r0 * (1.0 - slack) || r > r1 * (1.0 + slack) {
                    return false;
                }
                let mut t = z.arg();
                while t < t0 - slack {
                    t += 2.0 * PI;
                }
                while t > t0 + 2.0 * PI {
                    t -= 2.0 * PI;
                }
                t <= t1 + slack
            }
        }
    }
}

struct Counter<'a> {
    ext: &'a HolomorphicExtension,
    floor: f64,
}

impl Counter<'_> {
    /// Argument increment of `f(path(s))` for `s` in `[a, b]`, or `None` if the
    /// path runs too close to a zero to be resolved.
    fn increment(&self, path: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Option<f64> {
        const PIECES: usize = 32;
        let mut total = 0.0;
        let mut s0 = a;
        let mut f0 = self.value(path(s0))?;
        for i in 1..=PIECES {
            let s1 = a + (b - a) * i as f64 / PIECES as f64;
            let f1 = self.value(path(s1))?;
            total += self.refine(path, s0, f0, s1, f1, 0)?;
            s0 = s1;
            f0 = f1;
        }
        Some(total)
    }

    fn value(&self, z: Complex64) -> Option<Complex64> {
        let v = self.ext.eval(z);
        (v.norm() > self.floor).then_some(v)
    }

    fn refine(
        &self,
        path: &dyn Fn(f64) -> Complex64,
        s0: f64,
        f0: Complex64,
        s1: f64,
        f1: Complex64,
        depth: usize,
    ) -> Option<f64> {
        let whole = (f1 / f0).arg();
        let sm = 0.5 * (s0 + s1);
        let fm = self.value(path(sm))?;
        let left = (fm / f0).arg();
        let right = (f1 / fm).arg();
        if whole.abs() < 0.3 && (left + right - whole).abs() < 1e-6 {
            return Some(whole);
        }
        if depth > 40 {
            return None;
        }
        Some(self.refine(path, s0, f0, sm, fm, depth + 1)? + self.refine(path, sm, fm, s1, f1, depth + 1)?)
    }

    fn circle(&self, r: f64) -> Option<f64> {
        self.increment(&|t| Complex64::from_polar(r, t), 0.0, 2.0 * PI)
    }

    fn count(&self, cell: &Cell) -> Option<i64> {
        let turns = match *cell {
            Cell::Central { r } => self.circle(r)?,
            Cell::Ring { r0, r1 } => self.circle(r1)? - self.circle(r0)?,
            Cell::Sector { r0, r1, t0, t1 } => {
                let (l0, l1) = (r0.ln(), r1.ln());
                let mut sum = self.increment(&|t| Complex64::from_polar(r1, t), t0, t1)?;
                sum += self.increment(&|s| Complex64::from_polar((l1 + (l0 - l1) * s).exp(), t1), 0.0, 1.0)?;
                sum += self.increment(&|t| Complex64::from_polar(r0, t), t1, t0)?;
                sum += self.increment(&|s| Complex64::from_polar((l0 + (l1 - l0) * s).exp(), t0), 0.0, 1.0)?;
                sum
            }
        } / (2.0 * PI);
        let k = turns.round();
        ((turns - k).abs() < 0.1).then_some(k as i64)
    }
}

fn split(cell: &Cell, rng: &mut ChaCha8Rng) -> Vec<Cell> {
    let jitter = |rng: &mut ChaCha8Rng| rng.gen_range(-0.1..0.1);
    match *cell {
        Cell::Central { r } => {
            let inner = r * (0.5 + 0.5 * jitter(rng));
            vec![Cell::Central { r: inner }, Cell::Ring { r0: inner, r1: r }]
        }
        Cell::Ring { r0, r1 } => {
            let start = rng.gen_range(0.0..2.0 * PI);
            (0..4)
                .map(|i| {
                    let t0 = start + i as f64 * PI / 2.0;
                    Cell::Sector { r0, r1, t0, t1: t0 + PI / 2.0 }
                })
                .collect()
        }
        Cell::Sector { r0, r1, t0, t1 } => {
            let radial = (r1 / r0).ln();
            let angular = t1 - t0;
            if radial > angular {
                let cut = (r0.ln() + radial * (0.5 + jitter(rng))).exp();
                vec![Cell::Sector { r0, r1: cut, t0, t1 }, Cell::Sector { r0: cut, r1, t0, t1 }]
            } else {
                let cut = t0 + angular * (0.5 + jitter(rng));
                vec![Cell::Sector { r0, r1, t0, t1: cut }, Cell::Sector { r0, r1, t0: cut, t1 }]
            }
        }
    }
}

fn newton(ext: &HolomorphicExtension, start: Complex64, order: u32) -> Option<Complex64> {
    let mut z = start;
    for _ in 0..60 {
        let f = ext.derivative(z, order);
        let df = ext.derivative(z, order + 1);
        if df.norm() == 0.0 || !df.norm().is_finite() {
            return None;
        }
        let step = f / df;
        z -= step;
        if !z.norm().is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    Some(z)
}

/// Locates the zeros of the holomorphic extension of `traces` with default options.
pub fn locate_zeros(traces: &[BoundaryTrace], domain: Domain, tolerance: f64) -> Result<Vec<LocatedZero>> {
    locate_zeros_with(traces, domain, tolerance, &ZeroSearchOptions::default())
}

pub fn locate_zeros_with(
    traces: &[BoundaryTrace],
    domain: Domain,
    tolerance: f64,
    opts: &ZeroSearchOptions,
) -> Result<Vec<LocatedZero>> {
    let ext = HolomorphicExtension::from_traces(traces, domain)?;
    let expected = match domain {
        Domain::Disc => winding_number(&traces[0])?,
        Domain::Annulus { .. } => winding_number(&traces[0])? - winding_number(&traces[1])?,
    };
    if expected == 0 {
        return Ok(Vec::new());
    }
    if expected < 0 {
        return Err(Error::CountMismatch { expected, found: 0 });
    }
    let scale = traces.iter().map(BoundaryTrace::sup_norm).fold(0.0, f64::max);
    let counter = Counter { ext: &ext, floor: 1e-280 * scale };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let r_hi = 1.0 - opts.boundary_gap;
    let roots: Vec<Cell> = match domain {
        Domain::Disc => vec![Cell::Central { r: r_hi }],
        Domain::Annulus { q } => vec![Cell::Ring { r0: q * (1.0 + opts.boundary_gap), r1: r_hi }],
    };

    let mut stack: Vec<(Cell, i64)> = roots.into_iter().map(|c| (c, expected)).collect();
    let mut found: Vec<LocatedZero> = Vec::new();
    let mut processed = 0usize;

    while let Some((cell, count)) = stack.pop() {
        processed += 1;
        if processed > opts.max_cells {
            break;
        }
        if count == 1 && !matches!(cell, Cell::Ring { .. }) {
            if let Some(z) = newton(&ext, cell.center(), 0) {
                if cell.contains(z) && (z - cell.center()).norm() <= cell.diameter() {
                    found.push(LocatedZero { position: z, multiplicity: 1 });
                    continue;
                }
            }
        }
        if count > 1 && cell.diameter() < opts.min_cell {
            let order = (count - 1) as u32;
            let z = newton(&ext, cell.center(), order).filter(|z| cell.contains(*z)).unwrap_or(cell.center());
            found.push(LocatedZero { position: z, multiplicity: count as u32 });
            continue;
        }
        let mut accepted = None;
        for _ in 0..opts.max_retries {
            let children = split(&cell, &mut rng);
            let counts: Option<Vec<i64>> = children.iter().map(|c| counter.count(c)).collect();
            if let Some(counts) = counts {
                if counts.iter().sum::<i64>() == count && counts.iter().all(|&k| k >= 0) {
                    accepted = Some((children, counts));
                    break;
                }
            }
        }
        let Some((children, counts)) = accepted else {
            break;
        };
        stack.extend(children.into_iter().zip(counts).filter(|(_, k)| *k > 0));
    }

    let total: i64 = found.iter().map(|z| z.multiplicity as i64).sum();
    if total != expected {
        return Err(Error::CountMismatch { expected, found: total });
    }
    for z in &found {
        let residual = ext.eval(z.position).norm();
        if residual >= tolerance {
            return Err(Error::ZeroPolishFailed { re: z.position.re, im: z.position.im, residual });
        }
    }
    found.sort_by(|a, b| {
        a.position
            .norm()
            .total_cmp(&b.position.norm())
            .then(a.position.arg().total_cmp(&b.position.arg()))
    });
    Ok(found)
}
