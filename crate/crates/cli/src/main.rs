//! Batch front end: `rhsolve solve|check-identity|sweep|demo-surjectivity`.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rhsolve::analysis::{check_identity, surjectivity_demo, IdentityReport};
use rhsolve::annulus::{
    glue_construct, solve_annulus, solve_annulus_radial, AnnulusOptions, AnnulusSolution, GlueOptions, RadialOptions,
};
use rhsolve::disc::{solve_disc, DiscOptions};
use rhsolve::newton::SamplingOptions;
use serde::Serialize;
use serde_json::json;

use config::{DomainSpec, Method, Overrides, Problem};
use output::Artifacts;

#[derive(Parser)]
#[command(name = "rhsolve", version, about = "Nonlinear Riemann-Hilbert problems on the disc and the annulus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `outputs.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<Problem, Failure> {
        let o = Overrides { out: self.out.as_deref(), seed: self.seed, grid: self.grid, tol: self.tol };
        config::load(&self.config, o).map_err(Failure::Config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write result.json, traces and history.
    Solve(Common),
    /// Solve an annulus problem with circle families and check the zero/flux identity.
    CheckIdentity(Common),
    /// Pre-Newton glue residual against the winding n.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        n_min: i64,
        #[arg(long, default_value_t = 12)]
        n_max: i64,
        /// Worker threads.
        #[arg(long, default_value_t = 4)]
        jobs: usize,
    },
    /// Realize flux targets by single-zero radial solutions.
    DemoSurjectivity(Common),
}

enum Failure {
    Config(String),
    Solve(String),
    Identity(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solve(_) => 2,
            Failure::Identity(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Solve(m) | Failure::Identity(m) => m,
        }
    }
}

fn solve_err(e: rhsolve::Error) -> Failure {
    Failure::Solve(e.to_string())
}

fn sampling(p: &Problem) -> SamplingOptions {
    SamplingOptions { seed: p.config.seed, ..Default::default() }
}

fn annulus_q(p: &Problem) -> Result<f64, Failure> {
    match p.config.domain {
        DomainSpec::Annulus { q } => Ok(q),
        DomainSpec::Disc => Err(Failure::Config("this command needs an annulus domain".into())),
    }
}

fn solve_annulus_problem(p: &Problem) -> Result<AnnulusSolution, Failure> {
    let q = annulus_q(p)?;
    let c = &p.config;
    let radial = match (c.method, &c.windings) {
        (Method::Radial, _) => true,
        (Method::Glue, _) => false,
        (Method::Auto, w) => !w.as_ref().is_some_and(|w| w.iter().all(|&n| n >= 0)),
    };
    if radial {
        let profile = |j: usize| {
            p.families[j]
                .radial_profile()
                .ok_or_else(|| Failure::Config(format!("family {j} is not a circle centred at 0; give windings")))
        };
        let (r0, r1) = (profile(0)?, profile(1)?);
        return solve_annulus_radial(&r0, &r1, q, &RadialOptions { grid: c.grid, psi: c.psi }).map_err(solve_err);
    }
    let w = c.windings.as_ref().unwrap();
    if w.iter().any(|&n| n < 0) {
        return Err(Failure::Config("glue solves need nonnegative windings".into()));
    }
    let opts = AnnulusOptions {
        glue: GlueOptions { grid: c.grid, ..Default::default() },
        tol: c.newton.tol,
        max_iter: c.newton.max_iter,
        damping: c.newton.damping(),
        sampling: Some(sampling(p)),
        ..Default::default()
    };
    solve_annulus((&p.families[0], &p.families[1]), (w[0], w[1]), q, &opts).map_err(solve_err)
}

fn solve(common: &Common) -> Result<(), Failure> {
    let p = common.load()?;
    let out = Artifacts::new(&p)?;
    let start = Instant::now();
    match p.config.domain {
        DomainSpec::Disc => {
            let n = p.config.windings.as_ref().map(|w| w[0]).ok_or(Failure::Config("disc solve needs windings".into()))?;
            let opts = DiscOptions {
                grid: p.config.grid,
                tol: p.config.newton.tol,
                max_iter: p.config.newton.max_iter,
                damping: p.config.newton.damping(),
                sampling: Some(sampling(&p)),
                ..Default::default()
            };
            let sol = solve_disc(&p.families[0], n, &opts).map_err(|e| {
                out.failure_history(&e);
                solve_err(e)
            })?;
            out.result(&json!({"command": "solve", "domain": p.config.domain, "grid": sol.f_trace.len(), "solution": sol.summary()}))?;
            out.trace(0, &sol.f_trace)?;
            out.history(&sol.newton_history)?;
        }
        DomainSpec::Annulus { .. } => {
            let sol = solve_annulus_problem(&p)?;
            out.result(&json!({"command": "solve", "domain": p.config.domain, "solution": sol.summary()}))?;
            out.annulus_traces(&sol)?;
            out.history(&sol.newton_history)?;
        }
    }
    out.metadata("solve", &common.config, start)
}

#[derive(Serialize)]
struct LabeledIdentity {
    #[serde(flatten)]
    report: IdentityReport,
    /// Windings declared in the configuration, when given.
    declared_windings: Option<Vec<i64>>,
    bound: f64,
}

fn identity(common: &Common) -> Result<(), Failure> {
    let p = common.load()?;
    annulus_q(&p)?;
    let out = Artifacts::new(&p)?;
    let start = Instant::now();
    let sol = solve_annulus_problem(&p)?;
    let mut report = check_identity(&sol).map_err(|e| Failure::Config(e.to_string()))?;
    // declared windings follow the boundary orientation; k1 is counted counterclockwise
    if let Some(w) = &p.config.windings {
        let k1 = -w[1];
        report.rhs += (k1 - report.k1) as f64;
        report.k1 = k1;
        report.diff = (report.lhs - report.rhs).abs();
        let zeros: i64 = report.zeros.iter().map(|z| z.mult as i64).sum();
        if zeros != w[0] - k1 {
            report.diff = report.diff.max(1.0);
        }
    }
    let bound = p.config.identity_bound;
    let labeled = LabeledIdentity { report, declared_windings: p.config.windings.clone(), bound };
    out.result(&json!({"command": "check-identity", "domain": p.config.domain, "solution": sol.summary()}))?;
    out.json("identity.json", &labeled)?;
    out.annulus_traces(&sol)?;
    out.metadata("check-identity", &common.config, start)?;
    if labeled.report.diff.is_nan() || labeled.report.diff > bound {
        return Err(Failure::Identity(format!("identity diff {:.3e} exceeds bound {bound:e}", labeled.report.diff)));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    n: i64,
    pre_newton_residual: f64,
    collar_norm: f64,
}

#[derive(Serialize)]
struct Fit {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

fn linear_fit(x: &[f64], y: &[f64]) -> Fit {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Fit { slope, intercept: my - slope * mx, r_squared }
}

fn sweep(common: &Common, n_min: i64, n_max: i64, jobs: usize) -> Result<(), Failure> {
    if n_min > n_max || n_min < 0 {
        return Err(Failure::Config(format!("empty or negative n range {n_min}..={n_max}")));
    }
    let p = common.load()?;
    let q = annulus_q(&p)?;
    let out = Artifacts::new(&p)?;
    let start = Instant::now();
    let ns: Vec<i64> = (n_min..=n_max).collect();
    let opts = GlueOptions {
        grid: p.config.grid,
        glue_threshold: f64::INFINITY,
        newton_basin_bound: f64::INFINITY,
        ..Default::default()
    };
    let jobs = jobs.max(1);
    let fams = (&p.families[0], &p.families[1]);
    let results: Vec<Result<SweepRow, rhsolve::Error>> = std::thread::scope(|s| {
        let workers: Vec<_> = (0..jobs)
            .map(|w| {
                let (ns, opts) = (&ns, &opts);
                s.spawn(move || {
                    ns.iter()
                        .enumerate()
                        .filter(|(i, _)| i % jobs == w)
                        .map(|(i, &n)| {
                            let row = glue_construct(fams, (n, n), q, opts).map(|g| SweepRow {
                                n,
                                pre_newton_residual: g.report.pre_newton_residual,
                                collar_norm: g.report.collar_norm,
                            });
                            (i, row)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut all: Vec<_> = workers.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect();
        all.sort_by_key(|(i, _)| *i);
        all.into_iter().map(|(_, r)| r).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>().map_err(solve_err)?;
    let fit = (rows.len() >= 2).then(|| {
        let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.pre_newton_residual.ln()).collect();
        linear_fit(&x, &y)
    });
    let mut csv = String::from("n,pre_newton_residual,collar_norm,fitted_slope\n");
    for r in &rows {
        csv.push_str(&format!("{},{:e},{:e},\n", r.n, r.pre_newton_residual, r.collar_norm));
    }
    if let Some(f) = &fit {
        csv.push_str(&format!("fit,,,{:e}\n", f.slope));
    }
    out.csv("sweep.csv", &csv)?;
    out.result(&json!({"command": "sweep", "domain": p.config.domain, "rows": rows, "fit": fit}))?;
    out.metadata("sweep", &common.config, start)
}

fn demo(common: &Common) -> Result<(), Failure> {
    let p = common.load()?;
    let q = annulus_q(&p)?;
    let out = Artifacts::new(&p)?;
    let start = Instant::now();
    let targets = p.config.targets.clone().unwrap_or_else(|| (0..10).map(|k| k as f64 / 10.0).collect());
    if let Some(t) = targets.iter().find(|t| !(0.0..1.0).contains(*t)) {
        return Err(Failure::Config(format!("target {t} outside [0, 1)")));
    }
    let points = surjectivity_demo(&targets, q, p.config.grid).map_err(solve_err)?;
    let mut csv = String::from("target,zero_count,phi_value,error\n");
    for pt in &points {
        csv.push_str(&format!("{},{},{:e},{:e}\n", pt.target, pt.zero_count, pt.phi_value, pt.error));
    }
    out.csv("surjectivity.csv", &csv)?;
    out.result(&json!({"command": "demo-surjectivity", "q": q, "points": points}))?;
    out.metadata("demo-surjectivity", &common.config, start)?;
    let worst = points.iter().map(|pt| pt.error).fold(0.0, f64::max);
    if worst.is_nan() || worst > p.config.identity_bound {
        return Err(Failure::Identity(format!("target error {worst:.3e} exceeds bound {:e}", p.config.identity_bound)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(c) => solve(c),
        Command::CheckIdentity(c) => identity(c),
        Command::Sweep { common, n_min, n_max, jobs } => sweep(common, *n_min, *n_max, *jobs),
        Command::DemoSurjectivity(c) => demo(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rhsolve: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
