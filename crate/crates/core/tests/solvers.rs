use num_complex::Complex64;
use rhsolve::annulus::{solve_annulus, solve_annulus_radial, AnnulusOptions, RadialOptions, SolveMethod};
use rhsolve::boundary::{winding_number, BoundaryGrid, BoundaryTrace};
use rhsolve::curves::{builtin_circle_family, builtin_ellipse_family, divisor_transform, TrigPoly};
use rhsolve::disc::{solve_disc, DiscOptions};
use rhsolve::Error;

fn c(v: f64) -> TrigPoly {
    TrigPoly::constant(v)
}

#[test]
fn divisor_transform_carries_solutions_back() {
    let grid = BoundaryGrid::new(256).unwrap();
    let fam = builtin_ellipse_family(c(1.5), c(1.0), c(0.2)).unwrap();
    let m = BoundaryTrace::from_fn(grid, |t| Complex64::new(1.0, 0.0) + 0.2 * Complex64::from_polar(1.0, t)).unwrap();
    let moved = divisor_transform(&fam, &m).unwrap();
    let sol = solve_disc(&moved, 1, &DiscOptions { max_grid: 256, sampling: None, ..Default::default() }).unwrap();
    let back = BoundaryTrace::new(grid, sol.f_trace.values().iter().zip(m.values()).map(|(f, g)| f * g).collect()).unwrap();
    let res = fam.residuals(&back).into_iter().map(f64::abs).fold(0.0, f64::max);
    assert!(res < 1e-9, "{res}");
    assert_eq!(winding_number(&back).unwrap(), 1);
}

#[test]
fn negative_winding_is_rejected() {
    let fam = builtin_circle_family(c(0.0), c(1.0)).unwrap();
    assert!(matches!(solve_disc(&fam, -1, &DiscOptions::default()), Err(Error::InvalidInput(_))));
}

#[test]
fn annulus_summary_serializes_zero_positions() {
    let sol = solve_annulus_radial(&c(1.0), &TrigPoly::new(0.6, vec![0.1], vec![0.0]), 0.5, &RadialOptions::default()).unwrap();
    assert_eq!(sol.method, SolveMethod::Radial);
    let json = serde_json::to_value(sol.summary()).unwrap();
    let zeros = json["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), sol.zeros.len());
    for z in zeros {
        assert!(z["re"].is_f64() && z["im"].is_f64() && z["mult"].is_u64());
    }
}

#[test]
fn glued_solution_agrees_with_disc_collars() {
    let q = 0.5;
    let a = builtin_circle_family(c(0.0), TrigPoly::new(1.0, vec![0.1], vec![0.0])).unwrap();
    let b = builtin_circle_family(c(0.0), c(0.8)).unwrap();
    let sol = solve_annulus((&a, &b), (8, 8), q, &AnnulusOptions::default()).unwrap();
    assert_eq!(sol.method, SolveMethod::Glue);
    assert!(sol.residual_sup() < 1e-10);
    assert_eq!(sol.windings.gamma0, 8);
    assert_eq!(sol.windings.gamma1_coherent, -sol.windings.gamma1_disc);
    let zeros: u32 = sol.zeros.iter().map(|z| z.multiplicity).sum();
    assert_eq!(zeros as i64, sol.windings.gamma0 - sol.windings.gamma1_disc);
    let glue = sol.glue.as_ref().unwrap();
    assert!(glue.collar_decay < 0.5);
    assert!(sol.newton_history.len() <= 6);
}
