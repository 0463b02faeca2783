//! Runs every example and checks what it returns.

#![allow(dead_code)]

#[path = "../examples/solve_uniform.rs"]
mod solve_uniform;
#[path = "../examples/optimize_plate.rs"]
mod optimize_plate;
#[path = "../examples/green_certify.rs"]
mod green_certify;
#[path = "../examples/series_lab.rs"]
mod series_lab;
#[path = "../examples/polarization_duality.rs"]
mod polarization_duality;
#[path = "../examples/level_sets.rs"]
mod level_sets;
#[path = "../examples/narrow_plate.rs"]
mod narrow_plate;

#[test]
fn solve_uniform_matches_separated_mode() {
    let (galerkin, exact) = solve_uniform::run_example().unwrap();
    assert!((galerkin - exact).abs() < 1e-10 * exact);
}

#[test]
fn optimize_plate_starts_agree() {
    let l = optimize_plate::run_example().unwrap();
    assert_eq!(l.len(), 4);
    let lo = l.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((hi - lo) / lo <= 1e-8);
}

#[test]
fn green_certify_passes_at_both_resolutions() {
    let r = green_certify::run_example().unwrap();
    assert_eq!(r.len(), 24);
    assert!(r.iter().all(|r| r.pass));
}

#[test]
fn series_lab_root() {
    let z3 = series_lab::run_example().unwrap();
    assert!((z3 - 0.21).abs() < 0.005);
}

#[test]
fn polarization_duality_quotient_at_eigenfunction() {
    let (duality_gap, _) = polarization_duality::run_example().unwrap();
    assert!(duality_gap.abs() < 1e-10);
}

#[test]
fn level_sets_csv_written() {
    let (path, count) = level_sets::run_example().unwrap();
    assert!(count >= 10);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("level,line,point,x,y,closed\n"));
}

#[test]
fn narrow_plate_heavy_set_is_central() {
    let (lambda, beta) = narrow_plate::run_example().unwrap();
    assert!(lambda > 0.0);
    assert!(beta.contains_midline);
}
