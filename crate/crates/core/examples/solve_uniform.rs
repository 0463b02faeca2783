//! First eigenvalue of the homogeneous plate, checked against the
//! characteristic equation of the separated mode `sin(x) Y(y)`.

use hinged_plate::optimizer::{solve_density, DensityField};
use hinged_plate::{Discretization, PlateConfig, PlateParams, Result};

/// Determinant of the free-edge conditions for the y-even mode `sin(m x) Y(y)`
/// with `lambda = mu^2`, `m^2 > mu`.
fn free_edge_determinant(mu: f64, m: f64, sigma: f64, ell: f64) -> f64 {
    let a = m * m * (1.0 - sigma);
    let r1 = (m * m + mu).sqrt();
    let r2 = (m * m - mu).sqrt();
    -(mu + a).powi(2) * r2 * (r2 * ell).tanh() + (a - mu).powi(2) * r1 * (r1 * ell).tanh()
}

/// Smallest root in `mu` by bisection, returned as `lambda = mu^2`.
pub fn separated_eigenvalue(sigma: f64, ell: f64) -> f64 {
    let f = |mu| free_edge_determinant(mu, 1.0, sigma, ell);
    let (mut lo, mut hi) = (1e-6, 1.0 - 1e-12);
    assert!(f(lo) * f(hi) < 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    mu * mu
}

pub fn run_example() -> Result<(f64, f64)> {
    let cfg = PlateConfig::new(PlateParams::default())?;
    let disc = Discretization::new(&cfg);
    let p = DensityField::uniform(&disc.grid, &disc.rule())?;
    let pair = solve_density(&disc, &disc.stiffness()?, &p)?;
    let exact = separated_eigenvalue(cfg.sigma(), cfg.ell());
    println!("lambda1 (Galerkin)  = {:.15}", pair.lambda1);
    println!("lambda1 (separated) = {exact:.15}");
    println!("lambda2             = {:.6}", pair.lambda2.unwrap_or(f64::NAN));
    println!("residual            = {:e}", pair.residual);
    let u = &pair.u;
    println!("u(pi/2, 0) = {:.6}, u(pi/2, ell) = {:.6}", u.value_at(std::f64::consts::FRAC_PI_2, 0.0), u.value_at(std::f64::consts::FRAC_PI_2, cfg.ell()));
    Ok((pair.lambda1, exact))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
