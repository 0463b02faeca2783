//! Rearrangement iteration from four different starting densities.

use hinged_plate::optimizer::{
    beta_region, midline_slope_check, mirror_mismatch, multistart, symmetry_classify, InitialWeight, SYMMETRY_TOL,
};
use hinged_plate::{Discretization, PlateConfig, Result};

pub fn run_example() -> Result<Vec<f64>> {
    let cfg = PlateConfig::default();
    let disc = Discretization::new(&cfg);
    let starts = InitialWeight::multistart(4, 11);
    let mut lambdas = Vec::new();
    for (start, trace) in starts.iter().zip(multistart(&disc, &starts)) {
        let trace = trace?;
        let u = &trace.final_pair.u;
        let class = symmetry_classify(&disc.to_grid(u), &disc.grid, SYMMETRY_TOL)?;
        let slope = midline_slope_check(&disc, u, SYMMETRY_TOL)?;
        let mirror = mirror_mismatch(trace.final_density(), &disc.grid);
        println!(
            "{:<10} {:>2} steps  lambda1 = {:.15}  {class}  |u_x(pi/2,y)| <= {:.2e}  mirror-mismatched nodes {}",
            start.name(),
            trace.records.len() - 1,
            trace.final_lambda(),
            slope.max_abs_slope,
            mirror.mismatched_nodes
        );
        for r in &trace.records {
            println!("    {:>2}  {:.15}  t = {:.6}", r.iter, r.lambda1, r.threshold_t);
        }
        lambdas.push(trace.final_lambda());
    }
    let disc_p = multistart(&disc, &[InitialWeight::Uniform]).remove(0)?;
    if let Some(b) = beta_region(disc_p.final_density(), &disc.grid) {
        println!("heavy material in x in [{:.4}, {:.4}], measure {:.6}", b.x_min, b.x_max, b.measure);
    }
    Ok(lambdas)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
