//! Two-point rearrangement across the midline and the variational
//! characterisation of `1/lambda_1` through the Green operator.

use hinged_plate::green::GreenOperator;
use hinged_plate::optimizer::{minimize, solve_density, DensityField, InitialWeight};
use hinged_plate::polarization::{
    polarization_inequality_gap, polarize, random_positive_field, theta1_quotient,
};
use hinged_plate::{Discretization, PlateConfig, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(f64, f64)> {
    let cfg = PlateConfig::default();
    let disc = Discretization::new(&cfg);
    let rule = disc.rule();
    let op = GreenOperator::new(&disc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let p = InitialWeight::Random(3).build(&disc.grid, &rule)?;
    let pair = solve_density(&disc, op.stiffness(), &p)?;
    let u = disc.to_grid(&pair.u);
    let at_u = theta1_quotient(&p, &u, &op)?;
    let mut best_random = f64::NEG_INFINITY;
    for _ in 0..50 {
        let v = random_positive_field(&disc.grid, &mut rng);
        best_random = best_random.max(theta1_quotient(&p, &v, &op)?);
    }
    println!("1/lambda1 = {:.12}", 1.0 / pair.lambda1);
    println!("quotient at u1 = {at_u:.12}");
    println!("best of 50 random fields = {best_random:.12}");

    let v = random_positive_field(&disc.grid, &mut rng);
    let vh = polarize(&v, &disc.grid)?;
    let diff = (vh.integrate(&disc.grid) - v.integrate(&disc.grid)).abs();
    println!("polarization keeps the integral: |diff| = {diff:.2e}");

    let uniform = DensityField::uniform(&disc.grid, &rule)?;
    let gap_random = polarization_inequality_gap(&uniform, &v, &op)?;
    let opt = minimize(&disc, uniform)?;
    let u_opt = disc.to_grid(&opt.final_pair.u);
    let gap_opt = polarization_inequality_gap(opt.final_density(), &u_opt, &op)?;
    println!("energy gain from polarizing a random field  = {gap_random:.3e}");
    println!("energy gain at the optimal pair             = {gap_opt:.3e}");
    Ok((1.0 / pair.lambda1 - at_u, gap_random))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
