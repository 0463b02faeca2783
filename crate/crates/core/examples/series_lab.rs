//! Sine series with positive decreasing coefficients, and the constants
//! that control their sign near the endpoints.

use std::f64::consts::PI;

use hinged_plate::series::{
    certify_s1_positive, certify_s2_negative, constant_cbar_n, constant_cn, eval_s1, open_grid, upsilon, z_root,
    zbar_root, CoefficientSequence, SeriesFamily,
};
use hinged_plate::Result;

pub fn run_example() -> Result<f64> {
    let zs = open_grid(999, PI);
    for family in SeriesFamily::standard() {
        let seq = CoefficientSequence::standard(family);
        let s1 = certify_s1_positive(&seq, &zs)?;
        let s2 = certify_s2_negative(&seq, &zs)?;
        println!(
            "{:<11} S1 > 0: {} (margin {:.2e})   S2 < 0: {} (margin {:.2e})",
            family.name(),
            s1.pass,
            s1.min_margin,
            s2.pass,
            s2.min_margin
        );
    }
    let harmonic = CoefficientSequence::standard(SeriesFamily::Harmonic);
    let mid = eval_s1(&harmonic, PI / 2.0, harmonic.len())?;
    println!("S1(pi/2) = {:.12} +- {:.1e}, pi^3/32 = {:.12}", mid.partial, mid.tail_bound, PI.powi(3) / 32.0);
    for n in [3, 5, 11, 51] {
        println!(
            "N = {n:>2}: C_N = {:.6} (1/N = {:.6})  Cbar_N = {:.6} (4/(3(N+1)) = {:.6})",
            constant_cn(n)?,
            1.0 / n as f64,
            constant_cbar_n(n)?,
            4.0 / (3.0 * (n + 1) as f64)
        );
    }
    let z3 = z_root(3)?;
    println!("z_3 = {z3:.6} from C_3, {:.6} from Cbar_3", zbar_root(3)?);
    let worst = (3..=50)
        .flat_map(|m| open_grid(200, PI / 51.0).into_iter().map(move |z| (m, z)))
        .map(|(m, z)| upsilon(m, z).expect("m >= 3"))
        .fold(f64::INFINITY, f64::min);
    println!("min upsilon_m(z), m = 3..50, z in (0, pi/51): {worst:.3e}");
    Ok(z3)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
