//! Discrete Green function of the hinged plate: a few values and the full
//! certification battery at two resolutions.

use std::f64::consts::PI;

use hinged_plate::certify::CertificationReport;
use hinged_plate::green::{certify_green, GreenOperator};
use hinged_plate::{PlateConfig, PlateParams, Result};

pub fn run_example() -> Result<Vec<CertificationReport>> {
    let cfg = PlateConfig::default();
    let op = GreenOperator::from_config(&cfg)?;
    let src = (PI / 4.0, 0.0);
    for x in [0.1, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI - 0.1] {
        println!("G({x:.3}, 0; pi/4, 0) = {:.6e}", op.kernel((x, 0.0), src));
    }
    let gx = op.green_dx(PI / 2.0, &[0.0], &[(PI / 4.0, 0.0), (PI / 2.0, 0.0), (3.0 * PI / 4.0, 0.0)]);
    println!("G_x(pi/2, 0; rho, 0) at rho = pi/4, pi/2, 3pi/4: {:.3e} {:.3e} {:.3e}", gx[0], gx[1], gx[2]);

    let mut all = Vec::new();
    for m in [20, 2] {
        let cfg = PlateConfig::new(PlateParams {
            n_modes_x: m,
            ..Default::default()
        })?;
        for r in certify_green(&cfg, 5)? {
            println!("{:<5} {:<28} {:>10.3e}  [{}]", r.pass, r.claim_id, r.min_margin, r.resolution);
            all.push(r);
        }
    }
    Ok(all)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
