//! Level lines of the first eigenfunction of an optimal plate, written as CSV.

use std::path::PathBuf;

use hinged_plate::contour::{level_sets, SampledField};
use hinged_plate::green::linspace;
use hinged_plate::io::{ensure_dir, write_levels_csv};
use hinged_plate::optimizer::{minimize, DensityField};
use hinged_plate::{Discretization, PlateConfig, Result};

pub fn run_example() -> Result<(PathBuf, usize)> {
    let cfg = PlateConfig::default();
    let disc = Discretization::new(&cfg);
    let trace = minimize(&disc, DensityField::uniform(&disc.grid, &disc.rule())?)?;
    let u = &trace.final_pair.u;
    let ell = cfg.ell();
    let f = SampledField::from_fn(linspace(0.0, std::f64::consts::PI, 121), linspace(-ell, ell, 41), |x, y| {
        u.value_at(x, y)
    });
    let lines = level_sets(&f, 10);
    for l in &lines {
        println!("level {:+.5}: {} points, {}", l.level, l.points.len(), if l.closed { "closed" } else { "open" });
    }
    let dir = std::env::temp_dir().join("hinged_plate_level_sets");
    ensure_dir(&dir)?;
    let path = dir.join("level_sets.csv");
    write_levels_csv(&path, &lines)?;
    println!("wrote {}", path.display());
    Ok((path, lines.len()))
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
