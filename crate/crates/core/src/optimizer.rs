//! Rearrangement iteration for the smallest first eigenvalue over
//! two-material densities, and the symmetry diagnostics applied to its limit.
//!
//! Each step solves the eigenproblem for the current density and replaces the
//! density by the maximiser of `int p u^2` over the admissible family: light
//! material on the sublevel set of `u` with the prescribed measure, heavy
//! material elsewhere. On the grid this is a fractional knapsack over the
//! nodes, solved exactly by sorting; the one node straddling the target
//! measure gets the intermediate value that restores the total mass.

use std::f64::consts::PI;

use log::debug;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::AdmissibleWeightRule;
use crate::discretization::{check_bounds, Discretization, GridField, SpectralField};
use crate::eigen::{solve_first, Eigenpair};
use crate::error::{Error, Result};
use crate::quadrature::{CompensatedSum, QuadratureGrid};

/// Relative slack allowed on the monotone decrease of the eigenvalue.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Relative mass tolerance for admissible densities.
pub const MASS_TOL: f64 = 1e-10;

/// Default relative tolerance separating symmetric from dominant eigenfunctions.
pub const SYMMETRY_TOL: f64 = 1e-6;

/// An admissible weight: values in `[alpha, beta]`, mass equal to the area.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    field: GridField,
    rule: AdmissibleWeightRule,
    mass: f64,
}

impl DensityField {
    pub fn new(field: GridField, grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<Self> {
        check_bounds(&field, grid, rule)?;
        let mass = field.integrate(grid);
        if (mass - rule.target_mass).abs() > MASS_TOL * rule.target_mass {
            return Err(Error::DensityMass {
                mass,
                target: rule.target_mass,
            });
        }
        Ok(Self {
            field,
            rule: *rule,
            mass,
        })
    }

    pub fn uniform(grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<Self> {
        Self::new(GridField::constant(grid, 1.0), grid, rule)
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn rule(&self) -> &AdmissibleWeightRule {
        &self.rule
    }
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.field.get(i, k)
    }

    /// Nodes whose value is neither `alpha` nor `beta` (within `tol`).
    pub fn gray_nodes(&self, grid: &QuadratureGrid, tol: f64) -> Vec<(usize, usize)> {
        grid.indices()
            .filter(|&(i, k)| {
                let v = self.get(i, k);
                (v - self.rule.alpha).abs() > tol && (v - self.rule.beta).abs() > tol
            })
            .collect()
    }

    /// Measure of the nodes carrying the light material.
    pub fn light_measure(&self, grid: &QuadratureGrid) -> f64 {
        let mut acc = CompensatedSum::default();
        for (i, k) in grid.indices() {
            if self.get(i, k) == self.rule.alpha {
                acc.add(grid.weight(i, k));
            }
        }
        acc.value()
    }

    /// Measure of the nodes where two densities differ by more than `1e-12`.
    pub fn change_measure(&self, other: &DensityField, grid: &QuadratureGrid) -> f64 {
        let mut acc = CompensatedSum::default();
        for (i, k) in grid.indices() {
            if (self.get(i, k) - other.get(i, k)).abs() > 1e-12 {
                acc.add(grid.weight(i, k));
            }
        }
        acc.value()
    }
}

/// Output of one rearrangement step.
#[derive(Debug, Clone)]
pub struct Rearrangement {
    pub density: DensityField,
    /// `t` such that the light set is `{u <= sqrt(t)}` up to ties.
    pub threshold_t: f64,
    /// `sqrt(t)`, the value of `u` at the last node admitted to the light set.
    pub level: f64,
    /// Measure of the nodes assigned exactly `alpha`.
    pub s_measure: f64,
    /// The node straddling the target measure and its density value.
    pub gray_node: (usize, usize),
    pub gray_value: f64,
}

/// Bang-bang maximiser of `sum w p u^2` over admissible `p`.
///
/// Nodes enter the light set in ascending `(u, x, y)` order until the
/// cumulative weight reaches `sublevel_fraction * |Omega|`; the last admitted
/// node takes the value in `[alpha, beta]` that makes the mass exact.
pub fn rearrange(u: &GridField, rule: &AdmissibleWeightRule, grid: &QuadratureGrid) -> Result<Rearrangement> {
    u.check_grid(grid)?;
    for (i, k) in grid.indices() {
        let v = u.get(i, k);
        if !(v > 0.0) {
            return Err(Error::NonPositiveField { i, k, value: v });
        }
    }
    let mut order: Vec<(usize, usize)> = grid.indices().collect();
    order.sort_by(|&(i1, k1), &(i2, k2)| {
        u.get(i1, k1)
            .total_cmp(&u.get(i2, k2))
            .then(i1.cmp(&i2))
            .then(k1.cmp(&k2))
    });
    let target = rule.sublevel_measure();
    let total = grid.total_area();
    let mut admitted = CompensatedSum::default();
    let mut values = vec![rule.beta; grid.len()];
    let ny = grid.ny();
    let mut gray = None;
    for &(i, k) in &order {
        let w = grid.weight(i, k);
        let before = admitted.value();
        if before + w >= target {
            // alpha * before + beta * (total - before - w) + p * w = |Omega|
            let rest = total - before - w;
            let p = ((rule.target_mass - rule.alpha * before - rule.beta * rest) / w).clamp(rule.alpha, rule.beta);
            values[i * ny + k] = p;
            gray = Some(((i, k), p));
            break;
        }
        values[i * ny + k] = rule.alpha;
        admitted.add(w);
    }
    let ((gi, gk), gray_value) = gray.ok_or_else(|| Error::InvalidArgument("light-set target exceeds grid measure".into()))?;
    let level = u.get(gi, gk);
    let density = DensityField::new(GridField::new(grid.nx(), ny, values)?, grid, rule)?;
    let s_measure = density.light_measure(grid);
    Ok(Rearrangement {
        density,
        threshold_t: level * level,
        level,
        s_measure,
        gray_node: (gi, gk),
        gray_value,
    })
}

/// Built-in starting weights for the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitialWeight {
    Uniform,
    /// Heavy material on a strip centred at `x = pi/4`.
    LeftBeta,
    /// Heavy material on a strip centred at `x = 3 pi/4`.
    RightBeta,
    /// Independent uniform node values in `[alpha, beta]`, blended to the exact mass.
    Random(u64),
}

impl InitialWeight {
    pub fn name(&self) -> String {
        match self {
            InitialWeight::Uniform => "uniform".into(),
            InitialWeight::LeftBeta => "left-beta".into(),
            InitialWeight::RightBeta => "right-beta".into(),
            InitialWeight::Random(seed) => format!("random-{seed}"),
        }
    }

    /// The default multistart set: uniform, left, right, then random seeds.
    pub fn multistart(count: usize, seed: u64) -> Vec<InitialWeight> {
        let fixed = [InitialWeight::Uniform, InitialWeight::LeftBeta, InitialWeight::RightBeta];
        (0..count)
            .map(|s| fixed.get(s).copied().unwrap_or_else(|| InitialWeight::Random(seed + (s - fixed.len()) as u64)))
            .collect()
    }

    pub fn build(&self, grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<DensityField> {
        match *self {
            InitialWeight::Uniform => DensityField::uniform(grid, rule),
            InitialWeight::LeftBeta => strip_density(PI / 4.0, grid, rule),
            InitialWeight::RightBeta => strip_density(3.0 * PI / 4.0, grid, rule),
            InitialWeight::Random(seed) => random_density(seed, grid, rule),
        }
    }
}

/// Heavy material on the nodes closest (in x) to `center`.
pub fn strip_density(center: f64, grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<DensityField> {
    let score = GridField::from_fn(grid, |x, _| 2.0 * PI - (x - center).abs());
    Ok(rearrange(&score, rule, grid)?.density)
}

/// Random admissible density with i.i.d. node values, blended towards one
/// bound so the mass is exact.
pub fn random_density(seed: u64, grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<DensityField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = GridField::new(
        grid.nx(),
        grid.ny(),
        (0..grid.len()).map(|_| rng.random_range(rule.alpha..=rule.beta)).collect(),
    )?;
    let total = grid.total_area();
    let mass = q.integrate(grid);
    let (a, b) = (rule.alpha, rule.beta);
    let theta = (rule.target_mass - a * total) / (mass - a * total);
    let p = if theta <= 1.0 {
        q.map(|v| a + theta * (v - a))
    } else {
        let theta = (b * total - rule.target_mass) / (b * total - mass);
        q.map(|v| b - theta * (b - v))
    };
    DensityField::new(p, grid, rule)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub lambda1: f64,
    pub threshold_t: f64,
    pub s_measure: f64,
    /// Measure of the nodes changed by this iteration's rearrangement.
    pub density_change_measure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvergenceStatus {
    /// `|lambda^(i+1) - lambda^(i)| <= opt_tol * lambda^(i)`.
    EigenvalueStalled,
    /// The rearrangement reproduces the current density.
    FixedPoint,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct OptimizationTrace {
    pub records: Vec<IterationRecord>,
    /// `p^(i)` for every recorded iteration.
    pub densities: Vec<DensityField>,
    pub status: ConvergenceStatus,
    /// Accepted mirror-escape steps.
    pub escapes: usize,
    pub final_pair: Eigenpair,
    /// Rearrangement of the final eigenfunction; reproduces the final density at a fixed point.
    pub final_rearrangement: Rearrangement,
}

impl OptimizationTrace {
    pub fn final_lambda(&self) -> f64 {
        self.final_pair.lambda1
    }

    pub fn final_density(&self) -> &DensityField {
        self.densities.last().expect("trace always holds the initial density")
    }

    pub fn is_monotone(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].lambda1 <= w[0].lambda1 * (1.0 + MONOTONE_SLACK))
    }
}

/// Eigenpair for one density with a precomputed stiffness matrix.
pub fn solve_density(disc: &Discretization, k: &DMatrix<f64>, p: &DensityField) -> Result<Eigenpair> {
    let m = disc.weighted_mass(p.field())?;
    solve_first(k, &m, &disc.basis, disc.cfg.eig_tol())
}

/// Knobs for [`minimize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizeOptions {
    /// At a stall or fixed point, try the rearrangement of the mirror-averaged
    /// eigenfunction and continue from it when it lowers the eigenvalue.
    pub mirror_escape: bool,
    pub max_escapes: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            mirror_escape: true,
            max_escapes: 8,
        }
    }
}

/// Rearrangement of `(u(x, y) + u(pi - x, y)) / 2`.
pub fn mirror_candidate(u: &GridField, rule: &AdmissibleWeightRule, grid: &QuadratureGrid) -> Result<Rearrangement> {
    let mut avg = u.clone();
    for (i, k) in grid.indices() {
        avg.set(i, k, 0.5 * (u.get(i, k) + u.get(grid.mirror_x(i), k)));
    }
    rearrange(&avg, rule, grid)
}

/// Alternates eigen-solves and rearrangements from `initial`.
pub fn minimize(disc: &Discretization, initial: DensityField) -> Result<OptimizationTrace> {
    minimize_with(disc, initial, &MinimizeOptions::default())
}

pub fn minimize_with(disc: &Discretization, initial: DensityField, opts: &MinimizeOptions) -> Result<OptimizationTrace> {
    let grid = &disc.grid;
    let rule = disc.rule();
    let max_iter = disc.cfg.opt_max_iter();
    let tol = disc.cfg.opt_tol();
    let k = disc.stiffness()?;

    let mut density = initial;
    let mut pair = solve_density(disc, &k, &density)?;
    let mut records = Vec::new();
    let mut densities = Vec::new();
    let mut stalled = false;
    let mut escapes = 0;
    let mut iter = 0;
    loop {
        let nodes = disc.to_grid(&pair.u);
        let re = rearrange(&nodes, &rule, grid)?;
        let mut change = re.density.change_measure(&density, grid);
        let mut status = if stalled {
            Some(ConvergenceStatus::EigenvalueStalled)
        } else if change == 0.0 {
            Some(ConvergenceStatus::FixedPoint)
        } else if iter >= max_iter {
            Some(ConvergenceStatus::MaxIterations)
        } else {
            None
        };
        let mut next = None;
        if opts.mirror_escape
            && escapes < opts.max_escapes
            && iter < max_iter
            && matches!(status, Some(ConvergenceStatus::EigenvalueStalled | ConvergenceStatus::FixedPoint))
        {
            let cand = mirror_candidate(&nodes, &rule, grid)?;
            let cand_pair = solve_density(disc, &k, &cand.density)?;
            if cand_pair.lambda1 < pair.lambda1 * (1.0 - 1e-12) {
                debug!("iter {iter}: mirror escape {:.15} -> {:.15}", pair.lambda1, cand_pair.lambda1);
                escapes += 1;
                status = None;
                change = cand.density.change_measure(&density, grid);
                next = Some((cand.density, cand_pair));
            }
        }
        records.push(IterationRecord {
            iter,
            lambda1: pair.lambda1,
            threshold_t: re.threshold_t,
            s_measure: re.s_measure,
            density_change_measure: change,
        });
        debug!("iter {iter}: lambda1 = {:.15}, change = {change:e}", pair.lambda1);
        if let Some(status) = status {
            densities.push(density);
            return Ok(OptimizationTrace {
                records,
                densities,
                status,
                escapes,
                final_pair: pair,
                final_rearrangement: re,
            });
        }
        let (next_density, next_pair) = match next {
            Some(n) => n,
            None => {
                let p = solve_density(disc, &k, &re.density)?;
                (re.density, p)
            }
        };
        if next_pair.lambda1 > pair.lambda1 * (1.0 + MONOTONE_SLACK) {
            return Err(Error::MonotonicityViolation {
                iter: iter + 1,
                previous: pair.lambda1,
                next: next_pair.lambda1,
            });
        }
        stalled = (next_pair.lambda1 - pair.lambda1).abs() <= tol * pair.lambda1;
        densities.push(std::mem::replace(&mut density, next_density));
        pair = next_pair;
        iter += 1;
    }
}

/// Runs independent starts concurrently, results in input order.
pub fn multistart(disc: &Discretization, starts: &[InitialWeight]) -> Vec<Result<OptimizationTrace>> {
    multistart_with(disc, starts, &MinimizeOptions::default())
}

pub fn multistart_with(
    disc: &Discretization,
    starts: &[InitialWeight],
    opts: &MinimizeOptions,
) -> Vec<Result<OptimizationTrace>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = starts
            .iter()
            .map(|start| {
                scope.spawn(move || {
                    let p0 = start.build(&disc.grid, &disc.rule())?;
                    minimize_with(disc, p0, opts)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("optimizer worker panicked"))
            .collect()
    })
}

/// The three alternatives for a positive eigenfunction compared with its mirror image about `x = pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SymmetryClass {
    /// `u(x, y) > u(pi - x, y)` for `x < pi/2`.
    LeftDominant,
    /// `u(x, y) < u(pi - x, y)` for `x < pi/2`.
    RightDominant,
    Symmetric,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SymmetryClass::LeftDominant => "LEFT_DOMINANT",
            SymmetryClass::RightDominant => "RIGHT_DOMINANT",
            SymmetryClass::Symmetric => "SYMMETRIC",
        };
        f.write_str(s)
    }
}

/// Classifies node values by the mirror gaps `u(x, y) - u(pi - x, y)`, `x < pi/2`.
pub fn symmetry_classify(u: &GridField, grid: &QuadratureGrid, tol: f64) -> Result<SymmetryClass> {
    u.check_grid(grid)?;
    let scale = u.max_abs();
    let (mut max_gap, mut min_gap) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in grid.left_half() {
        let j = grid.mirror_x(i);
        for k in 0..grid.ny() {
            let g = u.get(i, k) - u.get(j, k);
            max_gap = max_gap.max(g);
            min_gap = min_gap.min(g);
        }
    }
    let band = tol * scale;
    if max_gap <= band && min_gap >= -band {
        Ok(SymmetryClass::Symmetric)
    } else if min_gap >= -band {
        Ok(SymmetryClass::LeftDominant)
    } else if max_gap <= band {
        Ok(SymmetryClass::RightDominant)
    } else {
        Err(Error::MixedSymmetry { max_gap, min_gap })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MidlineReport {
    pub class: SymmetryClass,
    /// `(y_k, u_x(pi/2, y_k))`.
    pub slopes: Vec<(f64, f64)>,
    pub max_abs_slope: f64,
}

/// Checks the sign of `u_x(pi/2, y)` against the symmetry class of `u`:
/// negative when left-dominant, positive when right-dominant, zero when symmetric.
pub fn midline_slope_check(disc: &Discretization, u: &SpectralField, tol: f64) -> Result<MidlineReport> {
    let grid = &disc.grid;
    let class = symmetry_classify(&disc.to_grid(u), grid, tol)?;
    let slope_scale = disc.dx_to_grid(u).max_abs();
    let slopes: Vec<(f64, f64)> = grid.nodes_y().iter().map(|&y| (y, u.dx_at(PI / 2.0, y))).collect();
    for &(y, s) in &slopes {
        let ok = match class {
            SymmetryClass::Symmetric => s.abs() <= tol * slope_scale,
            SymmetryClass::LeftDominant => s < 0.0,
            SymmetryClass::RightDominant => s > 0.0,
        };
        if !ok {
            return Err(Error::SlopeInconsistent {
                y,
                slope: s,
                class: class.to_string(),
            });
        }
    }
    let max_abs_slope = slopes.iter().fold(0.0f64, |a, &(_, s)| a.max(s.abs()));
    Ok(MidlineReport {
        class,
        slopes,
        max_abs_slope,
    })
}

/// Fraction of nodes satisfying each expected monotonicity sign of an optimal eigenfunction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConjectureReport {
    pub ux_positive_left: f64,
    pub ux_negative_right: f64,
    pub uy_positive_upper: f64,
    pub uy_negative_lower: f64,
    pub all_hold: bool,
}

pub fn conjecture_diagnostic(disc: &Discretization, u: &SpectralField) -> ConjectureReport {
    let grid = &disc.grid;
    let ux = disc.dx_to_grid(u);
    let uy = disc.dy_to_grid(u);
    let frac = |sel: &dyn Fn(usize, usize) -> bool, ok: &dyn Fn(usize, usize) -> bool| {
        let (mut n, mut good) = (0usize, 0usize);
        for (i, k) in grid.indices() {
            if sel(i, k) {
                n += 1;
                good += ok(i, k) as usize;
            }
        }
        if n == 0 {
            1.0
        } else {
            good as f64 / n as f64
        }
    };
    let half = PI / 2.0;
    let x = |i: usize| grid.nodes_x()[i];
    let y = |k: usize| grid.nodes_y()[k];
    let ux_positive_left = frac(&|i, _| x(i) < half, &|i, k| ux.get(i, k) > 0.0);
    let ux_negative_right = frac(&|i, _| x(i) > half, &|i, k| ux.get(i, k) < 0.0);
    let uy_positive_upper = frac(&|_, k| y(k) > 0.0, &|i, k| uy.get(i, k) > 0.0);
    let uy_negative_lower = frac(&|_, k| y(k) < 0.0, &|i, k| uy.get(i, k) < 0.0);
    ConjectureReport {
        ux_positive_left,
        ux_negative_right,
        uy_positive_upper,
        uy_negative_lower,
        all_hold: [ux_positive_left, ux_negative_right, uy_positive_upper, uy_negative_lower]
            .iter()
            .all(|&f| f == 1.0),
    }
}

/// Mirror comparison of a density about `x = pi/2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MirrorMismatch {
    /// Nodes whose value differs from the mirror node's.
    pub mismatched_nodes: usize,
    /// Mismatched nodes that are neither gray nor adjacent to a material interface.
    pub off_interface_nodes: usize,
    pub symmetric_within_cell: bool,
}

/// A density is symmetric within one quadrature cell when every node that
/// disagrees with its mirror is gray or touches the material interface.
pub fn mirror_mismatch(p: &DensityField, grid: &QuadratureGrid) -> MirrorMismatch {
    let (nx, ny) = (grid.nx(), grid.ny());
    let differs = |a: f64, b: f64| (a - b).abs() > 1e-9;
    let rule = p.rule();
    let is_gray = |v: f64| differs(v, rule.alpha) && differs(v, rule.beta);
    let mut mismatched = 0;
    let mut off = 0;
    for (i, k) in grid.indices() {
        let v = p.get(i, k);
        let w = p.get(grid.mirror_x(i), k);
        if !differs(v, w) {
            continue;
        }
        mismatched += 1;
        let near = |a: usize, b: usize| differs(p.get(a, b), v);
        let on_interface = (i > 0 && near(i - 1, k))
            || (i + 1 < nx && near(i + 1, k))
            || (k > 0 && near(i, k - 1))
            || (k + 1 < ny && near(i, k + 1));
        if !(is_gray(v) || is_gray(w) || on_interface) {
            off += 1;
        }
    }
    MirrorMismatch {
        mismatched_nodes: mismatched,
        off_interface_nodes: off,
        symmetric_within_cell: off == 0,
    }
}

/// Bounding box of the heavy-material nodes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BetaRegion {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub measure: f64,
    pub contains_midline: bool,
}

pub fn beta_region(p: &DensityField, grid: &QuadratureGrid) -> Option<BetaRegion> {
    let beta = p.rule().beta;
    let mut bbox: Option<(f64, f64, f64, f64)> = None;
    let mut measure = CompensatedSum::default();
    for (i, k) in grid.indices() {
        if p.get(i, k) != beta {
            continue;
        }
        let (x, y) = grid.node(i, k);
        measure.add(grid.weight(i, k));
        bbox = Some(match bbox {
            None => (x, x, y, y),
            Some((a, b, c, d)) => (a.min(x), b.max(x), c.min(y), d.max(y)),
        });
    }
    bbox.map(|(x_min, x_max, y_min, y_max)| BetaRegion {
        x_min,
        x_max,
        y_min,
        y_max,
        measure: measure.value(),
        contains_midline: x_min < PI / 2.0 && PI / 2.0 < x_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{PlateConfig, PlateParams};

    fn disc(m: usize, j: usize, qx: usize, qy: usize) -> Discretization {
        Discretization::new(
            &PlateConfig::new(PlateParams {
                n_modes_x: m,
                n_basis_y: j,
                n_quad_x: qx,
                n_quad_y: qy,
                ..Default::default()
            })
            .unwrap(),
        )
    }

    #[test]
    fn constant_field_fills_light_set_in_lexicographic_order() {
        let d = disc(2, 2, 8, 4);
        let u = GridField::constant(&d.grid, 2.0);
        let re = rearrange(&u, &d.rule(), &d.grid).unwrap();
        let (gi, gk) = re.gray_node;
        for (i, k) in d.grid.indices() {
            let v = re.density.get(i, k);
            if (i, k) < (gi, gk) {
                assert_eq!(v, d.rule().alpha);
            } else if (i, k) > (gi, gk) {
                assert_eq!(v, d.rule().beta);
            }
        }
        assert_eq!(re.level, 2.0);
        assert_eq!(re.threshold_t, 4.0);
    }

    #[test]
    fn sine_sublevel_set_is_two_edge_strips() {
        let d = disc(1, 1, 96, 8);
        let u = GridField::from_fn(&d.grid, |x, _| x.sin());
        let re = rearrange(&u, &d.rule(), &d.grid).unwrap();
        // |S| = 0.8 |Omega| forces the strips x < 0.4 pi and x > 0.6 pi
        let h = d.grid.max_spacing_x();
        let lo = (0.4 * PI - h).sin().powi(2);
        let hi = (0.4 * PI + h).sin().powi(2);
        assert!(re.threshold_t >= lo && re.threshold_t <= hi, "t = {}", re.threshold_t);
        for (i, k) in d.grid.indices() {
            let x = d.grid.nodes_x()[i];
            let v = re.density.get(i, k);
            if x < 0.4 * PI - h || x > 0.6 * PI + h {
                assert_eq!(v, d.rule().alpha);
            }
            if (x - PI / 2.0).abs() < 0.1 * PI - h {
                assert_eq!(v, d.rule().beta);
            }
        }
    }

    #[test]
    fn rearranged_density_is_admissible_and_exact() {
        let d = disc(3, 3, 24, 10);
        let u = GridField::from_fn(&d.grid, |x, y| x.sin() * (1.2 + y) + 0.1 * (3.0 * x).sin().abs());
        let re = rearrange(&u, &d.rule(), &d.grid).unwrap();
        let area = d.cfg.domain_area();
        assert!((re.density.mass() - area).abs() <= 10.0 * f64::EPSILON * area);
        let gray = re.density.gray_nodes(&d.grid, 1e-12);
        assert!(gray.len() <= 1);
        let target = d.rule().sublevel_measure();
        assert!((re.s_measure - target).abs() <= d.grid.max_node_weight());
    }

    #[test]
    fn rejects_non_positive_fields() {
        let d = disc(1, 1, 8, 4);
        let mut u = GridField::constant(&d.grid, 1.0);
        u.set(2, 1, 0.0);
        assert!(matches!(
            rearrange(&u, &d.rule(), &d.grid),
            Err(Error::NonPositiveField { i: 2, k: 1, .. })
        ));
    }

    #[test]
    fn rearrangement_maximises_weighted_energy() {
        let d = disc(2, 2, 16, 8);
        let u = GridField::from_fn(&d.grid, |x, y| x.sin() + 0.3 * (2.0 * x).sin() + 0.1 * y + 0.2);
        let best = rearrange(&u, &d.rule(), &d.grid).unwrap();
        let u2 = u.map(|v| v * v);
        let top = best.density.field().integrate_product(&u2, &d.grid);
        for seed in 0..200 {
            let q = random_density(seed, &d.grid, &d.rule()).unwrap();
            assert!(q.field().integrate_product(&u2, &d.grid) <= top * (1.0 + 1e-14));
        }
    }

    #[test]
    fn initial_weights_are_admissible() {
        let d = disc(2, 2, 32, 8);
        for w in InitialWeight::multistart(5, 9) {
            let p = w.build(&d.grid, &d.rule()).unwrap();
            assert!((p.mass() - d.cfg.domain_area()).abs() <= 1e-10 * d.cfg.domain_area());
        }
        let left = InitialWeight::LeftBeta.build(&d.grid, &d.rule()).unwrap();
        let b = beta_region(&left, &d.grid).unwrap();
        assert!(b.x_max < PI / 2.0);
        assert_eq!(InitialWeight::multistart(4, 7)[3], InitialWeight::Random(7));
    }

    #[test]
    fn symmetry_examples() {
        let d = disc(2, 1, 32, 6);
        let sym = GridField::from_fn(&d.grid, |x, y| x.sin() * (1.0 + 0.1 * y));
        assert_eq!(symmetry_classify(&sym, &d.grid, 1e-6).unwrap(), SymmetryClass::Symmetric);
        let left = GridField::from_fn(&d.grid, |x, _| x.sin() + 0.3 * (2.0 * x).sin());
        assert_eq!(symmetry_classify(&left, &d.grid, 1e-6).unwrap(), SymmetryClass::LeftDominant);
        let right = GridField::from_fn(&d.grid, |x, _| x.sin() - 0.3 * (2.0 * x).sin());
        assert_eq!(symmetry_classify(&right, &d.grid, 1e-6).unwrap(), SymmetryClass::RightDominant);
        let mixed = GridField::from_fn(&d.grid, |x, y| x.sin() + 0.3 * (2.0 * x).sin() * y);
        assert!(matches!(
            symmetry_classify(&mixed, &d.grid, 1e-6),
            Err(Error::MixedSymmetry { .. })
        ));
    }

    #[test]
    fn midline_slope_examples() {
        let d = disc(2, 1, 32, 6);
        let left = SpectralField::from_modes(d.basis, &[(1, 0, 1.0), (2, 0, 0.3)]);
        let r = midline_slope_check(&d, &left, 1e-6).unwrap();
        assert_eq!(r.class, SymmetryClass::LeftDominant);
        assert!(r.slopes.iter().all(|&(_, s)| (s + 0.6).abs() < 1e-14));
        let right = SpectralField::from_modes(d.basis, &[(1, 0, 1.0), (2, 0, -0.3)]);
        let r = midline_slope_check(&d, &right, 1e-6).unwrap();
        assert_eq!(r.class, SymmetryClass::RightDominant);
        assert!(r.slopes.iter().all(|&(_, s)| (s - 0.6).abs() < 1e-14));
        let sym = SpectralField::single_mode(d.basis, 1, 0, 1.0);
        let r = midline_slope_check(&d, &sym, 1e-6).unwrap();
        assert_eq!(r.class, SymmetryClass::Symmetric);
        assert!(r.max_abs_slope < 1e-15);
    }

    #[test]
    fn one_iteration_gives_two_records() {
        let mut params = PlateParams {
            n_modes_x: 6,
            n_basis_y: 4,
            n_quad_x: 24,
            n_quad_y: 12,
            ..Default::default()
        };
        params.opt_max_iter = 1;
        let d = Discretization::new(&PlateConfig::new(params).unwrap());
        let p0 = InitialWeight::LeftBeta.build(&d.grid, &d.rule()).unwrap();
        let trace = minimize(&d, p0).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert!(trace.is_monotone());
        assert_eq!(trace.status, ConvergenceStatus::MaxIterations);
    }
}
