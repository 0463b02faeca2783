//! Two-point rearrangement across the midline `x = pi/2` and the Green
//! quotient whose supremum is `1/lambda_1`.
//!
//! `H = {x <= pi/2}`. Polarization keeps the larger of `v(x, y)` and
//! `v(pi - x, y)` in `H` and the smaller one outside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{resolution_tag, CertificationReport};
use crate::config::{AdmissibleWeightRule, PlateConfig};
use crate::discretization::{Discretization, GridField};
use crate::error::{Error, Result};
use crate::green::GreenOperator;
use crate::optimizer::{
    midline_slope_check, multistart, rearrange, solve_density, symmetry_classify, DensityField, InitialWeight,
    SYMMETRY_TOL,
};
use crate::quadrature::QuadratureGrid;

/// Node pairing `(i, k) <-> (nx - 1 - i, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlaneReflection {
    nx: usize,
    ny: usize,
}

impl HalfPlaneReflection {
    pub fn new(grid: &QuadratureGrid) -> Result<Self> {
        if !grid.nx().is_multiple_of(2) {
            return Err(Error::InvalidArgument("x-rule must have an even node count".into()));
        }
        Ok(Self {
            nx: grid.nx(),
            ny: grid.ny(),
        })
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.nx - 1 - i
    }

    /// Pairs `(left, right)` with the left node in `H`.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), (usize, usize))> + '_ {
        (0..self.nx / 2).flat_map(move |i| (0..self.ny).map(move |k| ((i, k), (self.mirror(i), k))))
    }

    /// `v o R`.
    pub fn reflect(&self, v: &GridField) -> GridField {
        let mut out = v.clone();
        for ((i, k), (j, _)) in self.pairs() {
            out.set(i, k, v.get(j, k));
            out.set(j, k, v.get(i, k));
        }
        out
    }

    pub fn polarize(&self, v: &GridField) -> GridField {
        let mut out = v.clone();
        for ((i, k), (j, _)) in self.pairs() {
            let (a, b) = (v.get(i, k), v.get(j, k));
            if b > a {
                out.set(i, k, b);
                out.set(j, k, a);
            }
        }
        out
    }

    /// Polarizes `u` and carries `p` along with it: a pair is swapped when
    /// `u` is larger on the right, or ties there while `p` is larger.
    pub fn polarize_pair(&self, u: &GridField, p: &GridField) -> (GridField, GridField) {
        let mut uh = u.clone();
        let mut ph = p.clone();
        for ((i, k), (j, _)) in self.pairs() {
            let (ul, ur) = (u.get(i, k), u.get(j, k));
            let (pl, pr) = (p.get(i, k), p.get(j, k));
            if ur > ul || (ur == ul && pr > pl) {
                uh.set(i, k, ur);
                uh.set(j, k, ul);
                ph.set(i, k, pr);
                ph.set(j, k, pl);
            }
        }
        (uh, ph)
    }
}

pub fn polarize(v: &GridField, grid: &QuadratureGrid) -> Result<GridField> {
    v.check_grid(grid)?;
    Ok(HalfPlaneReflection::new(grid)?.polarize(v))
}

/// Density of the polarized eigenfunction: `p_u` rearranged along with `u`,
/// so it is `alpha` where `u_H <= sqrt(t)` and `beta` above, with the same
/// threshold and gray node value as `p_u`.
pub fn polarized_density(
    u: &GridField,
    p_u: &DensityField,
    grid: &QuadratureGrid,
    rule: &AdmissibleWeightRule,
) -> Result<(GridField, DensityField)> {
    u.check_grid(grid)?;
    let (uh, ph) = HalfPlaneReflection::new(grid)?.polarize_pair(u, p_u.field());
    Ok((uh, DensityField::new(ph, grid, rule)?))
}

/// `int G(p v) p v / int p v^2`.
pub fn theta1_quotient(p: &DensityField, v: &GridField, op: &GreenOperator) -> Result<f64> {
    let pv = p.field().mul(v);
    let den = pv.integrate_product(v, &op.disc.grid);
    if den == 0.0 || v.max_abs() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(op.quadratic_form(&pv)? / den)
}

/// `int G(f_H) f_H - int G(f) f` with `f = p_u u`.
pub fn polarization_inequality_gap(p_u: &DensityField, u: &GridField, op: &GreenOperator) -> Result<f64> {
    let grid = &op.disc.grid;
    let f = p_u.field().mul(u);
    let fh = polarize(&f, grid)?;
    Ok(op.quadratic_form(&fh)? - op.quadratic_form(&f)?)
}

/// Random strictly positive node field: a smooth positive profile plus rough noise.
pub fn random_positive_field(grid: &QuadratureGrid, rng: &mut impl Rng) -> GridField {
    let a = rng.random_range(-0.5..0.5);
    let b = rng.random_range(-0.5..0.5);
    let noise = rng.random_range(0.0..0.3);
    let base = GridField::from_fn(grid, |x, y| x.sin() + a * (2.0 * x).sin() + b * y * x.sin() + 0.05);
    let values = base
        .values()
        .iter()
        .map(|&v| v.max(0.01) * (1.0 + noise * rng.random_range(-1.0..1.0)))
        .collect();
    GridField::new(grid.nx(), grid.ny(), values).expect("grid-sized field")
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b) / b.abs().max(f64::MIN_POSITIVE)
}

/// The polarization and duality battery.
pub fn certify_polarization(cfg: &PlateConfig, seed: u64) -> Result<Vec<CertificationReport>> {
    let op = GreenOperator::from_config(cfg)?;
    let disc = &op.disc;
    let grid = &disc.grid;
    let rule = disc.rule();
    let refl = HalfPlaneReflection::new(grid)?;
    let res = resolution_tag(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sum_err = Vec::new();
    let mut idem = Vec::new();
    let mut product = Vec::new();
    let mut mass = Vec::new();
    let mut energy = Vec::new();
    let mut ineq = Vec::new();
    let mut equal = Vec::new();
    for _ in 0..100 {
        let u = random_positive_field(grid, &mut rng);
        let uh = refl.polarize(&u);
        let (ur, uhr) = (refl.reflect(&u), refl.reflect(&uh));
        let lhs = u.values().iter().zip(ur.values()).map(|(a, b)| a + b);
        let rhs = uh.values().iter().zip(uhr.values()).map(|(a, b)| a + b);
        sum_err.extend(lhs.zip(rhs).map(|(a, b)| a - b));
        idem.extend(refl.polarize(&uh).values().iter().zip(uh.values()).map(|(a, b)| a - b));

        let re = rearrange(&u, &rule, grid)?;
        let (uh2, ph) = polarized_density(&u, &re.density, grid, &rule)?;
        let pu_h = refl.polarize(&re.density.field().mul(&u));
        product.extend(pu_h.values().iter().zip(ph.field().mul(&uh2).values()).map(|(a, b)| a - b));
        mass.push(relative(ph.mass(), cfg.domain_area()));
        let e0 = re.density.field().mul(&u).integrate_product(&u, grid);
        let e1 = ph.field().mul(&uh2).integrate_product(&uh2, grid);
        energy.push(relative(e1, e0));
        ineq.push(polarization_inequality_gap(&re.density, &u, &op)?);

        // an already polarized field: equality
        let re_h = rearrange(&uh, &rule, grid)?;
        equal.push(polarization_inequality_gap(&re_h.density, &uh, &op)?);
    }

    // converged optimal pairs from the four standard starts
    let starts = InitialWeight::multistart(4, seed);
    let mut tri = Vec::new();
    let mut eq_opt = Vec::new();
    for trace in multistart(disc, &starts) {
        let trace = trace?;
        let u = &trace.final_pair.u;
        let nodes = disc.to_grid(u);
        let ok = symmetry_classify(&nodes, grid, SYMMETRY_TOL).is_ok() && midline_slope_check(disc, u, SYMMETRY_TOL).is_ok();
        tri.push(if ok { 1.0 } else { -1.0 });
        let p = trace.final_density();
        let gap = polarization_inequality_gap(p, &nodes, &op)?;
        eq_opt.push(gap / op.quadratic_form(&p.field().mul(&nodes))?);
    }
    let (duality_eig, duality_sup, duality_abs) = duality_margins(disc, &op, &mut rng)?;

    Ok(vec![
        CertificationReport::identity("polarization.pointwise_sum", &res, sum_err, 0.0),
        CertificationReport::identity("polarization.idempotent", &res, idem, 0.0),
        CertificationReport::identity("polarization.product_identity", &res, product, 0.0),
        CertificationReport::identity("polarization.mass", &res, mass, 1e-10),
        CertificationReport::identity("polarization.energy_identity", &res, energy, 1e-12),
        CertificationReport::from_margins("polarization.inequality", &res, ineq, 1e-10),
        CertificationReport::identity("polarization.equality_case", &res, equal.into_iter().chain(eq_opt), 1e-8),
        CertificationReport::strict("polarization.trichotomy", &res, tri),
        CertificationReport::identity("duality.eigenfunction", &res, duality_eig, 1e-8),
        CertificationReport::from_margins("duality.upper_bound", &res, duality_sup, 0.0),
        CertificationReport::from_margins("duality.absolute_value", &res, duality_abs, 1e-12),
    ])
}

/// Errors `theta(u) lambda - 1` over several densities, margins
/// `1/lambda + 1e-9 - theta(v)` for random `v`, and `theta(|v|) - theta(v)`.
fn duality_margins(
    disc: &Discretization,
    op: &GreenOperator,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let grid = &disc.grid;
    let rule = disc.rule();
    let k = op.stiffness();
    let mut eig = Vec::new();
    let mut sup = Vec::new();
    let mut abs = Vec::new();
    let seeds: Vec<u64> = (0..10).map(|_| rng.random()).collect();
    let mut densities = vec![InitialWeight::Uniform.build(grid, &rule)?];
    densities.push(InitialWeight::LeftBeta.build(grid, &rule)?);
    densities.extend(seeds.iter().skip(2).map(|&s| InitialWeight::Random(s).build(grid, &rule)).collect::<Result<Vec<_>>>()?);
    for (idx, p) in densities.iter().enumerate() {
        let pair = solve_density(disc, k, p)?;
        let u = disc.to_grid(&pair.u);
        eig.push(theta1_quotient(p, &u, op)? * pair.lambda1 - 1.0);
        if idx < 2 {
            for _ in 0..50 {
                let v = GridField::new(
                    grid.nx(),
                    grid.ny(),
                    (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect(),
                )?;
                let q = theta1_quotient(p, &v, op)?;
                sup.push(1.0 / pair.lambda1 + 1e-9 - q);
                abs.push(theta1_quotient(p, &v.map(f64::abs), op)? - q);
            }
        }
    }
    Ok((eig, sup, abs))
}
