//! Property tests over random configurations, densities and fields.

use std::f64::consts::PI;
use std::sync::OnceLock;

use hinged_plate::config::sublevel_fraction;
use hinged_plate::discretization::{GridField, SpectralBasis};
use hinged_plate::eigen::solve_first;
use hinged_plate::green::{positivity_hopf_margins, GreenOperator};
use hinged_plate::optimizer::{random_density, rearrange};
use hinged_plate::polarization::{polarize, HalfPlaneReflection};
use hinged_plate::quadrature::QuadratureGrid;
use hinged_plate::series::{eval_s1, eval_s2, CoefficientSequence};
use hinged_plate::{Discretization, PlateConfig, PlateParams};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn small_params() -> PlateParams {
    PlateParams {
        n_modes_x: 6,
        n_basis_y: 5,
        n_quad_x: 24,
        n_quad_y: 12,
        ..Default::default()
    }
}

fn small() -> &'static GreenOperator {
    static OP: OnceLock<GreenOperator> = OnceLock::new();
    OP.get_or_init(|| GreenOperator::from_config(&PlateConfig::new(small_params()).unwrap()).unwrap())
}

fn field_from(grid: &QuadratureGrid, raw: &[f64], lo: f64, hi: f64) -> GridField {
    let vals = (0..grid.len()).map(|n| lo + (hi - lo) * raw[n % raw.len()]).collect();
    GridField::new(grid.nx(), grid.ny(), vals).unwrap()
}

/// Signs of `sin(m x) P_d(y / ell)` under `x -> pi - x`, `y -> -y`.
fn reflection_signs(basis: &SpectralBasis) -> DVector<f64> {
    DVector::from_fn(basis.dim(), |a, _| {
        let (m, d) = basis.mode_of(a);
        if (m + 1 + d) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
}

fn conjugate(m: &DMatrix<f64>, s: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| s[a] * s[b] * m[(a, b)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sublevel_fraction_increases_with_beta(alpha in 0.01f64..0.99, b1 in 1.001f64..20.0, db in 1e-3f64..5.0) {
        prop_assert!(sublevel_fraction(alpha, b1 + db).unwrap() > sublevel_fraction(alpha, b1).unwrap());
    }

    #[test]
    fn random_densities_carry_exact_mass(seed in any::<u64>(), alpha in 0.1f64..0.9, beta in 1.2f64..6.0) {
        let cfg = PlateConfig::new(PlateParams { alpha, beta, ..small_params() }).unwrap();
        let grid = QuadratureGrid::new(&cfg);
        let rule = cfg.weight_rule();
        let p = random_density(seed, &grid, &rule).unwrap();
        let area = cfg.domain_area();
        prop_assert!((p.field().integrate(&grid) - area).abs() <= 10.0 * f64::EPSILON * area);
        prop_assert!(p.field().values().iter().all(|&v| v >= alpha && v <= beta));
    }

    #[test]
    fn rearrangement_is_bang_bang_with_exact_measures(raw in prop::collection::vec(0.01f64..1.0, 1..300)) {
        let op = small();
        let grid = &op.disc.grid;
        let rule = op.disc.rule();
        let u = field_from(grid, &raw, 0.0, 1.0);
        let r = rearrange(&u, &rule, grid).unwrap();
        let area = rule.target_mass;
        prop_assert!((r.density.field().integrate(grid) - area).abs() <= 10.0 * f64::EPSILON * area);
        prop_assert!(r.density.gray_nodes(grid, 0.0).len() <= 1);
        let w = grid.weight(r.gray_node.0, r.gray_node.1);
        prop_assert!((r.s_measure - rule.sublevel_measure()).abs() <= w);
        // sandwich: light nodes lie below the level, heavy nodes at or above it
        for (i, k) in grid.indices() {
            let p = r.density.get(i, k);
            if p == rule.alpha {
                prop_assert!(u.get(i, k) <= r.level);
            } else if p == rule.beta {
                prop_assert!(u.get(i, k) >= r.level);
            }
        }
    }

    #[test]
    fn stiffness_is_positive_definite(sigma in 0.0f64..0.99, seed in prop::collection::vec(-1.0f64..1.0, 30)) {
        let cfg = PlateConfig::new(PlateParams { sigma, ..small_params() }).unwrap();
        let disc = Discretization::new(&cfg);
        let k = disc.stiffness().unwrap();
        let m1 = disc.gram(&GridField::constant(&disc.grid, 1.0));
        let c = DVector::from_column_slice(&seed);
        prop_assert!(c.dot(&(&k * &c)) / c.dot(&(&m1 * &c)) > 0.0);
    }

    #[test]
    fn assembly_commutes_with_plate_reflection(raw in prop::collection::vec(0.0f64..1.0, 1..200), sigma in 0.0f64..0.6) {
        let cfg = PlateConfig::new(PlateParams { sigma, ..small_params() }).unwrap();
        let disc = Discretization::new(&cfg);
        let grid = &disc.grid;
        let p = field_from(grid, &raw, cfg.alpha(), cfg.beta());
        let mut p_ref = p.clone();
        for (i, k) in grid.indices() {
            p_ref.set(i, k, p.get(grid.mirror_x(i), grid.mirror_y(k)));
        }
        let s = reflection_signs(&disc.basis);
        let m = disc.weighted_mass(&p).unwrap();
        let m_ref = disc.weighted_mass(&p_ref).unwrap();
        prop_assert!((conjugate(&m, &s) - m_ref).amax() <= 1e-14 * m.amax());
        let k = disc.stiffness().unwrap();
        prop_assert!((conjugate(&k, &s) - &k).amax() <= 1e-14 * k.amax());
    }

    #[test]
    fn eigenvalue_decreases_as_weight_increases(raw in prop::collection::vec(0.0f64..1.0, 1..200), bump in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let op = small();
        let disc = &op.disc;
        let rule = disc.rule();
        let p = field_from(&disc.grid, &raw, rule.alpha, 0.5 * (rule.alpha + rule.beta));
        let mut q = p.clone();
        for (n, v) in q.values_mut().iter_mut().enumerate() {
            *v += (rule.beta - *v) * bump[n % bump.len()];
        }
        let k = op.stiffness();
        let lp = solve_first(k, &disc.weighted_mass(&p).unwrap(), &disc.basis, 1e-12).unwrap();
        let lq = solve_first(k, &disc.weighted_mass(&q).unwrap(), &disc.basis, 1e-12).unwrap();
        prop_assert!(lp.lambda1 >= lq.lambda1 * (1.0 - 1e-12));
    }

    #[test]
    fn first_eigenfunction_is_positive_with_hopf_slopes(raw in prop::collection::vec(0.0f64..1.0, 1..200)) {
        let op = small();
        let disc = &op.disc;
        let p = field_from(&disc.grid, &raw, disc.rule().alpha, disc.rule().beta);
        let pair = solve_first(op.stiffness(), &disc.weighted_mass(&p).unwrap(), &disc.basis, 1e-12).unwrap();
        prop_assert!(positivity_hopf_margins(disc, &pair.u).iter().all(|&m| m > 0.0));
    }

    #[test]
    fn green_pairing_is_symmetric(a in prop::collection::vec(-1.0f64..1.0, 1..100), b in prop::collection::vec(-1.0f64..1.0, 1..100)) {
        let op = small();
        let grid = &op.disc.grid;
        let f = field_from(grid, &a, 0.0, 1.0);
        let g = field_from(grid, &b, -0.5, 1.0);
        let uf = op.apply(&f).unwrap();
        let ug = op.apply(&g).unwrap();
        let lf = op.disc.load(&f);
        let lg = op.disc.load(&g);
        let fg = lg.dot(&uf.coeffs);
        let gf = lf.dot(&ug.coeffs);
        prop_assert!((fg - gf).abs() <= 1e-13 * (fg.abs() + gf.abs()).max(1e-300));
    }

    #[test]
    fn polarization_is_idempotent_and_pointwise_rearranging(raw in prop::collection::vec(-3.0f64..3.0, 1..300)) {
        let grid = &small().disc.grid;
        let v = field_from(grid, &raw, 0.0, 1.0);
        let vh = polarize(&v, grid).unwrap();
        prop_assert_eq!(polarize(&vh, grid).unwrap(), vh.clone());
        let refl = HalfPlaneReflection::new(grid).unwrap();
        for ((i, k), (j, _)) in refl.pairs() {
            prop_assert_eq!(vh.get(i, k) + vh.get(j, k), v.get(i, k) + v.get(j, k));
            prop_assert!(vh.get(i, k) >= vh.get(j, k));
        }
    }

    #[test]
    fn series_tail_bound_is_sound(decay in 0.2f64..2.5, len in 200usize..2000, z in 0.001f64..3.1) {
        let phi: Vec<f64> = (1..=2 * len).map(|m| (m as f64).powf(-decay)).collect();
        let seq = CoefficientSequence::new(phi).unwrap();
        for eval in [eval_s1, eval_s2] {
            let short = eval(&seq, z, len).unwrap();
            let long = eval(&seq, z, 2 * len).unwrap();
            prop_assert!((short.partial - long.partial).abs() <= short.tail_bound);
        }
    }

    #[test]
    fn s1_lower_bound_and_reflection(decay in 0.2f64..2.5, z in 0.001f64..3.1) {
        let phi: Vec<f64> = (1..=3000).map(|m| (m as f64).powf(-decay)).collect();
        let seq = CoefficientSequence::new(phi).unwrap();
        let s1 = eval_s1(&seq, z, 3000).unwrap();
        prop_assert!(s1.upper() >= seq.phi(1) * (z.sin() - (PI * PI / 6.0 - 1.0)));
        let s2 = eval_s2(&seq, PI - z, 3000).unwrap();
        prop_assert!((s2.partial + s1.partial).abs() <= 1e-12 * s1.partial.abs().max(1.0));
    }
}

#[test]
fn refining_y_quadrature_leaves_stiffness_unchanged() {
    let coarse = Discretization::new(&PlateConfig::new(small_params()).unwrap());
    let fine = Discretization::new(&PlateConfig::new(PlateParams { n_quad_y: 24, ..small_params() }).unwrap());
    let (kc, kf) = (coarse.stiffness().unwrap(), fine.stiffness().unwrap());
    assert!((&kc - &kf).amax() < 1e-10 * kc.amax());
}
