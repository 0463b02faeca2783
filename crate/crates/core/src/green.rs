//! Discrete solution operator of the plate problem and its kernel.
//!
//! With `K = L L^T` the discrete Green function is
//! `G_h(P, Q) = b(P)^T K^{-1} b(Q) = z(P) . z(Q)`, `z = L^{-1} b`,
//! where `b` is the basis evaluation vector. Writing it as a dot product of
//! the same two vectors makes the symmetry `G_h(P, Q) = G_h(Q, P)` exact.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{resolution_tag, CertificationReport};
use crate::config::PlateConfig;
use crate::discretization::{Discretization, GridField, SpectralField};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GreenOperator {
    pub disc: Discretization,
    k: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl GreenOperator {
    pub fn new(disc: &Discretization) -> Result<Self> {
        let k = disc.stiffness()?;
        let chol = Cholesky::new(k.clone()).ok_or(Error::NotPositiveDefinite("stiffness matrix"))?;
        Ok(Self {
            disc: disc.clone(),
            k,
            chol,
        })
    }

    pub fn from_config(cfg: &PlateConfig) -> Result<Self> {
        Self::new(&Discretization::new(cfg))
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.k
    }

    /// Coefficients of the solution with load vector `b`.
    pub fn solve_load(&self, b: &DVector<f64>) -> Result<SpectralField> {
        if b.len() != self.disc.basis.dim() {
            return Err(Error::Shape(format!("load of length {} for basis of dimension {}", b.len(), self.disc.basis.dim())));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("load vector"));
        }
        SpectralField::new(self.disc.basis, self.chol.solve(b))
    }

    /// Solution of the plate problem with right-hand side `f` sampled at the quadrature nodes.
    pub fn apply(&self, f: &GridField) -> Result<SpectralField> {
        f.check_grid(&self.disc.grid)?;
        if f.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("load field"));
        }
        self.solve_load(&self.disc.load(f))
    }

    /// `load(f)^T K^{-1} load(f)`, the quadrature value of `int G(f) f`.
    pub fn quadratic_form(&self, f: &GridField) -> Result<f64> {
        let b = self.disc.load(f);
        let c = self.solve_load(&b)?;
        Ok(b.dot(&c.coeffs))
    }

    /// `L^{-1} b(P)` for the basis x-derivative of order `dx`.
    pub fn half_vector(&self, x: f64, y: f64, dx: usize) -> DVector<f64> {
        let b = self.disc.basis.eval_vector(x, y, dx, 0);
        self.chol
            .l_dirty()
            .solve_lower_triangular(&b)
            .expect("Cholesky factor has a positive diagonal")
    }

    fn half_vectors(&self, points: &[(f64, f64)], dx: usize) -> Vec<DVector<f64>> {
        points.iter().map(|&(x, y)| self.half_vector(x, y, dx)).collect()
    }

    pub fn kernel(&self, target: (f64, f64), source: (f64, f64)) -> f64 {
        self.half_vector(target.0, target.1, 0)
            .dot(&self.half_vector(source.0, source.1, 0))
    }

    /// `G_h(target_i, source_j)`.
    pub fn green_matrix(&self, sources: &[(f64, f64)], targets: &[(f64, f64)]) -> DMatrix<f64> {
        self.cross(&self.half_vectors(targets, 0), &self.half_vectors(sources, 0))
    }

    /// `d/dx G_h(x0, y_i, source_j)`.
    pub fn green_dx(&self, x0: f64, ys: &[f64], sources: &[(f64, f64)]) -> DMatrix<f64> {
        let targets: Vec<_> = ys.iter().map(|&y| (x0, y)).collect();
        self.cross(&self.half_vectors(&targets, 1), &self.half_vectors(sources, 0))
    }

    fn cross(&self, rows: &[DVector<f64>], cols: &[DVector<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i].dot(&cols[j]))
    }

    /// Smallest `G(x,y,rho,w) - max(G(pi-x,y,rho,w), G(x,y,pi-rho,w))` over
    /// targets and sources taken from the left half of the plate.
    pub fn reflection_gap(&self, targets: &[(f64, f64)], sources: &[(f64, f64)]) -> f64 {
        let mirror = |pts: &[(f64, f64)]| pts.iter().map(|&(x, y)| (PI - x, y)).collect::<Vec<_>>();
        let g = self.green_matrix(sources, targets);
        let g_tx = self.green_matrix(sources, &mirror(targets));
        let g_sx = self.green_matrix(&mirror(sources), targets);
        let mut gap = f64::INFINITY;
        for i in 0..targets.len() {
            for j in 0..sources.len() {
                gap = gap.min(g[(i, j)] - g_tx[(i, j)].max(g_sx[(i, j)]));
            }
        }
        gap
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Tensor lattice of `nx * ny` points.
pub fn lattice(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
}

/// Nonnegative, nonzero random load: smooth bumps or rough node noise on a random patch.
pub fn random_nonnegative_load(disc: &Discretization, rng: &mut impl Rng) -> GridField {
    let ell = disc.cfg.ell();
    if rng.random_bool(0.5) {
        let cx = rng.random_range(0.2..PI - 0.2);
        let cy = rng.random_range(-ell..ell);
        let r = rng.random_range(0.1..0.6);
        let amp = rng.random_range(0.1..10.0);
        GridField::from_fn(&disc.grid, |x, y| amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (r * r)).exp())
    } else {
        let x0 = rng.random_range(0.0..PI * 0.9);
        let x1 = rng.random_range(x0 + 0.1 * PI..=PI);
        let y0 = rng.random_range(-ell..0.8 * ell);
        let y1 = rng.random_range(y0 + 0.2 * ell..=ell);
        let mut values = Vec::with_capacity(disc.grid.len());
        for (i, k) in disc.grid.indices() {
            let (x, y) = disc.grid.node(i, k);
            let inside = (x0..=x1).contains(&x) && (y0..=y1).contains(&y);
            values.push(if inside { rng.random_range(0.0..1.0) } else { 0.0 });
        }
        let mut f = GridField::new(disc.grid.nx(), disc.grid.ny(), values).expect("grid-sized load");
        if f.max_abs() == 0.0 {
            f = GridField::constant(&disc.grid, 1.0);
        }
        f
    }
}

/// Probe lattices used by the certifications.
#[derive(Debug, Clone)]
pub struct GreenProbes {
    /// Interior points, 20 x-values by 10 y-values.
    pub interior: Vec<(f64, f64)>,
    /// Points with x in the open left half.
    pub left_half: Vec<(f64, f64)>,
    pub ys: Vec<f64>,
}

impl GreenProbes {
    pub fn new(disc: &Discretization) -> Self {
        let h = disc.grid.max_spacing_x();
        let ell = disc.cfg.ell();
        let ys = linspace(-ell, ell, 10);
        let xs = linspace(h, PI - h, 20);
        let xl = linspace(h, PI / 2.0 - h, 10);
        Self {
            interior: lattice(&xs, &ys),
            left_half: lattice(&xl, &ys),
            ys,
        }
    }
}

/// Runs every kernel certification at the resolution of `cfg`.
pub fn certify_green(cfg: &PlateConfig, seed: u64) -> Result<Vec<CertificationReport>> {
    let op = GreenOperator::from_config(cfg)?;
    let disc = &op.disc;
    let res = resolution_tag(cfg);
    let probes = GreenProbes::new(disc);
    let mut out = Vec::new();

    let g = op.green_matrix(&probes.interior, &probes.interior);
    out.push(CertificationReport::strict("green.kernel_positive", &res, g.iter().copied()));
    let asym = (0..g.nrows()).flat_map(|i| (0..g.ncols()).map(move |j| (i, j))).map(|(i, j)| g[(i, j)] - g[(j, i)]);
    out.push(CertificationReport::identity("green.kernel_symmetric", &res, asym.collect::<Vec<_>>(), 0.0));

    let edges: Vec<f64> = [0.0, PI]
        .iter()
        .flat_map(|&x0| {
            let t: Vec<_> = probes.ys.iter().map(|&y| (x0, y)).collect();
            op.green_matrix(&probes.interior, &t).iter().copied().collect::<Vec<_>>()
        })
        .collect();
    out.push(CertificationReport::identity("green.kernel_hinged_edges", &res, edges, 1e-12));

    let gx0 = op.green_dx(0.0, &probes.ys, &probes.interior);
    out.push(CertificationReport::strict("green.dx_left_edge", &res, gx0.iter().copied()));
    let gxpi = op.green_dx(PI, &probes.ys, &probes.interior);
    out.push(CertificationReport::strict("green.dx_right_edge", &res, gxpi.iter().map(|v| -v)));

    let mirrored: Vec<_> = probes.left_half.iter().map(|&(x, y)| (PI - x, y)).collect();
    let left = op.green_dx(PI / 2.0, &probes.ys, &probes.left_half);
    let right = op.green_dx(PI / 2.0, &probes.ys, &mirrored);
    out.push(CertificationReport::strict(
        "green.dx_midline",
        &res,
        left.iter().map(|v| -v).chain(right.iter().copied()),
    ));
    let center: Vec<_> = probes.ys.iter().map(|&w| (PI / 2.0, w)).collect();
    let gc = op.green_dx(PI / 2.0, &probes.ys, &center);
    out.push(CertificationReport::identity("green.dx_midline_center", &res, gc.iter().copied().collect::<Vec<_>>(), 1e-12));

    let mirror = |pts: &[(f64, f64)]| pts.iter().map(|&(x, y)| (PI - x, y)).collect::<Vec<_>>();
    let src = &probes.interior;
    let tgt = &probes.interior;
    let g_mm = op.green_matrix(&mirror(src), &mirror(tgt));
    let both: Vec<f64> = g.iter().zip(g_mm.iter()).map(|(a, b)| a - b).collect();
    out.push(CertificationReport::identity("green.reflection_both", &res, both, 1e-12));
    let g_tx = op.green_matrix(src, &mirror(tgt));
    let g_sx = op.green_matrix(&mirror(src), tgt);
    let swap: Vec<f64> = g_tx.iter().zip(g_sx.iter()).map(|(a, b)| a - b).collect();
    out.push(CertificationReport::identity("green.reflection_swap", &res, swap, 1e-12));
    let gap = op.reflection_gap(&probes.left_half, &probes.left_half);
    out.push(CertificationReport::strict("green.reflection_gap", &res, [gap]).with_probes(probes.left_half.len().pow(2)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut consistency = Vec::new();
    let mut hopf = Vec::new();
    for _ in 0..50 {
        let f = random_nonnegative_load(disc, &mut rng);
        let b = disc.load(&f);
        let u = op.solve_load(&b)?;
        consistency.push((op.stiffness() * &u.coeffs - &b).norm() / b.norm());
        hopf.extend(positivity_hopf_margins(disc, &u));
    }
    out.push(CertificationReport::identity("green.inverse_consistency", &res, consistency, 1e-10));
    out.push(CertificationReport::strict("green.positivity_hopf", &res, hopf));
    Ok(out)
}

/// `u` at interior nodes, `u_x(0, y_k)` and `-u_x(pi, y_k)`; all positive when the claim holds.
pub fn positivity_hopf_margins(disc: &Discretization, u: &SpectralField) -> Vec<f64> {
    let mut m = disc.to_grid(u).into_values();
    for &y in disc.grid.nodes_y() {
        m.push(u.dx_at(0.0, y));
        m.push(-u.dx_at(PI, y));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PlateParams;

    fn op() -> GreenOperator {
        GreenOperator::from_config(
            &PlateConfig::new(PlateParams {
                n_modes_x: 8,
                n_basis_y: 6,
                n_quad_x: 32,
                n_quad_y: 16,
                ..Default::default()
            })
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn kernel_is_exactly_symmetric_and_vanishes_on_hinged_edges() {
        let op = op();
        let p = (0.7, 0.2);
        let q = (2.1, -0.4);
        assert_eq!(op.kernel(p, q), op.kernel(q, p));
        assert_eq!(op.kernel((0.0, 0.3), q), 0.0);
        assert!(op.kernel((PI, 0.3), q).abs() < 1e-14);
        assert!(op.kernel(p, q) > 0.0);
    }

    #[test]
    fn apply_inverts_stiffness_and_is_linear() {
        let op = op();
        let f = GridField::from_fn(&op.disc.grid, |x, y| 1.0 + x * y);
        let g = GridField::from_fn(&op.disc.grid, |x, _| x.cos());
        let b = op.disc.load(&f);
        let u = op.apply(&f).unwrap();
        assert!((op.stiffness() * &u.coeffs - &b).norm() <= 1e-12 * b.norm());
        let sum = GridField::new(f.nx(), f.ny(), f.values().iter().zip(g.values()).map(|(a, b)| a + b).collect()).unwrap();
        let lhs = op.apply(&sum).unwrap().coeffs;
        let rhs = u.coeffs + op.apply(&g).unwrap().coeffs;
        assert!((lhs - rhs).amax() < 1e-12);
    }

    #[test]
    fn green_matrix_matches_solution_values() {
        // u(P) = sum_nodes w G(P, Q) f(Q)
        let op = op();
        let f = GridField::from_fn(&op.disc.grid, |x, y| (x * 1.3).sin() + 0.2 * y);
        let u = op.apply(&f).unwrap();
        let nodes: Vec<_> = op.disc.grid.indices().map(|(i, k)| op.disc.grid.node(i, k)).collect();
        let w: Vec<_> = op.disc.grid.indices().map(|(i, k)| op.disc.grid.weight(i, k) * f.get(i, k)).collect();
        let target = [(1.0, 0.1)];
        let g = op.green_matrix(&nodes, &target);
        let direct: f64 = (0..nodes.len()).map(|j| g[(0, j)] * w[j]).sum();
        assert!((direct - u.value_at(1.0, 0.1)).abs() < 1e-12);
    }

    #[test]
    fn derivative_kernel_matches_finite_difference() {
        let op = op();
        let s = [(0.9, 0.1)];
        let h = 1e-6;
        let gx = op.green_dx(1.3, &[0.2], &s)[(0, 0)];
        let fd = (op.kernel((1.3 + h, 0.2), s[0]) - op.kernel((1.3 - h, 0.2), s[0])) / (2.0 * h);
        assert!((gx - fd).abs() < 1e-7);
    }

    #[test]
    fn midline_derivative_signs() {
        let op = op();
        let ys = [0.0, 0.3];
        let v = op.green_dx(PI / 2.0, &ys, &[(PI / 4.0, 0.1), (3.0 * PI / 4.0, 0.1), (PI / 2.0, 0.1)]);
        for r in 0..2 {
            assert!(v[(r, 0)] < 0.0);
            assert!(v[(r, 1)] > 0.0);
            assert!(v[(r, 2)].abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_gap_is_zero_on_the_midline_and_positive_inside() {
        let op = op();
        let on = op.reflection_gap(&[(PI / 2.0, 0.0)], &[(PI / 2.0, 0.0)]);
        assert!(on.abs() < 1e-12);
        assert!(op.reflection_gap(&[(PI / 4.0, 0.0)], &[(PI / 4.0, 0.0)]) > 0.0);
    }

    #[test]
    fn linspace_and_lattice() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.5]);
        assert_eq!(lattice(&[1.0, 2.0], &[3.0]).len(), 2);
    }

    #[test]
    fn rejects_non_finite_loads() {
        let op = op();
        let mut f = GridField::constant(&op.disc.grid, 1.0);
        f.set(0, 0, f64::NAN);
        assert!(matches!(op.apply(&f), Err(Error::NonFinite(_))));
    }
}
