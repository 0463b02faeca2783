//! Galerkin space for `H^2_*`, fields, and assembly of the stiffness and
//! weighted mass forms.
//!
//! Basis functions are `sin(m x) * psi_d(y)` with `m = 1..=M` and `psi_d` the
//! Legendre polynomial of degree `d = 0..J` mapped to `[-ell, ell]`. The
//! hinged conditions at `x = 0, pi` are built into the sine factor; the
//! free-edge conditions at `y = +-ell` are natural for the weak form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::config::{AdmissibleWeightRule, PlateConfig};
use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, QuadratureGrid};

/// Values of `P_d`, `P_d'`, `P_d''` at `xi` for `d = 0..count`.
pub fn legendre_table(count: usize, xi: f64) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]; count];
    if count == 0 {
        return out;
    }
    out[0] = [1.0, 0.0, 0.0];
    if count > 1 {
        out[1] = [xi, 1.0, 0.0];
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let p = ((2.0 * nf + 1.0) * xi * out[n][0] - nf * out[n - 1][0]) / (nf + 1.0);
        let dp = out[n - 1][1] + (2.0 * nf + 1.0) * out[n][0];
        let ddp = out[n - 1][2] + (2.0 * nf + 1.0) * out[n][1];
        out[n + 1] = [p, dp, ddp];
    }
    out
}

/// Tensor basis `sin(m x) psi_d(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBasis {
    n_modes_x: usize,
    n_basis_y: usize,
    ell: f64,
}

impl SpectralBasis {
    pub fn new(n_modes_x: usize, n_basis_y: usize, ell: f64) -> Self {
        assert!(n_modes_x >= 1 && n_basis_y >= 1 && ell > 0.0);
        Self {
            n_modes_x,
            n_basis_y,
            ell,
        }
    }

    pub fn n_modes_x(&self) -> usize {
        self.n_modes_x
    }
    pub fn n_basis_y(&self) -> usize {
        self.n_basis_y
    }
    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn dim(&self) -> usize {
        self.n_modes_x * self.n_basis_y
    }

    /// Flat index of mode `m` (1-based) and Legendre degree `d` (0-based).
    pub fn index(&self, m: usize, d: usize) -> usize {
        debug_assert!(m >= 1 && m <= self.n_modes_x && d < self.n_basis_y);
        (m - 1) * self.n_basis_y + d
    }

    /// Inverse of [`SpectralBasis::index`].
    pub fn mode_of(&self, flat: usize) -> (usize, usize) {
        (flat / self.n_basis_y + 1, flat % self.n_basis_y)
    }

    /// `psi_d(y), psi_d'(y), psi_d''(y)` for every degree.
    pub fn y_table(&self, y: f64) -> Vec<[f64; 3]> {
        let inv = 1.0 / self.ell;
        legendre_table(self.n_basis_y, y * inv)
            .into_iter()
            .map(|[p, dp, ddp]| [p, dp * inv, ddp * inv * inv])
            .collect()
    }

    /// Basis values at `(x, y)`, derivative order `(dx, dy)` with `dx <= 1`, `dy <= 2`.
    pub fn eval_vector(&self, x: f64, y: f64, dx: usize, dy: usize) -> DVector<f64> {
        let ytab = self.y_table(y);
        let mut b = DVector::zeros(self.dim());
        for m in 1..=self.n_modes_x {
            let mf = m as f64;
            let fx = match dx {
                0 => (mf * x).sin(),
                1 => mf * (mf * x).cos(),
                2 => -mf * mf * (mf * x).sin(),
                _ => panic!("x derivative order {dx} not supported"),
            };
            for d in 0..self.n_basis_y {
                b[self.index(m, d)] = fx * ytab[d][dy];
            }
        }
        b
    }

    /// Quadrature-free integral of every basis function over the plate.
    pub fn integrals(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        for m in (1..=self.n_modes_x).step_by(2) {
            // int_0^pi sin(mx) = 2/m for odd m, int psi_0 = 2 ell, higher degrees integrate to zero
            v[self.index(m, 0)] = 2.0 / m as f64 * 2.0 * self.ell;
        }
        v
    }
}

pub fn build_basis(cfg: &PlateConfig) -> SpectralBasis {
    SpectralBasis::new(cfg.n_modes_x(), cfg.n_basis_y(), cfg.ell())
}

/// A function of the Galerkin space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub basis: SpectralBasis,
    pub coeffs: DVector<f64>,
}

impl SpectralField {
    pub fn new(basis: SpectralBasis, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::Shape(format!(
                "{} coefficients for a basis of dimension {}",
                coeffs.len(),
                basis.dim()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("spectral coefficients"));
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: SpectralBasis) -> Self {
        Self {
            basis,
            coeffs: DVector::zeros(basis.dim()),
        }
    }

    /// Field with a single nonzero coefficient.
    pub fn single_mode(basis: SpectralBasis, m: usize, d: usize, value: f64) -> Self {
        let mut f = Self::zeros(basis);
        f.coeffs[basis.index(m, d)] = value;
        f
    }

    /// Field built from per-mode coefficients `(m, d, c)`.
    pub fn from_modes(basis: SpectralBasis, modes: &[(usize, usize, f64)]) -> Self {
        let mut f = Self::zeros(basis);
        for &(m, d, c) in modes {
            f.coeffs[basis.index(m, d)] += c;
        }
        f
    }

    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        self.basis.eval_vector(x, y, 0, 0).dot(&self.coeffs)
    }
    pub fn dx_at(&self, x: f64, y: f64) -> f64 {
        self.basis.eval_vector(x, y, 1, 0).dot(&self.coeffs)
    }
    pub fn dy_at(&self, x: f64, y: f64) -> f64 {
        self.basis.eval_vector(x, y, 0, 1).dot(&self.coeffs)
    }

    pub fn evaluate(&self, points: &[(f64, f64)]) -> Vec<f64> {
        points.iter().map(|&(x, y)| self.value_at(x, y)).collect()
    }

    pub fn evaluate_dx(&self, points: &[(f64, f64)]) -> Vec<f64> {
        points.iter().map(|&(x, y)| self.dx_at(x, y)).collect()
    }

    pub fn evaluate_dy(&self, points: &[(f64, f64)]) -> Vec<f64> {
        points.iter().map(|&(x, y)| self.dy_at(x, y)).collect()
    }
}

/// Node values on a quadrature grid, row-major with the x index outer.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(Error::Shape(format!("{} values for a {nx} x {ny} grid", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid field"));
        }
        Ok(Self { nx, ny, values })
    }

    pub fn constant(grid: &QuadratureGrid, value: f64) -> Self {
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: &QuadratureGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let values = grid
            .indices()
            .map(|(i, k)| {
                let (x, y) = grid.node(i, k);
                f(x, y)
            })
            .collect();
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            values,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.ny + k]
    }

    pub fn set(&mut self, i: usize, k: usize, v: f64) {
        self.values[i * self.ny + k] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridField) -> Self {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny));
        Self {
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn matches(&self, grid: &QuadratureGrid) -> bool {
        self.nx == grid.nx() && self.ny == grid.ny()
    }

    pub(crate) fn check_grid(&self, grid: &QuadratureGrid) -> Result<()> {
        if self.matches(grid) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "field is {} x {}, grid is {} x {}",
                self.nx,
                self.ny,
                grid.nx(),
                grid.ny()
            )))
        }
    }

    /// Quadrature integral `sum w_ik v_ik`.
    pub fn integrate(&self, grid: &QuadratureGrid) -> f64 {
        compensated_sum(grid.indices().map(|(i, k)| grid.weight(i, k) * self.get(i, k)))
    }

    /// Quadrature integral of the product with another field.
    pub fn integrate_product(&self, other: &GridField, grid: &QuadratureGrid) -> f64 {
        compensated_sum(grid.indices().map(|(i, k)| grid.weight(i, k) * self.get(i, k) * other.get(i, k)))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }
}

/// Basis factors tabulated at the quadrature nodes.
#[derive(Debug, Clone)]
pub struct GridTabulation {
    /// `sin(m x_i)`, indexed `[i][m - 1]`.
    pub sin_x: Vec<Vec<f64>>,
    /// `m cos(m x_i)`, indexed `[i][m - 1]`.
    pub dsin_x: Vec<Vec<f64>>,
    /// `psi_d(y_k)` and derivatives, indexed `[k][d]`.
    pub psi_y: Vec<Vec<[f64; 3]>>,
}

impl GridTabulation {
    pub fn new(basis: &SpectralBasis, grid: &QuadratureGrid) -> Self {
        let mm = basis.n_modes_x();
        let sin_x = grid
            .nodes_x()
            .iter()
            .map(|&x| (1..=mm).map(|m| (m as f64 * x).sin()).collect())
            .collect();
        let dsin_x = grid
            .nodes_x()
            .iter()
            .map(|&x| (1..=mm).map(|m| m as f64 * (m as f64 * x).cos()).collect())
            .collect();
        let psi_y = grid.nodes_y().iter().map(|&y| basis.y_table(y)).collect();
        Self { sin_x, dsin_x, psi_y }
    }
}

fn stiffness_unsymmetrized(basis: &SpectralBasis, grid: &QuadratureGrid, sigma: f64) -> DMatrix<f64> {
    let n = basis.dim();
    let jj = basis.n_basis_y();
    let ytabs: Vec<Vec<[f64; 3]>> = grid.nodes_y().iter().map(|&y| basis.y_table(y)).collect();
    let mut k = DMatrix::zeros(n, n);
    let c = 1.0 - sigma;
    for m in 1..=basis.n_modes_x() {
        let m2 = (m * m) as f64;
        // x-integrals: int sin^2 = int cos^2 = pi/2 on (0, pi)
        let half_pi = PI / 2.0;
        for d in 0..jj {
            for e in 0..jj {
                let mut acc = 0.0;
                for (kq, t) in ytabs.iter().enumerate() {
                    let (a, b) = (t[d], t[e]);
                    let lap = (a[2] - m2 * a[0]) * (b[2] - m2 * b[0]);
                    let mixed = m2 * (2.0 * a[1] * b[1] + a[0] * b[2] + a[2] * b[0]);
                    acc += grid.weights_y()[kq] * (lap + c * mixed);
                }
                k[(basis.index(m, d), basis.index(m, e))] = half_pi * acc;
            }
        }
    }
    k
}

/// Stiffness matrix of the `H^2_*` inner product
/// `int [Lap u Lap v + (1 - sigma)(2 u_xy v_xy - u_xx v_yy - u_yy v_xx)]`.
///
/// The x-integrals are exact trig integrals, so different x-modes never
/// couple; the y-integrals use the grid's Gauss rule, exact for the
/// polynomial factors when `n_quad_y >= n_basis_y`.
pub fn assemble_stiffness(basis: &SpectralBasis, grid: &QuadratureGrid, sigma: f64) -> Result<DMatrix<f64>> {
    let k = stiffness_unsymmetrized(basis, grid, sigma);
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("stiffness matrix"));
    }
    Ok((&k + k.transpose()) * 0.5)
}

/// `sum_nodes w * weight * phi_a * phi_b` without admissibility checks.
pub fn weighted_gram(tab: &GridTabulation, basis: &SpectralBasis, grid: &QuadratureGrid, weight: &GridField) -> DMatrix<f64> {
    let (mm, jj) = (basis.n_modes_x(), basis.n_basis_y());
    let n = basis.dim();
    let mut out = DMatrix::zeros(n, n);
    let mut t = vec![0.0; jj * jj];
    for i in 0..grid.nx() {
        t.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..grid.ny() {
            let wk = grid.weights_y()[k] * weight.get(i, k);
            let psi = &tab.psi_y[k];
            for d in 0..jj {
                let a = wk * psi[d][0];
                for e in 0..=d {
                    t[d * jj + e] += a * psi[e][0];
                }
            }
        }
        let wx = grid.weights_x()[i];
        let s = &tab.sin_x[i];
        for m in 0..mm {
            for mp in 0..=m {
                let f = wx * s[m] * s[mp];
                for d in 0..jj {
                    for e in 0..jj {
                        let tde = if e <= d { t[d * jj + e] } else { t[e * jj + d] };
                        out[(m * jj + d, mp * jj + e)] += f * tde;
                    }
                }
            }
        }
    }
    // fill the upper block triangle
    for a in 0..n {
        for b in (a + 1)..n {
            let (ma, mb) = (a / jj, b / jj);
            if ma < mb {
                out[(a, b)] = out[(b, a)];
            }
        }
    }
    out
}

/// Weighted mass matrix `sum_nodes w p phi_a phi_b` for an admissible weight.
pub fn assemble_weighted_mass(
    basis: &SpectralBasis,
    grid: &QuadratureGrid,
    p: &GridField,
    rule: &AdmissibleWeightRule,
) -> Result<DMatrix<f64>> {
    check_bounds(p, grid, rule)?;
    let tab = GridTabulation::new(basis, grid);
    Ok(weighted_gram(&tab, basis, grid, p))
}

pub(crate) fn check_bounds(p: &GridField, grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<()> {
    p.check_grid(grid)?;
    for (i, k) in grid.indices() {
        let v = p.get(i, k);
        if !rule.contains(v) {
            return Err(Error::DensityOutOfBounds {
                i,
                k,
                value: v,
                alpha: rule.alpha,
                beta: rule.beta,
            });
        }
    }
    Ok(())
}

/// Configuration, basis, grid and tabulations bundled for repeated use.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub cfg: PlateConfig,
    pub basis: SpectralBasis,
    pub grid: QuadratureGrid,
    pub tab: GridTabulation,
}

impl Discretization {
    pub fn new(cfg: &PlateConfig) -> Self {
        let basis = build_basis(cfg);
        let grid = QuadratureGrid::new(cfg);
        let tab = GridTabulation::new(&basis, &grid);
        Self {
            cfg: *cfg,
            basis,
            grid,
            tab,
        }
    }

    pub fn rule(&self) -> AdmissibleWeightRule {
        self.cfg.weight_rule()
    }

    pub fn stiffness(&self) -> Result<DMatrix<f64>> {
        assemble_stiffness(&self.basis, &self.grid, self.cfg.sigma())
    }

    /// Weighted mass matrix; rejects weights outside `[alpha, beta]`.
    pub fn weighted_mass(&self, p: &GridField) -> Result<DMatrix<f64>> {
        check_bounds(p, &self.grid, &self.rule())?;
        Ok(weighted_gram(&self.tab, &self.basis, &self.grid, p))
    }

    /// Gram matrix for an arbitrary node weight.
    pub fn gram(&self, weight: &GridField) -> DMatrix<f64> {
        weighted_gram(&self.tab, &self.basis, &self.grid, weight)
    }

    /// Load vector `load_a = sum_nodes w f phi_a`.
    pub fn load(&self, f: &GridField) -> DVector<f64> {
        let (mm, jj) = (self.basis.n_modes_x(), self.basis.n_basis_y());
        let mut out = DVector::zeros(self.basis.dim());
        let mut r = vec![0.0; jj];
        for i in 0..self.grid.nx() {
            r.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..self.grid.ny() {
                let wk = self.grid.weights_y()[k] * f.get(i, k);
                for (d, rd) in r.iter_mut().enumerate() {
                    *rd += wk * self.tab.psi_y[k][d][0];
                }
            }
            let wx = self.grid.weights_x()[i];
            for m in 0..mm {
                let s = wx * self.tab.sin_x[i][m];
                for d in 0..jj {
                    out[m * jj + d] += s * r[d];
                }
            }
        }
        out
    }

    /// Values of a spectral field at the quadrature nodes.
    pub fn to_grid(&self, u: &SpectralField) -> GridField {
        self.tabulate(u, false, 0)
    }

    /// x-derivative of a spectral field at the quadrature nodes.
    pub fn dx_to_grid(&self, u: &SpectralField) -> GridField {
        self.tabulate(u, true, 0)
    }

    /// y-derivative of a spectral field at the quadrature nodes.
    pub fn dy_to_grid(&self, u: &SpectralField) -> GridField {
        self.tabulate(u, false, 1)
    }

    fn tabulate(&self, u: &SpectralField, dx: bool, dy: usize) -> GridField {
        let (mm, jj) = (self.basis.n_modes_x(), self.basis.n_basis_y());
        let mut values = Vec::with_capacity(self.grid.len());
        let mut a = vec![0.0; jj];
        for i in 0..self.grid.nx() {
            let xs = if dx { &self.tab.dsin_x[i] } else { &self.tab.sin_x[i] };
            for (d, ad) in a.iter_mut().enumerate() {
                *ad = (0..mm).map(|m| u.coeffs[m * jj + d] * xs[m]).sum();
            }
            for k in 0..self.grid.ny() {
                values.push((0..jj).map(|d| a[d] * self.tab.psi_y[k][d][dy]).sum());
            }
        }
        GridField {
            nx: self.grid.nx(),
            ny: self.grid.ny(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PlateParams;

    fn small_cfg(m: usize, j: usize) -> PlateConfig {
        PlateConfig::new(PlateParams {
            n_modes_x: m,
            n_basis_y: j,
            n_quad_x: 40,
            n_quad_y: 16,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn legendre_recurrence_matches_explicit_polynomials() {
        let xi = 0.37;
        let t = legendre_table(4, xi);
        assert!((t[2][0] - 0.5 * (3.0 * xi * xi - 1.0)).abs() < 1e-15);
        assert!((t[2][1] - 3.0 * xi).abs() < 1e-15);
        assert!((t[2][2] - 3.0).abs() < 1e-15);
        assert!((t[3][0] - 0.5 * (5.0 * xi.powi(3) - 3.0 * xi)).abs() < 1e-15);
        assert!((t[3][1] - 0.5 * (15.0 * xi * xi - 3.0)).abs() < 1e-15);
        assert!((t[3][2] - 15.0 * xi).abs() < 1e-14);
    }

    #[test]
    fn basis_examples() {
        let b = build_basis(&PlateConfig::default());
        assert_eq!(b.dim(), 240);
        let one = SpectralBasis::new(1, 1, 1.0);
        assert_eq!(one.dim(), 1);
        assert!((one.eval_vector(0.3, 0.1, 0, 0)[0] - 0.3f64.sin()).abs() < 1e-16);
        let b = SpectralBasis::new(3, 2, 1.0);
        let f = SpectralField::single_mode(b, 2, 0, 1.0);
        assert!(f.value_at(PI / 2.0, 0.0).abs() < 1e-15);
        for (m, d) in [(1, 0), (3, 1), (2, 1)] {
            assert_eq!(b.mode_of(b.index(m, d)), (m, d));
        }
    }

    #[test]
    fn evaluation_examples() {
        let b = SpectralBasis::new(4, 3, 0.6);
        let u = SpectralField::from_modes(b, &[(1, 0, 1.0), (2, 1, -0.4), (3, 2, 0.7)]);
        for y in [-0.6, 0.0, 0.25, 0.6] {
            assert!(u.value_at(0.0, y).abs() < 1e-15);
            assert!(u.value_at(PI, y).abs() < 1e-14);
        }
        let single = SpectralField::single_mode(b, 1, 0, 1.0);
        assert!((single.value_at(PI / 2.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((single.dx_at(0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stiffness_is_symmetric_and_block_diagonal() {
        let cfg = small_cfg(5, 4);
        let basis = build_basis(&cfg);
        let grid = QuadratureGrid::new(&cfg);
        let raw = stiffness_unsymmetrized(&basis, &grid, 0.2);
        let kmax = raw.amax();
        assert!((&raw - raw.transpose()).amax() <= 1e-12 * kmax);
        let k = assemble_stiffness(&basis, &grid, 0.2).unwrap();
        assert_eq!((&k - k.transpose()).amax(), 0.0);
        for a in 0..basis.dim() {
            for b in 0..basis.dim() {
                if basis.mode_of(a).0 != basis.mode_of(b).0 {
                    assert!(k[(a, b)].abs() <= 1e-12 * kmax);
                }
            }
        }
    }

    #[test]
    fn sigma_difference_is_confined_to_mixed_terms() {
        // K(0) - K(sigma) = sigma * (mixed-derivative form); check it equals
        // sigma times the difference at sigma = 1 - 1e-..., i.e. it is linear in sigma
        let cfg = small_cfg(3, 4);
        let basis = build_basis(&cfg);
        let grid = QuadratureGrid::new(&cfg);
        let k0 = assemble_stiffness(&basis, &grid, 0.0).unwrap();
        let k2 = assemble_stiffness(&basis, &grid, 0.2).unwrap();
        let k4 = assemble_stiffness(&basis, &grid, 0.4).unwrap();
        let d1 = &k0 - &k2;
        let d2 = &k0 - &k4;
        assert!((&d2 - &d1 * 2.0).amax() <= 1e-10 * k0.amax());
        // constant-in-y, m = 1 functions have no mixed-derivative energy beyond the u_xx u_yy part, which vanishes
        assert!(d1[(basis.index(1, 0), basis.index(1, 0))].abs() < 1e-12);
        // for the linear-in-y function the 2 u_xy^2 term survives
        assert!(d1[(basis.index(1, 1), basis.index(1, 1))].abs() > 1e-3);
    }

    #[test]
    fn unit_weight_mass_examples() {
        let cfg = small_cfg(4, 3);
        let d = Discretization::new(&cfg);
        let one = GridField::constant(&d.grid, 1.0);
        let m1 = d.weighted_mass(&one).unwrap();
        for a in 0..d.basis.dim() {
            for b in 0..d.basis.dim() {
                if d.basis.mode_of(a).0 != d.basis.mode_of(b).0 {
                    assert!(m1[(a, b)].abs() < 1e-12);
                }
            }
        }
        assert!((m1[(0, 0)] - PI * cfg.ell()).abs() < 1e-12);
        let m2 = d.gram(&GridField::constant(&d.grid, 2.5));
        assert!((&m2 - &m1 * 2.5).amax() < 1e-12);
        assert_eq!((&m1 - m1.transpose()).amax(), 0.0);
    }

    #[test]
    fn mass_rejects_out_of_bounds_weights() {
        let cfg = small_cfg(2, 2);
        let d = Discretization::new(&cfg);
        let mut p = GridField::constant(&d.grid, 1.0);
        p.set(3, 2, 0.4);
        assert!(matches!(d.weighted_mass(&p), Err(Error::DensityOutOfBounds { i: 3, k: 2, .. })));
        p.set(3, 2, 3.0 + 1e-13);
        assert!(d.weighted_mass(&p).is_ok());
        p.set(3, 2, 3.1);
        assert!(d.weighted_mass(&p).is_err());
    }

    #[test]
    fn load_and_tabulation_agree_with_direct_evaluation() {
        let cfg = small_cfg(4, 3);
        let d = Discretization::new(&cfg);
        let u = SpectralField::from_modes(d.basis, &[(1, 0, 1.0), (2, 2, 0.3), (4, 1, -0.2)]);
        let g = d.to_grid(&u);
        let gx = d.dx_to_grid(&u);
        for (i, k) in [(0, 0), (7, 3), (39, 15)] {
            let (x, y) = d.grid.node(i, k);
            assert!((g.get(i, k) - u.value_at(x, y)).abs() < 1e-14);
            assert!((gx.get(i, k) - u.dx_at(x, y)).abs() < 1e-13);
        }
        // load of f against phi_a equals the Gram matrix applied to the coefficients
        let one = GridField::constant(&d.grid, 1.0);
        let lhs = d.load(&g);
        let rhs = d.gram(&one) * &u.coeffs;
        assert!((lhs - rhs).amax() < 1e-13);
    }

    #[test]
    fn quadrature_mean_uses_analytic_integrals() {
        let cfg = small_cfg(5, 3);
        let d = Discretization::new(&cfg);
        let u = SpectralField::from_modes(d.basis, &[(1, 0, 1.0), (3, 0, 0.5), (2, 0, 7.0), (1, 2, 3.0)]);
        let q = d.to_grid(&u).integrate(&d.grid);
        let a = d.basis.integrals().dot(&u.coeffs);
        assert!((q - a).abs() < 1e-12);
    }
}
