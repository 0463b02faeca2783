//! Smallest eigenpair of `K c = lambda M_p c`.
//!
//! Dense symmetric-definite reduction: `M_p = L L^T`, then the standard
//! symmetric problem for `L^{-1} K L^{-T}`.

use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector};

use crate::discretization::{SpectralBasis, SpectralField};
use crate::error::{Error, Result};

/// Relative gap below which the two smallest eigenvalues are reported as clustered.
pub const GAP_WARNING_REL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda1: f64,
    /// Second eigenvalue, kept for gap diagnostics.
    pub lambda2: Option<f64>,
    /// Coefficients normalised so that `c^T M_p c = 1`, with positive mean.
    pub u: SpectralField,
    /// `||K c - lambda1 M_p c|| / ||K c||`.
    pub residual: f64,
    pub gap_warning: bool,
}

impl Eigenpair {
    pub fn relative_gap(&self) -> Option<f64> {
        self.lambda2.map(|l2| (l2 - self.lambda1) / self.lambda1)
    }
}

/// All generalized eigenpairs, ascending. Eigenvectors are `M`-orthonormal columns.
pub fn generalized_eigen(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::Shape("stiffness and mass must be square of equal size".into()));
    }
    let chol = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite("weighted mass matrix"))?;
    let l = chol.l();
    // A = L^{-1} K L^{-T}
    let linv_k = l
        .solve_lower_triangular(k)
        .ok_or(Error::NotPositiveDefinite("weighted mass matrix"))?;
    let a_t = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or(Error::NotPositiveDefinite("weighted mass matrix"))?;
    let a = (&a_t + a_t.transpose()) * 0.5;
    let eig = a
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenNonConvergence("symmetric eigensolver hit its iteration cap".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let y = eig.eigenvectors.column(i).into_owned();
        let c = l
            .transpose()
            .solve_upper_triangular(&y)
            .ok_or(Error::NotPositiveDefinite("weighted mass matrix"))?;
        vecs.set_column(col, &c);
    }
    Ok((values, vecs))
}

/// Smallest eigenpair with the sign fixed by a positive mean and
/// `||sqrt(p) u||_2 = 1`.
pub fn solve_first(k: &DMatrix<f64>, m_p: &DMatrix<f64>, basis: &SpectralBasis, eig_tol: f64) -> Result<Eigenpair> {
    if k.nrows() != basis.dim() {
        return Err(Error::Shape(format!("matrix size {} vs basis dimension {}", k.nrows(), basis.dim())));
    }
    let (values, vecs) = generalized_eigen(k, m_p)?;
    let mut lambda1 = values[0];
    if !(lambda1 > 0.0) {
        return Err(Error::NotPositiveDefinite("stiffness matrix"));
    }
    let mut c = vecs.column(0).into_owned();
    let mut residual = relative_residual(k, m_p, &c, lambda1);
    // The reduction loses a factor cond(M_p) in the residual; polish with
    // inverse iteration on K, which converges at rate lambda1/lambda2.
    if residual > eig_tol {
        let kchol = Cholesky::new(k.clone()).ok_or(Error::NotPositiveDefinite("stiffness matrix"))?;
        for _ in 0..50 {
            let next = kchol.solve(&(m_p * &c));
            let norm = next.dot(&(m_p * &next)).sqrt();
            c = next / norm;
            lambda1 = c.dot(&(k * &c));
            residual = relative_residual(k, m_p, &c, lambda1);
            if residual <= eig_tol {
                break;
            }
        }
    }
    if !(residual <= eig_tol) {
        return Err(Error::EigenNonConvergence(format!(
            "relative residual {residual:e} exceeds eig_tol {eig_tol:e}"
        )));
    }
    if basis.integrals().dot(&c) < 0.0 {
        c = -c;
    }
    let norm = c.dot(&(m_p * &c)).sqrt();
    c /= norm;
    let lambda2 = (values.len() > 1).then(|| values[1]);
    let gap_warning = lambda2.is_some_and(|l2| (l2 - lambda1) < GAP_WARNING_REL * lambda1.abs());
    if gap_warning {
        warn!("smallest eigenvalues are clustered: {lambda1} vs {:?}", lambda2);
    }
    Ok(Eigenpair {
        lambda1,
        lambda2,
        u: SpectralField::new(*basis, c)?,
        residual,
        gap_warning,
    })
}

fn relative_residual(k: &DMatrix<f64>, m: &DMatrix<f64>, c: &DVector<f64>, lambda: f64) -> f64 {
    let kc = k * c;
    let r = &kc - m * c * lambda;
    r.norm() / kc.norm()
}

/// `c^T K c / c^T M_p c`.
pub fn rayleigh_quotient(u: &SpectralField, k: &DMatrix<f64>, m_p: &DMatrix<f64>) -> Result<f64> {
    let c = &u.coeffs;
    let den = c.dot(&(m_p * c));
    if c.iter().all(|&v| v == 0.0) || den == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(c.dot(&(k * c)) / den)
}
