//! Plate geometry, material parameters and admissibility of weights.
//!
//! The plate occupies `(0, pi) x (-ell, ell)`. It is hinged on the short
//! edges `x = 0` and `x = pi` and free on `y = +-ell`. A weight `p` is
//! admissible when `alpha <= p <= beta` and its total mass equals the area.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw, unvalidated parameters as they appear in a configuration file.
///
/// Every key is optional in the file; missing keys take the defaults below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlateParams {
    pub sigma: f64,
    pub ell: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n_modes_x: usize,
    pub n_basis_y: usize,
    pub n_quad_x: usize,
    pub n_quad_y: usize,
    pub opt_max_iter: usize,
    pub opt_tol: f64,
    pub eig_tol: f64,
}

impl Default for PlateParams {
    fn default() -> Self {
        Self {
            sigma: 0.2,
            ell: PI / 5.0,
            alpha: 0.5,
            beta: 3.0,
            n_modes_x: 20,
            n_basis_y: 12,
            n_quad_x: 96,
            n_quad_y: 48,
            opt_max_iter: 100,
            opt_tol: 1e-10,
            eig_tol: 1e-12,
        }
    }
}

/// Validated plate configuration. Construct with [`PlateConfig::new`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlateConfig {
    params: PlateParams,
}

impl PlateConfig {
    pub fn new(params: PlateParams) -> Result<Self> {
        let p = &params;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(p.sigma.is_finite() && (0.0..1.0).contains(&p.sigma)) {
            return bad(format!("sigma must lie in [0, 1), got {}", p.sigma));
        }
        if !(p.ell.is_finite() && p.ell > 0.0) {
            return bad(format!("ell must be positive, got {}", p.ell));
        }
        if !(p.alpha.is_finite() && p.beta.is_finite() && 0.0 < p.alpha && p.alpha < 1.0 && 1.0 < p.beta) {
            return bad(format!(
                "need 0 < alpha < 1 < beta, got alpha = {}, beta = {}",
                p.alpha, p.beta
            ));
        }
        if p.n_modes_x == 0 || p.n_basis_y == 0 {
            return bad("basis sizes must be positive".into());
        }
        if p.n_quad_x < 2 || !p.n_quad_x.is_multiple_of(2) {
            return bad(format!(
                "n_quad_x must be even so every node has a distinct mirror node, got {}",
                p.n_quad_x
            ));
        }
        if p.n_quad_y == 0 {
            return bad("n_quad_y must be positive".into());
        }
        if p.opt_max_iter == 0 {
            return bad("opt_max_iter must be positive".into());
        }
        if !(p.opt_tol > 0.0 && p.eig_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        Ok(Self { params })
    }

    /// Reads a TOML file. Missing keys fall back to [`PlateParams::default`].
    pub fn from_toml_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path, message),
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let params: PlateParams = toml::from_str(text).map_err(|e| Error::parse("<config>", e))?;
        Self::new(params)
    }

    pub fn params(&self) -> PlateParams {
        self.params
    }

    pub fn sigma(&self) -> f64 {
        self.params.sigma
    }
    pub fn ell(&self) -> f64 {
        self.params.ell
    }
    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }
    pub fn beta(&self) -> f64 {
        self.params.beta
    }
    pub fn n_modes_x(&self) -> usize {
        self.params.n_modes_x
    }
    pub fn n_basis_y(&self) -> usize {
        self.params.n_basis_y
    }
    pub fn n_quad_x(&self) -> usize {
        self.params.n_quad_x
    }
    pub fn n_quad_y(&self) -> usize {
        self.params.n_quad_y
    }
    pub fn opt_max_iter(&self) -> usize {
        self.params.opt_max_iter
    }
    pub fn opt_tol(&self) -> f64 {
        self.params.opt_tol
    }
    pub fn eig_tol(&self) -> f64 {
        self.params.eig_tol
    }

    /// `|Omega| = 2 pi ell`.
    pub fn domain_area(&self) -> f64 {
        domain_area(self)
    }

    pub fn weight_rule(&self) -> AdmissibleWeightRule {
        AdmissibleWeightRule::new(self)
    }
}

pub fn domain_area(cfg: &PlateConfig) -> f64 {
    2.0 * PI * cfg.ell()
}

/// Fraction of the area that carries the light material: `(beta - 1) / (beta - alpha)`.
pub fn sublevel_fraction(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0 && beta > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sublevel fraction needs 0 < alpha < 1 < beta, got alpha = {alpha}, beta = {beta}"
        )));
    }
    Ok((beta - 1.0) / (beta - alpha))
}

/// Bounds and mass constraint defining the admissible weight family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleWeightRule {
    pub alpha: f64,
    pub beta: f64,
    pub target_mass: f64,
    pub sublevel_fraction: f64,
}

impl AdmissibleWeightRule {
    pub fn new(cfg: &PlateConfig) -> Self {
        let (alpha, beta) = (cfg.alpha(), cfg.beta());
        Self {
            alpha,
            beta,
            target_mass: cfg.domain_area(),
            // validated at config construction
            sublevel_fraction: (beta - 1.0) / (beta - alpha),
        }
    }

    /// Measure that the light-material set must occupy.
    pub fn sublevel_measure(&self) -> f64 {
        self.sublevel_fraction * self.target_mass
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.alpha - 1e-12 && value <= self.beta + 1e-12
    }
}
