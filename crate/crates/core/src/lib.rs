pub mod certify;
pub mod cli;
pub mod config;
pub mod contour;
pub mod discretization;
pub mod eigen;
pub mod error;
pub mod green;
pub mod io;
pub mod optimizer;
pub mod polarization;
pub mod quadrature;
pub mod series;

pub use config::{AdmissibleWeightRule, PlateConfig, PlateParams};
pub use discretization::{Discretization, GridField, SpectralBasis, SpectralField};
pub use error::{Error, Result};
pub use quadrature::QuadratureGrid;
