//! Numerical certification reports and the registry of certified claims.

use serde::{Deserialize, Serialize};

use crate::config::PlateConfig;
use crate::error::{Error, Result};

/// Outcome of checking one claim on a finite probe set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub claim_id: String,
    pub probe_count: usize,
    /// Smallest signed margin over the probes; positive means the claim held everywhere.
    pub min_margin: f64,
    pub resolution: String,
    pub pass: bool,
}

impl CertificationReport {
    /// Passes when every probe margin is at least `-slack`.
    pub fn from_margins(claim_id: &str, resolution: &str, margins: impl IntoIterator<Item = f64>, slack: f64) -> Self {
        let mut count = 0;
        let mut min = f64::INFINITY;
        let mut finite = true;
        for m in margins {
            count += 1;
            finite &= m.is_finite();
            min = min.min(m);
        }
        Self {
            claim_id: claim_id.to_string(),
            probe_count: count,
            min_margin: min,
            resolution: resolution.to_string(),
            pass: finite && count > 0 && min >= -slack,
        }
    }

    /// Passes when every probe margin is strictly positive.
    pub fn strict(claim_id: &str, resolution: &str, margins: impl IntoIterator<Item = f64>) -> Self {
        let mut r = Self::from_margins(claim_id, resolution, margins, 0.0);
        r.pass = r.pass && r.min_margin > 0.0;
        r
    }

    /// Overrides the probe count when one margin summarises many probes.
    pub fn with_probes(mut self, n: usize) -> Self {
        self.probe_count = n;
        self
    }

    /// Margin `tol - |error|` for identities checked to a tolerance.
    pub fn identity(claim_id: &str, resolution: &str, errors: impl IntoIterator<Item = f64>, tol: f64) -> Self {
        Self::from_margins(claim_id, resolution, errors.into_iter().map(|e| tol - e.abs()), 0.0)
    }
}

/// Resolution tag attached to every plate-dependent report.
pub fn resolution_tag(cfg: &PlateConfig) -> String {
    format!(
        "M={} J={} quad={}x{}",
        cfg.n_modes_x(),
        cfg.n_basis_y(),
        cfg.n_quad_x(),
        cfg.n_quad_y()
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Green,
    Series,
    Polarization,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "green" => Ok(Suite::Green),
            "series" => Ok(Suite::Series),
            "polarization" => Ok(Suite::Polarization),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
        }
    }
}

impl Suite {
    pub fn includes(&self, other: Suite) -> bool {
        *self == Suite::All || *self == other
    }
}

/// A claim and the statement it certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub suite: Suite,
    pub statement: &'static str,
}

const fn claim(id: &'static str, suite: Suite, statement: &'static str) -> Claim {
    Claim { id, suite, statement }
}

pub const REGISTRY: &[Claim] = &[
    claim("green.kernel_positive", Suite::Green, "G(x,y,rho,w) > 0 for interior source and target"),
    claim("green.kernel_symmetric", Suite::Green, "G(P,Q) = G(Q,P)"),
    claim("green.kernel_hinged_edges", Suite::Green, "G(0,y,rho,w) = G(pi,y,rho,w) = 0"),
    claim("green.dx_left_edge", Suite::Green, "G_x(0,y,rho,w) > 0 for rho in (0,pi)"),
    claim("green.dx_right_edge", Suite::Green, "G_x(pi,y,rho,w) < 0 for rho in (0,pi)"),
    claim("green.dx_midline", Suite::Green, "G_x(pi/2,y,rho,w) < 0 for rho < pi/2 and > 0 for rho > pi/2"),
    claim("green.dx_midline_center", Suite::Green, "G_x(pi/2,y,pi/2,w) = 0"),
    claim("green.reflection_both", Suite::Green, "G(x,y,rho,w) = G(pi-x,y,pi-rho,w)"),
    claim("green.reflection_swap", Suite::Green, "G(pi-x,y,rho,w) = G(x,y,pi-rho,w)"),
    claim("green.reflection_gap", Suite::Green, "G(x,y,rho,w) > max(G(pi-x,y,rho,w), G(x,y,pi-rho,w)) for x,rho in (0,pi/2)"),
    claim("green.inverse_consistency", Suite::Green, "K applied to the solution returns the load"),
    claim("green.positivity_hopf", Suite::Green, "f >= 0, f != 0 gives u > 0, u_x(0,y) > 0, u_x(pi,y) < 0"),
    claim("series.s1_positive", Suite::Series, "S1(z) > 0 on (0,pi) for positive decreasing coefficients"),
    claim("series.s2_negative", Suite::Series, "S2(z) < 0 on (0,pi) for positive decreasing coefficients"),
    claim("series.s2_reflection", Suite::Series, "S2(z) = -S1(pi-z)"),
    claim("series.s1_lower_bound", Suite::Series, "S1(z) >= phi_1 (sin z - (pi^2/6 - 1))"),
    claim("series.tail_bound", Suite::Series, "partial sums at L and 2L differ by less than the tail bound at L"),
    claim("series.s1_closed_form", Suite::Series, "S1(pi/2) = pi^3/32 for phi_m = 1/m"),
    claim("series.cn_bound", Suite::Series, "C_N < 1/N for 2 <= N <= 500"),
    claim("series.cbar_bound", Suite::Series, "Cbar_N < 4/(3(N+1)) for odd 3 <= N <= 199"),
    claim("series.z3", Suite::Series, "the root of sin z = C_3 in (0,pi/2) lies within 0.005 of 0.21"),
    claim("series.sine_lower_bound", Suite::Series, "sin x >= 3x/pi on (0,pi/6]"),
    claim("series.upsilon_positive", Suite::Series, "upsilon_m(z) > 0 for 3 <= m <= N, z in (0, pi/(N+1)), N = 50"),
    claim("series.upsilon_zero", Suite::Series, "upsilon_m(0) = 0"),
    claim("polarization.pointwise_sum", Suite::Polarization, "v + v o R = v_H + v_H o R at every node"),
    claim("polarization.idempotent", Suite::Polarization, "(v_H)_H = v_H"),
    claim("polarization.product_identity", Suite::Polarization, "[p_u u]_H = p_(u_H) u_H"),
    claim("polarization.mass", Suite::Polarization, "int p_(u_H) = |Omega|"),
    claim("polarization.energy_identity", Suite::Polarization, "int p_(u_H) u_H^2 = int p_u u^2"),
    claim("polarization.inequality", Suite::Polarization, "int G(p_u u) p_u u <= int G(p_(u_H) u_H) p_(u_H) u_H"),
    claim("polarization.equality_case", Suite::Polarization, "equality in the polarization inequality when u = u_H"),
    claim("polarization.trichotomy", Suite::Polarization, "optimal eigenfunctions are left dominant, right dominant or symmetric, with matching midline slope"),
    claim("duality.eigenfunction", Suite::Polarization, "the Green quotient of the first eigenfunction equals 1/lambda_1"),
    claim("duality.upper_bound", Suite::Polarization, "the Green quotient of any v is at most 1/lambda_1"),
    claim("duality.absolute_value", Suite::Polarization, "the Green quotient of |v| is at least that of v"),
];

pub fn lookup(id: &str) -> Option<&'static Claim> {
    REGISTRY.iter().find(|c| c.id == id)
}

pub fn claims(suite: Suite) -> impl Iterator<Item = &'static Claim> {
    REGISTRY.iter().filter(move |c| suite.includes(c.suite))
}

/// Runs the requested suites, returning one report per registered claim in registry order.
pub fn run_suite(cfg: &PlateConfig, suite: Suite, seed: u64) -> Result<Vec<CertificationReport>> {
    let mut out = Vec::new();
    if suite.includes(Suite::Green) {
        out.extend(crate::green::certify_green(cfg, seed)?);
    }
    if suite.includes(Suite::Series) {
        out.extend(crate::series::certify_series());
    }
    if suite.includes(Suite::Polarization) {
        out.extend(crate::polarization::certify_polarization(cfg, seed)?);
    }
    let rank = |id: &str| REGISTRY.iter().position(|c| c.id == id).unwrap_or(usize::MAX);
    out.sort_by_key(|r| rank(&r.claim_id));
    Ok(out)
}
