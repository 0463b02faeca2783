//! Sine series with positive decreasing coefficients and the elementary
//! constants and inequalities used to control their sign.
//!
//! `S1(z) = sum phi_m sin(mz) / m^2`, `S2(z) = sum (-1)^m phi_m sin(mz) / m^2`.
//! Truncating after `L` terms leaves a tail bounded by
//! `phi_L * sum_{m > L} m^-2`, because `phi` is decreasing and `|sin| <= 1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::certify::CertificationReport;
use crate::error::{Error, Result};
use crate::quadrature::compensated_sum;

pub const ZETA2: f64 = PI * PI / 6.0;

/// `sum_{m > n} 1 / m^2`.
pub fn inverse_square_tail(n: usize) -> f64 {
    ZETA2 - inverse_square_partial(n)
}

/// `sum_{m <= n} 1 / m^2`, summed from the small terms up.
pub fn inverse_square_partial(n: usize) -> f64 {
    compensated_sum((1..=n).rev().map(|m| 1.0 / (m as f64 * m as f64)))
}

/// Synthetic positive, strictly decreasing coefficient families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SeriesFamily {
    /// `1/m`
    Harmonic,
    /// `2^-m`
    Geometric,
    /// `1/log(m+1)`
    InverseLog,
    /// `m^-s`
    Power(f64),
}

impl SeriesFamily {
    pub fn standard() -> [SeriesFamily; 6] {
        [
            SeriesFamily::Harmonic,
            SeriesFamily::Geometric,
            SeriesFamily::InverseLog,
            SeriesFamily::Power(0.5),
            SeriesFamily::Power(1.5),
            SeriesFamily::Power(2.0),
        ]
    }

    pub fn coefficient(&self, m: usize) -> f64 {
        let mf = m as f64;
        match *self {
            SeriesFamily::Harmonic => 1.0 / mf,
            SeriesFamily::Geometric => (-mf * std::f64::consts::LN_2).exp(),
            SeriesFamily::InverseLog => 1.0 / (mf + 1.0).ln(),
            SeriesFamily::Power(s) => mf.powf(-s),
        }
    }

    /// Truncation long enough that the tail bound is negligible for sign checks.
    pub fn default_len(&self) -> usize {
        match self {
            SeriesFamily::Geometric => 1000,
            _ => 10_000,
        }
    }

    pub fn name(&self) -> String {
        match self {
            SeriesFamily::Harmonic => "1/m".into(),
            SeriesFamily::Geometric => "2^-m".into(),
            SeriesFamily::InverseLog => "1/log(m+1)".into(),
            SeriesFamily::Power(s) => format!("m^-{s}"),
        }
    }
}

/// `phi_1, ..., phi_L`, positive and strictly decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    values: Vec<f64>,
    family: Option<SeriesFamily>,
}

impl CoefficientSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient sequence".into()));
        }
        for (idx, w) in values.windows(2).enumerate() {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidArgument(format!(
                    "coefficients must decrease strictly: phi_{} = {} , phi_{} = {}",
                    idx + 1,
                    w[0],
                    idx + 2,
                    w[1]
                )));
            }
        }
        if !(values[values.len() - 1] > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be positive and finite".into()));
        }
        Ok(Self { values, family: None })
    }

    pub fn generate(family: SeriesFamily, len: usize) -> Result<Self> {
        let mut seq = Self::new((1..=len).map(|m| family.coefficient(m)).collect())?;
        seq.family = Some(family);
        Ok(seq)
    }

    pub fn standard(family: SeriesFamily) -> Self {
        Self::generate(family, family.default_len()).expect("standard families are admissible")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    /// `phi_m`, one-based.
    pub fn phi(&self, m: usize) -> f64 {
        self.values[m - 1]
    }
    pub fn family(&self) -> Option<SeriesFamily> {
        self.family
    }
}

/// Partial sum and a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub partial: f64,
    pub tail_bound: f64,
}

impl SeriesValue {
    /// Lower end of the certified enclosure.
    pub fn lower(&self) -> f64 {
        self.partial - self.tail_bound
    }
    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }
}

fn eval_series(seq: &CoefficientSequence, z: f64, truncation: usize, alternating: bool) -> Result<SeriesValue> {
    if truncation == 0 || truncation > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "truncation {truncation} outside 1..={}",
            seq.len()
        )));
    }
    if !(0.0..=PI).contains(&z) {
        return Err(Error::InvalidArgument(format!("z = {z} outside [0, pi]")));
    }
    let terms = (1..=truncation).rev().map(|m| {
        let mf = m as f64;
        let sign = if alternating && m % 2 == 1 { -1.0 } else { 1.0 };
        sign * seq.phi(m) * (mf * z).sin() / (mf * mf)
    });
    Ok(SeriesValue {
        partial: compensated_sum(terms),
        tail_bound: seq.phi(truncation) * inverse_square_tail(truncation),
    })
}

pub fn eval_s1(seq: &CoefficientSequence, z: f64, truncation: usize) -> Result<SeriesValue> {
    eval_series(seq, z, truncation, false)
}

pub fn eval_s2(seq: &CoefficientSequence, z: f64, truncation: usize) -> Result<SeriesValue> {
    eval_series(seq, z, truncation, true)
}

/// `z_k = k pi / (n + 1)`, `k = 1..=n`.
pub fn open_grid(n: usize, upper: f64) -> Vec<f64> {
    (1..=n).map(|k| k as f64 * upper / (n + 1) as f64).collect()
}

/// `S1 > 0` certified when the partial sum exceeds the tail bound at every `z`.
pub fn certify_s1_positive(seq: &CoefficientSequence, zs: &[f64]) -> Result<CertificationReport> {
    let margins = zs
        .iter()
        .map(|&z| eval_s1(seq, z, seq.len()).map(|v| v.lower()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificationReport::strict("series.s1_positive", &series_tag(seq), margins))
}

pub fn certify_s2_negative(seq: &CoefficientSequence, zs: &[f64]) -> Result<CertificationReport> {
    let margins = zs
        .iter()
        .map(|&z| eval_s2(seq, z, seq.len()).map(|v| -v.upper()))
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificationReport::strict("series.s2_negative", &series_tag(seq), margins))
}

fn series_tag(seq: &CoefficientSequence) -> String {
    let name = seq.family.map(|f| f.name()).unwrap_or_else(|| "custom".into());
    format!("phi={name} L={}", seq.len())
}

/// `C_N = (sum_{m > N} m^-2) / (sum_{m <= N} m^-2)`.
pub fn constant_cn(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("C_N needs N >= 1".into()));
    }
    Ok(inverse_square_tail(n) / inverse_square_partial(n))
}

/// `Cbar_N = (sum_{m >= N+2} m^-2) / (3/4 + sum_{m odd, 3 <= m <= N} (1/m - 1/(m+1))^2)`.
pub fn constant_cbar_n(n: usize) -> Result<f64> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("Cbar_N needs odd N >= 3, got {n}")));
    }
    let den = 0.75
        + (3..=n)
            .step_by(2)
            .map(|m| {
                let d = 1.0 / m as f64 - 1.0 / (m + 1) as f64;
                d * d
            })
            .sum::<f64>();
    Ok(inverse_square_tail(n + 1) / den)
}

/// Root of `sin z = c` in `(0, pi/2)`.
pub fn sine_root(c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("sin z = {c} has no root in (0, pi/2)")));
    }
    Ok(c.asin())
}

/// `z_N` with `sin z_N = C_N`.
pub fn z_root(n: usize) -> Result<f64> {
    sine_root(constant_cn(n)?)
}

/// Root of `sin z = Cbar_N`.
pub fn zbar_root(n: usize) -> Result<f64> {
    sine_root(constant_cbar_n(n)?)
}

/// Margins `sin x - 3x/pi` on a grid inside `(0, pi/6]`.
pub fn check_sine_lower_bound(xs: &[f64]) -> Result<CertificationReport> {
    if let Some(&x) = xs.iter().find(|&&x| !(x > 0.0 && x <= PI / 6.0)) {
        return Err(Error::InvalidArgument(format!("x = {x} outside (0, pi/6]")));
    }
    // equality at pi/6; allow the rounding of sin there
    Ok(CertificationReport::from_margins(
        "series.sine_lower_bound",
        "exact",
        xs.iter().map(|&x| x.sin() - 3.0 * x / PI),
        4.0 * f64::EPSILON,
    ))
}

/// `sin(mz)/m^2 - sin((m+1)z)/(m+1)^2 - sin z (1/m - 1/(m+1))^2`, for `m >= 3`.
pub fn upsilon(m: usize, z: f64) -> Result<f64> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("upsilon_m needs m >= 3, got {m}")));
    }
    let mf = m as f64;
    let m1 = mf + 1.0;
    let d = 1.0 / mf - 1.0 / m1;
    Ok((mf * z).sin() / (mf * mf) - (m1 * z).sin() / (m1 * m1) - z.sin() * d * d)
}

/// The whole series battery: six families on `z = k pi / 1000`.
pub fn certify_series() -> Vec<CertificationReport> {
    let zs = open_grid(999, PI);
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    let mut refl = Vec::new();
    let mut lower = Vec::new();
    let mut tail = Vec::new();
    for family in SeriesFamily::standard() {
        let seq = CoefficientSequence::standard(family);
        let half = seq.len() / 2;
        for &z in &zs {
            let a = eval_s1(&seq, z, seq.len()).expect("z in range");
            let b = eval_s2(&seq, z, seq.len()).expect("z in range");
            let r = eval_s1(&seq, PI - z, seq.len()).expect("z in range");
            s1.push(a.lower());
            s2.push(-b.upper());
            refl.push(b.partial + r.partial);
            lower.push(a.lower() - seq.phi(1) * (z.sin() - (ZETA2 - 1.0)));
            let h = eval_s1(&seq, z, half).expect("z in range");
            tail.push(h.tail_bound - (h.partial - a.partial).abs());
        }
    }
    let tag = "6 families, 999 points";
    let harmonic = CoefficientSequence::standard(SeriesFamily::Harmonic);
    let mid = eval_s1(&harmonic, PI / 2.0, harmonic.len()).expect("z in range");
    let closed = PI.powi(3) / 32.0;
    let cn: Vec<f64> = (2..=500).map(|n| 1.0 / n as f64 - constant_cn(n).expect("n >= 1")).collect();
    let cbar: Vec<f64> = (3..=199)
        .step_by(2)
        .map(|n| 4.0 / (3.0 * (n + 1) as f64) - constant_cbar_n(n).expect("odd n"))
        .collect();
    let z3 = z_root(3).expect("C_3 in (0,1)");
    let ups_grid = open_grid(200, PI / 51.0);
    let ups: Vec<f64> = (3..=50)
        .flat_map(|m| ups_grid.iter().map(move |&z| upsilon(m, z).expect("m >= 3")))
        .collect();
    let ups0: Vec<f64> = (3..=50).map(|m| upsilon(m, 0.0).expect("m >= 3")).collect();
    vec![
        CertificationReport::strict("series.s1_positive", tag, s1),
        CertificationReport::strict("series.s2_negative", tag, s2),
        CertificationReport::identity("series.s2_reflection", tag, refl, 1e-14),
        CertificationReport::from_margins("series.s1_lower_bound", tag, lower, 0.0),
        CertificationReport::strict("series.tail_bound", tag, tail),
        CertificationReport::identity("series.s1_closed_form", "phi=1/m L=10000", [mid.partial - closed], 1e-10),
        CertificationReport::strict("series.cn_bound", "N=2..500", cn),
        CertificationReport::strict("series.cbar_bound", "odd N=3..199", cbar),
        CertificationReport::identity("series.z3", "N=3", [z3 - 0.21], 0.005),
        check_sine_lower_bound(&open_grid(199, PI / 6.0).into_iter().chain([PI / 6.0]).collect::<Vec<_>>())
            .expect("grid inside (0, pi/6]"),
        CertificationReport::strict("series.upsilon_positive", "m=3..50, 200 points", ups),
        CertificationReport::identity("series.upsilon_zero", "m=3..50", ups0, 0.0),
    ]
}
