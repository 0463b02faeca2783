//! CSV and JSON files written and read by the command line tools.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certify::CertificationReport;
use crate::config::{AdmissibleWeightRule, PlateParams};
use crate::contour::Polyline;
use crate::discretization::{GridField, SpectralField};
use crate::error::{Error, Result};
use crate::optimizer::{DensityField, OptimizationTrace};
use crate::quadrature::QuadratureGrid;

/// Node coordinates in a CSV must match the grid this closely.
pub const COORD_TOL: f64 = 1e-9;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

fn finish(path: &Path, mut w: csv::Writer<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Serialize)]
struct TraceRow {
    iter: usize,
    lambda1: f64,
    threshold_t: f64,
    #[serde(rename = "S_measure")]
    s_measure: f64,
    density_change_measure: f64,
}

pub fn write_trace_csv(path: &Path, trace: &OptimizationTrace) -> Result<()> {
    let mut w = writer(path)?;
    for r in &trace.records {
        w.serialize(TraceRow {
            iter: r.iter,
            lambda1: r.lambda1,
            threshold_t: r.threshold_t,
            s_measure: r.s_measure,
            density_change_measure: r.density_change_measure,
        })
        .map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

/// `x, y, <name>` for every quadrature node, x-major.
pub fn write_grid_csv(path: &Path, grid: &QuadratureGrid, field: &GridField, name: &str) -> Result<()> {
    field.check_grid(grid)?;
    let mut w = writer(path)?;
    w.write_record(["x", "y", name]).map_err(|e| csv_error(path, e))?;
    for (i, k) in grid.indices() {
        let (x, y) = grid.node(i, k);
        w.write_record([x.to_string(), y.to_string(), field.get(i, k).to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

pub fn write_density_csv(path: &Path, grid: &QuadratureGrid, p: &DensityField) -> Result<()> {
    write_grid_csv(path, grid, p.field(), "p")
}

/// Reads an `x, y, value` node file laid out like [`write_grid_csv`].
pub fn read_grid_csv(path: &Path, grid: &QuadratureGrid) -> Result<GridField> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut values = Vec::with_capacity(grid.len());
    let mut nodes = grid.indices();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 3 {
            return Err(Error::parse(path, format!("row {}: expected 3 columns, found {}", row + 1, rec.len())));
        }
        let num = |c: usize| {
            rec[c]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(path, format!("row {}: {e}", row + 1)))
        };
        let (x, y, v) = (num(0)?, num(1)?, num(2)?);
        let Some((i, k)) = nodes.next() else {
            return Err(Error::parse(path, format!("more than {} rows", grid.len())));
        };
        let (nxv, nyv) = grid.node(i, k);
        if (x - nxv).abs() > COORD_TOL || (y - nyv).abs() > COORD_TOL {
            return Err(Error::parse(
                path,
                format!("row {}: point ({x}, {y}) is not quadrature node ({nxv}, {nyv})", row + 1),
            ));
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::parse(path, format!("expected {} rows, found {}", grid.len(), values.len())));
    }
    GridField::new(grid.nx(), grid.ny(), values)
}

/// Reads and validates an admissible density.
pub fn read_density_csv(path: &Path, grid: &QuadratureGrid, rule: &AdmissibleWeightRule) -> Result<DensityField> {
    DensityField::new(read_grid_csv(path, grid)?, grid, rule)
}

#[derive(Debug, Serialize)]
struct CoeffRow {
    m: usize,
    d: usize,
    coefficient: f64,
}

/// Coefficients of `sin(m x) P_d(y / ell)`.
pub fn write_coefficients_csv(path: &Path, u: &SpectralField) -> Result<()> {
    let mut w = writer(path)?;
    for (flat, &c) in u.coeffs.iter().enumerate() {
        let (m, d) = u.basis.mode_of(flat);
        w.serialize(CoeffRow { m, d, coefficient: c })
            .map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

#[derive(Debug, Serialize)]
struct LevelRow {
    level: f64,
    line: usize,
    point: usize,
    x: f64,
    y: f64,
    closed: bool,
}

pub fn write_levels_csv(path: &Path, lines: &[Polyline]) -> Result<()> {
    let mut w = writer(path)?;
    // explicit header so that a file without lines still has one
    w.write_record(["level", "line", "point", "x", "y", "closed"])
        .map_err(|e| csv_error(path, e))?;
    for (li, l) in lines.iter().enumerate() {
        for (pi, &(x, y)) in l.points.iter().enumerate() {
            w.serialize(LevelRow {
                level: l.level,
                line: li,
                point: pi,
                x,
                y,
                closed: l.closed,
            })
            .map_err(|e| csv_error(path, e))?;
        }
    }
    finish(path, w)
}

/// Dense matrix as whitespace-separated rows.
pub fn write_matrix_txt(path: &Path, m: &nalgebra::DMatrix<f64>) -> Result<()> {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", m[(i, j)])).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::parse(path, e))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

/// Pass/fail counts of a certification bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
}

impl CertificationSummary {
    pub fn of(reports: &[CertificationReport]) -> Self {
        Self {
            total: reports.len(),
            passed: reports.iter().filter(|r| r.pass).count(),
            failed: reports.iter().filter(|r| !r.pass).map(|r| r.claim_id.clone()).collect(),
        }
    }
}

/// One line of `manifest.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: PlateParams,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
    pub version: String,
    pub certifications: Option<CertificationSummary>,
}

pub const MANIFEST_FILE: &str = "manifest.jsonl";

impl RunManifest {
    pub fn new(command: &str, config: PlateParams) -> Self {
        Self {
            command: command.to_string(),
            config,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
            certifications: None,
        }
    }

    /// Appends this run to `dir/manifest.jsonl`.
    pub fn append(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let line = serde_json::to_string(self).map_err(|e| Error::parse(&path, e))?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        writeln!(f, "{line}").map_err(|e| Error::io(&path, e))
    }

    pub fn read_all(dir: &Path) -> Result<Vec<RunManifest>> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::parse(&path, e)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PlateConfig;

    #[test]
    fn grid_csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = QuadratureGrid::with_sizes(0.5, 6, 4);
        let f = GridField::from_fn(&grid, |x, y| x.exp() * y + 1.0 / 3.0);
        let path = dir.path().join("f.csv");
        write_grid_csv(&path, &grid, &f, "u").unwrap();
        assert_eq!(read_grid_csv(&path, &grid).unwrap(), f);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,y,u\n"));
    }

    #[test]
    fn density_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PlateConfig::new(PlateParams {
            n_quad_x: 6,
            n_quad_y: 4,
            ..Default::default()
        })
        .unwrap();
        let grid = QuadratureGrid::new(&cfg);
        let rule = cfg.weight_rule();
        let path = dir.path().join("p.csv");
        let mut p = GridField::constant(&grid, 1.0);
        p.set(0, 0, 0.4);
        write_grid_csv(&path, &grid, &p, "p").unwrap();
        assert!(matches!(
            read_density_csv(&path, &grid, &rule),
            Err(Error::DensityOutOfBounds { i: 0, k: 0, .. })
        ));
        let other = QuadratureGrid::with_sizes(cfg.ell(), 8, 4);
        assert!(matches!(read_grid_csv(&path, &other), Err(Error::Parse { .. })));
        fs::write(&path, "x,y,p\n0.1,0.2,abc\n").unwrap();
        assert!(matches!(read_grid_csv(&path, &grid), Err(Error::Parse { .. })));
        assert!(matches!(
            read_grid_csv(&dir.path().join("missing.csv"), &grid),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn manifest_appends() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("solve", PlateParams::default());
        m.outputs.push("a.csv".into());
        m.append(dir.path()).unwrap();
        m.command = "optimize".into();
        m.append(dir.path()).unwrap();
        let all = RunManifest::read_all(dir.path()).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].command, "solve");
        assert_eq!(all[1].outputs, vec![PathBuf::from("a.csv")]);
    }

    #[test]
    fn levels_csv_has_header_when_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        write_levels_csv(&path, &[]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "level,line,point,x,y,closed\n");
    }
}
