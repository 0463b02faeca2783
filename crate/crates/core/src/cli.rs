//! `plate solve | optimize | certify`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 a certified claim failed.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::info;
use serde::Serialize;

use crate::certify::{run_suite, Suite};
use crate::config::PlateConfig;
use crate::contour::{level_sets, SampledField};
use crate::discretization::{Discretization, SpectralField};
use crate::eigen::Eigenpair;
use crate::error::{Error, Result};
use crate::green::linspace;
use crate::io::{self, CertificationSummary, RunManifest};
use crate::optimizer::{
    beta_region, conjecture_diagnostic, midline_slope_check, minimize, mirror_mismatch, solve_density,
    symmetry_classify, BetaRegion, ConjectureReport, ConvergenceStatus, DensityField, InitialWeight, MirrorMismatch,
    SYMMETRY_TOL,
};

pub const EXIT_CERTIFICATION: i32 = 4;

/// Relative agreement required between multistart limits.
pub const AGREEMENT_TOL: f64 = 1e-8;

/// Number of iso-levels written for each eigenfunction.
pub const LEVEL_COUNT: usize = 10;

#[derive(Debug, Parser)]
#[command(name = "plate", version, about = "Composite partially hinged plate: eigenvalues, optimal densities, certifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First eigenpair for one density.
    Solve {
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV of `x,y,p` at the quadrature nodes, or `uniform`.
        #[arg(long, default_value = "uniform")]
        density: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Rearrangement iteration from several starting densities.
    Optimize {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Extra first start: a density CSV, or one of uniform, left-beta, right-beta.
        #[arg(long)]
        density: Option<String>,
        #[arg(long, default_value_t = 4)]
        starts: usize,
        /// Seed of the random starting densities.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Numerical certification suites.
    Certify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Solve { config, density, out } => cmd_solve(config.as_deref(), density, out),
        Command::Optimize {
            config,
            density,
            starts,
            seed,
            out,
        } => cmd_optimize(config.as_deref(), density.as_deref(), *starts, *seed, out),
        Command::Certify { config, suite, seed, out } => cmd_certify(config.as_deref(), &suite.parse()?, *seed, out),
    }
}

pub fn load_config(path: Option<&Path>) -> Result<PlateConfig> {
    match path {
        Some(p) => PlateConfig::from_toml_file(p),
        None => Ok(PlateConfig::default()),
    }
}

/// The eigenfunction on a uniform 121 x 41 grid including the edges.
pub fn evaluation_field(u: &SpectralField, ell: f64) -> SampledField {
    SampledField::from_fn(linspace(0.0, PI, 121), linspace(-ell, ell, 41), |x, y| u.value_at(x, y))
}

#[derive(Debug, Serialize)]
struct EigenReport<'a> {
    density: &'a str,
    lambda1: f64,
    lambda2: Option<f64>,
    relative_gap: Option<f64>,
    residual: f64,
    gap_warning: bool,
}

/// Writes coefficients, nodal values and level lines of an eigenfunction; returns the paths.
fn write_eigenfunction(dir: &Path, disc: &Discretization, pair: &Eigenpair) -> Result<Vec<PathBuf>> {
    let coeffs = dir.join("coefficients.csv");
    io::write_coefficients_csv(&coeffs, &pair.u)?;
    let grid = dir.join("u_grid.csv");
    io::write_grid_csv(&grid, &disc.grid, &disc.to_grid(&pair.u), "u")?;
    let levels = dir.join("level_sets.csv");
    io::write_levels_csv(&levels, &level_sets(&evaluation_field(&pair.u, disc.cfg.ell()), LEVEL_COUNT))?;
    Ok(vec![coeffs, grid, levels])
}

pub fn cmd_solve(config: Option<&Path>, density: &str, out: &Path) -> Result<i32> {
    let t0 = Instant::now();
    let cfg = load_config(config)?;
    let disc = Discretization::new(&cfg);
    let p = match density {
        "uniform" => DensityField::uniform(&disc.grid, &disc.rule())?,
        path => io::read_density_csv(Path::new(path), &disc.grid, &disc.rule())?,
    };
    let pair = solve_density(&disc, &disc.stiffness()?, &p)?;
    info!("lambda1 = {}", pair.lambda1);
    io::ensure_dir(out)?;
    let mut outputs = write_eigenfunction(out, &disc, &pair)?;
    let report = out.join("eigen.json");
    io::write_json(
        &report,
        &EigenReport {
            density,
            lambda1: pair.lambda1,
            lambda2: pair.lambda2,
            relative_gap: pair.relative_gap(),
            residual: pair.residual,
            gap_warning: pair.gap_warning,
        },
    )?;
    outputs.push(report);
    println!("lambda1 = {}", pair.lambda1);
    finish_manifest(out, "solve", &cfg, outputs, t0, None)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
pub struct StartSummary {
    pub start: String,
    pub lambda1: f64,
    pub iterations: usize,
    pub status: ConvergenceStatus,
    pub mirror_escapes: usize,
    pub monotone: bool,
    /// Symmetry alternative of the final eigenfunction, or the error that prevented one.
    pub symmetry: String,
    pub midline_slope: String,
    pub density_mirror: MirrorMismatch,
    pub beta_region: Option<BetaRegion>,
    pub conjecture: ConjectureReport,
    pub gray_nodes: usize,
    pub s_measure: f64,
}

#[derive(Debug, Serialize)]
pub struct OptimizeSummary {
    pub starts: Vec<StartSummary>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub relative_spread: f64,
    pub agree: bool,
    pub densities_symmetric_within_cell: bool,
}

enum Start {
    Named(InitialWeight),
    File(PathBuf),
}

impl Start {
    fn name(&self) -> String {
        match self {
            Start::Named(w) => w.name(),
            Start::File(p) => format!("file-{}", p.file_stem().and_then(|s| s.to_str()).unwrap_or("density")),
        }
    }

    fn build(&self, disc: &Discretization) -> Result<DensityField> {
        match self {
            Start::Named(w) => w.build(&disc.grid, &disc.rule()),
            Start::File(p) => io::read_density_csv(p, &disc.grid, &disc.rule()),
        }
    }
}

fn parse_start(arg: &str) -> Start {
    match arg {
        "uniform" => Start::Named(InitialWeight::Uniform),
        "left-beta" => Start::Named(InitialWeight::LeftBeta),
        "right-beta" => Start::Named(InitialWeight::RightBeta),
        path => Start::File(PathBuf::from(path)),
    }
}

fn run_start(disc: &Discretization, start: &Start, dir: &Path) -> Result<(StartSummary, Vec<PathBuf>)> {
    let trace = minimize(disc, start.build(disc)?)?;
    let u = &trace.final_pair.u;
    let nodes = disc.to_grid(u);
    let p = trace.final_density();
    let symmetry = match symmetry_classify(&nodes, &disc.grid, SYMMETRY_TOL) {
        Ok(c) => c.to_string(),
        Err(e) => e.to_string(),
    };
    let midline_slope = match midline_slope_check(disc, u, SYMMETRY_TOL) {
        Ok(r) => format!("consistent, max |u_x(pi/2, y)| = {:e}", r.max_abs_slope),
        Err(e) => e.to_string(),
    };
    io::ensure_dir(dir)?;
    let trace_path = dir.join("trace.csv");
    io::write_trace_csv(&trace_path, &trace)?;
    let density_path = dir.join("final_density.csv");
    io::write_density_csv(&density_path, &disc.grid, p)?;
    let mut outputs = vec![trace_path, density_path];
    outputs.extend(write_eigenfunction(dir, disc, &trace.final_pair)?);
    let summary = StartSummary {
        start: start.name(),
        lambda1: trace.final_lambda(),
        iterations: trace.records.len() - 1,
        status: trace.status,
        mirror_escapes: trace.escapes,
        monotone: trace.is_monotone(),
        symmetry,
        midline_slope,
        density_mirror: mirror_mismatch(p, &disc.grid),
        beta_region: beta_region(p, &disc.grid),
        conjecture: conjecture_diagnostic(disc, u),
        gray_nodes: p.gray_nodes(&disc.grid, 1e-12).len(),
        s_measure: p.light_measure(&disc.grid),
    };
    Ok((summary, outputs))
}

pub fn cmd_optimize(config: Option<&Path>, density: Option<&str>, starts: usize, seed: u64, out: &Path) -> Result<i32> {
    let t0 = Instant::now();
    if starts == 0 {
        return Err(Error::InvalidArgument("--starts must be at least 1".into()));
    }
    let cfg = load_config(config)?;
    let disc = Discretization::new(&cfg);
    let mut list: Vec<Start> = density.map(parse_start).into_iter().collect();
    let rest = starts.saturating_sub(list.len());
    list.extend(InitialWeight::multistart(rest, seed).into_iter().map(Start::Named));
    io::ensure_dir(out)?;

    let results: Vec<Result<(StartSummary, Vec<PathBuf>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = list
            .iter()
            .enumerate()
            .map(|(s, start)| {
                let dir = out.join(format!("start_{s}_{}", start.name()));
                let disc = &disc;
                scope.spawn(move || run_start(disc, start, &dir))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("optimizer worker panicked")).collect()
    });
    let mut summaries = Vec::new();
    let mut outputs = Vec::new();
    for r in results {
        let (s, o) = r?;
        summaries.push(s);
        outputs.extend(o);
    }
    let lambdas: Vec<f64> = summaries.iter().map(|s| s.lambda1).collect();
    let lambda_min = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_max = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let relative_spread = (lambda_max - lambda_min) / lambda_min;
    let summary = OptimizeSummary {
        agree: relative_spread <= AGREEMENT_TOL,
        densities_symmetric_within_cell: summaries.iter().all(|s| s.density_mirror.symmetric_within_cell),
        starts: summaries,
        lambda_min,
        lambda_max,
        relative_spread,
    };
    for s in &summary.starts {
        println!("{:<14} lambda1 = {:.15} after {} iterations, {}", s.start, s.lambda1, s.iterations, s.symmetry);
    }
    println!(
        "relative spread {:e} ({}), densities symmetric within one cell: {}",
        relative_spread,
        if summary.agree { "agree" } else { "disagree" },
        summary.densities_symmetric_within_cell
    );
    let path = out.join("summary.json");
    io::write_json(&path, &summary)?;
    outputs.push(path);
    finish_manifest(out, "optimize", &cfg, outputs, t0, None)?;
    Ok(0)
}

pub fn cmd_certify(config: Option<&Path>, suite: &Suite, seed: u64, out: &Path) -> Result<i32> {
    let t0 = Instant::now();
    let cfg = load_config(config)?;
    let reports = run_suite(&cfg, *suite, seed)?;
    let dir = out.join("certifications");
    io::ensure_dir(&dir)?;
    let mut outputs = Vec::new();
    for r in &reports {
        let path = dir.join(format!("{}.json", r.claim_id));
        io::write_json(&path, r)?;
        outputs.push(path);
        println!("{} {:<34} min margin {:>12.4e} over {} probes", if r.pass { "PASS" } else { "FAIL" }, r.claim_id, r.min_margin, r.probe_count);
    }
    let bundle = out.join("certifications.json");
    io::write_json(&bundle, &reports)?;
    outputs.push(bundle);
    let summary = CertificationSummary::of(&reports);
    let code = if summary.failed.is_empty() { 0 } else { EXIT_CERTIFICATION };
    finish_manifest(out, "certify", &cfg, outputs, t0, Some(summary))?;
    Ok(code)
}

fn finish_manifest(
    out: &Path,
    command: &str,
    cfg: &PlateConfig,
    outputs: Vec<PathBuf>,
    t0: Instant,
    certs: Option<CertificationSummary>,
) -> Result<()> {
    let mut m = RunManifest::new(command, cfg.params());
    m.outputs = outputs
        .into_iter()
        .map(|p| p.strip_prefix(out).map(Path::to_path_buf).unwrap_or(p))
        .collect();
    m.wall_clock_seconds = t0.elapsed().as_secs_f64();
    m.certifications = certs;
    m.append(out)
}
