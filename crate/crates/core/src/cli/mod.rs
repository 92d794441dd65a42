//! Command-line front end for the `dmsing` binary.
//!
//! Exit codes: 0 on success (including "no decomposition" and "not CP"
//! verdicts), 1 for usage, parameter and file errors, 2 for numerical
//! failures or failing `reproduce` rows.

mod model;
mod report;
mod reproduce;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use model::{build_family, parse_param};
pub use report::{ClassifyReport, DecomposeReport, GridRow, MeasureReport, PointReport, ScanReport, VERSION};
pub use reproduce::{reproduce_case, Case, Row};

use crate::bloch::{choi_from_affine, is_completely_positive, DEFAULT_CP_TOL};
use crate::divisibility::{
    classify_interval, find_singular_points, scan_grid, solve_decomposition, ClassifyConfig, ScanConfig,
    DEFAULT_RANK_TOL,
};
use crate::measures::{non_markovianity, singularity_measure, MeasureConfig, NonMarkovConfig};
use crate::models::MapFamily;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "dmsing", version, about = "Singular points and non-Markovianity of qubit dynamical maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate singular points of D(t) on [0, t_max].
    Scan(ScanArgs),
    /// Singularity measure S at one singular time.
    Measure(MeasureArgs),
    /// Solve Λ(t2,0) = Λ(t2,t1)Λ(t1,0) for the intermediate map.
    Decompose(DecomposeArgs),
    /// Sum of S over all confirmed singular points up to a horizon.
    Nonmarkov(NonmarkovArgs),
    /// Divisibility verdict for an interval.
    Classify(ClassifyArgs),
    /// Rerun the canonical examples against their closed forms.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// dephasing | jc | semigroup | file:PATH | kraus:PATH
    #[arg(long)]
    pub model: String,
    /// Model parameter, repeatable (dephasing: A, N; jc: gamma0, lambda; semigroup: gamma).
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Scan window end; defaults to the end of a tabulated family.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json: singular-point report; csv: per-node `t,sigma_min,det,rank`.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub tc: f64,
    /// Window end; defaults to t_c plus two revival periods when the model has one.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub outer_grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub t1: f64,
    #[arg(long)]
    pub t2: f64,
    /// Also report the Choi spectrum of the intermediate map (qubits only).
    #[arg(long)]
    pub check_cp: bool,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NonmarkovArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub horizon: f64,
    #[arg(long, default_value_t = 2000)]
    pub grid_points: usize,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    #[arg(long, default_value_t = 400)]
    pub outer_grid: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub t1: f64,
    #[arg(long)]
    pub t2: f64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
    /// Seed of the sampled positivity check.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub case: Case,
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}

/// Parse `args` (including the program name) and run the command, returning
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8> {
    match command {
        Command::Scan(a) => cmd_scan(a, stdout).map(|_| 0),
        Command::Measure(a) => cmd_measure(a, stdout, stderr).map(|_| 0),
        Command::Decompose(a) => cmd_decompose(a, stdout).map(|_| 0),
        Command::Nonmarkov(a) => cmd_nonmarkov(a, stdout, stderr).map(|_| 0),
        Command::Classify(a) => cmd_classify(a, stdout).map(|_| 0),
        Command::Reproduce(a) => reproduce::cmd_reproduce(a.case, stdout),
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io { path: path.clone(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn family_of(m: &ModelArgs) -> Result<MapFamily> {
    build_family(&m.model, &m.params)
}

fn scan_window(family: &MapFamily, t_max: Option<f64>) -> Result<f64> {
    match t_max {
        Some(t) => Ok(t),
        None if family.horizon().is_finite() => Ok(family.horizon()),
        None => Err(Error::Config(format!("--t-max is required for model {}", family.name()))),
    }
}

fn check_window(family: &MapFamily, t_max: f64) -> Result<()> {
    if t_max > family.horizon() {
        return Err(Error::Domain { t: t_max, lo: 0.0, hi: family.horizon() });
    }
    Ok(())
}

pub fn cmd_scan(a: ScanArgs, stdout: &mut dyn Write) -> Result<()> {
    let family = family_of(&a.model)?;
    let t_max = scan_window(&family, a.t_max)?;
    check_window(&family, t_max)?;
    let cfg = ScanConfig { grid_points: a.grid_points, rank_tol: a.rank_tol, ..ScanConfig::new(t_max) };
    let text = match a.format {
        Format::Json => {
            let points = find_singular_points(&family, &cfg)?;
            to_scan_report(&family, &cfg, a.seed, points.iter().map(|p| PointReport::new(p, None)).collect(), None)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for node in scan_grid(&family, &cfg)? {
                w.serialize(GridRow { t: node.t, sigma_min: node.sigma_min, det: node.det, rank: node.rank })
                    .map_err(|e| Error::Numerical(format!("csv: {e}")))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
            String::from_utf8(bytes).expect("csv of numbers is ASCII")
        }
    };
    emit(&a.out, &text, stdout)
}

fn to_scan_report(
    family: &MapFamily,
    cfg: &ScanConfig,
    seed: u64,
    singular_points: Vec<PointReport>,
    n_m: Option<f64>,
) -> String {
    report::to_json(&ScanReport {
        model: family.name().to_owned(),
        params: family.params().clone(),
        t_max: cfg.t_max,
        grid_points: cfg.grid_points,
        rank_tol: cfg.rank_tol,
        seed,
        singular_points,
        n_m,
        version: VERSION.to_owned(),
    })
}

pub fn cmd_measure(a: MeasureArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let family = family_of(&a.model)?;
    let mut cfg = match a.t_max {
        Some(t) => MeasureConfig::new(t),
        None => MeasureConfig::with_default_window(&family, a.tc)?,
    };
    cfg.outer_grid = a.outer_grid;
    let _ = writeln!(stderr, "restart trajectory: {}", report::RESTART_NOTE);
    let r = singularity_measure(&family, a.tc, &cfg)?;
    let rep = MeasureReport::new(family.name().to_owned(), family.params().clone(), &r, cfg.t_max, cfg.outer_grid);
    emit(&a.out, &report::to_json(&rep), stdout)
}

fn check_interval(t1: f64, t2: f64) -> Result<()> {
    if !(t1 >= 0.0 && t2 > t1 && t2.is_finite()) {
        return Err(Error::Config(format!("need 0 <= t1 < t2, got t1 = {t1}, t2 = {t2}")));
    }
    Ok(())
}

pub fn cmd_decompose(a: DecomposeArgs, stdout: &mut dyn Write) -> Result<()> {
    let family = family_of(&a.model)?;
    check_interval(a.t1, a.t2)?;
    if a.check_cp && family.dim() != 2 {
        return Err(Error::Config(format!("--check-cp needs a qubit family, got d = {}", family.dim())));
    }
    let d = solve_decomposition(&family.evaluate(a.t1)?, &family.evaluate(a.t2)?, a.rank_tol)?;
    let mut rep = DecomposeReport::new(family.name().to_owned(), family.params().clone(), a.t1, a.t2, a.rank_tol, &d);
    if a.check_cp {
        if let Some(m) = &d.intermediate {
            let choi = choi_from_affine(m.linear(), m.translation())?;
            rep.choi_eigenvalues = Some(choi.eigenvalues());
            rep.completely_positive = Some(is_completely_positive(&choi, DEFAULT_CP_TOL));
        }
    }
    emit(&a.out, &report::to_json(&rep), stdout)
}

pub fn cmd_nonmarkov(a: NonmarkovArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let family = family_of(&a.model)?;
    check_window(&family, a.horizon)?;
    let mut cfg = NonMarkovConfig::new(a.horizon);
    cfg.scan.grid_points = a.grid_points;
    cfg.scan.rank_tol = a.rank_tol;
    cfg.outer_grid = a.outer_grid;
    let _ = writeln!(stderr, "restart trajectory: {}", report::RESTART_NOTE);
    let nm = non_markovianity(&family, &cfg)?;
    let points = nm
        .points
        .iter()
        .map(|p| {
            let s = nm.measures.iter().find(|m| m.t_c == p.t_c).map(|m| m.value);
            PointReport::new(p, s)
        })
        .collect();
    emit(&a.out, &to_scan_report(&family, &cfg.scan, a.seed, points, Some(nm.total)), stdout)
}

pub fn cmd_classify(a: ClassifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let family = family_of(&a.model)?;
    check_interval(a.t1, a.t2)?;
    let cfg = ClassifyConfig { rank_tol: a.rank_tol, seed: a.seed, ..ClassifyConfig::default() };
    let c = classify_interval(&family, a.t1, a.t2, &cfg)?;
    let rep = ClassifyReport::new(family.name().to_owned(), family.params().clone(), a.t1, a.t2, a.seed, &c);
    emit(&a.out, &report::to_json(&rep), stdout)
}
