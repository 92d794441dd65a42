use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::divisibility::{Classification, DecompositionResult, DecompositionStatus, SingularPoint};
use crate::measures::MeasureResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON report of `scan` and `nonmarkov`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub t_max: f64,
    pub grid_points: usize,
    pub rank_tol: f64,
    pub seed: u64,
    pub singular_points: Vec<PointReport>,
    #[serde(rename = "N_M")]
    pub n_m: Option<f64>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub t_c: f64,
    pub sigma_min: f64,
    pub rank_deficit: usize,
    pub confirmed: bool,
    #[serde(rename = "S")]
    pub s: Option<f64>,
}

impl PointReport {
    pub fn new(p: &SingularPoint, s: Option<f64>) -> Self {
        Self { t_c: p.t_c, sigma_min: p.sigma_min, rank_deficit: p.rank_deficit, confirmed: p.confirmed, s }
    }
}

/// One row of the `--format csv` grid dump.
#[derive(Debug, Serialize)]
pub struct GridRow {
    pub t: f64,
    pub sigma_min: f64,
    pub det: f64,
    pub rank: usize,
}

#[derive(Debug, Serialize)]
pub struct MeasureReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub t_c: f64,
    pub t_max: f64,
    pub outer_grid: usize,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "argmax_T")]
    pub argmax_t: f64,
    pub argmax_n0: Vec<f64>,
    pub outer_evaluations: usize,
    pub inner_solver: &'static str,
    pub restart: &'static str,
    pub version: String,
}

impl MeasureReport {
    pub fn new(model: String, params: BTreeMap<String, f64>, r: &MeasureResult, t_max: f64, outer_grid: usize) -> Self {
        Self {
            model,
            params,
            t_c: r.t_c,
            t_max,
            outer_grid,
            s: r.value,
            argmax_t: r.argmax_t,
            argmax_n0: r.argmax_n0.components().iter().copied().collect(),
            outer_evaluations: r.outer_evaluations,
            inner_solver: r.inner_solver.as_str(),
            restart: RESTART_NOTE,
            version: VERSION.to_owned(),
        }
    }
}

/// How the restart trajectory is built; echoed in every measure report.
pub const RESTART_NOTE: &str = "environment reset at t_c: Lambda(T - t_c, 0) o Lambda(t_c, 0)";

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub t1: f64,
    pub t2: f64,
    pub rank_tol: f64,
    pub status: &'static str,
    pub unique: bool,
    pub residual: Option<f64>,
    pub rank_source: usize,
    pub rank_augmented: usize,
    #[serde(rename = "D")]
    pub linear: Option<Vec<Vec<f64>>>,
    pub f: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub choi_eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completely_positive: Option<bool>,
    pub version: String,
}

impl DecomposeReport {
    pub fn new(model: String, params: BTreeMap<String, f64>, t1: f64, t2: f64, rank_tol: f64, d: &DecompositionResult) -> Self {
        Self {
            model,
            params,
            t1,
            t2,
            rank_tol,
            status: match d.status {
                DecompositionStatus::Exists => "Exists",
                DecompositionStatus::NotExists => "NotExists",
            },
            unique: d.unique,
            residual: d.residual,
            rank_source: d.evidence.source,
            rank_augmented: d.evidence.augmented,
            linear: d.intermediate.as_ref().map(|m| rows(m.linear())),
            f: d.intermediate.as_ref().map(|m| m.translation().iter().copied().collect()),
            choi_eigenvalues: None,
            completely_positive: None,
            version: VERSION.to_owned(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub t1: f64,
    pub t2: f64,
    pub seed: u64,
    pub verdict: &'static str,
    pub rank_source: usize,
    pub rank_augmented: usize,
    pub choi_eigenvalues: Option<Vec<f64>>,
    pub min_output_eigenvalue: Option<f64>,
    pub version: String,
}

impl ClassifyReport {
    pub fn new(model: String, params: BTreeMap<String, f64>, t1: f64, t2: f64, seed: u64, c: &Classification) -> Self {
        Self {
            model,
            params,
            t1,
            t2,
            seed,
            verdict: c.verdict.as_str(),
            rank_source: c.decomposition.evidence.source,
            rank_augmented: c.decomposition.evidence.augmented,
            choi_eigenvalues: c.choi_eigenvalues.clone(),
            min_output_eigenvalue: c.positivity.as_ref().map(|p| p.min_output_eigenvalue),
            version: VERSION.to_owned(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports contain only plain data");
    s.push('\n');
    s
}
