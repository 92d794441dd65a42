use std::cell::RefCell;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::decompose::evidence_at;
use super::rank::{count_above, singular_values};
use crate::models::MapFamily;
use crate::search::golden_minimize;
use crate::{Error, Result};

const MAX_REFINE_ITERATIONS: usize = 500;

/// Settings for [`find_singular_points`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub t_max: f64,
    pub grid_points: usize,
    /// Relative singular-value threshold for rank decisions.
    pub rank_tol: f64,
    /// Golden-section bracket width at which refinement stops.
    pub time_tol: f64,
    /// Grid nodes after `t_c` tried as confirmation probes (plus `t_max`).
    pub probes: usize,
}

impl ScanConfig {
    pub fn new(t_max: f64) -> Self {
        Self { t_max, grid_points: 2000, rank_tol: super::DEFAULT_RANK_TOL, time_tol: 1e-10, probes: 8 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.grid_points < 100 {
            return Err(Error::Config(format!("grid_points must be at least 100, got {}", self.grid_points)));
        }
        if !(self.rank_tol > 0.0 && self.time_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// A detected singular time.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularPoint {
    pub t_c: f64,
    /// `σ_min(D(t_c))` after refinement.
    pub sigma_min: f64,
    /// `n − rank D(t_c)`.
    pub rank_deficit: usize,
    /// Some probe `t > t_c` raised the augmented rank, so no intermediate map exists.
    pub confirmed: bool,
    /// The probe time that confirmed the point.
    pub confirmed_by: Option<f64>,
    pub refine_iterations: usize,
}

/// Diagnostics at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub t: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub det: f64,
    /// Rank at the scan threshold.
    pub rank: usize,
}

struct Grid {
    nodes: Vec<GridNode>,
    /// Reference size for rank decisions: the largest `σ_max` on the grid,
    /// including `D(0)`.
    scale: f64,
    /// `σ_min(D(0))`, left neighbour of the first node.
    sigma_at_zero: f64,
}

fn sigma_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = singular_values(m);
    (sv[sv.len() - 1], sv[0])
}

fn evaluate_grid(family: &MapFamily, cfg: &ScanConfig) -> Result<Grid> {
    cfg.validate()?;
    let n = cfg.grid_points;
    let raw: Vec<(f64, f64, f64, f64, DMatrix<f64>)> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let t = if i == n { cfg.t_max } else { cfg.t_max * i as f64 / n as f64 };
            let m = family.evaluate(t)?;
            let (lo, hi) = sigma_extremes(m.linear());
            let det = m.linear().determinant();
            Ok((t, lo, hi, det, m.linear().clone()))
        })
        .collect::<Result<_>>()?;
    let start = family.evaluate(0.0)?;
    let (sigma_at_zero, top0) = sigma_extremes(start.linear());
    let scale = raw.iter().map(|r| r.2).fold(top0, f64::max);
    let threshold = cfg.rank_tol * scale;
    let nodes = raw
        .into_iter()
        .map(|(t, sigma_min, sigma_max, det, m)| GridNode {
            t,
            sigma_min,
            sigma_max,
            det,
            rank: count_above(&singular_values(&m), threshold),
        })
        .collect();
    Ok(Grid { nodes, scale, sigma_at_zero })
}

/// Evaluate `σ_min`, `σ_max`, `det` and rank of `D(t)` on the uniform grid
/// `t_i = t_max·i/N`, `i = 1..=N`.
pub fn scan_grid(family: &MapFamily, cfg: &ScanConfig) -> Result<Vec<GridNode>> {
    Ok(evaluate_grid(family, cfg)?.nodes)
}

/// Locate the times in `(0, t_max]` where `D(t)` loses rank.
///
/// Every interior local minimum of `σ_min(D(t))` on the grid (three-point
/// stencil, so zeros of even order are found too) is refined by golden-section
/// search over its two neighbouring cells and kept when the refined
/// `σ_min ≤ rank_tol · scale`, where `scale` is the largest `σ_max` seen on the
/// grid. A kept point is confirmed when `D(t_c)` augmented with `D(t_p)`
/// gains rank at one of the following grid nodes or at `t_max`; unconfirmed
/// points are still reported. Output is sorted by time.
pub fn find_singular_points(family: &MapFamily, cfg: &ScanConfig) -> Result<Vec<SingularPoint>> {
    let grid = evaluate_grid(family, cfg)?;
    let nodes = &grid.nodes;
    let threshold = cfg.rank_tol * grid.scale;
    let dim = family.evaluate(0.0)?.vector_len();

    let mut candidates = Vec::new();
    for i in 0..nodes.len().saturating_sub(1) {
        let left = if i == 0 { grid.sigma_at_zero } else { nodes[i - 1].sigma_min };
        let here = nodes[i].sigma_min;
        if here < left && here <= nodes[i + 1].sigma_min {
            candidates.push(i);
        }
    }

    let refined: Vec<Option<SingularPoint>> = candidates
        .par_iter()
        .map(|&i| {
            let lo = if i == 0 { 0.0 } else { nodes[i - 1].t };
            let hi = nodes[i + 1].t;
            let failure: RefCell<Option<Error>> = RefCell::new(None);
            let sigma = |t: f64| match family.evaluate(t) {
                Ok(m) => sigma_extremes(m.linear()).0,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::INFINITY
                }
            };
            let mut best = golden_minimize(sigma, lo, hi, cfg.time_tol, MAX_REFINE_ITERATIONS);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            if nodes[i].sigma_min < best.value {
                best.x = nodes[i].t;
                best.value = nodes[i].sigma_min;
            }
            if best.value > threshold {
                return Ok(None);
            }
            let dc = family.evaluate(best.x)?.linear().clone();
            let rank = count_above(&singular_values(&dc), threshold);

            let mut probe_times: Vec<f64> =
                nodes.iter().map(|n| n.t).filter(|&t| t > best.x).take(cfg.probes).collect();
            if cfg.t_max > best.x && probe_times.last() != Some(&cfg.t_max) {
                probe_times.push(cfg.t_max);
            }
            let mut confirmed_by = None;
            for tp in probe_times {
                let dp = family.evaluate(tp)?;
                let ev = evidence_at(&dc, dp.linear(), threshold);
                if ev.augmented > ev.source {
                    confirmed_by = Some(tp);
                    break;
                }
            }
            Ok(Some(SingularPoint {
                t_c: best.x,
                sigma_min: best.value,
                rank_deficit: dim - rank,
                confirmed: confirmed_by.is_some(),
                confirmed_by,
                refine_iterations: best.iterations,
            }))
        })
        .collect::<Result<_>>()?;

    let mut points: Vec<SingularPoint> = refined.into_iter().flatten().collect();
    points.sort_by(|a, b| a.t_c.total_cmp(&b.t_c));
    let merge_radius = 10.0 * cfg.time_tol;
    let mut merged: Vec<SingularPoint> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last_mut() {
            Some(last) if p.t_c - last.t_c < merge_radius => {
                if p.sigma_min < last.sigma_min {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    Ok(merged)
}
