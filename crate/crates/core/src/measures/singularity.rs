use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::ball::{max_norm_affine_over_ball, BallMax, InnerSolver};
use crate::bloch::{AffineMap, BlochVector};
use crate::divisibility::{find_singular_points, ScanConfig, SingularPoint};
use crate::models::MapFamily;
use crate::search::golden_maximize;
use crate::{Error, Result};

const MAX_REFINE_ITERATIONS: usize = 500;

/// Settings for [`singularity_measure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    /// End of the window `[t_c, t_max]` searched for the worst `T`.
    pub t_max: f64,
    pub outer_grid: usize,
    /// Golden-section bracket width for the outer refinement.
    pub refine_tol: f64,
    pub ball_solver_tol: f64,
}

impl MeasureConfig {
    pub fn new(t_max: f64) -> Self {
        Self { t_max, outer_grid: 400, refine_tol: 1e-8, ball_solver_tol: 1e-10 }
    }

    /// Window of two revival periods past `t_c`, for families that have a
    /// natural period.
    pub fn with_default_window(family: &MapFamily, t_c: f64) -> Result<Self> {
        let period = family.period().ok_or_else(|| {
            Error::Config(format!("family {} has no natural period; pass t_max explicitly", family.name()))
        })?;
        Ok(Self::new(t_c + 2.0 * period))
    }

    fn validate(&self) -> Result<()> {
        if self.outer_grid < 3 {
            return Err(Error::Config(format!("outer grid needs at least 3 points, got {}", self.outer_grid)));
        }
        if !(self.refine_tol > 0.0 && self.ball_solver_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Value of the singularity measure at one singular time.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub t_c: f64,
    /// `S(t_c)`, a trace distance in `[0, 1]`.
    pub value: f64,
    pub argmax_t: f64,
    /// A worst-case initial Bloch vector.
    pub argmax_n0: BlochVector,
    pub outer_evaluations: usize,
    /// [`InnerSolver::SampledFallback`] if any inner evaluation needed it.
    pub inner_solver: InnerSolver,
}

/// The restarted evolution `Λ(T − t_c, 0) ∘ Λ(t_c, 0)`.
pub fn restart_trajectory(family: &MapFamily, t_c: f64, t: f64) -> Result<AffineMap> {
    check_times(family, t_c, t)?;
    family.evaluate(t - t_c)?.after(&family.evaluate(t_c)?)
}

/// `(M, b)` with `n(T) − n_rc(T) = M·n₀ + b`.
pub fn deviation_affine(family: &MapFamily, t_c: f64, t: f64) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let original = family.evaluate(t)?;
    let restarted = restart_trajectory(family, t_c, t)?;
    Ok((
        original.linear() - restarted.linear(),
        original.translation() - restarted.translation(),
    ))
}

fn check_times(family: &MapFamily, t_c: f64, t: f64) -> Result<()> {
    if !(t_c > 0.0 && t_c.is_finite()) {
        return Err(Error::Config(format!("singular time must be positive, got {t_c}")));
    }
    if !(t >= t_c && t <= family.horizon()) {
        return Err(Error::Domain { t, lo: t_c, hi: family.horizon() });
    }
    Ok(())
}

fn half_ball_max(family: &MapFamily, t_c: f64, t: f64) -> Result<BallMax> {
    let (m, b) = deviation_affine(family, t_c, t)?;
    let mut r = max_norm_affine_over_ball(&m, &b)?;
    r.value *= 0.5;
    Ok(r)
}

/// `S(t_c) = max_T max_{n₀} ½‖n(T) − n_rc(T)‖` over `T ∈ [t_c, t_max]`.
///
/// Qubit families only. The outer maximum comes from an evenly spaced grid
/// refined by golden-section search around the best node; on ties the
/// smallest `T` wins.
pub fn singularity_measure(family: &MapFamily, t_c: f64, cfg: &MeasureConfig) -> Result<MeasureResult> {
    if family.dim() != 2 {
        return Err(Error::Config(format!(
            "the singularity measure is defined for qubits, family {} has d = {}",
            family.name(),
            family.dim()
        )));
    }
    cfg.validate()?;
    if cfg.t_max.is_nan() || cfg.t_max <= t_c {
        return Err(Error::Config(format!("t_max = {} must exceed t_c = {t_c}", cfg.t_max)));
    }
    check_times(family, t_c, cfg.t_max)?;

    let k = cfg.outer_grid;
    let grid: Vec<f64> = (0..k)
        .map(|j| if j == k - 1 { cfg.t_max } else { t_c + (cfg.t_max - t_c) * j as f64 / (k - 1) as f64 })
        .collect();
    let nodes = grid.par_iter().map(|&t| half_ball_max(family, t_c, t)).collect::<Result<Vec<_>>>()?;

    let mut fallback = nodes.iter().any(|r| r.solver == InnerSolver::SampledFallback);
    let mut best = 0;
    for (j, r) in nodes.iter().enumerate() {
        if r.value > nodes[best].value + 1e-12 * nodes[best].value.max(1.0) {
            best = j;
        }
    }
    let mut best_t = grid[best];
    let mut best_max = nodes[best].clone();
    let mut evaluations = k;

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(k - 1)];
    let failure = RefCell::new(None);
    let refined = golden_maximize(
        |t| match half_ball_max(family, t_c, t) {
            Ok(r) => r.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        cfg.refine_tol,
        MAX_REFINE_ITERATIONS,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    evaluations += refined.iterations + 2;
    if refined.value > best_max.value {
        let r = half_ball_max(family, t_c, refined.x)?;
        evaluations += 1;
        fallback |= r.solver == InnerSolver::SampledFallback;
        best_t = refined.x;
        best_max = r;
    }

    let mut n0 = best_max.argmax;
    let norm = n0.norm();
    if norm > 1.0 {
        n0 /= norm;
    }
    Ok(MeasureResult {
        t_c,
        value: best_max.value,
        argmax_t: best_t,
        argmax_n0: BlochVector::new(2, n0)?,
        outer_evaluations: evaluations,
        inner_solver: if fallback { InnerSolver::SampledFallback } else { InnerSolver::Secular },
    })
}

/// Settings for [`non_markovianity`]; the scan horizon doubles as the
/// measure window end for every point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonMarkovConfig {
    pub scan: ScanConfig,
    pub outer_grid: usize,
    pub refine_tol: f64,
    pub ball_solver_tol: f64,
}

impl NonMarkovConfig {
    pub fn new(horizon: f64) -> Self {
        let m = MeasureConfig::new(horizon);
        Self { scan: ScanConfig::new(horizon), outer_grid: m.outer_grid, refine_tol: m.refine_tol, ball_solver_tol: m.ball_solver_tol }
    }

    fn measure(&self) -> MeasureConfig {
        MeasureConfig {
            t_max: self.scan.t_max,
            outer_grid: self.outer_grid,
            refine_tol: self.refine_tol,
            ball_solver_tol: self.ball_solver_tol,
        }
    }
}

/// Sum of `S(t_c)` over confirmed singular points, with the breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovianity {
    pub total: f64,
    /// Every detected point, confirmed or not.
    pub points: Vec<SingularPoint>,
    /// Measures of the confirmed points, in time order.
    pub measures: Vec<MeasureResult>,
}

/// `N_M = Σ S(t_c)` over confirmed singular points in `(0, horizon)`.
pub fn non_markovianity(family: &MapFamily, cfg: &NonMarkovConfig) -> Result<NonMarkovianity> {
    let points = find_singular_points(family, &cfg.scan)?;
    let window = cfg.measure();
    let mut measures = Vec::new();
    for p in points.iter().filter(|p| p.confirmed) {
        // nothing left to measure when the point sits on the horizon
        if p.t_c >= window.t_max - 10.0 * cfg.scan.time_tol {
            continue;
        }
        measures.push(singularity_measure(family, p.t_c, &window)?);
    }
    let total = measures.iter().fold(0.0, |acc, m| acc + m.value);
    Ok(NonMarkovianity { total, points, measures })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::models::{dephasing_family, jc_family, semigroup_dephasing_family, DephasingParams, JcParams};

    fn jc() -> MapFamily {
        jc_family(JcParams::new(5.0, 1.0).unwrap())
    }

    #[test]
    fn restart_at_origin_point_is_zero() {
        let fam = jc();
        let t_c = JcParams::new(5.0, 1.0).unwrap().singular_time(0).unwrap();
        let (m, b) = deviation_affine(&fam, t_c, t_c).unwrap();
        assert!(m.abs().max() < 1e-14 && b.abs().max() < 1e-14);
    }

    #[test]
    fn semigroup_restart_is_exact() {
        let fam = semigroup_dephasing_family(0.7).unwrap();
        let r = singularity_measure(&fam, 0.5, &MeasureConfig::new(3.0)).unwrap();
        assert!(r.value < 1e-12);
    }

    #[test]
    fn dephasing_half() {
        let p = DephasingParams::new(1.0, 1).unwrap();
        let fam = dephasing_family(p);
        let t_c = p.singular_time(0);
        let r = singularity_measure(&fam, t_c, &MeasureConfig::with_default_window(&fam, t_c).unwrap()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9, "{}", r.value);
        assert!(r.argmax_n0.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn jc_first_points() {
        let p = JcParams::new(5.0, 1.0).unwrap();
        let fam = jc();
        for n in 0..2 {
            // D₃₃ at the revival time T = 2(n+1)π/d₀ with d₀ = 3
            let revival = 2.0 * (n + 1) as f64 * PI / 3.0;
            let d33 = (-revival).exp();
            let expected = 0.5 * (d33 / (1.0 - d33)).sqrt();
            let t_c = p.singular_time(n).unwrap();
            let r = singularity_measure(&fam, t_c, &MeasureConfig::with_default_window(&fam, t_c).unwrap()).unwrap();
            assert!((r.value - expected).abs() < 1e-9, "n={n}: {} vs {expected}", r.value);
            assert!((r.argmax_t - revival).abs() < 1e-3);
        }
    }

    #[test]
    fn jc_saturated_branch() {
        let p = JcParams::new(50.0, 1.0).unwrap();
        let fam = jc_family(p);
        let t_c = p.singular_time(0).unwrap();
        let r = singularity_measure(&fam, t_c, &MeasureConfig::with_default_window(&fam, t_c).unwrap()).unwrap();
        let d0 = 99f64.sqrt();
        assert!((r.value - (-2.0 * PI / d0).exp()).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn qutrit_rejected_and_window_checked() {
        let fam = jc();
        assert!(singularity_measure(&fam, 2.0, &MeasureConfig::new(1.0)).is_err());
        assert!(singularity_measure(&fam, 0.0, &MeasureConfig::new(1.0)).is_err());
        let mut cfg = MeasureConfig::new(10.0);
        cfg.outer_grid = 2;
        assert!(singularity_measure(&fam, 1.0, &cfg).is_err());
    }

    #[test]
    fn nonmarkov_sums_confirmed_points() {
        let fam = dephasing_family(DephasingParams::new(1.0, 1).unwrap());
        let nm = non_markovianity(&fam, &NonMarkovConfig::new(2.0 * PI)).unwrap();
        assert_eq!(nm.measures.len(), nm.points.iter().filter(|p| p.confirmed).count());
        assert!((nm.total - nm.measures.iter().map(|m| m.value).sum::<f64>()).abs() < 1e-15);
    }
}
