use nalgebra::{DMatrix, DVector};

use super::rank::{count_above, pseudo_inverse, singular_values};
use crate::bloch::{choi_from_affine, is_completely_positive, positivity_check, AffineMap, PositivityCheck};
use crate::models::MapFamily;
use crate::{Error, Result};

/// Ranks behind an existence verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankEvidence {
    /// `rank D(t_c)`.
    pub source: usize,
    /// Rank of `D(t_c)` augmented with `D(t)`.
    pub augmented: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionStatus {
    Exists,
    NotExists,
}

/// Outcome of solving `Λ(t,0) = Λ(t,t_c)Λ(t_c,0)` for the intermediate map.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub status: DecompositionStatus,
    /// `(S, r)` when a decomposition exists; the minimal-Frobenius-norm `S`
    /// when it is not unique.
    pub intermediate: Option<AffineMap>,
    pub unique: bool,
    /// `‖S·D(t_c) − D(t)‖_F`, when `S` exists.
    pub residual: Option<f64>,
    pub evidence: RankEvidence,
}

impl DecompositionResult {
    pub fn exists(&self) -> bool {
        self.status == DecompositionStatus::Exists
    }
}

fn check_pair(dc: &DMatrix<f64>, dt: &DMatrix<f64>) -> Result<()> {
    if !dc.is_square() || dc.shape() != dt.shape() {
        return Err(Error::Shape(format!(
            "need two square matrices of equal size, got {}x{} and {}x{}",
            dc.nrows(),
            dc.ncols(),
            dt.nrows(),
            dt.ncols()
        )));
    }
    Ok(())
}

/// Existence test at an absolute singular-value threshold.
///
/// `D(t) = S·D(t_c)` is solvable iff stacking the rows of `D(t)` under those
/// of `D(t_c)` does not raise the rank; equivalently
/// `rank [D(t_c)ᵀ | D(t)ᵀ] = rank D(t_c)ᵀ`.
pub(crate) fn evidence_at(dc: &DMatrix<f64>, dt: &DMatrix<f64>, threshold: f64) -> RankEvidence {
    let mut augmented = DMatrix::zeros(dc.ncols(), dc.nrows() + dt.nrows());
    augmented.columns_mut(0, dc.nrows()).copy_from(&dc.transpose());
    augmented.columns_mut(dc.nrows(), dt.nrows()).copy_from(&dt.transpose());
    RankEvidence {
        source: count_above(&singular_values(dc), threshold),
        augmented: count_above(&singular_values(&augmented), threshold),
    }
}

fn pair_threshold(dc: &DMatrix<f64>, dt: &DMatrix<f64>, rel_tol: f64) -> f64 {
    let top = |m: &DMatrix<f64>| singular_values(m).iter().next().copied().unwrap_or(0.0);
    rel_tol * top(dc).max(top(dt))
}

/// Whether some `S` satisfies `D(t) = S·D(t_c)`.
///
/// Both ranks are counted against `rel_tol · max(σ_max(D(t_c)), σ_max(D(t)))`
/// so a `D(t_c)` that is small compared with `D(t)` reads as rank deficient.
pub fn decomposition_exists(dc: &DMatrix<f64>, dt: &DMatrix<f64>, rel_tol: f64) -> Result<(bool, RankEvidence)> {
    check_pair(dc, dt)?;
    let ev = evidence_at(dc, dt, pair_threshold(dc, dt, rel_tol));
    Ok((ev.augmented <= ev.source, ev))
}

/// Solve for the intermediate map `Λ(t,t_c)` in affine form.
///
/// `S = D(t)·D(t_c)⁺` (exact inverse when `D(t_c)` has full rank) and
/// `r = f(t) − S·f(t_c)`. Non-existence is a status, not an error.
pub fn solve_decomposition(map_c: &AffineMap, map_t: &AffineMap, rel_tol: f64) -> Result<DecompositionResult> {
    if map_c.dim() != map_t.dim() {
        return Err(Error::DimensionMismatch { expected: map_c.dim(), found: map_t.dim() });
    }
    let (dc, dt) = (map_c.linear(), map_t.linear());
    let threshold = pair_threshold(dc, dt, rel_tol);
    let evidence = evidence_at(dc, dt, threshold);
    let n = dc.nrows();
    if evidence.augmented > evidence.source {
        return Ok(DecompositionResult {
            status: DecompositionStatus::NotExists,
            intermediate: None,
            unique: false,
            residual: None,
            evidence,
        });
    }
    let unique = evidence.source == n;
    let s = if unique {
        // S·Dc = Dt  ⇔  Dcᵀ·Sᵀ = Dtᵀ
        dc.transpose()
            .lu()
            .solve(&dt.transpose())
            .map(|st| st.transpose())
            .unwrap_or_else(|| dt * pseudo_inverse(dc, threshold))
    } else {
        dt * pseudo_inverse(dc, threshold)
    };
    let r: DVector<f64> = map_t.translation() - &s * map_c.translation();
    let residual = (&s * dc - dt).norm();
    Ok(DecompositionResult {
        status: DecompositionStatus::Exists,
        intermediate: Some(AffineMap::new(map_c.dim(), s, r)?),
        unique,
        residual: Some(residual),
        evidence,
    })
}

/// Divisibility verdict for one interval `(t1, t2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CpDivisible,
    PositiveOnly,
    NotPositive,
    NoDecomposition,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CpDivisible => "CP-divisible",
            Verdict::PositiveOnly => "positive-only",
            Verdict::NotPositive => "not-positive",
            Verdict::NoDecomposition => "no-decomposition",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub rank_tol: f64,
    pub cp_tol: f64,
    pub positivity_samples: usize,
    pub positivity_tol: f64,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            rank_tol: super::DEFAULT_RANK_TOL,
            cp_tol: crate::bloch::DEFAULT_CP_TOL,
            positivity_samples: 2000,
            positivity_tol: 1e-10,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub decomposition: DecompositionResult,
    /// Choi spectrum of the intermediate map (ascending), when it exists.
    pub choi_eigenvalues: Option<Vec<f64>>,
    pub positivity: Option<PositivityCheck>,
}

/// Classify the intermediate map `Λ(t2,t1)` of a qubit family.
pub fn classify_interval(family: &MapFamily, t1: f64, t2: f64, cfg: &ClassifyConfig) -> Result<Classification> {
    if family.dim() != 2 {
        return Err(Error::Config(format!(
            "positivity classification is implemented for qubits only (d = {})",
            family.dim()
        )));
    }
    if !(t1 >= 0.0 && t1 < t2) {
        return Err(Error::Config(format!("need 0 <= t1 < t2, got t1 = {t1}, t2 = {t2}")));
    }
    let decomposition = solve_decomposition(&family.evaluate(t1)?, &family.evaluate(t2)?, cfg.rank_tol)?;
    let Some(map) = decomposition.intermediate.as_ref() else {
        return Ok(Classification {
            verdict: Verdict::NoDecomposition,
            decomposition,
            choi_eigenvalues: None,
            positivity: None,
        });
    };
    let choi = choi_from_affine(map.linear(), map.translation())?;
    let choi_eigenvalues = choi.eigenvalues();
    let positivity = positivity_check(
        map.linear(),
        map.translation(),
        cfg.positivity_samples,
        cfg.positivity_tol,
        cfg.seed,
    )?;
    let verdict = if is_completely_positive(&choi, cfg.cp_tol) {
        Verdict::CpDivisible
    } else if positivity.positive {
        Verdict::PositiveOnly
    } else {
        Verdict::NotPositive
    };
    Ok(Classification { verdict, decomposition, choi_eigenvalues: Some(choi_eigenvalues), positivity: Some(positivity) })
}
