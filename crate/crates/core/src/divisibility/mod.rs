//! Existence and construction of intermediate maps, and detection of the
//! singular times where `Λ(t,0) = Λ(t,t_c)Λ(t_c,0)` has no solution.
//!
//! With column action `n ↦ D·n + f`, an intermediate map `(S, r)` must satisfy
//! `D(t) = S·D(t_c)` and `r = f(t) − S·f(t_c)`. A solution exists iff every
//! row of `D(t)` lies in the row space of `D(t_c)`, i.e. iff
//! `null(D(t_c)) ⊆ null(D(t))` for right null spaces, and it is unique iff
//! `D(t_c)` is invertible.

mod decompose;
mod rank;
mod scan;

pub use decompose::{
    classify_interval, decomposition_exists, solve_decomposition, Classification, ClassifyConfig,
    DecompositionResult, DecompositionStatus, RankEvidence, Verdict,
};
pub use rank::{null_space, numeric_rank, pseudo_inverse, singular_values};
pub use scan::{find_singular_points, scan_grid, GridNode, ScanConfig, SingularPoint};

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
