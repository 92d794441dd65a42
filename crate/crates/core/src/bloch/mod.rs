//! Coherence-vector (generalized Bloch) representation of states and maps.
//!
//! States of a `d`-level system are written `ρ = (I + n·λ)/d` over a traceless
//! Hermitian basis with `Tr(λ_μ λ_ν) = d δ_μν`, so `n_μ = Tr(ρ λ_μ)`. A
//! trace-preserving linear map then acts as `n ↦ D·n + f` with
//! `D_μν = Tr(Λ(λ_ν) λ_μ)/d` and `f_μ = Tr(Λ(I) λ_μ)/d`. Vectors are columns
//! throughout.

mod affine;
mod basis;
mod choi;
mod haar;
mod state;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub use affine::{apply_map, AffineMap};
pub use basis::{make_basis, OperatorBasis};
pub use choi::{
    choi_from_affine, is_completely_positive, is_positive_map, positivity_check, ChoiMatrix,
    PositivityCheck, DEFAULT_CP_TOL,
};
pub use haar::{haar_average_projector, haar_identity, product_projector_average, swap_operator};
pub use state::{bloch_to_state, state_to_bloch, trace_distance, BlochVector, DensityMatrix};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues of a Hermitian matrix in ascending order.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest entrywise deviation from Hermiticity.
pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
