use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{hermitian_eigenvalues, kron, CMatrix, OperatorBasis};
use crate::search::{fibonacci_sphere, polish_on_sphere};
use crate::{Error, Result};

/// Absolute eigenvalue tolerance for complete positivity.
pub const DEFAULT_CP_TOL: f64 = 1e-10;

const RANDOM_RESTARTS: usize = 8;
const POLISH_ITERATIONS: usize = 200;

/// `(Λ ⊗ I)(|Φ⟩⟨Φ|)` for the unnormalized `|Φ⟩ = Σ_i |i,i⟩`; trace `d` when
/// `Λ` is trace preserving.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

fn check_qubit_shapes(linear: &DMatrix<f64>, translation: &DVector<f64>) -> Result<()> {
    if linear.shape() != (3, 3) || translation.len() != 3 {
        return Err(Error::Shape(format!(
            "qubit map needs a 3x3 matrix and a 3-vector, got {}x{} and {}",
            linear.nrows(),
            linear.ncols(),
            translation.len()
        )));
    }
    Ok(())
}

/// Choi matrix of the qubit map `n ↦ V·n + s`:
/// `½ (I⊗I + Σ s_μ σ_μ⊗I + Σ V_μν σ_μ⊗σ_νᵀ)`.
pub fn choi_from_affine(linear: &DMatrix<f64>, translation: &DVector<f64>) -> Result<ChoiMatrix> {
    check_qubit_shapes(linear, translation)?;
    let basis = OperatorBasis::qubit();
    let id = CMatrix::identity(2, 2);
    let half = Complex64::new(0.5, 0.0);

    let mut m = kron(&id, &id);
    for mu in 0..3 {
        let s = translation[mu];
        if s != 0.0 {
            m += kron(basis.element(mu), &id) * Complex64::new(s, 0.0);
        }
        for nu in 0..3 {
            let v = linear[(mu, nu)];
            if v != 0.0 {
                m += kron(basis.element(mu), &basis.element(nu).transpose()) * Complex64::new(v, 0.0);
            }
        }
    }
    Ok(ChoiMatrix { dim: 2, matrix: m * half })
}

/// True iff the smallest Choi eigenvalue is at least `-tol`.
pub fn is_completely_positive(choi: &ChoiMatrix, tol: f64) -> bool {
    choi.min_eigenvalue() >= -tol
}

/// Result of the sampled positivity test.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityCheck {
    pub positive: bool,
    /// Smallest output eigenvalue found, `½(1 − ‖V·n + s‖)`.
    pub min_output_eigenvalue: f64,
    /// Pure input state (Bloch vector) attaining it.
    pub worst_input: [f64; 3],
}

/// Sampled positivity test for a qubit affine map.
///
/// Evaluates the map on a Fibonacci grid of `n_samples` pure states and
/// polishes the worst one (plus a few seeded random starts) by projected
/// gradient ascent of `‖V·n + s‖`. One-sided: a map that is negative only
/// on a region finer than the grid and missed by the polish is accepted.
pub fn positivity_check(
    linear: &DMatrix<f64>,
    translation: &DVector<f64>,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<PositivityCheck> {
    check_qubit_shapes(linear, translation)?;
    if n_samples < 10 {
        return Err(Error::Config(format!("positivity check needs at least 10 samples, got {n_samples}")));
    }
    let image_sq = |n: &DVector<f64>| (linear * n + translation).norm_squared();
    let gradient = |n: &DVector<f64>| linear.transpose() * (linear * n + translation) * 2.0;

    let mut best = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
    let mut best_value = f64::NEG_INFINITY;
    for p in fibonacci_sphere(n_samples) {
        let n = DVector::from_column_slice(&p);
        let v = image_sq(&n);
        if v > best_value {
            best_value = v;
            best = n;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = vec![best.clone()];
    for _ in 0..RANDOM_RESTARTS {
        let v = DVector::from_fn(3, |_, _| StandardNormal.sample(&mut rng));
        starts.push(v);
    }
    for start in starts {
        if start.norm() == 0.0 {
            continue;
        }
        let (x, v) = polish_on_sphere(image_sq, gradient, &start, POLISH_ITERATIONS);
        if v > best_value {
            best_value = v;
            best = x;
        }
    }

    let min_output_eigenvalue = 0.5 * (1.0 - best_value.sqrt());
    Ok(PositivityCheck {
        positive: min_output_eigenvalue >= -tol,
        min_output_eigenvalue,
        worst_input: [best[0], best[1], best[2]],
    })
}

/// Whether the qubit map sends every state to a state (sampled; see
/// [`positivity_check`]).
pub fn is_positive_map(
    linear: &DMatrix<f64>,
    translation: &DVector<f64>,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<bool> {
    positivity_check(linear, translation, n_samples, tol, seed).map(|c| c.positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dephasing(k: f64) -> (DMatrix<f64>, DVector<f64>) {
        (
            DMatrix::from_diagonal(&DVector::from_column_slice(&[k, k, 1.0])),
            DVector::zeros(3),
        )
    }

    fn assert_spectrum(choi: &ChoiMatrix, expected: &[f64]) {
        let mut e = expected.to_vec();
        e.sort_by(f64::total_cmp);
        for (a, b) in choi.eigenvalues().iter().zip(&e) {
            assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", choi.eigenvalues(), e);
        }
    }

    #[test]
    fn identity_choi_is_phi_projector() {
        let (v, s) = dephasing(1.0);
        let choi = choi_from_affine(&v, &s).unwrap();
        assert_spectrum(&choi, &[2.0, 0.0, 0.0, 0.0]);
        let one = Complex64::new(1.0, 0.0);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((choi.matrix()[(i, j)] - one).norm() < 1e-15);
        }
        assert!((choi.matrix().trace().re - 2.0).abs() < 1e-15);
        assert!(is_completely_positive(&choi, DEFAULT_CP_TOL));
    }

    #[test]
    fn dephasing_spectrum() {
        for k in [0.0, 0.3, -0.7, 1.5] {
            let (v, s) = dephasing(k);
            assert_spectrum(&choi_from_affine(&v, &s).unwrap(), &[1.0 + k, 1.0 - k, 0.0, 0.0]);
        }
        let (v, s) = dephasing(1.5);
        assert!(!is_completely_positive(&choi_from_affine(&v, &s).unwrap(), DEFAULT_CP_TOL));
        let (v, s) = dephasing(-1.0);
        assert!(is_completely_positive(&choi_from_affine(&v, &s).unwrap(), DEFAULT_CP_TOL));
    }

    #[test]
    fn cp_threshold_sweep() {
        for i in -200..=200 {
            let k = i as f64 * 0.01;
            let (v, s) = dephasing(k);
            let cp = is_completely_positive(&choi_from_affine(&v, &s).unwrap(), DEFAULT_CP_TOL);
            assert_eq!(cp, k.abs() <= 1.0 + 1e-10, "k = {k}");
        }
    }

    #[test]
    fn bad_shapes() {
        assert!(choi_from_affine(&DMatrix::zeros(2, 2), &DVector::zeros(3)).is_err());
        assert!(is_positive_map(&DMatrix::zeros(3, 3), &DVector::zeros(2), 100, 1e-10, 0).is_err());
    }

    #[test]
    fn positivity_examples() {
        let (v, s) = dephasing(1.0);
        assert!(is_positive_map(&v, &s, 200, 1e-10, 42).unwrap());

        let (v, s) = dephasing(45.0);
        let check = positivity_check(&v, &s, 200, 1e-10, 42).unwrap();
        assert!(!check.positive);
        assert!((check.min_output_eigenvalue - 0.5 * (1.0 - 45.0)).abs() < 1e-9);
        assert!(check.worst_input[2].abs() < 1e-6);

        let v = DMatrix::zeros(3, 3);
        let s = DVector::from_column_slice(&[0.0, 0.0, -1.0]);
        assert!(is_positive_map(&v, &s, 200, 1e-10, 42).unwrap());
    }

    #[test]
    fn too_few_samples() {
        let (v, s) = dephasing(1.0);
        assert!(matches!(is_positive_map(&v, &s, 9, 1e-10, 0), Err(Error::Config(_))));
    }

    #[test]
    fn transpose_map_is_positive_but_not_cp() {
        // n ↦ (n_x, −n_y, n_z)
        let v = DMatrix::from_diagonal(&DVector::from_column_slice(&[1.0, -1.0, 1.0]));
        let s = DVector::zeros(3);
        assert!(is_positive_map(&v, &s, 500, 1e-10, 7).unwrap());
        assert!(!is_completely_positive(&choi_from_affine(&v, &s).unwrap(), DEFAULT_CP_TOL));
    }
}
