use nalgebra::DVector;
use num_complex::Complex64;

use super::{hermitian_eigenvalues, hermiticity_defect, CMatrix, OperatorBasis};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// A Hermitian, unit-trace, positive semidefinite `d × d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() < 2 {
            return Err(Error::InvalidDimension(matrix.nrows()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min_eigenvalue = hermitian_eigenvalues(&matrix)[0];
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::NotAState { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::Config("zero state vector".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// Coherence vector `n_μ = Tr(ρ λ_μ)` of a `d`-level state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    dim: usize,
    components: DVector<f64>,
}

impl BlochVector {
    pub fn new(dim: usize, components: DVector<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if components.len() != dim * dim - 1 {
            return Err(Error::DimensionMismatch {
                expected: dim * dim - 1,
                found: components.len(),
            });
        }
        Ok(Self { dim, components })
    }

    pub fn from_slice(dim: usize, components: &[f64]) -> Result<Self> {
        Self::new(dim, DVector::from_column_slice(components))
    }

    pub fn zero(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim, components: DVector::zeros(dim * dim - 1) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    pub fn into_components(self) -> DVector<f64> {
        self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Coherence vector of `rho` in `basis`.
pub fn state_to_bloch(rho: &DensityMatrix, basis: &OperatorBasis) -> Result<BlochVector> {
    check_dims(basis.dim(), rho.dim())?;
    let mut out = DVector::zeros(basis.len());
    for (mu, value) in basis.expectations(rho.matrix()).into_iter().enumerate() {
        if value.im.abs() > IMAG_RESIDUE_TOL {
            return Err(Error::Numerical(format!(
                "Tr(ρ λ_{mu}) has imaginary part {:e}",
                value.im
            )));
        }
        out[mu] = value.re;
    }
    Ok(BlochVector { dim: basis.dim(), components: out })
}

/// `(I + n·λ)/d`; fails with [`Error::NotAState`] if the result is not positive.
pub fn bloch_to_state(n: &BlochVector, basis: &OperatorBasis) -> Result<DensityMatrix> {
    check_dims(basis.dim(), n.dim())?;
    let d = basis.dim();
    let mut m = basis.combine(n.components().iter().copied());
    for i in 0..d {
        m[(i, i)] += Complex64::new(1.0, 0.0);
    }
    DensityMatrix::new(m / Complex64::new(d as f64, 0.0))
}

/// `½ Tr|ρ₁ − ρ₂|`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    check_dims(rho1.dim(), rho2.dim())?;
    let diff = rho1.matrix() - rho2.matrix();
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>())
}
