use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::basis::trace_of_product;
use super::{bloch_to_state, state_to_bloch, BlochVector, CMatrix, DensityMatrix, OperatorBasis};
use crate::{Error, Result};

/// Trace-preserving linear map in coherence-vector form, `n ↦ D·n + f`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    dim: usize,
    linear: DMatrix<f64>,
    translation: DVector<f64>,
}

impl AffineMap {
    pub fn new(dim: usize, linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim - 1;
        if linear.shape() != (n, n) || translation.len() != n {
            return Err(Error::Shape(format!(
                "affine map for d = {dim} needs a {n}x{n} matrix and a {n}-vector, got {}x{} and {}",
                linear.nrows(),
                linear.ncols(),
                translation.len()
            )));
        }
        if linear.iter().chain(translation.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Numerical("affine map has non-finite entries".into()));
        }
        Ok(Self { dim, linear, translation })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim - 1;
        Ok(Self { dim, linear: DMatrix::identity(n, n), translation: DVector::zeros(n) })
    }

    /// Qubit map from a 3×3 matrix and a 3-vector given as row-major slices.
    pub fn qubit(linear: [f64; 9], translation: [f64; 3]) -> Self {
        Self {
            dim: 2,
            linear: DMatrix::from_row_slice(3, 3, &linear),
            translation: DVector::from_column_slice(&translation),
        }
    }

    /// Transfer representation of an arbitrary linear map given by its action
    /// on operators: `D_μν = Re Tr(Λ(λ_ν) λ_μ)/d`, `f_μ = Re Tr(Λ(I) λ_μ)/d`.
    pub fn from_operator_map<F>(basis: &OperatorBasis, mut channel: F) -> Result<Self>
    where
        F: FnMut(&CMatrix) -> CMatrix,
    {
        let d = basis.dim();
        let n = basis.len();
        let scale = 1.0 / d as f64;
        let mut linear = DMatrix::zeros(n, n);
        for nu in 0..n {
            let image = channel(basis.element(nu));
            for mu in 0..n {
                linear[(mu, nu)] = trace_of_product(&image, basis.element(mu)).re * scale;
            }
        }
        let image = channel(&CMatrix::identity(d, d));
        let translation = DVector::from_iterator(
            n,
            basis.elements().iter().map(|el| trace_of_product(&image, el).re * scale),
        );
        Self::new(d, linear, translation)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Size `d² − 1` of the coherence vectors this map acts on.
    pub fn vector_len(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply_vector(&self, n: &DVector<f64>) -> DVector<f64> {
        &self.linear * n + &self.translation
    }

    pub fn apply_bloch(&self, n: &BlochVector) -> Result<BlochVector> {
        if n.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: n.dim() });
        }
        BlochVector::new(self.dim, self.apply_vector(n.components()))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &AffineMap) -> Result<AffineMap> {
        if first.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: first.dim });
        }
        Ok(AffineMap {
            dim: self.dim,
            linear: &self.linear * &first.linear,
            translation: &self.linear * &first.translation + &self.translation,
        })
    }

    /// Linear extension to an arbitrary (not necessarily Hermitian) operator.
    pub fn act_on_operator(&self, basis: &OperatorBasis, x: &CMatrix) -> Result<CMatrix> {
        if basis.dim() != self.dim || x.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.nrows() });
        }
        let d = self.dim;
        let coeffs = basis.expectations(x);
        // Λ(I) = I + f·λ, Λ(λ_ν) = Σ_μ D_μν λ_μ
        let mut out = CMatrix::identity(d, d) * x.trace();
        for (mu, el) in basis.elements().iter().enumerate() {
            let mut c = x.trace() * self.translation[mu];
            for (nu, cn) in coeffs.iter().enumerate() {
                c += cn * self.linear[(mu, nu)];
            }
            out += el * c;
        }
        Ok(out / Complex64::new(d as f64, 0.0))
    }

    pub fn max_abs_diff(&self, other: &AffineMap) -> f64 {
        let a = (&self.linear - &other.linear).abs().max();
        let b = (&self.translation - &other.translation).abs().max();
        a.max(b)
    }
}

/// Evolve a state: `bloch_to_state(D·n(ρ) + f)`.
///
/// Fails with [`Error::NotAState`] when the output leaves the state space,
/// which flags an unphysical map (or an extrapolated time).
pub fn apply_map(m: &AffineMap, rho: &DensityMatrix, basis: &OperatorBasis) -> Result<DensityMatrix> {
    if m.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: m.dim() });
    }
    let n = state_to_bloch(rho, basis)?;
    bloch_to_state(&m.apply_bloch(&n)?, basis)
}
