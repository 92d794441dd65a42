use nalgebra::DMatrix;
use num_complex::Complex64;

use super::CMatrix;
use crate::{Error, Result};

/// Traceless Hermitian operator basis normalized to `Tr(λ_μ λ_ν) = d δ_μν`.
///
/// Elements are the generalized Gell-Mann matrices scaled by `sqrt(d/2)`,
/// ordered as symmetric off-diagonal pairs, antisymmetric pairs, then the
/// diagonal ones, each group in lexicographic `(j, k)` order. For `d = 2`
/// this is exactly `(σx, σy, σz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let scale = (dim as f64 / 2.0).sqrt();
        let one = Complex64::new(scale, 0.0);
        let i_unit = Complex64::new(0.0, scale);
        let zero = || DMatrix::<Complex64>::zeros(dim, dim);

        let mut elements = Vec::with_capacity(dim * dim - 1);
        for j in 0..dim {
            for k in j + 1..dim {
                let mut m = zero();
                m[(j, k)] = one;
                m[(k, j)] = one;
                elements.push(m);
            }
        }
        for j in 0..dim {
            for k in j + 1..dim {
                let mut m = zero();
                m[(j, k)] = -i_unit;
                m[(k, j)] = i_unit;
                elements.push(m);
            }
        }
        for l in 1..dim {
            let norm = scale * (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut m = zero();
            for j in 0..l {
                m[(j, j)] = Complex64::new(norm, 0.0);
            }
            m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            elements.push(m);
        }
        Ok(Self { dim, elements })
    }

    /// The Pauli basis `(σx, σy, σz)`.
    pub fn qubit() -> Self {
        Self::new(2).expect("d = 2 is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements, `d² − 1`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn element(&self, mu: usize) -> &CMatrix {
        &self.elements[mu]
    }

    /// `Σ_μ c_μ λ_μ` for real coefficients.
    pub(crate) fn combine(&self, coefficients: impl IntoIterator<Item = f64>) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (c, el) in coefficients.into_iter().zip(&self.elements) {
            if c != 0.0 {
                out += el * Complex64::new(c, 0.0);
            }
        }
        out
    }

    /// `Tr(X λ_μ)` for every element.
    pub(crate) fn expectations(&self, x: &CMatrix) -> Vec<Complex64> {
        self.elements.iter().map(|el| trace_of_product(x, el)).collect()
    }
}

/// Generalized Gell-Mann basis for dimension `d`.
pub fn make_basis(d: usize) -> Result<OperatorBasis> {
    OperatorBasis::new(d)
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
