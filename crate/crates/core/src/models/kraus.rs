use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tabulated::read_json;
use super::{tabulated_family, MapFamily, TabulatedFile, TabulatedSample};
use crate::bloch::{AffineMap, CMatrix, OperatorBasis};
use crate::{Error, Result};

const COMPLETENESS_TOL: f64 = 1e-8;

/// Complex number stored as `[re, im]`.
pub type ComplexEntry = [f64; 2];

/// On-disk Kraus family: `{"d": int, "samples": [{"t", "kraus": [K₁, K₂, ...]}]}`
/// where each `K` is a list of `d` rows of `d` `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausFile {
    pub d: usize,
    pub samples: Vec<KrausSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausSample {
    pub t: f64,
    pub kraus: Vec<Vec<Vec<ComplexEntry>>>,
}

impl KrausSample {
    pub fn from_matrices(t: f64, ops: &[CMatrix]) -> Self {
        let kraus = ops
            .iter()
            .map(|k| {
                (0..k.nrows())
                    .map(|r| (0..k.ncols()).map(|c| [k[(r, c)].re, k[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        Self { t, kraus }
    }

    fn matrices(&self, d: usize, index: usize) -> Result<Vec<CMatrix>> {
        if self.kraus.is_empty() {
            return Err(Error::Schema(format!("sample {index}: empty Kraus list")));
        }
        self.kraus
            .iter()
            .map(|rows| {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Schema(format!("sample {index}: Kraus operators must be {d}x{d}")));
                }
                Ok(CMatrix::from_fn(d, d, |r, c| {
                    let [re, im] = rows[r][c];
                    Complex64::new(re, im)
                }))
            })
            .collect()
    }
}

/// Affine form of `ρ ↦ Σ K ρ K†`:
/// `D_μν = Tr(λ_μ Σ K λ_ν K†)/d`, `f_μ = Tr(λ_μ Σ K K†)/d`.
///
/// Fails if `Σ K†K` deviates from the identity by more than 1e−8.
pub fn transfer_from_kraus(basis: &OperatorBasis, ops: &[CMatrix], t: f64) -> Result<AffineMap> {
    let d = basis.dim();
    if ops.iter().any(|k| k.shape() != (d, d)) {
        return Err(Error::Schema(format!("Kraus operators must be {d}x{d}")));
    }
    let mut completeness = CMatrix::zeros(d, d);
    for k in ops {
        completeness += k.adjoint() * k;
    }
    let deviation = (completeness - CMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if deviation > COMPLETENESS_TOL {
        return Err(Error::NotTracePreserving { t, deviation });
    }
    AffineMap::from_operator_map(basis, |x| {
        let mut out = CMatrix::zeros(d, d);
        for k in ops {
            out += k * x * k.adjoint();
        }
        out
    })
}

/// Read a Kraus family; see [`kraus_family`].
pub fn family_from_kraus(path: &Path) -> Result<MapFamily> {
    let file: KrausFile = read_json(path)?;
    kraus_family(file, format!("kraus:{}", path.display()))
}

/// Converts every sample to affine form, then interpolates like a tabulated
/// family.
pub fn kraus_family(file: KrausFile, name: impl Into<String>) -> Result<MapFamily> {
    if file.d < 2 {
        return Err(Error::Schema(format!("d must be at least 2, got {}", file.d)));
    }
    let basis = OperatorBasis::new(file.d)?;
    let n = basis.len();
    let mut samples = Vec::with_capacity(file.samples.len());
    for (i, s) in file.samples.iter().enumerate() {
        let ops = s.matrices(file.d, i)?;
        let m = transfer_from_kraus(&basis, &ops, s.t)?;
        let mut linear = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                linear.push(m.linear()[(r, c)]);
            }
        }
        samples.push(TabulatedSample { t: s.t, linear, f: m.translation().iter().copied().collect() });
    }
    tabulated_family(TabulatedFile { d: file.d, samples }, name)
}
