use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::CMatrix;
use crate::{Error, Result};

/// Two-qudit swap `Σ_ij |i,j⟩⟨j,i|`.
pub fn swap_operator(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut v = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            v[(i * d + j, j * d + i)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(v)
}

/// `(I + V)/(d(d+1))`, the exact Haar average of `|ψ⟩⟨ψ|⊗|ψ⟩⟨ψ|`.
pub fn haar_identity(d: usize) -> Result<CMatrix> {
    let swap = swap_operator(d)?;
    let id = CMatrix::identity(d * d, d * d);
    Ok((id + swap) / Complex64::new((d * (d + 1)) as f64, 0.0))
}

/// Average of `|ψ⟩⟨ψ|⊗|ψ⟩⟨ψ|` over the given states (normalized internally).
pub fn product_projector_average(states: &[DVector<Complex64>]) -> Result<CMatrix> {
    let Some(first) = states.first() else {
        return Err(Error::Config("need at least one state".into()));
    };
    let d = first.len();
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut acc = Accumulator::new(d);
    for psi in states {
        if psi.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: psi.len() });
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::Config("zero state vector".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|a| a / norm).collect();
        acc.add(&unit);
    }
    Ok(acc.finish())
}

/// Monte-Carlo estimate of the Haar average of `|ψ⟩⟨ψ|⊗|ψ⟩⟨ψ|` from
/// `samples` normalized complex-Gaussian vectors; deterministic per seed.
pub fn haar_average_projector(d: usize, samples: usize, seed: u64) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    if samples == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Accumulator::new(d);
    let mut psi = vec![Complex64::new(0.0, 0.0); d];
    for _ in 0..samples {
        let mut norm_sq = 0.0;
        for a in psi.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *a = Complex64::new(re, im);
            norm_sq += re * re + im * im;
        }
        let inv = 1.0 / norm_sq.sqrt();
        psi.iter_mut().for_each(|a| *a *= inv);
        acc.add(&psi);
    }
    Ok(acc.finish())
}

/// Running sum of `(ψ⊗ψ)(ψ⊗ψ)†` in a flat row-major buffer.
struct Accumulator {
    dim2: usize,
    count: usize,
    sum: Vec<Complex64>,
    pair: Vec<Complex64>,
}

impl Accumulator {
    fn new(d: usize) -> Self {
        let dim2 = d * d;
        Self {
            dim2,
            count: 0,
            sum: vec![Complex64::new(0.0, 0.0); dim2 * dim2],
            pair: vec![Complex64::new(0.0, 0.0); dim2],
        }
    }

    fn add(&mut self, psi: &[Complex64]) {
        let d = psi.len();
        for i in 0..d {
            for j in 0..d {
                self.pair[i * d + j] = psi[i] * psi[j];
            }
        }
        for (r, a) in self.pair.iter().enumerate() {
            let row = &mut self.sum[r * self.dim2..(r + 1) * self.dim2];
            for (slot, b) in row.iter_mut().zip(&self.pair) {
                *slot += a * b.conj();
            }
        }
        self.count += 1;
    }

    fn finish(self) -> CMatrix {
        let scale = 1.0 / self.count as f64;
        CMatrix::from_row_iterator(self.dim2, self.dim2, self.sum.into_iter().map(|z| z * scale))
    }
}
