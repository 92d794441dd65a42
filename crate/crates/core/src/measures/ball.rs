use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::search::{fibonacci_sphere, polish_on_sphere};
use crate::{Error, Result};

const SECULAR_MAX_ITER: usize = 200;
const SECULAR_TOL: f64 = 1e-12;
const FALLBACK_SAMPLES: usize = 4096;
const FALLBACK_POLISH: usize = 500;

/// Which inner path produced a [`BallMax`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolver {
    Secular,
    SampledFallback,
}

impl InnerSolver {
    pub fn as_str(&self) -> &'static str {
        match self {
            InnerSolver::Secular => "secular",
            InnerSolver::SampledFallback => "sampled-fallback",
        }
    }
}

/// `max ‖M·n + b‖` over the unit ball, with an attaining `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMax {
    pub value: f64,
    pub argmax: DVector<f64>,
    pub solver: InnerSolver,
}

fn check(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<()> {
    if m.nrows() != b.len() || m.ncols() == 0 {
        return Err(Error::Shape(format!(
            "need an m×n matrix and an m-vector, got {}x{} and {}",
            m.nrows(),
            m.ncols(),
            b.len()
        )));
    }
    if m.iter().chain(b.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite input to ball maximization".into()));
    }
    Ok(())
}

/// Maximize `‖M·n + b‖` subject to `‖n‖ ≤ 1`.
///
/// The objective is convex, so the maximum sits on the sphere, where
/// stationarity reads `(MᵀM − μI)·n = −Mᵀb` with `μ ≥ λ_max(MᵀM)`. In the
/// eigenbasis of `MᵀM` this reduces to the scalar secular equation
/// `Σ γᵢ²/(μ − λᵢ)² = 1`, solved by safeguarded Newton iteration. When `Mᵀb`
/// has no component along the top eigenspace and the remaining components
/// fit inside the ball, `μ = λ_max` and the leftover norm goes along a top
/// eigenvector. If the secular iteration fails the result comes from
/// Fibonacci-sphere sampling with gradient polish instead.
pub fn max_norm_affine_over_ball(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<BallMax> {
    check(m, b)?;
    let dim = m.ncols();
    let scale = m.abs().max().max(b.abs().max()).max(1.0);
    if m.abs().max() <= 1e-15 * scale {
        return Ok(BallMax { value: b.norm(), argmax: DVector::zeros(dim), solver: InnerSolver::Secular });
    }
    match secular(m, b) {
        Some(n) => {
            let value = (m * &n + b).norm();
            Ok(BallMax { value, argmax: n, solver: InnerSolver::Secular })
        }
        None => max_norm_affine_over_ball_sampled(m, b),
    }
}

fn secular(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let a = m.transpose() * m;
    let g = m.transpose() * b;
    let eig = SymmetricEigen::new(a);
    let dim = eig.eigenvalues.len();

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let q: Vec<DVector<f64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    let gamma: Vec<f64> = q.iter().map(|qi| qi.dot(&g)).collect();

    let top = lambda[0];
    let in_top = |i: usize| lambda[i] >= top - 1e-12 * top.abs().max(1e-300);
    let gamma_top = (0..dim).filter(|&i| in_top(i)).map(|i| gamma[i] * gamma[i]).sum::<f64>().sqrt();
    let g_norm = g.norm();

    let assemble = |mu: f64| -> DVector<f64> {
        let mut n = DVector::zeros(dim);
        for i in 0..dim {
            if !in_top(i) || mu > top {
                n += &q[i] * (gamma[i] / (mu - lambda[i]));
            }
        }
        n
    };

    if gamma_top <= 1e-13 * g_norm.max(top).max(1e-300) {
        let rest = assemble(top);
        let rest_norm_sq = rest.norm_squared();
        if rest_norm_sq <= 1.0 {
            let mut dir = q[0].clone();
            if let Some(first) = dir.iter().find(|x| x.abs() > 1e-12).copied() {
                if first < 0.0 {
                    dir = -dir;
                }
            }
            return Some(rest + dir * (1.0 - rest_norm_sq).sqrt());
        }
    }

    let norm_at = |mu: f64| -> (f64, f64) {
        // ‖n(μ)‖ and Σ γ²/(μ−λ)³
        let mut sq = 0.0;
        let mut cube = 0.0;
        for i in 0..dim {
            let gap = mu - lambda[i];
            sq += gamma[i] * gamma[i] / (gap * gap);
            cube += gamma[i] * gamma[i] / (gap * gap * gap);
        }
        (sq.sqrt(), cube)
    };

    let mut lo = top;
    let mut hi = top + g_norm;
    let mut mu = hi;
    for _ in 0..SECULAR_MAX_ITER {
        let (norm, cube) = norm_at(mu);
        if !norm.is_finite() {
            lo = mu;
            mu = 0.5 * (lo + hi);
            continue;
        }
        if (norm - 1.0).abs() <= SECULAR_TOL {
            let n = assemble(mu);
            return Some(&n / n.norm());
        }
        if norm > 1.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        // Newton on φ(μ) = 1/‖n‖ − 1
        let phi = 1.0 / norm - 1.0;
        let dphi = cube / (norm * norm * norm);
        let step = mu - phi / dphi;
        mu = if dphi > 0.0 && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            let n = assemble(mu);
            let nn = n.norm();
            if (nn - 1.0).abs() <= 1e-8 {
                return Some(&n / nn);
            }
            return None;
        }
    }
    None
}

/// Sampling-based maximization: 4096 sphere points (Fibonacci lattice for
/// `n = 3`, seeded Gaussian directions otherwise) followed by projected
/// gradient polish of the best one.
pub fn max_norm_affine_over_ball_sampled(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<BallMax> {
    check(m, b)?;
    let dim = m.ncols();
    let candidates: Vec<DVector<f64>> = if dim == 3 {
        fibonacci_sphere(FALLBACK_SAMPLES).into_iter().map(|p| DVector::from_column_slice(&p)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        (0..FALLBACK_SAMPLES)
            .map(|_| DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng)).normalize())
            .collect()
    };
    let objective = |n: &DVector<f64>| (m * n + b).norm_squared();
    let gradient = |n: &DVector<f64>| m.transpose() * (m * n + b) * 2.0;
    let start = candidates
        .into_iter()
        .map(|n| (objective(&n), n))
        .max_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, n)| n)
        .ok_or_else(|| Error::Numerical("empty sample set".into()))?;
    let (argmax, value_sq) = polish_on_sphere(objective, gradient, &start, FALLBACK_POLISH);
    if !value_sq.is_finite() {
        return Err(Error::Numerical("ball maximization failed on both paths".into()));
    }
    Ok(BallMax { value: value_sq.sqrt(), argmax, solver: InnerSolver::SampledFallback })
}
