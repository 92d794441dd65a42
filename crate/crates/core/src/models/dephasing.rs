use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::MapFamily;
use crate::bloch::AffineMap;
use crate::{Error, Result};

/// Central spin coupled to `N` bath spins through `Σ_k A_k σz σz^k`,
/// `A_k = A/√N`, with the bath maximally mixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingParams {
    /// `A`, inverse time units.
    pub coupling: f64,
    /// `N ≥ 1`.
    pub bath_spins: u32,
}

impl DephasingParams {
    pub fn new(coupling: f64, bath_spins: u32) -> Result<Self> {
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::Config(format!("coupling A must be positive, got {coupling}")));
        }
        if bath_spins == 0 {
            return Err(Error::Config("bath spin count N must be at least 1".into()));
        }
        Ok(Self { coupling, bath_spins })
    }

    fn phase(&self, t: f64) -> f64 {
        2.0 * self.coupling * t / (self.bath_spins as f64).sqrt()
    }

    /// Coherence multiplier `C(t) = cos^N(2At/√N)`.
    pub fn coherence(&self, t: f64) -> f64 {
        self.phase(t).cos().powi(self.bath_spins as i32)
    }

    /// `t_c⁽ⁿ⁾ = √N (2n+1) π / (4A)`.
    pub fn singular_time(&self, n: usize) -> f64 {
        (self.bath_spins as f64).sqrt() * (2 * n + 1) as f64 * PI / (4.0 * self.coupling)
    }

    /// Period of `|C(t)|`, `√N π / (2A)`.
    pub fn period(&self) -> f64 {
        (self.bath_spins as f64).sqrt() * PI / (2.0 * self.coupling)
    }
}

fn diag3(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(&[a, b, c]))
}

/// `D(t) = diag(C, C, 1)`, `f = 0`.
pub fn dephasing_family(p: DephasingParams) -> MapFamily {
    MapFamily::new("dephasing", 2, f64::INFINITY, move |t| {
        let c = p.coherence(t);
        AffineMap::new(2, diag3(c, c, 1.0), DVector::zeros(3))
    })
    .with_param("A", p.coupling)
    .with_param("N", p.bath_spins as f64)
    .with_singular_times(move |n| p.singular_time(n))
    .with_period(p.period())
}

/// Rate `γ(t) = A√N tan(2At/√N)` of `ρ̇ = γ(t)(σz ρ σz − ρ)`.
pub fn dephasing_gamma(p: DephasingParams, t: f64) -> Result<f64> {
    let x = p.phase(t);
    if x.cos().abs() < 1e-12 {
        return Err(Error::Pole { t });
    }
    Ok(p.coupling * (p.bath_spins as f64).sqrt() * x.tan())
}

/// Markovian reference: constant-rate dephasing, `D(t) = diag(e^{−2γt}, e^{−2γt}, 1)`.
pub fn semigroup_dephasing_family(rate: f64) -> Result<MapFamily> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::Config(format!("rate must be non-negative, got {rate}")));
    }
    Ok(MapFamily::new("semigroup", 2, f64::INFINITY, move |t| {
        let c = (-2.0 * rate * t).exp();
        AffineMap::new(2, diag3(c, c, 1.0), DVector::zeros(3))
    })
    .with_param("gamma", rate))
}
