use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use super::MapFamily;
use crate::bloch::AffineMap;
use crate::{Error, Result};

const CRITICAL_TOL: f64 = 1e-12;
const POLE_TOL: f64 = 1e-12;

/// Qubit resonantly coupled to a zero-temperature bosonic bath with a
/// Lorentzian spectral density of strength `γ₀` and width `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    pub gamma0: f64,
    pub lambda: f64,
}

/// Damping regime, with the corresponding frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JcRegime {
    /// `γ₀/λ < ½`, `d = √(λ² − 2γ₀λ)`.
    Overdamped { d: f64 },
    /// `γ₀/λ = ½`.
    Critical,
    /// `γ₀/λ > ½`, `d₀ = √(2γ₀λ − λ²)`.
    Underdamped { d0: f64 },
}

impl JcParams {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::Config(format!("gamma0 must be positive, got {gamma0}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { gamma0, lambda })
    }

    pub fn regime(&self) -> JcRegime {
        let d_sq = self.lambda * self.lambda - 2.0 * self.gamma0 * self.lambda;
        if d_sq.abs() < CRITICAL_TOL {
            JcRegime::Critical
        } else if d_sq > 0.0 {
            JcRegime::Overdamped { d: d_sq.sqrt() }
        } else {
            JcRegime::Underdamped { d0: (-d_sq).sqrt() }
        }
    }

    /// `t_c⁽ⁿ⁾ = (2/d₀)(arccot(−1/√(2γ₀/λ − 1)) + nπ)` with arccot in `(0, π)`;
    /// `None` unless underdamped.
    pub fn singular_time(&self, n: usize) -> Option<f64> {
        match self.regime() {
            JcRegime::Underdamped { d0 } => {
                let x = -1.0 / (2.0 * self.gamma0 / self.lambda - 1.0).sqrt();
                let arccot = FRAC_PI_2 - x.atan();
                Some(2.0 / d0 * (arccot + n as f64 * PI))
            }
            _ => None,
        }
    }

    /// Local maxima of `c(t)²` after the start, `T⁽ⁿ⁾ = 2(n+1)π/d₀`.
    pub fn revival_time(&self, n: usize) -> Option<f64> {
        match self.regime() {
            JcRegime::Underdamped { d0 } => Some(2.0 * (n + 1) as f64 * PI / d0),
            _ => None,
        }
    }
}

/// Excited-state amplitude `c(t)` with `c(0) = 1`.
pub fn jc_c(p: JcParams, t: f64) -> f64 {
    let envelope = (-p.lambda * t / 2.0).exp();
    match p.regime() {
        JcRegime::Overdamped { d } => {
            let x = d * t / 2.0;
            envelope * (x.cosh() + p.lambda / d * x.sinh())
        }
        JcRegime::Critical => envelope * (1.0 + p.lambda * t / 2.0),
        JcRegime::Underdamped { d0 } => {
            let x = d0 * t / 2.0;
            envelope * (x.cos() + p.lambda / d0 * x.sin())
        }
    }
}

/// Decay rate `γ(t) = −2 Re(ċ/c)`; a pole wherever `c(t) = 0`.
pub fn jc_gamma(p: JcParams, t: f64) -> Result<f64> {
    let (num, den) = match p.regime() {
        JcRegime::Overdamped { d } => {
            let x = d * t / 2.0;
            (2.0 * p.gamma0 * p.lambda * x.sinh(), d * x.cosh() + p.lambda * x.sinh())
        }
        // sinh(dt/2)/d → t/2
        JcRegime::Critical => (p.gamma0 * p.lambda * t, 1.0 + p.lambda * t / 2.0),
        JcRegime::Underdamped { d0 } => {
            let x = d0 * t / 2.0;
            (2.0 * p.gamma0 * p.lambda * x.sin(), d0 * x.cos() + p.lambda * x.sin())
        }
    };
    if den.abs() < POLE_TOL {
        return Err(Error::Pole { t });
    }
    Ok(num / den)
}

/// `D = diag(c, c, c²)`, `f = (0, 0, c² − 1)` with the signed amplitude `c(t)`.
///
/// The excited level is `|0⟩` (Bloch `n_z = +1`); the ground state
/// `(0, 0, −1)` is a fixed point.
pub fn jc_family(p: JcParams) -> MapFamily {
    let mut fam = MapFamily::new("jc", 2, f64::INFINITY, move |t| {
        let c = jc_c(p, t);
        let pop = c * c;
        AffineMap::new(
            2,
            DMatrix::from_diagonal(&DVector::from_column_slice(&[c, c, pop])),
            DVector::from_column_slice(&[0.0, 0.0, pop - 1.0]),
        )
    })
    .with_param("gamma0", p.gamma0)
    .with_param("lambda", p.lambda);
    if let JcRegime::Underdamped { d0 } = p.regime() {
        fam = fam
            .with_singular_times(move |n| p.singular_time(n).expect("underdamped"))
            .with_period(2.0 * PI / d0);
    }
    fam
}

#[cfg(test)]
mod tests {
    use super::*;

    fn underdamped() -> JcParams {
        JcParams::new(5.0, 1.0).unwrap()
    }

    fn rk4_population(p: JcParams, t_end: f64, steps: usize) -> Vec<(f64, f64)> {
        let rhs = |t: f64, y: f64| -jc_gamma(p, t).unwrap() * y;
        let h = t_end / steps as f64;
        let mut y = 1.0;
        let mut out = Vec::new();
        for i in 0..steps {
            let t = i as f64 * h;
            let k1 = rhs(t, y);
            let k2 = rhs(t + h / 2.0, y + h * k1 / 2.0);
            let k3 = rhs(t + h / 2.0, y + h * k2 / 2.0);
            let k4 = rhs(t + h, y + h * k3);
            y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            out.push(((i + 1) as f64 * h, y));
        }
        out
    }

    #[test]
    fn invalid_params() {
        assert!(JcParams::new(0.0, 1.0).is_err());
        assert!(JcParams::new(1.0, -1.0).is_err());
        assert!(JcParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn regimes() {
        assert!(matches!(underdamped().regime(), JcRegime::Underdamped { d0 } if (d0 - 3.0).abs() < 1e-15));
        assert!(matches!(JcParams::new(0.2, 1.0).unwrap().regime(), JcRegime::Overdamped { .. }));
        assert_eq!(JcParams::new(0.5, 1.0).unwrap().regime(), JcRegime::Critical);
    }

    #[test]
    fn amplitude_examples() {
        let p = underdamped();
        assert_eq!(jc_c(p, 0.0), 1.0);
        let t = 2.0 * PI / 3.0;
        assert!((jc_c(p, t) + (-PI / 3.0).exp()).abs() < 1e-15);
        assert!((jc_c(p, t) + 0.350_920).abs() < 1e-6);
    }

    #[test]
    fn overdamped_amplitude_is_positive_and_decreasing() {
        let p = JcParams::new(0.2, 1.0).unwrap();
        let mut prev = jc_c(p, 0.0);
        for i in 1..=1000 {
            let c = jc_c(p, i as f64 * 0.01);
            assert!(c > 0.0 && c < prev);
            prev = c;
        }
    }

    #[test]
    fn critical_limit_is_continuous() {
        let crit = JcParams::new(0.5, 1.0).unwrap();
        let near = JcParams::new(0.5 - 1e-7, 1.0).unwrap();
        for t in [0.5, 2.0, 7.0] {
            assert!((jc_c(crit, t) - jc_c(near, t)).abs() < 1e-6);
            assert!((jc_gamma(crit, t).unwrap() - jc_gamma(near, t).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn rate_examples() {
        assert_eq!(jc_gamma(underdamped(), 0.0).unwrap(), 0.0);
        let over = JcParams::new(0.2, 1.0).unwrap();
        for i in 0..=1000 {
            assert!(jc_gamma(over, i as f64 * 0.01).unwrap() >= 0.0);
        }
        // divergence approaching the first zero of c(t)
        let tc = underdamped().singular_time(0).unwrap();
        let g1 = jc_gamma(underdamped(), tc - 1e-3).unwrap();
        let g2 = jc_gamma(underdamped(), tc - 1e-6).unwrap();
        assert!(g2 > 100.0 * g1.abs() && g2 > 1e5);
    }

    #[test]
    fn rate_matches_log_derivative() {
        for p in [underdamped(), JcParams::new(0.2, 1.0).unwrap(), JcParams::new(0.5, 1.0).unwrap()] {
            for t in [0.3, 0.8, 1.1] {
                let h = 1e-5;
                let dc = (jc_c(p, t + h) - jc_c(p, t - h)) / (2.0 * h);
                let expected = -2.0 * dc / jc_c(p, t);
                assert!((jc_gamma(p, t).unwrap() - expected).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rate_reproduces_population_decay() {
        for (p, t_end) in [(underdamped(), 1.0), (JcParams::new(0.2, 1.0).unwrap(), 10.0)] {
            for (t, y) in rk4_population(p, t_end, 20_000).into_iter().step_by(500) {
                assert!((y - jc_c(p, t).powi(2)).abs() < 1e-6, "t = {t}");
            }
        }
    }

    #[test]
    fn first_singular_time() {
        let p = underdamped();
        let tc = p.singular_time(0).unwrap();
        assert!((tc - 2.0 / 3.0 * (PI - 3f64.atan())).abs() < 1e-14);
        assert!((tc - 1.261_698).abs() < 1e-6);
        assert!(jc_c(p, tc).abs() < 1e-15);
        assert!(JcParams::new(0.2, 1.0).unwrap().singular_time(0).is_none());
    }

    #[test]
    fn family_structure() {
        let fam = jc_family(underdamped());
        assert!(fam.evaluate(0.0).unwrap().max_abs_diff(&AffineMap::identity(2).unwrap()) < 1e-15);
        let tc = fam.closed_form_singular_point(0).unwrap();
        let m = fam.evaluate(tc).unwrap();
        assert!(m.linear().abs().max() < 1e-15);
        assert!((m.translation() - DVector::from_column_slice(&[0.0, 0.0, -1.0])).norm() < 1e-15);
        let ground = DVector::from_column_slice(&[0.0, 0.0, -1.0]);
        for i in 0..200 {
            let m = fam.evaluate(i as f64 * 0.05).unwrap();
            let d11 = m.linear()[(0, 0)];
            assert_eq!(m.linear()[(2, 2)], d11 * d11);
            assert_eq!(m.translation()[2], m.linear()[(2, 2)] - 1.0);
            assert!((m.apply_vector(&ground) - &ground).norm() < 1e-15);
        }
        assert!(!jc_family(JcParams::new(0.2, 1.0).unwrap()).has_closed_form_singular_points());
    }
}
