//! Singularity measure and the non-Markovianity sum over singular points.
//!
//! For a singular time `t_c`, the original trajectory `n(T) = D(T)·n₀ + f(T)`
//! is compared with the trajectory restarted from the state at `t_c`,
//! `n_rc(T) = D(T−t_c)·(D(t_c)·n₀ + f(t_c)) + f(T−t_c)`. Both are affine in
//! `n₀`, so their qubit trace distance is `½‖M·n₀ + b‖` and the maximization
//! over initial states is a norm maximization over the unit ball, done
//! exactly via the secular equation. The outer maximization over `T` is a
//! grid search with golden-section polish.

mod ball;
mod singularity;

pub use ball::{max_norm_affine_over_ball, max_norm_affine_over_ball_sampled, BallMax, InnerSolver};
pub use singularity::{
    deviation_affine, non_markovianity, restart_trajectory, singularity_measure, MeasureConfig,
    MeasureResult, NonMarkovConfig, NonMarkovianity,
};
