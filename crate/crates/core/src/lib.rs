//! Divisibility analysis of open-system dynamical maps in coherence-vector form.
//!
//! A dynamical map `Λ(t,0)` on a `d`-level system acts on coherence vectors as
//! the affine map `n ↦ D(t)·n + f(t)`. This crate locates the times `t_c` at which
//! the composition `Λ(t,0) = Λ(t,t_c)Λ(t_c,0)` has no solution, constructs the
//! intermediate map where it does, classifies it (completely positive, positive,
//! or neither), and quantifies each singular time by the largest trace distance
//! between the original evolution and the evolution restarted at `t_c`.
//!
//! Module map:
//!
//! * [`bloch`]: operator bases, state/vector conversions, affine maps, Choi
//!   matrices and positivity checks.
//! * [`divisibility`]: numerical rank, intermediate-map solver and the
//!   singular-point scanner.
//! * [`models`]: closed-form map families and file-backed families.
//! * [`measures`]: the singularity measure and its non-Markovianity sum.
//! * [`cli`]: the `dmsing` command-line front end.

pub mod bloch;
pub mod cli;
pub mod divisibility;
mod error;
pub mod measures;
pub mod models;
pub mod search;

pub use error::{Error, Result};
