//! Dynamical-map families `t ↦ Λ(t,0)` in affine form.
//!
//! Built-in closed forms cover spin-bath dephasing, the resonant damped
//! Jaynes–Cummings model and a constant-rate (semigroup) dephasing reference.
//! Families can also be read from tabulated affine data or from time-indexed
//! Kraus sets.

mod dephasing;
mod family;
mod jc;
mod kraus;
mod tabulated;

pub use dephasing::{dephasing_family, dephasing_gamma, semigroup_dephasing_family, DephasingParams};
pub use family::{Evaluator, MapFamily};
pub use jc::{jc_c, jc_family, jc_gamma, JcParams, JcRegime};
pub use kraus::{family_from_kraus, kraus_family, transfer_from_kraus, ComplexEntry, KrausFile, KrausSample};
pub use tabulated::{
    export_tabulated, load_tabulated_family, tabulated_family, TabulatedFile, TabulatedSample,
};
