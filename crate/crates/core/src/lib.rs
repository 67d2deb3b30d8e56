//! Vacuum-polarization corrections to the interaction of point charges.
//!
//! Everything is in atomic units (ħ = mₑ = e = 1) unless a function says
//! otherwise; the fine-structure constant is carried explicitly in
//! [`PhysicalContext`] so that every correction can be switched off by
//! setting it to zero.

pub mod bound_states;
pub mod cli;
pub mod context;
pub mod coulomb_waves;
pub mod error;
pub mod field_equation;
pub mod fourier;
pub mod ledger;
pub mod o21_algebra;
pub mod ode;
pub mod potentials;
pub mod quadrature;
pub mod scattering;
pub mod special_functions;

pub use context::{Charges, PhysicalContext, UnitSystem};
pub use error::{Error, Result};
pub use quadrature::EvalAccuracy;
