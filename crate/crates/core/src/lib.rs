//! Quantum speed limit times of open quantum systems.
//!
//! Reduced dynamics come from ensembles of hybrid quantum-classical
//! trajectories over Wigner-sampled harmonic baths, or from second-order
//! Bloch-Redfield equations for the spin-boson model. The [`qsl`] module
//! turns either into `tau_1`, `tau_2` and `tau_inf`.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod bath;
pub mod bre;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod qsl;
pub mod scalar;
pub mod units;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Complex = C<f64>;
pub type Matrix = numerics::CMatrix<f64>;
pub type Grid = numerics::TimeGrid<f64>;
pub type Bath = bath::DiscretizedBath<f64>;
pub type Series = dynamics::ReducedSeries<f64>;
pub type Report = qsl::QslReport<f64>;
pub type Kernels = bre::KernelTable<f64>;
