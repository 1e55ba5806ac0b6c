//! Hybrid quantum-classical trajectory engine.
//!
//! Subsystem operators and bath phase-space coordinates are both carried as
//! matrix elements in the subsystem basis and propagated as one system of
//! coupled first-order ODEs. Bilinear couplings enter through symmetrized
//! products `(x X + X x)^{a a'}` with `(x X)^{a a'} = sum_b x^{a b} X^{b a'}`.

pub mod ensemble;
pub mod fmo;
mod kernels;
pub mod layout;
pub mod model;
pub mod sbm;
pub mod series;
pub mod trajectory;

pub use ensemble::{run_ensemble, EnsembleOptions};
pub use fmo::{build_fmo_hamiltonian, fmo_eom, fmo_initial_elements, EnergyOffset, Fmo, FMO_TABLE_CM};
pub use layout::CoordinateLayout;
pub use model::{Model, ModelEom};
pub use sbm::{sbm_eom, sbm_initial_elements, SpinBoson};
pub use series::ReducedSeries;
pub use trajectory::{propagate_trajectory, propagate_with, PropagationOptions, TrajectoryRecord};
