//! Shared numerical substrate.

pub mod linalg;
pub mod random;
pub mod rk4;
pub mod simpson;

pub use linalg::{
    hermitian_eigen, hermitian_eigenvalues, schatten_norm, singular_values, CMatrix, HermitianEigen,
    SchattenP,
};
pub use random::GaussianStreams;
pub use rk4::{rk4_step, Rk4};
pub use simpson::{cumulative_trapezoid, simpson_integrate};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform time grid `t0, t0 + dt, ..., t0 + n_steps * dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    pub t0: T,
    pub dt: T,
    pub n_steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t0: T, dt: T, n_steps: usize) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("time step must be positive, got {dt}"),
            });
        }
        if n_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "n_steps",
                reason: "grid needs at least one step".into(),
            });
        }
        Ok(Self { t0, dt, n_steps })
    }

    /// Grid from 0 to (at least) `t_end`, rounding the step count to the
    /// nearest integer.
    pub fn spanning(dt: T, t_end: T) -> Result<Self> {
        let steps = (t_end / dt).round().to_usize().unwrap_or(0);
        Self::new(T::zero(), dt, steps.max(1))
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        self.t0 + self.dt * T::count(k)
    }

    pub fn t_end(&self) -> T {
        self.time(self.n_steps)
    }

    /// Index of the grid point equal to `t` (within a thousandth of a step).
    pub fn index_of(&self, t: T) -> Result<usize> {
        let x = (t - self.t0) / self.dt;
        let k = x.round();
        if (x - k).abs() > T::lit(1e-3) || k < T::zero() || k > T::count(self.n_steps) {
            return Err(Error::OffGrid { time: t.to_f64_lossy() });
        }
        Ok(k.to_usize().expect("non-negative"))
    }
}
