use num_traits::Zero;

use super::model::ModelEom;
use crate::bath::WignerSample;
use crate::error::Result;
use crate::numerics::{CMatrix, Rk4, TimeGrid};
use crate::scalar::{Real, C};

/// Reduced-state contributions of one trajectory on every grid point.
///
/// Rates are the right-hand side of the equations of motion evaluated on the
/// propagated state, never finite differences.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<T> {
    pub grid: TimeGrid<T>,
    pub levels: usize,
    /// `n_points * L^2`, row-major density matrix per point.
    pub density: Vec<C<T>>,
    pub density_rate: Vec<C<T>>,
    /// Full flat state per grid point, only when requested.
    pub states: Option<Vec<Vec<C<T>>>>,
}

impl<T: Real> TrajectoryRecord<T> {
    fn block(&self) -> usize {
        self.levels * self.levels
    }

    pub fn density_at(&self, k: usize) -> CMatrix<T> {
        let b = self.block();
        CMatrix::from_row_major(self.levels, &self.density[k * b..(k + 1) * b]).expect("block")
    }

    pub fn rate_at(&self, k: usize) -> CMatrix<T> {
        let b = self.block();
        CMatrix::from_row_major(self.levels, &self.density_rate[k * b..(k + 1) * b]).expect("block")
    }

    /// Spin-up Bloch vector at grid point `k` (two-level models only).
    pub fn bloch_at(&self, k: usize) -> [T; 3] {
        assert_eq!(self.levels, 2, "Bloch vector needs a two-level model");
        let r = &self.density[4 * k..4 * k + 4];
        let two = T::lit(2.0);
        [two * r[1].re, -two * r[1].im, r[0].re - r[3].re]
    }

    /// Populations `rho_nn` summed over all levels at grid point `k`.
    pub fn trace_at(&self, k: usize) -> C<T> {
        let b = self.block();
        (0..self.levels).map(|n| self.density[k * b + n * (self.levels + 1)]).fold(C::zero(), |a, z| a + z)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PropagationOptions {
    /// Keep the full state at every grid point (large).
    pub keep_states: bool,
}

/// Propagates one trajectory from its sampled bath point with RK4.
pub fn propagate_trajectory<T: Real, M: ModelEom<T> + ?Sized>(
    model: &M,
    sample: &WignerSample<T>,
    grid: &TimeGrid<T>,
) -> Result<TrajectoryRecord<T>> {
    propagate_with(model, sample, grid, PropagationOptions::default())
}

pub fn propagate_with<T: Real, M: ModelEom<T> + ?Sized>(
    model: &M,
    sample: &WignerSample<T>,
    grid: &TimeGrid<T>,
    options: PropagationOptions,
) -> Result<TrajectoryRecord<T>> {
    let levels = model.levels();
    let b = levels * levels;
    let n_points = grid.n_points();
    let mut y = model.initial_state(sample)?;
    let mut density = vec![C::zero(); n_points * b];
    let mut density_rate = vec![C::zero(); n_points * b];
    let mut states = options.keep_states.then(|| Vec::with_capacity(n_points));

    let mut rk4 = Rk4::new::<T>(y.len());
    let mut rhs = |_t: T, s: &[C<T>], ds: &mut [C<T>]| model.derivative(s, ds);
    for k in 0..grid.n_steps {
        if let Some(st) = states.as_mut() {
            st.push(y.clone());
        }
        let rho = &mut density[k * b..(k + 1) * b];
        let drho = &mut density_rate[k * b..(k + 1) * b];
        rk4.step_observed(&mut rhs, &mut y, grid.time(k), grid.dt, |s, ds| {
            model.observe(s, ds, rho, drho)
        })?;
    }
    let mut last_rate = vec![C::zero(); y.len()];
    model.derivative(&y, &mut last_rate);
    if last_rate.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(crate::error::Error::NonFiniteDerivative {
            time: grid.t_end().to_f64_lossy(),
        });
    }
    let k = grid.n_steps;
    model.observe(&y, &last_rate, &mut density[k * b..(k + 1) * b], &mut density_rate[k * b..(k + 1) * b]);
    if let Some(st) = states.as_mut() {
        st.push(y);
    }
    Ok(TrajectoryRecord {
        grid: *grid,
        levels,
        density,
        density_rate,
        states,
    })
}
