//! Spin-boson model: two-level spin with tunnelling `delta`, coupled through
//! `sigma_z` to a harmonic bath.
//!
//! Coordinates are the Pauli matrices in the `{|+>, |->}` basis (index 0 is
//! spin up), followed by the bath positions and momenta.

use num_traits::Zero;

use super::kernels::anticommutator;
use super::layout::CoordinateLayout;
use super::model::ModelEom;
use crate::bath::{sample_wigner, DiscretizedBath, WignerSample};
use crate::error::{Error, Result};
use crate::numerics::GaussianStreams;
use crate::scalar::{Real, C};

const SX: usize = 0;
const SY: usize = 1;
const SZ: usize = 2;

#[derive(Debug, Clone)]
pub struct SpinBoson<T> {
    pub delta: T,
    pub bath: DiscretizedBath<T>,
    layout: CoordinateLayout,
}

impl<T: Real> SpinBoson<T> {
    pub fn new(delta: T, bath: DiscretizedBath<T>) -> Result<Self> {
        if !(delta >= T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("tunnelling frequency must be non-negative, got {delta}"),
            });
        }
        let layout = CoordinateLayout::spin_boson(bath.n_osc());
        Ok(Self { delta, bath, layout })
    }

    /// Spin-up Bloch vector `(B_x, B_y, B_z)` read from a state.
    pub fn bloch(&self, y: &[C<T>]) -> [T; 3] {
        let l = &self.layout;
        [SX, SY, SZ].map(|m| y[l.offset(m, 0, 0)].re)
    }
}

/// Pauli matrices in the `{|+>, |->}` basis, as the three 2x2 subsystem
/// blocks of the initial state.
pub fn sbm_initial_elements<T: Real>() -> [[C<T>; 4]; 3] {
    let o = T::one();
    let z = T::zero();
    [
        [C::new(z, z), C::new(o, z), C::new(o, z), C::new(z, z)],
        [C::new(z, z), C::new(z, -o), C::new(z, o), C::new(z, z)],
        [C::new(o, z), C::new(z, z), C::new(z, z), C::new(-o, z)],
    ]
}

impl<T: Real> ModelEom<T> for SpinBoson<T> {
    fn layout(&self) -> &CoordinateLayout {
        &self.layout
    }

    fn initial_level(&self) -> usize {
        0
    }

    fn sample_bath(&self, streams: &mut GaussianStreams) -> WignerSample<T> {
        sample_wigner(&self.bath, streams, 0)
    }

    fn initial_state(&self, sample: &WignerSample<T>) -> Result<Vec<C<T>>> {
        let l = &self.layout;
        if sample.positions.len() != l.n_oscillators() {
            return Err(Error::LayoutMismatch {
                expected: l.n_oscillators(),
                actual: sample.positions.len(),
            });
        }
        let mut y = vec![C::zero(); l.len()];
        for (m, block) in sbm_initial_elements::<T>().iter().enumerate() {
            y[l.subsystem(m)].copy_from_slice(block);
        }
        for j in 0..l.n_oscillators() {
            for a in 0..2 {
                y[l.position(j).start + 3 * a] = C::new(sample.positions[j], T::zero());
                y[l.momentum(j).start + 3 * a] = C::new(sample.momenta[j], T::zero());
            }
        }
        Ok(y)
    }

    fn derivative(&self, y: &[C<T>], dy: &mut [C<T>]) {
        let l = &self.layout;
        let n = l.n_oscillators();
        let two_delta = T::lit(2.0) * self.delta;

        let mut q = [C::zero(); 4];
        for j in 0..n {
            let c = self.bath.couplings[j];
            for (qe, &r) in q.iter_mut().zip(&y[l.position(j)]) {
                *qe += r * c;
            }
        }

        let sx = &y[l.subsystem(SX)];
        let sy = &y[l.subsystem(SY)];
        let sz = &y[l.subsystem(SZ)];
        let mut anti = [C::zero(); 4];

        anticommutator(2, &q, sy, &mut anti);
        dy[l.subsystem(SX)].copy_from_slice(&anti);

        anticommutator(2, &q, sx, &mut anti);
        for ((d, &z), &a) in dy[l.subsystem(SY)].iter_mut().zip(sz).zip(&anti) {
            *d = z * two_delta - a;
        }

        for (d, &s) in dy[l.subsystem(SZ)].iter_mut().zip(sy) {
            *d = -(s * two_delta);
        }

        let bath = l.bath_start();
        let half = n * 4;
        let (d_pos, d_mom) = dy[bath..].split_at_mut(half);
        let (pos, mom) = y[bath..].split_at(half);
        d_pos.copy_from_slice(mom);
        for j in 0..n {
            let w2 = self.bath.omegas[j] * self.bath.omegas[j];
            let c = self.bath.couplings[j];
            for e in 0..4 {
                d_mom[4 * j + e] = sz[e] * c - pos[4 * j + e] * w2;
            }
        }
    }

    fn observe(&self, y: &[C<T>], dy: &[C<T>], rho: &mut [C<T>], drho: &mut [C<T>]) {
        let b = self.bloch(y);
        let db = self.bloch(dy);
        bloch_to_density(b, T::one(), rho);
        bloch_to_density(db, T::zero(), drho);
    }
}

/// `rho = (trace I + sum_m b_m sigma_m) / 2`, row-major, basis `{|+>, |->}`.
pub(crate) fn bloch_to_density<T: Real>(b: [T; 3], trace: T, out: &mut [C<T>]) {
    let half = T::lit(0.5);
    out[0] = C::new((trace + b[2]) * half, T::zero());
    out[1] = C::new(b[0] * half, -b[1] * half);
    out[2] = C::new(b[0] * half, b[1] * half);
    out[3] = C::new((trace - b[2]) * half, T::zero());
}

/// Derivative of a spin-boson state; the layout must match `n_osc` of the bath.
pub fn sbm_eom<T: Real>(state: &[C<T>], delta: T, bath: &DiscretizedBath<T>) -> Result<Vec<C<T>>> {
    let model = SpinBoson::new(delta, bath.clone())?;
    model.layout.check(state.len())?;
    let mut dy = vec![C::zero(); state.len()];
    model.derivative(state, &mut dy);
    Ok(dy)
}
