use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, TimeGrid};
use crate::scalar::{Real, C};

/// Ensemble-averaged reduced density matrix and its rate on a uniform grid.
///
/// Element `(m, n)` of the density matrix at grid point `k` is the ensemble
/// average of the projector `P_nm`. Standard errors are kept separately for
/// the real (`re`) and imaginary (`im`) parts. Deterministic series (master
/// equations, analytic solutions) carry zero errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSeries<T> {
    pub grid: TimeGrid<T>,
    pub levels: usize,
    pub initial_level: usize,
    pub density: Vec<C<T>>,
    pub density_se: Vec<C<T>>,
    pub rate: Vec<C<T>>,
    pub rate_se: Vec<C<T>>,
    pub n_traj: usize,
    pub n_failed: usize,
    /// Per-batch sums of a Monte Carlo series, empty when fewer than two
    /// batches exist or the series is exact.
    pub batches: Vec<BatchSums<T>>,
}

/// Sums over one contiguous batch of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSums<T> {
    pub n: usize,
    pub density: Vec<C<T>>,
    pub rate: Vec<C<T>>,
}

impl<T: Real> ReducedSeries<T> {
    /// Series without statistical error.
    pub fn exact(
        grid: TimeGrid<T>,
        levels: usize,
        initial_level: usize,
        density: Vec<C<T>>,
        rate: Vec<C<T>>,
    ) -> Result<Self> {
        let expected = grid.n_points() * levels * levels;
        for len in [density.len(), rate.len()] {
            if len != expected {
                return Err(Error::LayoutMismatch { expected, actual: len });
            }
        }
        if initial_level >= levels {
            return Err(Error::IndexOutOfRange {
                index: initial_level,
                dim: levels,
            });
        }
        Ok(Self {
            grid,
            levels,
            initial_level,
            density_se: vec![C::zero(); expected],
            rate_se: vec![C::zero(); expected],
            density,
            rate,
            n_traj: 0,
            n_failed: 0,
            batches: Vec::new(),
        })
    }

    /// Two-level series from a spin-up Bloch vector and its rate per point.
    pub fn from_bloch(grid: TimeGrid<T>, bloch: &[[T; 3]], bloch_rate: &[[T; 3]]) -> Result<Self> {
        let mut density = vec![C::zero(); bloch.len() * 4];
        let mut rate = vec![C::zero(); bloch_rate.len() * 4];
        for (k, b) in bloch.iter().enumerate() {
            super::sbm::bloch_to_density(*b, T::one(), &mut density[4 * k..4 * k + 4]);
        }
        for (k, b) in bloch_rate.iter().enumerate() {
            super::sbm::bloch_to_density(*b, T::zero(), &mut rate[4 * k..4 * k + 4]);
        }
        Self::exact(grid, 2, 0, density, rate)
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    #[inline]
    fn block(&self) -> usize {
        self.levels * self.levels
    }

    #[inline]
    pub fn index(&self, k: usize, m: usize, n: usize) -> usize {
        k * self.block() + m * self.levels + n
    }

    pub fn density_at(&self, k: usize) -> CMatrix<T> {
        let b = self.block();
        CMatrix::from_row_major(self.levels, &self.density[k * b..(k + 1) * b]).expect("block")
    }

    pub fn rate_at(&self, k: usize) -> CMatrix<T> {
        let b = self.block();
        CMatrix::from_row_major(self.levels, &self.rate[k * b..(k + 1) * b]).expect("block")
    }

    pub fn population(&self, k: usize, n: usize) -> T {
        self.density[self.index(k, n, n)].re
    }

    /// Spin-up Bloch vector `(B_x, B_y, B_z)` at point `k`.
    pub fn bloch_at(&self, k: usize) -> [T; 3] {
        bloch_of(self.levels, &self.density, k)
    }

    pub fn bloch_rate_at(&self, k: usize) -> [T; 3] {
        bloch_of(self.levels, &self.rate, k)
    }

    /// Series with batch `b` left out; `None` without batch data.
    pub fn leave_one_out(&self, b: usize) -> Option<Self> {
        let batch = self.batches.get(b)?;
        let total: usize = self.batches.iter().map(|x| x.n).sum();
        let n_all = T::count(total);
        let n_rest = T::count(total - batch.n);
        let shrink = |mean: &[C<T>], sums: &[C<T>]| -> Vec<C<T>> {
            mean.iter().zip(sums).map(|(m, s)| (m * n_all - s) / n_rest).collect()
        };
        Some(Self {
            density: shrink(&self.density, &batch.density),
            rate: shrink(&self.rate, &batch.rate),
            density_se: vec![C::zero(); self.density.len()],
            rate_se: vec![C::zero(); self.rate.len()],
            n_traj: total - batch.n,
            batches: Vec::new(),
            ..*self
        })
    }

    /// Jackknife standard error of a scalar statistic over the batches.
    pub fn jackknife<F>(&self, statistic: F) -> Result<Option<T>>
    where
        F: Fn(&Self) -> Result<T>,
    {
        let nb = self.batches.len();
        if nb < 2 {
            return Ok(None);
        }
        let mut values = Vec::with_capacity(nb);
        for b in 0..nb {
            values.push(statistic(&self.leave_one_out(b).expect("batch"))?);
        }
        let nbf = T::count(nb);
        let mean = values.iter().copied().sum::<T>() / nbf;
        let ss = values.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean));
        Ok(Some((ss * (nbf - T::one()) / nbf).sqrt()))
    }

    /// Largest ratio `|rho_mn - conj(rho_nm)| / (3 * combined error)` over the
    /// whole series; values at or below one pass a 3-sigma Hermiticity check.
    /// Also returns the largest raw deviation.
    pub fn hermiticity_check(&self) -> (T, T) {
        let mut worst_ratio = T::zero();
        let mut worst_abs = T::zero();
        for k in 0..self.n_points() {
            for m in 0..self.levels {
                for n in m..self.levels {
                    let a = self.index(k, m, n);
                    let b = self.index(k, n, m);
                    let dev = (self.density[a] - self.density[b].conj()).norm();
                    let se = combined(self.density_se[a]).hypot(combined(self.density_se[b]));
                    worst_abs = worst_abs.max(dev);
                    let ratio = if se > T::zero() {
                        dev / (T::lit(3.0) * se)
                    } else if dev > T::lit(1e-12) {
                        T::infinity()
                    } else {
                        T::zero()
                    };
                    worst_ratio = worst_ratio.max(ratio);
                }
            }
        }
        (worst_ratio, worst_abs)
    }
}

/// Magnitude of a complex standard error given per component.
#[inline]
pub(crate) fn combined<T: Real>(se: C<T>) -> T {
    se.re.hypot(se.im)
}

fn bloch_of<T: Real>(levels: usize, data: &[C<T>], k: usize) -> [T; 3] {
    assert_eq!(levels, 2, "Bloch vector needs a two-level series");
    let r = &data[4 * k..4 * k + 4];
    let two = T::lit(2.0);
    [two * r[1].re, -two * r[1].im, r[0].re - r[3].re]
}
