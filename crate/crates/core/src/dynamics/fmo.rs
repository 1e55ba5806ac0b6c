//! Frenkel-exciton model of a light-harvesting complex with one independent
//! Debye-Drude bath per chromophore site.
//!
//! Coordinates are the site projectors `P_nm = |n><m|` (all but the last
//! diagonal one, which follows from completeness), then bath positions and
//! momenta ordered site by site. Energies are angular frequencies.

use num_traits::Zero;

use super::kernels::{anticommutator, axpy, times_i};
use super::layout::CoordinateLayout;
use super::model::ModelEom;
use crate::bath::{sample_wigner, DiscretizedBath, WignerSample};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, GaussianStreams};
use crate::scalar::{Real, C};

/// Site energies (diagonal) and excitonic couplings of one subunit of the
/// apo-FMO complex, in cm^-1.
pub const FMO_TABLE_CM: [[f64; 7]; 7] = [
    [12410.0, -87.7, 5.5, -5.9, 6.7, -13.7, -9.9],
    [-87.7, 12530.0, 30.8, 8.2, 0.7, 11.8, 4.3],
    [5.5, 30.8, 12210.0, -53.5, -2.2, -9.6, 6.0],
    [-5.9, 8.2, -53.5, 12320.0, -70.7, -17.0, -63.3],
    [6.7, 0.7, -2.2, -70.7, 12480.0, 81.1, -1.3],
    [-13.7, 11.8, -9.6, -17.0, 81.1, 12630.0, 39.7],
    [-9.9, 4.3, 6.0, -63.3, -1.3, 39.7, 12440.0],
];

/// Uniform shift removed from every site energy. Observables do not depend
/// on it; removing the large common part keeps rounding small.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EnergyOffset<T> {
    None,
    #[default]
    MinSiteEnergy,
    Value(T),
}

/// Site Hamiltonian `V` (row-major, real symmetric) with each diagonal
/// entry raised by its bath's reorganization shift.
///
/// `table` holds site energies on the diagonal and couplings off it, in the
/// same units as the bath frequencies.
pub fn build_fmo_hamiltonian<T: Real>(
    table: &[Vec<T>],
    baths: &[DiscretizedBath<T>],
    offset: EnergyOffset<T>,
) -> Result<Vec<T>> {
    let l = table.len();
    if table.iter().any(|row| row.len() != l) {
        return Err(Error::OverrideShapeMismatch {
            rows: l,
            cols: table.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    if baths.len() != l {
        return Err(Error::InvalidParameter {
            name: "baths",
            reason: format!("{} baths for {l} sites", baths.len()),
        });
    }
    for i in 0..l {
        for j in (i + 1)..l {
            let (a, b) = (table[i][j], table[j][i]);
            let scale = a.abs().max(b.abs()).max(T::one());
            if (a - b).abs() > T::lit(1e-12) * scale {
                return Err(Error::AsymmetricTable { row: i, col: j });
            }
        }
    }
    let shift = match offset {
        EnergyOffset::None => T::zero(),
        EnergyOffset::MinSiteEnergy => (0..l).map(|i| table[i][i]).fold(T::infinity(), T::min),
        EnergyOffset::Value(v) => v,
    };
    let mut v = vec![T::zero(); l * l];
    for i in 0..l {
        for j in 0..l {
            v[i * l + j] = if i == j {
                table[i][i] - shift + baths[i].reorganization_shift()
            } else {
                table[i][j]
            };
        }
    }
    Ok(v)
}

/// Projector matrices `P_nm = |n><m|` for every `(n, m)`, row-major in
/// `(n, m)`; each is an `L x L` block.
pub fn fmo_initial_elements<T: Real>(sites: usize) -> Vec<Vec<C<T>>> {
    let mut out = Vec::with_capacity(sites * sites);
    for n in 0..sites {
        for m in 0..sites {
            let mut block = vec![C::zero(); sites * sites];
            block[n * sites + m] = C::new(T::one(), T::zero());
            out.push(block);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Fmo<T> {
    /// Row-major site Hamiltonian including reorganization shifts.
    pub hamiltonian: Vec<T>,
    pub baths: Vec<DiscretizedBath<T>>,
    /// Site initially excited (zero-based).
    pub initial_site: usize,
    layout: CoordinateLayout,
    per_site: usize,
}

impl<T: Real> Fmo<T> {
    pub fn new(hamiltonian: Vec<T>, baths: Vec<DiscretizedBath<T>>, initial_site: usize) -> Result<Self> {
        let sites = baths.len();
        if sites < 2 || hamiltonian.len() != sites * sites {
            return Err(Error::LayoutMismatch {
                expected: sites * sites,
                actual: hamiltonian.len(),
            });
        }
        if initial_site >= sites {
            return Err(Error::IndexOutOfRange {
                index: initial_site,
                dim: sites,
            });
        }
        let per_site = baths[0].n_osc();
        if baths.iter().any(|b| b.n_osc() != per_site) {
            return Err(Error::InvalidParameter {
                name: "baths",
                reason: "every site needs the same number of modes".into(),
            });
        }
        Ok(Self {
            hamiltonian,
            baths,
            initial_site,
            layout: CoordinateLayout::exciton(sites, per_site),
            per_site,
        })
    }

    pub fn sites(&self) -> usize {
        self.baths.len()
    }

    /// Index of `P_nm` among the stored coordinates, `None` for the implied
    /// last diagonal projector.
    #[inline]
    fn stored(&self, n: usize, m: usize) -> Option<usize> {
        let l = self.sites();
        let idx = n * l + m;
        (idx < l * l - 1).then_some(idx)
    }

    /// Implied last diagonal projector, `I - sum_{n < L-1} P_nn`.
    fn last_projector(&self, y: &[C<T>]) -> Vec<C<T>> {
        let l = self.sites();
        let mut out = vec![C::zero(); l * l];
        for a in 0..l {
            out[a * l + a] = C::new(T::one(), T::zero());
        }
        for n in 0..l - 1 {
            let block = &y[self.layout.subsystem(n * l + n)];
            for (o, &p) in out.iter_mut().zip(block) {
                *o -= p;
            }
        }
        out
    }

    /// `sum_j C_{n,j} R_{n,j}` for every site.
    fn coupled_positions(&self, y: &[C<T>]) -> Vec<C<T>> {
        let l = self.sites();
        let b = l * l;
        let mut q = vec![C::zero(); l * b];
        for n in 0..l {
            let qn = &mut q[n * b..(n + 1) * b];
            for j in 0..self.per_site {
                let osc = n * self.per_site + j;
                axpy(qn, self.baths[n].couplings[j], &y[self.layout.position(osc)]);
            }
        }
        q
    }

    /// Rate of `P_nm` from the projector equation for any `(n, m)`, including
    /// the implied projector.
    pub fn projector_rate(&self, y: &[C<T>], n: usize, m: usize) -> CMatrix<T> {
        let l = self.sites();
        let last = self.last_projector(y);
        let q = self.coupled_positions(y);
        let mut out = vec![C::zero(); l * l];
        let mut scratch = vec![C::zero(); l * l];
        self.projector_rate_into(y, &last, &q, n, m, &mut out, &mut scratch);
        CMatrix::from_row_major(l, &out).expect("block size")
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn projector_rate_into(
        &self,
        y: &[C<T>],
        last: &[C<T>],
        q: &[C<T>],
        n: usize,
        m: usize,
        out: &mut [C<T>],
        scratch: &mut [C<T>],
    ) {
        let l = self.sites();
        let b = l * l;
        let v = &self.hamiltonian;
        let proj = |a: usize, c: usize| -> &[C<T>] {
            match self.stored(a, c) {
                Some(s) => &y[self.layout.subsystem(s)],
                None => last,
            }
        };

        // sum_l V_ln P_lm - sum_k V_mk P_nk
        scratch.fill(C::zero());
        for k in 0..l {
            let vkn = v[k * l + n];
            if vkn != T::zero() {
                axpy(scratch, vkn, proj(k, m));
            }
            let vmk = v[m * l + k];
            if vmk != T::zero() {
                axpy(scratch, -vmk, proj(n, k));
            }
        }
        for (o, &s) in out.iter_mut().zip(scratch.iter()) {
            *o = times_i(s, T::one());
        }

        if n != m {
            // -(i/2) {Q_n - Q_m, P_nm}
            let mut diff = [C::zero(); 64];
            let diff = &mut diff[..b];
            for ((d, &qn), &qm) in diff.iter_mut().zip(&q[n * b..(n + 1) * b]).zip(&q[m * b..(m + 1) * b]) {
                *d = qn - qm;
            }
            anticommutator(l, diff, proj(n, m), scratch);
            let h = T::lit(-0.5);
            for (o, &s) in out.iter_mut().zip(scratch.iter()) {
                *o += times_i(s, h);
            }
        }
    }
}

impl<T: Real> ModelEom<T> for Fmo<T> {
    fn layout(&self) -> &CoordinateLayout {
        &self.layout
    }

    fn initial_level(&self) -> usize {
        self.initial_site
    }

    fn sample_bath(&self, streams: &mut GaussianStreams) -> WignerSample<T> {
        let mut positions = Vec::with_capacity(self.layout.n_oscillators());
        let mut momenta = Vec::with_capacity(self.layout.n_oscillators());
        for (n, bath) in self.baths.iter().enumerate() {
            let s = sample_wigner(bath, streams, n * self.per_site);
            positions.extend(s.positions);
            momenta.extend(s.momenta);
        }
        WignerSample { positions, momenta }
    }

    fn initial_state(&self, sample: &WignerSample<T>) -> Result<Vec<C<T>>> {
        let lay = &self.layout;
        if sample.positions.len() != lay.n_oscillators() {
            return Err(Error::LayoutMismatch {
                expected: lay.n_oscillators(),
                actual: sample.positions.len(),
            });
        }
        let l = self.sites();
        let mut y = vec![C::zero(); lay.len()];
        for (idx, block) in fmo_initial_elements::<T>(l).into_iter().enumerate().take(l * l - 1) {
            y[lay.subsystem(idx)].copy_from_slice(&block);
        }
        for k in 0..lay.n_oscillators() {
            for a in 0..l {
                y[lay.position(k).start + a * (l + 1)] = C::new(sample.positions[k], T::zero());
                y[lay.momentum(k).start + a * (l + 1)] = C::new(sample.momenta[k], T::zero());
            }
        }
        Ok(y)
    }

    fn derivative(&self, y: &[C<T>], dy: &mut [C<T>]) {
        let lay = &self.layout;
        let l = self.sites();
        let b = l * l;
        let last = self.last_projector(y);
        let q = self.coupled_positions(y);
        let mut scratch = vec![C::zero(); b];
        for n in 0..l {
            for m in 0..l {
                if let Some(s) = self.stored(n, m) {
                    let out = &mut dy[lay.subsystem(s)];
                    self.projector_rate_into(y, &last, &q, n, m, out, &mut scratch);
                }
            }
        }

        let start = lay.bath_start();
        let half = lay.n_oscillators() * b;
        let (d_pos, d_mom) = dy[start..].split_at_mut(half);
        let (pos, mom) = y[start..].split_at(half);
        d_pos.copy_from_slice(mom);
        for n in 0..l {
            let pnn: &[C<T>] = match self.stored(n, n) {
                Some(s) => &y[lay.subsystem(s)],
                None => &last,
            };
            let bath = &self.baths[n];
            for j in 0..self.per_site {
                let k = n * self.per_site + j;
                let w2 = bath.omegas[j] * bath.omegas[j];
                let c = bath.couplings[j];
                let r = &pos[k * b..(k + 1) * b];
                let out = &mut d_mom[k * b..(k + 1) * b];
                for e in 0..b {
                    out[e] = pnn[e] * c - r[e] * w2;
                }
            }
        }
    }

    fn observe(&self, y: &[C<T>], dy: &[C<T>], rho: &mut [C<T>], drho: &mut [C<T>]) {
        let l = self.sites();
        let lay = &self.layout;
        let a = self.initial_site * (l + 1);
        let mut trace = C::zero();
        let mut dtrace = C::zero();
        for n in 0..l {
            for m in 0..l {
                if let Some(s) = self.stored(n, m) {
                    let (p, dp) = (y[lay.subsystem(s).start + a], dy[lay.subsystem(s).start + a]);
                    // <P_nm> is the (m, n) element of the density matrix
                    rho[m * l + n] = p;
                    drho[m * l + n] = dp;
                    if n == m {
                        trace += p;
                        dtrace += dp;
                    }
                }
            }
        }
        let d = (l - 1) * (l + 1);
        rho[d] = C::new(T::one(), T::zero()) - trace;
        drho[d] = -dtrace;
    }
}

/// Derivative of an exciton state.
pub fn fmo_eom<T: Real>(state: &[C<T>], model: &Fmo<T>) -> Result<Vec<C<T>>> {
    model.layout.check(state.len())?;
    let mut dy = vec![C::zero(); state.len()];
    model.derivative(state, &mut dy);
    Ok(dy)
}
