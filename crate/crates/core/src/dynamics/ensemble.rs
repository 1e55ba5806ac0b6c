//! Monte Carlo reduction over trajectories.
//!
//! In deterministic mode trajectories are grouped into fixed blocks that are
//! summed in index order and merged in block order, so the result is bitwise
//! reproducible at any worker count. Fast mode lets rayon choose the
//! reduction tree; results then differ between runs only by accumulation
//! rounding.

use log::{info, warn};
use num_traits::Zero;
use rayon::prelude::*;

use super::model::ModelEom;
use super::series::{BatchSums, ReducedSeries};
use super::trajectory::{propagate_trajectory, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::numerics::{GaussianStreams, TimeGrid};
use crate::scalar::{Real, C};

const BLOCK: usize = 8;
const BLOCKS_PER_WAVE: usize = 64;
/// Upper bound on the contiguous trajectory batches kept for jackknife errors.
pub const MAX_BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleOptions {
    pub n_traj: usize,
    pub master_seed: u64,
    pub deterministic: bool,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            n_traj: 10_000,
            master_seed: 0,
            deterministic: true,
            workers: None,
        }
    }
}

#[derive(Debug, Clone)]
struct Accumulator<T> {
    n: usize,
    failed: usize,
    sum: Vec<C<T>>,
    sum_sq: Vec<C<T>>,
    rate_sum: Vec<C<T>>,
    rate_sum_sq: Vec<C<T>>,
}

impl<T: Real> Accumulator<T> {
    fn new(len: usize) -> Self {
        Self {
            n: 0,
            failed: 0,
            sum: vec![C::zero(); len],
            sum_sq: vec![C::zero(); len],
            rate_sum: vec![C::zero(); len],
            rate_sum_sq: vec![C::zero(); len],
        }
    }

    fn add(&mut self, outcome: Result<TrajectoryRecord<T>>) {
        match outcome {
            Ok(rec) => {
                self.n += 1;
                accumulate(&mut self.sum, &mut self.sum_sq, &rec.density);
                accumulate(&mut self.rate_sum, &mut self.rate_sum_sq, &rec.density_rate);
            }
            Err(e) => {
                warn!("trajectory excluded: {e}");
                self.failed += 1;
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.merge_from(&other);
        self
    }

    fn merge_from(&mut self, other: &Self) {
        self.n += other.n;
        self.failed += other.failed;
        for (dst, src) in [
            (&mut self.sum, &other.sum),
            (&mut self.sum_sq, &other.sum_sq),
            (&mut self.rate_sum, &other.rate_sum),
            (&mut self.rate_sum_sq, &other.rate_sum_sq),
        ] {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += *s;
            }
        }
    }
}

/// Sums of values and of squared real/imaginary parts (packed as re/im).
fn accumulate<T: Real>(sum: &mut [C<T>], sum_sq: &mut [C<T>], values: &[C<T>]) {
    for ((s, q), v) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(values) {
        *s += *v;
        *q += C::new(v.re * v.re, v.im * v.im);
    }
}

fn mean_and_error<T: Real>(n: usize, sum: &[C<T>], sum_sq: &[C<T>]) -> (Vec<C<T>>, Vec<C<T>>) {
    let nf = T::count(n);
    let se = |s: T, q: T| -> T {
        if n < 2 {
            return T::zero();
        }
        let mean = s / nf;
        let var = ((q / nf - mean * mean) * nf / (nf - T::one())).max(T::zero());
        (var / nf).sqrt()
    };
    let mean = sum.iter().map(|s| s / nf).collect();
    let err = sum
        .iter()
        .zip(sum_sq)
        .map(|(s, q)| C::new(se(s.re, q.re), se(s.im, q.im)))
        .collect();
    (mean, err)
}

fn run_one<T: Real, M: ModelEom<T> + ?Sized>(
    model: &M,
    grid: &TimeGrid<T>,
    seed: u64,
    index: usize,
) -> Result<TrajectoryRecord<T>> {
    let mut streams = GaussianStreams::new(seed, index as u64);
    let sample = model.sample_bath(&mut streams);
    propagate_trajectory(model, &sample, grid)
}

/// Averages reduced-state contributions and EOM rates over `n_traj`
/// trajectories with thermally sampled bath initial conditions.
///
/// Failed trajectories are excluded and counted; more than one failure per
/// thousand trajectories aborts the run.
pub fn run_ensemble<T: Real, M: ModelEom<T> + ?Sized>(
    model: &M,
    grid: &TimeGrid<T>,
    options: &EnsembleOptions,
) -> Result<ReducedSeries<T>> {
    if options.n_traj == 0 {
        return Err(Error::InvalidParameter {
            name: "n_traj",
            reason: "need at least one trajectory".into(),
        });
    }
    match options.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParameter {
                    name: "workers",
                    reason: e.to_string(),
                })?;
            pool.install(|| reduce(model, grid, options))
        }
        None => reduce(model, grid, options),
    }
}

fn batch_of(block: usize, n_blocks: usize, n_batches: usize) -> usize {
    block * n_batches / n_blocks
}

fn reduce<T: Real, M: ModelEom<T> + ?Sized>(
    model: &M,
    grid: &TimeGrid<T>,
    options: &EnsembleOptions,
) -> Result<ReducedSeries<T>> {
    let levels = model.levels();
    let len = grid.n_points() * levels * levels;
    let n = options.n_traj;
    let seed = options.master_seed;
    let n_blocks = n.div_ceil(BLOCK);
    let n_batches = n_blocks.min(MAX_BATCHES);
    let block_range = |b: usize| b * BLOCK..((b + 1) * BLOCK).min(n);

    let batches: Vec<Accumulator<T>> = if options.deterministic {
        let mut batches: Vec<Accumulator<T>> = (0..n_batches).map(|_| Accumulator::new(len)).collect();
        for wave in (0..n_blocks).step_by(BLOCKS_PER_WAVE) {
            let blocks: Vec<Accumulator<T>> = (wave..(wave + BLOCKS_PER_WAVE).min(n_blocks))
                .into_par_iter()
                .map(|b| {
                    let mut acc = Accumulator::new(len);
                    for i in block_range(b) {
                        acc.add(run_one(model, grid, seed, i));
                    }
                    acc
                })
                .collect();
            for (offset, acc) in blocks.into_iter().enumerate() {
                let k = batch_of(wave + offset, n_blocks, n_batches);
                batches[k].merge_from(&acc);
            }
        }
        batches
    } else {
        (0..n_batches)
            .into_par_iter()
            .map(|k| {
                let first = (0..n_blocks).find(|&b| batch_of(b, n_blocks, n_batches) == k).unwrap_or(n_blocks);
                let last = (first..n_blocks)
                    .find(|&b| batch_of(b, n_blocks, n_batches) != k)
                    .unwrap_or(n_blocks);
                (first * BLOCK..(last * BLOCK).min(n))
                    .into_par_iter()
                    .fold(
                        || Accumulator::new(len),
                        |mut acc, i| {
                            acc.add(run_one(model, grid, seed, i));
                            acc
                        },
                    )
                    .reduce(|| Accumulator::new(len), Accumulator::merge)
            })
            .collect()
    };

    let mut acc = Accumulator::new(len);
    for b in &batches {
        acc.merge_from(b);
    }
    if acc.n == 0 {
        return Err(Error::AllTrajectoriesFailed(n));
    }
    let limit = n / 1000;
    if acc.failed > limit {
        return Err(Error::TooManyFailures {
            failed: acc.failed,
            total: n,
            limit,
        });
    }
    info!("ensemble: {} trajectories, {} excluded", acc.n, acc.failed);

    let (density, density_se) = mean_and_error(acc.n, &acc.sum, &acc.sum_sq);
    let (rate, rate_se) = mean_and_error(acc.n, &acc.rate_sum, &acc.rate_sum_sq);
    let batches = if batches.len() >= 2 && batches.iter().all(|b| b.n > 0) {
        batches
            .into_iter()
            .map(|b| BatchSums {
                n: b.n,
                density: b.sum,
                rate: b.rate_sum,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(ReducedSeries {
        grid: *grid,
        levels,
        initial_level: model.initial_level(),
        density,
        density_se,
        rate,
        rate_se,
        n_traj: acc.n,
        n_failed: acc.failed,
        batches,
    })
}
