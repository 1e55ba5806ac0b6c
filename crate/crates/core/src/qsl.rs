//! Quantum speed limit times from reduced-dynamics series.
//!
//! For a pure initial state `|n><n|` the squared sine of the Bures angle is
//! `1 - F` with `F = <P_nn(tau)>`, so
//!
//! ```text
//! tau_p = (1 - F) / E_p,    E_p = (1/tau) int_0^tau ||d rho / dt||_p dt
//! ```
//!
//! and `tau_QSL = max_p tau_p = tau_inf`.

use crate::dynamics::ReducedSeries;
use crate::error::{Error, Result};
use crate::numerics::{schatten_norm, simpson_integrate, SchattenP};
use crate::scalar::Real;

/// QSL times at one evolution time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslReport<T> {
    pub tau: T,
    pub fidelity: T,
    pub fidelity_se: T,
    /// Time-averaged rate norms `E_p`, ordered `[p=1, p=2, p=inf]`.
    pub denominators: [T; 3],
    /// `[tau_1, tau_2, tau_inf]`.
    pub tau_p: [T; 3],
    pub tau2_se: T,
    /// `tau_QSL <= tau` holds.
    pub bound_ok: bool,
    /// The bound is violated, but by no more than three standard errors.
    pub noise_dominated: bool,
}

impl<T: Real> QslReport<T> {
    pub fn tau1(&self) -> T {
        self.tau_p[0]
    }

    pub fn tau2(&self) -> T {
        self.tau_p[1]
    }

    pub fn tau_inf(&self) -> T {
        self.tau_p[2]
    }

    pub fn tau_qsl(&self) -> T {
        self.tau_p[2]
    }

    /// Standard error of `tau_inf`, scaled from that of `tau_2`.
    pub fn tau_inf_se(&self) -> T {
        if self.tau_p[1] > T::zero() {
            self.tau2_se * self.tau_p[2] / self.tau_p[1]
        } else {
            T::zero()
        }
    }
}

/// Value of `tau_2` with its ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tau2<T> {
    pub value: T,
    pub fidelity: T,
    pub denominator: T,
    pub se: T,
}

fn check_level<T: Real>(series: &ReducedSeries<T>, n: usize) -> Result<()> {
    if n >= series.levels {
        return Err(Error::IndexOutOfRange {
            index: n,
            dim: series.levels,
        });
    }
    Ok(())
}

/// `F = <P_nn(tau)>` for the pure initial state `|n><n|`.
pub fn fidelity_pure<T: Real>(series: &ReducedSeries<T>, n: usize, tau: T) -> Result<T> {
    check_level(series, n)?;
    let k = series.grid.index_of(tau)?;
    Ok(series.population(k, n))
}

/// Hilbert-Schmidt norm of `d rho / dt` at grid point `k`,
/// `sqrt(sum_nm |d<P_nm>/dt|^2)`.
pub fn hs_norm_rate<T: Real>(series: &ReducedSeries<T>, k: usize) -> T {
    let b = series.levels * series.levels;
    series.rate[k * b..(k + 1) * b]
        .iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// Two-level form of [`hs_norm_rate`], `sqrt(sum_m (dB_m/dt)^2 / 2)`.
pub fn hs_norm_rate_bloch<T: Real>(series: &ReducedSeries<T>, k: usize) -> T {
    let db = series.bloch_rate_at(k);
    (db.iter().fold(T::zero(), |acc, &x| acc + x * x) * T::lit(0.5)).sqrt()
}

/// Linearized standard error of [`hs_norm_rate`] at point `k`.
fn hs_norm_rate_se<T: Real>(series: &ReducedSeries<T>, k: usize, norm: T) -> T {
    if norm <= T::zero() {
        return T::zero();
    }
    let b = series.levels * series.levels;
    let var = series.rate[k * b..(k + 1) * b]
        .iter()
        .zip(&series.rate_se[k * b..(k + 1) * b])
        .fold(T::zero(), |acc, (z, s)| {
            acc + z.re * z.re * s.re * s.re + z.im * z.im * s.im * s.im
        });
    var.sqrt() / norm
}

/// `(1/tau) int_0^tau f dt` over grid points `0..=k_end`.
fn time_average<T: Real>(samples: &[T], dt: T) -> Result<T> {
    let k_end = samples.len() - 1;
    let integral = match k_end {
        0 => return Ok(samples[0]),
        1 => (samples[0] + samples[1]) * dt * T::lit(0.5),
        _ => simpson_integrate(samples, dt)?,
    };
    Ok(integral / (dt * T::count(k_end)))
}

fn ratio<T: Real>(numerator: T, denominator: T, k_end: usize) -> Result<T> {
    if k_end == 0 {
        return Ok(T::zero());
    }
    if !(denominator > T::zero()) {
        return Err(Error::ZeroDenominator);
    }
    Ok(numerator / denominator)
}

/// `tau_2 = (1 - F) / ((1/tau) int_0^tau sqrt(Tr (d rho/dt)^2) dt)`.
///
/// For Monte Carlo series with batch data the standard error is the
/// jackknife over trajectory batches, which keeps the correlations between
/// the fidelity and the rates at all times. Otherwise the fidelity error is
/// added in quadrature to a denominator error taken as the time average of
/// the pointwise rate errors.
pub fn qsl_tau2<T: Real>(series: &ReducedSeries<T>, tau: T) -> Result<Tau2<T>> {
    let n = series.initial_level;
    check_level(series, n)?;
    let k_end = series.grid.index_of(tau)?;
    let fidelity = series.population(k_end, n);
    let rates: Vec<T> = (0..=k_end).map(|k| hs_norm_rate(series, k)).collect();
    let denominator = time_average(&rates, series.grid.dt)?;
    let numerator = T::one() - fidelity;
    let value = ratio(numerator, denominator, k_end)?;
    if k_end == 0 {
        return Ok(Tau2 {
            value,
            fidelity,
            denominator,
            se: T::zero(),
        });
    }
    let jackknife = series.jackknife(|s| {
        let rates: Vec<T> = (0..=k_end).map(|k| hs_norm_rate(s, k)).collect();
        ratio(T::one() - s.population(k_end, n), time_average(&rates, s.grid.dt)?, k_end)
    })?;
    let se = match jackknife {
        Some(se) => se,
        None => {
            let fidelity_se = series.density_se[series.index(k_end, n, n)].re;
            let rate_se: Vec<T> = (0..=k_end).map(|k| hs_norm_rate_se(series, k, rates[k])).collect();
            let denominator_se = time_average(&rate_se, series.grid.dt)?;
            (fidelity_se / denominator).hypot(numerator * denominator_se / (denominator * denominator))
        }
    };
    Ok(Tau2 {
        value,
        fidelity,
        denominator,
        se,
    })
}

/// `tau_2` of a two-level series through the Bloch-vector forms
/// `F = (1 + B_z)/2` and `sqrt(sum_m (dB_m/dt)^2 / 2)`.
pub fn qsl_tau2_bloch<T: Real>(series: &ReducedSeries<T>, tau: T) -> Result<T> {
    if series.levels != 2 {
        return Err(Error::LayoutMismatch {
            expected: 2,
            actual: series.levels,
        });
    }
    let k_end = series.grid.index_of(tau)?;
    let fidelity = (T::one() + series.bloch_at(k_end)[2]) * T::lit(0.5);
    let rates: Vec<T> = (0..=k_end).map(|k| hs_norm_rate_bloch(series, k)).collect();
    ratio(T::one() - fidelity, time_average(&rates, series.grid.dt)?, k_end)
}

/// `tau_p` with the Schatten-p norm of the full `d rho / dt` matrix.
pub fn qsl_taup<T: Real>(series: &ReducedSeries<T>, tau: T, p: SchattenP) -> Result<T> {
    let n = series.initial_level;
    let k_end = series.grid.index_of(tau)?;
    let fidelity = series.population(k_end, n);
    let norms: Vec<T> = (0..=k_end).map(|k| schatten_norm(&series.rate_at(k), p)).collect();
    ratio(T::one() - fidelity, time_average(&norms, series.grid.dt)?, k_end)
}

/// Full report at evolution time `tau`.
pub fn qsl_report<T: Real>(series: &ReducedSeries<T>, tau: T) -> Result<QslReport<T>> {
    let tau2 = qsl_tau2(series, tau)?;
    let k_end = series.grid.index_of(tau)?;
    let n = series.initial_level;
    let mut denominators = [T::zero(); 3];
    let mut tau_p = [T::zero(); 3];
    for (i, p) in SchattenP::ALL.into_iter().enumerate() {
        let norms: Vec<T> = (0..=k_end).map(|k| schatten_norm(&series.rate_at(k), p)).collect();
        denominators[i] = time_average(&norms, series.grid.dt)?;
        tau_p[i] = ratio(T::one() - tau2.fidelity, denominators[i], k_end)?;
    }
    let tau_eval = series.grid.time(k_end) - series.grid.t0;
    let tau_qsl = tau_p[2];
    let tau_inf_se = if tau_p[1] > T::zero() {
        tau2.se * tau_qsl / tau_p[1]
    } else {
        T::zero()
    };
    let slack = tau_eval * T::lit(1e-12);
    let bound_ok = tau_qsl <= tau_eval + slack;
    let noise_dominated = !bound_ok && tau_qsl - tau_eval <= T::lit(3.0) * tau_inf_se;
    Ok(QslReport {
        tau: tau_eval,
        fidelity: tau2.fidelity,
        fidelity_se: series.density_se[series.index(k_end, n, n)].re,
        denominators,
        tau_p,
        tau2_se: tau2.se,
        bound_ok,
        noise_dominated,
    })
}

/// Isolated two-level QSL, `(1 - cos 2 delta tau) / (2 sqrt(2) delta)`.
pub fn iso_qsl<T: Real>(delta: T, tau: T) -> T {
    if delta == T::zero() {
        return T::zero();
    }
    (T::one() - (T::lit(2.0) * delta * tau).cos()) / (T::lit(2.0) * T::SQRT_2() * delta)
}
