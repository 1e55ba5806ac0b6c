//! Second-order (Born) Bloch-Redfield propagators for the spin-boson Bloch
//! vector, with and without the Markov approximation.
//!
//! Both solvers run on a propagation grid of step `h` and read bath kernels
//! from a table of spacing `h / 2`, so every RK4 stage time lands on a table
//! point.

use crate::bath::SpectralDensity;
use crate::error::{Error, Result};
use crate::numerics::{cumulative_trapezoid, Rk4, TimeGrid};
use crate::scalar::Real;
use crate::dynamics::ReducedSeries;

/// Upper frequency limit of the kernel quadrature, in units of omega_c.
pub const OMEGA_UPPER_FACTOR: f64 = 40.0;
/// Convergence threshold of the kernels under frequency-grid doubling.
pub const KERNEL_TOL: f64 = 1e-6;
const INITIAL_N_OMEGA: usize = 1024;
const MAX_N_OMEGA: usize = 1 << 21;
/// Exact phase re-evaluation interval of the rotation recurrence.
const RESYNC: usize = 128;

/// Bath correlation kernels `M1(t)` and `M2(t)` on a uniform table.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<T> {
    /// Table spacing (half the propagation step).
    pub dt: T,
    pub m1: Vec<T>,
    pub m2: Vec<T>,
    /// Frequency intervals used by the converged quadrature.
    pub n_omega: usize,
    pub omega_upper: T,
}

impl<T: Real> KernelTable<T> {
    pub fn len(&self) -> usize {
        self.m1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m1.is_empty()
    }

    pub fn t_max(&self) -> T {
        self.dt * T::count(self.len().saturating_sub(1))
    }

    pub fn time(&self, i: usize) -> T {
        self.dt * T::count(i)
    }

    /// Checks that the table serves a propagation grid of `grid`.
    fn check_grid(&self, grid: &TimeGrid<T>) -> Result<()> {
        let half = grid.dt * T::lit(0.5);
        if (self.dt - half).abs() > T::lit(1e-9) * half {
            return Err(Error::InvalidParameter {
                name: "kernels",
                reason: format!("table spacing {} does not match half step {}", self.dt, half),
            });
        }
        let need = 2 * grid.n_steps + 1;
        if self.len() < need {
            return Err(Error::KernelRangeExceeded {
                covered: self.t_max().to_f64_lossy(),
                requested: (grid.t_end() - grid.t0).to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// `M1 + i M2 = (4/pi) int dw J(w) [coth(beta w / 2) cos(w t) + i sin(w t)]`
/// tabulated at spacing `grid.dt / 2` over the whole grid.
///
/// Composite Simpson in frequency on `[0, 40 omega_c]`; the frequency grid is
/// doubled until the table changes by less than `1e-6` (relative to its
/// largest entry when that exceeds one).
pub fn compute_kernels<T: Real>(j: &SpectralDensity<T>, beta: T, grid: &TimeGrid<T>) -> Result<KernelTable<T>> {
    j.validate()?;
    let omega_c = match *j {
        SpectralDensity::OhmicExponential { omega_c, .. } => omega_c,
        SpectralDensity::DebyeDrude { .. } => {
            return Err(Error::InvalidParameter {
                name: "spectral_density",
                reason: "kernel quadrature is implemented for the Ohmic-exponential law".into(),
            })
        }
    };
    if !(beta > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be positive, got {beta}"),
        });
    }
    let dt = grid.dt * T::lit(0.5);
    let n_t = 2 * grid.n_steps + 1;
    let omega_upper = omega_c * T::lit(OMEGA_UPPER_FACTOR);

    let mut n_omega = INITIAL_N_OMEGA;
    let mut prev = kernel_quadrature(j, beta, dt, n_t, omega_upper, n_omega);
    loop {
        n_omega *= 2;
        let next = kernel_quadrature(j, beta, dt, n_t, omega_upper, n_omega);
        let scale = next.0.iter().chain(&next.1).fold(T::one(), |a, &b| a.max(b.abs()));
        let change = prev
            .0
            .iter()
            .zip(&next.0)
            .chain(prev.1.iter().zip(&next.1))
            .fold(T::zero(), |a, (&x, &y)| a.max((x - y).abs()));
        if change <= T::lit(KERNEL_TOL) * scale {
            return Ok(KernelTable {
                dt,
                m1: next.0,
                m2: next.1,
                n_omega,
                omega_upper,
            });
        }
        if n_omega >= MAX_N_OMEGA {
            return Err(Error::QuadratureNotConverged {
                change: change.to_f64_lossy(),
                n_omega,
            });
        }
        prev = next;
    }
}

fn kernel_quadrature<T: Real>(
    j: &SpectralDensity<T>,
    beta: T,
    dt: T,
    n_t: usize,
    omega_upper: T,
    n_omega: usize,
) -> (Vec<T>, Vec<T>) {
    let mut m1 = vec![T::zero(); n_t];
    let mut m2 = vec![T::zero(); n_t];
    let d_omega = omega_upper / T::count(n_omega);
    let prefactor = T::lit(4.0) / T::PI() * d_omega / T::lit(3.0);
    for i in 0..=n_omega {
        let simpson = if i == 0 || i == n_omega {
            T::one()
        } else if i % 2 == 1 {
            T::lit(4.0)
        } else {
            T::lit(2.0)
        };
        let w = d_omega * T::count(i);
        let (even, odd) = if i == 0 {
            // J(w) coth(beta w / 2) -> 2 J'(0) / beta
            let limit = if beta.is_finite() {
                T::lit(2.0) * j.slope_at_zero() / beta
            } else {
                T::zero()
            };
            (limit, T::zero())
        } else {
            let jw = j.eval(w);
            let coth = if beta.is_finite() {
                T::one() / (beta * w * T::lit(0.5)).tanh()
            } else {
                T::one()
            };
            (jw * coth, jw)
        };
        let (a, b) = (even * simpson * prefactor, odd * simpson * prefactor);
        if a == T::zero() && b == T::zero() {
            continue;
        }
        let (s1, c1) = (w * dt).sin_cos();
        let (mut s, mut c) = (T::zero(), T::one());
        for k in 0..n_t {
            if k % RESYNC == 0 && k > 0 {
                let exact = (w * dt * T::count(k)).sin_cos();
                s = exact.0;
                c = exact.1;
            }
            m1[k] += a * c;
            m2[k] += b * s;
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
    }
    (m1, m2)
}

/// `M2(t)` of the Ohmic-exponential law in closed form,
/// `4 xi omega_c^3 t / (1 + omega_c^2 t^2)^2`.
pub fn ohmic_m2_closed_form<T: Real>(xi: T, omega_c: T, t: T) -> T {
    let x = omega_c * t;
    let d = T::one() + x * x;
    T::lit(4.0) * xi * omega_c * omega_c * omega_c * t / (d * d)
}

/// Spin-up Bloch vector and its rate on a propagation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochSeries<T> {
    pub grid: TimeGrid<T>,
    pub b: Vec<[T; 3]>,
    pub db: Vec<[T; 3]>,
}

impl<T: Real> BlochSeries<T> {
    pub fn to_reduced(&self) -> Result<ReducedSeries<T>> {
        ReducedSeries::from_bloch(self.grid, &self.b, &self.db)
    }

    pub fn polarization(&self, k: usize) -> T {
        self.b[k][2]
    }
}

/// Default initial condition: spin up.
pub fn spin_up<T: Real>() -> [T; 3] {
    [T::zero(), T::zero(), T::one()]
}

struct NonMarkovKernels<T> {
    /// Running integral of Gamma_x.
    cum_x: Vec<T>,
    xx: Vec<T>,
    yy: Vec<T>,
}

/// Integro-differential Bloch-Redfield equations with memory:
///
/// ```text
/// dBx/dt = -int_0^t Gx(s) ds - int_0^t Gxx(s) Bx(t - s) ds
/// dBy/dt = 2 delta Bz - int_0^t Gyy(s) By(t - s) ds
/// dBz/dt = -2 delta By
/// ```
///
/// with `Gx = -sin(2 delta s) M2`, `Gxx = cos(2 delta s) M1`, `Gyy = M1`.
/// History convolutions use the trapezoid rule on the stored grid plus the
/// partial interval up to the current RK4 stage.
pub fn nm_bre_propagate<T: Real>(
    delta: T,
    kernels: &KernelTable<T>,
    grid: &TimeGrid<T>,
    b0: [T; 3],
) -> Result<BlochSeries<T>> {
    kernels.check_grid(grid)?;
    let two_delta = T::lit(2.0) * delta;
    let n_table = 2 * grid.n_steps + 1;
    let phase = |i: usize| (two_delta * kernels.time(i)).sin_cos();
    let gx: Vec<T> = (0..n_table).map(|i| -phase(i).0 * kernels.m2[i]).collect();
    let k = NonMarkovKernels {
        cum_x: cumulative_trapezoid(&gx, kernels.dt),
        xx: (0..n_table).map(|i| phase(i).1 * kernels.m1[i]).collect(),
        yy: kernels.m1[..n_table].to_vec(),
    };

    let h = grid.dt;
    let mut history: Vec<[T; 3]> = Vec::with_capacity(grid.n_points());
    let mut rates: Vec<[T; 3]> = Vec::with_capacity(grid.n_points());
    let mut y = b0.to_vec();
    let mut rk4 = Rk4::new::<T>(3);
    history.push(b0);

    let rhs_at = |history: &[[T; 3]], p: usize, y: &[T], dy: &mut [T]| {
        // stage at half index p = 2n + {0, 1, 2}
        let n = history.len() - 1;
        let c_width = h * T::lit(0.5) * T::count(p - 2 * n);
        let conv = |kern: &[T], comp: usize| -> T {
            let mut acc = T::zero();
            for j in 0..n {
                acc += kern[p - 2 * j] * history[j][comp] + kern[p - 2 * j - 2] * history[j + 1][comp];
            }
            acc = acc * h * T::lit(0.5);
            acc + (kern[p - 2 * n] * history[n][comp] + kern[0] * y[comp]) * c_width * T::lit(0.5)
        };
        dy[0] = -k.cum_x[p] - conv(&k.xx, 0);
        dy[1] = two_delta * y[2] - conv(&k.yy, 1);
        dy[2] = -two_delta * y[1];
    };

    for step in 0..grid.n_steps {
        let t_n = grid.time(step);
        let mut rhs = |t: T, s: &[T], ds: &mut [T]| {
            let p = ((t - grid.t0) / (h * T::lit(0.5))).round().to_usize().expect("stage index");
            rhs_at(&history, p, s, ds);
        };
        rk4.step(&mut rhs, &mut y, t_n, h)?;
        let k1 = rk4.initial_slope();
        rates.push([k1[0], k1[1], k1[2]]);
        history.push([y[0], y[1], y[2]]);
    }
    let mut last = [T::zero(); 3];
    let hist_prev = &history[..history.len()];
    // final point: the stage coincides with the newest stored value
    rhs_at(hist_prev, 2 * grid.n_steps, &y, &mut last);
    rates.push(last);
    Ok(BlochSeries {
        grid: *grid,
        b: history,
        db: rates,
    })
}

/// Time-local (Markovian) Bloch-Redfield equations:
///
/// ```text
/// dBx/dt = -Gx(t) - Gxx(t) Bx
/// dBy/dt = 2 delta Bz - Gyy(t) By - Gyz(t) Bz
/// dBz/dt = -2 delta By
/// ```
///
/// with the coefficients running integrals of the kernels against
/// `sin(2 delta t)` and `cos(2 delta t)`.
pub fn m_bre_propagate<T: Real>(
    delta: T,
    kernels: &KernelTable<T>,
    grid: &TimeGrid<T>,
    b0: [T; 3],
) -> Result<BlochSeries<T>> {
    kernels.check_grid(grid)?;
    let coeffs = markov_coefficients(delta, kernels, 2 * grid.n_steps + 1);
    let two_delta = T::lit(2.0) * delta;
    let h = grid.dt;
    let rhs_at = |p: usize, y: &[T], dy: &mut [T]| {
        dy[0] = -coeffs.x[p] - coeffs.xx[p] * y[0];
        dy[1] = two_delta * y[2] - coeffs.xx[p] * y[1] - coeffs.yz[p] * y[2];
        dy[2] = -two_delta * y[1];
    };
    let mut rhs = |t: T, s: &[T], ds: &mut [T]| {
        let p = ((t - grid.t0) / (h * T::lit(0.5))).round().to_usize().expect("stage index");
        rhs_at(p, s, ds);
    };

    let mut y = b0.to_vec();
    let mut b = Vec::with_capacity(grid.n_points());
    let mut db = Vec::with_capacity(grid.n_points());
    let mut rk4 = Rk4::new::<T>(3);
    b.push(b0);
    for step in 0..grid.n_steps {
        rk4.step(&mut rhs, &mut y, grid.time(step), h)?;
        let k1 = rk4.initial_slope();
        db.push([k1[0], k1[1], k1[2]]);
        b.push([y[0], y[1], y[2]]);
    }
    let mut last = [T::zero(); 3];
    rhs_at(2 * grid.n_steps, &y, &mut last);
    db.push(last);
    Ok(BlochSeries { grid: *grid, b, db })
}

/// Markovian coefficients on the kernel table: `(Gx, Gxx = Gyy, Gyz)`.
pub struct MarkovCoefficients<T> {
    pub x: Vec<T>,
    pub xx: Vec<T>,
    pub yz: Vec<T>,
}

pub fn markov_coefficients<T: Real>(delta: T, kernels: &KernelTable<T>, n: usize) -> MarkovCoefficients<T> {
    let two_delta = T::lit(2.0) * delta;
    let sc: Vec<(T, T)> = (0..n).map(|i| (two_delta * kernels.time(i)).sin_cos()).collect();
    let neg = |v: Vec<T>| v.into_iter().map(|x| -x).collect::<Vec<T>>();
    let sin_m2: Vec<T> = (0..n).map(|i| sc[i].0 * kernels.m2[i]).collect();
    let cos_m1: Vec<T> = (0..n).map(|i| sc[i].1 * kernels.m1[i]).collect();
    let sin_m1: Vec<T> = (0..n).map(|i| sc[i].0 * kernels.m1[i]).collect();
    MarkovCoefficients {
        x: neg(cumulative_trapezoid(&sin_m2, kernels.dt)),
        xx: cumulative_trapezoid(&cos_m1, kernels.dt),
        yz: neg(cumulative_trapezoid(&sin_m1, kernels.dt)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ohmic(xi: f64) -> SpectralDensity<f64> {
        SpectralDensity::OhmicExponential { xi, omega_c: 1.0 }
    }

    #[test]
    fn m2_matches_closed_form() {
        let grid = TimeGrid::spanning(0.05, 4.0).unwrap();
        let k = compute_kernels(&ohmic(0.1), 1.0, &grid).unwrap();
        assert_eq!(k.m2[0], 0.0);
        for i in 0..k.len() {
            let exact = ohmic_m2_closed_form(0.1, 1.0, k.time(i));
            assert!((k.m2[i] - exact).abs() < 2e-6, "t={} {} vs {}", k.time(i), k.m2[i], exact);
        }
        // t = 1 -> 0.1
        let i1 = 40;
        assert!((k.time(i1) - 1.0).abs() < 1e-12);
        assert!((k.m2[i1] - 0.1).abs() < 1e-6);
    }

    #[test]
    fn high_temperature_m1_at_zero() {
        let grid = TimeGrid::spanning(0.1, 1.0).unwrap();
        let temperature = 200.0;
        let k = compute_kernels(&ohmic(0.05), 1.0 / temperature, &grid).unwrap();
        let expected = 4.0 * 0.05 * temperature;
        // coth(x) = 1/x + x/3 - ..., next order is relative (omega_c / T)^2 / 6
        assert!((k.m1[0] - expected).abs() / expected < 1e-4, "{} vs {}", k.m1[0], expected);
    }

    #[test]
    fn decoupled_limit_is_bloch_oscillation() {
        let grid = TimeGrid::spanning(0.01, 10.0).unwrap();
        let k = compute_kernels(&ohmic(0.0), 1.0, &grid).unwrap();
        for s in [
            nm_bre_propagate(0.2, &k, &grid, spin_up()).unwrap(),
            m_bre_propagate(0.2, &k, &grid, spin_up()).unwrap(),
        ] {
            for i in 0..grid.n_points() {
                let t = grid.time(i);
                assert!((s.b[i][2] - (0.4 * t).cos()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn initial_rate_of_polarization_vanishes() {
        let grid = TimeGrid::spanning(0.02, 2.0).unwrap();
        let k = compute_kernels(&ohmic(0.5), 1.0, &grid).unwrap();
        let s = nm_bre_propagate(0.2, &k, &grid, spin_up()).unwrap();
        assert_eq!(s.db[0][2], 0.0);
        let c = markov_coefficients(0.2, &k, 3);
        assert_eq!((c.x[0], c.xx[0], c.yz[0]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn short_table_is_rejected() {
        let short = TimeGrid::spanning(0.02, 1.0).unwrap();
        let long = TimeGrid::spanning(0.02, 2.0).unwrap();
        let k = compute_kernels(&ohmic(0.1), 1.0, &short).unwrap();
        assert!(matches!(
            nm_bre_propagate(0.2, &k, &long, spin_up()),
            Err(Error::KernelRangeExceeded { .. })
        ));
    }

    #[test]
    fn debye_kernels_rejected() {
        let grid = TimeGrid::spanning(0.1, 1.0).unwrap();
        let j = SpectralDensity::DebyeDrude { lambda: 1.0, tau_c: 1.0 };
        assert!(compute_kernels(&j, 1.0, &grid).is_err());
    }
}
