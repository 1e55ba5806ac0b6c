//! Harmonic baths: spectral-density laws, their finite-mode discretizations
//! and thermal Wigner sampling of initial phase-space points.

use crate::error::{Error, Result};
use crate::numerics::GaussianStreams;
use crate::scalar::Real;

/// Continuous spectral density J(omega).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity<T> {
    /// J = (xi / 2) pi omega exp(-omega / omega_c).
    OhmicExponential { xi: T, omega_c: T },
    /// J = 2 lambda omega tau_c / (1 + omega^2 tau_c^2).
    DebyeDrude { lambda: T, tau_c: T },
}

impl<T: Real> SpectralDensity<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::OhmicExponential { xi, omega_c } => {
                non_negative("xi", xi)?;
                positive("omega_c", omega_c)
            }
            Self::DebyeDrude { lambda, tau_c } => {
                non_negative("lambda", lambda)?;
                positive("tau_c", tau_c)
            }
        }
    }

    pub fn eval(&self, omega: T) -> T {
        match *self {
            Self::OhmicExponential { xi, omega_c } => {
                xi * T::lit(0.5) * T::PI() * omega * (-omega / omega_c).exp()
            }
            Self::DebyeDrude { lambda, tau_c } => {
                let x = omega * tau_c;
                T::lit(2.0) * lambda * x / (T::one() + x * x)
            }
        }
    }

    /// lim_{omega -> 0} J(omega) / omega.
    pub fn slope_at_zero(&self) -> T {
        match *self {
            Self::OhmicExponential { xi, .. } => xi * T::lit(0.5) * T::PI(),
            Self::DebyeDrude { lambda, tau_c } => T::lit(2.0) * lambda * tau_c,
        }
    }
}

fn positive<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {x}"),
        })
    }
}

fn non_negative<T: Real>(name: &'static str, x: T) -> Result<()> {
    if x >= T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be non-negative and finite, got {x}"),
        })
    }
}

/// Finite set of bath oscillators with frequencies and linear couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath<T> {
    pub omegas: Vec<T>,
    pub couplings: Vec<T>,
    pub omega_max: T,
    /// Inverse temperature; infinite means the zero-temperature state.
    pub beta: T,
}

impl<T: Real> DiscretizedBath<T> {
    pub fn n_osc(&self) -> usize {
        self.omegas.len()
    }

    pub fn with_beta(mut self, beta: T) -> Result<Self> {
        if !(beta > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("inverse temperature must be positive, got {beta}"),
            });
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn with_temperature(self, temperature: T) -> Result<Self> {
        positive("temperature", temperature)?;
        self.with_beta(temperature.recip())
    }

    /// Sum_j C_j^2 / (2 omega_j^2).
    pub fn reorganization_shift(&self) -> T {
        self.omegas
            .iter()
            .zip(&self.couplings)
            .map(|(&w, &c)| c * c / (T::lit(2.0) * w * w))
            .sum()
    }

    /// Position and momentum variances of mode `j` in the thermal Wigner
    /// distribution.
    pub fn wigner_variances(&self, j: usize) -> (T, T) {
        let w = self.omegas[j];
        let th = (self.beta * w * T::lit(0.5)).tanh();
        let two = T::lit(2.0);
        (T::one() / (two * w * th), w / (two * th))
    }
}

/// Ohmic bath with exponential cutoff discretized on `n` modes so that every
/// mode carries equal spectral weight; the last mode sits at `omega_max`.
pub fn discretize_ohmic<T: Real>(xi: T, omega_c: T, omega_max: T, n: usize) -> Result<DiscretizedBath<T>> {
    non_negative("xi", xi)?;
    positive("omega_c", omega_c)?;
    positive("omega_max", omega_max)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n_osc",
            reason: "need at least one oscillator".into(),
        });
    }
    let omega0 = omega_c / T::count(n) * (T::one() - (-omega_max / omega_c).exp());
    let weight = (xi * omega0).sqrt();
    let mut omegas = Vec::with_capacity(n);
    let mut couplings = Vec::with_capacity(n);
    for j in 1..=n {
        let w = if j == n {
            omega_max
        } else {
            -omega_c * (-(T::count(j) * omega0 / omega_c)).ln_1p()
        };
        omegas.push(w);
        couplings.push(weight * w);
    }
    Ok(DiscretizedBath {
        omegas,
        couplings,
        omega_max,
        beta: T::infinity(),
    })
}

/// Spacing parameter omega_0 of the Ohmic discretization.
pub fn ohmic_omega0<T: Real>(omega_c: T, omega_max: T, n: usize) -> T {
    omega_c / T::count(n) * (T::one() - (-omega_max / omega_c).exp())
}

/// Debye-Drude bath discretized on `m` modes with equal reorganization
/// weight per mode; the last mode sits at `omega_max`.
pub fn discretize_debye<T: Real>(lambda: T, tau_c: T, omega_max: T, m: usize) -> Result<DiscretizedBath<T>> {
    non_negative("lambda", lambda)?;
    positive("tau_c", tau_c)?;
    positive("omega_max", omega_max)?;
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "n_osc",
            reason: "need at least one oscillator".into(),
        });
    }
    let arc = (omega_max * tau_c).atan();
    let prefactor = T::lit(2.0) * (lambda * arc / (T::PI() * T::count(m))).sqrt();
    let mut omegas = Vec::with_capacity(m);
    let mut couplings = Vec::with_capacity(m);
    for j in 1..=m {
        let w = if j == m {
            omega_max
        } else {
            (T::count(j) * arc / T::count(m)).tan() / tau_c
        };
        omegas.push(w);
        couplings.push(prefactor * w);
    }
    Ok(DiscretizedBath {
        omegas,
        couplings,
        omega_max,
        beta: T::infinity(),
    })
}

/// Initial bath phase-space point (mass-weighted positions and momenta).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSample<T> {
    pub positions: Vec<T>,
    pub momenta: Vec<T>,
}

/// Draws one phase-space point from the thermal Wigner distribution of
/// `bath`. `offset` is the global index of the bath's first oscillator, so
/// several baths sampled from one stream never share a window.
pub fn sample_wigner<T: Real>(bath: &DiscretizedBath<T>, streams: &mut GaussianStreams, offset: usize) -> WignerSample<T> {
    let n = bath.n_osc();
    let mut positions = Vec::with_capacity(n);
    let mut momenta = Vec::with_capacity(n);
    for j in 0..n {
        let (var_r, var_p) = bath.wigner_variances(j);
        let (zr, zp) = streams.oscillator_pair(offset + j);
        positions.push(T::lit(zr) * var_r.sqrt());
        momenta.push(T::lit(zp) * var_p.sqrt());
    }
    WignerSample { positions, momenta }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ohmic_spacing_value() {
        let w0 = ohmic_omega0(1.0f64, 5.0, 200);
        assert!((w0 - 0.004_966_310_265).abs() < 1e-11);
    }

    #[test]
    fn ohmic_last_mode_is_cutoff() {
        let b = discretize_ohmic(0.1, 1.0, 5.0, 200).unwrap();
        assert_eq!(*b.omegas.last().unwrap(), 5.0);
        // the analytic expression lands on the same value
        let w0 = ohmic_omega0(1.0f64, 5.0, 200);
        let analytic = -(1.0 - 200.0 * w0).ln();
        assert!((analytic - 5.0).abs() < 1e-12 * 5.0);
        assert!(b.omegas.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ohmic_zero_coupling() {
        let b = discretize_ohmic(0.0, 1.0, 5.0, 20).unwrap();
        assert!(b.couplings.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(discretize_ohmic(0.1, 1.0, 5.0, 0).is_err());
        assert!(discretize_ohmic(0.1, -1.0, 5.0, 10).is_err());
        assert!(discretize_debye(35.0, 0.0, 5.0, 10).is_err());
        assert!(discretize_debye(-1.0, 1.0, 5.0, 10).is_err());
    }

    #[test]
    fn debye_last_mode_and_reorganization() {
        for m in [1usize, 7, 40, 333] {
            let b = discretize_debye(35.0, 50.0, 0.2, m).unwrap();
            assert_eq!(*b.omegas.last().unwrap(), 0.2);
            let expected = 2.0 * 35.0 * (0.2f64 * 50.0).atan() / std::f64::consts::PI;
            assert!((b.reorganization_shift() - expected).abs() < 1e-12 * expected, "m={m}");
        }
    }

    #[test]
    fn variance_limits() {
        let b = discretize_ohmic(0.1f64, 1.0, 5.0, 10).unwrap();
        let hot = b.clone().with_beta(1e-6).unwrap();
        let (_, vp) = hot.wigner_variances(3);
        assert!((vp - 1e6).abs() / 1e6 < 1e-6);
        let cold = b.with_beta(1e9).unwrap();
        let (vr, vp) = cold.wigner_variances(3);
        let w = cold.omegas[3];
        assert!((vp - w / 2.0).abs() < 1e-14 && (vr - 0.5 / w).abs() < 1e-12);
    }

    #[test]
    fn spectral_density_values() {
        let j = SpectralDensity::OhmicExponential { xi: 0.2, omega_c: 1.0 };
        assert!((j.eval(1.0) - 0.1 * std::f64::consts::PI * (-1.0f64).exp()).abs() < 1e-15);
        let d = SpectralDensity::DebyeDrude { lambda: 1.0, tau_c: 1.0 };
        assert_eq!(d.eval(1.0), 1.0);
    }
}
