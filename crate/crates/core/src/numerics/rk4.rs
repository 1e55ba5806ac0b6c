//! Classical fixed-step fourth-order Runge-Kutta.

use crate::error::{Error, Result};
use crate::scalar::{Real, StateElement};

/// Reusable stage buffers for repeated steps on a state of fixed length.
///
/// After [`Rk4::step`], [`Rk4::initial_slope`] holds the derivative at the
/// start of the step, which trajectories reuse as the EOM-evaluated rate at
/// that grid point.
#[derive(Debug, Clone)]
pub struct Rk4<S> {
    k1: Vec<S>,
    k2: Vec<S>,
    k3: Vec<S>,
    k4: Vec<S>,
    stage: Vec<S>,
}

impl<S> Rk4<S> {
    pub fn new<T: Real>(len: usize) -> Self
    where
        S: StateElement<T>,
    {
        Self {
            k1: vec![S::zero(); len],
            k2: vec![S::zero(); len],
            k3: vec![S::zero(); len],
            k4: vec![S::zero(); len],
            stage: vec![S::zero(); len],
        }
    }

    /// Derivative evaluated at the start of the most recent step.
    pub fn initial_slope(&self) -> &[S] {
        &self.k1
    }

    /// Advances `y` from `t` to `t + dt` in place.
    pub fn step<T, F>(&mut self, deriv: &mut F, y: &mut [S], t: T, dt: T) -> Result<()>
    where
        T: Real,
        S: StateElement<T>,
        F: FnMut(T, &[S], &mut [S]),
    {
        self.step_observed(deriv, y, t, dt, |_, _| {})
    }

    /// Like [`Rk4::step`], calling `observe(y, dy/dt)` on the start-of-step
    /// state before it is overwritten.
    pub fn step_observed<T, F, O>(&mut self, deriv: &mut F, y: &mut [S], t: T, dt: T, mut observe: O) -> Result<()>
    where
        T: Real,
        S: StateElement<T>,
        F: FnMut(T, &[S], &mut [S]),
        O: FnMut(&[S], &[S]),
    {
        debug_assert_eq!(y.len(), self.k1.len());
        let half = dt * T::lit(0.5);

        deriv(t, y, &mut self.k1);
        check(&self.k1, t)?;
        observe(y, &self.k1);

        for ((s, &yi), &k) in self.stage.iter_mut().zip(y.iter()).zip(&self.k1) {
            *s = yi + k * half;
        }
        deriv(t + half, &self.stage, &mut self.k2);
        check(&self.k2, t + half)?;

        for ((s, &yi), &k) in self.stage.iter_mut().zip(y.iter()).zip(&self.k2) {
            *s = yi + k * half;
        }
        deriv(t + half, &self.stage, &mut self.k3);
        check(&self.k3, t + half)?;

        for ((s, &yi), &k) in self.stage.iter_mut().zip(y.iter()).zip(&self.k3) {
            *s = yi + k * dt;
        }
        deriv(t + dt, &self.stage, &mut self.k4);
        check(&self.k4, t + dt)?;

        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for i in 0..y.len() {
            let incr = self.k1[i] + (self.k2[i] + self.k3[i]) * two + self.k4[i];
            y[i] += incr * sixth;
        }
        Ok(())
    }
}

fn check<T: Real, S: StateElement<T>>(k: &[S], t: T) -> Result<()> {
    if k.iter().all(StateElement::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFiniteDerivative {
            time: t.to_f64_lossy(),
        })
    }
}

/// One RK4 step returning the new state.
pub fn rk4_step<T, S, F>(mut deriv: F, y: &[S], t: T, dt: T) -> Result<Vec<S>>
where
    T: Real,
    S: StateElement<T>,
    F: FnMut(T, &[S], &mut [S]),
{
    let mut out = y.to_vec();
    Rk4::new(y.len()).step(&mut deriv, &mut out, t, dt)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_derivative_is_identity() {
        let y = [1.5, -2.0, 0.25];
        let out = rk4_step(|_t: f64, _y: &[f64], dy: &mut [f64]| dy.fill(0.0), &y, 0.0, 0.3).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn exponential_growth() {
        let out = rk4_step(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0], &[1.0], 0.0, 0.1).unwrap();
        // fourth-order Taylor polynomial of e^0.1
        assert!((out[0] - 1.105_170_833_333_333).abs() < 1e-14);
        assert!((out[0] - 0.1f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn rotation_preserves_modulus_to_fifth_order() {
        let omega = 1.3;
        let y0 = [Complex64::new(0.6, 0.8)];
        for dt in [0.1, 0.05, 0.025] {
            let out = rk4_step(
                |_t: f64, y: &[Complex64], dy: &mut [Complex64]| dy[0] = Complex64::new(0.0, omega) * y[0],
                &y0,
                0.0,
                dt,
            )
            .unwrap();
            let err = (out[0].norm() - 1.0).abs();
            // |R(i w dt)| - 1 = -(w dt)^6 / 144 + ...
            assert!(err <= 0.01 * (omega * dt).powi(5), "dt={dt} err={err}");
        }
    }

    #[test]
    fn non_finite_stage_is_reported() {
        let r = rk4_step(|_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = 1.0 / (y[0] - 1.0), &[1.0], 0.0, 0.1);
        assert!(matches!(r, Err(Error::NonFiniteDerivative { .. })));
    }

    #[test]
    fn time_dependent_rhs_uses_stage_times() {
        // dy/dt = 3 t^2 is integrated exactly by Simpson-weighted stages
        let out = rk4_step(|t: f64, _y: &[f64], dy: &mut [f64]| dy[0] = 3.0 * t * t, &[0.0], 1.0, 0.5).unwrap();
        assert!((out[0] - (1.5f64.powi(3) - 1.0)).abs() < 1e-14);
    }
}
