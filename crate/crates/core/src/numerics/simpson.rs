use log::debug;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Composite Simpson rule over uniformly spaced samples.
///
/// An odd number of intervals is handled by Simpson on the first `n - 1`
/// intervals plus the trapezoid rule on the last one.
pub fn simpson_integrate<T: Real>(samples: &[T], dt: T) -> Result<T> {
    let n_points = samples.len();
    if n_points < 3 {
        return Err(Error::TooFewSamples(n_points));
    }
    let intervals = n_points - 1;
    let even = intervals - intervals % 2;
    let mut odd_sum = T::zero();
    let mut even_sum = T::zero();
    for i in (1..even).step_by(2) {
        odd_sum += samples[i];
    }
    for i in (2..even).step_by(2) {
        even_sum += samples[i];
    }
    let mut total =
        (samples[0] + samples[even] + T::lit(4.0) * odd_sum + T::lit(2.0) * even_sum) * dt / T::lit(3.0);
    if even != intervals {
        debug!("simpson: {intervals} intervals is odd, closing with a trapezoid");
        total += (samples[intervals - 1] + samples[intervals]) * dt * T::lit(0.5);
    }
    Ok(total)
}

/// Running trapezoid integral; `out[k]` = integral over the first `k` intervals.
pub fn cumulative_trapezoid<T: Real>(samples: &[T], dt: T) -> Vec<T> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = T::zero();
    let half = dt * T::lit(0.5);
    for (k, &s) in samples.iter().enumerate() {
        if k > 0 {
            acc += (samples[k - 1] + s) * half;
        }
        out.push(acc);
    }
    out
}
