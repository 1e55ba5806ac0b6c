//! Inner loops on `L x L` row-major complex blocks.

use crate::scalar::{Real, C};

/// `out += coef * src`.
#[inline]
pub(crate) fn axpy<T: Real>(out: &mut [C<T>], coef: T, src: &[C<T>]) {
    for (o, &s) in out.iter_mut().zip(src) {
        *o += s * coef;
    }
}

/// `out = a q + q a` for a single anticommutator of `dim x dim` blocks.
#[inline]
pub(crate) fn anticommutator<T: Real>(dim: usize, q: &[C<T>], a: &[C<T>], out: &mut [C<T>]) {
    out.fill(C::new(T::zero(), T::zero()));
    for r in 0..dim {
        for k in 0..dim {
            let qa = q[r * dim + k];
            let ar = a[r * dim + k];
            let q_row = &q[k * dim..(k + 1) * dim];
            let a_row = &a[k * dim..(k + 1) * dim];
            let o_row = &mut out[r * dim..(r + 1) * dim];
            for c in 0..dim {
                o_row[c] += qa * a_row[c] + ar * q_row[c];
            }
        }
    }
}

/// Multiplies by `i * s`.
#[inline]
pub(crate) fn times_i<T: Real>(z: C<T>, s: T) -> C<T> {
    C::new(-z.im * s, z.re * s)
}
