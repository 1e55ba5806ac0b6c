use std::ops::Range;

use crate::error::{Error, Result};

/// Flat layout of the matrix-valued coordinates of one trajectory.
///
/// Every coordinate is an `L x L` block of complex matrix elements stored
/// row-major. Subsystem coordinates come first, then all bath positions,
/// then all bath momenta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoordinateLayout {
    levels: usize,
    n_subsystem: usize,
    n_oscillators: usize,
}

impl CoordinateLayout {
    pub fn new(levels: usize, n_subsystem: usize, n_oscillators: usize) -> Self {
        Self {
            levels,
            n_subsystem,
            n_oscillators,
        }
    }

    /// Two-level spin: three Pauli coordinates, `4 (3 + 2N)` elements.
    pub fn spin_boson(n_oscillators: usize) -> Self {
        let layout = Self::new(2, 3, n_oscillators);
        debug_assert_eq!(layout.len(), 4 * (3 + 2 * n_oscillators));
        layout
    }

    /// Multi-site exciton with one bath of `per_site` modes per site.
    /// The last diagonal projector is implied by completeness, giving
    /// `L^2 (L^2 - 1 + 2 L M)` elements.
    pub fn exciton(sites: usize, per_site: usize) -> Self {
        let layout = Self::new(sites, sites * sites - 1, sites * per_site);
        debug_assert_eq!(
            layout.len(),
            sites * sites * (sites * sites - 1 + 2 * sites * per_site)
        );
        layout
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.levels
    }

    #[inline]
    pub fn block(&self) -> usize {
        self.levels * self.levels
    }

    #[inline]
    pub fn n_subsystem_coords(&self) -> usize {
        self.n_subsystem
    }

    #[inline]
    pub fn n_oscillators(&self) -> usize {
        self.n_oscillators
    }

    #[inline]
    pub fn n_bath_coords(&self) -> usize {
        2 * self.n_oscillators
    }

    /// Total number of complex elements.
    #[inline]
    pub fn len(&self) -> usize {
        self.block() * (self.n_subsystem + self.n_bath_coords())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn subsystem(&self, coord: usize) -> Range<usize> {
        let b = self.block();
        coord * b..(coord + 1) * b
    }

    #[inline]
    pub fn position(&self, osc: usize) -> Range<usize> {
        self.subsystem(self.n_subsystem + osc)
    }

    #[inline]
    pub fn momentum(&self, osc: usize) -> Range<usize> {
        self.subsystem(self.n_subsystem + self.n_oscillators + osc)
    }

    /// Offset of element `(alpha, alpha')` of coordinate `coord`.
    #[inline]
    pub fn offset(&self, coord: usize, alpha: usize, alpha_p: usize) -> usize {
        (coord * self.levels + alpha) * self.levels + alpha_p
    }

    /// First element of the bath section.
    #[inline]
    pub fn bath_start(&self) -> usize {
        self.n_subsystem * self.block()
    }

    pub fn check(&self, len: usize) -> Result<()> {
        if len == self.len() {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                expected: self.len(),
                actual: len,
            })
        }
    }
}
