use super::fmo::Fmo;
use super::layout::CoordinateLayout;
use super::sbm::SpinBoson;
use crate::bath::WignerSample;
use crate::error::Result;
use crate::numerics::GaussianStreams;
use crate::scalar::{Real, C};

/// Equations of motion of one model in the flat [`CoordinateLayout`].
///
/// Implementations must be free of side effects: trajectories on different
/// workers call `derivative` concurrently on a shared model.
pub trait ModelEom<T: Real>: Send + Sync {
    fn layout(&self) -> &CoordinateLayout;

    fn levels(&self) -> usize {
        self.layout().levels()
    }

    /// Basis index `n` of the pure initial state `|n><n|`.
    fn initial_level(&self) -> usize;

    /// Draws the initial bath phase-space point of one trajectory.
    fn sample_bath(&self, streams: &mut GaussianStreams) -> WignerSample<T>;

    /// Full initial state: subsystem matrix elements plus bath coordinates
    /// placed on the diagonal (factorized initial condition).
    fn initial_state(&self, sample: &WignerSample<T>) -> Result<Vec<C<T>>>;

    fn derivative(&self, y: &[C<T>], dy: &mut [C<T>]);

    /// Writes this trajectory's contribution to the reduced density matrix
    /// and its rate, both `L x L` row-major.
    fn observe(&self, y: &[C<T>], dy: &[C<T>], rho: &mut [C<T>], drho: &mut [C<T>]);
}

/// Closed set of models the simulator drives.
#[derive(Debug, Clone)]
pub enum Model<T> {
    SpinBoson(SpinBoson<T>),
    Fmo(Fmo<T>),
}

macro_rules! delegate {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            Model::SpinBoson($m) => $e,
            Model::Fmo($m) => $e,
        }
    };
}

impl<T: Real> ModelEom<T> for Model<T> {
    fn layout(&self) -> &CoordinateLayout {
        delegate!(self, m => m.layout())
    }
    fn initial_level(&self) -> usize {
        delegate!(self, m => m.initial_level())
    }
    fn sample_bath(&self, streams: &mut GaussianStreams) -> WignerSample<T> {
        delegate!(self, m => m.sample_bath(streams))
    }
    fn initial_state(&self, sample: &WignerSample<T>) -> Result<Vec<C<T>>> {
        delegate!(self, m => m.initial_state(sample))
    }
    fn derivative(&self, y: &[C<T>], dy: &mut [C<T>]) {
        delegate!(self, m => m.derivative(y, dy))
    }
    fn observe(&self, y: &[C<T>], dy: &[C<T>], rho: &mut [C<T>], drho: &mut [C<T>]) {
        delegate!(self, m => m.observe(y, dy, rho, drho))
    }
}
