use crate::banach_scale::{SpectralField, TrajectoryField};
use crate::error::Result;

/// Capabilities the iteration needs from a concrete evolution problem
/// `d_t u + G[t, u] = h(t)`, `u(0) = u_init`, posed in the frame where the
/// singular linear part has been conjugated away.
///
/// Implementations must be safe for concurrent read-only use: residuals are
/// evaluated snapshot by snapshot in parallel.
pub trait Problem: Sync {
    /// Frozen data for the linearized operator around one reference trajectory.
    type Coeffs: Send + Sync;

    fn initial_data(&self) -> &SpectralField;

    /// `G[t, u]`.
    fn evaluate_g(&self, t: f64, u: &SpectralField) -> Result<SpectralField>;

    /// Source term `h(t)`.
    fn forcing(&self, t: f64) -> SpectralField;

    /// `Err(Error::Domain)` when `u` at time `t` leaves the admissible set.
    fn admissible(&self, t: f64, u: &SpectralField) -> Result<()>;

    /// Linearize around a reference trajectory. May be an approximate derivative.
    fn linearize(&self, reference: &TrajectoryField) -> Result<Self::Coeffs>;

    /// Solve `d_t v + G_u v = f`, `v(0) = g` on the time grid of `f`.
    fn solve_linearized(&self, coeffs: &Self::Coeffs, f: &TrajectoryField, g: &SpectralField) -> Result<TrajectoryField>;

    /// Spatial norm of index `s` on the scale.
    fn norm(&self, u: &SpectralField, s: f64) -> f64 {
        u.sobolev_norm(s)
    }
}
