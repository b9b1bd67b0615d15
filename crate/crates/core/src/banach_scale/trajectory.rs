use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use crate::error::{Error, Result};

/// Finite-difference order used for time derivatives of stored trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOrder {
    Second,
    Fourth,
}

/// Norm selector for [`trajectory_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryNorm {
    /// `sup_t |u(t)|_s`
    XsT,
    /// `sup_t |u|_s + sup_t |d_t u|_{s-m}`
    Es,
    /// `sum_{k<=j} sup_t |(eps d_t)^k u|_{s-km}`
    XsJ(usize),
}

/// Snapshots of a field on a uniform time grid `0 = t_0 < ... < t_n = T`.
#[derive(Clone, Debug)]
pub struct TrajectoryField {
    times: Vec<f64>,
    snapshots: Vec<SpectralField>,
    time_step: f64,
}

fn lincomb(terms: &[(f64, &SpectralField)]) -> SpectralField {
    let mut out = terms[0].1.scaled(terms[0].0);
    for (w, f) in &terms[1..] {
        out.axpy(*w, f);
    }
    out
}

impl TrajectoryField {
    /// Snapshots at `t_i = i * horizon / (len - 1)`.
    pub fn new(horizon: f64, snapshots: Vec<SpectralField>) -> Result<Self> {
        if snapshots.len() < 2 {
            return Err(Error::Parameter("a trajectory needs at least two snapshots".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Parameter(format!("horizon must be positive, got {horizon}")));
        }
        for s in &snapshots[1..] {
            snapshots[0].check_grid(s)?;
        }
        let steps = snapshots.len() - 1;
        let time_step = horizon / steps as f64;
        let times = (0..=steps).map(|i| i as f64 * time_step).collect();
        Ok(TrajectoryField {
            times,
            snapshots,
            time_step,
        })
    }

    pub fn from_fn(horizon: f64, steps: usize, f: impl Fn(f64) -> SpectralField) -> Result<Self> {
        let dt = horizon / steps as f64;
        let snaps = (0..=steps).map(|i| f(i as f64 * dt)).collect();
        Self::new(horizon, snaps)
    }

    pub fn try_from_fn(horizon: f64, steps: usize, f: impl Fn(f64) -> Result<SpectralField>) -> Result<Self> {
        let dt = horizon / steps as f64;
        let snaps = (0..=steps).map(|i| f(i as f64 * dt)).collect::<Result<Vec<_>>>()?;
        Self::new(horizon, snaps)
    }

    /// Same time grid, snapshots replaced.
    pub fn with_snapshots(&self, snapshots: Vec<SpectralField>) -> Result<Self> {
        if snapshots.len() != self.snapshots.len() {
            return Err(Error::Parameter("snapshot count changed".into()));
        }
        Self::new(self.horizon(), snapshots)
    }

    pub fn constant(horizon: f64, steps: usize, f: &SpectralField) -> Self {
        Self::from_fn(horizon, steps, |_| f.clone()).expect("valid constant trajectory")
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[SpectralField] {
        &self.snapshots
    }

    pub fn snapshots_mut(&mut self) -> &mut [SpectralField] {
        &mut self.snapshots
    }

    pub fn snapshot(&self, i: usize) -> &SpectralField {
        &self.snapshots[i]
    }

    pub fn first(&self) -> &SpectralField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &SpectralField {
        self.snapshots.last().unwrap()
    }

    pub fn check_aligned(&self, other: &TrajectoryField) -> Result<()> {
        if self.len() != other.len() || (self.horizon() - other.horizon()).abs() > 1e-12 * self.horizon() {
            return Err(Error::GridMismatch(format!(
                "time grids differ: {} snapshots on [0, {}] vs {} on [0, {}]",
                self.len(),
                self.horizon(),
                other.len(),
                other.horizon()
            )));
        }
        self.snapshots[0].check_grid(&other.snapshots[0])
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> TrajectoryField {
        TrajectoryField {
            times: self.times.clone(),
            snapshots: self.snapshots.iter().map(f).collect(),
            time_step: self.time_step,
        }
    }

    pub fn map_indexed(&self, f: impl Fn(usize, f64, &SpectralField) -> SpectralField) -> TrajectoryField {
        TrajectoryField {
            times: self.times.clone(),
            snapshots: self
                .snapshots
                .iter()
                .enumerate()
                .map(|(i, s)| f(i, self.times[i], s))
                .collect(),
            time_step: self.time_step,
        }
    }

    pub fn try_map_indexed(
        &self,
        f: impl Fn(usize, f64, &SpectralField) -> Result<SpectralField>,
    ) -> Result<TrajectoryField> {
        let snapshots = self
            .snapshots
            .iter()
            .enumerate()
            .map(|(i, s)| f(i, self.times[i], s))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrajectoryField {
            times: self.times.clone(),
            snapshots,
            time_step: self.time_step,
        })
    }

    /// `self += a * other`, snapshot by snapshot.
    pub fn axpy(&mut self, a: f64, other: &TrajectoryField) {
        for (s, o) in self.snapshots.iter_mut().zip(&other.snapshots) {
            s.axpy(a, o);
        }
    }

    pub fn scaled(&self, a: f64) -> TrajectoryField {
        self.map(|s| s.scaled(a))
    }

    pub fn sub(&self, other: &TrajectoryField) -> TrajectoryField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Time derivative by finite differences: centered in the interior, one-sided
    /// stencils of the same order at the endpoints.
    pub fn time_derivative(&self, order: FdOrder) -> TrajectoryField {
        let n = self.len();
        let dt = self.time_step;
        let u = &self.snapshots;
        let mut out = Vec::with_capacity(n);
        if n == 2 {
            let d = lincomb(&[(1.0 / dt, &u[1]), (-1.0 / dt, &u[0])]);
            out.push(d.clone());
            out.push(d);
        } else if order == FdOrder::Second || n < 5 {
            let c = 1.0 / (2.0 * dt);
            out.push(lincomb(&[(-3.0 * c, &u[0]), (4.0 * c, &u[1]), (-c, &u[2])]));
            for i in 1..n - 1 {
                out.push(lincomb(&[(c, &u[i + 1]), (-c, &u[i - 1])]));
            }
            out.push(lincomb(&[(3.0 * c, &u[n - 1]), (-4.0 * c, &u[n - 2]), (c, &u[n - 3])]));
        } else {
            let c = 1.0 / (12.0 * dt);
            let edge0 = [-25.0, 48.0, -36.0, 16.0, -3.0];
            let edge1 = [-3.0, -10.0, 18.0, -6.0, 1.0];
            let fwd = |w: &[f64; 5]| -> SpectralField {
                let terms: Vec<(f64, &SpectralField)> = (0..5).map(|j| (w[j] * c, &u[j])).collect();
                lincomb(&terms)
            };
            let bwd = |w: &[f64; 5]| -> SpectralField {
                let terms: Vec<(f64, &SpectralField)> = (0..5).map(|j| (-w[j] * c, &u[n - 1 - j])).collect();
                lincomb(&terms)
            };
            out.push(fwd(&edge0));
            out.push(fwd(&edge1));
            for i in 2..n - 2 {
                out.push(lincomb(&[
                    (-c, &u[i + 2]),
                    (8.0 * c, &u[i + 1]),
                    (-8.0 * c, &u[i - 1]),
                    (c, &u[i - 2]),
                ]));
            }
            out.push(bwd(&edge1));
            out.push(bwd(&edge0));
        }
        TrajectoryField {
            times: self.times.clone(),
            snapshots: out,
            time_step: dt,
        }
    }

    /// Cubic Lagrange interpolation in time (linear when fewer than four snapshots).
    pub fn interpolate(&self, t: f64) -> SpectralField {
        let n = self.len();
        let x = (t / self.time_step).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        if (x - i as f64).abs() < 1e-13 {
            return self.snapshots[i].clone();
        }
        if (x - (i + 1) as f64).abs() < 1e-13 {
            return self.snapshots[i + 1].clone();
        }
        if n < 4 {
            let w = x - i as f64;
            return lincomb(&[(1.0 - w, &self.snapshots[i]), (w, &self.snapshots[i + 1])]);
        }
        let j0 = i.saturating_sub(1).min(n - 4);
        let nodes: Vec<f64> = (j0..j0 + 4).map(|j| j as f64).collect();
        let mut terms = Vec::with_capacity(4);
        for a in 0..4 {
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (x - nodes[b]) / (nodes[a] - nodes[b]);
                }
            }
            terms.push((w, &self.snapshots[j0 + a]));
        }
        lincomb(&terms)
    }

    /// `sup_t norm(u(t))`.
    pub fn sup(&self, norm: impl Fn(&SpectralField) -> f64) -> f64 {
        self.snapshots.iter().map(norm).fold(0.0, f64::max)
    }
}

/// Trajectory norms over the Sobolev scale.
pub fn trajectory_norm(u: &TrajectoryField, s: f64, mode: TrajectoryNorm, m: f64, eps: f64) -> Result<f64> {
    trajectory_norm_with(u, s, mode, m, eps, |f, s| f.sobolev_norm(s))
}

/// Trajectory norms with a caller-supplied spatial norm `norm(field, index)`.
pub fn trajectory_norm_with(
    u: &TrajectoryField,
    s: f64,
    mode: TrajectoryNorm,
    m: f64,
    eps: f64,
    norm: impl Fn(&SpectralField, f64) -> f64,
) -> Result<f64> {
    match mode {
        TrajectoryNorm::XsT => Ok(u.sup(|f| norm(f, s))),
        TrajectoryNorm::Es => {
            let du = u.time_derivative(FdOrder::Second);
            Ok(u.sup(|f| norm(f, s)) + du.sup(|f| norm(f, s - m)))
        }
        TrajectoryNorm::XsJ(j) => {
            if u.len() < j + 1 {
                return Err(Error::Parameter(format!(
                    "X^s_(j) with j = {j} needs at least {} snapshots, got {}",
                    j + 1,
                    u.len()
                )));
            }
            let mut total = u.sup(|f| norm(f, s));
            let mut cur = u.clone();
            for k in 1..=j {
                cur = cur.time_derivative(FdOrder::Second).scaled(eps);
                total += cur.sup(|f| norm(f, s - k as f64 * m));
            }
            Ok(total)
        }
    }
}
