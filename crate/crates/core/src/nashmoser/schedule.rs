use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration constants derived from the loss orders `(m, d1, d1p)` and the
/// regularity gaps `D < P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub m: f64,
    pub d1: f64,
    pub d1p: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    #[serde(rename = "P")]
    pub big_p: f64,
    pub s0: f64,
    pub s: f64,
    pub delta: f64,
    pub q: f64,
    pub alpha: f64,
    pub r: f64,
    pub theta0: f64,
    /// Bound used for property (ii); filled in once the initial iterate is known.
    #[serde(rename = "M")]
    pub big_m: Option<f64>,
    #[serde(rename = "P_min")]
    pub p_min: f64,
    pub mu_hat: f64,
    /// Open interval `(r_lower, r_upper)` that `r` must lie in.
    pub r_lower: f64,
    pub r_upper: f64,
    pub margin: f64,
    /// `delta = 0`: the lower condition on `r` is vacuous and `r_lower = 1`.
    pub degenerate: bool,
}

/// `delta = max(d1, d1p + m)`.
pub fn loss_delta(m: f64, d1: f64, d1p: f64) -> f64 {
    d1.max(d1p + m)
}

/// `P_min = delta + (D / q) (sqrt(delta) + sqrt(2 (delta + q)))^2`, `q = D - m - d1p`.
pub fn p_min(m: f64, d1: f64, d1p: f64, big_d: f64) -> f64 {
    let delta = loss_delta(m, d1, d1p);
    let q = big_d - m - d1p;
    // the square expanded, so integer data stays exact
    let square = 3.0 * delta + 2.0 * q + 2.0 * (2.0 * delta * (delta + q)).sqrt();
    delta + big_d / q * square
}

/// Compute every constant of the schedule and place `r` inside its admissible interval.
///
/// `margin` in (0, 1) interpolates between the lower end `1 + delta/alpha`
/// (margin 0) and the upper end `r_bar` (margin 1).
pub fn compute_schedule(m: f64, d1: f64, d1p: f64, big_d: f64, big_p: f64, margin: f64) -> Result<ScheduleParams> {
    for (name, v) in [("m", m), ("d1", d1), ("d1p", d1p)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Parameter(format!("{name} must be finite and >= 0, got {v}")));
        }
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::Parameter(format!("margin must lie in (0, 1), got {margin}")));
    }
    let delta = loss_delta(m, d1, d1p);
    let q = big_d - m - d1p;
    if !(big_d > delta) || !(q > 0.0) {
        return Err(Error::Parameter(format!(
            "need D > delta = {delta} and q = D - m - d1p > 0, got D = {big_d}"
        )));
    }
    let pm = p_min(m, d1, d1p, big_d);
    if !(big_p > pm) {
        return Err(Error::Infeasible { p: big_p, p_min: pm });
    }
    let alpha = delta + (2.0 * delta * (delta + q)).sqrt();
    let mu_hat = 1.0 - big_d / (big_p - delta);
    let r_upper = 2.0 * mu_hat * q / (q + alpha * (1.0 - mu_hat));
    let degenerate = delta == 0.0;
    let r_lower = if degenerate { 1.0 } else { 1.0 + delta / alpha };
    if !(r_lower < r_upper) {
        return Err(Error::Consistency(format!(
            "empty r-interval ({r_lower}, {r_upper}) although P = {big_p} > P_min = {pm}"
        )));
    }
    let r = (1.0 - margin) * r_lower + margin * r_upper;
    if !(r > r_lower && r < r_upper) {
        return Err(Error::Consistency(format!("r = {r} escaped ({r_lower}, {r_upper})")));
    }
    Ok(ScheduleParams {
        m,
        d1,
        d1p,
        big_d,
        big_p,
        s0: 0.0,
        s: 0.0,
        delta,
        q,
        alpha,
        r,
        theta0: 10.0,
        big_m: None,
        p_min: pm,
        mu_hat,
        r_lower,
        r_upper,
        margin,
        degenerate,
    })
}

impl ScheduleParams {
    pub fn with_levels(mut self, s0: f64, s: f64) -> Self {
        self.s0 = s0;
        self.s = s;
        self
    }

    pub fn with_theta0(mut self, theta0: f64) -> Result<Self> {
        if !(theta0 > 1.0) {
            return Err(Error::Parameter(format!("theta0 must exceed 1, got {theta0}")));
        }
        self.theta0 = theta0;
        Ok(self)
    }

    /// `theta_k = theta0^(r^k)`.
    pub fn theta(&self, k: usize) -> f64 {
        self.theta0.powf(self.r.powi(k as i32))
    }

    /// `delta - alpha (r - 1) < 0`, vacuous when `delta = 0`.
    pub fn condition_lower(&self) -> bool {
        self.degenerate || self.delta - self.alpha * (self.r - 1.0) < 0.0
    }

    /// `1 < r < 2 mu q / (q + alpha (1 - mu))`.
    pub fn condition_upper(&self) -> bool {
        let bound = 2.0 * self.mu_hat * self.q / (self.q + self.alpha * (1.0 - self.mu_hat));
        1.0 < self.r && self.r < bound
    }

    /// Index of the F-scale residual norm, `s + d1p`.
    pub fn residual_index(&self) -> f64 {
        self.s + self.d1p
    }
}
