use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_dealias() -> f64 {
    2.0 / 3.0
}

/// Shape of a periodic grid: one or two axes, even node counts, one period per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    pub nodes_per_axis: Vec<usize>,
    pub domain_length: Vec<f64>,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn one_d(nodes: usize, length: f64) -> Self {
        GridSpec {
            dimension: 1,
            nodes_per_axis: vec![nodes],
            domain_length: vec![length],
            dealias_fraction: default_dealias(),
        }
    }

    pub fn two_d(nodes: [usize; 2], length: [f64; 2]) -> Self {
        GridSpec {
            dimension: 2,
            nodes_per_axis: nodes.to_vec(),
            domain_length: length.to_vec(),
            dealias_fraction: default_dealias(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(Error::Parameter(format!(
                "dimension must be 1 or 2, got {}",
                self.dimension
            )));
        }
        if self.nodes_per_axis.len() != self.dimension || self.domain_length.len() != self.dimension {
            return Err(Error::Parameter(
                "nodes_per_axis and domain_length must have one entry per axis".into(),
            ));
        }
        for &n in &self.nodes_per_axis {
            if n < 8 || n % 2 != 0 {
                return Err(Error::Parameter(format!(
                    "nodes per axis must be even and >= 8, got {n}"
                )));
            }
        }
        for &l in &self.domain_length {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Parameter(format!("domain length must be positive, got {l}")));
            }
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::Parameter(format!(
                "dealias fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }
}

/// A validated grid with cached wavenumbers, dealiasing mask and FFT plans.
///
/// Flat indices are row-major with axis 0 slowest. Spectral coefficients are
/// normalized so that `u(x) = sum_k c_k exp(i xi_k . x)`, i.e. the forward
/// transform carries the factor `1/n_points`.
pub struct Grid {
    spec: GridSpec,
    shape: [usize; 2],
    n_points: usize,
    /// Wavevector per flat index; the Nyquist component is kept for norms.
    xi: Vec<[f64; 2]>,
    /// Wavevector used for differentiation; Nyquist components are zero.
    xi_diff: Vec<[f64; 2]>,
    bracket: Vec<f64>,
    dealias: Vec<bool>,
    mirror: Vec<usize>,
    max_band: [usize; 2],
    plans: [Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>; 2],
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish()
    }
}

fn signed_index(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Grid>> {
        spec.validate()?;
        let shape = if spec.dimension == 1 {
            [spec.nodes_per_axis[0], 1]
        } else {
            [spec.nodes_per_axis[0], spec.nodes_per_axis[1]]
        };
        let n_points = shape[0] * shape[1];
        let mut planner = FftPlanner::<f64>::new();
        let mut plans: [Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>; 2] = [None, None];
        for axis in 0..spec.dimension {
            let n = shape[axis];
            plans[axis] = Some((planner.plan_fft_forward(n), planner.plan_fft_inverse(n)));
        }

        let mut max_band = [0usize; 2];
        for axis in 0..spec.dimension {
            let cutoff = spec.dealias_fraction * (shape[axis] / 2) as f64;
            max_band[axis] = (cutoff + 1e-12).floor() as usize;
        }

        let mut xi = Vec::with_capacity(n_points);
        let mut xi_diff = Vec::with_capacity(n_points);
        let mut bracket = Vec::with_capacity(n_points);
        let mut dealias = Vec::with_capacity(n_points);
        let mut mirror = Vec::with_capacity(n_points);
        for i0 in 0..shape[0] {
            for i1 in 0..shape[1] {
                let idx = [i0, i1];
                let mut w = [0.0; 2];
                let mut wd = [0.0; 2];
                let mut keep = true;
                let mut m = [0usize; 2];
                for axis in 0..spec.dimension {
                    let n = shape[axis];
                    let k = signed_index(idx[axis], n);
                    let scale = 2.0 * PI / spec.domain_length[axis];
                    w[axis] = scale * k as f64;
                    wd[axis] = if idx[axis] == n / 2 { 0.0 } else { w[axis] };
                    if k.unsigned_abs() as usize > max_band[axis] {
                        keep = false;
                    }
                    m[axis] = (n - idx[axis]) % n;
                }
                xi.push(w);
                xi_diff.push(wd);
                bracket.push((1.0 + w[0] * w[0] + w[1] * w[1]).sqrt());
                dealias.push(keep);
                mirror.push(m[0] * shape[1] + m[1]);
            }
        }

        Ok(Arc::new(Grid {
            spec,
            shape,
            n_points,
            xi,
            xi_diff,
            bracket,
            dealias,
            mirror,
            max_band,
            plans,
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    /// Area (or length) of the periodic cell.
    pub fn volume(&self) -> f64 {
        self.spec.domain_length.iter().product()
    }

    /// Smallest node spacing over all axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dimension())
            .map(|a| self.spec.domain_length[a] / self.shape[a] as f64)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn xi(&self, idx: usize) -> [f64; 2] {
        self.xi[idx]
    }

    pub fn xi_diff(&self, idx: usize) -> [f64; 2] {
        self.xi_diff[idx]
    }

    /// `<xi> = (1 + |xi|^2)^(1/2)` at a flat index.
    pub fn bracket(&self, idx: usize) -> f64 {
        self.bracket[idx]
    }

    pub fn brackets(&self) -> &[f64] {
        &self.bracket
    }

    pub fn in_band(&self, idx: usize) -> bool {
        self.dealias[idx]
    }

    /// Largest integer wavenumber kept by dealiasing on each axis.
    pub fn max_band(&self) -> [usize; 2] {
        self.max_band
    }

    /// Flat index of `-xi`.
    pub fn mirror(&self, idx: usize) -> usize {
        self.mirror[idx]
    }

    /// Integer wavenumbers at a flat index.
    pub fn wavenumber(&self, idx: usize) -> [i64; 2] {
        let i0 = idx / self.shape[1];
        let i1 = idx % self.shape[1];
        let mut k = [signed_index(i0, self.shape[0]), 0];
        if self.dimension() == 2 {
            k[1] = signed_index(i1, self.shape[1]);
        }
        k
    }

    /// Node coordinates along one axis.
    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        let n = self.shape[axis];
        let h = self.spec.domain_length[axis] / n as f64;
        (0..n).map(|j| j as f64 * h).collect()
    }

    /// Coordinates of every node, flat order.
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let x0 = self.axis_nodes(0);
        let x1 = if self.dimension() == 2 {
            self.axis_nodes(1)
        } else {
            vec![0.0]
        };
        let mut out = Vec::with_capacity(self.n_points);
        for a in &x0 {
            for b in &x1 {
                out.push([*a, *b]);
            }
        }
        out
    }

    fn transform(&self, data: &mut [Complex64], forward: bool) {
        debug_assert_eq!(data.len(), self.n_points);
        let [n0, n1] = self.shape;
        if self.dimension() == 1 {
            let (f, i) = self.plans[0].as_ref().expect("axis 0 plan");
            if forward { f.process(data) } else { i.process(data) }
        } else {
            let (f1, i1) = self.plans[1].as_ref().expect("axis 1 plan");
            let p1 = if forward { f1 } else { i1 };
            for row in data.chunks_mut(n1) {
                p1.process(row);
            }
            let (f0, i0) = self.plans[0].as_ref().expect("axis 0 plan");
            let p0 = if forward { f0 } else { i0 };
            let mut col = vec![Complex64::new(0.0, 0.0); n0];
            for c in 0..n1 {
                for r in 0..n0 {
                    col[r] = data[r * n1 + c];
                }
                p0.process(&mut col);
                for r in 0..n0 {
                    data[r * n1 + c] = col[r];
                }
            }
        }
        if forward {
            let s = 1.0 / self.n_points as f64;
            for z in data.iter_mut() {
                *z *= s;
            }
        }
    }

    /// Physical samples to spectral coefficients, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    /// Spectral coefficients to physical samples, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Zero every coefficient outside the dealiasing band.
    pub fn dealias(&self, data: &mut [Complex64]) {
        for (z, keep) in data.iter_mut().zip(&self.dealias) {
            if !keep {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }
}
