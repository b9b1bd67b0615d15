use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::grid::Grid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Fourier coefficients of a real field with one or more components.
///
/// Storage is component-major: component `c` occupies
/// `coeffs[c * n_points .. (c + 1) * n_points]`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>, components: usize) -> Self {
        SpectralField {
            grid: grid.clone(),
            components,
            coeffs: vec![ZERO; components * grid.n_points()],
        }
    }

    pub fn from_coefficients(grid: &Arc<Grid>, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.n_points() {
            return Err(Error::InvalidField(format!(
                "expected {} coefficients for {components} components, got {}",
                components * grid.n_points(),
                coeffs.len()
            )));
        }
        let f = SpectralField {
            grid: grid.clone(),
            components,
            coeffs,
        };
        f.validate()?;
        Ok(f)
    }

    /// Transform physical samples (one vector per component) without dealiasing.
    pub fn from_physical(grid: &Arc<Grid>, samples: &[Vec<f64>]) -> Self {
        let n = grid.n_points();
        let mut coeffs = Vec::with_capacity(samples.len() * n);
        for comp in samples {
            assert_eq!(comp.len(), n, "sample count does not match grid");
            let mut buf: Vec<Complex64> = comp.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            grid.forward(&mut buf);
            coeffs.extend(buf);
        }
        let mut f = SpectralField {
            grid: grid.clone(),
            components: samples.len(),
            coeffs,
        };
        f.symmetrize();
        f
    }

    /// Transform physical samples and zero everything outside the dealiasing band.
    pub fn from_physical_dealiased(grid: &Arc<Grid>, samples: &[Vec<f64>]) -> Self {
        let mut f = Self::from_physical(grid, samples);
        f.dealias();
        f
    }

    /// Scalar field from a single vector of samples, dealiased.
    pub fn scalar(grid: &Arc<Grid>, samples: Vec<f64>) -> Self {
        Self::from_physical_dealiased(grid, &[samples])
    }

    /// Sample a closure `f(x, component)` at the nodes.
    pub fn from_fn(grid: &Arc<Grid>, components: usize, f: impl Fn([f64; 2], usize) -> f64) -> Self {
        let nodes = grid.nodes();
        let samples: Vec<Vec<f64>> = (0..components)
            .map(|c| nodes.iter().map(|&x| f(x, c)).collect())
            .collect();
        Self::from_physical(grid, &samples)
    }

    /// Seeded random field whose modes satisfy `|k_i| <= band` on every axis.
    ///
    /// Amplitudes decay like `(1 + |k|^2)^(-decay/2)`; the mean mode is left at zero
    /// when `zero_mean` is set.
    pub fn random_band_limited<R: Rng>(
        grid: &Arc<Grid>,
        components: usize,
        band: usize,
        amplitude: f64,
        decay: f64,
        zero_mean: bool,
        rng: &mut R,
    ) -> Self {
        let n = grid.n_points();
        let mut f = Self::zeros(grid, components);
        for c in 0..components {
            for idx in 0..n {
                let k = grid.wavenumber(idx);
                if k[0].unsigned_abs() as usize > band || k[1].unsigned_abs() as usize > band {
                    continue;
                }
                if !grid.in_band(idx) || (zero_mean && k == [0, 0]) {
                    continue;
                }
                let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
                let w = amplitude * (1.0 + k2).powf(-0.5 * decay);
                f.coeffs[c * n + idx] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
            }
        }
        f.symmetrize();
        f
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component_coeffs(&self, c: usize) -> &[Complex64] {
        let n = self.grid.n_points();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_coeffs_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.n_points();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            components: 1,
            coeffs: self.component_coeffs(c).to_vec(),
        }
    }

    /// Concatenate the components of several fields on one grid.
    pub fn stack(parts: &[&SpectralField]) -> SpectralField {
        let grid = parts[0].grid.clone();
        let mut coeffs = Vec::new();
        let mut components = 0;
        for p in parts {
            assert!(grid.same_as(&p.grid), "stacking fields from different grids");
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        SpectralField {
            grid,
            components,
            coeffs,
        }
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.components != other.components {
            return Err(Error::GridMismatch(format!(
                "{} vs {} components on {:?} vs {:?}",
                self.components,
                other.components,
                self.grid.spec(),
                other.grid.spec()
            )));
        }
        Ok(())
    }

    /// All coefficients finite.
    pub fn validate(&self) -> Result<()> {
        if self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidField("non-finite coefficient".into()))
        }
    }

    /// Largest violation of `c(-xi) = conj(c(xi))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n_points();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let s = self.component_coeffs(c);
            for idx in 0..n {
                worst = worst.max((s[idx] - s[self.grid.mirror(idx)].conj()).norm());
            }
        }
        worst
    }

    /// Project onto Hermitian-symmetric coefficients.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n_points();
        for c in 0..self.components {
            let base = c * n;
            for idx in 0..n {
                let m = self.grid.mirror(idx);
                if m < idx {
                    continue;
                }
                let a = self.coeffs[base + idx];
                let b = self.coeffs[base + m];
                let avg = (a + b.conj()) * 0.5;
                self.coeffs[base + idx] = avg;
                self.coeffs[base + m] = avg.conj();
            }
        }
    }

    pub fn dealias(&mut self) {
        let n = self.grid.n_points();
        for c in 0..self.components {
            self.grid.dealias(&mut self.coeffs[c * n..(c + 1) * n]);
        }
    }

    pub fn component_physical(&self, c: usize) -> Vec<f64> {
        let mut buf = self.component_coeffs(c).to_vec();
        self.grid.inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        (0..self.components).map(|c| self.component_physical(c)).collect()
    }

    /// Mean value of one component over the cell.
    pub fn mean(&self, c: usize) -> f64 {
        self.component_coeffs(c)[0].re
    }

    pub fn max_abs_physical(&self) -> f64 {
        (0..self.components)
            .flat_map(|c| self.component_physical(c))
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Multiply every coefficient by a real symbol evaluated at its flat index.
    pub fn apply_multiplier(&self, symbol: impl Fn(usize) -> f64) -> SpectralField {
        let n = self.grid.n_points();
        let mut out = self.clone();
        for c in 0..self.components {
            for idx in 0..n {
                out.coeffs[c * n + idx] *= symbol(idx);
            }
        }
        out
    }

    /// `Lambda^s = (1 - Laplacian)^(s/2)`.
    pub fn lambda(&self, s: f64) -> SpectralField {
        let g = self.grid.clone();
        self.apply_multiplier(|idx| g.bracket(idx).powf(s))
    }

    /// Partial derivative along one axis, applied to every component.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let n = self.grid.n_points();
        let mut out = self.clone();
        for c in 0..self.components {
            for idx in 0..n {
                let k = self.grid.xi_diff(idx)[axis];
                out.coeffs[c * n + idx] *= Complex64::new(0.0, k);
            }
        }
        out
    }

    /// Gradient of a scalar field; one component per axis.
    pub fn gradient(&self) -> SpectralField {
        assert_eq!(self.components, 1, "gradient expects a scalar field");
        let parts: Vec<SpectralField> = (0..self.grid.dimension()).map(|a| self.derivative(a)).collect();
        let refs: Vec<&SpectralField> = parts.iter().collect();
        SpectralField::stack(&refs)
    }

    /// Divergence of a vector field with one component per axis.
    pub fn divergence(&self) -> SpectralField {
        let d = self.grid.dimension();
        assert_eq!(self.components, d, "divergence expects a vector field");
        let n = self.grid.n_points();
        let mut out = SpectralField::zeros(&self.grid, 1);
        for a in 0..d {
            for idx in 0..n {
                let k = self.grid.xi_diff(idx)[a];
                out.coeffs[idx] += Complex64::new(0.0, k) * self.coeffs[a * n + idx];
            }
        }
        out
    }

    /// `|f|_{H^s}` summed over components, normalized so that `s = 0` gives the continuum L2 norm.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let n = self.grid.n_points();
        let mut acc = 0.0;
        for c in 0..self.components {
            for idx in 0..n {
                let z = self.coeffs[c * n + idx];
                let sq = z.norm_sqr();
                if sq != 0.0 {
                    acc += self.grid.bracket(idx).powf(2.0 * s) * sq;
                }
            }
        }
        (acc * self.grid.volume()).sqrt()
    }

    /// Checked variant of [`sobolev_norm`](Self::sobolev_norm).
    pub fn try_sobolev_norm(&self, s: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.sobolev_norm(s))
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// Real L2 inner product over the cell.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        debug_assert!(self.check_grid(other).is_ok());
        let acc: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        acc * self.grid.volume()
    }

    /// Sharp cutoff: keep a mode iff `<xi> <= theta`.
    pub fn smooth(&self, theta: f64) -> Result<SpectralField> {
        if !(theta >= 1.0) {
            return Err(Error::Parameter(format!("smoothing parameter must be >= 1, got {theta}")));
        }
        let n = self.grid.n_points();
        let mut out = self.clone();
        for c in 0..self.components {
            for idx in 0..n {
                if self.grid.bracket(idx) > theta {
                    out.coeffs[c * n + idx] = ZERO;
                }
            }
        }
        Ok(out)
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        debug_assert!(self.check_grid(x).is_ok());
        for (y, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += xv * a;
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out *= a;
        out
    }

    /// Largest coefficient difference in absolute value.
    pub fn max_coeff_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        debug_assert!(self.check_grid(rhs).is_ok());
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        debug_assert!(self.check_grid(rhs).is_ok());
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<f64> for SpectralField {
    fn mul_assign(&mut self, rhs: f64) {
        for a in self.coeffs.iter_mut() {
            *a *= rhs;
        }
    }
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

/// Returns `(|f|_{s''}, |f|_s^mu |f|_{s'}^(1-mu))` with `mu s + (1 - mu) s' = s''`.
pub fn interpolate_bound_check(f: &SpectralField, s: f64, s_prime: f64, s_mid: f64) -> Result<(f64, f64)> {
    if !(s <= s_mid && s_mid <= s_prime) {
        return Err(Error::Parameter(format!(
            "interpolation requires s <= s'' <= s', got ({s}, {s_mid}, {s_prime})"
        )));
    }
    f.validate()?;
    let lhs = f.sobolev_norm(s_mid);
    if s_prime == s {
        return Ok((lhs, f.sobolev_norm(s)));
    }
    let mu = (s_prime - s_mid) / (s_prime - s);
    let rhs = f.sobolev_norm(s).powf(mu) * f.sobolev_norm(s_prime).powf(1.0 - mu);
    Ok((lhs, rhs))
}
