use std::sync::Arc;

use crate::banach_scale::{Grid, SpectralField};
use crate::error::{Error, Result};

/// Tolerance and iteration cap for the mass-operator inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions { tol: 1e-12, max_iter: 500 }
    }
}

/// Shallowness `mu`, nonlinearity `eps`, bottom profile `b` and depth floor `h0`.
#[derive(Debug, Clone)]
pub struct PhysicalParams {
    pub mu: f64,
    pub eps: f64,
    pub bathymetry: SpectralField,
    pub h0: f64,
    pub cg: CgOptions,
}

impl PhysicalParams {
    pub fn new(mu: f64, eps: f64, bathymetry: SpectralField, h0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::Parameter(format!("mu must lie in [0, 1), got {mu}")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Parameter(format!("eps must lie in (0, 1], got {eps}")));
        }
        if !(h0 > 0.0 && h0.is_finite()) {
            return Err(Error::Parameter(format!("h0 must be positive, got {h0}")));
        }
        if bathymetry.components() != 1 {
            return Err(Error::Parameter("bathymetry must be a scalar field".into()));
        }
        bathymetry.validate()?;
        Ok(PhysicalParams {
            mu,
            eps,
            bathymetry,
            h0,
            cg: CgOptions::default(),
        })
    }

    pub fn flat(grid: &Arc<Grid>, mu: f64, eps: f64, h0: f64) -> Result<Self> {
        Self::new(mu, eps, SpectralField::zeros(grid, 1), h0)
    }

    /// `eps = sqrt(mu)`.
    pub fn serre(grid: &Arc<Grid>, mu: f64, h0: f64) -> Result<Self> {
        Self::flat(grid, mu, mu.sqrt(), h0)
    }

    pub fn with_cg(mut self, cg: CgOptions) -> Self {
        self.cg = cg;
        self
    }

    /// Shift the bottom so that its mean is zero.
    pub fn with_zero_mean_bathymetry(mut self) -> Self {
        self.bathymetry.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.bathymetry.grid()
    }

    pub fn dimension(&self) -> usize {
        self.grid().dimension()
    }

    /// The scaled bottom `eps b` entering the dispersive operators.
    pub fn scaled_bottom(&self) -> SpectralField {
        self.bathymetry.scaled(self.eps)
    }

    /// Depth `h = 1 + eps (zeta - b)`.
    pub fn depth(&self, zeta: &SpectralField) -> SpectralField {
        let mut h = (zeta - &self.bathymetry).scaled(self.eps);
        h.coeffs_mut()[0] += 1.0;
        h
    }
}

/// Velocity `V` (one component per axis) and surface elevation `zeta`.
#[derive(Debug, Clone)]
pub struct GnState {
    pub v: SpectralField,
    pub zeta: SpectralField,
}

impl GnState {
    pub fn new(v: SpectralField, zeta: SpectralField) -> Result<Self> {
        let d = v.grid().dimension();
        if v.components() != d || zeta.components() != 1 {
            return Err(Error::Parameter(format!(
                "state needs {d} velocity components and a scalar elevation, got {} and {}",
                v.components(),
                zeta.components()
            )));
        }
        if !v.grid().same_as(zeta.grid()) {
            return Err(Error::GridMismatch("velocity and elevation live on different grids".into()));
        }
        Ok(GnState { v, zeta })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        GnState {
            v: SpectralField::zeros(grid, grid.dimension()),
            zeta: SpectralField::zeros(grid, 1),
        }
    }

    /// Split a stacked field `(V_1, .., V_d, zeta)`.
    pub fn from_field(u: &SpectralField) -> Result<Self> {
        let d = u.grid().dimension();
        if u.components() != d + 1 {
            return Err(Error::Parameter(format!(
                "stacked state needs {} components, got {}",
                d + 1,
                u.components()
            )));
        }
        let parts: Vec<SpectralField> = (0..d).map(|c| u.component(c)).collect();
        let refs: Vec<&SpectralField> = parts.iter().collect();
        Ok(GnState {
            v: SpectralField::stack(&refs),
            zeta: u.component(d),
        })
    }

    pub fn to_field(&self) -> SpectralField {
        SpectralField::stack(&[&self.v, &self.zeta])
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.v.grid()
    }
}
