use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::banach_scale::{Grid, GridSpec, SpectralField};
use crate::error::{Error, Result};
use crate::green_naghdi::{CgOptions, LinearizationMode, PhysicalParams};
use crate::nashmoser::{compute_schedule, ScheduleParams, SolveOptions};
use crate::reference::SolitaryWave;

pub const SCHEMA_VERSION: u32 = 1;

/// Versioned experiment configuration. Every field has a default; the
/// reference file is `configs/defaults.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub schema_version: u32,
    pub seed: u64,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub initial: Profile,
    pub time: TimeConfig,
    pub schedule: ScheduleConfig,
    pub solver: SolverConfig,
    pub stability: StabilityConfig,
    pub scaling: ScalingConfig,
    pub solitary: SolitaryConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            grid: GridConfig::default(),
            physics: PhysicsConfig::default(),
            initial: Profile::Mode {
                amplitude: 0.1,
                mode: vec![4],
                component: Component::Elevation,
            },
            time: TimeConfig::default(),
            schedule: ScheduleConfig::default(),
            solver: SolverConfig::default(),
            stability: StabilityConfig::default(),
            scaling: ScalingConfig::default(),
            solitary: SolitaryConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Nodes per axis; one entry for 1D, two for 2D.
    pub nodes: Vec<usize>,
    /// Cell length per axis.
    pub length: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nodes: vec![128],
            length: vec![32.0 * PI],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `eps = sqrt(mu)`.
    Serre,
    /// `eps = 1`.
    GreenNaghdi,
    /// `eps` taken from the config.
    Custom,
}

impl Regime {
    pub fn eps(self, mu: f64, custom: Option<f64>) -> Result<f64> {
        match self {
            Regime::Serre => Ok(mu.sqrt()),
            Regime::GreenNaghdi => Ok(1.0),
            Regime::Custom => custom.ok_or_else(|| Error::Config("regime \"custom\" needs physics.eps".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub regime: Regime,
    pub mu: f64,
    pub eps: Option<f64>,
    pub h0: f64,
    pub bathymetry: Profile,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig {
            regime: Regime::Serre,
            mu: 0.1,
            eps: None,
            h0: 0.5,
            bathymetry: Profile::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Elevation,
    Velocity,
    Both,
}

/// Spatial data: a state `(V, zeta)` or a scalar, depending on where it is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// `amplitude cos(2 pi k.x / L)` on the elevation and/or the first velocity
    /// component; `mode` lists integer wavenumbers per axis. With both components
    /// this is a right-going linear wave, whose `X^0` norm the free evolution keeps.
    Mode {
        amplitude: f64,
        mode: Vec<i64>,
        component: Component,
    },
    /// Seeded band-limited random field with zero mean.
    Random { amplitude: f64, band: usize, decay: f64 },
    /// Flat-bottom 1D solitary wave; initial states only.
    Solitary { amplitude: f64 },
}

impl Profile {
    fn phase(grid: &Grid, mode: &[i64]) -> Result<Vec<f64>> {
        let d = grid.dimension();
        if mode.len() != d {
            return Err(Error::Config(format!("mode needs {d} wavenumbers, got {}", mode.len())));
        }
        let spec = grid.spec();
        Ok((0..d).map(|i| 2.0 * PI * mode[i] as f64 / spec.domain_length[i]).collect())
    }

    /// Scalar field (bathymetry).
    pub fn scalar(&self, grid: &Arc<Grid>, seed: u64) -> Result<SpectralField> {
        match self {
            Profile::Zero => Ok(SpectralField::zeros(grid, 1)),
            Profile::Mode { amplitude, mode, .. } => {
                let k = Self::phase(grid, mode)?;
                let a = *amplitude;
                let mut f = SpectralField::from_fn(grid, 1, |x, _| a * (k.iter().zip(x).map(|(k, x)| k * x).sum::<f64>()).cos());
                f.dealias();
                Ok(f)
            }
            Profile::Random { amplitude, band, decay } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(SpectralField::random_band_limited(grid, 1, *band, *amplitude, *decay, true, &mut rng))
            }
            Profile::Solitary { .. } => Err(Error::Config("a solitary profile describes a state, not a scalar".into())),
        }
    }

    /// Stacked state `(V, zeta)`.
    pub fn state(&self, params: &PhysicalParams, seed: u64) -> Result<SpectralField> {
        let grid = params.grid();
        let d = grid.dimension();
        match self {
            Profile::Zero => Ok(SpectralField::zeros(grid, d + 1)),
            Profile::Mode {
                amplitude,
                mode,
                component,
            } => {
                let k = Self::phase(grid, mode)?;
                let a = *amplitude;
                let (on_v, on_z) = match component {
                    Component::Elevation => (0.0, 1.0),
                    Component::Velocity => (1.0, 0.0),
                    Component::Both => (1.0, 1.0),
                };
                let mut f = SpectralField::from_fn(grid, d + 1, |x, c| {
                    let ph: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum();
                    if c == d {
                        on_z * a * ph.cos()
                    } else if c == 0 {
                        on_v * a * ph.cos()
                    } else {
                        0.0
                    }
                });
                f.dealias();
                Ok(f)
            }
            Profile::Random { amplitude, band, decay } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(SpectralField::random_band_limited(grid, d + 1, *band, *amplitude, *decay, true, &mut rng))
            }
            Profile::Solitary { amplitude } => {
                let mut f = SolitaryWave::new(params, *amplitude)?.state(params, 0.0)?.to_field();
                f.dealias();
                Ok(f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    /// Horizon in rescaled time.
    pub horizon: f64,
    pub steps: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            horizon: 1.0,
            steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleConfig {
    pub m: f64,
    pub d1: f64,
    pub d1p: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
    #[serde(rename = "P")]
    pub big_p: f64,
    pub margin: f64,
    pub s0: f64,
    pub s: f64,
    pub theta0: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            m: 2.0,
            d1: 2.0,
            d1p: 0.0,
            big_d: 4.0,
            big_p: 38.5,
            margin: 0.5,
            s0: 1.0,
            s: 3.0,
            theta0: 10.0,
        }
    }
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<ScheduleParams> {
        compute_schedule(self.m, self.d1, self.d1p, self.big_d, self.big_p, self.margin)?
            .with_levels(self.s0, self.s)
            .with_theta0(self.theta0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NashMoser,
    Mol,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: Method,
    pub target_residual: f64,
    pub k_max: usize,
    pub linearization: LinearizationMode,
    /// RK4 substeps per output step in the linearized solver; automatic when null.
    pub linear_substeps: Option<usize>,
    pub growth_limit: f64,
    /// RK4 substeps per output step in the method-of-lines solver.
    pub mol_substeps: usize,
    pub divergence_factor: f64,
    pub divergence_patience: usize,
    pub theta_retries: usize,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Both,
            target_residual: 1e-8,
            k_max: 25,
            linearization: LinearizationMode::Exact,
            linear_substeps: None,
            growth_limit: 10.0,
            mol_substeps: 4,
            divergence_factor: 10.0,
            divergence_patience: 3,
            theta_retries: 3,
            cg_tol: 1e-12,
            cg_max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub iotas: Vec<f64>,
    /// Shape `W` of the perturbation `iota tau W` added to the reference solution.
    pub perturbation: Profile,
    pub method: Method,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            iotas: vec![1e-2, 1e-3, 1e-4],
            perturbation: Profile::Mode {
                amplitude: 1.0,
                mode: vec![2],
                component: Component::Both,
            },
            method: Method::NashMoser,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingConfig {
    pub mus: Vec<f64>,
    pub regimes: Vec<Regime>,
    /// Fixed residual shape `R_0`; the approximate solution has residual `mu^2 R_0` in original time.
    pub residual: Profile,
    pub method: Method,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            mus: vec![0.2, 0.1, 0.05],
            regimes: vec![Regime::GreenNaghdi, Regime::Serre],
            residual: Profile::Mode {
                amplitude: 1.0,
                mode: vec![2],
                component: Component::Both,
            },
            method: Method::NashMoser,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolitaryConfig {
    pub nodes: usize,
    pub length: f64,
    pub mu: f64,
    pub amplitude: f64,
    /// Output steps over one transit of the domain.
    pub steps: usize,
    pub substeps: usize,
}

impl Default for SolitaryConfig {
    fn default() -> Self {
        SolitaryConfig {
            nodes: 512,
            length: 30.0,
            mu: 0.1,
            amplitude: 0.5,
            steps: 400,
            substeps: 2,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn check(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.grid.nodes.len() != self.grid.length.len() || !(1..=2).contains(&self.grid.nodes.len()) {
            return Err(Error::Config("grid.nodes and grid.length need one or two matching entries".into()));
        }
        if !(self.time.horizon > 0.0) || self.time.steps < 4 {
            return Err(Error::Config("time.horizon must be positive and time.steps at least 4".into()));
        }
        Ok(())
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_string(self).expect("config serializes").as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        let spec = if self.grid.nodes.len() == 1 {
            GridSpec::one_d(self.grid.nodes[0], self.grid.length[0])
        } else {
            GridSpec::two_d(
                [self.grid.nodes[0], self.grid.nodes[1]],
                [self.grid.length[0], self.grid.length[1]],
            )
        };
        Grid::new(spec)
    }

    pub fn eps(&self) -> Result<f64> {
        self.physics.regime.eps(self.physics.mu, self.physics.eps)
    }

    /// Physical parameters on `grid` with shallowness `mu` and nonlinearity `eps`.
    pub fn params_with(&self, grid: &Arc<Grid>, mu: f64, eps: f64) -> Result<PhysicalParams> {
        let bottom = self.physics.bathymetry.scalar(grid, self.seed.wrapping_add(1))?;
        Ok(PhysicalParams::new(mu, eps, bottom, self.physics.h0)?.with_cg(CgOptions {
            tol: self.solver.cg_tol,
            max_iter: self.solver.cg_max_iter,
        }))
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        self.params_with(&self.grid()?, self.physics.mu, self.eps()?)
    }

    pub fn initial_state(&self, params: &PhysicalParams) -> Result<SpectralField> {
        self.initial.state(params, self.seed)
    }

    pub fn solve_options(&self) -> SolveOptions {
        let s = &self.solver;
        let mut opts = SolveOptions::new(self.time.horizon, self.time.steps);
        opts.k_max = s.k_max;
        opts.target_residual = s.target_residual;
        opts.divergence_factor = s.divergence_factor;
        opts.divergence_patience = s.divergence_patience;
        opts.theta_retries = s.theta_retries;
        opts
    }

    /// Same instance with the time step halved and the residual target lowered a hundredfold.
    pub fn refined(&self) -> Config {
        let mut c = self.clone();
        c.time.steps *= 2;
        c.solver.target_residual *= 1e-2;
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_file_matches_the_built_in_defaults() {
        let text = include_str!("../../../../configs/defaults.json");
        let cfg = Config::from_json(text).unwrap();
        assert_eq!(cfg, Config::default());
    }

    #[test]
    fn partial_configs_fill_defaults_and_unknown_keys_fail() {
        let cfg = Config::from_json(r#"{"schema_version": 1, "seed": 7}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.grid, GridConfig::default());
        assert!(Config::from_json(r#"{"schema_version": 1, "sed": 7}"#).is_err());
        assert!(Config::from_json(r#"{"schema_version": 2}"#).is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn regimes_fix_eps() {
        assert_eq!(Regime::Serre.eps(0.09, None).unwrap(), 0.3);
        assert_eq!(Regime::GreenNaghdi.eps(0.09, None).unwrap(), 1.0);
        assert!(Regime::Custom.eps(0.09, None).is_err());
        assert_eq!(Regime::Custom.eps(0.09, Some(0.5)).unwrap(), 0.5);
    }
}
