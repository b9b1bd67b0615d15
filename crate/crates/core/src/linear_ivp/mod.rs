//! Linearized Green-Naghdi initial value problems in rescaled time.
//!
//! The singular part `L u / eps = (grad zeta, div V) / eps` is removed exactly by
//! the unitary group [`evolution_u`]; the remaining equation for
//! `w = U(-tau) v` is integrated with classical RK4. Reference coefficients are
//! interpolated in the conjugated frame when the coefficients were built from one.

mod evolution;
mod solver;

pub use evolution::{evolution_state, evolution_u, singular_part};
pub use solver::{
    default_substeps, energy_estimate_probe, integrate_conjugated, solve_conjugated, solve_linearized, EnergyProbe,
    IvpData, SolverOptions, SolverStats,
};
