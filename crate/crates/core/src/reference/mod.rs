//! Independent oracles: a method-of-lines solver for the rescaled system, the
//! flat-bottom solitary wave, and residuals of approximate trajectories.

mod manufactured;
mod mol;
mod solitary;

pub use manufactured::{manufactured_residual, ManufacturedResidual};
pub use mol::{mol_solve, mol_solve_problem, MolRun, MolStats};
pub use solitary::{gn0_residual, serre_solitary_wave, SolitaryWave, FROZEN_RESIDUAL_LEVEL};
