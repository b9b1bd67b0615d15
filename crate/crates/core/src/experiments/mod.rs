//! Config-driven experiments shared by the command-line runner and the acceptance suite.

mod config;
mod output;
mod runs;
mod validate;

pub use config::{
    Component, Config, GridConfig, Method, PhysicsConfig, Profile, Regime, ScalingConfig, ScheduleConfig, SolitaryConfig,
    SolverConfig, StabilityConfig, TimeConfig, SCHEMA_VERSION,
};
pub use output::{csv_preamble, write_scaling_csv, write_stability_csv, write_trajectory_csv};
pub use runs::{
    loglog_slope, mass_drift, run_agreement, run_mol, run_nash_moser, run_scaling, run_schedule, run_solitary, run_solve,
    run_stability, solve_with, sup_distance, AgreementReport, NashMoserRun, ScalingSeries, ScheduleReport, SolitaryReport,
    SolveReport, StabilityReport, SweepRow,
};
pub use validate::{run_validate, Check, ValidationReport};
