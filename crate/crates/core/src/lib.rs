//! Nash-Moser iteration over a discrete Sobolev scale, with a pseudospectral
//! realization of the Serre and Green-Naghdi shallow-water equations on a
//! periodic domain.

pub mod banach_scale;
pub mod error;
pub mod experiments;
pub mod gn_problem;
pub mod green_naghdi;
pub mod linear_ivp;
pub mod nashmoser;
pub mod reference;

pub use error::{Error, Result};
