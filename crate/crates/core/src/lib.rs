//! Full counting statistics of boson exchange between a two-level system and
//! two squeezed harmonic reservoirs.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: reservoir parameters and the squeezed Markovian jump rates.
//! * [`jets`]: truncated power series used to differentiate the cumulant
//!   generating function to arbitrary order.
//! * [`cgf`]: tilted generator, closed-form cumulant generating function,
//!   thermodynamic affinity and the Gallavotti–Cohen check.
//! * [`cumulants`]: cumulant extraction and the closed-form expressions for
//!   flux, noise and skewness, switching points and saturation values.
//! * [`trajectory`]: an independent continuous-time jump simulation used as
//!   a stochastic oracle.
//! * [`analysis`]: sweeps, thermodynamic uncertainty products and figure
//!   data.
//! * [`cli`]: the command-line front end.
//!
//! Units follow ħ = k_B = 1 throughout.

pub mod analysis;
pub mod cgf;
pub mod cli;
pub mod config;
pub mod cumulants;
mod error;
pub mod jets;
pub mod model;
pub mod table;
pub mod trajectory;

pub use error::{Error, Result};
pub use model::{ModelParams, RateSet, ReservoirSpec, Side, Thermal};
