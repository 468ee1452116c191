//! Sampling, path simulation and density evaluation for α-stable and
//! classical tempered stable (CTS) laws.

pub mod cts;
pub mod cli;
pub mod error;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stable_density;
pub mod stable_sampler;
pub mod trajectory;
pub mod validation;

pub use error::{Error, Result};
pub use params::{CtsTriplet, StableLevyTriplet, StableParams};
pub use rng::RngStream;
