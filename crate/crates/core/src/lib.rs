pub mod analytic;
pub mod ensembles;
pub mod error;
pub mod estimators;
pub mod formats;
pub mod harness;
pub mod noise;
pub mod rng;
pub mod statevector;
pub mod stats;
pub mod summation;

pub use error::{Error, Result};
