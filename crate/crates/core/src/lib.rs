//! Busy-period analysis of the M/G/∞ queue: Laplace transform, moments,
//! peakedness and η for a catalog of service laws, exact M/D/∞
//! specializations, and a Monte Carlo oracle.

pub mod cli;
pub mod dist;
pub mod error;
pub mod mdinf;
pub mod moments;
pub mod numeric;
pub mod parse;
pub mod quad;
pub mod sim;
pub mod transform;

pub use dist::{Family, QueueConfig, ServiceDistribution};
pub use error::{Error, Result};
