//! Scenario-based multi-product copywriting: bundle selection, arbitration,
//! prefix language model generation and rule-based quality enhancement.

pub mod arbitrator;
pub mod artifact;
pub mod catalog;
pub mod dsplm;
pub mod enhancement;
pub mod error;
pub mod features;
pub mod metrics;
pub mod pipeline;
pub mod scalar;
pub mod selection;
pub mod synth;
pub mod text;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Prefix language model in single precision, the shipped default.
pub type PrefixLmF32 = dsplm::PrefixLm<f32>;
/// Prefix language model in double precision, used for gradient checks.
pub type PrefixLmF64 = dsplm::PrefixLm<f64>;
pub type ProductWordModelF32 = catalog::ProductWordModel<f32>;
pub type ProductWordModelF64 = catalog::ProductWordModel<f64>;
pub type ArbitratorModelF32 = arbitrator::ArbitratorModel<f32>;
pub type ArbitratorModelF64 = arbitrator::ArbitratorModel<f64>;
