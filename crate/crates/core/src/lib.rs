//! Exact summatory arithmetic functions, Abel partial summation with the
//! weight 1/x, and residual checks of asymptotic estimates.
//!
//! Tables are sieved exactly ([`sieves`]), summed on checkpoint grids
//! ([`summation`]), compared with asymptotic models ([`asymptotics`]), and
//! bundled into named, runnable checks ([`claims`]).
//!
//! The summation and asymptotics code is generic over the scalar type; the
//! aliases below fix the two instantiations used in practice.

pub mod asymptotics;
pub mod cache;
pub mod claims;
pub mod error;
pub mod scalar;
pub mod sieves;
pub mod summation;

pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use scalar::{Accumulator, ExactSum, KahanSum, Real, Scalar};
pub use sieves::{FunctionSpec, FunctionTable, SieveConfig};
pub use summation::CheckpointGrid;

/// Double-precision summatory series.
pub type Series = summation::SummatorySeries<f64>;
/// Exact rational summatory series.
pub type ExactSeries = summation::SummatorySeries<BigRational>;
/// Double-precision Abel decomposition.
pub type Decomposition = summation::AbelDecomposition<f64>;
/// Exact rational Abel decomposition.
pub type ExactDecomposition = summation::AbelDecomposition<BigRational>;
pub type Model = asymptotics::AsymptoticModel<f64>;
pub type Term = asymptotics::AsymptoticTerm<f64>;
pub type Envelope = asymptotics::ErrorEnvelope<f64>;
