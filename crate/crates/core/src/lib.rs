//! Exact truncated-series algebra for Donaldson-Thomas generating functions
//! of threefolds, their BPS reformulation, and the comparison of these data
//! across a flop.

pub mod bps;
pub mod channels;
pub mod conifold;
pub mod degeneration;
pub mod error;
pub mod flop;
pub mod gwdt;
pub mod kernel;
pub mod lattice;
pub mod novikov;
pub mod pipeline;
pub mod reid;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Gaussian, Rational, Scalar};
pub use series::{Series, Window};

/// Exact q-series over the rationals.
pub type QSeries = Series<Rational>;
/// u-series over the Gaussian rationals.
pub type USeries = Series<Gaussian>;
