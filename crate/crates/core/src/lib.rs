//! Exact simulation of random covering sets on digit spaces.
//!
//! Geometry is generic over an exact rational type and estimators over a
//! float type; the aliases below fix the usual choices.

pub mod covering;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod limsup;
pub mod process;
pub mod rng;
pub mod scalar;
pub mod sequences;
pub mod space;
pub mod target;

pub use error::{Error, Result};
pub use scalar::{ExactScalar, Real};

/// Default exact scalar for geometry.
pub type Rational = num_rational::Ratio<i128>;

pub type Space = space::DigitSpace<Rational>;
pub type Radii = sequences::RadiusSequence<Rational>;
pub type Blocks = sequences::BlockTable<Rational>;
pub type Orbit = process::OrbitSource<Rational>;
pub type Trace = covering::CoverTrace<Rational>;
pub type Limsup = limsup::LimsupModel<Rational>;
pub type Percolation = limsup::PercolationRun<Rational>;
pub type BoxEstimate = estimator::DimEstimate<f64>;
