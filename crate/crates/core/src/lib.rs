//! Heralded-SPDC boson sampling.
//!
//! The crate has three layers:
//!
//! * [`analytic`] gives closed-form probabilities for a farm of heralded
//!   down-conversion sources feeding a post-selected interferometer:
//!   heralding, preparation, heralding fidelity, post-selection, and the
//!   detector efficiencies needed to hit given confidence bounds.
//! * [`unitary`], [`permanent`], [`fock`] and [`distribution`] form an exact
//!   small-scale boson-sampling engine: Haar-random interferometers, their
//!   triangular beamsplitter decomposition, Ryser permanents and the full
//!   output distribution of a Fock input.
//! * [`montecarlo`] simulates the whole architecture trial by trial and
//!   tallies the rates the analytic layer predicts.
//!
//! Data-parallel loops (permanent chunks, configuration enumeration, trials)
//! use rayon behind the default `parallel` feature and fall back to plain
//! iterators without it. Results are bit-identical either way and at any
//! worker count.

pub mod analytic;
pub mod binomial;
pub mod distribution;
pub mod error;
pub mod fock;
pub mod montecarlo;
pub mod parallel;
pub mod permanent;
pub mod rng;
pub mod unitary;

pub use analytic::{ArchitectureParams, ConfidenceBounds, DetectorModel, SpdcParams};
pub use distribution::{Caps, OutputDistribution};
pub use error::{Error, Result};
pub use fock::FockConfiguration;
pub use montecarlo::{EnsembleStats, Rate, Simulator, TrialRecord};
pub use unitary::{Decomposition, Interferometer, Rotation};

pub use num_complex::Complex64;
