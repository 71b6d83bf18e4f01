//! Core models for a two-photon impact-series interferometer.
//!
//! The crate covers four layers:
//!
//! - [`amplitude`]: elementary domain types (phases, outcomes, path pairs,
//!   subensembles) and the tabulated probability amplitudes of the apparatus.
//! - [`qm`] and [`causal`]: joint probabilities, single-detector
//!   probabilities, and correlation coefficients under the quantum-mechanical
//!   superposition rule and under the causal impact-timing model with its
//!   indistinguishability condition.
//! - [`kinematics`]: lab-frame impact bookkeeping, Lorentz time comparisons,
//!   and the before/non-before classification that selects the causal rule.
//! - [`sim`]: a deterministic, counter-seeded Monte Carlo engine producing
//!   time-tagged detection records, delay spectra, coincidence-window
//!   post-selection, and correlation estimates.
//!
//! Everything here is pure computation over immutable values; the crate is
//! `no_std` (with `alloc`). IO, file formats, and the command-line front end
//! live in the companion `retrolab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod amplitude;
pub mod causal;
pub mod kinematics;
pub mod qm;
pub mod rng;
pub mod sim;
pub mod verify;

pub use amplitude::{
    Arm, ComplexAmplitude, Outcome, PathPair, PhaseSettings, SegmentPair, Sign, Subensemble,
    ANALYTIC_TOLERANCE, SPEED_OF_LIGHT,
};
pub use kinematics::Geometry;
pub use qm::{CorrelationCoefficient, DetectorSide, ProbabilityTable, SinglesPair};
pub use sim::{DetectionRecord, ExperimentConfig};
