//! IO, file formats, and command plumbing for the `retrolab` binary.
//!
//! The numerical models live in `retrolab-core`; this crate adds JSON
//! configuration, the event/spectrum CSV formats, run manifests, and a
//! worker-splitting driver whose output is byte-identical at any worker
//! count.

pub mod config;
pub mod error;
pub mod formats;
pub mod manifest;
pub mod parallel;

pub use error::CliError;
