//! Simulation and analysis of a CHSH test between one photon's polarization
//! and the entangled state of a photon pair.
//!
//! [`qstate`] holds the state-vector algebra, [`optics`] the Jones-matrix
//! elements, [`experiment`] the preparation and measurement pipeline,
//! [`stats`] counting statistics and the CHSH analysis, and [`harness`] the
//! batch runs behind the `entbell` command.

pub mod config;
pub mod error;
pub mod experiment;
pub mod harness;
pub mod optics;
pub mod qstate;
pub mod stats;

pub use error::{Error, Result};
