//! Rotational excitation of diatomic molecules by trains of short laser pulses
//! whose linear polarization rotates from pulse to pulse.

pub mod angmom;
pub mod basis;
pub mod error;
pub mod interference;
pub mod molecule;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod pulsetrain;
pub mod selfcheck;
pub mod sweep;

pub use error::{Error, Result};
