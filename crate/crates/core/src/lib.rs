//! Entanglement spread toolkit.
//!
//! Everything in this crate is a pure computation over small dense objects:
//! Schmidt spectra kept in log-domain so that tensor powers with thousands of
//! copies stay representable, a pure-state simulator for two-party protocols
//! that routes every discarded or leaked system into an explicit environment,
//! and estimators for the entangling power of gates and the rate quantities
//! of channels.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line live in the `entspread` companion crate.
//!
//! All logarithms are base 2.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod capacity;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectra::{BipartiteState, SchmidtSpectrum};
