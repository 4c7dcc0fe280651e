//! Correlation functions and mode-space entanglement diagnostics for
//! three-photon states entangled in time and space.
//!
//! Two families of states are modelled:
//!
//! - the three-mode `|1,1,1>` state, which behaves like a W state: two of its
//!   photons stay correlated after the third is lost;
//! - the two-mode `|1,2>` state with a degenerate photon pair, which behaves
//!   like a GHZ state: losing one photon leaves an unentangled mixture.
//!
//! [`spectra`] holds the scalar spectral ingredients, [`correlators`]
//! evaluates the temporal and spatial G(2)/G(3) surfaces, [`mode_space`]
//! builds frequency-bin discretizations of both states and traces out one
//! photon, and [`qubit_toy`] reproduces the three-qubit GHZ/W algebra the
//! analogy rests on. [`cli`] wires everything into the `triphoton` binary.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correlators;
pub mod error;
pub mod mode_space;
pub mod qubit_toy;
pub mod spectra;

mod czt;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
