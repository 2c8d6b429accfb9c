//! Exact statistics of Fock-state condensates in linear-optical
//! interferometers, and the nonlocality tests they support.
//!
//! Condensates with definite particle numbers carry no phase, yet detecting
//! all of their particles after an interferometer produces interference
//! fringes and correlations strong enough to violate local realism. This
//! crate computes those statistics exactly:
//!
//! - [`optics`] builds transfer matrices from beamsplitters, phase shifters
//!   and mirrors, including the two-source interferometer and the
//!   three-source ring.
//! - [`fock`] turns a transfer matrix and source populations into outcome
//!   amplitudes, distributions and parity correlations.
//! - [`phase`] evaluates the same probabilities as an integral over a
//!   relative phase and a quantum phase, and compares them with a model in
//!   which the condensates carry a pre-existing relative phase.
//! - [`nonlocality`] covers the BCHSH family and the three-station GHZ sign
//!   argument; [`hardy`] covers Hardy-type impossibilities.
//! - [`cli`] backs the `fockbell` binary.
//!
//! ```
//! use fockbell::fock::{distribution, parity_expectation, ParityAssignment, SourceSpec};
//! use fockbell::optics::two_source_interferometer;
//!
//! let u = two_source_interferometer(0.4, 0.2);
//! let dist = distribution(&u, &SourceSpec::new([2, 2])).unwrap();
//! let e = parity_expectation(&dist, &ParityAssignment::paired(2), None).unwrap();
//! assert!((e - 0.3f64.cos().powi(4)).abs() < 1e-12);
//! ```

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod exact;
pub mod fock;
pub mod hardy;
pub mod nonlocality;
pub mod optics;
pub mod optimize;
pub mod output;
pub mod phase;
pub mod scalar;

pub use error::{Error, Result};
pub use fock::{
    amplitude, distribution, parity_expectation, OccupationVector, OutcomeDistribution,
    ParityAssignment, SourceSpec,
};
pub use optics::{AngleSettings, TransferMatrix};
