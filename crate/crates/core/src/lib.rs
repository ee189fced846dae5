//! Sequential qubit measurements and the tools needed to reason about them:
//! POVMs, Lüders instruments, joint measurability, hidden-variable conditions
//! (macrorealism per se, no-signalling in time, retrievability of information),
//! binary Wasserstein-2 measurement uncertainty and a Jones-calculus model of
//! the photonic interferometer that realises the noisy-Z instrument.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command line live in the `roi-lab` companion crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod blw;
pub mod hv;
pub mod jm;
pub mod linalg;
pub mod measurements;
pub mod photonic;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{CMatrix, HermEig, C64};
pub use measurements::{BinaryPovm, Instrument, JointPovm, Outcome};
pub use states::PolKet;
