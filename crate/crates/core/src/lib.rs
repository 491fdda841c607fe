//! Analytical two-qubit synthesis over arbitrary native basis gates.
//!
//! The crate is organised bottom-up: [`matcore`] supplies small dense
//! complex matrices, [`kak`] computes Cartan coordinates, [`calib`] holds
//! the closed-form sandwich solvers, [`synth`] compiles two-qubit unitaries
//! into basis-gate sequences, [`circuits`] lifts that to whole circuits,
//! [`hwmodel`] scores instruction sets and [`oracle`] provides independent
//! numerical checks.

pub mod calib;
pub mod circuits;
pub mod error;
pub mod hwmodel;
pub mod kak;
pub mod matcore;
pub mod oracle;
mod optim;
pub mod synth;

pub use error::{Error, Result};
pub use matcore::{C2x2, C4x4, C64};
