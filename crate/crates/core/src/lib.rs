//! Spectral data of primitive harmonic differentials on Riemann surfaces:
//! period matrices, scalar products, special period matrices and the torus
//! covers they induce.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod differentials;
pub mod error;
pub mod genus2;
pub mod highgenus;
pub mod pairings;
pub mod siegel;
pub mod special;
pub mod torus;

pub use error::{Error, Result};
pub use siegel::{CyclePair, LatticeCharge, ModularMatrix, PeriodMatrix};
