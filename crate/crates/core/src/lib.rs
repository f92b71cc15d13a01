//! Object-pointer entanglement and bath-induced decoherence of a measurement
//! apparatus: decoherence exponents, decoherence and entanglement times,
//! density-matrix elements and a finite-bath Wick oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod wick_oracle;

pub use error::{Error, Result};
