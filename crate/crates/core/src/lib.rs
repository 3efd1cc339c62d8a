//! Semiclassical spectra of non-normal operators with polynomial symbols.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod predict;
pub mod quadratics;
pub mod quantize;
pub mod symbols;

pub use error::{Error, Result};
