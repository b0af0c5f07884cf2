//! Spectral and multifractal quantities of the generalized Thue-Morse
//! measures: autocorrelations, correlation exponent, pressure, L^q and
//! Legendre spectra, and the dimensions derived from them.

pub mod autocorr;
pub mod bracket;
pub mod cli;
pub mod combinatorics;
pub mod dyadic;
pub mod error;
pub mod measure;
pub mod param;
pub mod potential;
pub mod pressure;
pub mod sequence;
pub mod spectra;
pub mod verify;

pub use bracket::{Bracket, ExtReal};
pub use dyadic::{cylinder_of, DyadicWord};
pub use error::{Error, Result};
pub use param::CircleParameter;
