//! Construction of 1-D Schrödinger potentials from prescribed positive ground
//! states via `V = psi''/psi`, convex double-well families, asymmetry
//! quotients, and certification that sup-norm-small perturbations of the
//! potential can change the left/right probability ratio by any factor.

pub mod asymmetry;
pub mod certify;
pub mod funcalg;
pub mod groundmap;
pub mod spectral;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
