//! Numerical toolkit for radial fractional Coulomb-Sobolev energies.
//!
//! The crate evaluates three functionals of radial profiles on [0, inf):
//! the L^p norm, the order-s seminorm (Gagliardo double integral for
//! s < 1, derivative form at s = 1), and the Riesz interaction energy
//! with density power q and potential exponent alpha. On top of those it
//! provides the exact exponent algebra of the interpolation inequality
//! linking them, scaling experiments that verify the known power laws
//! and blow-up thresholds, and a projected-ascent search for extremal
//! quotients.

pub mod bump;
pub mod error;
pub mod experiments;
pub mod exponents;
pub mod functionals;
pub mod grid;
pub mod kernels;
pub mod optimize;
pub mod quad;

pub use error::{CslError, Result};
