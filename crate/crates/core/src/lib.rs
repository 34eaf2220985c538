//! Pseudo-spectral simulator and verification suite for the 2D viscous,
//! non-resistive compressible MHD system perturbed around the background
//! field `e₂ = (0, 1)` on the periodic box `[-π, π]²`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, transforms, dealiased products, Sobolev norms.
//! * [`physics`]: pressure law, perturbation right-hand side, the combined
//!   quantity Ω and its evolution, the L² energy identity.
//! * [`linear`]: per-wavenumber mode matrices and their spectra.
//! * [`integrator`]: integrating-factor Runge–Kutta time stepping.
//! * [`diagnostics`]: time-weighted energy functionals and decay fits.
//! * [`lemma`]: randomized checks of the commutator and triple-product bounds.
//! * [`harness`]: configuration, checkpoints, scenario presets.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod integrator;
pub mod lemma;
pub mod linear;
pub mod physics;
pub mod spectral;

pub use error::{Error, Result};
