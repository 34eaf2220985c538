//! Spectral field arithmetic on the periodic box `[-π, π]²`.

mod field;
mod grid;
mod random;

pub use field::{aniso_norm, derivative, perp_div, perp_grad, product, sobolev_norm, Axis, ScalarField, VectorField};
pub use grid::Grid;
pub use random::{random_field_with, random_smooth_field, SpectrumShape};
