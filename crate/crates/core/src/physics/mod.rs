//! Pressure law, perturbation state and the equations of motion.

mod ledger;
mod omega;
mod pressure;
mod rhs;
mod state;

pub use ledger::{l2_energy, l2_ledger, L2Ledger};
pub use omega::{omega, omega_rhs, u1_equation_residual};
pub use pressure::{adaptive_simpson, PressureLaw};
pub use rhs::{rhs, rhs_primitive, rhs_with, viscous_term, RhsTerms, VACUUM_GUARD};
pub use state::{PhysParams, PhysicalFields, State, Tendency};
