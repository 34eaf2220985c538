use crate::error::Result;
use crate::physics::{PhysParams, State};
use crate::spectral::Axis;

/// Terms of the L² energy identity `dE/dt + D = I₂ + I₃` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Ledger {
    /// `½(∫(1+ρ)|u|² + ‖ρ‖² + ‖b‖²)`
    pub energy: f64,
    /// `μ‖∇u‖² + λ‖∇·u‖²`
    pub dissipation: f64,
    /// `-∫(u·∇ρ)ρ - ∫ρ²∇·u`
    pub i2: f64,
    /// `∫(1 - P'(ρ+1))∇ρ·u`
    pub i3: f64,
}

impl L2Ledger {
    pub fn source(&self) -> f64 {
        self.i2 + self.i3
    }
}

/// Evaluate the ledger. Cubic integrals are exact on the dealiased grid:
/// the quadratic factor is formed first and paired with the third through
/// Parseval.
pub fn l2_ledger(state: &State, params: &PhysParams) -> Result<L2Ledger> {
    let (rho, u, b) = (&state.rho, &state.u, &state.b);
    let u_sq = &u.x1.product(&u.x1)? + &u.x2.product(&u.x2)?;
    let energy = 0.5
        * (u.sobolev_norm_sq(0.0) + rho.inner(&u_sq) + rho.sobolev_norm_sq(0.0) + b.sobolev_norm_sq(0.0));

    let div = u.divergence();
    let dissipation = params.mu * u.grad_norm_sq(0.0) + params.lambda * div.sobolev_norm_sq(0.0);

    let d1 = rho.derivative(Axis::X1, 1);
    let d2 = rho.derivative(Axis::X2, 1);
    let u_grad_rho = &u.x1.product(&d1)? + &u.x2.product(&d2)?;
    let i2 = -u_grad_rho.inner(rho) - rho.product(rho)?.inner(&div);

    let law = params.pressure;
    let defect = rho.map_pointwise(|r| 1.0 - law.dp(1.0 + r));
    let i3 = defect.product(&d1)?.inner(&u.x1) + defect.product(&d2)?.inner(&u.x2);

    Ok(L2Ledger { energy, dissipation, i2, i3 })
}

/// `E` alone, for callers that do not need the fluxes.
pub fn l2_energy(state: &State) -> Result<f64> {
    let u = &state.u;
    let u_sq = &u.x1.product(&u.x1)? + &u.x2.product(&u.x2)?;
    Ok(0.5
        * (u.sobolev_norm_sq(0.0)
            + state.rho.inner(&u_sq)
            + state.rho.sobolev_norm_sq(0.0)
            + state.b.sobolev_norm_sq(0.0)))
}
