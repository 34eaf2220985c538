//! The combined quantity `Ω = ∇⊥·b - ∂₁P - ½∂₁|b|² + b·∇b₁` and its evolution.

use crate::error::{Error, Result};
use crate::physics::rhs::min_density_check;
use crate::physics::{PhysParams, State};
use crate::spectral::{Axis, ScalarField, VectorField};

/// `Ω` with `P = P(ρ + 1)`, assembled from dealiased pointwise products.
pub fn omega(state: &State, params: &PhysParams) -> ScalarField {
    let grid = state.grid();
    let n = grid.len();
    let rho = state.rho.to_physical();
    let d1rho = state.rho.derivative(Axis::X1, 1).to_physical();
    let b1 = state.b.x1.to_physical();
    let b2 = state.b.x2.to_physical();
    let d1b1 = state.b.x1.derivative(Axis::X1, 1).to_physical();
    let d2b1 = state.b.x1.derivative(Axis::X2, 1).to_physical();
    let d1b2 = state.b.x2.derivative(Axis::X1, 1).to_physical();

    // Linear part ∇⊥·b - ∂₁ρ exactly, the rest pointwise.
    let mut nl = vec![0.0; n];
    for i in 0..n {
        let dp = params.pressure.dp(1.0 + rho[i]);
        let half_d1_b_sq = b1[i] * d1b1[i] + b2[i] * d1b2[i];
        let b_grad_b1 = b1[i] * d1b1[i] + b2[i] * d2b1[i];
        nl[i] = -(dp - 1.0) * d1rho[i] - half_d1_b_sq + b_grad_b1;
    }
    let mut out = state.b.perp_div();
    out.axpy(-1.0, &state.rho.derivative(Axis::X1, 1));
    out.axpy(1.0, &ScalarField::from_physical(grid, &nl));
    out
}

/// Right-hand side of the Ω evolution for `μ = 1`, `λ = 0`:
///
/// ```text
/// Ω_t = -u·∇Ω + 2∂₁²u₁ + ∂₂²u₁ + ∂₁∂₂u₂
///     + ∂₁u·∇b₂ + ½∂₁u·∇|b|² + ∂₁u·∇P + ∇⊥·(b·∇u)
///     - ∂₂u·∇b₁ - ∂₁(b·∇⊥u₁) + b·∇∂₂u₁ + ∇⊥u₁·∇b₁
///     + b·∇(b·∇u₁) - ∂₁(b·(b·∇u)) - ∇⊥·(b∇·u) + ∂₁(|b|²∇·u)
///     + ∂₁((P'(ρ̃)ρ̃ - 1)∇·u) - ∇·u (b·∇b₁) - b·∇(b₁∇·u)
/// ```
///
/// The `½∂₁u·∇|b|²` term carries a plus sign: it comes from `-½∂₁|b|²`
/// exactly as `∂₁u·∇P` comes from `-∂₁P`.
pub fn omega_rhs(state: &State, params: &PhysParams) -> Result<ScalarField> {
    if !params.is_normalized() {
        return Err(Error::InvalidParameter(format!(
            "omega_rhs requires mu = 1 and lambda = 0, got mu = {}, lambda = {}",
            params.mu, params.lambda
        )));
    }
    let grid = state.grid().clone();
    let n = grid.len();
    let rho = state.rho.to_physical();
    min_density_check(&rho)?;

    let ph = |f: &ScalarField| f.to_physical();
    let d = |f: &ScalarField, a: Axis| f.derivative(a, 1);
    let (u1f, u2f, b1f, b2f) = (&state.u.x1, &state.u.x2, &state.b.x1, &state.b.x2);
    let (u1, u2, b1, b2) = (ph(u1f), ph(u2f), ph(b1f), ph(b2f));
    let du1 = [ph(&d(u1f, Axis::X1)), ph(&d(u1f, Axis::X2))];
    let du2 = [ph(&d(u2f, Axis::X1)), ph(&d(u2f, Axis::X2))];
    let db1 = [ph(&d(b1f, Axis::X1)), ph(&d(b1f, Axis::X2))];
    let db2 = [ph(&d(b2f, Axis::X1)), ph(&d(b2f, Axis::X2))];
    let drho = [ph(&d(&state.rho, Axis::X1)), ph(&d(&state.rho, Axis::X2))];
    let d12u1 = ph(&u1f.mixed_derivative(1, 1));
    let d22u1 = ph(&u1f.derivative(Axis::X2, 2));

    let om = omega(state, params);
    let dom = [ph(&d(&om, Axis::X1)), ph(&d(&om, Axis::X2))];

    // w_i = b·∇u_i, z = b₁∇·u
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut z = vec![0.0; n];
    for i in 0..n {
        let div = du1[0][i] + du2[1][i];
        w1[i] = b1[i] * du1[0][i] + b2[i] * du1[1][i];
        w2[i] = b1[i] * du2[0][i] + b2[i] * du2[1][i];
        z[i] = b1[i] * div;
    }
    let w1f = ScalarField::from_physical(&grid, &w1);
    let w2f = ScalarField::from_physical(&grid, &w2);
    let zf = ScalarField::from_physical(&grid, &z);
    let dw1 = [ph(&d(&w1f, Axis::X1)), ph(&d(&w1f, Axis::X2))];
    let dz = [ph(&d(&zf, Axis::X1)), ph(&d(&zf, Axis::X2))];
    let w1 = ph(&w1f);
    let w2 = ph(&w2f);

    let mut local = vec![0.0; n];
    let mut inside_d1 = vec![0.0; n];
    let mut perp1 = vec![0.0; n];
    let mut perp2 = vec![0.0; n];
    for i in 0..n {
        let rt = 1.0 + rho[i];
        let dp = params.pressure.dp(rt);
        let div = du1[0][i] + du2[1][i];
        let b_sq = b1[i] * b1[i] + b2[i] * b2[i];
        let b_db = [
            b1[i] * db1[0][i] + b2[i] * db2[0][i],
            b1[i] * db1[1][i] + b2[i] * db2[1][i],
        ];

        let transport = -(u1[i] * dom[0][i] + u2[i] * dom[1][i]);
        let t_d1u_db2 = du1[0][i] * db2[0][i] + du2[0][i] * db2[1][i];
        let t_d1u_dbsq = du1[0][i] * b_db[0] + du2[0][i] * b_db[1];
        let t_d1u_dp = dp * (du1[0][i] * drho[0][i] + du2[0][i] * drho[1][i]);
        let t_d2u_db1 = -(du1[1][i] * db1[0][i] + du2[1][i] * db1[1][i]);
        let t_b_d2u1 = b1[i] * d12u1[i] + b2[i] * d22u1[i];
        let t_perp_u1_db1 = du1[1][i] * db1[0][i] - du1[0][i] * db1[1][i];
        let t_b_dw1 = b1[i] * dw1[0][i] + b2[i] * dw1[1][i];
        let t_div_bdb1 = -div * (b1[i] * db1[0][i] + b2[i] * db1[1][i]);
        let t_b_dz = -(b1[i] * dz[0][i] + b2[i] * dz[1][i]);
        local[i] = transport
            + t_d1u_db2
            + t_d1u_dbsq
            + t_d1u_dp
            + t_d2u_db1
            + t_b_d2u1
            + t_perp_u1_db1
            + t_b_dw1
            + t_div_bdb1
            + t_b_dz;

        let b_perp_u1 = b1[i] * du1[1][i] - b2[i] * du1[0][i];
        let b_b_du = b1[i] * w1[i] + b2[i] * w2[i];
        inside_d1[i] = -b_perp_u1 - b_b_du + b_sq * div + (dp * rt - 1.0) * div;

        perp1[i] = w1[i] - b1[i] * div;
        perp2[i] = w2[i] - b2[i] * div;
    }

    let mut out = u1f.derivative(Axis::X1, 2).scale(2.0);
    out.axpy(1.0, &u1f.derivative(Axis::X2, 2));
    out.axpy(1.0, &u2f.mixed_derivative(1, 1));
    out.axpy(1.0, &ScalarField::from_physical(&grid, &local));
    out.axpy(1.0, &ScalarField::from_physical(&grid, &inside_d1).derivative(Axis::X1, 1));
    let pv = VectorField {
        x1: ScalarField::from_physical(&grid, &perp1),
        x2: ScalarField::from_physical(&grid, &perp2),
    };
    out.axpy(1.0, &pv.perp_div());
    Ok(out)
}

/// Residual of the `u₁` equation written through Ω:
/// `∂ₜu₁ + u·∇u₁ - Δu₁ - Ω + ρ/(ρ+1)(Δu₁ + Ω)`, given `∂ₜu₁`.
pub fn u1_equation_residual(state: &State, params: &PhysParams, du1_dt: &ScalarField) -> ScalarField {
    let grid = state.grid();
    let n = grid.len();
    let om = omega(state, params);
    let lap = state.u.x1.laplacian();
    let rho = state.rho.to_physical();
    let u1 = state.u.x1.to_physical();
    let u2 = state.u.x2.to_physical();
    let d1 = state.u.x1.derivative(Axis::X1, 1).to_physical();
    let d2 = state.u.x1.derivative(Axis::X2, 1).to_physical();
    let lp = lap.to_physical();
    let op = om.to_physical();
    let nl: Vec<f64> = (0..n)
        .map(|i| u1[i] * d1[i] + u2[i] * d2[i] + rho[i] / (1.0 + rho[i]) * (lp[i] + op[i]))
        .collect();
    let mut r = du1_dt - &lap;
    r.axpy(-1.0, &om);
    r.axpy(1.0, &ScalarField::from_physical(grid, &nl));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{rhs, PressureLaw};
    use crate::spectral::{random_smooth_field, Grid};

    fn grid() -> Grid {
        Grid::square(32).unwrap()
    }

    #[test]
    fn zero_state() {
        let g = grid();
        let s = State::zeros(&g);
        let p = PhysParams::default();
        assert_eq!(omega(&s, &p).max_abs_coeff(), 0.0);
        assert_eq!(omega_rhs(&s, &p).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn magnetic_shear_gives_minus_sine() {
        let g = grid();
        let mut s = State::zeros(&g);
        s.b.x1 = ScalarField::from_fn(&g, |_, y| y.cos());
        let expect = ScalarField::from_fn(&g, |_, y| -y.sin());
        assert!((&omega(&s, &PhysParams::default()) - &expect).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn density_wave_chain_rule() {
        let g = grid();
        let eps = 1e-2;
        let law = PressureLaw::Gamma(1.4);
        let mut s = State::zeros(&g);
        s.rho = ScalarField::from_fn(&g, |x, _| eps * x.cos());
        let om = omega(&s, &PhysParams::new(1.0, 0.0, law).unwrap());
        let expect = ScalarField::from_fn(&g, |x, _| law.dp(1.0 + eps * x.cos()) * eps * x.sin());
        assert!((&om - &expect).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn omega_equals_b2_weighted_curl_minus_pressure_gradient() {
        // -½∂₁|b|² + b·∇b₁ = b₂ ∇⊥·b, so Ω = (1 + b₂)∇⊥·b - ∂₁P.
        let g = grid();
        let psi = random_smooth_field(&g, 4, 0.1, 0.5, true).unwrap();
        let mut s = State::zeros(&g);
        s.b = psi.perp_grad();
        s.rho = random_smooth_field(&g, 5, 0.05, 0.5, true).unwrap();
        let p = PhysParams::default();
        let curl = s.b.perp_div();
        let b2 = s.b.x2.to_physical();
        let c = curl.to_physical();
        let rho = s.rho.to_physical();
        let d1rho = s.rho.derivative(Axis::X1, 1).to_physical();
        let v: Vec<f64> = (0..g.len())
            .map(|i| (1.0 + b2[i]) * c[i] - p.pressure.dp(1.0 + rho[i]) * d1rho[i])
            .collect();
        let expect = ScalarField::from_physical(&g, &v);
        assert!((&omega(&s, &p) - &expect).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn single_velocity_mode() {
        let g = grid();
        let mut s = State::zeros(&g);
        s.u.x1 = ScalarField::from_fn(&g, |x, y| (x + y).sin());
        let r = omega_rhs(&s, &PhysParams::default()).unwrap();
        let expect = ScalarField::from_fn(&g, |x, y| -3.0 * (x + y).sin());
        assert!((&r - &expect).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn rejects_general_viscosity() {
        let g = grid();
        let p = PhysParams::new(2.0, 0.0, PressureLaw::default()).unwrap();
        assert!(omega_rhs(&State::zeros(&g), &p).is_err());
    }

    #[test]
    fn u1_equation_holds_for_rhs() {
        let g = Grid::square(64).unwrap();
        let f = |k: u64, a: f64| random_smooth_field(&g, 90 + k, a, 1.5, true).unwrap();
        let s = State::new(
            f(0, 0.05),
            VectorField { x1: f(1, 0.05), x2: f(2, 0.05) },
            f(3, 0.05).perp_grad(),
            0.0,
        )
        .unwrap();
        let p = PhysParams::default();
        let t = rhs(&s, &p).unwrap();
        let r = u1_equation_residual(&s, &p, &t.u.x1);
        // Products of products are truncated differently on both sides.
        assert!(r.l2_norm() < 1e-9 * t.u.x1.l2_norm(), "{}", r.l2_norm());
    }

    #[test]
    fn rhs_matches_directional_derivative_of_omega() {
        // dΩ/dt = DΩ(s)[rhs(s)], checked by a central difference along the
        // tendency so that no time stepping enters.
        let g = Grid::square(64).unwrap();
        let f = |k: u64, a: f64| random_smooth_field(&g, 70 + k, a, 1.5, true).unwrap();
        let s = State::new(
            f(0, 0.1),
            VectorField { x1: f(1, 0.1), x2: f(2, 0.1) },
            f(3, 0.1).perp_grad(),
            0.0,
        )
        .unwrap();
        let p = PhysParams::default();
        let t = rhs(&s, &p).unwrap();
        let shifted = |h: f64| {
            let mut x = s.clone();
            x.rho.axpy(h, &t.rho);
            x.u.x1.axpy(h, &t.u.x1);
            x.u.x2.axpy(h, &t.u.x2);
            x.b.x1.axpy(h, &t.b.x1);
            x.b.x2.axpy(h, &t.b.x2);
            x
        };
        let h = 1e-5;
        let mut fd = omega(&shifted(h), &p);
        fd.axpy(-1.0, &omega(&shifted(-h), &p));
        let fd = fd.scale(0.5 / h);
        let exact = omega_rhs(&s, &p).unwrap();
        let rel = (&fd - &exact).l2_norm() / exact.l2_norm();
        assert!(rel < 1e-8, "{rel}");
    }
}
