use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::{PhysParams, State, Tendency};
use crate::spectral::{Axis, Grid, ScalarField, VectorField};

/// Below this value of `min(ρ + 1)` the quotients `1/(ρ+1)` are refused.
pub const VACUUM_GUARD: f64 = 0.25;

/// Which groups of terms enter the tendency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhsTerms {
    /// `μΔu + λ∇∇·u`; the integrator handles it exactly and switches it off.
    pub viscous: bool,
    /// Every quadratic and higher term.
    pub nonlinear: bool,
}

impl RhsTerms {
    pub const FULL: RhsTerms = RhsTerms {
        viscous: true,
        nonlinear: true,
    };
}

/// Viscous operator `μΔu + λ∇∇·u` in spectral space.
pub fn viscous_term(u: &VectorField, params: &PhysParams) -> VectorField {
    let mut v = u.map(|c| c.laplacian().scale(params.mu));
    if params.lambda != 0.0 {
        let grad_div = u.divergence().gradient();
        v.x1.axpy(params.lambda, &grad_div.x1);
        v.x2.axpy(params.lambda, &grad_div.x2);
    }
    v
}

pub(crate) fn min_density_check(rho_phys: &[f64]) -> Result<()> {
    let min = rho_phys.iter().fold(f64::INFINITY, |m, &r| m.min(r + 1.0));
    if min <= VACUUM_GUARD {
        return Err(Error::SmallnessViolation(format!(
            "min(rho + 1) = {min:.4} <= {VACUUM_GUARD}"
        )));
    }
    Ok(())
}

fn divergence_of(grid: &Grid, a: &[f64], b: &[f64]) -> ScalarField {
    let (fa, fb) = ScalarField::from_physical_pair(grid, a, b);
    let mut d = fa.derivative(Axis::X1, 1);
    d.axpy(1.0, &fb.derivative(Axis::X2, 1));
    d
}

/// Right-hand side of the perturbation system in split form:
///
/// ```text
/// ρ_t = -∇·u - ∇·(ρu)
/// u_t = μΔu + λ∇∇·u + (∇⊥·b, 0) - ∇ρ
///       - u·∇u - ρ/(ρ+1) (μΔu + λ∇∇·u) - (P'(ρ+1)/(ρ+1) - 1) ∇ρ
///       + (b·∇b - ½∇|b|²)/(ρ+1) - ρ/(ρ+1) (∇⊥·b, 0)
/// b_t = ∇⊥u₁ + ∇⊥(u₁b₂ - u₂b₁)
/// ```
///
/// The last term is `-u·∇b + b·∇u - b∇·u` rewritten with `∇·b = 0`, which
/// keeps `b_t` divergence free and mean free to round-off.
pub fn rhs(state: &State, params: &PhysParams) -> Result<Tendency> {
    rhs_with(state, params, RhsTerms::FULL)
}

pub fn rhs_with(state: &State, params: &PhysParams, terms: RhsTerms) -> Result<Tendency> {
    let grid = state.grid().clone();
    let rho_phys = state.rho.to_physical();
    min_density_check(&rho_phys)?;

    let visc = viscous_term(&state.u, params);
    let curl_b = state.b.perp_div();
    let grad_rho = state.rho.gradient();

    let mut t = Tendency::zeros(&grid);
    t.rho = -&state.u.divergence();
    t.u.x1 = &curl_b - &grad_rho.x1;
    t.u.x2 = -&grad_rho.x2;
    if terms.viscous {
        t.u.x1.axpy(1.0, &visc.x1);
        t.u.x2.axpy(1.0, &visc.x2);
    }
    t.b.x1 = state.u.x1.derivative(Axis::X2, 1);
    t.b.x2 = -&state.u.x1.derivative(Axis::X1, 1);

    if !terms.nonlinear {
        return Ok(t);
    }

    let n = grid.len();
    let pair = |a: &ScalarField, b: &ScalarField| ScalarField::to_physical_pair(a, b);
    let (u1, u2) = pair(&state.u.x1, &state.u.x2);
    let (b1, b2) = pair(&state.b.x1, &state.b.x2);
    let (du1_1, du1_2) = pair(&state.u.x1.derivative(Axis::X1, 1), &state.u.x1.derivative(Axis::X2, 1));
    let (du2_1, du2_2) = pair(&state.u.x2.derivative(Axis::X1, 1), &state.u.x2.derivative(Axis::X2, 1));
    let (db1_1, db1_2) = pair(&state.b.x1.derivative(Axis::X1, 1), &state.b.x1.derivative(Axis::X2, 1));
    let (db2_1, db2_2) = pair(&state.b.x2.derivative(Axis::X1, 1), &state.b.x2.derivative(Axis::X2, 1));
    let du1 = [du1_1, du1_2];
    let du2 = [du2_1, du2_2];
    let db1 = [db1_1, db1_2];
    let db2 = [db2_1, db2_2];
    let (drho_1, drho_2) = pair(&grad_rho.x1, &grad_rho.x2);
    let drho = [drho_1, drho_2];
    let (v1, v2) = pair(&visc.x1, &visc.x2);
    let curl = curl_b.to_physical();

    let mut m1 = vec![0.0; n];
    let mut m2 = vec![0.0; n];
    let mut n1 = vec![0.0; n];
    let mut n2 = vec![0.0; n];
    let mut phi = vec![0.0; n];
    for i in 0..n {
        let r = rho_phys[i];
        let rt = 1.0 + r;
        let inv = 1.0 / rt;
        let frac = r * inv;
        m1[i] = r * u1[i];
        m2[i] = r * u2[i];

        let adv1 = u1[i] * du1[0][i] + u2[i] * du1[1][i];
        let adv2 = u1[i] * du2[0][i] + u2[i] * du2[1][i];
        let bgb1 = b1[i] * db1[0][i] + b2[i] * db1[1][i];
        let bgb2 = b1[i] * db2[0][i] + b2[i] * db2[1][i];
        let half_grad_b2_1 = b1[i] * db1[0][i] + b2[i] * db2[0][i];
        let half_grad_b2_2 = b1[i] * db1[1][i] + b2[i] * db2[1][i];
        let enthalpy = params.pressure.dp(rt) * inv - 1.0;

        n1[i] = -adv1 - frac * v1[i] - enthalpy * drho[0][i] + inv * (bgb1 - half_grad_b2_1)
            - frac * curl[i];
        n2[i] = -adv2 - frac * v2[i] - enthalpy * drho[1][i] + inv * (bgb2 - half_grad_b2_2);
        phi[i] = u1[i] * b2[i] - u2[i] * b1[i];
    }

    t.rho.axpy(-1.0, &divergence_of(&grid, &m1, &m2));
    let (f1, f2) = ScalarField::from_physical_pair(&grid, &n1, &n2);
    t.u.x1.axpy(1.0, &f1);
    t.u.x2.axpy(1.0, &f2);
    let induction = ScalarField::from_physical(&grid, &phi).perp_grad();
    t.b.x1.axpy(1.0, &induction.x1);
    t.b.x2.axpy(1.0, &induction.x2);
    // Both b tendencies are perfect derivatives; keep the mean exactly zero.
    t.b.x1.coeffs_mut()[0] = Complex64::default();
    t.b.x2.coeffs_mut()[0] = Complex64::default();
    Ok(t)
}

/// The same tendency assembled in primitive (conservative-momentum) form:
/// `u_t = [μΔu + λ∇∇·u - ∇P + B·∇B - ½∇|B|²]/ρ̃ - u·∇u` and
/// `b_t = ∇⊥u₁ - u·∇b + b·∇u - b∇·u`. Used to cross-check [`rhs`].
pub fn rhs_primitive(state: &State, params: &PhysParams) -> Result<Tendency> {
    let grid = state.grid().clone();
    let n = grid.len();
    let rho_phys = state.rho.to_physical();
    min_density_check(&rho_phys)?;
    let visc = viscous_term(&state.u, params);
    let p = |f: &ScalarField| f.to_physical();
    let (u1, u2, b1, b2) = (p(&state.u.x1), p(&state.u.x2), p(&state.b.x1), p(&state.b.x2));
    let d = |f: &ScalarField, a: Axis| f.derivative(a, 1).to_physical();
    let du1 = [d(&state.u.x1, Axis::X1), d(&state.u.x1, Axis::X2)];
    let du2 = [d(&state.u.x2, Axis::X1), d(&state.u.x2, Axis::X2)];
    let db1 = [d(&state.b.x1, Axis::X1), d(&state.b.x1, Axis::X2)];
    let db2 = [d(&state.b.x2, Axis::X1), d(&state.b.x2, Axis::X2)];
    let drho = [d(&state.rho, Axis::X1), d(&state.rho, Axis::X2)];
    let (v1, v2) = (p(&visc.x1), p(&visc.x2));

    let mut fr = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut g1 = vec![0.0; n];
    let mut g2 = vec![0.0; n];
    for i in 0..n {
        let rt = 1.0 + rho_phys[i];
        let dp = params.pressure.dp(rt);
        let big_b1 = b1[i];
        let big_b2 = 1.0 + b2[i];
        let div_u = du1[0][i] + du2[1][i];
        fr[i] = -(u1[i] * drho[0][i] + u2[i] * drho[1][i]) - rt * div_u;
        let lor1 = big_b1 * db1[0][i] + big_b2 * db1[1][i] - (big_b1 * db1[0][i] + big_b2 * db2[0][i]);
        let lor2 = big_b1 * db2[0][i] + big_b2 * db2[1][i] - (big_b1 * db1[1][i] + big_b2 * db2[1][i]);
        f1[i] = (v1[i] - dp * drho[0][i] + lor1) / rt - (u1[i] * du1[0][i] + u2[i] * du1[1][i]);
        f2[i] = (v2[i] - dp * drho[1][i] + lor2) / rt - (u1[i] * du2[0][i] + u2[i] * du2[1][i]);
        g1[i] = du1[1][i] - (u1[i] * db1[0][i] + u2[i] * db1[1][i])
            + (b1[i] * du1[0][i] + b2[i] * du1[1][i])
            - b1[i] * div_u;
        g2[i] = -du1[0][i] - (u1[i] * db2[0][i] + u2[i] * db2[1][i])
            + (b1[i] * du2[0][i] + b2[i] * du2[1][i])
            - b2[i] * div_u;
    }
    let s = |v: &[f64]| ScalarField::from_physical(&grid, v);
    Ok(Tendency {
        rho: s(&fr),
        u: VectorField { x1: s(&f1), x2: s(&f2) },
        b: VectorField { x1: s(&g1), x2: s(&g2) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::PressureLaw;
    use crate::spectral::{random_smooth_field, Grid};

    fn grid() -> Grid {
        Grid::square(32).unwrap()
    }

    fn small_state(g: &Grid, seed: u64, amp: f64) -> State {
        let f = |k: u64, zm: bool| random_smooth_field(g, seed * 10 + k, amp, 0.5, zm).unwrap();
        let psi = f(3, true);
        State::new(f(0, false), VectorField { x1: f(1, false), x2: f(2, false) }, psi.perp_grad(), 0.0).unwrap()
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let g = grid();
        let t = rhs(&State::zeros(&g), &PhysParams::default()).unwrap();
        assert_eq!(t.max_abs_coeff(), 0.0);
    }

    #[test]
    fn pure_magnetic_shear() {
        // b = (cos x₂, 0): Lorentz force b·∇b - ½∇|b|² = (0, sin x₂ cos x₂), curl term = -sin x₂.
        let g = grid();
        let mut s = State::zeros(&g);
        s.b = ScalarField::from_fn(&g, |_, y| y.sin()).perp_grad();
        let t = rhs(&s, &PhysParams::default()).unwrap();
        assert!(t.b.x1.max_abs_coeff() < 1e-15 && t.b.x2.max_abs_coeff() < 1e-15);
        assert!(t.rho.max_abs_coeff() < 1e-15);
        let e1 = ScalarField::from_fn(&g, |_, y| -y.sin());
        let e2 = ScalarField::from_fn(&g, |_, y| y.sin() * y.cos());
        assert!((&t.u.x1 - &e1).max_abs_coeff() < 1e-14);
        assert!((&t.u.x2 - &e2).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn shear_velocity() {
        let g = grid();
        let mut s = State::zeros(&g);
        s.u.x1 = ScalarField::from_fn(&g, |_, y| y.sin());
        for mu in [1.0, 0.3] {
            let params = PhysParams::new(mu, 0.7, PressureLaw::default()).unwrap();
            let t = rhs(&s, &params).unwrap();
            let eb1 = ScalarField::from_fn(&g, |_, y| y.cos());
            assert!((&t.b.x1 - &eb1).max_abs_coeff() < 1e-14);
            assert!(t.b.x2.max_abs_coeff() < 1e-15);
            assert!(t.rho.max_abs_coeff() < 1e-15);
            let eu1 = ScalarField::from_fn(&g, |_, y| -mu * y.sin());
            assert!((&t.u.x1 - &eu1).max_abs_coeff() < 1e-14);
            assert!(t.u.x2.max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn split_form_matches_primitive_form() {
        let g = grid();
        let s = small_state(&g, 7, 0.05);
        for params in [
            PhysParams::default(),
            PhysParams::new(0.5, 0.8, PressureLaw::Gamma(2.0)).unwrap(),
            PhysParams::new(1.0, 0.0, PressureLaw::Linear).unwrap(),
        ] {
            let a = rhs(&s, &params).unwrap();
            let b = rhs_primitive(&s, &params).unwrap();
            let scale = b.max_abs_coeff();
            for (x, y) in a.fields().into_iter().zip(b.fields()) {
                assert!((x - y).max_abs_coeff() < 1e-13 * scale);
            }
        }
    }

    #[test]
    fn magnetic_tendency_is_solenoidal_and_mean_free() {
        let g = grid();
        let s = small_state(&g, 3, 0.1);
        let t = rhs(&s, &PhysParams::default()).unwrap();
        assert!(t.b.divergence().max_abs_coeff() < 1e-15);
        assert_eq!(t.b.x1.coeffs()[0], Complex64::default());
        assert_eq!(t.b.x2.coeffs()[0], Complex64::default());
        assert!(t.rho.mean().abs() < 1e-18);
    }

    #[test]
    fn refuses_near_vacuum() {
        let g = grid();
        let mut s = State::zeros(&g);
        s.rho = ScalarField::from_fn(&g, |x, _| 0.8 * x.cos());
        assert!(matches!(rhs(&s, &PhysParams::default()), Err(Error::SmallnessViolation(_))));
    }

    #[test]
    fn linear_terms_are_separable() {
        let g = grid();
        let s = small_state(&g, 5, 0.01);
        let p = PhysParams::default();
        let full = rhs(&s, &p).unwrap();
        let no_visc = rhs_with(&s, &p, RhsTerms { viscous: false, nonlinear: true }).unwrap();
        let visc = viscous_term(&s.u, &p);
        assert!((&(&full.u.x1 - &no_visc.u.x1) - &visc.x1).max_abs_coeff() < 1e-15);
        assert!((&(&full.u.x2 - &no_visc.u.x2) - &visc.x2).max_abs_coeff() < 1e-15);
    }
}
