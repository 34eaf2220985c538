use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::PressureLaw;
use crate::spectral::{Grid, ScalarField, VectorField};

/// Viscous coefficients and pressure law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub mu: f64,
    pub lambda: f64,
    pub pressure: PressureLaw,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            lambda: 0.0,
            pressure: PressureLaw::default(),
        }
    }
}

impl PhysParams {
    pub fn new(mu: f64, lambda: f64, pressure: PressureLaw) -> Result<Self> {
        let p = Self { mu, lambda, pressure };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.mu + self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mu + lambda must be positive, got {}",
                self.mu + self.lambda
            )));
        }
        Ok(())
    }

    pub fn is_normalized(&self) -> bool {
        self.mu == 1.0 && self.lambda == 0.0
    }
}

/// Perturbation `(ρ, u, b)` around `(1, 0, e₂)` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: ScalarField,
    pub u: VectorField,
    pub b: VectorField,
    pub time: f64,
}

/// Time derivative of the five perturbation fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub rho: ScalarField,
    pub u: VectorField,
    pub b: VectorField,
}

/// `(ρ̃, u, B)` with the equilibrium constants restored.
#[derive(Debug, Clone)]
pub struct PhysicalFields {
    pub rho_total: ScalarField,
    pub velocity: VectorField,
    pub magnetic: VectorField,
}

impl State {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            rho: ScalarField::zeros(grid),
            u: VectorField::zeros(grid),
            b: VectorField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn new(rho: ScalarField, u: VectorField, b: VectorField, time: f64) -> Result<Self> {
        rho.grid().ensure_same(u.grid())?;
        rho.grid().ensure_same(b.grid())?;
        Ok(Self { rho, u, b, time })
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// Fields in the fixed order `(ρ, u₁, u₂, b₁, b₂)`.
    pub fn fields(&self) -> [&ScalarField; 5] {
        [&self.rho, &self.u.x1, &self.u.x2, &self.b.x1, &self.b.x2]
    }

    pub fn fields_mut(&mut self) -> [&mut ScalarField; 5] {
        [
            &mut self.rho,
            &mut self.u.x1,
            &mut self.u.x2,
            &mut self.b.x1,
            &mut self.b.x2,
        ]
    }

    /// `self += a * t` on every field (time untouched).
    pub fn axpy(&mut self, a: f64, t: &Tendency) {
        for (f, d) in self.fields_mut().into_iter().zip(t.fields()) {
            f.axpy(a, d);
        }
    }

    pub fn divergence_b(&self) -> ScalarField {
        self.b.divergence()
    }

    pub fn divergence_b_l2(&self) -> f64 {
        self.b.divergence().l2_norm()
    }

    pub fn mean_b(&self) -> (f64, f64) {
        (self.b.x1.mean(), self.b.x2.mean())
    }

    pub fn rho_max_abs(&self) -> f64 {
        self.rho.max_abs()
    }

    /// Check `∇·b = 0` (to `tol` in L²) and the exact zero mean of `b`.
    pub fn check_magnetic_constraints(&self, tol: f64) -> Result<()> {
        let d = self.divergence_b_l2();
        if d > tol {
            return Err(Error::InvalidParameter(format!("div b = {d:.3e} exceeds {tol:.1e}")));
        }
        let (m1, m2) = self.mean_b();
        if m1 != 0.0 || m2 != 0.0 {
            return Err(Error::InvalidParameter(format!("b has nonzero mean ({m1:e}, {m2:e})")));
        }
        Ok(())
    }

    /// The ansatz `‖ρ‖_∞ ≤ ½`.
    pub fn check_smallness(&self) -> Result<()> {
        let m = self.rho_max_abs();
        if m > 0.5 {
            return Err(Error::SmallnessViolation(format!("|rho|_inf = {m:.4} > 1/2")));
        }
        Ok(())
    }

    /// Restore `ρ̃ = ρ + 1` and `B = b + e₂`.
    pub fn reconstruct_physical(&self) -> PhysicalFields {
        let mut rho_total = self.rho.clone();
        rho_total.coeffs_mut()[0] += Complex64::new(1.0, 0.0);
        let mut magnetic = self.b.clone();
        magnetic.x2.coeffs_mut()[0] += Complex64::new(1.0, 0.0);
        PhysicalFields {
            rho_total,
            velocity: self.u.clone(),
            magnetic,
        }
    }

    /// Mirror `x₁ → -x₁` with `u₁ → -u₁`, `b₁ → -b₁`.
    pub fn reflect_x1(&self) -> State {
        let flip = |f: &ScalarField, sign: f64| {
            let g = f.grid().clone();
            let mut out = ScalarField::zeros(&g);
            for i in 0..g.len() {
                let (a, b) = g.k(i);
                if g.contains(-a, b) {
                    out.set(-a, b, f.coeffs()[i] * sign);
                }
            }
            out
        };
        State {
            rho: flip(&self.rho, 1.0),
            u: VectorField {
                x1: flip(&self.u.x1, -1.0),
                x2: flip(&self.u.x2, 1.0),
            },
            b: VectorField {
                x1: flip(&self.b.x1, -1.0),
                x2: flip(&self.b.x2, 1.0),
            },
            time: self.time,
        }
    }

    /// Largest coefficient difference over the five fields.
    pub fn max_coeff_diff(&self, other: &State) -> f64 {
        self.fields()
            .into_iter()
            .zip(other.fields())
            .map(|(a, b)| (a - b).max_abs_coeff())
            .fold(0.0, f64::max)
    }

    /// `(Σ ‖f_i - g_i‖²_{L²})^{1/2}` over the five fields.
    pub fn l2_distance(&self, other: &State) -> f64 {
        self.fields()
            .into_iter()
            .zip(other.fields())
            .map(|(a, b)| (a - b).sobolev_norm_sq(0.0))
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.fields()
            .into_iter()
            .map(|a| a.sobolev_norm_sq(0.0))
            .sum::<f64>()
            .sqrt()
    }

    /// `‖ρ‖_{H^s} + ‖u‖_{H^s} + ‖b‖_{H^s}`.
    pub fn hs_norm_sum(&self, s: f64) -> f64 {
        self.rho.sobolev_norm(s) + self.u.sobolev_norm(s) + self.b.sobolev_norm(s)
    }

    pub fn scaled(&self, s: f64) -> State {
        State {
            rho: self.rho.scale(s),
            u: self.u.scale(s),
            b: self.b.scale(s),
            time: self.time,
        }
    }
}

impl Tendency {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            rho: ScalarField::zeros(grid),
            u: VectorField::zeros(grid),
            b: VectorField::zeros(grid),
        }
    }

    pub fn fields(&self) -> [&ScalarField; 5] {
        [&self.rho, &self.u.x1, &self.u.x2, &self.b.x1, &self.b.x2]
    }

    pub fn fields_mut(&mut self) -> [&mut ScalarField; 5] {
        [
            &mut self.rho,
            &mut self.u.x1,
            &mut self.u.x2,
            &mut self.b.x1,
            &mut self.b.x2,
        ]
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.fields()
            .into_iter()
            .map(|f| f.max_abs_coeff())
            .fold(0.0, f64::max)
    }
}
