use crate::error::{Error, Result};

/// Barotropic pressure law `P(ρ̃)` normalised so that `P'(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PressureLaw {
    /// `P(ρ̃) = (ρ̃^γ - 1) / γ`.
    Gamma(f64),
    /// `P(ρ̃) = ρ̃`; every remainder vanishes identically.
    Linear,
}

impl Default for PressureLaw {
    fn default() -> Self {
        PressureLaw::Gamma(1.4)
    }
}

impl PressureLaw {
    pub fn gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        Ok(PressureLaw::Gamma(gamma))
    }

    /// The exponent, with the linear law reported as `γ = 1`.
    pub fn exponent(&self) -> f64 {
        match *self {
            PressureLaw::Gamma(g) => g,
            PressureLaw::Linear => 1.0,
        }
    }

    pub fn p(&self, rho_total: f64) -> f64 {
        match *self {
            PressureLaw::Gamma(g) => (rho_total.powf(g) - 1.0) / g,
            PressureLaw::Linear => rho_total,
        }
    }

    pub fn dp(&self, rho_total: f64) -> f64 {
        match *self {
            PressureLaw::Gamma(g) => rho_total.powf(g - 1.0),
            PressureLaw::Linear => 1.0,
        }
    }

    pub fn d2p(&self, rho_total: f64) -> f64 {
        match *self {
            PressureLaw::Gamma(g) => (g - 1.0) * rho_total.powf(g - 2.0),
            PressureLaw::Linear => 0.0,
        }
    }

    /// `q(ρ) = P(ρ+1) - P(1) - ρ`, closed form.
    pub fn q(&self, rho: f64) -> f64 {
        match *self {
            PressureLaw::Gamma(g) => ((1.0 + rho).powf(g) - 1.0) / g - rho,
            PressureLaw::Linear => 0.0,
        }
    }

    /// `q₁(ρ) = ∫₀^ρ (P'(r+1)/(r+1) - 1) dr`, closed form.
    pub fn q1(&self, rho: f64) -> f64 {
        let g = self.exponent();
        if (g - 1.0).abs() < 1e-12 {
            (1.0 + rho).ln() - rho
        } else {
            ((1.0 + rho).powf(g - 1.0) - 1.0) / (g - 1.0) - rho
        }
    }

    /// `q` from its integral definition by adaptive quadrature.
    pub fn q_by_quadrature(&self, rho: f64) -> f64 {
        adaptive_simpson(&|r| self.dp(r + 1.0) - 1.0, 0.0, rho, 1e-15)
    }

    /// `q₁` from its integral definition by adaptive quadrature.
    pub fn q1_by_quadrature(&self, rho: f64) -> f64 {
        adaptive_simpson(&|r| self.dp(r + 1.0) / (r + 1.0) - 1.0, 0.0, rho, 1e-15)
    }

    /// `q''(0) = P''(1)`.
    pub fn q_second_derivative_at_zero(&self) -> f64 {
        self.d2p(1.0)
    }

    /// `q₁''(0) = P''(1) - P'(1)`.
    pub fn q1_second_derivative_at_zero(&self) -> f64 {
        self.d2p(1.0) - self.dp(1.0)
    }
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}
