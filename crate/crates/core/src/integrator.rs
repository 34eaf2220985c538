//! Integrating-factor Runge–Kutta stepping. The viscous part of the velocity
//! equation is integrated exactly per Fourier mode; everything else is
//! explicit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::{rhs_with, PhysParams, RhsTerms, State, Tendency};
use crate::spectral::{Grid, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    IFRK3,
    IFRK4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::IFRK3 => 3,
            Scheme::IFRK4 => 4,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IFRK3" => Ok(Scheme::IFRK3),
            "IFRK4" => Ok(Scheme::IFRK4),
            _ => Err(Error::InvalidParameter(format!("unknown scheme {s:?}"))),
        }
    }

    fn tableau(self) -> Tableau {
        match self {
            // Kutta's third-order method
            Scheme::IFRK3 => Tableau {
                c: &[0.0, 0.5, 1.0],
                a: &[&[], &[0.5], &[-1.0, 2.0]],
                b: &[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
            },
            Scheme::IFRK4 => Tableau {
                c: &[0.0, 0.5, 0.5, 1.0],
                a: &[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]],
                b: &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            },
        }
    }
}

struct Tableau {
    c: &'static [f64],
    a: &'static [&'static [f64]],
    b: &'static [f64],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Step size, or the upper bound on it when `adaptive`.
    pub dt: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
    /// Shrink the step to the CFL bound instead of failing.
    pub adaptive: bool,
    pub filter_enabled: bool,
    pub filter_strength: f64,
    /// Re-project `b` onto divergence-free fields when `‖∇·b‖` exceeds this.
    pub projection_tol: Option<f64>,
    /// Test hook: drop every quadratic and higher term.
    pub nonlinear: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            cfl_safety: 0.4,
            scheme: Scheme::IFRK4,
            adaptive: true,
            filter_enabled: false,
            filter_strength: 36.0,
            projection_tol: Some(1e-10),
            nonlinear: true,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.filter_strength >= 0.0) {
            return Err(Error::InvalidParameter("filter_strength must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Per-mode `exp(dt M(k))` with `M(k) = -μ|k|² Id - λ k kᵀ`, as a real 2×2 matrix.
pub fn viscous_semigroup(k: (i64, i64), dt: f64, mu: f64, lambda: f64) -> [[f64; 2]; 2] {
    let (k1, k2) = (k.0 as f64, k.1 as f64);
    let ksq = k1 * k1 + k2 * k2;
    if ksq == 0.0 {
        return [[1.0, 0.0], [0.0, 1.0]];
    }
    let perp = (-mu * ksq * dt).exp();
    let par = (-(mu + lambda) * ksq * dt).exp();
    let d = par - perp;
    [
        [perp + d * k1 * k1 / ksq, d * k1 * k2 / ksq],
        [d * k1 * k2 / ksq, perp + d * k2 * k2 / ksq],
    ]
}

/// The viscous semigroup for one time increment, tabulated over the grid.
#[derive(Debug, Clone)]
pub struct ViscousSemigroup {
    dt: f64,
    factors: Vec<[[f64; 2]; 2]>,
    scalar: bool,
}

impl ViscousSemigroup {
    pub fn new(grid: &Grid, dt: f64, params: &PhysParams) -> Self {
        let factors = (0..grid.len())
            .map(|i| {
                if grid.mask(i) {
                    viscous_semigroup(grid.k(i), dt, params.mu, params.lambda)
                } else {
                    [[0.0; 2]; 2]
                }
            })
            .collect();
        Self {
            dt,
            factors,
            scalar: params.lambda == 0.0,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, u: &mut VectorField) {
        if self.dt == 0.0 {
            return;
        }
        let c1 = u.x1.coeffs_mut();
        let c2 = u.x2.coeffs_mut();
        for (i, m) in self.factors.iter().enumerate() {
            if self.scalar {
                c1[i] *= m[0][0];
                c2[i] *= m[1][1];
            } else {
                let (p, q) = (c1[i], c2[i]);
                c1[i] = p * m[0][0] + q * m[0][1];
                c2[i] = p * m[1][0] + q * m[1][1];
            }
        }
    }
}

/// Largest step permitted by `dt ≤ cfl·h/(1 + ‖u‖_∞ + ‖b‖_∞)`, `h = 2π/max(n₁, n₂)`.
pub fn cfl_bound(state: &State, cfl_safety: f64) -> f64 {
    let g = state.grid();
    let speed = 1.0
        + state.u.x1.max_abs().max(state.u.x2.max_abs())
        + state.b.x1.max_abs().max(state.b.x2.max_abs());
    cfl_safety * g.spacing() / speed
}

/// Exponential filter `exp(-α((ν - 0.8)/0.2)⁴)` for `ν = max_i |k_i|/cutoff_i > 0.8`.
pub fn filter_factor(grid: &Grid, idx: usize, strength: f64) -> f64 {
    let (k1, k2) = grid.k(idx);
    let (c1, c2) = grid.cutoff();
    let nu = (k1.abs() as f64 / c1 as f64).max(k2.abs() as f64 / c2 as f64);
    if nu <= 0.8 {
        1.0
    } else {
        (-strength * ((nu - 0.8) / 0.2).powi(4)).exp()
    }
}

/// Leray projection of `b` onto divergence-free fields, mean untouched.
pub fn project_divergence_free(b: &mut VectorField) {
    let g = b.grid().clone();
    let c1 = b.x1.coeffs_mut();
    let c2 = b.x2.coeffs_mut();
    for i in 0..g.len() {
        let (k1, k2) = g.k(i);
        let ksq = (k1 * k1 + k2 * k2) as f64;
        if ksq == 0.0 {
            continue;
        }
        let (k1, k2) = (k1 as f64, k2 as f64);
        let kb: Complex64 = (c1[i] * k1 + c2[i] * k2) / ksq;
        c1[i] -= kb * k1;
        c2[i] -= kb * k2;
    }
}

fn explicit_terms(config: &StepConfig) -> RhsTerms {
    RhsTerms {
        viscous: false,
        nonlinear: config.nonlinear,
    }
}

fn apply_to_tendency(e: &ViscousSemigroup, t: &Tendency) -> Tendency {
    let mut out = t.clone();
    e.apply(&mut out.u);
    out
}

/// One step of size `config.dt`.
pub fn step(state: &State, params: &PhysParams, config: &StepConfig) -> Result<State> {
    config.validate()?;
    let bound = cfl_bound(state, config.cfl_safety);
    if config.dt > bound * (1.0 + 1e-12) {
        return Err(Error::Cfl {
            dt: config.dt,
            bound,
        });
    }
    step_unchecked(state, params, config, config.dt)
}

fn step_unchecked(state: &State, params: &PhysParams, config: &StepConfig, h: f64) -> Result<State> {
    let grid = state.grid().clone();
    let tab = config.scheme.tableau();
    let terms = explicit_terms(config);

    // Semigroups for every increment the tableau needs: c_i, c_i - c_j, 1 - c_j.
    let mut cache: Vec<ViscousSemigroup> = Vec::new();
    let mut semigroup = |tau: f64| -> usize {
        if let Some(i) = cache.iter().position(|e| e.dt() == tau) {
            return i;
        }
        cache.push(ViscousSemigroup::new(&grid, tau, params));
        cache.len() - 1
    };
    let stages = tab.c.len();
    let mut plan_stage: Vec<(usize, Vec<(usize, f64, usize)>)> = Vec::with_capacity(stages);
    for i in 0..stages {
        let e0 = semigroup(tab.c[i] * h);
        let mut parts = Vec::new();
        for (j, &a) in tab.a[i].iter().enumerate() {
            if a != 0.0 {
                parts.push((j, a, semigroup((tab.c[i] - tab.c[j]) * h)));
            }
        }
        plan_stage.push((e0, parts));
    }
    let e_final = semigroup(h);
    let final_parts: Vec<(usize, f64, usize)> = tab
        .b
        .iter()
        .enumerate()
        .map(|(j, &b)| (j, b, semigroup((1.0 - tab.c[j]) * h)))
        .collect();

    let mut k: Vec<Tendency> = Vec::with_capacity(stages);
    for (i, (e0, parts)) in plan_stage.iter().enumerate() {
        let mut u = state.clone();
        cache[*e0].apply(&mut u.u);
        for &(j, a, e) in parts {
            u.axpy(h * a, &apply_to_tendency(&cache[e], &k[j]));
        }
        u.time = state.time + tab.c[i] * h;
        k.push(rhs_with(&u, params, terms)?);
    }

    let mut next = state.clone();
    cache[e_final].apply(&mut next.u);
    for &(j, b, e) in &final_parts {
        next.axpy(h * b, &apply_to_tendency(&cache[e], &k[j]));
    }
    next.time = state.time + h;

    if config.filter_enabled && config.filter_strength > 0.0 {
        let f: Vec<f64> = (0..grid.len())
            .map(|i| filter_factor(&grid, i, config.filter_strength))
            .collect();
        for field in [&mut next.rho, &mut next.b.x1, &mut next.b.x2] {
            for (c, &w) in field.coeffs_mut().iter_mut().zip(&f) {
                *c *= w;
            }
        }
    }
    if let Some(tol) = config.projection_tol {
        if next.divergence_b_l2() > tol {
            project_divergence_free(&mut next.b);
        }
    }
    next.check_smallness()?;
    Ok(next)
}

/// Statistics of one `advance` call.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdvanceStats {
    pub steps: usize,
    pub observations: usize,
    pub min_dt: f64,
    pub max_dt: f64,
}

/// Step from `state.time` to `t_end`. The observer sees the initial state,
/// every state at `t₀ + i·sample_interval` and the final state; steps are
/// sized so that each of these times is hit exactly. Each interval between
/// consecutive targets is split into equal steps no longer than the allowed
/// step size.
pub fn advance(
    state: &State,
    params: &PhysParams,
    config: &StepConfig,
    t_end: f64,
    sample_interval: Option<f64>,
    mut observer: impl FnMut(&State) -> Result<()>,
) -> Result<(State, AdvanceStats)> {
    config.validate()?;
    params.validate()?;
    let t0 = state.time;
    if !(t_end >= t0) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} precedes t = {t0}")));
    }
    if let Some(s) = sample_interval {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("sample interval must be positive, got {s}")));
        }
    }
    let mut stats = AdvanceStats {
        min_dt: f64::INFINITY,
        ..Default::default()
    };
    let mut cur = state.clone();
    observer(&cur)?;
    stats.observations += 1;

    let mut obs_index = 1u64;
    while cur.time < t_end {
        let target = match sample_interval {
            Some(s) => (t0 + obs_index as f64 * s).min(t_end),
            None => t_end,
        };
        while cur.time < target {
            let remaining = target - cur.time;
            let mut dt_max = config.dt;
            let bound = cfl_bound(&cur, config.cfl_safety);
            if config.adaptive {
                dt_max = dt_max.min(bound);
            } else if config.dt > bound * (1.0 + 1e-12) {
                return Err(Error::Cfl { dt: config.dt, bound });
            }
            // Tolerate round-off in `remaining / dt_max`.
            let n = ((remaining / dt_max) * (1.0 - 1e-12)).ceil().max(1.0);
            let h = remaining / n;
            let mut next = step_unchecked(&cur, params, config, h)?;
            if n == 1.0 {
                next.time = target;
            }
            stats.steps += 1;
            stats.min_dt = stats.min_dt.min(h);
            stats.max_dt = stats.max_dt.max(h);
            cur = next;
        }
        observer(&cur)?;
        stats.observations += 1;
        obs_index += 1;
    }
    if stats.steps == 0 {
        stats.min_dt = 0.0;
    }
    Ok((cur, stats))
}
