//! Time-weighted energy functionals, decay fits and the bound monitor.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::physics::{omega, PhysParams, State};
use crate::spectral::{ScalarField, VectorField};

/// `w_k(t) = (1+t)^{k-σ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWeight {
    pub sigma: f64,
    pub k: i32,
}

impl TimeWeight {
    pub fn new(k: i32, sigma: f64) -> Result<Self> {
        if !(-1..=3).contains(&k) {
            return Err(Error::InvalidParameter(format!("weight index {k} outside -1..=3")));
        }
        validate_sigma(sigma)?;
        Ok(Self { sigma, k })
    }

    pub fn eval(&self, t: f64) -> f64 {
        time_weight(self.k, self.sigma, t)
    }
}

pub fn time_weight(k: i32, sigma: f64, t: f64) -> f64 {
    (1.0 + t).powf(k as f64 - sigma)
}

fn validate_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(Error::InvalidParameter(format!("sigma must lie in (0, 1/2), got {sigma}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsConfig {
    /// Regularity index of the norms.
    pub s: f64,
    pub sigma: f64,
    pub sample_interval: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            s: 4.0,
            sigma: 0.25,
            sample_interval: 0.1,
        }
    }
}

impl DiagnosticsConfig {
    pub fn validate(&self) -> Result<()> {
        validate_sigma(self.sigma)?;
        if !(self.s >= 2.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be at least 2, got {}", self.s)));
        }
        if !(self.sample_interval > 0.0) {
            return Err(Error::InvalidParameter("sample_interval must be positive".into()));
        }
        Ok(())
    }
}

/// Instantaneous quantities recorded at every observation. The `*_K` entries
/// come in triples for `k = 1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(usize)]
pub enum Q {
    /// `‖u‖² + ‖ρ‖² + ‖b‖²` in `H^s`
    X0,
    /// `‖∇u‖²_{H^s}`
    GradU,
    /// same triple in `H^{s-1}`
    Low,
    /// `‖∇u‖²_{H^{s-1}}`
    GradULow,
    /// `‖∂₂u‖² + ‖∂₂ρ‖² + ‖∂₂b‖²` in `H^{s-k}`
    D2K1,
    D2K2,
    D2K3,
    /// `‖∇∂₂u‖²_{H^{s-k}}`
    GradD2UK1,
    GradD2UK2,
    GradD2UK3,
    /// `‖∂₂²ρ‖²_{H^{s-1-k}}`
    D22RhoK1,
    D22RhoK2,
    D22RhoK3,
    /// `‖∂₂²∇⊥·b‖²_{H^{s-2-k}}`
    D22CurlBK1,
    D22CurlBK2,
    D22CurlBK3,
    /// `‖∂₁u₁‖²_{H^{s-k}}`
    D1U1K1,
    D1U1K2,
    D1U1K3,
    /// `‖∇∂₁u₁‖²_{H^{s-k}}`
    GradD1U1K1,
    GradD1U1K2,
    GradD1U1K3,
    /// `‖Ω‖²_{H^{s-k}}`
    OmegaK1,
    OmegaK2,
    OmegaK3,
    /// `‖u₂‖²_{Ḣ^{s-2}}`
    U2Hom,
    /// `‖∇u₂‖²_{Ḣ^{s-2}}`
    GradU2Hom,
    /// `‖∂₂b‖²_{H^{s-1}}`
    D2BLow,
    ULow2,
    RhoL2,
    BL2,
    DivBL2,
}

impl Q {
    pub const COUNT: usize = 33;

    pub const ALL: [Q; Q::COUNT] = [
        Q::X0,
        Q::GradU,
        Q::Low,
        Q::GradULow,
        Q::D2K1,
        Q::D2K2,
        Q::D2K3,
        Q::GradD2UK1,
        Q::GradD2UK2,
        Q::GradD2UK3,
        Q::D22RhoK1,
        Q::D22RhoK2,
        Q::D22RhoK3,
        Q::D22CurlBK1,
        Q::D22CurlBK2,
        Q::D22CurlBK3,
        Q::D1U1K1,
        Q::D1U1K2,
        Q::D1U1K3,
        Q::GradD1U1K1,
        Q::GradD1U1K2,
        Q::GradD1U1K3,
        Q::OmegaK1,
        Q::OmegaK2,
        Q::OmegaK3,
        Q::U2Hom,
        Q::GradU2Hom,
        Q::D2BLow,
        Q::ULow2,
        Q::RhoL2,
        Q::BL2,
        Q::DivBL2,
        Q::X0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Q::X0 => "x0_hs",
            Q::GradU => "grad_u_hs",
            Q::Low => "x0_hs1",
            Q::GradULow => "grad_u_hs1",
            Q::D2K1 => "d2_k1",
            Q::D2K2 => "d2_k2",
            Q::D2K3 => "d2_k3",
            Q::GradD2UK1 => "grad_d2u_k1",
            Q::GradD2UK2 => "grad_d2u_k2",
            Q::GradD2UK3 => "grad_d2u_k3",
            Q::D22RhoK1 => "d22rho_k1",
            Q::D22RhoK2 => "d22rho_k2",
            Q::D22RhoK3 => "d22rho_k3",
            Q::D22CurlBK1 => "d22curlb_k1",
            Q::D22CurlBK2 => "d22curlb_k2",
            Q::D22CurlBK3 => "d22curlb_k3",
            Q::D1U1K1 => "d1u1_k1",
            Q::D1U1K2 => "d1u1_k2",
            Q::D1U1K3 => "d1u1_k3",
            Q::GradD1U1K1 => "grad_d1u1_k1",
            Q::GradD1U1K2 => "grad_d1u1_k2",
            Q::GradD1U1K3 => "grad_d1u1_k3",
            Q::OmegaK1 => "omega_k1",
            Q::OmegaK2 => "omega_k2",
            Q::OmegaK3 => "omega_k3",
            Q::U2Hom => "u2_hom_s2",
            Q::GradU2Hom => "grad_u2_hom_s2",
            Q::D2BLow => "d2b_hs1",
            Q::ULow2 => "u_l2",
            Q::RhoL2 => "rho_l2",
            Q::BL2 => "b_l2",
            Q::DivBL2 => "div_b_l2",
        }
    }

    pub fn from_name(name: &str) -> Option<Q> {
        Q::ALL[..Q::COUNT - 1].iter().copied().find(|q| q.name() == name)
    }

    fn k_family(base: Q, k: usize) -> Q {
        Q::ALL[base as usize + k - 1]
    }
}

/// Every instantaneous quantity at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub q: [f64; Q::COUNT],
}

impl Sample {
    pub fn get(&self, q: Q) -> f64 {
        self.q[q as usize]
    }
}

fn grad_sq(f: &VectorField, m: f64) -> f64 {
    f.weighted_sum(|a, b| {
        let k2 = (a * a + b * b) as f64;
        k2 * (1.0 + k2).powf(m)
    })
}

fn scalar_grad_sq(f: &ScalarField, m: f64) -> f64 {
    f.weighted_sum(|a, b| {
        let k2 = (a * a + b * b) as f64;
        k2 * (1.0 + k2).powf(m)
    })
}

/// Evaluate every quantity of [`Q`] on `state`.
pub fn sample(state: &State, params: &PhysParams, s: f64) -> Sample {
    let mut q = [0.0; Q::COUNT];
    let (rho, u, b) = (&state.rho, &state.u, &state.b);
    let triple = |m: f64| u.sobolev_norm_sq(m) + rho.sobolev_norm_sq(m) + b.sobolev_norm_sq(m);
    q[Q::X0 as usize] = triple(s);
    q[Q::GradU as usize] = grad_sq(u, s);
    q[Q::Low as usize] = triple(s - 1.0);
    q[Q::GradULow as usize] = grad_sq(u, s - 1.0);

    let curl_b = b.perp_div();
    let d1u1 = u.x1.derivative(crate::spectral::Axis::X1, 1);
    let om = omega(state, params);
    for k in 1..=3usize {
        let m = s - k as f64;
        q[Q::k_family(Q::D2K1, k) as usize] =
            u.aniso_norm_sq(1, m) + rho.aniso_norm_sq(1, m) + b.aniso_norm_sq(1, m);
        q[Q::k_family(Q::GradD2UK1, k) as usize] = u.weighted_sum(|a, c| {
            let k2 = (a * a + c * c) as f64;
            (c * c) as f64 * k2 * (1.0 + k2).powf(m)
        });
        q[Q::k_family(Q::D22RhoK1, k) as usize] = rho.aniso_norm_sq(2, m - 1.0);
        q[Q::k_family(Q::D22CurlBK1, k) as usize] = curl_b.aniso_norm_sq(2, m - 2.0);
        q[Q::k_family(Q::D1U1K1, k) as usize] = d1u1.sobolev_norm_sq(m);
        q[Q::k_family(Q::GradD1U1K1, k) as usize] = scalar_grad_sq(&d1u1, m);
        q[Q::k_family(Q::OmegaK1, k) as usize] = om.sobolev_norm_sq(m);
    }
    q[Q::U2Hom as usize] = u.x2.homogeneous_norm_sq(s - 2.0);
    q[Q::GradU2Hom as usize] = u.x2.homogeneous_norm_sq(s - 1.0);
    q[Q::D2BLow as usize] = b.aniso_norm_sq(1, s - 1.0);
    q[Q::ULow2 as usize] = u.sobolev_norm_sq(0.0);
    q[Q::RhoL2 as usize] = rho.sobolev_norm_sq(0.0);
    q[Q::BL2 as usize] = b.sobolev_norm_sq(0.0);
    q[Q::DivBL2 as usize] = state.divergence_b_l2();
    Sample { t: state.time, q }
}

/// A running supremum `sup_τ w_k(τ) q(τ)` or trapezoid integral `∫ w_k q dτ`.
/// `weight = None` means the unit weight.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Accumulator {
    name: &'static str,
    kind: Kind,
    weight: Option<i32>,
    quantity: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sup,
    Int,
}

const fn sup(name: &'static str, weight: Option<i32>, quantity: Q) -> Accumulator {
    Accumulator {
        name,
        kind: Kind::Sup,
        weight,
        quantity,
    }
}

const fn int(name: &'static str, weight: Option<i32>, quantity: Q) -> Accumulator {
    Accumulator {
        name,
        kind: Kind::Int,
        weight,
        quantity,
    }
}

const ACCUMULATORS: [Accumulator; 36] = [
    sup("sup_w0_x0", Some(0), Q::X0),
    int("int_wm1_x0", Some(-1), Q::X0),
    int("int_w0_grad_u", Some(0), Q::GradU),
    sup("sup_w1_d2", Some(1), Q::D2K1),
    sup("sup_w2_d2", Some(2), Q::D2K2),
    sup("sup_w3_d2", Some(3), Q::D2K3),
    int("int_w1_grad_d2u", Some(1), Q::GradD2UK1),
    int("int_w2_grad_d2u", Some(2), Q::GradD2UK2),
    int("int_w3_grad_d2u", Some(3), Q::GradD2UK3),
    int("P1", Some(1), Q::D22RhoK1),
    int("P2", Some(2), Q::D22RhoK2),
    int("P3", Some(3), Q::D22RhoK3),
    int("B1", Some(1), Q::D22CurlBK1),
    int("B2", Some(2), Q::D22CurlBK2),
    int("B3", Some(3), Q::D22CurlBK3),
    sup("sup_w1_d1u1", Some(1), Q::D1U1K1),
    sup("sup_w2_d1u1", Some(2), Q::D1U1K2),
    sup("sup_w3_d1u1", Some(3), Q::D1U1K3),
    // Filled from d1u1 + omega together; see `observe`.
    sup("sup_w1_d1u1_omega", Some(1), Q::D1U1K1),
    sup("sup_w2_d1u1_omega", Some(2), Q::D1U1K2),
    sup("sup_w3_d1u1_omega", Some(3), Q::D1U1K3),
    int("int_w1_grad_d1u1", Some(1), Q::GradD1U1K1),
    int("int_w2_grad_d1u1", Some(2), Q::GradD1U1K2),
    int("int_w3_grad_d1u1", Some(3), Q::GradD1U1K3),
    int("A1", Some(1), Q::OmegaK1),
    int("A2", Some(2), Q::OmegaK2),
    int("A3", Some(3), Q::OmegaK3),
    int("A_tilde", Some(0), Q::OmegaK1),
    sup("sup_low", None, Q::Low),
    int("int_grad_u_low", None, Q::GradULow),
    sup("sup_w2_u2", Some(2), Q::U2Hom),
    int("int_w2_grad_u2", Some(2), Q::GradU2Hom),
    sup("sup_low_plus_int", None, Q::Low),
    sup("sup_d2b_low", None, Q::D2BLow),
    sup("sup_div_b", None, Q::DivBL2),
    sup("sup_abs_rho_l2", None, Q::RhoL2),
];

fn acc_index(name: &str) -> usize {
    ACCUMULATORS
        .iter()
        .position(|a| a.name == name)
        .unwrap_or_else(|| panic!("unknown accumulator {name}"))
}

/// Time series of samples together with the running accumulators.
#[derive(Debug, Clone)]
pub struct EnergyLedger {
    pub config: DiagnosticsConfig,
    pub samples: Vec<Sample>,
    values: Vec<f64>,
    /// Accumulator values after each observation.
    history: Vec<Vec<f64>>,
}

/// The functionals at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Functionals {
    pub e0: f64,
    /// `E₁, E₂, E₃`
    pub e: [f64; 3],
    pub p: [f64; 3],
    pub b: [f64; 3],
    pub f: [f64; 3],
    pub a: [f64; 3],
    pub a_tilde: f64,
    /// Lower-order energy `𝔈`.
    pub low: f64,
    /// `𝔘`
    pub u2: f64,
}

impl Functionals {
    /// Sum over the constituents of the total energy; the `k = 2` pieces
    /// are reported but not summed.
    pub fn total(&self) -> f64 {
        self.e0
            + self.e[0]
            + self.e[2]
            + self.p[0]
            + self.p[2]
            + self.b[0]
            + self.b[2]
            + self.f[0]
            + self.f[2]
            + self.a[0]
            + self.a[2]
            + self.a_tilde
            + self.u2
            + self.low
    }
}

impl EnergyLedger {
    pub fn new(config: DiagnosticsConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            samples: Vec::new(),
            values: vec![0.0; ACCUMULATORS.len()],
            history: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn weight(&self, k: i32, t: f64) -> f64 {
        time_weight(k, self.config.sigma, t)
    }

    /// Record one state. Times must increase strictly.
    pub fn observe(&mut self, state: &State, params: &PhysParams) -> Result<()> {
        let smp = sample(state, params, self.config.s);
        self.push(smp)
    }

    /// Record a precomputed sample.
    pub fn push(&mut self, smp: Sample) -> Result<()> {
        if let Some(last) = self.samples.last() {
            if !(smp.t > last.t) {
                return Err(Error::InvalidParameter(format!(
                    "observation at t = {} does not follow t = {}",
                    smp.t, last.t
                )));
            }
        }
        let prev = self.samples.last().cloned();
        for (i, acc) in ACCUMULATORS.iter().enumerate() {
            let w = |t: f64| acc.weight.map_or(1.0, |k| self.weight(k, t));
            let val = |s: &Sample| match acc.name {
                "sup_w1_d1u1_omega" => s.get(Q::D1U1K1) + s.get(Q::OmegaK1),
                "sup_w2_d1u1_omega" => s.get(Q::D1U1K2) + s.get(Q::OmegaK2),
                "sup_w3_d1u1_omega" => s.get(Q::D1U1K3) + s.get(Q::OmegaK3),
                _ => s.get(acc.quantity),
            };
            match acc.kind {
                Kind::Sup if acc.name == "sup_low_plus_int" => {}
                Kind::Sup => self.values[i] = self.values[i].max(w(smp.t) * val(&smp)),
                Kind::Int => {
                    if let Some(p) = &prev {
                        let panel = 0.5 * (smp.t - p.t) * (w(p.t) * val(p) + w(smp.t) * val(&smp));
                        self.values[i] += panel;
                    }
                }
            }
        }
        // Running max of the instantaneous lower-order bound: ‖·‖²_{H^{s-1}}(t) + ∫‖∇u‖².
        let j = acc_index("sup_low_plus_int");
        let cur = smp.get(Q::Low) + self.values[acc_index("int_grad_u_low")];
        self.values[j] = self.values[j].max(cur);

        self.samples.push(smp);
        self.history.push(self.values.clone());
        Ok(())
    }

    fn acc_at(&self, idx: usize, name: &str) -> f64 {
        self.history[idx][acc_index(name)]
    }

    /// Every functional after observation `idx`.
    pub fn functionals_at(&self, idx: usize) -> Functionals {
        let a = |n: &str| self.acc_at(idx, n);
        let mut f = Functionals {
            e0: a("sup_w0_x0") + a("int_wm1_x0") + a("int_w0_grad_u"),
            a_tilde: a("A_tilde"),
            low: a("sup_low") + a("int_grad_u_low"),
            u2: a("sup_w2_u2") + a("int_w2_grad_u2"),
            ..Default::default()
        };
        for k in 1..=3 {
            let i = k - 1;
            f.e[i] = a(&format!("sup_w{k}_d2")) + a(&format!("int_w{k}_grad_d2u"));
            f.p[i] = a(&format!("P{k}"));
            f.b[i] = a(&format!("B{k}"));
            f.f[i] = a(&format!("sup_w{k}_d1u1_omega")) + a(&format!("int_w{k}_grad_d1u1"));
            f.a[i] = a(&format!("A{k}"));
        }
        f
    }

    pub fn functionals(&self) -> Result<Functionals> {
        if self.is_empty() {
            return Err(Error::InvalidParameter("empty ledger".into()));
        }
        Ok(self.functionals_at(self.len() - 1))
    }

    pub fn accumulator(&self, name: &str) -> Option<f64> {
        ACCUMULATORS
            .iter()
            .position(|a| a.name == name)
            .map(|i| self.values[i])
    }

    /// `(t, q(t))` pairs for one quantity.
    pub fn series(&self, q: Q) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, s.get(q))).collect()
    }

    pub fn csv_header() -> String {
        let mut h = String::from("t,w_m1,w0,w1,w2,w3");
        for q in &Q::ALL[..Q::COUNT - 1] {
            h.push(',');
            h.push_str(q.name());
        }
        for a in ACCUMULATORS.iter() {
            h.push(',');
            h.push_str(a.name);
        }
        h.push_str(",E_total");
        h
    }

    /// One CSV row per observation.
    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header();
        out.push('\n');
        for (i, s) in self.samples.iter().enumerate() {
            let _ = write!(out, "{:.6}", s.t);
            for k in -1..=3 {
                let _ = write!(out, ",{:.10e}", self.weight(k, s.t));
            }
            for v in &s.q[..Q::COUNT - 1] {
                let _ = write!(out, ",{v:.10e}");
            }
            for v in &self.history[i] {
                let _ = write!(out, ",{v:.10e}");
            }
            let _ = writeln!(out, ",{:.10e}", self.functionals_at(i).total());
        }
        out
    }
}

/// `E_total` of the ledger's final state.
pub fn total_energy(ledger: &EnergyLedger) -> Result<f64> {
    Ok(ledger.functionals()?.total())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub quantity: String,
    pub window: (f64, f64),
    pub exponent: f64,
    pub r_squared: f64,
    pub samples: usize,
    pub degenerate: bool,
}

impl DecayFit {
    pub fn report(&self) -> String {
        format!(
            "{{ quantity: {}, window: [{}, {}], exponent: {:.6}, r_squared: {:.6}, samples: {}, degenerate: {} }}",
            self.quantity, self.window.0, self.window.1, self.exponent, self.r_squared, self.samples, self.degenerate
        )
    }
}

/// Least-squares slope of `ln q` against `ln(1+t)` over `window`.
pub fn decay_fit(ledger: &EnergyLedger, quantity: Q, window: (f64, f64)) -> DecayFit {
    fit_series(quantity.name(), &ledger.series(quantity), window)
}

/// [`decay_fit`] on raw `(t, q)` pairs. Fewer than 10 points or a nonpositive
/// value flags the fit as degenerate; nonpositive values are floored.
pub fn fit_series(name: &str, series: &[(f64, f64)], window: (f64, f64)) -> DecayFit {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .copied()
        .collect();
    let mut degenerate = pts.len() < 10;
    let xs: Vec<f64> = pts.iter().map(|(t, _)| (1.0 + t).ln()).collect();
    let ys: Vec<f64> = pts
        .iter()
        .map(|&(_, q)| {
            if q > 0.0 && q.is_finite() {
                q.ln()
            } else {
                degenerate = true;
                f64::MIN_POSITIVE.ln()
            }
        })
        .collect();
    let n = xs.len() as f64;
    let (exponent, r_squared) = if xs.len() < 2 {
        (f64::NAN, 0.0)
    } else {
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let slope = sxy / sxx;
        let ss_res: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
            .sum();
        let flat = ys.iter().all(|&y| y == ys[0]);
        let r2 = if flat || syy <= 1e-300 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
        (slope, r2)
    };
    DecayFit {
        quantity: name.to_string(),
        window,
        exponent,
        r_squared,
        samples: pts.len(),
        degenerate,
    }
}

/// One bound of the main theorem, tracked over the run.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorEntry {
    pub family: u8,
    pub k: Option<u8>,
    pub label: String,
    /// Whether the bound controls a supremum (as opposed to a pure time integral).
    pub sup_type: bool,
    /// `(t, ratio)`; already a running maximum.
    pub history: Vec<(f64, f64)>,
    pub running_max: f64,
    pub pass: bool,
}

impl MonitorEntry {
    /// Ratio at the last sample not after `t`.
    pub fn ratio_at(&self, t: f64) -> f64 {
        self.history
            .iter()
            .take_while(|(s, _)| *s <= t + 1e-9)
            .last()
            .map_or(0.0, |&(_, r)| r)
    }

    /// `ratio(t_b) / ratio(t_a)` with `0/0 = 0`.
    pub fn growth(&self, t_a: f64, t_b: f64) -> f64 {
        let (a, b) = (self.ratio_at(t_a), self.ratio_at(t_b));
        if b == 0.0 {
            0.0
        } else {
            b / a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    pub epsilon: f64,
    pub ceiling: f64,
    pub entries: Vec<MonitorEntry>,
}

impl MonitorReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("epsilon = {:e}, ceiling = {} (calibrated)\n", self.epsilon, self.ceiling);
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{:<40} max ratio {:.4e}  {}",
                e.label,
                e.running_max,
                if e.pass { "ok" } else { "above ceiling" }
            );
        }
        s
    }
}

/// Ratios of the six bound families to `ε²` (or `ε` for the `ρ` integral).
pub fn theorem_monitor(ledger: &EnergyLedger, epsilon: f64, ceiling: f64) -> MonitorReport {
    let eps2 = epsilon * epsilon;
    let norm = |x: f64, d: f64| if x == 0.0 { 0.0 } else { x / d };
    let mut specs: Vec<(u8, Option<u8>, String, bool, Box<dyn Fn(usize) -> f64>)> = Vec::new();
    let h = |idx: usize, n: &str| ledger.acc_at(idx, n);
    specs.push((
        1,
        None,
        "1: sup w0 (|u|^2+|rho|^2+|b|^2)_Hs / eps^2".into(),
        true,
        Box::new(move |i| norm(h(i, "sup_w0_x0"), eps2)),
    ));
    specs.push((
        2,
        None,
        "2: (low(t) + int |grad u|^2)_Hs-1 / eps^2".into(),
        true,
        Box::new(move |i| norm(h(i, "sup_low_plus_int"), eps2)),
    ));
    for k in 1..=3u8 {
        let sup_n = format!("sup_w{k}_d2");
        let int_n = format!("int_w{k}_grad_d2u");
        specs.push((
            3,
            Some(k),
            format!("3: E_{k} / eps^2"),
            true,
            Box::new(move |i| norm(h(i, &sup_n) + h(i, &int_n), eps2)),
        ));
    }
    for k in 1..=3u8 {
        let n = format!("P{k}");
        specs.push((4, Some(k), format!("4: P_{k} / eps"), false, Box::new(move |i| norm(h(i, &n), epsilon))));
    }
    for k in 1..=3u8 {
        let n = format!("B{k}");
        specs.push((5, Some(k), format!("5: B_{k} / eps^2"), false, Box::new(move |i| norm(h(i, &n), eps2))));
    }
    for k in 1..=3u8 {
        let sup_n = format!("sup_w{k}_d1u1");
        let int_n = format!("int_w{k}_grad_d1u1");
        specs.push((
            6,
            Some(k),
            format!("6: (sup w{k} |d1 u1|^2 + int) / eps^2"),
            true,
            Box::new(move |i| norm(h(i, &sup_n) + h(i, &int_n), eps2)),
        ));
    }
    let entries = specs
        .into_iter()
        .map(|(family, k, label, sup_type, f)| {
            let mut running = 0.0f64;
            let history: Vec<(f64, f64)> = (0..ledger.len())
                .map(|i| {
                    running = running.max(f(i));
                    (ledger.samples[i].t, running)
                })
                .collect();
            MonitorEntry {
                family,
                k,
                label,
                sup_type,
                pass: running <= ceiling,
                running_max: running,
                history,
            }
        })
        .collect();
    MonitorReport {
        epsilon,
        ceiling,
        entries,
    }
}
