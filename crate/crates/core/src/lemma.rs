//! Randomized checks of the commutator estimate, the anisotropic
//! triple-product estimate and the quadratic pressure remainders.
//!
//! Trials draw band-limited random fields and evaluate every product on a
//! grid of twice the size, so neither side of an inequality is aliased.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::physics::PressureLaw;
use crate::spectral::{random_field_with, Grid, ScalarField, SpectrumShape, VectorField};

/// Largest wavenumber in the random trial fields.
pub const TRIAL_BAND: i64 = 8;
const TRIAL_DECAY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    Commutator,
    TripleProduct,
}

impl Lemma {
    pub fn name(self) -> &'static str {
        match self {
            Lemma::Commutator => "commutator",
            Lemma::TripleProduct => "triple_product",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaTrial {
    pub lemma: Lemma,
    pub seed: u64,
    pub s0: u32,
    /// The multi-index `(α₁, α₂)` of the derivative.
    pub alpha: (u32, u32),
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl LemmaTrial {
    fn new(lemma: Lemma, seed: u64, s0: u32, alpha: (u32, u32), lhs: f64, rhs: f64) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs.abs() };
        Self {
            lemma,
            seed,
            s0,
            alpha,
            lhs,
            rhs,
            ratio,
        }
    }

    pub const CSV_HEADER: &'static str = "lemma,seed,s0,lhs,rhs,ratio";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{:.12e},{:.12e},{:.12e}",
            self.lemma.name(),
            self.seed,
            self.s0,
            self.lhs,
            self.rhs,
            self.ratio
        )
    }
}

fn check_resolution(grid: &Grid, s0: u32, band: i64) -> Result<()> {
    if s0 < 1 {
        return Err(Error::InvalidParameter("s0 must be at least 1".into()));
    }
    let need = 3 * (s0 as usize + band as usize);
    if grid.n1().min(grid.n2()) < need {
        return Err(Error::Resolution(format!(
            "lemma trials at s0 = {s0} need n >= {need}, got {}x{}",
            grid.n1(),
            grid.n2()
        )));
    }
    Ok(())
}

fn padded(grid: &Grid) -> Result<Grid> {
    Grid::new(2 * grid.n1(), 2 * grid.n2())
}

/// A random band-limited field scaled to unit `H^{s0}` norm. Both sides of
/// each inequality are homogeneous, so the scale only bounds round-off.
fn draw(grid: &Grid, rng: &mut ChaCha8Rng, s0: u32) -> Result<ScalarField> {
    let shape = SpectrumShape::new(1.0, TRIAL_DECAY, false).band_limited(TRIAL_BAND);
    let f = random_field_with(grid, rng, shape)?;
    let n = f.sobolev_norm(s0 as f64);
    Ok(if n > 0.0 { f.scale(1.0 / n) } else { f })
}

/// Largest `max(|k₁|, |k₂|)` carrying a nonzero coefficient.
fn support_radius(f: &ScalarField) -> i64 {
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(i, _)| {
            let (a, b) = f.grid().k(i);
            a.abs().max(b.abs())
        })
        .max()
        .unwrap_or(0)
}

/// Product with the transform round-off outside the exact support removed.
fn exact_product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    let r = support_radius(f) + support_radius(g);
    Ok(f.product(g)?.map_modes(|a, b| {
        if a.abs() <= r && b.abs() <= r {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    }))
}

fn draw_alpha(rng: &mut ChaCha8Rng, s0: u32) -> (u32, u32) {
    let a1 = rng.random_range(0..=s0);
    (a1, s0 - a1)
}

fn d(f: &ScalarField, alpha: (u32, u32)) -> ScalarField {
    f.mixed_derivative(alpha.0, alpha.1)
}

fn grad_norm(f: &ScalarField, m: f64) -> f64 {
    f.gradient().sobolev_norm(m)
}

/// `‖[∂^α, f] g‖_{L²}` on the padded grid.
pub fn commutator_lhs(f: &ScalarField, g: &ScalarField, alpha: (u32, u32)) -> Result<f64> {
    let fg = exact_product(f, g)?;
    let mut c = d(&fg, alpha);
    c.axpy(-1.0, &exact_product(f, &d(g, alpha))?);
    Ok(c.l2_norm())
}

/// Right side of the commutator estimate without its constant.
pub fn commutator_rhs(f: &ScalarField, g: &ScalarField, s0: u32) -> f64 {
    let half = (s0 / 2) as f64;
    let m = s0 as f64 - 1.0;
    grad_norm(f, half + 1.0) * g.sobolev_norm(m) + grad_norm(f, m) * g.sobolev_norm(half + 2.0)
}

/// One commutator trial with fields and derivative drawn from `seed`.
pub fn commutator_trial(seed: u64, s0: u32, grid: &Grid) -> Result<LemmaTrial> {
    check_resolution(grid, s0, TRIAL_BAND)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = draw_alpha(&mut rng, s0);
    let f = draw(grid, &mut rng, s0)?;
    let g = draw(grid, &mut rng, s0)?;
    commutator_trial_with(seed, s0, alpha, &f, &g)
}

/// Commutator trial on given fields.
pub fn commutator_trial_with(
    seed: u64,
    s0: u32,
    alpha: (u32, u32),
    f: &ScalarField,
    g: &ScalarField,
) -> Result<LemmaTrial> {
    f.grid().ensure_same(g.grid())?;
    let big = padded(f.grid())?;
    let (fp, gp) = (f.resample(&big), g.resample(&big));
    let lhs = commutator_lhs(&fp, &gp, alpha)?;
    let rhs = commutator_rhs(f, g, s0);
    Ok(LemmaTrial::new(Lemma::Commutator, seed, s0, alpha, lhs, rhs))
}

fn pad_vec(v: &VectorField, big: &Grid) -> VectorField {
    v.map(|c| c.resample(big))
}

/// `|Σ_i ∫ ∂^α(f·∇g_i) ∂^α g_i dx|` on the padded grid.
pub fn triple_product_lhs(f: &VectorField, g: &VectorField, alpha: (u32, u32)) -> Result<f64> {
    let mut total = 0.0;
    for gi in [&g.x1, &g.x2] {
        let grad = gi.gradient();
        let mut adv = exact_product(&f.x1, &grad.x1)?;
        adv.axpy(1.0, &exact_product(&f.x2, &grad.x2)?);
        total += d(&adv, alpha).inner(&d(gi, alpha));
    }
    Ok(total.abs())
}

/// Right side of the triple-product estimate without its constant.
pub fn triple_product_rhs(f: &VectorField, g: &VectorField, s0: u32) -> f64 {
    let half = (s0 / 2) as f64;
    let m = s0 as f64 - 1.0;
    let g_dot = g.homogeneous_norm_sq(s0 as f64).sqrt();
    let d1g = g.map(|c| c.derivative(crate::spectral::Axis::X1, 1));
    let d2g = g.map(|c| c.derivative(crate::spectral::Axis::X2, 1));
    let line1 = grad_norm(&f.x1, half + 1.0) * d1g.sobolev_norm(m) + grad_norm(&f.x2, half + 1.0) * d2g.sobolev_norm(m);
    let line2 = grad_norm(&f.x1, m) * d1g.sobolev_norm(half + 2.0) + grad_norm(&f.x2, m) * d2g.sobolev_norm(half + 2.0);
    let line3 = f.divergence().sobolev_norm(2.0) * g_dot * g_dot;
    (line1 + line2) * g_dot + line3
}

pub fn triple_product_trial(seed: u64, s0: u32, grid: &Grid) -> Result<LemmaTrial> {
    check_resolution(grid, s0, TRIAL_BAND)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = draw_alpha(&mut rng, s0);
    let f = VectorField::new(draw(grid, &mut rng, s0)?, draw(grid, &mut rng, s0)?)?;
    let g = VectorField::new(draw(grid, &mut rng, s0)?, draw(grid, &mut rng, s0)?)?;
    triple_product_trial_with(seed, s0, alpha, &f, &g)
}

pub fn triple_product_trial_with(
    seed: u64,
    s0: u32,
    alpha: (u32, u32),
    f: &VectorField,
    g: &VectorField,
) -> Result<LemmaTrial> {
    f.grid().ensure_same(g.grid())?;
    let big = padded(f.grid())?;
    let lhs = triple_product_lhs(&pad_vec(f, &big), &pad_vec(g, &big), alpha)?;
    let rhs = triple_product_rhs(f, g, s0);
    Ok(LemmaTrial::new(Lemma::TripleProduct, seed, s0, alpha, lhs, rhs))
}

/// A batch of trials of one lemma at one `s₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub lemma: Lemma,
    pub s0: u32,
    pub trials: Vec<LemmaTrial>,
}

impl Ensemble {
    /// Trials with seeds `master, master+1, …`, so a larger ensemble extends a smaller one.
    pub fn run(lemma: Lemma, s0: u32, grid: &Grid, master_seed: u64, count: usize) -> Result<Self> {
        let trials = (0..count as u64)
            .map(|i| {
                let seed = master_seed.wrapping_add(i);
                match lemma {
                    Lemma::Commutator => commutator_trial(seed, s0, grid),
                    Lemma::TripleProduct => triple_product_trial(seed, s0, grid),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lemma, s0, trials })
    }

    pub fn max_ratio(&self) -> f64 {
        self.trials.iter().map(|t| t.ratio).fold(0.0, f64::max)
    }

    pub fn median_ratio(&self) -> f64 {
        let mut r: Vec<f64> = self.trials.iter().map(|t| t.ratio).collect();
        if r.is_empty() {
            return 0.0;
        }
        r.sort_by(f64::total_cmp);
        let n = r.len();
        if n % 2 == 1 {
            r[n / 2]
        } else {
            0.5 * (r[n / 2 - 1] + r[n / 2])
        }
    }

    pub fn violations(&self, ratio_max: f64) -> usize {
        self.trials.iter().filter(|t| t.lhs > ratio_max * t.rhs).count()
    }

    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for t in &self.trials {
            let _ = writeln!(s, "{}", t.csv());
        }
        s
    }

    /// SHA-256 of the CSV rows.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.csv_rows().as_bytes()))
    }
}

/// Largest `|q(ρ)|/ρ²` and `|q₁(ρ)|/ρ²` over the samples, with both remainders
/// computed by quadrature. At `ρ = 0` the ratios are the limits `½|q''(0)|` and `½|q₁''(0)|`.
pub fn pressure_remainder_trial(law: PressureLaw, rho_samples: &[f64]) -> Result<(f64, f64)> {
    let mut out = (0.0f64, 0.0f64);
    for &r in rho_samples {
        if !(r.abs() <= 0.5) {
            return Err(Error::InvalidParameter(format!("density sample {r} outside [-1/2, 1/2]")));
        }
        let (a, b) = if r == 0.0 {
            (
                0.5 * law.q_second_derivative_at_zero().abs(),
                0.5 * law.q1_second_derivative_at_zero().abs(),
            )
        } else {
            (
                law.q_by_quadrature(r).abs() / (r * r),
                law.q1_by_quadrature(r).abs() / (r * r),
            )
        };
        out = (out.0.max(a), out.1.max(b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::square(64).unwrap()
    }

    #[test]
    fn trig_commutator_oracle() {
        let g = grid();
        let c = ScalarField::from_fn(&g, |x, _| x.cos());
        let t = commutator_trial_with(0, 1, (1, 0), &c, &c).unwrap();
        assert_relative_eq!(t.lhs, (PI * PI / 2.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn constant_f_commutes() {
        let g = grid();
        let mut worst = 0.0f64;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let alpha = draw_alpha(&mut rng, 3);
            let gg = draw(&g, &mut rng, 3).unwrap();
            let f = ScalarField::constant(&g, rng.random_range(-2.0..2.0));
            let t = commutator_trial_with(seed, 3, alpha, &f, &gg).unwrap();
            worst = worst.max(t.lhs);
            assert_eq!(t.rhs, 0.0);
            assert_eq!(t.ratio, if t.lhs == 0.0 { 0.0 } else { f64::INFINITY });
        }
        assert!(worst < 1e-13, "{worst}");
    }

    #[test]
    fn zero_g_gives_zero() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = draw(&g, &mut rng, 3).unwrap();
        let z = ScalarField::zeros(&g);
        let t = commutator_trial_with(5, 2, (1, 1), &f, &z).unwrap();
        assert_eq!((t.lhs, t.ratio), (0.0, 0.0));
        let fv = VectorField::new(f.clone(), f).unwrap();
        let t = triple_product_trial_with(5, 2, (2, 0), &fv, &VectorField::zeros(&g)).unwrap();
        assert_eq!((t.lhs, t.ratio), (0.0, 0.0));
    }

    #[test]
    fn orthogonal_transport() {
        let g = grid();
        let f = VectorField::new(ScalarField::from_fn(&g, |_, y| y.sin()), ScalarField::zeros(&g)).unwrap();
        let h = VectorField::new(
            ScalarField::from_fn(&g, |_, y| (2.0 * y).cos()),
            ScalarField::from_fn(&g, |_, y| y.sin() + 0.3 * (3.0 * y).cos()),
        )
        .unwrap();
        for alpha in [(0, 2), (1, 1), (0, 3)] {
            let t = triple_product_trial_with(0, alpha.0 + alpha.1, alpha, &f, &h).unwrap();
            assert!(t.lhs < 1e-12, "{}", t.lhs);
            // ∂₁g = 0, f₂ = 0 and ∇·f = 0 annihilate every term on the right as well.
            assert_eq!(t.rhs, 0.0);
        }
    }

    #[test]
    fn ratio_is_invariant_under_scaling_f() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = draw(&g, &mut rng, 3).unwrap();
        let h = draw(&g, &mut rng, 3).unwrap();
        let a = commutator_trial_with(0, 3, (2, 1), &f, &h).unwrap();
        let b = commutator_trial_with(0, 3, (2, 1), &f.scale(-7.5), &h).unwrap();
        assert_relative_eq!(a.ratio, b.ratio, max_relative = 1e-12);
        assert_relative_eq!(b.lhs, 7.5 * a.lhs, max_relative = 1e-12);
    }

    #[test]
    fn padded_products_are_exact() {
        // The commutator equals the Leibniz sum of lower-order products.
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = draw(&g, &mut rng, 3).unwrap();
        let h = draw(&g, &mut rng, 3).unwrap();
        let big = padded(&g).unwrap();
        let (fp, hp) = (f.resample(&big), h.resample(&big));
        let lhs = commutator_lhs(&fp, &hp, (1, 1)).unwrap();
        let mut sum = fp.mixed_derivative(1, 0).product(&hp.mixed_derivative(0, 1)).unwrap();
        sum.axpy(1.0, &fp.mixed_derivative(0, 1).product(&hp.mixed_derivative(1, 0)).unwrap());
        sum.axpy(1.0, &fp.mixed_derivative(1, 1).product(&hp).unwrap());
        assert_relative_eq!(lhs, sum.l2_norm(), max_relative = 1e-12);
    }

    #[test]
    fn resolution_is_checked() {
        let g = Grid::square(32).unwrap();
        assert!(matches!(commutator_trial(0, 3, &g), Err(Error::Resolution(_))));
        assert!(commutator_trial(0, 0, &grid()).is_err());
    }

    #[test]
    fn ensembles_are_deterministic() {
        let g = grid();
        let a = Ensemble::run(Lemma::TripleProduct, 2, &g, 99, 8).unwrap();
        let b = Ensemble::run(Lemma::TripleProduct, 2, &g, 99, 8).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert!(a.max_ratio().is_finite() && a.max_ratio() > 0.0);
        assert!(a.median_ratio() <= a.max_ratio());
    }

    #[test]
    fn pressure_remainders() {
        let law = PressureLaw::Gamma(1.4);
        let (q, q1) = pressure_remainder_trial(law, &[0.0]).unwrap();
        assert_relative_eq!(q, 0.2, epsilon = 1e-15);
        assert_relative_eq!(q1, 0.3, epsilon = 1e-15);
        let (q, _) = pressure_remainder_trial(law, &[0.5]).unwrap();
        let closed = ((1.5f64.powf(1.4) - 1.0) / 1.4 - 0.5) / 0.25;
        assert_relative_eq!(q, closed, max_relative = 1e-12);
        let (q, q1) = pressure_remainder_trial(PressureLaw::Linear, &[-0.5, 0.0, 0.3]).unwrap();
        assert_eq!(q, 0.0);
        assert!(q1 > 0.0);
        assert!(pressure_remainder_trial(law, &[0.6]).is_err());
    }
}
