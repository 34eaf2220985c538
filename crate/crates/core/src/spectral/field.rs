use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Coordinate direction on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Axis::X1),
            2 => Ok(Axis::X2),
            _ => Err(Error::InvalidParameter(format!("axis must be 1 or 2, got {i}"))),
        }
    }
}

/// A real-valued scalar field stored by its Fourier coefficients,
/// `f(x) = Σ_k f̂_k e^{ik·x}`.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.coeffs == other.coeffs
    }
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// Wrap raw coefficients (FFT order). No masking is applied.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Sample `f` on the collocation points and transform (masked).
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let (x1, x2) = grid.point(i);
                f(x1, x2)
            })
            .collect();
        Self::from_physical(grid, &values)
    }

    /// Two real fields from collocation values, sharing one transform.
    pub fn from_physical_pair(grid: &Grid, x: &[f64], y: &[f64]) -> (Self, Self) {
        let (a, b) = grid.to_spectral_pair(x, y);
        (
            Self {
                grid: grid.clone(),
                coeffs: a,
            },
            Self {
                grid: grid.clone(),
                coeffs: b,
            },
        )
    }

    /// Collocation values of two real fields, sharing one transform.
    pub fn to_physical_pair(a: &ScalarField, b: &ScalarField) -> (Vec<f64>, Vec<f64>) {
        a.grid.to_physical_pair(&a.coeffs, &b.coeffs)
    }

    pub fn from_physical(grid: &Grid, values: &[f64]) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: grid.to_spectral(values),
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// A single Fourier mode `amp · e^{ik·x}` (complex-valued in general).
    pub fn mode(grid: &Grid, k1: i64, k2: i64, amp: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[grid.index(k1, k2)] = amp;
        f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        self.coeffs[self.grid.index(k1, k2)]
    }

    pub fn set(&mut self, k1: i64, k2: i64, value: Complex64) {
        let i = self.grid.index(k1, k2);
        self.coeffs[i] = value;
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.grid.to_physical(&self.coeffs)
    }

    /// Mean value over the box, i.e. the `(0,0)` coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.to_physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Spectral multiplier: `f̂_k ↦ m(k1, k2) f̂_k`.
    pub fn map_modes(&self, m: impl Fn(i64, i64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let (a, b) = self.grid.k(i);
                c * m(a, b)
            })
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// `∂_axis^order f`, exact in spectral space.
    pub fn derivative(&self, axis: Axis, order: u32) -> Self {
        match axis {
            Axis::X1 => self.map_modes(|a, _| i_pow(a, order)),
            Axis::X2 => self.map_modes(|_, b| i_pow(b, order)),
        }
    }

    /// Mixed derivative `∂₁^{a1} ∂₂^{a2} f`.
    pub fn mixed_derivative(&self, a1: u32, a2: u32) -> Self {
        self.map_modes(|k1, k2| i_pow(k1, a1) * i_pow(k2, a2))
    }

    pub fn laplacian(&self) -> Self {
        self.map_modes(|a, b| Complex64::new(-((a * a + b * b) as f64), 0.0))
    }

    pub fn gradient(&self) -> VectorField {
        VectorField {
            x1: self.derivative(Axis::X1, 1),
            x2: self.derivative(Axis::X2, 1),
        }
    }

    /// `∇⊥ f = (∂₂ f, -∂₁ f)`.
    pub fn perp_grad(&self) -> VectorField {
        VectorField {
            x1: self.derivative(Axis::X2, 1),
            x2: -&self.derivative(Axis::X1, 1),
        }
    }

    /// Dealiased pointwise product. Real fields take the real transform path;
    /// non-Hermitian coefficient sets are multiplied as complex functions.
    pub fn product(&self, other: &ScalarField) -> Result<ScalarField> {
        self.grid.ensure_same(&other.grid)?;
        if self.hermitian_defect() == 0.0 && other.hermitian_defect() == 0.0 {
            let a = self.to_physical();
            let b = other.to_physical();
            let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            return Ok(Self::from_physical(&self.grid, &p));
        }
        let a = self.grid.to_physical_complex(&self.coeffs);
        let b = self.grid.to_physical_complex(&other.coeffs);
        let p: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Ok(Self {
            grid: self.grid.clone(),
            coeffs: self.grid.to_spectral_complex(&p),
        })
    }

    /// Apply a pointwise nonlinearity on the collocation grid, then dealias.
    pub fn map_pointwise(&self, f: impl Fn(f64) -> f64) -> Self {
        let v: Vec<f64> = self.to_physical().into_iter().map(f).collect();
        Self::from_physical(&self.grid, &v)
    }

    /// Zero modes outside the mask.
    pub fn dealias(&mut self) {
        let g = self.grid.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !g.mask(i) {
                *c = Complex64::default();
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += d * a;
        }
    }

    /// Weighted spectral sum `(2π)² Σ_k w(k) |f̂_k|²`.
    pub fn weighted_energy(&self, w: impl Fn(f64) -> f64) -> f64 {
        let total: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, c)| w(self.grid.k_sq(i)) * c.norm_sqr())
            .sum();
        4.0 * PI * PI * total
    }

    /// `(2π)² Σ_k w(k₁, k₂) |f̂_k|²` for an arbitrary multiplier weight.
    pub fn weighted_sum(&self, w: impl Fn(i64, i64) -> f64) -> f64 {
        let total: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(i, c)| {
                let (a, b) = self.grid.k(i);
                w(a, b) * c.norm_sqr()
            })
            .sum();
        4.0 * PI * PI * total
    }

    /// `‖f‖_{H^s} = ((2π)² Σ (1+|k|²)^s |f̂_k|²)^{1/2}`. Any real `s` is accepted;
    /// negative indices give the dual norms.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        if s == 0.0 {
            self.weighted_energy(|_| 1.0)
        } else {
            self.weighted_energy(|k2| (1.0 + k2).powf(s))
        }
    }

    /// Homogeneous norm `‖f‖_{Ḣ^s}` (zero mode excluded for `s > 0`).
    pub fn homogeneous_norm_sq(&self, s: f64) -> f64 {
        self.weighted_energy(|k2| if k2 == 0.0 { if s == 0.0 { 1.0 } else { 0.0 } } else { k2.powf(s) })
    }

    pub fn homogeneous_norm(&self, s: f64) -> f64 {
        self.homogeneous_norm_sq(s).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `‖∂₂^{vertical_order} f‖_{H^m}`.
    pub fn aniso_norm(&self, vertical_order: u32, m: f64) -> f64 {
        self.aniso_norm_sq(vertical_order, m).sqrt()
    }

    pub fn aniso_norm_sq(&self, vertical_order: u32, m: f64) -> f64 {
        let p = 2 * vertical_order as i32;
        let g = &self.grid;
        let total: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (_, b) = g.k(i);
                let weight = (b as f64).powi(p) * (1.0 + g.k_sq(i)).powf(m);
                weight * c.norm_sqr()
            })
            .sum();
        4.0 * PI * PI * total
    }

    /// `∫ f g dx` via Parseval.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        4.0 * PI * PI * s
    }

    /// Copy the coefficients onto another grid, keeping modes present on both.
    pub fn resample(&self, target: &Grid) -> ScalarField {
        let mut out = ScalarField::zeros(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let (a, b) = self.grid.k(i);
            if target.contains(a, b) {
                out.set(a, b, *c);
            }
        }
        out
    }

    /// Largest deviation from Hermitian symmetry `f̂_{-k} = conj(f̂_k)`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.grid.conj_index(i)].conj()).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl std::ops::Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

/// A pair of scalar fields on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x1: ScalarField,
    pub x2: ScalarField,
}

impl VectorField {
    pub fn new(x1: ScalarField, x2: ScalarField) -> Result<Self> {
        x1.grid().ensure_same(x2.grid())?;
        Ok(Self { x1, x2 })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            x1: ScalarField::zeros(grid),
            x2: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.x1.grid()
    }

    pub fn component(&self, axis: Axis) -> &ScalarField {
        match axis {
            Axis::X1 => &self.x1,
            Axis::X2 => &self.x2,
        }
    }

    pub fn divergence(&self) -> ScalarField {
        let mut d = self.x1.derivative(Axis::X1, 1);
        d.axpy(1.0, &self.x2.derivative(Axis::X2, 1));
        d
    }

    /// `∇⊥ · v = ∂₂ v₁ - ∂₁ v₂`.
    pub fn perp_div(&self) -> ScalarField {
        let mut d = self.x1.derivative(Axis::X2, 1);
        d.axpy(-1.0, &self.x2.derivative(Axis::X1, 1));
        d
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            x1: f(&self.x1),
            x2: f(&self.x2),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        self.x1.sobolev_norm_sq(s) + self.x2.sobolev_norm_sq(s)
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    pub fn homogeneous_norm_sq(&self, s: f64) -> f64 {
        self.x1.homogeneous_norm_sq(s) + self.x2.homogeneous_norm_sq(s)
    }

    pub fn aniso_norm_sq(&self, vertical_order: u32, m: f64) -> f64 {
        self.x1.aniso_norm_sq(vertical_order, m) + self.x2.aniso_norm_sq(vertical_order, m)
    }

    pub fn weighted_sum(&self, w: impl Fn(i64, i64) -> f64) -> f64 {
        self.x1.weighted_sum(&w) + self.x2.weighted_sum(&w)
    }

    /// `‖∇v‖²_{H^s}` summed over both components.
    pub fn grad_norm_sq(&self, s: f64) -> f64 {
        self.x1.gradient().sobolev_norm_sq(s) + self.x2.gradient().sobolev_norm_sq(s)
    }
}

/// `(∂₂ f, -∂₁ f)`.
pub fn perp_grad(f: &ScalarField) -> VectorField {
    f.perp_grad()
}

/// `∂₂ v₁ - ∂₁ v₂`.
pub fn perp_div(v: &VectorField) -> ScalarField {
    v.perp_div()
}

/// `∂_axis^order f`.
pub fn derivative(f: &ScalarField, axis: Axis, order: u32) -> ScalarField {
    f.derivative(axis, order)
}

/// Dealiased product of two fields on the same grid.
pub fn product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    f.product(g)
}

pub fn sobolev_norm(f: &ScalarField, s: f64) -> f64 {
    f.sobolev_norm(s)
}

pub fn aniso_norm(f: &ScalarField, vertical_order: u32, m: f64) -> f64 {
    f.aniso_norm(vertical_order, m)
}

/// `(ik)^order` with integer arithmetic, so the symbol is exact.
fn i_pow(k: i64, order: u32) -> Complex64 {
    let m = (k as f64).powi(order as i32);
    match order % 4 {
        0 => Complex64::new(m, 0.0),
        1 => Complex64::new(0.0, m),
        2 => Complex64::new(-m, 0.0),
        _ => Complex64::new(0.0, -m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::square(32).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn derivative_of_exponential_mode() {
        let g = grid();
        let f = ScalarField::mode(&g, 1, 0, Complex64::new(1.0, 0.0));
        let d = f.derivative(Axis::X1, 1);
        assert_eq!(d.get(1, 0), Complex64::new(0.0, 1.0));
        assert_eq!(d.max_abs_coeff(), 1.0);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid();
        let f = ScalarField::constant(&g, 1.0);
        for axis in [Axis::X1, Axis::X2] {
            for order in 1..4 {
                assert_eq!(f.derivative(axis, order).max_abs_coeff(), 0.0);
            }
        }
    }

    #[test]
    fn second_derivative_of_cosine() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |_, y| (2.0 * y).cos());
        let d = f.derivative(Axis::X2, 2);
        let expect = f.scale(-4.0);
        // Round-off in the empty modes is amplified by k².
        assert!((&d - &expect).max_abs_coeff() < 1e-13);
    }

    #[test]
    fn perp_grad_examples() {
        let g = grid();
        let v = ScalarField::from_fn(&g, |x, _| x.sin()).perp_grad();
        assert!(v.x1.max_abs_coeff() < 1e-15);
        let expect = ScalarField::from_fn(&g, |x, _| -x.cos());
        assert!((&v.x2 - &expect).max_abs_coeff() < 1e-14);

        let v = ScalarField::from_fn(&g, |_, y| y.sin()).perp_grad();
        let expect = ScalarField::from_fn(&g, |_, y| y.cos());
        assert!((&v.x1 - &expect).max_abs_coeff() < 1e-14);
        assert!(v.x2.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn perp_div_examples() {
        let g = grid();
        let v = VectorField::new(
            ScalarField::from_fn(&g, |_, y| y.sin()),
            ScalarField::zeros(&g),
        )
        .unwrap();
        let expect = ScalarField::from_fn(&g, |_, y| y.cos());
        assert!((&v.perp_div() - &expect).max_abs_coeff() < 1e-14);

        let f = ScalarField::from_fn(&g, |x, y| x.sin() * y.sin());
        let expect = f.scale(-2.0);
        assert!((&f.perp_grad().perp_div() - &expect).max_abs_coeff() < 1e-14);

        let v = VectorField::new(
            ScalarField::zeros(&g),
            ScalarField::from_fn(&g, |x, _| x.sin()),
        )
        .unwrap();
        let expect = ScalarField::from_fn(&g, |x, _| -x.cos());
        assert!((&v.perp_div() - &expect).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn product_examples() {
        let g = grid();
        let c = ScalarField::from_fn(&g, |x, _| x.cos());
        let p = c.product(&c).unwrap();
        let expect = ScalarField::from_fn(&g, |x, _| 0.5 + 0.5 * (2.0 * x).cos());
        assert!((&p - &expect).max_abs_coeff() < 1e-15);

        let one = ScalarField::constant(&g, 1.0);
        let f = ScalarField::from_fn(&g, |x, y| (x + 2.0 * y).sin() + 0.3 * (3.0 * x).cos());
        assert!((&f.product(&one).unwrap() - &f).max_abs_coeff() < 1e-15);

        // 32 / 3 = 10; the mode 10 squared lands on 20, outside the mask.
        let m = ScalarField::mode(&g, 10, 0, Complex64::new(1.0, 0.0));
        let sq = m.product(&m).unwrap();
        assert!(sq.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn product_rejects_mismatched_grids() {
        let a = ScalarField::zeros(&Grid::square(16).unwrap());
        let b = ScalarField::zeros(&Grid::square(32).unwrap());
        assert!(a.product(&b).is_err());
    }

    /// Brute-force midpoint quadrature of `∫ f² dx` on a fine auxiliary grid.
    fn quadrature_l2_sq(f: impl Fn(f64, f64) -> f64) -> f64 {
        let m = 400;
        let h = 2.0 * PI / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = -PI + (i as f64 + 0.5) * h;
                let y = -PI + (j as f64 + 0.5) * h;
                s += f(x, y).powi(2);
            }
        }
        s * h * h
    }

    #[test]
    fn sobolev_norm_of_cosine() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        let oracle = quadrature_l2_sq(|x, _| x.cos()).sqrt();
        assert!(close(oracle, (2.0 * PI * PI).sqrt(), 1e-12));
        assert!(close(f.sobolev_norm(0.0), oracle, 1e-12));
        assert!(close(f.sobolev_norm(1.0), (2.0f64).sqrt() * oracle, 1e-12));
        assert!(close(f.sobolev_norm(1.0), 2.0 * PI, 1e-12));
        assert_eq!(ScalarField::zeros(&g).sobolev_norm(3.0), 0.0);
    }

    #[test]
    fn aniso_norm_examples() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |x, _| x.cos());
        assert_eq!(f.aniso_norm(1, 2.5), 0.0);
        let f = ScalarField::from_fn(&g, |_, y| y.cos());
        let oracle = quadrature_l2_sq(|_, y| y.sin()).sqrt();
        assert!(close(f.aniso_norm(1, 0.0), oracle, 1e-12));
        let oracle = quadrature_l2_sq(|_, y| y.cos()).sqrt();
        assert!(close(f.aniso_norm(2, 0.0), oracle, 1e-12));
    }

    #[test]
    fn resample_preserves_shared_modes() {
        let g = Grid::square(16).unwrap();
        let big = Grid::square(32).unwrap();
        let f = ScalarField::from_fn(&g, |x, y| (x - y).sin() + (2.0 * y).cos());
        let r = f.resample(&big).resample(&g);
        assert_eq!(r, f);
    }
}
