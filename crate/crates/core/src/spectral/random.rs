use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::ScalarField;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Shape of a random spectrum: `|f̂_k| ≤ amplitude · exp(-decay_rate |k|)`,
/// optionally restricted to `max(|k1|, |k2|) ≤ band_limit`.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumShape {
    pub amplitude: f64,
    pub decay_rate: f64,
    pub zero_mean: bool,
    pub band_limit: Option<i64>,
}

impl SpectrumShape {
    pub fn new(amplitude: f64, decay_rate: f64, zero_mean: bool) -> Self {
        Self {
            amplitude,
            decay_rate,
            zero_mean,
            band_limit: None,
        }
    }

    pub fn band_limited(mut self, kmax: i64) -> Self {
        self.band_limit = Some(kmax);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        if !(self.decay_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay_rate must be positive, got {}",
                self.decay_rate
            )));
        }
        Ok(())
    }
}

/// Draw a real random field from an existing generator.
pub fn random_field_with(grid: &Grid, rng: &mut impl Rng, shape: SpectrumShape) -> Result<ScalarField> {
    shape.validate()?;
    let mut f = ScalarField::zeros(grid);
    let coeffs = f.coeffs_mut();
    for i in 0..grid.len() {
        if !grid.mask(i) {
            continue;
        }
        let j = grid.conj_index(i);
        if j < i {
            continue;
        }
        let (a, b) = grid.k(i);
        // Draws happen for every retained mode so the stream does not depend on the band limit.
        let r: f64 = rng.random();
        let theta: f64 = rng.random::<f64>() * 2.0 * PI;
        if let Some(kmax) = shape.band_limit {
            if a.abs() > kmax || b.abs() > kmax {
                continue;
            }
        }
        let kn = ((a * a + b * b) as f64).sqrt();
        let bound = shape.amplitude * (-shape.decay_rate * kn).exp();
        if i == j {
            if i == 0 && shape.zero_mean {
                continue;
            }
            coeffs[i] = Complex64::new(bound * (2.0 * r - 1.0), 0.0);
        } else {
            let c = Complex64::from_polar(bound * r, theta);
            coeffs[i] = c;
            coeffs[j] = c.conj();
        }
    }
    Ok(f)
}

/// Deterministic random smooth field: same seed, bit-identical coefficients.
pub fn random_smooth_field(
    grid: &Grid,
    seed: u64,
    amplitude: f64,
    decay_rate: f64,
    zero_mean: bool,
) -> Result<ScalarField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_field_with(grid, &mut rng, SpectrumShape::new(amplitude, decay_rate, zero_mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_gives_zero_field() {
        let g = Grid::square(16).unwrap();
        let f = random_smooth_field(&g, 3, 0.0, 0.5, false).unwrap();
        assert_eq!(f.max_abs_coeff(), 0.0);
    }

    #[test]
    fn rejects_negative_amplitude() {
        let g = Grid::square(16).unwrap();
        assert!(random_smooth_field(&g, 3, -1.0, 0.5, false).is_err());
        assert!(random_smooth_field(&g, 3, 1.0, 0.0, false).is_err());
    }

    #[test]
    fn zero_mean_is_exact() {
        let g = Grid::square(32).unwrap();
        let f = random_smooth_field(&g, 11, 2.0, 0.5, true).unwrap();
        assert_eq!(f.mean(), 0.0);
        let quad: f64 = f.to_physical().iter().sum::<f64>() * g.cell_area();
        assert!(quad.abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_bounded() {
        let g = Grid::square(24).unwrap();
        let a = random_smooth_field(&g, 42, 1.5, 0.7, false).unwrap();
        let b = random_smooth_field(&g, 42, 1.5, 0.7, false).unwrap();
        assert_eq!(a.coeffs(), b.coeffs());
        let c = random_smooth_field(&g, 43, 1.5, 0.7, false).unwrap();
        assert_ne!(a.coeffs(), c.coeffs());
        for i in 0..g.len() {
            let kn = g.k_sq(i).sqrt();
            assert!(a.coeffs()[i].norm() <= 1.5 * (-0.7 * kn).exp() + 1e-15);
            if !g.mask(i) {
                assert_eq!(a.coeffs()[i], Complex64::default());
            }
        }
        assert_eq!(a.hermitian_defect(), 0.0);
    }

    #[test]
    fn band_limit_truncates() {
        let g = Grid::square(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_field_with(&g, &mut rng, SpectrumShape::new(1.0, 0.1, false).band_limited(3)).unwrap();
        for i in 0..g.len() {
            let (a, b) = g.k(i);
            if a.abs() > 3 || b.abs() > 3 {
                assert_eq!(f.coeffs()[i], Complex64::default());
            }
        }
    }
}
