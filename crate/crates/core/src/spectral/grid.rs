use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Collocation grid on the periodic box `[-π, π]²` together with its
/// wavenumber lattice and two-thirds dealiasing mask.
///
/// Spectral arrays are stored row-major in FFT order: index `i1 * n2 + i2`
/// holds the mode `(k1(i1), k2(i2))` with `k(i) = i` for `i < n/2` and
/// `i - n` otherwise. Collocation points are `x_j = -π + 2πj/n`.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n1: usize,
    n2: usize,
    k1: Vec<i64>,
    k2: Vec<i64>,
    mask: Vec<bool>,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

fn wavenumbers(n: usize) -> Vec<i64> {
    (0..n)
        .map(|i| if i < n / 2 { i as i64 } else { i as i64 - n as i64 })
        .collect()
}

impl Grid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        for n in [n1, n2] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "resolution {n} must be even and at least 8"
                )));
            }
        }
        let k1 = wavenumbers(n1);
        let k2 = wavenumbers(n2);
        let c1 = (n1 / 3) as i64;
        let c2 = (n2 / 3) as i64;
        let mut mask = Vec::with_capacity(n1 * n2);
        for &a in &k1 {
            for &b in &k2 {
                mask.push(a.abs() <= c1 && b.abs() <= c2);
            }
        }
        let mut planner = FftPlanner::new();
        let inner = GridInner {
            n1,
            n2,
            fwd1: planner.plan_fft_forward(n1),
            inv1: planner.plan_fft_inverse(n1),
            fwd2: planner.plan_fft_forward(n2),
            inv2: planner.plan_fft_inverse(n2),
            k1,
            k2,
            mask,
        };
        Ok(Self { inner: Arc::new(inner) })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n1(&self) -> usize {
        self.inner.n1
    }

    pub fn n2(&self) -> usize {
        self.inner.n2
    }

    pub fn len(&self) -> usize {
        self.inner.n1 * self.inner.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n1() == other.n1() && self.n2() == other.n2()
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.n1(), self.n2(), other.n1(), other.n2()))
        }
    }

    /// Wavenumber pair of flat index `idx`.
    #[inline]
    pub fn k(&self, idx: usize) -> (i64, i64) {
        let n2 = self.inner.n2;
        (self.inner.k1[idx / n2], self.inner.k2[idx % n2])
    }

    #[inline]
    pub fn k_sq(&self, idx: usize) -> f64 {
        let (a, b) = self.k(idx);
        (a * a + b * b) as f64
    }

    /// Flat index of mode `(k1, k2)`; wavenumbers are taken modulo the grid.
    pub fn index(&self, k1: i64, k2: i64) -> usize {
        let n1 = self.inner.n1 as i64;
        let n2 = self.inner.n2 as i64;
        let i1 = k1.rem_euclid(n1) as usize;
        let i2 = k2.rem_euclid(n2) as usize;
        i1 * self.inner.n2 + i2
    }

    /// Whether `(k1, k2)` is representable (inside the Nyquist box).
    pub fn contains(&self, k1: i64, k2: i64) -> bool {
        let h1 = (self.inner.n1 / 2) as i64;
        let h2 = (self.inner.n2 / 2) as i64;
        (-h1..h1).contains(&k1) && (-h2..h2).contains(&k2)
    }

    /// Flat index of `-k`.
    #[inline]
    pub fn conj_index(&self, idx: usize) -> usize {
        let (a, b) = self.k(idx);
        self.index(-a, -b)
    }

    #[inline]
    pub fn mask(&self, idx: usize) -> bool {
        self.inner.mask[idx]
    }

    pub fn mask_slice(&self) -> &[bool] {
        &self.inner.mask
    }

    /// Largest retained wavenumber per axis.
    pub fn cutoff(&self) -> (i64, i64) {
        ((self.inner.n1 / 3) as i64, (self.inner.n2 / 3) as i64)
    }

    /// Smallest grid spacing, `2π / max(n1, n2)`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.inner.n1.max(self.inner.n2) as f64
    }

    /// Collocation coordinates of flat physical index `idx`.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let n2 = self.inner.n2;
        let (j1, j2) = (idx / n2, idx % n2);
        (
            -PI + 2.0 * PI * j1 as f64 / self.inner.n1 as f64,
            -PI + 2.0 * PI * j2 as f64 / n2 as f64,
        )
    }

    /// Area element of the collocation quadrature, `(2π)² / (n1 n2)`.
    pub fn cell_area(&self) -> f64 {
        4.0 * PI * PI / self.len() as f64
    }

    #[inline]
    fn phase(&self, idx: usize) -> f64 {
        let (a, b) = self.k(idx);
        if (a + b).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn fft2(&self, buf: &mut [Complex64], forward: bool) {
        let (n1, n2) = (self.inner.n1, self.inner.n2);
        let (row, col) = if forward {
            (&self.inner.fwd2, &self.inner.fwd1)
        } else {
            (&self.inner.inv2, &self.inner.inv1)
        };
        row.process(buf);
        let mut t = vec![Complex64::default(); n1 * n2];
        transpose(buf, &mut t, n1, n2);
        col.process(&mut t);
        transpose(&t, buf, n2, n1);
    }

    /// Evaluate `Σ_k c_k e^{ik·x}` on the collocation points (real part).
    pub fn to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.phase(i))
            .collect();
        self.fft2(&mut buf, false);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Evaluate `Σ_k c_k e^{ik·x}` as a complex function.
    pub fn to_physical_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.phase(i))
            .collect();
        self.fft2(&mut buf, false);
        buf
    }

    /// Two Hermitian coefficient sets evaluated with one complex transform.
    pub fn to_physical_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::i();
        let mut buf: Vec<Complex64> = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(idx, (x, y))| (x + i * y) * self.phase(idx))
            .collect();
        self.fft2(&mut buf, false);
        buf.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// [`Grid::to_spectral`] of two real arrays with one complex transform.
    pub fn to_spectral_pair(&self, x: &[f64], y: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut buf: Vec<Complex64> = x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect();
        self.fft2(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        let mut fa = vec![Complex64::default(); buf.len()];
        let mut fb = vec![Complex64::default(); buf.len()];
        for idx in 0..buf.len() {
            if !self.mask(idx) {
                continue;
            }
            let z = buf[idx];
            let zc = buf[self.conj_index(idx)].conj();
            let s = scale * self.phase(idx);
            fa[idx] = 0.5 * (z + zc) * s;
            fb[idx] = Complex64::new(0.0, -0.5) * (z - zc) * s;
        }
        self.dealias_hermitian(&mut fa);
        self.dealias_hermitian(&mut fb);
        (fa, fb)
    }

    /// Masked coefficients of complex collocation values (no symmetrisation).
    pub fn to_spectral_complex(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.fft2(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c = if self.mask(i) { *c * scale * self.phase(i) } else { Complex64::default() };
        }
        buf
    }

    /// Fourier coefficients of real collocation values. Hermitian symmetry
    /// is enforced exactly and the dealiasing mask is applied.
    pub fn to_spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf = self.to_spectral_unmasked(values);
        self.dealias_hermitian(&mut buf);
        buf
    }

    /// Fourier coefficients without masking or symmetrisation.
    pub fn to_spectral_unmasked(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, true);
        let scale = 1.0 / self.len() as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= scale * self.phase(i);
        }
        buf
    }

    /// Zero every mode outside the mask and symmetrise the retained ones.
    pub fn dealias_hermitian(&self, buf: &mut [Complex64]) {
        for i in 0..buf.len() {
            if !self.mask(i) {
                buf[i] = Complex64::default();
                continue;
            }
            let j = self.conj_index(i);
            if j > i {
                let avg = 0.5 * (buf[i] + buf[j].conj());
                buf[i] = avg;
                buf[j] = avg.conj();
            } else if j == i {
                buf[i] = Complex64::new(buf[i].re, 0.0);
            }
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n1", &self.inner.n1)
            .field("n2", &self.inner.n2)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
