//! Per-wavenumber analysis of the linearised system
//!
//! ```text
//! ∂ₜρ = -∇·u,   ∂ₜu = μΔu + λ∇∇·u - ∇ρ + (∇⊥·b, 0),   ∂ₜb = ∇⊥u₁
//! ```
//!
//! with `∂_j ↦ ik_j`. Coordinates are ordered `(ρ̂, û₁, û₂, b̂₁, b̂₂)`.

use nalgebra::{DMatrix, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::PhysParams;

type C = Complex64;
pub type Matrix5 = SMatrix<C, 5, 5>;
pub type Matrix4 = SMatrix<C, 4, 4>;

const ZERO: C = C::new(0.0, 0.0);

fn ci(x: f64) -> C {
    C::new(0.0, x)
}

/// Symbol of the linearised operator at one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    pub k: (i64, i64),
    pub matrix: Matrix5,
    /// Dimension of `{k·b̂ = 0}`: 4 for every `k ≠ 0`.
    pub constraint_dim: usize,
}

/// Eigenvalues of the constraint-reduced matrix, sorted by descending real part.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub k: (i64, i64),
    pub eigenvalues: Vec<C>,
    pub spectral_abscissa: f64,
    /// Numerical null-space dimension of the reduced matrix.
    pub kernel_dim: usize,
}

/// One row of the damping map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingRow {
    pub k: (i64, i64),
    pub abscissa: f64,
    pub kernel_dim: usize,
}

impl DampingRow {
    pub const CSV_HEADER: &'static str = "k1,k2,abscissa,kernel_dim";

    pub fn csv(&self) -> String {
        format!("{},{},{:.17e},{}", self.k.0, self.k.1, self.abscissa, self.kernel_dim)
    }
}

pub fn mode_matrix(k: (i64, i64)) -> Result<ModeMatrix> {
    mode_matrix_with(k, &PhysParams::default())
}

/// Mode matrix for general viscosities. The pressure law enters only
/// through `P'(1) = 1`.
pub fn mode_matrix_with(k: (i64, i64), params: &PhysParams) -> Result<ModeMatrix> {
    if k == (0, 0) {
        return Err(Error::InvalidParameter("mode matrix needs k != (0, 0)".into()));
    }
    let (k1, k2) = (k.0 as f64, k.1 as f64);
    let ksq = k1 * k1 + k2 * k2;
    let (mu, la) = (params.mu, params.lambda);
    #[rustfmt::skip]
    let m = Matrix5::from_row_slice(&[
        ZERO,        ci(-k1),                                     ci(-k2),                                     ZERO,     ZERO,
        ci(-k1),     C::new(-mu * ksq - la * k1 * k1, 0.0),       C::new(-la * k1 * k2, 0.0),                  ci(k2),   ci(-k1),
        ci(-k2),     C::new(-la * k1 * k2, 0.0),                  C::new(-mu * ksq - la * k2 * k2, 0.0),       ZERO,     ZERO,
        ZERO,        ci(k2),                                      ZERO,                                        ZERO,     ZERO,
        ZERO,        ci(-k1),                                     ZERO,                                        ZERO,     ZERO,
    ]);
    Ok(ModeMatrix {
        k,
        matrix: m,
        constraint_dim: 4,
    })
}

impl ModeMatrix {
    /// Lift `(ρ̂, û₁, û₂, β̂)` to the five coordinates, with `b̂ = β̂ (k₂, -k₁)`
    /// spanning `{k·b̂ = 0}`. The lift has integer entries, so the reduced
    /// matrix is exact.
    pub fn lift(&self) -> SMatrix<C, 5, 4> {
        let (k1, k2) = (self.k.0 as f64, self.k.1 as f64);
        let mut l = SMatrix::<C, 5, 4>::zeros();
        for i in 0..3 {
            l[(i, i)] = C::new(1.0, 0.0);
        }
        l[(3, 3)] = C::new(k2, 0.0);
        l[(4, 3)] = C::new(-k1, 0.0);
        l
    }

    /// Matrix on `{k·b̂ = 0}` in the coordinates `(ρ̂, û₁, û₂, β̂)`. The `β̂` row
    /// is read off whichever `b̂` row has the larger `|k_i|` factor.
    pub fn reduced(&self) -> Matrix4 {
        let full = self.matrix * self.lift();
        let (row, factor) = if self.k.1.abs() >= self.k.0.abs() {
            (3, self.k.1 as f64)
        } else {
            (4, -self.k.0 as f64)
        };
        Matrix4::from_fn(|i, j| if i < 3 { full[(i, j)] } else { full[(row, j)] / factor })
    }

    /// Component of `A v` leaving `{k·b̂ = 0}`, maximised over a basis of the subspace.
    pub fn invariance_residual(&self) -> f64 {
        let (k1, k2) = (self.k.0 as f64, self.k.1 as f64);
        let image = self.matrix * self.lift();
        (0..4)
            .map(|j| (image[(3, j)] * k1 + image[(4, j)] * k2).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace_reduced(&self) -> C {
        self.reduced().trace()
    }

    /// `exp(tA)` on the full five-dimensional space.
    pub fn propagator(&self, t: f64) -> Matrix5 {
        let a = DMatrix::from_fn(5, 5, |i, j| self.matrix[(i, j)] * t);
        let e = a.exp();
        Matrix5::from_fn(|i, j| e[(i, j)])
    }
}

/// `(λ² + |k|²λ + |k|²)² - k₁²|k|²`, the symbol of the fourth-order wave operator.
pub fn wave_symbol(k: (i64, i64), lambda: C) -> C {
    let (k1, k2) = (k.0 as f64, k.1 as f64);
    let ksq = k1 * k1 + k2 * k2;
    let q = lambda * lambda + lambda * ksq + ksq;
    q * q - k1 * k1 * ksq
}

/// Same polynomial in double-double arithmetic; `|k|⁴`-sized cancellation
/// would otherwise swamp a residual of order 1e-10.
pub fn wave_symbol_compensated(k: (i64, i64), lambda: C) -> f64 {
    let ksq = (k.0 * k.0 + k.1 * k.1) as f64;
    let c = DdC::from(lambda);
    let q = c.mul(&c).add(&c.scale(ksq)).add_real(ksq);
    let p = q.mul(&q).add_real(-((k.0 * k.0) as f64) * ksq);
    p.abs()
}

pub fn mode_spectrum(k: (i64, i64)) -> Result<ModeSpectrum> {
    mode_spectrum_with(k, &PhysParams::default())
}

/// Tolerance, relative to the largest singular value, for counting kernel directions.
const KERNEL_RTOL: f64 = 1e-12;

pub fn mode_spectrum_with(k: (i64, i64), params: &PhysParams) -> Result<ModeSpectrum> {
    let mm = mode_matrix_with(k, params)?;
    let a = mm.reduced();
    let mut eig = eigenvalues(&a).ok_or(Error::Eigensolver(k.0, k.1))?;
    for l in eig.iter_mut() {
        *l = newton_polish(&a, *l);
    }

    let sv = a.singular_values();
    let smax = sv.max();
    let kernel_dim = sv.iter().filter(|&&s| s <= KERNEL_RTOL * smax).count();
    // The eigenvalues nearest the origin belong to the kernel; make them exact.
    if kernel_dim > 0 {
        let mut idx: Vec<usize> = (0..eig.len()).collect();
        idx.sort_by(|&i, &j| eig[i].norm().total_cmp(&eig[j].norm()));
        for &i in idx.iter().take(kernel_dim) {
            eig[i] = ZERO;
        }
    }
    eig.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let spectral_abscissa = eig.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(ModeSpectrum {
        k,
        eigenvalues: eig,
        spectral_abscissa,
        kernel_dim,
    })
}

/// Complex Schur eigenvalues. If the QR iteration stalls, the transpose and
/// then shifted copies are tried; Newton polishing recovers any lost digits.
fn eigenvalues(a: &Matrix4) -> Option<Vec<C>> {
    let scale = a.norm().max(1.0);
    let attempts = [(false, 0.0), (true, 0.0), (false, 0.1), (true, 0.1), (false, -0.37)];
    attempts.into_iter().find_map(|(transpose, shift)| {
        let s = C::new(shift * scale, 0.0);
        let m = if transpose { a.transpose() } else { *a } - Matrix4::identity() * s;
        let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?;
        let ev = schur.eigenvalues()?;
        Some(ev.iter().map(|&l| l + s).collect())
    })
}

/// Newton's method on `det(A - λI)` with the determinant in double-double
/// arithmetic and its derivative `-Σᵢ det(minorᵢᵢ)` in plain floats. Only
/// small corrections are accepted; near a repeated eigenvalue the step is
/// dominated by round-off.
fn newton_polish(a: &Matrix4, mut l: C) -> C {
    let mut last = 1e-8 * a.norm().max(1.0);
    for _ in 0..4 {
        let shifted = a - Matrix4::identity() * l;
        let d = det4_dd(&shifted);
        let dd: C = -(0..4).map(|i| shifted.remove_row(i).remove_column(i).determinant()).sum::<C>();
        let step = -d / dd;
        if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > last {
            break;
        }
        last = step.norm();
        l += step;
        if step.norm() == 0.0 {
            break;
        }
    }
    l
}

/// Leibniz expansion of a 4×4 determinant, accumulated in double-double.
fn det4_dd(m: &Matrix4) -> C {
    let mut acc = DdC::from(ZERO);
    let mut perm = [0usize, 1, 2, 3];
    permute(&mut perm, 0, &mut |p, sign| {
        let mut t = DdC::from(C::new(sign, 0.0));
        for (r, &c) in p.iter().enumerate() {
            t = t.mul(&DdC::from(m[(r, c)]));
        }
        acc = acc.add(&t);
    });
    acc.value()
}

fn permute(p: &mut [usize; 4], start: usize, f: &mut impl FnMut(&[usize; 4], f64)) {
    if start == p.len() {
        let mut inv = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        f(p, if inv % 2 == 0 { 1.0 } else { -1.0 });
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, f);
        p.swap(start, i);
    }
}

/// Right null vector of `A - λI` lifted to five coordinates.
fn eigenvector(mm: &ModeMatrix, a: &Matrix4, l: C) -> SVector<C, 5> {
    let svd = (a - Matrix4::identity() * l).svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty");
    let v = v_t.row(imin).adjoint();
    mm.lift() * v
}

/// Fraction of `|v|²` carried by `ρ̂` and `b̂`.
fn density_field_content(v: &SVector<C, 5>) -> f64 {
    let tot: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    (v[0].norm_sqr() + v[3].norm_sqr() + v[4].norm_sqr()) / tot
}

/// Eigenvalue with its branch data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEntry {
    pub lambda: C,
    /// Share of the eigenvector in `(ρ̂, b̂)`.
    pub content: f64,
    pub residual: f64,
}

/// Every eigenvalue with its `(ρ̂, b̂)` content and compensated `|p(λ)|`.
pub fn branch_table(k: (i64, i64)) -> Result<Vec<BranchEntry>> {
    let mm = mode_matrix(k)?;
    let a = mm.reduced();
    let spec = mode_spectrum(k)?;
    Ok(spec
        .eigenvalues
        .iter()
        .map(|&l| BranchEntry {
            lambda: l,
            content: density_field_content(&eigenvector(&mm, &a, l)),
            residual: wave_symbol_compensated(k, l),
        })
        .collect())
}

/// Eigenvalues on the `ρ`/`b` wave branch: dominant `(ρ̂, b̂)` eigenvector
/// content (at least one half), ties broken by the smaller `|p(λ)|`.
pub fn wave_branch(k: (i64, i64)) -> Result<Vec<BranchEntry>> {
    let mut t = branch_table(k)?;
    t.sort_by(|x, y| {
        y.content
            .total_cmp(&x.content)
            .then(x.residual.total_cmp(&y.residual))
    });
    let mut branch: Vec<BranchEntry> = t.iter().copied().filter(|e| e.content >= 0.5).collect();
    if branch.is_empty() {
        branch.push(t[0]);
    }
    Ok(branch)
}

/// Max `|p(λ)|` over the wave branch.
pub fn fourth_order_symbol_check(k: (i64, i64)) -> Result<f64> {
    Ok(wave_branch(k)?
        .iter()
        .map(|e| e.residual)
        .fold(0.0, f64::max))
}

/// Abscissa and kernel dimension for every `k ≠ 0` with `|k_i| ≤ kmax`.
pub fn damping_map(kmax: i64) -> Result<Vec<DampingRow>> {
    if kmax < 1 {
        return Err(Error::InvalidParameter(format!("kmax must be >= 1, got {kmax}")));
    }
    let mut rows = Vec::new();
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            if (k1, k2) == (0, 0) {
                continue;
            }
            let s = mode_spectrum((k1, k2))?;
            rows.push(DampingRow {
                k: (k1, k2),
                abscissa: s.spectral_abscissa,
                kernel_dim: s.kernel_dim,
            });
        }
    }
    Ok(rows)
}

/// Deviation of the `(ρ̂, û₂)` block at `k = (0, k₂)` from
/// `[[0, -ik₂], [-ik₂, -k₂²]]`.
pub fn wave_pair_check(k2: i64) -> Result<f64> {
    if k2 == 0 {
        return Err(Error::InvalidParameter("wave pair needs k2 != 0".into()));
    }
    let m = mode_matrix((0, k2))?.matrix;
    let kk = k2 as f64;
    let expect = [[ZERO, ci(-kk)], [ci(-kk), C::new(-kk * kk, 0.0)]];
    let idx = [0, 2];
    let mut dev: f64 = 0.0;
    for (i, &r) in idx.iter().enumerate() {
        for (j, &c) in idx.iter().enumerate() {
            dev = dev.max((m[(r, c)] - expect[i][j]).norm());
        }
    }
    // The pair must also be decoupled from the other coordinates.
    for &r in &idx {
        for c in [1, 3, 4] {
            dev = dev.max(m[(r, c)].norm());
        }
    }
    Ok(dev)
}

/// Evolve a five-vector of mode amplitudes by `exp(tA)`.
pub fn propagate(k: (i64, i64), v0: &[C; 5], t: f64) -> Result<[C; 5]> {
    let e = mode_matrix(k)?.propagator(t);
    let v = e * SVector::<C, 5>::from_column_slice(v0);
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

// Double-double arithmetic, just enough for evaluating one polynomial.

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: e }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = s.lo + self.lo + o.lo;
        two_sum(s.hi, t)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        let t = p.lo + self.hi * o.lo + self.lo * o.hi;
        two_sum(p.hi, t)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct DdC {
    re: Dd,
    im: Dd,
}

impl From<C> for DdC {
    fn from(c: C) -> Self {
        DdC {
            re: Dd::new(c.re),
            im: Dd::new(c.im),
        }
    }
}

impl DdC {
    fn add(&self, o: &DdC) -> DdC {
        DdC {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn add_real(&self, x: f64) -> DdC {
        DdC {
            re: self.re.add(Dd::new(x)),
            im: self.im,
        }
    }

    fn scale(&self, x: f64) -> DdC {
        DdC {
            re: self.re.mul(Dd::new(x)),
            im: self.im.mul(Dd::new(x)),
        }
    }

    fn mul(&self, o: &DdC) -> DdC {
        DdC {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn abs(&self) -> f64 {
        self.re.value().hypot(self.im.value())
    }

    fn value(&self) -> C {
        C::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn symbol_substitution_at_k10() {
        let m = mode_matrix((1, 0)).unwrap().matrix;
        let i = C::new(0.0, 1.0);
        // (ρ̂, û₁, b̂₂) block
        let block = [[ZERO, -i, ZERO], [-i, C::new(-1.0, 0.0), -i], [ZERO, -i, ZERO]];
        let idx = [0, 1, 4];
        for (r, &ri) in idx.iter().enumerate() {
            for (c, &cj) in idx.iter().enumerate() {
                assert_eq!(m[(ri, cj)], block[r][c]);
            }
        }
        assert_eq!(m[(2, 2)], C::new(-1.0, 0.0));
    }

    #[test]
    fn u1_row_matches_symbol() {
        let (k1, k2) = (3i64, -2i64);
        let m = mode_matrix((k1, k2)).unwrap().matrix;
        let ksq = (k1 * k1 + k2 * k2) as f64;
        assert_eq!(m[(1, 0)], ci(-(k1 as f64)));
        assert_eq!(m[(1, 1)], C::new(-ksq, 0.0));
        assert_eq!(m[(1, 3)], ci(k2 as f64));
        assert_eq!(m[(1, 4)], ci(-(k1 as f64)));
    }

    #[test]
    fn rejects_zero_wavenumber() {
        assert!(mode_matrix((0, 0)).is_err());
        assert!(mode_spectrum((0, 0)).is_err());
    }

    #[test]
    fn constraint_subspace_is_invariant() {
        for k1 in -5..=5 {
            for k2 in -5..=5 {
                if (k1, k2) == (0, 0) {
                    continue;
                }
                assert!(mode_matrix((k1, k2)).unwrap().invariance_residual() < 1e-14);
            }
        }
    }

    #[test]
    fn spectrum_at_01() {
        let s = mode_spectrum((0, 1)).unwrap();
        let r3 = 3f64.sqrt() / 2.0;
        let plus = C::new(-0.5, r3);
        let minus = C::new(-0.5, -r3);
        assert_eq!(s.eigenvalues.len(), 4);
        assert_eq!(s.eigenvalues.iter().filter(|&&l| close(l, plus, 1e-10)).count(), 2);
        assert_eq!(s.eigenvalues.iter().filter(|&&l| close(l, minus, 1e-10)).count(), 2);
        assert_abs_diff_eq!(s.spectral_abscissa, -0.5, epsilon = 1e-12);
        assert_eq!(s.kernel_dim, 0);
    }

    #[test]
    fn spectrum_at_10() {
        let s = mode_spectrum((1, 0)).unwrap();
        let r7 = 7f64.sqrt() / 2.0;
        let expect = [ZERO, C::new(-0.5, r7), C::new(-0.5, -r7), C::new(-1.0, 0.0)];
        for e in expect {
            assert!(s.eigenvalues.iter().any(|&l| close(l, e, 1e-10)), "{e} missing");
        }
        assert_eq!(s.spectral_abscissa, 0.0);
        assert_eq!(s.kernel_dim, 1);
    }

    #[test]
    fn strictly_damped_at_02() {
        let s = mode_spectrum((0, 2)).unwrap();
        assert!(s.spectral_abscissa < 0.0);
    }

    #[test]
    fn trace_matches_eigenvalue_sum() {
        for k in [(1, 1), (3, -2), (0, 5), (7, 0), (16, 16)] {
            let mm = mode_matrix(k).unwrap();
            let ksq = (k.0 * k.0 + k.1 * k.1) as f64;
            assert_eq!(mm.trace_reduced(), C::new(-2.0 * ksq, 0.0));
            let s: C = mode_spectrum(k).unwrap().eigenvalues.iter().sum();
            assert!((s.re + 2.0 * ksq).abs() < 1e-12 * ksq.max(1.0), "{k:?} {s}");
            assert!(s.im.abs() < 1e-10 * ksq);
        }
    }

    #[test]
    fn symbol_examples() {
        let r3 = 3f64.sqrt() / 2.0;
        assert!(wave_symbol_compensated((0, 1), C::new(-0.5, r3)) < 1e-15);
        assert_eq!(wave_symbol((1, 0), ZERO), ZERO);
        assert!(fourth_order_symbol_check((1, 1)).unwrap() < 1e-10);
        assert!(fourth_order_symbol_check((0, 1)).unwrap() < 1e-10);
        assert!(fourth_order_symbol_check((1, 0)).unwrap() < 1e-10);
    }

    #[test]
    fn compensated_symbol_agrees_with_plain() {
        for k in [(1, 2), (5, -3), (12, 7)] {
            let l = C::new(-0.37, 1.9);
            let plain = wave_symbol(k, l).norm();
            assert!((plain - wave_symbol_compensated(k, l)).abs() < 1e-12 * plain);
        }
    }

    #[test]
    fn damping_map_small() {
        let rows = damping_map(1).unwrap();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            if r.k.1 == 0 {
                assert_eq!(r.abscissa, 0.0);
                assert_eq!(r.kernel_dim, 1);
            } else {
                assert!(r.abscissa < 0.0);
            }
        }
        let r = rows.iter().find(|r| r.k == (0, 1)).unwrap();
        assert_abs_diff_eq!(r.abscissa, -0.5, epsilon = 1e-12);
        assert_eq!(r.csv().split(',').count(), 4);
        assert!(damping_map(0).is_err());
    }

    #[test]
    fn wave_pair_examples() {
        assert_eq!(wave_pair_check(1).unwrap(), 0.0);
        assert_eq!(wave_pair_check(3).unwrap(), 0.0);
        let m = mode_matrix((0, 2)).unwrap().matrix;
        let tr = m[(0, 0)] + m[(2, 2)];
        let det = m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)];
        assert_eq!(tr, C::new(-4.0, 0.0));
        assert_eq!(det, C::new(4.0, 0.0));
        // λ² + 9λ + 9 at k = (0, 3)
        let s = mode_spectrum((0, 3)).unwrap();
        let d = (81.0f64 - 36.0).sqrt();
        for root in [(-9.0 + d) / 2.0, (-9.0 - d) / 2.0] {
            assert!(s.eigenvalues.iter().any(|&l| close(l, C::new(root, 0.0), 1e-10)));
        }
    }

    #[test]
    fn propagator_preserves_kernel_vector() {
        // ρ̂ = -b̂₂ at k = (1, 0) is stationary.
        let one = C::new(1.0, 0.0);
        let v0 = [one, ZERO, ZERO, ZERO, -one];
        let v = propagate((1, 0), &v0, 3.0).unwrap();
        for (a, b) in v.iter().zip(v0.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn propagator_decays_u2_at_rate_one() {
        let v0 = [ZERO, ZERO, C::new(1.0, 0.0), ZERO, ZERO];
        let v = propagate((1, 0), &v0, 2.0).unwrap();
        assert!((v[2].re - (-2.0f64).exp()).abs() < 1e-13);
    }
}
