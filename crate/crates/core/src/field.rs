//! Vector fields in physical (lattice) and mode representation, and the
//! transforms between them.
//!
//! Coefficients are normalized so that Parseval holds with unit constant:
//!
//! ```text
//! c(ξ) = sqrt(V) / N * Σ_x f(x) exp(-i ξ·x)
//! f(x) = 1 / sqrt(V) * Σ_ξ c(ξ) exp(i ξ·x)
//! Σ_ξ |c(ξ)|² = ∫_box |f|² dx
//! ```
//!
//! With this choice a constant field `c` has DC coefficient `c * sqrt(V)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalVectorField {
    grid: Grid,
    samples: [Vec<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVectorField {
    grid: Grid,
    coeffs: [Vec<Complex64>; 3],
}

impl PhysicalVectorField {
    pub fn new(grid: Grid, samples: [Vec<f64>; 3]) -> Result<Self> {
        for (c, s) in samples.iter().enumerate() {
            if s.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "component {c} has {} samples, grid has {}",
                    s.len(),
                    grid.len()
                )));
            }
            if let Some(index) = s.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    component: c,
                    index,
                });
            }
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            grid: grid.clone(),
            samples: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    /// Samples `f` at every lattice point `x = (j1 L1/N1, j2 L2/N2, j3 L3/N3)`.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self> {
        let n = grid.len();
        let mut samples = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for idx in 0..n {
            let pos = grid.position(idx);
            let x = std::array::from_fn(|a| grid.coordinate(a, pos[a]));
            let v = f(x);
            for c in 0..3 {
                samples[c][idx] = v[c];
            }
        }
        Self::new(grid.clone(), samples)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.samples[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.samples
    }

    pub fn into_components(self) -> [Vec<f64>; 3] {
        self.samples
    }

    /// Euclidean magnitude `|u(x)|` at lattice index `idx`.
    #[inline]
    pub fn magnitude(&self, idx: usize) -> f64 {
        self.squared_magnitude(idx).sqrt()
    }

    #[inline]
    pub fn squared_magnitude(&self, idx: usize) -> f64 {
        let [a, b, c] = self.at(idx);
        a * a + b * b + c * c
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.samples[0][idx],
            self.samples[1][idx],
            self.samples[2][idx],
        ]
    }

    pub fn max_speed(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.magnitude(i))
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .clone()
                .map(|s| s.into_iter().map(|v| v * lambda).collect()),
        }
    }
}

impl SpectralVectorField {
    pub fn new(grid: Grid, coeffs: [Vec<Complex64>; 3]) -> Result<Self> {
        for (c, s) in coeffs.iter().enumerate() {
            if s.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "component {c} has {} coefficients, grid has {}",
                    s.len(),
                    grid.len()
                )));
            }
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        let z = Complex64::new(0.0, 0.0);
        Self {
            grid: grid.clone(),
            coeffs: [vec![z; n], vec![z; n], vec![z; n]],
        }
    }

    /// Real field `amplitude * cos(ξ·x)` (unit-free amplitude vector), i.e.
    /// the conjugate pair `±k` with coefficient `amplitude * sqrt(V) / 2`.
    pub fn cosine_mode(grid: &Grid, k: [i64; 3], amplitude: [f64; 3]) -> Result<Self> {
        let mut out = Self::zeros(grid);
        let idx = mode_index(grid, k)?;
        let conj = grid.conjugate_index(idx);
        let scale = grid.volume().sqrt();
        for c in 0..3 {
            if idx == conj {
                out.coeffs[c][idx] = Complex64::new(amplitude[c] * scale, 0.0);
            } else {
                out.coeffs[c][idx] += Complex64::new(amplitude[c] * scale / 2.0, 0.0);
                out.coeffs[c][conj] += Complex64::new(amplitude[c] * scale / 2.0, 0.0);
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.coeffs[c]
    }

    pub fn components_mut(&mut self) -> [&mut [Complex64]; 3] {
        let [a, b, c] = &mut self.coeffs;
        [a, b, c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.coeffs
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.coeffs
    }

    /// Applies a per-mode 3x3 action `f(idx, [û1, û2, û3]) -> [v̂1, v̂2, v̂3]`.
    pub fn map_modes(&self, f: impl Fn(usize, [Complex64; 3]) -> [Complex64; 3]) -> Self {
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let v = f(
                idx,
                [
                    self.coeffs[0][idx],
                    self.coeffs[1][idx],
                    self.coeffs[2][idx],
                ],
            );
            for c in 0..3 {
                out.coeffs[c][idx] = v[c];
            }
        }
        out
    }

    /// Multiplies every component by the scalar multiplier `m(idx)`.
    pub fn multiply(&self, m: impl Fn(usize) -> Complex64) -> Self {
        let mut out = self.clone();
        for c in 0..3 {
            for (idx, v) in out.coeffs[c].iter_mut().enumerate() {
                *v *= m(idx);
            }
        }
        out
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        self.multiply(|_| Complex64::new(lambda, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let mut out = self.clone();
        for c in 0..3 {
            for (v, w) in out.coeffs[c].iter_mut().zip(&other.coeffs[c]) {
                *v += w * a;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// Coefficient ℓ² norm, equal to the physical L² norm.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().sqrt()
    }

    pub fn l2_norm_squared(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum()
    }

    /// Real part of the L² inner product `Σ conj(û)·v̂`.
    pub fn inner(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for c in 0..3 {
            for (u, v) in self.coeffs[c].iter().zip(&other.coeffs[c]) {
                acc += (u.conj() * v).re;
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// `max_ξ |û(ξ) - conj(û(-ξ))|`, absolute.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..3 {
            let data = &self.coeffs[c];
            for idx in 0..data.len() {
                let j = self.grid.conjugate_index(idx);
                worst = worst.max((data[idx] - data[j].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_asymmetry() <= rel_tol * self.max_abs()
    }

    /// Replaces each pair by its Hermitian part `(û(ξ) + conj(û(-ξ))) / 2`.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for c in 0..3 {
            let src = &self.coeffs[c];
            let [n1, n2, n3] = self.grid.modes();
            for (idx, [p1, p2, p3]) in self.grid.positions().enumerate() {
                let j = (((n1 - p1) % n1) * n2 + (n2 - p2) % n2) * n3 + (n3 - p3) % n3;
                out.coeffs[c][idx] = (src[idx] + src[j].conj()) * 0.5;
            }
        }
        out
    }

    /// `max_ξ |ξ·û(ξ)|` using the odd-order wavenumbers.
    pub fn divergence_residual(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for idx in 0..g.len() {
            let pos = g.position(idx);
            let mut d = Complex64::new(0.0, 0.0);
            for a in 0..3 {
                d += self.coeffs[a][idx] * g.odd_wavenumber(a, pos[a]);
            }
            worst = worst.max(d.norm());
        }
        worst
    }

    pub fn is_divergence_free(&self, rel_tol: f64) -> bool {
        self.divergence_residual() <= rel_tol * self.max_abs()
    }

    /// First non-finite coefficient as `(component, signed mode)`.
    pub fn first_non_finite(&self) -> Option<(usize, [i64; 3])> {
        for c in 0..3 {
            if let Some(idx) = self.coeffs[c]
                .iter()
                .position(|v| !(v.re.is_finite() && v.im.is_finite()))
            {
                return Some((c, self.grid.signed_mode(idx)));
            }
        }
        None
    }
}

/// Flat index of the signed integer wavenumber `k`.
pub fn mode_index(grid: &Grid, k: [i64; 3]) -> Result<usize> {
    let mut pos = [0usize; 3];
    for a in 0..3 {
        let n = grid.modes()[a] as i64;
        if k[a] <= -n / 2 || k[a] > n / 2 {
            return Err(Error::InvalidParameter(format!(
                "wavenumber {} out of range on axis {} ({} modes)",
                k[a],
                a + 1,
                n
            )));
        }
        pos[a] = k[a].rem_euclid(n) as usize;
    }
    Ok(grid.index(pos[0], pos[1], pos[2]))
}

pub(crate) fn forward_scalar(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(grid, &mut data);
    let scale = grid.volume().sqrt() / grid.len() as f64;
    for v in &mut data {
        *v *= scale;
    }
    data
}

/// Inverse transform of one component, discarding the imaginary part.
pub(crate) fn inverse_scalar(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    fft::inverse(grid, &mut data);
    let scale = 1.0 / grid.volume().sqrt();
    data.into_iter().map(|v| v.re * scale).collect()
}

/// Forward transforms of two real sample sets through one complex FFT,
/// split by conjugate symmetry. Both outputs are exactly Hermitian.
pub(crate) fn forward_pair(grid: &Grid, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    fft::forward(grid, &mut z);
    let scale = 0.5 * grid.volume().sqrt() / grid.len() as f64;
    let [n1, n2, n3] = grid.modes();
    let mut fa = Vec::with_capacity(z.len());
    let mut fb = Vec::with_capacity(z.len());
    for p1 in 0..n1 {
        let q1 = (n1 - p1) % n1;
        for p2 in 0..n2 {
            let q2 = (n2 - p2) % n2;
            for p3 in 0..n3 {
                let q3 = (n3 - p3) % n3;
                let zk = z[(p1 * n2 + p2) * n3 + p3];
                let zm = z[(q1 * n2 + q2) * n3 + q3].conj();
                fa.push((zk + zm) * scale);
                let d = (zk - zm) * scale;
                fb.push(Complex64::new(d.im, -d.re));
            }
        }
    }
    (fa, fb)
}

/// Inverse transforms of two Hermitian coefficient sets through one complex
/// FFT. Any anti-Hermitian residue in one input leaks into the other.
pub(crate) fn inverse_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x + Complex64::new(-y.im, y.re))
        .collect();
    fft::inverse(grid, &mut z);
    let scale = 1.0 / grid.volume().sqrt();
    z.iter().map(|v| (v.re * scale, v.im * scale)).unzip()
}

/// Inverse transforms of several Hermitian coefficient sets, two per FFT.
pub(crate) fn inverse_many(grid: &Grid, coeffs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(coeffs.len());
    for chunk in coeffs.chunks(2) {
        match chunk {
            [a, b] => {
                let (x, y) = inverse_pair(grid, a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(inverse_scalar(grid, a)),
            _ => unreachable!(),
        }
    }
    out
}

/// Forward transforms of several real sample sets, two per FFT.
pub(crate) fn forward_many(grid: &Grid, samples: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(samples.len());
    for chunk in samples.chunks(2) {
        match chunk {
            [a, b] => {
                let (x, y) = forward_pair(grid, a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(forward_scalar(grid, a)),
            _ => unreachable!(),
        }
    }
    out
}

pub fn forward_transform(f: &PhysicalVectorField) -> SpectralVectorField {
    let grid = f.grid.clone();
    let coeffs = std::array::from_fn(|c| forward_scalar(&grid, &f.samples[c]));
    SpectralVectorField { grid, coeffs }
}

/// Inverse transform; rejects coefficient sets whose Hermitian asymmetry
/// exceeds the default relative tolerance.
pub fn inverse_transform(f: &SpectralVectorField) -> Result<PhysicalVectorField> {
    inverse_transform_with_tolerance(f, tolerance::HERMITIAN)
}

pub fn inverse_transform_with_tolerance(
    f: &SpectralVectorField,
    rel_tol: f64,
) -> Result<PhysicalVectorField> {
    let asymmetry = f.hermitian_asymmetry();
    let tolerance = rel_tol * f.max_abs();
    if asymmetry > tolerance {
        return Err(Error::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    let grid = f.grid.clone();
    let samples = std::array::from_fn(|c| inverse_scalar(&grid, &f.coeffs[c]));
    Ok(PhysicalVectorField { grid, samples })
}

/// Inverse transform without the Hermitian check; used on the hot path where
/// inputs are symmetric by construction.
pub(crate) fn inverse_unchecked(f: &SpectralVectorField) -> PhysicalVectorField {
    let grid = f.grid.clone();
    let [a, b, c] = f.coeffs.each_ref().map(|v| v.as_slice());
    let mut it = inverse_many(&grid, &[a, b, c]).into_iter();
    let samples = std::array::from_fn(|_| it.next().expect("three components"));
    PhysicalVectorField { grid, samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_lands_in_dc_mode() {
        let g = Grid::new([8, 4, 6], [1.0, 2.0, 3.0]).unwrap();
        let f = PhysicalVectorField::from_fn(&g, |_| [2.5, 0.0, -1.0]).unwrap();
        let fh = forward_transform(&f);
        let sv = g.volume().sqrt();
        assert!((fh.component(0)[0] - Complex64::new(2.5 * sv, 0.0)).norm() < 1e-13);
        assert!((fh.component(2)[0] - Complex64::new(-sv, 0.0)).norm() < 1e-13);
        let rest: f64 = (1..g.len()).map(|i| fh.component(0)[i].norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn cosine_has_two_conjugate_modes() {
        let g = Grid::new([8, 8, 8], [2.0, 1.0, 1.0]).unwrap();
        let f = PhysicalVectorField::from_fn(&g, |x| [(2.0 * PI * x[0] / 2.0).cos(), 0.0, 0.0])
            .unwrap();
        let fh = forward_transform(&f);
        let plus = mode_index(&g, [1, 0, 0]).unwrap();
        let minus = mode_index(&g, [-1, 0, 0]).unwrap();
        let expect = g.volume().sqrt() / 2.0;
        for idx in 0..g.len() {
            let v = fh.component(0)[idx];
            if idx == plus || idx == minus {
                assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-13);
            } else {
                assert!(v.norm() < 1e-13);
            }
        }
        assert_eq!(g.wavevector(plus)[0], PI);
    }

    #[test]
    fn zero_coefficients_give_zero_field() {
        let g = Grid::cubic(4).unwrap();
        let f = inverse_transform(&SpectralVectorField::zeros(&g)).unwrap();
        assert!(f.components().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn conjugate_pair_samples_a_cosine() {
        let g = Grid::cubic(8).unwrap();
        let fh = SpectralVectorField::cosine_mode(&g, [0, 2, 1], [0.0, 0.0, 3.0]).unwrap();
        let f = inverse_transform(&fh).unwrap();
        for idx in 0..g.len() {
            let pos = g.position(idx);
            let x2 = g.coordinate(1, pos[1]);
            let x3 = g.coordinate(2, pos[2]);
            let expect = 3.0 * (2.0 * x2 + x3).cos();
            assert!((f.component(2)[idx] - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn asymmetric_coefficients_are_rejected() {
        let g = Grid::cubic(4).unwrap();
        let mut fh = SpectralVectorField::zeros(&g);
        fh.component_mut(0)[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            inverse_transform(&fh),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn non_finite_samples_are_rejected() {
        let g = Grid::cubic(4).unwrap();
        let mut s = [vec![0.0; 64], vec![0.0; 64], vec![0.0; 64]];
        s[1][5] = f64::NAN;
        assert!(matches!(
            PhysicalVectorField::new(g, s),
            Err(Error::NonFinite {
                component: 1,
                index: 5
            })
        ));
    }
}
