//! Brute-force reference computations.
//!
//! Nothing here calls the FFT path, the grid's wavenumber tables or the
//! operator module: every phase, wavevector and sum is formed directly from
//! its definition so the fast paths can be checked against it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PhysicalVectorField, SpectralVectorField};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy)]
pub struct OracleBudget {
    /// Cap on `N1 N2 N3` for the O(N²) transforms and convolution sums.
    pub max_modes: usize,
    /// Lattice refinement used by quadrature references.
    pub refine_factor: usize,
    /// Cap on refined lattice size.
    pub max_samples: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_modes: 8 * 8 * 8,
            refine_factor: 4,
            max_samples: 1 << 22,
        }
    }
}

impl OracleBudget {
    fn check_modes(&self, what: &'static str, requested: usize) -> Result<()> {
        if requested > self.max_modes {
            return Err(Error::BudgetExceeded {
                what,
                requested,
                cap: self.max_modes,
            });
        }
        Ok(())
    }
}

fn signed(p: usize, n: usize) -> i64 {
    if 2 * p <= n {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

fn lattice_points(grid: &Grid) -> Vec<[usize; 3]> {
    let [n1, n2, n3] = grid.modes();
    let mut pts = Vec::with_capacity(n1 * n2 * n3);
    for a in 0..n1 {
        for b in 0..n2 {
            for c in 0..n3 {
                pts.push([a, b, c]);
            }
        }
    }
    pts
}

/// Phase `exp(sign * 2πi Σ_a j_a k_a / N_a)`, evaluated from exact integer
/// products reduced modulo `N_a`.
fn phase(j: [usize; 3], k: [usize; 3], n: [usize; 3], sign: f64) -> Complex64 {
    let mut turns = 0.0;
    for a in 0..3 {
        turns += ((j[a] * k[a]) % n[a]) as f64 / n[a] as f64;
    }
    let theta = sign * 2.0 * PI * turns;
    Complex64::new(theta.cos(), theta.sin())
}

/// Direct O(N²) forward DFT with the crate's unit-Parseval normalization.
pub fn naive_dft(f: &PhysicalVectorField, budget: &OracleBudget) -> Result<SpectralVectorField> {
    let grid = f.grid();
    budget.check_modes("naive_dft", grid.len())?;
    let n = grid.modes();
    let pts = lattice_points(grid);
    let scale = grid.volume().sqrt() / grid.len() as f64;
    let coeffs = std::array::from_fn(|c| {
        let s = f.component(c);
        pts.iter()
            .map(|&k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (jdx, &j) in pts.iter().enumerate() {
                    acc += phase(j, k, n, -1.0) * s[jdx];
                }
                acc * scale
            })
            .collect()
    });
    SpectralVectorField::new(grid.clone(), coeffs)
}

/// Direct O(N²) inverse DFT; returns real and imaginary parts of each sample.
pub fn naive_idft(f: &SpectralVectorField, budget: &OracleBudget) -> Result<[Vec<Complex64>; 3]> {
    let grid = f.grid();
    budget.check_modes("naive_idft", grid.len())?;
    let n = grid.modes();
    let pts = lattice_points(grid);
    let scale = 1.0 / grid.volume().sqrt();
    Ok(std::array::from_fn(|c| {
        let s = f.component(c);
        pts.iter()
            .map(|&j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (kdx, &k) in pts.iter().enumerate() {
                    acc += phase(j, k, n, 1.0) * s[kdx];
                }
                acc * scale
            })
            .collect()
    }))
}

/// Output of [`convolution_nonlinear`], keyed by integer wavevector.
#[derive(Debug, Clone)]
pub struct ConvolutionResult {
    lengths: [f64; 3],
    terms: BTreeMap<[i64; 3], [Complex64; 3]>,
}

impl ConvolutionResult {
    pub fn get(&self, k: [i64; 3]) -> [Complex64; 3] {
        self.terms
            .get(&k)
            .copied()
            .unwrap_or([Complex64::new(0.0, 0.0); 3])
    }

    pub fn support(&self) -> impl Iterator<Item = (&[i64; 3], &[Complex64; 3])> {
        self.terms.iter()
    }

    /// `Σ_k Re(conj(û(k))·N(k))`, the L² pairing with `u`.
    pub fn pair_with(&self, u: &SpectralVectorField) -> f64 {
        let grid = u.grid();
        let n = grid.modes();
        let mut acc = 0.0;
        for (k, v) in &self.terms {
            if (0..3).any(|a| 2 * k[a].unsigned_abs() >= n[a] as u64) {
                continue;
            }
            let pos: [usize; 3] = std::array::from_fn(|a| k[a].rem_euclid(n[a] as i64) as usize);
            let idx = (pos[0] * n[1] + pos[1]) * n[2] + pos[2];
            for (c, vc) in v.iter().enumerate() {
                acc += (u.component(c)[idx].conj() * vc).re;
            }
        }
        acc
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }
}

/// Exact quadratic term `(u·∇)u` of a trigonometric polynomial, by direct
/// convolution over all pairs of nonzero modes: for every integer `k`,
///
/// ```text
/// N_j(k) = V^{-1/2} Σ_{p+q=k} Σ_i û_i(p) (i q_i) û_j(q)
/// ```
///
/// Sums are over integer wavevectors without wraparound, so the result is
/// alias-free. Inputs must carry no Nyquist content.
pub fn convolution_nonlinear(
    u: &SpectralVectorField,
    budget: &OracleBudget,
) -> Result<ConvolutionResult> {
    let grid = u.grid();
    budget.check_modes("convolution_nonlinear", grid.len())?;
    let n = grid.modes();
    let lengths = grid.lengths();
    let pts = lattice_points(grid);

    let mut support: Vec<([i64; 3], [f64; 3], [Complex64; 3])> = Vec::new();
    for (idx, p) in pts.iter().enumerate() {
        let v = [
            u.component(0)[idx],
            u.component(1)[idx],
            u.component(2)[idx],
        ];
        if v.iter().all(|c| c.norm() == 0.0) {
            continue;
        }
        let k: [i64; 3] = std::array::from_fn(|a| signed(p[a], n[a]));
        if (0..3).any(|a| 2 * k[a].unsigned_abs() == n[a] as u64) {
            return Err(Error::InvalidParameter(
                "convolution oracle input has Nyquist content".into(),
            ));
        }
        let xi = std::array::from_fn(|a| 2.0 * PI * k[a] as f64 / lengths[a]);
        support.push((k, xi, v));
    }

    let inv_sqrt_v = 1.0 / (lengths[0] * lengths[1] * lengths[2]).sqrt();
    let mut terms: BTreeMap<[i64; 3], [Complex64; 3]> = BTreeMap::new();
    for (kp, _, up) in &support {
        for (kq, xq, uq) in &support {
            let k = [kp[0] + kq[0], kp[1] + kq[1], kp[2] + kq[2]];
            // û(p)·(i q)
            let mut adv = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                adv += up[i] * Complex64::new(0.0, xq[i]);
            }
            let entry = terms.entry(k).or_insert([Complex64::new(0.0, 0.0); 3]);
            for j in 0..3 {
                entry[j] += adv * uq[j] * inv_sqrt_v;
            }
        }
    }
    Ok(ConvolutionResult { lengths, terms })
}

/// `L^p` norm of an analytically given field on a lattice refined by
/// `budget.refine_factor` relative to `base_modes`. `p = f64::INFINITY`
/// gives the lattice maximum.
pub fn refined_quadrature_norm(
    f: impl Fn([f64; 3]) -> [f64; 3],
    lengths: [f64; 3],
    base_modes: [usize; 3],
    p: f64,
    budget: &OracleBudget,
) -> Result<f64> {
    let m: [usize; 3] = std::array::from_fn(|a| base_modes[a] * budget.refine_factor);
    let total = m[0] * m[1] * m[2];
    if total > budget.max_samples {
        return Err(Error::BudgetExceeded {
            what: "refined_quadrature_norm",
            requested: total,
            cap: budget.max_samples,
        });
    }
    let h: [f64; 3] = std::array::from_fn(|a| lengths[a] / m[a] as f64);
    let dv = h[0] * h[1] * h[2];
    let mut acc = 0.0f64;
    for a in 0..m[0] {
        for b in 0..m[1] {
            for c in 0..m[2] {
                let v = f([a as f64 * h[0], b as f64 * h[1], c as f64 * h[2]]);
                let mag = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if p.is_infinite() {
                    acc = acc.max(mag);
                } else {
                    acc += mag.powf(p) * dv;
                }
            }
        }
    }
    Ok(if p.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / p)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_has_flat_spectrum() {
        let g = Grid::cubic(4).unwrap();
        let f = PhysicalVectorField::from_fn(&g, |x| {
            if x == [0.0; 3] {
                [1.0, 0.0, 0.0]
            } else {
                [0.0; 3]
            }
        })
        .unwrap();
        let fh = naive_dft(&f, &OracleBudget::default()).unwrap();
        let first = fh.component(0)[0].norm();
        assert!(first > 0.0);
        assert!(fh
            .component(0)
            .iter()
            .all(|c| (c.norm() - first).abs() < 1e-14));
    }

    #[test]
    fn constant_is_dc_only() {
        let g = Grid::cubic(4).unwrap();
        let f = PhysicalVectorField::from_fn(&g, |_| [0.0, 1.5, 0.0]).unwrap();
        let fh = naive_dft(&f, &OracleBudget::default()).unwrap();
        assert!((fh.component(1)[0].re - 1.5 * g.volume().sqrt()).abs() < 1e-12);
        assert!(fh.component(1)[1..].iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn budget_is_a_hard_error() {
        let g = Grid::cubic(16).unwrap();
        let f = PhysicalVectorField::zeros(&g);
        assert!(matches!(
            naive_dft(&f, &OracleBudget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
        let tight = OracleBudget {
            max_samples: 10,
            ..Default::default()
        };
        assert!(refined_quadrature_norm(|_| [1.0; 3], [1.0; 3], [4; 3], 2.0, &tight).is_err());
    }

    #[test]
    fn naive_round_trip() {
        let g = Grid::new([4, 6, 4], [1.0, 2.0, 0.5]).unwrap();
        let f = PhysicalVectorField::from_fn(&g, |x| {
            [x[0].sin() + x[1], (x[2] * 3.0).cos(), x[0] * x[1] * x[2]]
        })
        .unwrap();
        let b = OracleBudget::default();
        let back = naive_idft(&naive_dft(&f, &b).unwrap(), &b).unwrap();
        for c in 0..3 {
            for (v, s) in back[c].iter().zip(f.component(c)) {
                assert!((v.re - s).abs() < 1e-12 && v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_convolution_sits_on_doubled_wavevector() {
        // lone complex mode with amplitude along its own wavevector
        let g = Grid::cubic(8).unwrap();
        let mut u = SpectralVectorField::zeros(&g);
        let idx = crate::field::mode_index(&g, [1, 0, 0]).unwrap();
        u.component_mut(0)[idx] = Complex64::new(1.0, 0.0);
        let r = convolution_nonlinear(&u, &OracleBudget::default()).unwrap();
        let keys: Vec<_> = r.support().map(|(k, _)| *k).collect();
        assert_eq!(keys, vec![[2, 0, 0]]);
    }

    #[test]
    fn constant_quadrature_is_exact() {
        let v = refined_quadrature_norm(
            |_| [3.0, 4.0, 0.0],
            [1.0, 2.0, 0.5],
            [4; 3],
            3.0,
            &OracleBudget::default(),
        )
        .unwrap();
        assert!((v - 5.0).abs() < 1e-13);
    }
}
