//! Uniform periodic lattice on the box `[0,L1) x [0,L2) x [0,L3)` and its
//! discrete wavenumber tables.
//!
//! Storage is row-major with the third axis fastest: the flat index of
//! lattice point (or mode) `(i1, i2, i3)` is `(i1 * N2 + i2) * N3 + i3`.
//! Mode position `p` on an axis of size `N` carries the signed integer
//! wavenumber `k = p` for `p <= N/2` and `k = p - N` otherwise, so the table
//! runs over `{-N/2+1, ..., N/2}` with the Nyquist entry at `+N/2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    modes: [usize; 3],
    lengths: [f64; 3],
    wavenumbers: [Vec<f64>; 3],
}

/// Serialized form of a [`Grid`]; wavenumber tables are always derived.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub modes: [usize; 3],
    #[serde(rename = "box", default = "default_box")]
    pub lengths: [f64; 3],
}

fn default_box() -> [f64; 3] {
    [2.0 * PI; 3]
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.modes, spec.lengths)
    }
}

impl From<Grid> for GridSpec {
    fn from(grid: Grid) -> Self {
        GridSpec {
            modes: grid.modes,
            lengths: grid.lengths,
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes
            && self
                .lengths
                .iter()
                .zip(&other.lengths)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl Grid {
    pub fn new(modes: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        for (axis, &n) in modes.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {} has {n} modes; need an even count >= 4",
                    axis + 1
                )));
            }
        }
        for (axis, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {} has box length {l}; need a positive finite length",
                    axis + 1
                )));
            }
        }
        let wavenumbers = std::array::from_fn(|axis| {
            let n = modes[axis];
            (0..n)
                .map(|p| 2.0 * PI * signed_index(p, n) as f64 / lengths[axis])
                .collect()
        });
        Ok(Self {
            modes,
            lengths,
            wavenumbers,
        })
    }

    /// Cubic grid of `n^3` modes on the `2π`-periodic box.
    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n; 3], default_box())
    }

    pub fn modes(&self) -> [usize; 3] {
        self.modes
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn len(&self) -> usize {
        self.modes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Horizontal cell area `dx1 * dx2`.
    pub fn cell_area(&self) -> f64 {
        self.lengths[0] / self.modes[0] as f64 * self.lengths[1] / self.modes[1] as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.modes[axis] as f64
    }

    /// Per-axis wavenumber table `ξ = 2πk/L`, indexed by mode position.
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.modes[1] + i2) * self.modes[2] + i3
    }

    #[inline]
    pub fn position(&self, idx: usize) -> [usize; 3] {
        let n3 = self.modes[2];
        let n2 = self.modes[1];
        [idx / (n2 * n3), (idx / n3) % n2, idx % n3]
    }

    /// Mode positions in storage order.
    pub fn positions(&self) -> impl Iterator<Item = [usize; 3]> {
        let [n1, n2, n3] = self.modes;
        (0..n1).flat_map(move |a| (0..n2).flat_map(move |b| (0..n3).map(move |c| [a, b, c])))
    }

    /// Odd-order wavenumber table of one axis (see [`Grid::odd_wavenumber`]).
    pub fn odd_wavenumbers(&self, axis: usize) -> Vec<f64> {
        (0..self.modes[axis])
            .map(|p| self.odd_wavenumber(axis, p))
            .collect()
    }

    /// Signed integer wavenumber at a mode position.
    #[inline]
    pub fn signed_index(&self, axis: usize, p: usize) -> i64 {
        signed_index(p, self.modes[axis])
    }

    pub fn signed_mode(&self, idx: usize) -> [i64; 3] {
        let pos = self.position(idx);
        std::array::from_fn(|a| self.signed_index(a, pos[a]))
    }

    #[inline]
    pub fn is_nyquist(&self, axis: usize, p: usize) -> bool {
        p == self.modes[axis] / 2
    }

    /// Wavenumber used by odd-order multipliers (derivative, divergence,
    /// Leray projection). The Nyquist entry is zero: its `+N/2` and `-N/2`
    /// aliases coincide, so only a zero multiplier keeps real fields real.
    #[inline]
    pub fn odd_wavenumber(&self, axis: usize, p: usize) -> f64 {
        if self.is_nyquist(axis, p) {
            0.0
        } else {
            self.wavenumbers[axis][p]
        }
    }

    /// True wavevector `ξ` of the mode at flat index `idx`.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let pos = self.position(idx);
        std::array::from_fn(|a| self.wavenumbers[a][pos[a]])
    }

    /// Flat index of the mode `-k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let [p1, p2, p3] = self.position(idx);
        let neg = |p: usize, n: usize| (n - p) % n;
        self.index(
            neg(p1, self.modes[0]),
            neg(p2, self.modes[1]),
            neg(p3, self.modes[2]),
        )
    }

    /// Largest `|ξ|` on the grid (the all-Nyquist corner).
    pub fn max_wavenumber(&self) -> f64 {
        (0..3)
            .map(|a| {
                let x = PI * self.modes[a] as f64 / self.lengths[a];
                x * x
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Smallest nonzero `|ξ|` on the grid.
    pub fn min_wavenumber(&self) -> f64 {
        (0..3)
            .map(|a| 2.0 * PI / self.lengths[a])
            .fold(f64::INFINITY, f64::min)
    }

    /// Two-thirds rule: a mode survives iff `3|k_i| < N_i` on every axis.
    #[inline]
    pub fn dealias_keeps(&self, pos: [usize; 3]) -> bool {
        (0..3).all(|a| 3 * self.signed_index(a, pos[a]).unsigned_abs() < self.modes[a] as u64)
    }

    /// Coordinate of lattice point `j` along `axis`.
    #[inline]
    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        j as f64 * self.spacing(axis)
    }
}

#[inline]
fn signed_index(p: usize, n: usize) -> i64 {
    if p <= n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small_counts() {
        assert!(Grid::new([4, 6, 8], [1.0; 3]).is_ok());
        assert!(Grid::new([5, 8, 8], [1.0; 3]).is_err());
        assert!(Grid::new([2, 8, 8], [1.0; 3]).is_err());
        assert!(Grid::new([8, 8, 8], [1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn wavenumber_table_is_antisymmetric_except_nyquist() {
        let g = Grid::new([8, 6, 4], [1.0, 2.0, 3.0]).unwrap();
        for axis in 0..3 {
            let n = g.modes()[axis];
            let table = g.wavenumbers(axis);
            assert_eq!(table.len(), n);
            for p in 1..n {
                let q = n - p;
                if p == n / 2 {
                    assert!(table[p] > 0.0);
                } else {
                    assert_eq!(table[p], -table[q]);
                }
            }
            assert_eq!(table[0], 0.0);
        }
        assert_eq!(g.len(), 8 * 6 * 4);
    }

    #[test]
    fn conjugate_index_is_an_involution() {
        let g = Grid::new([8, 6, 4], [1.0; 3]).unwrap();
        for idx in 0..g.len() {
            let c = g.conjugate_index(idx);
            assert_eq!(g.conjugate_index(c), idx);
            let (a, b) = (g.signed_mode(idx), g.signed_mode(c));
            for axis in 0..3 {
                let n = g.modes()[axis] as i64;
                assert_eq!((a[axis] + b[axis]).rem_euclid(n), 0);
            }
        }
    }

    #[test]
    fn dealias_mask_keeps_below_a_third() {
        let g = Grid::cubic(32).unwrap();
        let kept: Vec<i64> = (0..32)
            .filter(|&p| g.dealias_keeps([p, 0, 0]))
            .map(|p| g.signed_index(0, p))
            .collect();
        assert_eq!(kept.iter().copied().max(), Some(10));
        assert_eq!(kept.iter().copied().min(), Some(-10));
    }
}
