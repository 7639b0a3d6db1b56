//! Fourier multipliers acting on [`SpectralVectorField`]s.

use num_complex::Complex64;

use crate::field::SpectralVectorField;
use crate::grid::Grid;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Leray projection `M(ξ) = I - ξξᵀ/|ξ|²` applied per mode.
///
/// The mean mode and modes whose odd-order wavevector vanishes (all-Nyquist
/// or mixed Nyquist/zero corners) pass through unchanged.
pub fn leray_project(f: &SpectralVectorField) -> SpectralVectorField {
    let g = f.grid();
    let k: [Vec<f64>; 3] = std::array::from_fn(|a| g.odd_wavenumbers(a));
    let mut out = f.clone();
    let [c0, c1, c2] = out.components_mut();
    for (idx, pos) in g.positions().enumerate() {
        let xi = [k[0][pos[0]], k[1][pos[1]], k[2][pos[2]]];
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            continue;
        }
        let dot = (c0[idx] * xi[0] + c1[idx] * xi[1] + c2[idx] * xi[2]) / k2;
        c0[idx] -= dot * xi[0];
        c1[idx] -= dot * xi[1];
        c2[idx] -= dot * xi[2];
    }
    out
}

/// Friedrichs cutoff `J_R`: zeroes every mode with `|ξ| >= R`.
pub fn friedrichs_cutoff(f: &SpectralVectorField, radius: f64) -> SpectralVectorField {
    assert!(radius > 0.0, "cutoff radius must be positive");
    let g = f.grid().clone();
    let r2 = radius * radius;
    f.multiply(|idx| {
        let xi = g.wavevector(idx);
        if xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2] < r2 {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}

/// `∂_axis` (axis in `0..3`): multiplication by `iξ_axis`, zero at Nyquist.
pub fn derivative(f: &SpectralVectorField, axis: usize) -> SpectralVectorField {
    assert!(axis < 3, "axis must be 0, 1 or 2");
    let g = f.grid().clone();
    f.multiply(|idx| {
        let p = g.position(idx)[axis];
        I * g.odd_wavenumber(axis, p)
    })
}

/// `Δ_h = ∂₁² + ∂₂²`: multiplication by `-(ξ₁² + ξ₂²)`.
pub fn horizontal_laplacian(f: &SpectralVectorField) -> SpectralVectorField {
    let g = f.grid().clone();
    f.multiply(|idx| Complex64::new(-horizontal_wavenumber_sq(&g, idx), 0.0))
}

/// `|ξ_h|² = ξ₁² + ξ₂²` of the mode at `idx`.
#[inline]
pub fn horizontal_wavenumber_sq(g: &Grid, idx: usize) -> f64 {
    let pos = g.position(idx);
    let a = g.wavenumbers(0)[pos[0]];
    let b = g.wavenumbers(1)[pos[1]];
    a * a + b * b
}

/// Zeroes modes outside the two-thirds dealiasing mask.
pub fn dealias(f: &SpectralVectorField) -> SpectralVectorField {
    let g = f.grid().clone();
    f.multiply(|idx| {
        if g.dealias_keeps(g.position(idx)) {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}

/// Gradient `iξ φ̂` of a scalar given by its coefficients.
pub fn gradient(grid: &Grid, phi: &[Complex64]) -> SpectralVectorField {
    let coeffs = std::array::from_fn(|a| {
        phi.iter()
            .enumerate()
            .map(|(idx, &v)| {
                let p = grid.position(idx)[a];
                v * I * grid.odd_wavenumber(a, p)
            })
            .collect()
    });
    SpectralVectorField::new(grid.clone(), coeffs).expect("gradient has grid length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{forward_transform, inverse_transform, PhysicalVectorField};
    use crate::random::{random_field, Band};
    use crate::tolerance::EXACT;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rel_diff(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
        a.sub(b).max_abs() / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn gradients_are_annihilated() {
        let g = Grid::cubic(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_field(&g, Band::Full, &mut rng);
        let grad = gradient(&g, phi.component(0));
        assert!(leray_project(&grad).max_abs() <= EXACT * grad.max_abs());
    }

    #[test]
    fn divergence_free_input_is_a_fixed_point() {
        let g = Grid::cubic(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = leray_project(&random_field(&g, Band::Full, &mut rng));
        assert!(rel_diff(&leray_project(&u), &u) <= EXACT);
        assert!(u.is_divergence_free(1e-12));
        assert!(u.is_hermitian(1e-13));
    }

    #[test]
    fn cutoff_edge_cases() {
        let g = Grid::cubic(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_field(&g, Band::Full, &mut rng);
        let big = friedrichs_cutoff(&u, 1.01 * g.max_wavenumber());
        assert_eq!(big, u);
        let small = friedrichs_cutoff(&u, 0.5 * g.min_wavenumber());
        for c in 0..3 {
            assert_eq!(small.component(c)[0], u.component(c)[0]);
            assert!(small.component(c)[1..].iter().all(|v| *v == ZERO));
        }
    }

    #[test]
    fn derivative_of_constant_and_sine() {
        let g = Grid::new([8, 8, 8], [1.0, 1.0, 3.0]).unwrap();
        let c = forward_transform(&PhysicalVectorField::from_fn(&g, |_| [1.0, 2.0, 3.0]).unwrap());
        for axis in 0..3 {
            assert!(derivative(&c, axis).max_abs() < 1e-13);
        }
        let k = 2.0 * PI / 3.0;
        let s = forward_transform(
            &PhysicalVectorField::from_fn(&g, |x| [(k * x[2]).sin(), 0.0, 0.0]).unwrap(),
        );
        let ds = inverse_transform(&derivative(&s, 2)).unwrap();
        for idx in 0..g.len() {
            let x3 = g.coordinate(2, g.position(idx)[2]);
            assert!((ds.component(0)[idx] - k * (k * x3).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn horizontal_laplacian_single_modes() {
        let g = Grid::new([8, 8, 8], [2.0, 1.0, 1.0]).unwrap();
        let vertical = SpectralVectorField::cosine_mode(&g, [0, 0, 3], [1.0, 1.0, 0.0]).unwrap();
        assert_eq!(horizontal_laplacian(&vertical).max_abs(), 0.0);
        let horiz = SpectralVectorField::cosine_mode(&g, [1, 0, 0], [0.0, 1.0, 0.0]).unwrap();
        let xi = 2.0 * PI / 2.0;
        assert!(rel_diff(&horizontal_laplacian(&horiz), &horiz.scaled(-xi * xi)) < 1e-15);
    }

    #[test]
    fn laplacian_equals_composed_derivatives() {
        let g = Grid::new([8, 16, 8], [1.0, 2.0, 3.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_field(&g, Band::TwoThirds, &mut rng);
        let composed = derivative(&derivative(&u, 0), 0).add(&derivative(&derivative(&u, 1), 1));
        assert!(rel_diff(&horizontal_laplacian(&u), &composed) <= EXACT);
    }

    #[test]
    fn laplacian_kernel_is_exactly_the_vertical_modes() {
        let g = Grid::cubic(8).unwrap();
        for idx in 0..g.len() {
            let k = g.signed_mode(idx);
            let in_kernel = horizontal_wavenumber_sq(&g, idx) == 0.0;
            assert_eq!(in_kernel, k[0] == 0 && k[1] == 0);
        }
    }
}
