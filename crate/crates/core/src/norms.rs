//! Norm functionals and empirical inequality probes.
//!
//! Lattice norms are quadratures: sums over sample points times the cell
//! volume. `L^∞` is the lattice maximum, a lower bound of the continuum
//! sup-norm. Spectral norms weight the unit-Parseval coefficients.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{forward_scalar, inverse_scalar, PhysicalVectorField, SpectralVectorField};
use crate::grid::Grid;
use crate::operators::derivative;
use crate::random::{random_scalar, substream, Band};

/// One evaluated norm, serializable as a CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub name: String,
    pub parameters: String,
    pub value: f64,
    pub field_id: String,
    pub seed: Option<u64>,
}

impl NormReport {
    pub const CSV_HEADER: &'static str = "name,parameters,value,field_id,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{},{}",
            self.name,
            self.parameters,
            self.value,
            self.field_id,
            self.seed.map(|s| s.to_string()).unwrap_or_default()
        )
    }
}

fn check_exponent(p: f64, what: &str) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "{what} exponent must be >= 1 or infinite, got {p}"
        )));
    }
    Ok(())
}

/// `(Σ_x w(x)^p dV)^{1/p}` over a sequence of pointwise magnitudes.
fn lp_of(values: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else if p == 2.0 {
        (values.map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (values.map(|v| v.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

/// `‖f‖_{L^p}` with `|f|` the Euclidean pointwise magnitude.
pub fn lebesgue_norm(f: &PhysicalVectorField, p: f64) -> Result<f64> {
    check_exponent(p, "Lebesgue")?;
    let g = f.grid();
    Ok(lp_of(
        (0..g.len()).map(|i| f.magnitude(i)),
        p,
        g.cell_volume(),
    ))
}

/// Sobolev norm with weight `|ξ|^s` (homogeneous) or `(1+|ξ|²)^{s/2}`.
/// The mean mode contributes nothing to the homogeneous norm; for `s < 0`
/// it must vanish.
pub fn sobolev_norm(f: &SpectralVectorField, s: f64, homogeneous: bool) -> Result<f64> {
    let g = f.grid();
    if homogeneous && s < 0.0 && (0..3).any(|c| f.component(c)[0].norm() != 0.0) {
        return Err(Error::InvalidParameter(format!(
            "homogeneous Sobolev norm with s = {s} < 0 needs a mean-zero field"
        )));
    }
    let mut acc = 0.0;
    for idx in 0..g.len() {
        let xi = g.wavevector(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let weight = if homogeneous {
            if k2 == 0.0 {
                continue;
            }
            k2.powf(s)
        } else {
            (1.0 + k2).powf(s)
        };
        let m: f64 = (0..3).map(|c| f.component(c)[idx].norm_sqr()).sum();
        acc += weight * m;
    }
    Ok(acc.sqrt())
}

/// Anisotropic `H^{0,1}` norm `sqrt(‖f‖² + ‖∂₃f‖²)`.
pub fn h01_norm(f: &SpectralVectorField) -> f64 {
    let dz = derivative(f, 2);
    (f.l2_norm_squared() + dz.l2_norm_squared()).sqrt()
}

/// Mixed norm `L_v^p L_h^q`: horizontal `L^q` on each `x₃` slice, then the
/// vertical `L^p` norm of the slice profile.
pub fn mixed_norm(f: &PhysicalVectorField, p_vertical: f64, q_horizontal: f64) -> Result<f64> {
    check_exponent(p_vertical, "vertical")?;
    check_exponent(q_horizontal, "horizontal")?;
    let g = f.grid();
    let [n1, n2, n3] = g.modes();
    let profile: Vec<f64> = (0..n3)
        .map(|i3| {
            let slice = (0..n1 * n2).map(|h| f.magnitude(h * n3 + i3));
            lp_of(slice, q_horizontal, g.cell_area())
        })
        .collect();
    Ok(lp_of(profile.into_iter(), p_vertical, g.spacing(2)))
}

/// Summary of an empirical ratio probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeStats {
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    pub min: f64,
}

impl ProbeStats {
    fn from_ratios(ratios: &[f64]) -> Self {
        let n = ratios.len();
        Self {
            samples: n,
            max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            mean: ratios.iter().sum::<f64>() / n as f64,
        }
    }
}

/// Homogeneous Sobolev norm of scalar coefficients, skipping the mean.
fn scalar_hdot(grid: &Grid, c: &[Complex64], s: f64) -> f64 {
    let mut acc = 0.0;
    for (idx, v) in c.iter().enumerate() {
        let xi = grid.wavevector(idx);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 > 0.0 {
            acc += k2.powf(s) * v.norm_sqr();
        }
    }
    acc.sqrt()
}

/// `‖fg‖_{Ḣ^{s1+s2-3/2}} / (‖f‖_{Ḣ^{s1}} ‖g‖_{Ḣ^{s2}})` for scalar fields
/// given by coefficients. The product is formed pointwise on the lattice
/// and its mean mode is dropped (the torus analogue of decay at infinity).
pub fn product_law_ratio(grid: &Grid, f: &[Complex64], g: &[Complex64], s1: f64, s2: f64) -> f64 {
    let fp = inverse_scalar(grid, f);
    let gp = inverse_scalar(grid, g);
    let prod: Vec<f64> = fp.iter().zip(&gp).map(|(a, b)| a * b).collect();
    let ph = forward_scalar(grid, &prod);
    scalar_hdot(grid, &ph, s1 + s2 - 1.5) / (scalar_hdot(grid, f, s1) * scalar_hdot(grid, g, s2))
}

/// Product-law probe in dimension 3 over random mean-zero pairs band-limited
/// so that their product is alias-free.
pub fn product_law_probe(
    s1: f64,
    s2: f64,
    trials: usize,
    grid: &Grid,
    seed: u64,
) -> Result<ProbeStats> {
    if !(s1 < 1.5 && s2 < 1.5 && s1 + s2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "product law needs s1, s2 < 3/2 and s1 + s2 > 0, got ({s1}, {s2})"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = substream(seed, "probe/product_law");
    let ratios: Vec<f64> = (0..trials)
        .map(|_| {
            let f = random_scalar(grid, Band::Half, 0.0, &mut rng);
            let g = random_scalar(grid, Band::Half, 0.0, &mut rng);
            product_law_ratio(grid, &f, &g, s1, s2)
        })
        .collect();
    Ok(ProbeStats::from_ratios(&ratios))
}

/// Per-slice ratios `‖w‖_{L⁴_h} / (‖w‖_{L²_h}^{1/2} ‖∇_h w‖_{L²_h}^{1/2})` of
/// a scalar lattice field, one entry per `x₃` slice with nonzero gradient.
pub fn slice_interpolation_ratios(grid: &Grid, w: &[f64]) -> Vec<f64> {
    let wh = forward_scalar(grid, w);
    let d: Vec<Vec<f64>> = (0..2)
        .map(|axis| {
            let dh: Vec<Complex64> = wh
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    let p = grid.position(idx)[axis];
                    v * Complex64::new(0.0, grid.odd_wavenumber(axis, p))
                })
                .collect();
            inverse_scalar(grid, &dh)
        })
        .collect();
    let [n1, n2, n3] = grid.modes();
    let da = grid.cell_area();
    (0..n3)
        .filter_map(|i3| {
            let mut l4 = 0.0;
            let mut l2 = 0.0;
            let mut grad = 0.0;
            for h in 0..n1 * n2 {
                let i = h * n3 + i3;
                let v2 = w[i] * w[i];
                l4 += v2 * v2;
                l2 += v2;
                grad += d[0][i] * d[0][i] + d[1][i] * d[1][i];
            }
            if grad == 0.0 || l2 == 0.0 {
                return None;
            }
            let l4 = (l4 * da).powf(0.25);
            let l2 = (l2 * da).sqrt();
            let grad = (grad * da).sqrt();
            Some(l4 / (l2.sqrt() * grad.sqrt()))
        })
        .collect()
}

/// Horizontal-slice Ladyzhenskaya probe over random scalar fields with no
/// `k₁ = k₂ = 0` content, so that every slice is mean-zero.
pub fn interpolation_probe(trials: usize, grid: &Grid, seed: u64) -> Result<ProbeStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = substream(seed, "probe/interpolation");
    let mut ratios = Vec::new();
    for _ in 0..trials {
        let mut c = random_scalar(grid, Band::TwoThirds, 0.0, &mut rng);
        for (idx, v) in c.iter_mut().enumerate() {
            let k = grid.signed_mode(idx);
            if k[0] == 0 && k[1] == 0 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        ratios.extend(slice_interpolation_ratios(grid, &inverse_scalar(grid, &c)));
    }
    Ok(ProbeStats::from_ratios(&ratios))
}

/// Sharp whole-plane constant of `‖w‖_{L⁴}² <= C ‖w‖_{L²} ‖∇w‖_{L²}` in
/// two dimensions, in ratio form: `(2 / ‖Q‖²_{L²})^{1/4}` with `Q` the
/// ground state of `ΔQ - Q + Q³ = 0`, `‖Q‖²_{L²} ≈ 11.700896`.
pub fn ladyzhenskaya_sharp_ratio() -> f64 {
    (2.0f64 / 11.700_896).powf(0.25)
}
