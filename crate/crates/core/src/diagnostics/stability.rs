//! Two-trajectory stability probe.
//!
//! `u` starts from the configured initial condition and `v` from the same
//! field plus `ε` times a random divergence-free field of unit L² norm; both
//! advance in lockstep and `w = u - v` is sampled at the ledger cadence.

use std::fmt;

use serde::Serialize;

use super::ledger::instant;
use crate::config::SolverConfig;
use crate::dynamics::{make_initial_condition, Simulation};
use crate::error::{Error, Result};
use crate::field::{inverse_unchecked, SpectralVectorField};
use crate::operators::leray_project;
use crate::random::{random_field, substream, Band};

/// Slack on the fitted exponential bound.
pub const BOUND_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub epsilon: f64,
    pub w0_sq: f64,
    pub t: Vec<f64>,
    /// `‖w(t)‖² / ‖w(0)‖²` (0 throughout when `w(0) = 0`).
    pub ratio: Vec<f64>,
    /// `‖w(t)‖²`
    pub w_sq: Vec<f64>,
    /// Slope of the least-squares line through `(t, log ratio)`.
    pub fitted_exponent: f64,
    /// Whether `ratio ≤ exp(fitted_exponent t) * BOUND_FACTOR` at every sample.
    pub bound_holds: bool,
    /// `∫₀ᵗ (‖∂₃∇_h u‖² + ‖∂₃u‖² + ‖∇_h u‖²)`
    pub g_integral: Vec<f64>,
    /// Smallest `c` with `log ratio ≤ c ∫G` at every sample.
    pub reference_constant: f64,
    /// Smallest box integral of `⟨d(u) - d(v), u - v⟩` over the samples,
    /// relative to `∫ u·d(u) + v·d(v)`, with `d` the configured damping.
    pub damping_pairing_min: f64,
    /// Set when a trajectory blew up; the series then end at the last
    /// completed sample.
    pub aborted: Option<String>,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.ratio.last().copied().unwrap_or(0.0);
        write!(
            f,
            "eps = {:e}: {} samples, final ratio {:.6e}, fitted c' = {:.6}, bound {}, c = {:.6}, damping pairing min {:.3e}",
            self.epsilon,
            self.t.len(),
            last,
            self.fitted_exponent,
            if self.bound_holds { "holds" } else { "violated" },
            self.reference_constant,
            self.damping_pairing_min
        )?;
        if let Some(a) = &self.aborted {
            write!(f, " (aborted: {a})")?;
        }
        Ok(())
    }
}

/// Unit-norm projected perturbation from the `"probe"` sub-stream.
pub fn probe_direction(cfg: &SolverConfig, seed: u64) -> SpectralVectorField {
    let mut rng = substream(seed, "probe");
    let z = leray_project(&random_field(&cfg.grid, Band::TwoThirds, &mut rng)).symmetrized();
    z.scaled(1.0 / z.l2_norm())
}

fn damping_pairing(
    u: &SpectralVectorField,
    v: &SpectralVectorField,
    cfg: &SolverConfig,
) -> (f64, f64) {
    let up = inverse_unchecked(u);
    let vp = inverse_unchecked(v);
    let mut pairing = 0.0;
    let mut scale = 0.0;
    for x in 0..cfg.grid.len() {
        let a = up.at(x);
        let b = vp.at(x);
        let fa = cfg.damping.factor(a.iter().map(|c| c * c).sum());
        let fb = cfg.damping.factor(b.iter().map(|c| c * c).sum());
        for c in 0..3 {
            pairing += (fa * a[c] - fb * b[c]) * (a[c] - b[c]);
            scale += fa * a[c] * a[c] + fb * b[c] * b[c];
        }
    }
    (pairing, scale)
}

pub fn stability_probe(cfg: &SolverConfig, epsilon: f64, seed: u64) -> Result<StabilityReport> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    let u0 = make_initial_condition(&cfg.ic, &cfg.grid, cfg.seed)?;
    let v0 = u0.axpy(epsilon, &probe_direction(cfg, seed));
    let mut su = Simulation::from_state(cfg.clone(), u0)?;
    let mut sv = Simulation::from_state(cfg.clone(), v0)?;

    let mut t = Vec::new();
    let mut w_sq = Vec::new();
    let mut g_integral = Vec::new();
    let mut pairing_min = f64::INFINITY;
    let mut g_prev = 0.0;
    let mut sample = |su: &Simulation,
                      sv: &Simulation,
                      t: &mut Vec<f64>,
                      w_sq: &mut Vec<f64>,
                      g_int: &mut Vec<f64>| {
        let row = su.ledger().last();
        let g = row.instant[instant::GRAD_H_DZ_U]
            + row.instant[instant::DZ_KINETIC]
            + row.instant[instant::GRAD_H_U];
        let acc = match (t.last(), g_int.last()) {
            (Some(&t0), Some(&i0)) => i0 + 0.5 * (row.t - t0) * (g_prev + g),
            _ => 0.0,
        };
        g_prev = g;
        t.push(row.t);
        g_int.push(acc);
        w_sq.push(su.state().u_hat.sub(&sv.state().u_hat).l2_norm_squared());
        let (p, s) = damping_pairing(&su.state().u_hat, &sv.state().u_hat, cfg);
        pairing_min = pairing_min.min(if s > 0.0 { p / s } else { p });
    };
    sample(&su, &sv, &mut t, &mut w_sq, &mut g_integral);

    let mut aborted = None;
    while su.state().step < cfg.total_steps() {
        let ru = su.advance_step();
        let rv = sv.advance_step();
        match (ru, rv) {
            (Ok(true), Ok(_)) => sample(&su, &sv, &mut t, &mut w_sq, &mut g_integral),
            (Ok(false), Ok(_)) => {}
            (Err(e), _) | (_, Err(e)) => {
                aborted = Some(e.to_string());
                break;
            }
        }
    }

    let w0_sq = w_sq[0];
    let ratio: Vec<f64> = if w0_sq > 0.0 {
        w_sq.iter().map(|w| w / w0_sq).collect()
    } else {
        vec![0.0; w_sq.len()]
    };
    let mut reference_constant: f64 = 0.0;
    let mut samples = Vec::with_capacity(t.len());
    for k in 0..t.len() {
        if ratio[k] > 0.0 {
            let l = ratio[k].ln();
            samples.push((t[k], l));
            if k > 0 && g_integral[k] > 0.0 {
                reference_constant = reference_constant.max(l / g_integral[k]);
            }
        }
    }
    let fitted_exponent = least_squares_slope(&samples);
    let bound_holds = t
        .iter()
        .zip(&ratio)
        .all(|(&s, &r)| r <= (fitted_exponent * s).exp() * BOUND_FACTOR);
    Ok(StabilityReport {
        epsilon,
        w0_sq,
        t,
        ratio,
        w_sq,
        fitted_exponent,
        bound_holds,
        g_integral,
        reference_constant,
        damping_pairing_min: pairing_min,
        aborted,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in points {
        num += (x - mt) * (y - my);
        den += (x - mt) * (x - mt);
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}
