//! Integral Gronwall inequality on sampled data.
//!
//! Hypothesis: `f(t) + ∫₀ᵗ g ≤ A + ∫₀ᵗ h f`.
//! Conclusion: `f(t) + ∫₀ᵗ g ≤ A exp(∫₀ᵗ h)`.
//!
//! Integrals are trapezoid sums on the sample times. The conclusion is only
//! meaningful when the hypothesis holds, so a failed hypothesis is reported
//! as such and never as a failure of the conclusion.

use std::fmt;

use serde::Serialize;

use super::ledger::{instant, EnergyLedger};
use crate::damping::DampingSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallInput {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub a: f64,
}

impl GronwallInput {
    pub fn new(t: Vec<f64>, f: Vec<f64>, g: Vec<f64>, h: Vec<f64>, a: f64) -> Result<Self> {
        let n = t.len();
        if n == 0 || f.len() != n || g.len() != n || h.len() != n {
            return Err(Error::InvalidParameter(
                "series must be nonempty and of equal length".into(),
            ));
        }
        if let Some(w) = t.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotoneTime {
                prev: w[0],
                next: w[1],
            });
        }
        let nonneg = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !(nonneg(&f) && nonneg(&g) && nonneg(&h) && a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(
                "samples and A must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { t, f, g, h, a })
    }

    /// The ∂₃ estimate of a logarithmically damped run in Gronwall form:
    /// `f = ‖∂₃u‖²`, `g` the dissipation integrands, `h ≡ b`, `A = ‖∂₃u⁰‖²`.
    pub fn from_dz_ledger(ledger: &EnergyLedger, b: f64) -> Result<Self> {
        let DampingSpec::Logarithmic { alpha } = ledger.meta().damping else {
            return Err(Error::InvalidParameter(
                "needs a logarithmically damped ledger".into(),
            ));
        };
        let nu = ledger.meta().viscosity;
        let rows = ledger.rows();
        let t = rows.iter().map(|r| r.t).collect();
        let f = rows.iter().map(|r| r.dz_kinetic()).collect();
        let g = rows
            .iter()
            .map(|r| {
                2.0 * nu * r.instant[instant::GRAD_H_DZ_U]
                    + alpha
                        * (r.instant[instant::FRAC_DZ_U2_SQ]
                            + r.instant[instant::LOG_DZ_U2_SQ]
                            + r.instant[instant::LOG_U2_DZ_U_SQ])
            })
            .collect();
        let h = vec![b.max(0.0); rows.len()];
        Self::new(t, f, g, h, ledger.meta().initial_dz_kinetic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GronwallVerdict {
    Holds,
    HypothesisViolated,
    LemmaViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    /// `A exp(∫₀ᵗ h)` at each sample.
    pub envelope: Vec<f64>,
    /// `max_t [f + ∫g - A - ∫hf]`
    pub hypothesis_defect: f64,
    /// `max_t [f + ∫g - A exp(∫h)]`
    pub conclusion_defect: f64,
    pub worst_time: f64,
    pub tolerance: f64,
    pub verdict: GronwallVerdict,
}

impl GronwallReport {
    pub fn passed(&self) -> bool {
        self.verdict == GronwallVerdict::Holds
    }
}

impl fmt::Display for GronwallReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.verdict {
            GronwallVerdict::Holds => "PASS gronwall",
            GronwallVerdict::HypothesisViolated => "FAIL gronwall (hypothesis violated)",
            GronwallVerdict::LemmaViolated => "FAIL gronwall (lemma violated)",
        };
        write!(
            f,
            "{verdict}: hypothesis defect {:.3e}, conclusion defect {:.3e} at t = {}, tolerance {:.3e}",
            self.hypothesis_defect, self.conclusion_defect, self.worst_time, self.tolerance
        )
    }
}

fn trapezoid_running(t: &[f64], y: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..t.len() {
        acc += 0.5 * (t[k] - t[k - 1]) * (y(k - 1) + y(k));
        out.push(acc);
    }
    out
}

/// Checks hypothesis then conclusion with absolute tolerance `tol`.
pub fn gronwall_envelope(input: &GronwallInput, tol: f64) -> GronwallReport {
    let t = &input.t;
    let int_g = trapezoid_running(t, |k| input.g[k]);
    let int_h = trapezoid_running(t, |k| input.h[k]);
    let int_hf = trapezoid_running(t, |k| input.h[k] * input.f[k]);
    let envelope: Vec<f64> = int_h.iter().map(|s| input.a * s.exp()).collect();
    let mut hyp = f64::NEG_INFINITY;
    let mut con = f64::NEG_INFINITY;
    let mut worst_time = t[0];
    for k in 0..t.len() {
        let lhs = input.f[k] + int_g[k];
        hyp = hyp.max(lhs - input.a - int_hf[k]);
        let c = lhs - envelope[k];
        if c > con {
            con = c;
            worst_time = t[k];
        }
    }
    let verdict = if !(hyp <= tol) {
        GronwallVerdict::HypothesisViolated
    } else if !(con <= tol) {
        GronwallVerdict::LemmaViolated
    } else {
        GronwallVerdict::Holds
    };
    GronwallReport {
        envelope,
        hypothesis_defect: hyp,
        conclusion_defect: con,
        worst_time,
        tolerance: tol,
        verdict,
    }
}
