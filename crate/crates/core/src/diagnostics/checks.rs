//! Pass/fail checks over a finished [`EnergyLedger`].
//!
//! Every check reports a defect curve `LHS(t) - RHS(t)` and passes when the
//! defect stays within the budget at every row. The default budget is
//! [`inequality_budget`] with the problem's natural scale; a fixed relative
//! budget can be requested instead.

use std::f64::consts::E;
use std::fmt;

use serde::Serialize;

use super::ledger::{cumulative, EnergyLedger};
use crate::config::BVariant;
use crate::damping::DampingSpec;
use crate::error::{Error, Result};
use crate::tolerance::inequality_budget;

/// The two readings of the ∂₃ growth constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BAlpha {
    pub alpha: f64,
    /// `e^{3/α} - e`; negative for `α > 3`. Equals the rate implied by the
    /// level set `α log(e+|u|²) ≥ 3`.
    pub theorem_variant: f64,
    /// `(e^{3/(2α)} - e)₊`
    pub proof_variant: f64,
}

impl BAlpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "b_alpha needs alpha > 0, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            theorem_variant: (3.0 / alpha).exp() - E,
            proof_variant: ((1.5 / alpha).exp() - E).max(0.0),
        })
    }

    pub fn select(&self, variant: BVariant) -> f64 {
        match variant {
            BVariant::Theorem => self.theorem_variant,
            BVariant::Proof => self.proof_variant,
            BVariant::Max => self.theorem_variant.max(self.proof_variant).max(0.0),
        }
    }
}

/// Which energy inequality the ledger is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyForm {
    /// `2α∫‖u‖_{L^{β+1}}^{β+1}` dissipation.
    PowerLaw,
    /// `2α∫‖log(e+|u|²)|u|⁴‖_{L¹}` dissipation.
    Logarithmic,
    /// Viscous dissipation only.
    Undamped,
}

impl EnergyForm {
    pub fn of(damping: &DampingSpec) -> Self {
        match damping {
            DampingSpec::None => EnergyForm::Undamped,
            DampingSpec::PowerLaw { .. } => EnergyForm::PowerLaw,
            DampingSpec::Logarithmic { .. } => EnergyForm::Logarithmic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Largest `LHS - RHS` over the ledger.
    pub max_defect: f64,
    pub worst_time: f64,
    /// Budget in force at `worst_time`.
    pub tolerance: f64,
    /// Normalisation of relative figures (`‖u⁰‖²` or `‖∂₃u⁰‖²`).
    pub scale: f64,
    /// `(t, defect)` at every ledger row.
    pub curve: Vec<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    fn from_curve(
        name: &str,
        curve: Vec<(f64, f64)>,
        scale: f64,
        budget: impl Fn(f64) -> f64,
    ) -> Self {
        let mut passed = true;
        let mut worst = (0.0, f64::NEG_INFINITY);
        for &(t, d) in &curve {
            if !(d <= budget(t)) {
                passed = false;
            }
            if d > worst.1 || d.is_nan() {
                worst = (t, d);
            }
        }
        Self {
            name: name.to_string(),
            passed,
            max_defect: worst.1,
            worst_time: worst.0,
            tolerance: budget(worst.0),
            scale,
            curve,
            note: None,
        }
    }

    /// Defect relative to the scale (0 when the scale is 0).
    pub fn relative_defect(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_defect / self.scale
        } else {
            self.max_defect
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: max defect {:.3e} ({:.3e} relative) at t = {}, tolerance {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_defect,
            self.relative_defect(),
            self.worst_time,
            self.tolerance
        )?;
        if let Some(n) = &self.note {
            write!(f, " [{n}]")?;
        }
        Ok(())
    }
}

fn budget_fn(ledger: &EnergyLedger, scale: f64, relative: Option<f64>) -> impl Fn(f64) -> f64 {
    let dt = ledger.meta().dt;
    move |t| match relative {
        Some(r) => r * scale,
        None => inequality_budget(dt, t, scale),
    }
}

/// `‖u(t)‖² + 2ν∫‖∇_h u‖² + 2α∫D(u) ≤ ‖u⁰‖²` at every row, with `D` the
/// dissipation density selected by `form`.
pub fn check_energy_inequality(
    ledger: &EnergyLedger,
    form: EnergyForm,
    relative: Option<f64>,
) -> Result<CheckReport> {
    let actual = EnergyForm::of(&ledger.meta().damping);
    if actual != form {
        return Err(Error::InvalidParameter(format!(
            "ledger was recorded with {actual:?} damping, not {form:?}"
        )));
    }
    let e0 = ledger.meta().initial_kinetic;
    let curve = ledger
        .rows()
        .iter()
        .map(|r| {
            let lhs = r.kinetic()
                + r.cumulative[cumulative::HORIZ_DISSIPATION]
                + r.cumulative[cumulative::DAMPING_DISSIPATION];
            (r.t, lhs - e0)
        })
        .collect();
    let name = match form {
        EnergyForm::PowerLaw => "energy_inequality_power_law",
        EnergyForm::Logarithmic => "energy_inequality_logarithmic",
        EnergyForm::Undamped => "energy_inequality_undamped",
    };
    Ok(CheckReport::from_curve(
        name,
        curve,
        e0,
        budget_fn(ledger, e0, relative),
    ))
}

/// Left side of the ∂₃ inequality under logarithmic damping.
fn log_dz_lhs(r: &super::ledger::LedgerRow) -> f64 {
    r.dz_kinetic()
        + r.cumulative[cumulative::DZ_DISSIPATION]
        + r.cumulative[cumulative::LOG_FRAC]
        + r.cumulative[cumulative::LOG_DZ]
        + r.cumulative[cumulative::LOG_U2_DZ]
}

/// `‖∂₃u(t)‖² + 2∫‖∇_h∂₃u‖² + α∫(three log terms) ≤ ‖∂₃u⁰‖² e^{bt}` for a
/// logarithmically damped ledger. The margin curve is the negated defect.
pub fn check_dz_inequality(
    ledger: &EnergyLedger,
    b: &BAlpha,
    variant: BVariant,
    relative: Option<f64>,
) -> Result<CheckReport> {
    let DampingSpec::Logarithmic { alpha } = ledger.meta().damping else {
        return Err(Error::InvalidParameter(
            "the dz envelope is asserted only for logarithmic damping; use power_law_dz_report"
                .into(),
        ));
    };
    if alpha != b.alpha {
        return Err(Error::InvalidParameter(format!(
            "b_alpha built for alpha = {} but the ledger has alpha = {alpha}",
            b.alpha
        )));
    }
    let rate = b.select(variant);
    let dz0 = ledger.meta().initial_dz_kinetic;
    let curve = ledger
        .rows()
        .iter()
        .map(|r| (r.t, log_dz_lhs(r) - dz0 * (rate * r.t).exp()))
        .collect();
    let mut rep =
        CheckReport::from_curve("dz_envelope", curve, dz0, budget_fn(ledger, dz0, relative));
    rep.note = Some(format!("b = {rate:.6} ({variant:?} variant)"));
    Ok(rep)
}

/// `t ↦ e^{-bt} ‖∂₃u(t)‖²` must not increase from one row to the next; the
/// defect at a row is the increase since the previous row.
pub fn decay_function_check(ledger: &EnergyLedger, b: f64, relative: Option<f64>) -> CheckReport {
    let dz0 = ledger.meta().initial_dz_kinetic;
    let rows = ledger.rows();
    let mut curve = vec![(rows[0].t, 0.0)];
    for w in rows.windows(2) {
        let f0 = (-b * w[0].t).exp() * w[0].dz_kinetic();
        let f1 = (-b * w[1].t).exp() * w[1].dz_kinetic();
        curve.push((w[1].t, f1 - f0));
    }
    let mut rep = CheckReport::from_curve(
        "decay_function",
        curve,
        dz0,
        budget_fn(ledger, dz0, relative),
    );
    rep.note = Some(format!("b = {b:.6}"));
    rep
}

/// The ∂₃ inequality in power-law mode, against each candidate right-hand
/// side. Reported, never asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawDzReport {
    pub beta: f64,
    /// `max_t (LHS - ‖∂₃u⁰‖² - candidate)` for
    /// `16∫‖|u|²∂₃|u|²‖`, `16∫‖|u|^{β-1}∂₃|u|²‖`, `8∫‖|u|²∂₃|u|²‖`.
    pub max_defect: [f64; 3],
    pub scale: f64,
}

impl PowerLawDzReport {
    pub const CANDIDATES: [&'static str; 3] = ["sixteen_u2", "sixteen_u_beta_minus_1", "eight_u2"];
}

impl fmt::Display for PowerLawDzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "REPORT dz_power_law (beta = {}):", self.beta)?;
        for (name, d) in Self::CANDIDATES.iter().zip(self.max_defect) {
            write!(f, " {name} max defect {d:.3e};")?;
        }
        Ok(())
    }
}

pub fn power_law_dz_report(ledger: &EnergyLedger) -> Result<PowerLawDzReport> {
    let DampingSpec::PowerLaw { beta, .. } = ledger.meta().damping else {
        return Err(Error::InvalidParameter(
            "ledger is not power-law damped".into(),
        ));
    };
    let dz0 = ledger.meta().initial_dz_kinetic;
    let mut max_defect = [f64::NEG_INFINITY; 3];
    for r in ledger.rows() {
        let lhs = r.dz_kinetic()
            + r.cumulative[cumulative::DZ_DISSIPATION]
            + r.cumulative[cumulative::POW_DZ_SQ]
            + r.cumulative[cumulative::POW_DZ];
        let cands = [
            r.cumulative[cumulative::CAND_SIXTEEN_U2],
            r.cumulative[cumulative::CAND_SIXTEEN_BETA],
            r.cumulative[cumulative::CAND_EIGHT_U2],
        ];
        for k in 0..3 {
            max_defect[k] = max_defect[k].max(lhs - dz0 - cands[k]);
        }
    }
    Ok(PowerLawDzReport {
        beta,
        max_defect,
        scale: dz0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::ledger::evaluate_integrands;
    use crate::field::SpectralVectorField;
    use crate::grid::Grid;

    #[test]
    fn b_alpha_variants() {
        let b = BAlpha::new(3.0).unwrap();
        assert_eq!(b.theorem_variant, 0.0);
        assert_eq!(b.proof_variant, 0.0);
        let b = BAlpha::new(1.0).unwrap();
        assert!((b.theorem_variant - (20.085_536_923_187_668 - E)).abs() < 1e-12);
        assert!((b.proof_variant - (4.481_689_070_338_065 - E)).abs() < 1e-12);
        assert_eq!(b.select(BVariant::Max), b.theorem_variant);
        let b = BAlpha::new(4.0).unwrap();
        assert!(b.theorem_variant < 0.0);
        assert_eq!(b.proof_variant, 0.0);
        assert_eq!(b.select(BVariant::Max), 0.0);
        // the proof variant crosses zero at α = 3/2
        assert!(BAlpha::new(1.5).unwrap().proof_variant.abs() < 1e-15);
        assert!(BAlpha::new(0.0).is_err());
    }

    #[test]
    fn single_row_ledger_has_zero_defect() {
        let g = Grid::cubic(8).unwrap();
        let u = SpectralVectorField::cosine_mode(&g, [1, 0, 1], [0.0, 1.0, 0.0]).unwrap();
        let l = EnergyLedger::start(
            0.0,
            0,
            &u,
            DampingSpec::logarithmic(1.0).unwrap(),
            1.0,
            1e-3,
        );
        let e = check_energy_inequality(&l, EnergyForm::Logarithmic, None).unwrap();
        assert!(e.passed);
        assert_eq!(e.max_defect, 0.0);
        let d = check_dz_inequality(&l, &BAlpha::new(1.0).unwrap(), BVariant::Max, None).unwrap();
        assert_eq!(d.max_defect, 0.0);
        assert!(check_energy_inequality(&l, EnergyForm::PowerLaw, None).is_err());
    }

    #[test]
    fn excess_energy_is_flagged() {
        let g = Grid::cubic(8).unwrap();
        let u = SpectralVectorField::cosine_mode(&g, [1, 0, 0], [0.0, 1.0, 0.0]).unwrap();
        let mut l = EnergyLedger::start(0.0, 0, &u, DampingSpec::None, 1.0, 1e-3);
        let grown = u.scaled(1.01);
        l.append_integrands(1e-3, 1, evaluate_integrands(&grown, &DampingSpec::None))
            .unwrap();
        let r = check_energy_inequality(&l, EnergyForm::Undamped, None).unwrap();
        assert!(!r.passed);
        assert_eq!(r.worst_time, 1e-3);
        assert!(r.to_string().starts_with("FAIL"));
    }

    #[test]
    fn decay_function_flags_growth() {
        let g = Grid::cubic(8).unwrap();
        let u = SpectralVectorField::cosine_mode(&g, [0, 0, 1], [1.0, 0.0, 0.0]).unwrap();
        let mut l = EnergyLedger::start(0.0, 0, &u, DampingSpec::None, 1.0, 1e-2);
        l.append_integrands(
            0.01,
            1,
            evaluate_integrands(&u.scaled(1.001), &DampingSpec::None),
        )
        .unwrap();
        assert!(!decay_function_check(&l, 0.0, None).passed);
        // e^{-bt} absorbs the growth once b is large enough
        assert!(decay_function_check(&l, 1.0, None).passed);
    }
}
