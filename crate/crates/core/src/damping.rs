//! Zero-order absorption terms `α|u|^{β-1}u` and `α log(e+|u|²)|u|²u`.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PhysicalVectorField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DampingSpec {
    None,
    PowerLaw {
        alpha: f64,
        beta: f64,
        /// Permits `β = 3`, the case left open by the global theory.
        #[serde(default)]
        allow_beta_three: bool,
    },
    Logarithmic {
        alpha: f64,
    },
}

impl DampingSpec {
    pub fn power_law(alpha: f64, beta: f64) -> Result<Self> {
        let s = DampingSpec::PowerLaw {
            alpha,
            beta,
            allow_beta_three: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// Cubic `α|u|²u`, runnable only through this explicit constructor.
    pub fn power_law_beta_three(alpha: f64) -> Result<Self> {
        let s = DampingSpec::PowerLaw {
            alpha,
            beta: 3.0,
            allow_beta_three: true,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn logarithmic(alpha: f64) -> Result<Self> {
        let s = DampingSpec::Logarithmic { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let alpha_ok = |a: f64| {
            if a.is_finite() && a > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "damping alpha must be positive, got {a}"
                )))
            }
        };
        match *self {
            DampingSpec::None => Ok(()),
            DampingSpec::Logarithmic { alpha } => alpha_ok(alpha),
            DampingSpec::PowerLaw {
                alpha,
                beta,
                allow_beta_three,
            } => {
                alpha_ok(alpha)?;
                if (beta > 3.0 && beta.is_finite()) || (beta == 3.0 && allow_beta_three) {
                    Ok(())
                } else if beta == 3.0 {
                    Err(Error::InvalidParameter(
                        "power-law damping with beta = 3 requires allow_beta_three".into(),
                    ))
                } else {
                    Err(Error::InvalidParameter(format!(
                        "power-law damping needs beta > 3, got {beta}"
                    )))
                }
            }
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            DampingSpec::None => 0.0,
            DampingSpec::PowerLaw { alpha, .. } | DampingSpec::Logarithmic { alpha } => alpha,
        }
    }

    /// Exponent used by the power-law ledger terms; 3 outside power-law mode.
    pub fn beta(&self) -> f64 {
        match *self {
            DampingSpec::PowerLaw { beta, .. } => beta,
            _ => 3.0,
        }
    }

    pub fn is_active(&self) -> bool {
        !matches!(self, DampingSpec::None)
    }

    /// Scalar factor `a` with damping `= a(|u|²) u`, as a function of `s = |u|²`.
    #[inline]
    pub fn factor(&self, s: f64) -> f64 {
        match *self {
            DampingSpec::None => 0.0,
            DampingSpec::Logarithmic { alpha } => alpha * (E + s).ln() * s,
            DampingSpec::PowerLaw { alpha, beta, .. } => alpha * s.powf(0.5 * (beta - 1.0)),
        }
    }

    /// Dissipation density `u·damping / α`: `log(e+|u|²)|u|⁴` or `|u|^{β+1}`.
    #[inline]
    pub fn dissipation_density(&self, s: f64) -> f64 {
        match *self {
            DampingSpec::None => 0.0,
            DampingSpec::Logarithmic { .. } => (E + s).ln() * s * s,
            DampingSpec::PowerLaw { beta, .. } => s.powf(0.5 * (beta + 1.0)),
        }
    }
}

/// Pointwise damping field.
pub fn damping_term(u: &PhysicalVectorField, spec: &DampingSpec) -> PhysicalVectorField {
    let g = u.grid();
    let n = g.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for idx in 0..n {
        let a = spec.factor(u.squared_magnitude(idx));
        for c in 0..3 {
            out[c][idx] = a * u.component(c)[idx];
        }
    }
    PhysicalVectorField::new(g.clone(), out).expect("damping of a finite field is finite")
}
