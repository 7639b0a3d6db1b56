//! Run configuration, read from TOML with every key named after its field.
//!
//! ```toml
//! dt = 1e-3
//! t_end = 1.0
//! seed = 7
//!
//! [grid]
//! modes = [32, 32, 32]
//!
//! [damping]
//! kind = "logarithmic"
//! alpha = 1.0
//!
//! [ic]
//! kind = "taylor_green"
//! amplitude = 1.0
//! perturbation = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::damping::DampingSpec;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    #[default]
    TwoThirds,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Classical vortex `A(sin x cos y cos z, -cos x sin y cos z, 0)` plus an
    /// optional random divergence-free perturbation whose L² norm is the
    /// given fraction of the vortex's.
    TaylorGreen {
        amplitude: f64,
        #[serde(default)]
        perturbation: f64,
    },
    /// Projected random band-limited field rescaled to an `H^{0,1}` norm.
    /// Coefficient amplitudes scale as `|ξ|^spectrum_slope`.
    RandomDivFree {
        energy_target: f64,
        #[serde(default)]
        spectrum_slope: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// `amplitude * cos(ξ·x)` for the integer wavevector given.
    SingleMode {
        wavevector: [i64; 3],
        amplitude: [f64; 3],
    },
    /// Coefficients read from a checkpoint file.
    FromFile { path: PathBuf },
}

/// Which `b_α` reading the ∂₃ envelope uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BVariant {
    Theorem,
    Proof,
    #[default]
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    #[serde(default = "yes")]
    pub energy: bool,
    /// ∂₃ envelope; only asserted under logarithmic damping.
    #[serde(default = "yes")]
    pub dz: bool,
    #[serde(default = "yes")]
    pub decay: bool,
    #[serde(default)]
    pub b_variant: BVariant,
    /// Overrides the default `max(1e-8, 10 dt² t)` relative budget.
    #[serde(default)]
    pub relative_tolerance: Option<f64>,
}

fn yes() -> bool {
    true
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            energy: true,
            dz: true,
            decay: true,
            b_variant: BVariant::Max,
            relative_tolerance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: Grid,
    #[serde(default = "no_damping")]
    pub damping: DampingSpec,
    #[serde(default = "unit")]
    pub viscosity: f64,
    /// Required for any viscosity other than 1.
    #[serde(default)]
    pub viscosity_override: bool,
    pub dt: f64,
    pub t_end: f64,
    /// Friedrichs cutoff radius; absent means no truncation.
    #[serde(default)]
    pub cutoff_r: Option<f64>,
    #[serde(default)]
    pub dealias: Dealias,
    pub ic: InitialCondition,
    #[serde(default = "one")]
    pub output_every: u64,
    #[serde(default)]
    pub seed: u64,
    /// Write a checkpoint every this many steps (0 disables).
    #[serde(default)]
    pub checkpoint_every: u64,
    #[serde(default)]
    pub checks: Checks,
}

fn no_damping() -> DampingSpec {
    DampingSpec::None
}

fn unit() -> f64 {
    1.0
}

fn one() -> u64 {
    1
}

impl SolverConfig {
    pub fn new(
        grid: Grid,
        damping: DampingSpec,
        dt: f64,
        t_end: f64,
        ic: InitialCondition,
    ) -> Self {
        Self {
            grid,
            damping,
            viscosity: 1.0,
            viscosity_override: false,
            dt,
            t_end,
            cutoff_r: None,
            dealias: Dealias::TwoThirds,
            ic,
            output_every: 1,
            seed: 0,
            checkpoint_every: 0,
            checks: Checks::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SolverConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Static checks that do not need the initial field.
    pub fn validate(&self) -> Result<()> {
        self.damping
            .validate()
            .map_err(|e| Error::Config(format!("damping: {e}")))?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::Config(format!(
                "t_end = {} is not a whole number of steps of dt = {}",
                self.t_end, self.dt
            )));
        }
        if !(self.viscosity.is_finite() && self.viscosity > 0.0) {
            return Err(Error::Config("viscosity must be positive".into()));
        }
        if self.viscosity != 1.0 && !self.viscosity_override {
            return Err(Error::Config(
                "viscosity differs from 1; set viscosity_override = true".into(),
            ));
        }
        if let Some(r) = self.cutoff_r {
            if !(r > 0.0) {
                return Err(Error::Config(format!("cutoff_r must be positive, got {r}")));
            }
        }
        if self.output_every == 0 {
            return Err(Error::Config("output_every must be >= 1".into()));
        }
        match &self.ic {
            InitialCondition::TaylorGreen {
                amplitude,
                perturbation,
            } => {
                if !amplitude.is_finite() || !(perturbation.is_finite() && *perturbation >= 0.0) {
                    return Err(Error::Config("ic: invalid Taylor-Green parameters".into()));
                }
            }
            InitialCondition::RandomDivFree {
                energy_target,
                spectrum_slope,
                ..
            } => {
                if !(energy_target.is_finite() && *energy_target >= 0.0)
                    || !spectrum_slope.is_finite()
                {
                    return Err(Error::Config("ic: invalid random field parameters".into()));
                }
            }
            InitialCondition::SingleMode { amplitude, .. } => {
                if amplitude.iter().any(|a| !a.is_finite()) {
                    return Err(Error::Config("ic: non-finite amplitude".into()));
                }
            }
            InitialCondition::FromFile { .. } => {}
        }
        if let Some(t) = self.checks.relative_tolerance {
            if !(t >= 0.0) {
                return Err(Error::Config(
                    "checks.relative_tolerance must be >= 0".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn total_steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    /// Hash of everything that determines the trajectory up to a given step:
    /// all fields except `t_end`, `checks` and `checkpoint_every`.
    pub fn trajectory_hash(&self) -> u64 {
        let mut reduced = self.clone();
        reduced.t_end = 0.0;
        reduced.checks = Checks::default();
        reduced.checkpoint_every = 0;
        let json = serde_json::to_vec(&reduced).expect("config serializes");
        let digest = Sha256::digest(&json);
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
dt = 0.01
t_end = 0.1
seed = 3

[grid]
modes = [8, 8, 8]

[damping]
kind = "power_law"
alpha = 1.0
beta = 4.0

[ic]
kind = "taylor_green"
amplitude = 1.0
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = SolverConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.total_steps(), 10);
        assert_eq!(cfg.dealias, Dealias::TwoThirds);
        let again = SolverConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("seed = 3", "sede = 3");
        let err = SolverConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("sede"), "{err}");
        let bad_ic = SAMPLE.replace("amplitude = 1.0", "amplitude = 1.0\namplitud = 2.0");
        assert!(SolverConfig::from_toml_str(&bad_ic).is_err());
        let bad_grid = SAMPLE.replace("modes = [8, 8, 8]", "modes = [8, 8, 7]");
        assert!(SolverConfig::from_toml_str(&bad_grid).is_err());
    }

    #[test]
    fn viscosity_needs_override() {
        let bad = SAMPLE.replace("seed = 3", "seed = 3\nviscosity = 0.5");
        assert!(SolverConfig::from_toml_str(&bad).is_err());
        let ok = SAMPLE.replace(
            "seed = 3",
            "seed = 3\nviscosity = 0.5\nviscosity_override = true",
        );
        assert!(SolverConfig::from_toml_str(&ok).is_ok());
    }

    #[test]
    fn hash_ignores_horizon_but_not_grid() {
        let a = SolverConfig::from_toml_str(SAMPLE).unwrap();
        let mut b = a.clone();
        b.t_end = 5.0;
        assert_eq!(a.trajectory_hash(), b.trajectory_hash());
        let mut c = a.clone();
        c.grid = Grid::cubic(16).unwrap();
        assert_ne!(a.trajectory_hash(), c.trajectory_hash());
    }
}
