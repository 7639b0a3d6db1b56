//! Parameter sweeps over damping kind, `α` and `β`.
//!
//! A sweep file is an ordinary run configuration with one extra table:
//!
//! ```toml
//! [sweep]
//! kinds = ["logarithmic", "power_law"]
//! alpha = [0.5, 1.0, 2.0, 4.0]
//! beta = [3.5, 4.0, 5.0]   # power-law points only
//! ```
//!
//! Each point runs in its own sub-directory; `summary.csv` lists one row per
//! point sorted by parameters, so its bytes do not depend on completion order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::RunManifest;
use super::run::{print_outcome, run_to_dir, CheckLine, RunOutcome};
use super::{exit_code, resolve_workers, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use crate::config::SolverConfig;
use crate::damping::DampingSpec;
use crate::diagnostics::ledger::cumulative;
use crate::error::{Error, Result};

/// Copy of the sweep file kept in the sweep directory.
pub const SWEEP_FILE: &str = "sweep.toml";
pub const SUMMARY_FILE: &str = "summary.csv";
const RESULT_FILE: &str = "result.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Logarithmic,
    PowerLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub kinds: Vec<SweepKind>,
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SolverConfig,
    pub grid: SweepGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kind: SweepKind,
    pub alpha: f64,
    /// `None` for logarithmic points.
    pub beta: Option<f64>,
}

impl SweepPoint {
    pub fn damping(&self) -> Result<DampingSpec> {
        match self.kind {
            SweepKind::Logarithmic => DampingSpec::logarithmic(self.alpha),
            SweepKind::PowerLaw => {
                DampingSpec::power_law(self.alpha, self.beta.unwrap_or(f64::NAN))
            }
        }
    }

    pub fn dir_name(&self) -> String {
        match (self.kind, self.beta) {
            (SweepKind::Logarithmic, _) => format!("log_alpha{}", self.alpha),
            (SweepKind::PowerLaw, b) => {
                format!("pow_alpha{}_beta{}", self.alpha, b.unwrap_or(f64::NAN))
            }
        }
    }

    fn sort_key(&self) -> (SweepKind, f64, f64) {
        (self.kind, self.alpha, self.beta.unwrap_or(0.0))
    }
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let grid = table
            .remove("sweep")
            .ok_or_else(|| Error::Config("sweep file needs a [sweep] table".into()))?;
        let grid: SweepGrid = grid
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("sweep: {e}")))?;
        let base =
            SolverConfig::from_toml_str(&toml::to_string(&table).expect("table serializes"))?;
        let spec = Self { base, grid };
        for p in spec.points() {
            p.damping()
                .map_err(|e| Error::Config(format!("sweep point {}: {e}", p.dir_name())))?;
        }
        if spec.points().is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Points sorted by `(kind, α, β)`.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut pts = Vec::new();
        for &kind in &self.grid.kinds {
            for &alpha in &self.grid.alpha {
                match kind {
                    SweepKind::Logarithmic => pts.push(SweepPoint {
                        kind,
                        alpha,
                        beta: None,
                    }),
                    SweepKind::PowerLaw => {
                        for &b in &self.grid.beta {
                            pts.push(SweepPoint {
                                kind,
                                alpha,
                                beta: Some(b),
                            });
                        }
                    }
                }
            }
        }
        pts.sort_by(|a, b| {
            a.sort_key()
                .partial_cmp(&b.sort_key())
                .expect("finite parameters")
        });
        pts.dedup();
        pts
    }

    pub fn config_for(&self, p: &SweepPoint) -> Result<SolverConfig> {
        let mut cfg = self.base.clone();
        cfg.damping = p.damping()?;
        Ok(cfg)
    }
}

/// Per-point record stored as `result.json` in the child directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ChildResult {
    point: SweepPoint,
    status: String,
    final_kinetic: f64,
    damping_dissipation: f64,
    energy_margin: f64,
    dz_margin: f64,
    gronwall_margin: f64,
    passed: bool,
    error: Option<String>,
}

fn margin_of(checks: &[CheckLine], name_prefix: &str) -> f64 {
    checks
        .iter()
        .find(|c| c.name.starts_with(name_prefix))
        .map_or(f64::NAN, |c| c.margin)
}

fn child_result(point: &SweepPoint, outcome: &Result<RunOutcome>) -> ChildResult {
    match outcome {
        Ok(o) => {
            let last = o.ledger.last();
            ChildResult {
                point: point.clone(),
                status: "completed".into(),
                final_kinetic: last.kinetic(),
                damping_dissipation: last.cumulative[cumulative::DAMPING_DISSIPATION],
                energy_margin: margin_of(&o.checks, "energy_inequality"),
                dz_margin: margin_of(&o.checks, "dz_"),
                gronwall_margin: margin_of(&o.checks, "gronwall"),
                passed: o.passed(),
                error: None,
            }
        }
        Err(e) => ChildResult {
            point: point.clone(),
            status: "failed".into(),
            final_kinetic: f64::NAN,
            damping_dissipation: f64::NAN,
            energy_margin: f64::NAN,
            dz_margin: f64::NAN,
            gronwall_margin: f64::NAN,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

fn write_child_result(dir: &Path, r: &ChildResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join(RESULT_FILE),
        serde_json::to_string_pretty(r).expect("serializes"),
    )?;
    Ok(())
}

/// Runs every point of `spec` under `out` with `workers` threads and writes
/// the summary. Returns one `(point, outcome)` pair per point, sorted.
pub fn run_sweep(
    spec: &SweepSpec,
    spec_text: &str,
    out: &Path,
    workers: usize,
) -> Result<Vec<(SweepPoint, Result<RunOutcome>)>> {
    fs::create_dir_all(out)?;
    fs::write(out.join(SWEEP_FILE), spec_text)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    let points = spec.points();
    let results: Vec<(SweepPoint, Result<RunOutcome>)> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let dir = out.join(p.dir_name());
                let outcome = spec.config_for(p).and_then(|cfg| run_to_dir(&cfg, &dir));
                (p.clone(), outcome)
            })
            .collect()
    });
    for (p, o) in &results {
        write_child_result(&out.join(p.dir_name()), &child_result(p, o))?;
    }
    regenerate_summary(out)?;
    Ok(results)
}

/// Rebuilds `summary.csv` from the child directories of a sweep.
pub fn regenerate_summary(sweep_dir: &Path) -> Result<PathBuf> {
    let spec = SweepSpec::from_path(&sweep_dir.join(SWEEP_FILE))?;
    let mut csv = String::from(
        "kind,alpha,beta,status,final_kinetic,damping_dissipation_cum,energy_margin,dz_margin,gronwall_margin,passed\n",
    );
    for p in spec.points() {
        let dir = sweep_dir.join(p.dir_name());
        let r = refresh_child(&dir, &p)?;
        let kind = match p.kind {
            SweepKind::Logarithmic => "logarithmic",
            SweepKind::PowerLaw => "power_law",
        };
        let beta = p.beta.map_or(String::new(), |b| b.to_string());
        writeln!(
            csv,
            "{kind},{},{beta},{},{},{},{},{},{},{}",
            p.alpha,
            r.status,
            r.final_kinetic,
            r.damping_dissipation,
            r.energy_margin,
            r.dz_margin,
            r.gronwall_margin,
            r.passed
        )
        .expect("write to string");
    }
    let path = sweep_dir.join(SUMMARY_FILE);
    fs::write(&path, csv)?;
    Ok(path)
}

/// The child's stored result, refreshed from its manifest and ledger when a
/// later (e.g. resumed) run has superseded it.
fn refresh_child(dir: &Path, p: &SweepPoint) -> Result<ChildResult> {
    let stored: Option<ChildResult> = fs::read_to_string(dir.join(RESULT_FILE))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    let Ok(manifest) = RunManifest::read(dir) else {
        return Ok(
            stored.unwrap_or_else(|| child_result(p, &Err(Error::Config("no output".into()))))
        );
    };
    if manifest.status == "aborted" {
        return Ok(stored.unwrap_or_else(|| {
            child_result(
                p,
                &Err(Error::Config(manifest.error.clone().unwrap_or_default())),
            )
        }));
    }
    let ledger_text = fs::read_to_string(dir.join(super::run::LEDGER_FILE))?;
    let rows = crate::diagnostics::EnergyLedger::rows_from_csv(&ledger_text)?;
    let last = rows
        .last()
        .ok_or_else(|| Error::Config("empty ledger".into()))?;
    let cfg: SolverConfig =
        serde_json::from_value(manifest.config.clone()).map_err(|e| Error::Format {
            path: dir.join("manifest.json"),
            reason: e.to_string(),
        })?;
    let first = &rows[0];
    let meta = crate::diagnostics::ledger::LedgerMeta {
        damping: cfg.damping,
        viscosity: cfg.viscosity,
        dt: cfg.dt,
        initial_kinetic: first.kinetic(),
        initial_dz_kinetic: first.dz_kinetic(),
    };
    let ledger = crate::diagnostics::EnergyLedger::from_parts(meta, rows.clone())?;
    let checks = super::run::evaluate_checks(&cfg, &ledger)?;
    let r = ChildResult {
        point: p.clone(),
        status: manifest.status.clone(),
        final_kinetic: last.kinetic(),
        damping_dissipation: last.cumulative[cumulative::DAMPING_DISSIPATION],
        energy_margin: margin_of(&checks, "energy_inequality"),
        dz_margin: margin_of(&checks, "dz_"),
        gronwall_margin: margin_of(&checks, "gronwall"),
        passed: checks.iter().all(|c| c.passed || !c.asserted),
        error: None,
    };
    write_child_result(dir, &r)?;
    Ok(r)
}

pub fn cmd_sweep(config: &Path, out: &Path, workers: Option<usize>, seed: Option<u64>) -> i32 {
    let prepared = (|| {
        let text = fs::read_to_string(config)?;
        let mut spec = SweepSpec::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", config.display())),
            other => other,
        })?;
        let mut text = text;
        if let Some(s) = seed {
            spec.base.seed = s;
            let mut table: toml::Table = text.parse().expect("parsed above");
            table.insert("seed".into(), toml::Value::Integer(s as i64));
            text = toml::to_string(&table).expect("table serializes");
        }
        Ok::<_, Error>((spec, text, resolve_workers(workers)?))
    })();
    let (spec, text, workers) = match prepared {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let results = match run_sweep(&spec, &text, out, workers) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let mut code = EXIT_OK;
    for (p, o) in &results {
        println!("== {}", p.dir_name());
        match o {
            Ok(o) => {
                print_outcome(o);
                if !o.passed() {
                    code = code.max(EXIT_NUMERICAL);
                }
            }
            Err(e) => {
                println!("  failed: {e}");
                code = code.max(exit_code(e));
            }
        }
    }
    println!("summary: {}", out.join(SUMMARY_FILE).display());
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
dt = 0.01
t_end = 0.04

[grid]
modes = [8, 8, 8]

[ic]
kind = "taylor_green"
amplitude = 1.0

[sweep]
kinds = ["power_law", "logarithmic"]
alpha = [2.0, 1.0]
beta = [5.0, 4.0]
"#;

    #[test]
    fn points_are_sorted_and_complete() {
        let spec = SweepSpec::from_toml_str(SPEC).unwrap();
        let names: Vec<String> = spec.points().iter().map(SweepPoint::dir_name).collect();
        assert_eq!(
            names,
            [
                "log_alpha1",
                "log_alpha2",
                "pow_alpha1_beta4",
                "pow_alpha1_beta5",
                "pow_alpha2_beta4",
                "pow_alpha2_beta5"
            ]
        );
    }

    #[test]
    fn invalid_points_are_config_errors() {
        let bad = SPEC.replace("beta = [5.0, 4.0]", "beta = [2.0]");
        assert!(matches!(
            SweepSpec::from_toml_str(&bad),
            Err(Error::Config(_))
        ));
        let typo = SPEC.replace("kinds", "kind");
        assert!(SweepSpec::from_toml_str(&typo).is_err());
    }

    #[test]
    fn summary_is_independent_of_worker_count() {
        let spec = SweepSpec::from_toml_str(SPEC).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_sweep(&spec, SPEC, a.path(), 1).unwrap();
        run_sweep(&spec, SPEC, b.path(), 4).unwrap();
        let sa = fs::read(a.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(sa, fs::read(b.path().join(SUMMARY_FILE)).unwrap());
        assert_eq!(String::from_utf8(sa).unwrap().lines().count(), 7);
    }
}
