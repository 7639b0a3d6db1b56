use std::fs::{self, File};
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::manifest::{unix_now, RunManifest};
use super::{exit_code, load_config, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use crate::checkpoint::Checkpoint;
use crate::config::SolverConfig;
use crate::damping::DampingSpec;
use crate::diagnostics::{
    check_dz_inequality, check_energy_inequality, decay_function_check, gronwall_envelope,
    power_law_dz_report, BAlpha, CheckReport, EnergyForm, EnergyLedger, GronwallInput, LedgerRow,
};
use crate::dynamics::{Observer, Simulation, SimulationState};
use crate::error::Result;
use crate::tolerance::inequality_budget;

pub const LEDGER_FILE: &str = "ledger.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const FINAL_CHECKPOINT: &str = "final.ckpt";

/// One line of a run's check table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    /// `false` for figures that are reported but never gate the exit code.
    pub asserted: bool,
    /// Relative margin `-max_defect / scale`; negative when failing.
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub state: SimulationState,
    pub ledger: EnergyLedger,
    pub checks: Vec<CheckLine>,
    pub manifest: RunManifest,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.asserted)
    }
}

fn line(r: &CheckReport) -> CheckLine {
    CheckLine {
        name: r.name.clone(),
        passed: r.passed,
        asserted: true,
        margin: -r.relative_defect(),
        detail: r.to_string(),
    }
}

/// Runs every check enabled in `cfg.checks` that applies to its damping.
pub fn evaluate_checks(cfg: &SolverConfig, ledger: &EnergyLedger) -> Result<Vec<CheckLine>> {
    let rel = cfg.checks.relative_tolerance;
    let mut out = Vec::new();
    if cfg.checks.energy {
        out.push(line(&check_energy_inequality(
            ledger,
            EnergyForm::of(&cfg.damping),
            rel,
        )?));
    }
    if let DampingSpec::Logarithmic { alpha } = cfg.damping {
        let b = BAlpha::new(alpha)?;
        let rate = b.select(cfg.checks.b_variant);
        if cfg.checks.dz {
            out.push(line(&check_dz_inequality(
                ledger,
                &b,
                cfg.checks.b_variant,
                rel,
            )?));
            let dz0 = ledger.meta().initial_dz_kinetic;
            let tol = match rel {
                Some(r) => r * dz0,
                None => inequality_budget(cfg.dt, ledger.last().t, dz0),
            };
            let g = gronwall_envelope(&GronwallInput::from_dz_ledger(ledger, rate)?, tol);
            out.push(CheckLine {
                name: "gronwall_dz".into(),
                passed: g.passed(),
                asserted: true,
                margin: if dz0 > 0.0 {
                    -g.hypothesis_defect.max(g.conclusion_defect) / dz0
                } else {
                    -g.hypothesis_defect.max(g.conclusion_defect)
                },
                detail: g.to_string(),
            });
        }
        if cfg.checks.decay {
            out.push(line(&decay_function_check(ledger, rate, rel)));
        }
    } else if cfg.checks.dz && matches!(cfg.damping, DampingSpec::PowerLaw { .. }) {
        let r = power_law_dz_report(ledger)?;
        let worst = r
            .max_defect
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(CheckLine {
            name: "dz_power_law".into(),
            passed: true,
            asserted: false,
            margin: if r.scale > 0.0 {
                -worst / r.scale
            } else {
                -worst
            },
            detail: r.to_string(),
        });
    }
    Ok(out)
}

/// Streams ledger rows to CSV and writes periodic checkpoints.
struct DiskObserver {
    dir: PathBuf,
    csv: BufWriter<File>,
    checkpoint_every: u64,
    checkpoints: Vec<String>,
}

impl DiskObserver {
    fn create(dir: &Path, checkpoint_every: u64, existing: &[LedgerRow]) -> Result<Self> {
        let mut csv = BufWriter::new(File::create(dir.join(LEDGER_FILE))?);
        writeln!(csv, "{}", EnergyLedger::csv_header())?;
        for r in existing {
            writeln!(csv, "{}", EnergyLedger::csv_row(r))?;
        }
        Ok(Self {
            dir: dir.to_path_buf(),
            csv,
            checkpoint_every,
            checkpoints: Vec::new(),
        })
    }
}

impl Observer for DiskObserver {
    fn on_row(&mut self, row: &LedgerRow) -> Result<()> {
        writeln!(self.csv, "{}", EnergyLedger::csv_row(row))?;
        Ok(())
    }

    fn on_step(&mut self, sim: &Simulation) -> Result<()> {
        let step = sim.state().step;
        if self.checkpoint_every > 0 && step.is_multiple_of(self.checkpoint_every) {
            let name = format!("checkpoint_{step:08}.ckpt");
            sim.checkpoint().write(&self.dir.join(&name))?;
            self.checkpoints.push(name);
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.csv.flush()?;
        Ok(())
    }
}

fn drive(
    mut sim: Simulation,
    dir: &Path,
    existing: &[LedgerRow],
    status: &str,
) -> Result<RunOutcome> {
    let started = unix_now();
    fs::create_dir_all(dir)?;
    let cfg = sim.config().clone();
    fs::write(dir.join(CONFIG_FILE), cfg.to_toml_string())?;
    let mut obs = DiskObserver::create(dir, cfg.checkpoint_every, existing)?;
    let result = sim.run(&mut obs);
    let mut manifest = RunManifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(&cfg).expect("config serializes"),
        config_hash: format!("{:016x}", cfg.trajectory_hash()),
        seed: cfg.seed,
        started_unix: started,
        finished_unix: 0.0,
        status: status.to_string(),
        error: None,
        files: Vec::new(),
        checks: Vec::new(),
    };
    let mut files = vec![CONFIG_FILE.to_string(), LEDGER_FILE.to_string()];
    files.extend(obs.checkpoints.iter().cloned());
    if let Err(e) = result {
        manifest.status = "aborted".into();
        manifest.error = Some(e.to_string());
        manifest.finished_unix = unix_now();
        manifest.files = files
            .iter()
            .map(|f| RunManifest::entry(dir, f))
            .collect::<Result<_>>()?;
        manifest.write(dir)?;
        return Err(e);
    }
    sim.checkpoint().write(&dir.join(FINAL_CHECKPOINT))?;
    files.push(FINAL_CHECKPOINT.to_string());
    let checks = evaluate_checks(&cfg, sim.ledger())?;
    manifest.checks = checks
        .iter()
        .filter(|c| c.asserted)
        .map(|c| (c.name.clone(), c.passed))
        .collect();
    manifest.files = files
        .iter()
        .map(|f| RunManifest::entry(dir, f))
        .collect::<Result<_>>()?;
    manifest.finished_unix = unix_now();
    manifest.write(dir)?;
    let (state, ledger) = sim.into_parts();
    Ok(RunOutcome {
        dir: dir.to_path_buf(),
        state,
        ledger,
        checks,
        manifest,
    })
}

/// Runs `cfg` from its initial condition, writing `config.toml`,
/// `ledger.csv`, checkpoints, `final.ckpt` and `manifest.json` into `dir`.
pub fn run_to_dir(cfg: &SolverConfig, dir: &Path) -> Result<RunOutcome> {
    let sim = Simulation::new(cfg.clone())?;
    drive(sim, dir, &[], "completed")
}

/// Continues the run stored in `checkpoint` under `cfg` (whose `t_end` may
/// exceed the original). The ledger in `dir` is rewritten from the
/// checkpoint's rows and extended.
pub fn resume_run(checkpoint: &Path, cfg: &SolverConfig, dir: &Path) -> Result<RunOutcome> {
    let ck = Checkpoint::read(checkpoint)?;
    let rows = ck.rows.clone();
    let sim = Simulation::from_checkpoint(cfg.clone(), ck)?;
    drive(sim, dir, &rows, "resumed")
}

pub(crate) fn print_outcome(o: &RunOutcome) {
    let last = o.ledger.last();
    println!(
        "run finished: t = {}, step = {}, kinetic = {:.10e} (initial {:.10e})",
        last.t,
        last.step,
        last.kinetic(),
        o.ledger.meta().initial_kinetic
    );
    for c in &o.checks {
        println!("  {}", c.detail);
    }
    println!("outputs in {}", o.dir.display());
}

fn finish(result: Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) => {
            print_outcome(&o);
            if o.passed() {
                EXIT_OK
            } else {
                EXIT_NUMERICAL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn cmd_run(config: &Path, out: &Path, seed: Option<u64>) -> i32 {
    let cfg = match load_config(config, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    finish(run_to_dir(&cfg, out))
}

pub fn cmd_resume(checkpoint: &Path, config: &Path, out: &Path, seed: Option<u64>) -> i32 {
    let cfg = match load_config(config, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let code = finish(resume_run(checkpoint, &cfg, out));
    if let Some(parent) = out.parent() {
        if parent.join(super::sweep::SWEEP_FILE).exists() {
            match super::sweep::regenerate_summary(parent) {
                Ok(p) => println!("sweep summary regenerated: {}", p.display()),
                Err(e) => {
                    eprintln!("error: could not regenerate sweep summary: {e}");
                    return code.max(exit_code(&e));
                }
            }
        }
    }
    code
}
