//! Acceptance criteria AC-1 .. AC-10. Every test prints exactly one
//! `PASS AC-n ...` or `FAIL AC-n ...` line carrying its pinned tolerance;
//! run with `--nocapture` to see them.

use std::sync::OnceLock;
use std::time::Instant;

use nsdamp::config::{BVariant, InitialCondition};
use nsdamp::diagnostics::{
    check_dz_inequality, check_energy_inequality, decay_function_check, gronwall_envelope,
    stability_probe, BAlpha, EnergyForm, EnergyLedger, GronwallInput, GronwallVerdict,
    StabilityReport,
};
use nsdamp::dynamics::{run, NullObserver};
use nsdamp::harness::{
    monotonicity_lines, oracle_lines, projector_lines, resume_run, run_to_dir, VerifyLine,
};
use nsdamp::{DampingSpec, Grid, SolverConfig};

const SEED: u64 = 20240917;

fn report(id: &str, passed: bool, detail: String, started: Instant) -> bool {
    println!(
        "{} {id} {detail} [{:.1} s]",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    passed
}

fn verify_lines(id: &str, lines: &[VerifyLine], started: Instant) -> bool {
    let worst = lines
        .iter()
        .max_by(|a, b| a.severity().total_cmp(&b.severity()))
        .expect("suite produced lines");
    let passed = lines.iter().all(VerifyLine::passed);
    let detail = format!(
        "{} checks, worst: {} = {:.3e} <= {:.0e}",
        lines.len(),
        worst.name,
        worst.value,
        worst.threshold
    );
    if !passed {
        for l in lines.iter().filter(|l| !l.passed()) {
            eprintln!("  {l}");
        }
    }
    report(id, passed, detail, started)
}

fn taylor_green(perturbation: f64) -> InitialCondition {
    InitialCondition::TaylorGreen {
        amplitude: 1.0,
        perturbation,
    }
}

fn protocol(damping: DampingSpec, dt: f64) -> SolverConfig {
    let mut cfg = SolverConfig::new(
        Grid::cubic(32).unwrap(),
        damping,
        dt,
        1.0,
        taylor_green(0.1),
    );
    cfg.seed = SEED;
    cfg
}

const ENERGY_REL: f64 = 1e-4;

/// The AC-4 trajectory at `dt = 1e-3`, shared with AC-6.
fn log_run() -> &'static EnergyLedger {
    static LEDGER: OnceLock<EnergyLedger> = OnceLock::new();
    LEDGER.get_or_init(|| {
        let cfg = protocol(DampingSpec::logarithmic(1.0).unwrap(), 1e-3);
        run(&cfg, &mut NullObserver).unwrap().1
    })
}

#[test]
fn ac01_monotonicity() {
    let t0 = Instant::now();
    let lines = monotonicity_lines(1_000_000, SEED).unwrap();
    assert!(verify_lines(
        "AC-1 monotonicity (10^6 pairs, d = 1,2,3)",
        &lines,
        t0
    ));
}

#[test]
fn ac02_projectors() {
    let t0 = Instant::now();
    let lines = projector_lines(&Grid::cubic(16).unwrap(), 1000, SEED);
    assert!(verify_lines(
        "AC-2 projectors (1000 fields, 16^3)",
        &lines,
        t0
    ));
}

#[test]
fn ac03_oracles() {
    let t0 = Instant::now();
    let lines = oracle_lines(20, SEED).unwrap();
    assert!(verify_lines(
        "AC-3 oracles (8^3, TG + 20 fields)",
        &lines,
        t0
    ));
}

#[test]
fn ac04_energy_inequality_logarithmic() {
    let t0 = Instant::now();
    let coarse =
        check_energy_inequality(log_run(), EnergyForm::Logarithmic, Some(ENERGY_REL)).unwrap();
    let cfg = protocol(DampingSpec::logarithmic(1.0).unwrap(), 5e-4);
    let (_, ledger) = run(&cfg, &mut NullObserver).unwrap();
    let fine = check_energy_inequality(&ledger, EnergyForm::Logarithmic, Some(ENERGY_REL)).unwrap();
    let ratio = coarse.max_defect / fine.max_defect;
    let passed = coarse.passed && fine.passed && (3.0..=5.0).contains(&ratio);
    let detail = format!(
        "energy inequality, log damping, 32^3: max defect {:.3e} E0 (dt = 1e-3), {:.3e} E0 (dt = 5e-4) <= {ENERGY_REL:.0e}; halving ratio {ratio:.3} in [3, 5]",
        coarse.relative_defect(),
        fine.relative_defect()
    );
    assert!(report("AC-4", passed, detail, t0));
}

#[test]
fn ac05_energy_inequality_power_law() {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    let mut passed = true;
    for beta in [3.5, 4.0, 5.0] {
        let cfg = protocol(DampingSpec::power_law(1.0, beta).unwrap(), 1e-3);
        let (_, ledger) = run(&cfg, &mut NullObserver).unwrap();
        let r = check_energy_inequality(&ledger, EnergyForm::PowerLaw, Some(ENERGY_REL)).unwrap();
        passed &= r.passed;
        parts.push(format!("beta {beta}: {:.3e}", r.relative_defect()));
    }
    let detail = format!(
        "energy inequality, power law, 32^3: max defect / E0 [{}] <= {ENERGY_REL:.0e}",
        parts.join(", ")
    );
    assert!(report("AC-5", passed, detail, t0));
}

#[test]
fn ac06_dz_envelope() {
    let t0 = Instant::now();
    let ledger = log_run();
    let b = BAlpha::new(1.0).unwrap();
    let envelope = check_dz_inequality(ledger, &b, BVariant::Max, Some(ENERGY_REL)).unwrap();
    let decay = decay_function_check(ledger, b.select(BVariant::Max), Some(ENERGY_REL));
    let passed = envelope.passed && decay.passed;
    let detail = format!(
        "dz envelope, b = {:.4}: envelope defect {:.3e}, decay-function increase {:.3e} (relative to |dz u0|^2) <= {ENERGY_REL:.0e}",
        b.select(BVariant::Max),
        envelope.relative_defect(),
        decay.relative_defect()
    );
    assert!(report("AC-6", passed, detail, t0));
}

#[test]
fn ac07_anisotropy() {
    const TOL: f64 = 1e-13;
    let t0 = Instant::now();
    let grid = Grid::cubic(8).unwrap();
    let amplitude_ratio = |k: [i64; 3], a: [f64; 3]| {
        let ic = InitialCondition::SingleMode {
            wavevector: k,
            amplitude: a,
        };
        let cfg = SolverConfig::new(grid.clone(), DampingSpec::None, 1e-3, 1.0, ic);
        assert_eq!(cfg.total_steps(), 1000);
        let (_, ledger) = run(&cfg, &mut NullObserver).unwrap();
        ledger
            .rows()
            .iter()
            .map(|r| (r.t, (r.kinetic() / ledger.meta().initial_kinetic).sqrt()))
            .collect::<Vec<_>>()
    };
    let vertical = amplitude_ratio([0, 0, 3], [1.0, -0.5, 0.0])
        .iter()
        .map(|&(_, r)| (r - 1.0).abs())
        .fold(0.0, f64::max);
    let kh2 = 5.0;
    let horizontal = amplitude_ratio([1, 2, 0], [0.0, 0.0, 1.0])
        .iter()
        .map(|&(t, r)| (r - (-kh2 * t).exp()).abs())
        .fold(0.0, f64::max);
    let passed = vertical <= TOL && horizontal <= TOL;
    let detail = format!(
        "anisotropy over 1000 steps: vertical mode amplitude drift {vertical:.2e}, horizontal decay error {horizontal:.2e} <= {TOL:.0e}"
    );
    assert!(report("AC-7", passed, detail, t0));
}

fn ratios_bounded(r: &StabilityReport) -> bool {
    r.aborted.is_none() && r.bound_holds && r.fitted_exponent.is_finite()
}

#[test]
fn ac08_stability_probe() {
    const SLACK: f64 = 1e-12;
    let t0 = Instant::now();
    let log = protocol(DampingSpec::logarithmic(1.0).unwrap(), 1e-3);
    let damped = stability_probe(&log, 1e-6, SEED).unwrap();
    let undamped = stability_probe(&protocol(DampingSpec::None, 1e-3), 1e-6, SEED).unwrap();
    let control = stability_probe(&log, 0.0, SEED).unwrap();
    let control_zero = control.w_sq.iter().all(|&w| w.to_bits() == 0);
    let ordered = damped.t == undamped.t
        && damped
            .ratio
            .iter()
            .zip(&undamped.ratio)
            .all(|(d, u)| *d <= u * (1.0 + SLACK));
    let passed = ratios_bounded(&damped) && ratios_bounded(&undamped) && control_zero && ordered;
    let detail = format!(
        "stability probe, eps = 1e-6, 32^3: fitted c' {:.4} (log) / {:.4} (none), ratio <= exp(c't) * 1.05 at every sample: {} / {}; eps = 0 gives w = 0 bitwise: {control_zero}; log ratio <= undamped ratio (slack {SLACK:.0e}): {ordered}",
        damped.fitted_exponent, undamped.fitted_exponent, damped.bound_holds, undamped.bound_holds
    );
    assert!(report("AC-8", passed, detail, t0));
}

#[test]
fn ac09_determinism_and_resume() {
    let t0 = Instant::now();
    let mut cfg = SolverConfig::new(
        Grid::cubic(16).unwrap(),
        DampingSpec::logarithmic(1.0).unwrap(),
        2e-3,
        0.1,
        taylor_green(0.1),
    );
    cfg.seed = SEED;
    cfg.checkpoint_every = 20;
    cfg.checks.relative_tolerance = Some(ENERGY_REL);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let first = run_to_dir(&cfg, a.path()).unwrap();
    run_to_dir(&cfg, b.path()).unwrap();
    let csv = |d: &std::path::Path| std::fs::read(d.join("ledger.csv")).unwrap();
    let identical = csv(a.path()) == csv(b.path());
    let resumed = resume_run(&a.path().join("checkpoint_00000020.ckpt"), &cfg, c.path()).unwrap();
    let continued = resumed.state.u_hat == first.state.u_hat && csv(c.path()) == csv(a.path());
    let passed = identical && continued;
    let detail = format!(
        "determinism: repeated run ledger bitwise identical: {identical}; resume from step 20 bitwise identical: {continued}"
    );
    assert!(report("AC-9", passed, detail, t0));
}

#[test]
fn ac10_gronwall() {
    const TOL: f64 = 1e-6;
    let t0 = Instant::now();
    let n = 1000;
    let t: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();

    let f: Vec<f64> = t.iter().map(|s| 3.0 / (1.0 + s)).collect();
    let flat = gronwall_envelope(
        &GronwallInput::new(t.clone(), f, vec![0.0; n], vec![0.0; n], 3.0).unwrap(),
        0.0,
    );
    let flat_exact = flat.passed() && flat.envelope.iter().all(|&e| e == 3.0);

    let (a, c) = (2.0, 0.7);
    let f: Vec<f64> = t.iter().map(|s| a * (c * s).exp()).collect();
    let sat = gronwall_envelope(
        &GronwallInput::new(t, f, vec![0.0; n], vec![c; n], a).unwrap(),
        TOL,
    );
    let passed =
        flat_exact && sat.verdict == GronwallVerdict::Holds && sat.conclusion_defect.abs() <= TOL;
    let detail = format!(
        "gronwall: h = 0 envelope exact: {flat_exact}; saturating case equality defect {:.3e} <= {TOL:.0e} at 1000 samples",
        sat.conclusion_defect.abs()
    );
    assert!(report("AC-10", passed, detail, t0));
}
