//! A logarithmically damped Taylor-Green run with every ledger check.
//!
//! ```text
//! cargo run --release --example taylor_green_log -- 16 0.5
//! ```

use nsdamp::config::{BVariant, InitialCondition};
use nsdamp::diagnostics::{
    check_dz_inequality, check_energy_inequality, decay_function_check, gronwall_envelope, BAlpha,
    EnergyForm, GronwallInput,
};
use nsdamp::dynamics::{run, NullObserver};
use nsdamp::{DampingSpec, Grid, SolverConfig};

fn main() -> nsdamp::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(16, |s| s.parse().expect("grid size"));
    let t_end: f64 = args.next().map_or(0.5, |s| s.parse().expect("end time"));

    let alpha = 1.0;
    let damping = DampingSpec::logarithmic(alpha)?;
    let ic = InitialCondition::TaylorGreen {
        amplitude: 1.0,
        perturbation: 0.1,
    };
    let cfg = SolverConfig::new(Grid::cubic(n)?, damping, 2e-3, t_end, ic);
    let (state, ledger) = run(&cfg, &mut NullObserver)?;
    let last = ledger.last();
    println!(
        "t = {}: kinetic {:.6} -> {:.6}, dz kinetic {:.6} -> {:.6}",
        state.t,
        ledger.meta().initial_kinetic,
        last.kinetic(),
        ledger.meta().initial_dz_kinetic,
        last.dz_kinetic()
    );

    let tol = Some(1e-4);
    println!(
        "{}",
        check_energy_inequality(&ledger, EnergyForm::Logarithmic, tol)?
    );
    let b = BAlpha::new(alpha)?;
    println!(
        "b_alpha: theorem {:.4}, proof {:.4}",
        b.theorem_variant, b.proof_variant
    );
    println!("{}", check_dz_inequality(&ledger, &b, BVariant::Max, tol)?);
    println!(
        "{}",
        decay_function_check(&ledger, b.select(BVariant::Max), tol)
    );
    let input = GronwallInput::from_dz_ledger(&ledger, b.select(BVariant::Max))?;
    println!(
        "{}",
        gronwall_envelope(&input, 1e-4 * ledger.meta().initial_dz_kinetic)
    );
    Ok(())
}
