//! Energy inequality across power-law exponents, with the candidate ∂₃
//! bounds reported side by side.

use nsdamp::config::InitialCondition;
use nsdamp::diagnostics::{check_energy_inequality, power_law_dz_report, EnergyForm};
use nsdamp::dynamics::{run, NullObserver};
use nsdamp::{DampingSpec, Grid, SolverConfig};

fn main() -> nsdamp::Result<()> {
    let ic = InitialCondition::TaylorGreen {
        amplitude: 1.0,
        perturbation: 0.1,
    };
    for beta in [3.0, 3.5, 4.0, 5.0] {
        let damping = if beta == 3.0 {
            DampingSpec::power_law_beta_three(1.0)?
        } else {
            DampingSpec::power_law(1.0, beta)?
        };
        let cfg = SolverConfig::new(Grid::cubic(12)?, damping, 2e-3, 0.2, ic.clone());
        let (_, ledger) = run(&cfg, &mut NullObserver)?;
        let energy = check_energy_inequality(&ledger, EnergyForm::PowerLaw, Some(1e-4))?;
        println!(
            "beta = {beta}: kinetic {:.5}, {energy}",
            ledger.last().kinetic()
        );
        println!("  {}", power_law_dz_report(&ledger)?);
    }
    Ok(())
}
