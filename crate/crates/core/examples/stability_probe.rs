//! Growth of the difference of two nearby trajectories, with and without
//! damping.

use nsdamp::config::InitialCondition;
use nsdamp::diagnostics::stability_probe;
use nsdamp::{DampingSpec, Grid, SolverConfig};

fn main() -> nsdamp::Result<()> {
    let ic = InitialCondition::TaylorGreen {
        amplitude: 1.0,
        perturbation: 0.1,
    };
    for damping in [DampingSpec::None, DampingSpec::logarithmic(1.0)?] {
        let cfg = SolverConfig::new(Grid::cubic(16)?, damping, 2e-3, 0.5, ic.clone());
        let report = stability_probe(&cfg, 1e-6, 9)?;
        println!("{damping:?}\n  {report}");
    }
    Ok(())
}
