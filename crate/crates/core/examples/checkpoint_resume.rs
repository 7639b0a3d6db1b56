//! Stops a run halfway, writes a checkpoint, and shows the resumed
//! trajectory matches the uninterrupted one bit for bit.

use nsdamp::checkpoint::Checkpoint;
use nsdamp::config::InitialCondition;
use nsdamp::dynamics::{NullObserver, Simulation};
use nsdamp::{DampingSpec, Grid, SolverConfig};

fn main() -> nsdamp::Result<()> {
    let cfg = SolverConfig::new(
        Grid::cubic(8)?,
        DampingSpec::logarithmic(1.0)?,
        1e-2,
        0.2,
        InitialCondition::TaylorGreen {
            amplitude: 1.0,
            perturbation: 0.05,
        },
    );

    let mut whole = Simulation::new(cfg.clone())?;
    whole.run(&mut NullObserver)?;

    let mut first = Simulation::new(cfg.clone())?;
    for _ in 0..10 {
        first.advance_step()?;
    }
    let dir = std::env::temp_dir().join("nsdamp-example");
    std::fs::create_dir_all(&dir).map_err(nsdamp::Error::Io)?;
    let path = dir.join("halfway.ckpt");
    first.checkpoint().write(&path)?;

    let mut resumed = Simulation::from_checkpoint(cfg, Checkpoint::read(&path)?)?;
    resumed.run(&mut NullObserver)?;

    let same_state = resumed.state().u_hat == whole.state().u_hat;
    let same_ledger = resumed.ledger().to_csv() == whole.ledger().to_csv();
    println!("resumed at step 10 from {}", path.display());
    println!("final state identical: {same_state}, ledger identical: {same_ledger}");
    Ok(())
}
