//! Horizontal-only viscosity: a vertical shear mode keeps its amplitude,
//! while a horizontal mode decays at exactly `exp(-|ξ_h|² t)`.

use nsdamp::config::InitialCondition;
use nsdamp::dynamics::{run, NullObserver};
use nsdamp::{DampingSpec, Grid, SolverConfig};

fn main() -> nsdamp::Result<()> {
    let grid = Grid::cubic(8)?;
    let dt = 1e-3;
    let t_end = 1.0;
    let modes = [
        ("vertical (0,0,2)", [0, 0, 2], [1.0, 0.0, 0.0]),
        ("horizontal (1,2,0)", [1, 2, 0], [0.0, 0.0, 1.0]),
    ];
    for (label, k, amp) in modes {
        let ic = InitialCondition::SingleMode {
            wavevector: k,
            amplitude: amp,
        };
        let cfg = SolverConfig::new(grid.clone(), DampingSpec::None, dt, t_end, ic);
        let (_, ledger) = run(&cfg, &mut NullObserver)?;
        let kh2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        let ratio = (ledger.last().kinetic() / ledger.meta().initial_kinetic).sqrt();
        let expected = (-kh2 * t_end).exp();
        println!(
            "{label}: amplitude ratio {ratio:.15}, expected {expected:.15}, error {:.2e}",
            (ratio - expected).abs()
        );
    }
    Ok(())
}
