//! The fast transform and the pseudo-spectral nonlinearity compared against
//! brute-force references on an 8^3 grid.

use nsdamp::config::{Dealias, InitialCondition};
use nsdamp::dynamics::{make_initial_condition, nonlinear_term};
use nsdamp::field::{forward_transform, inverse_transform};
use nsdamp::oracle::{convolution_nonlinear, naive_dft, OracleBudget};
use nsdamp::Grid;

fn main() -> nsdamp::Result<()> {
    let grid = Grid::cubic(8)?;
    let budget = OracleBudget::default();
    let ic = InitialCondition::TaylorGreen {
        amplitude: 1.0,
        perturbation: 0.0,
    };
    let u = make_initial_condition(&ic, &grid, 0)?;

    let phys = inverse_transform(&u)?;
    let naive = naive_dft(&phys, &budget)?;
    let fast = forward_transform(&phys);
    println!(
        "FFT vs naive DFT, relative: {:.3e}",
        fast.sub(&naive).l2_norm() / naive.l2_norm()
    );

    let n = nonlinear_term(&u, Dealias::TwoThirds);
    let exact = convolution_nonlinear(&u, &budget)?;
    let mut worst: f64 = 0.0;
    for (k, v) in exact.support() {
        let Ok(idx) = nsdamp::field::mode_index(&grid, *k) else {
            continue;
        };
        if !grid.dealias_keeps(grid.position(idx)) {
            continue;
        }
        for (c, exact) in v.iter().enumerate() {
            worst = worst.max((n.component(c)[idx] - exact).norm());
        }
    }
    println!("dealiased (u.grad)u vs exact convolution: {:.3e}", worst);
    println!("energy neutrality <N(u), u> = {:.3e}", exact.pair_with(&u));
    Ok(())
}
