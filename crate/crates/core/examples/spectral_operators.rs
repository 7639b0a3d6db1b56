//! Transforms, Leray projection, derivatives and the Friedrichs cutoff on a
//! small grid.

use std::f64::consts::PI;

use nsdamp::field::{forward_transform, inverse_transform};
use nsdamp::operators::{derivative, friedrichs_cutoff, gradient, leray_project};
use nsdamp::random::{random_scalar, substream, Band};
use nsdamp::{Grid, PhysicalVectorField};

fn main() -> nsdamp::Result<()> {
    let grid = Grid::new([16, 16, 8], [2.0 * PI, 2.0 * PI, PI])?;

    // A field with both a solenoidal and a gradient part.
    let u = PhysicalVectorField::from_fn(&grid, |[x, y, z]| {
        [
            x.sin() * y.cos() + (2.0 * z).sin(),
            -x.cos() * y.sin() + x.cos(),
            (2.0 * z).cos() * y.sin(),
        ]
    })?;
    let u_hat = forward_transform(&u);
    let p = leray_project(&u_hat);
    println!(
        "divergence before projection: {:.3e}",
        u_hat.divergence_residual()
    );
    println!(
        "divergence after projection:  {:.3e}",
        p.divergence_residual()
    );
    println!(
        "idempotence defect:           {:.3e}",
        leray_project(&p).sub(&p).l2_norm()
    );

    // Pure gradients are annihilated.
    let mut rng = substream(11, "example");
    let phi = random_scalar(&grid, Band::TwoThirds, 0.0, &mut rng);
    let grad = gradient(&grid, &phi);
    println!(
        "|P grad phi| / |grad phi|:    {:.3e}",
        leray_project(&grad).l2_norm() / grad.l2_norm()
    );

    // Derivative of sin(2z) along the short axis is 2cos(2z).
    let dz = inverse_transform(&derivative(&u_hat, 2))?;
    let expected = 2.0 * (2.0 * grid.spacing(2)).cos();
    println!(
        "d/dz u1 at z = dz: {:.12} (expected {expected:.12})",
        dz.component(0)[1]
    );

    let cut = friedrichs_cutoff(&u_hat, 1.5);
    println!(
        "energy kept by J_1.5: {:.4} of {:.4}",
        cut.l2_norm_squared(),
        u_hat.l2_norm_squared()
    );
    Ok(())
}
