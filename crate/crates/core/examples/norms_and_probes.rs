//! Sobolev, anisotropic and mixed norms, plus the empirical probes for the
//! product law and the slice interpolation inequality.

use nsdamp::field::forward_transform;
use nsdamp::norms::{
    h01_norm, interpolation_probe, ladyzhenskaya_sharp_ratio, lebesgue_norm, mixed_norm,
    product_law_probe, sobolev_norm,
};
use nsdamp::{Grid, PhysicalVectorField};

fn main() -> nsdamp::Result<()> {
    let grid = Grid::cubic(16)?;
    let f =
        PhysicalVectorField::from_fn(&grid, |[x, y, z]| [x.sin() * (2.0 * z).cos(), y.cos(), 0.0])?;
    let f_hat = forward_transform(&f);

    for p in [2.0, 4.0, f64::INFINITY] {
        println!("L^{p:<3} = {:.6}", lebesgue_norm(&f, p)?);
    }
    for s in [0.0, 0.5, 1.0] {
        println!(
            "H^{s:<3} = {:.6}   (homogeneous {:.6})",
            sobolev_norm(&f_hat, s, false)?,
            sobolev_norm(&f_hat, s, true)?
        );
    }
    println!("H^(0,1) = {:.6}", h01_norm(&f_hat));
    println!("L_v^2 L_h^4 = {:.6}", mixed_norm(&f, 2.0, 4.0)?);

    let product = product_law_probe(0.5, 0.75, 200, &grid, 5)?;
    println!(
        "product law s1 = 0.5, s2 = 0.75: ratio max {:.4} mean {:.4} over {} pairs",
        product.max, product.mean, product.samples
    );

    let interp = interpolation_probe(50, &grid, 5)?;
    println!(
        "slice interpolation: ratio max {:.4} (sharp whole-plane constant {:.4})",
        interp.max,
        ladyzhenskaya_sharp_ratio()
    );
    Ok(())
}
