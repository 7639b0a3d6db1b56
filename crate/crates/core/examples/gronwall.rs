//! The integral Gronwall lemma on synthetic data: one case where it holds
//! with equality, and one where the hypothesis itself fails.

use nsdamp::diagnostics::{gronwall_envelope, GronwallInput};

fn main() -> nsdamp::Result<()> {
    let n = 1000;
    let t: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let (a, c) = (2.0, 0.7);

    let f = t.iter().map(|s| a * (c * s).exp()).collect();
    let saturating = GronwallInput::new(t.clone(), f, vec![0.0; n], vec![c; n], a)?;
    let r = gronwall_envelope(&saturating, 1e-6);
    println!("{r}");
    println!(
        "envelope at t = 1: {:.9} (A e^c = {:.9})",
        r.envelope[n - 1],
        a * c.exp()
    );

    let bad = GronwallInput::new(t, vec![3.0; n], vec![0.0; n], vec![0.0; n], a)?;
    println!("{}", gronwall_envelope(&bad, 1e-6));
    Ok(())
}
