use nsdamp::diagnostics::{monotonicity_check, monotonicity_inner};

fn main() -> nsdamp::Result<()> {
    let x = [1.0, -2.0, 0.5];
    let y = [0.9, -2.1, 0.7];
    println!("<d(x) - d(y), x - y> = {:.6e}", monotonicity_inner(&x, &y));

    for d in 1..=3 {
        let report = monotonicity_check(d, 100_000, 42)?;
        println!("{report}");
        for fam in &report.by_family {
            println!(
                "    {:?}: min normalized {:.3e}",
                fam.family, fam.min_normalized
            );
        }
    }
    Ok(())
}
