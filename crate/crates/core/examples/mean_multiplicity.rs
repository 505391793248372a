//! Mean-multiplicity bound reports and their approach to the limiting constant.

use salem_census::theory::{mean_mult_bound, w};

fn main() -> salem_census::Result<()> {
    println!(
        "w_m for m = 0..6: {}",
        (0..=6)
            .map(|m| w(m).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "{:>3} {:>6} {:>14} {:>14} {:>12} {:>12} {:>3}",
        "n", "L", "gamma_h", "mean_mult", "normalized", "limit", "d"
    );
    for n in 4..=10 {
        for l in [3.0, 30.0, 300.0] {
            let r = mean_mult_bound(n, l)?;
            println!(
                "{:>3} {:>6} {:>14.6e} {:>14.6e} {:>12.6} {:>12.6} {:>3}",
                n, l, r.gamma_h, r.mean_mult_lower, r.normalized, r.ratio_limit, r.delta57
            );
        }
        println!("    c'({n}) = {:.10}", mean_mult_bound(n, 1.0)?.c_prime);
    }
    Ok(())
}
