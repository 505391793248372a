//! Square-free Dirichlet sums against their closed forms.

use std::f64::consts::PI;

use salem_census::theory::{
    partial_sum, squarefree_harmonic, squarefree_harmonic_f64, squarefree_zeta, zeta,
};

fn main() -> salem_census::Result<()> {
    println!(
        "zeta(2) = {:.15}  (pi^2/6 = {:.15})",
        zeta(2.0)?,
        PI * PI / 6.0
    );
    println!("zeta(1.5)/zeta(3) = {:.12}", squarefree_zeta(1.5)?);
    for x in [10u64, 100, 1_000, 10_000, 100_000] {
        let s = partial_sum(2.0, x);
        println!(
            "  sum_{{n<={x}, sf}} n^-2 = {s:.10}   gap to 15/pi^2: {:.2e}",
            15.0 / (PI * PI) - s
        );
    }
    println!(
        "exact square-free harmonic sum to 10: {}",
        squarefree_harmonic(10)
    );
    for e in 3..=6 {
        let x = 10u64.pow(e);
        let h = squarefree_harmonic_f64(x);
        println!(
            "  x = 1e{e}: H_sf = {h:.6}, ratio to (6/pi^2) log x = {:.6}",
            h * PI * PI / (6.0 * (x as f64).ln())
        );
    }
    Ok(())
}
