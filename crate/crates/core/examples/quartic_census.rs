//! Degree-4 censuses: all Salem numbers up to Q and the square-rootable ones,
//! checked against each other.

use salem_census::salem::{enumerate_salem, height, EnumOptions};
use salem_census::sqrt::{enumerate_sq_census, is_square_rootable};
use salem_census::theory::{predict_all_count, predict_sq_count};

fn main() -> salem_census::Result<()> {
    let q: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(30);
    let opts = EnumOptions::default();
    let all = enumerate_salem(2, &height(q), &opts)?;
    let groups = enumerate_sq_census(2, &height(q), &opts)?;
    let theory_all = predict_all_count(2, q as f64)?.value;
    let theory_sq = predict_sq_count(2, q as f64)?.upper;
    println!("Q = {q}");
    println!(
        "  all Salem:        {:>7}  (2Q^2 = {theory_all:.0}, ratio {:.3})",
        all.len(),
        all.len() as f64 / theory_all
    );
    println!(
        "  square-rootable:  {:>7}  (4/3 Q^1.5 = {theory_sq:.1}, ratio {:.3})",
        groups.len(),
        groups.len() as f64 / theory_sq
    );

    let filtered: Vec<_> = all
        .iter()
        .filter(|r| is_square_rootable(r).unwrap_or(false))
        .map(|r| r.min_poly.clone())
        .collect();
    let direct: Vec<_> = groups.iter().map(|g| g.record.min_poly.clone()).collect();
    println!("  filter of all census agrees: {}", filtered == direct);
    let most = groups.iter().map(|g| g.witnesses.len()).max().unwrap_or(0);
    println!("  most witnesses for one number: {most}");
    for g in groups.iter().take(5) {
        println!("  {}", g.record.record_line());
        for w in &g.witnesses {
            println!("      {}", w.witness_line());
        }
    }
    Ok(())
}
