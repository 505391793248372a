//! Sweep Q, print the census CSV and the fitted growth exponents.
//!
//!     cargo run --release --example growth_sweep -- 3 25,50,100 sq

use salem_census::census::{Coordinator, RunConfig};
use salem_census::salem::parse_height;

fn main() -> salem_census::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let m: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(2);
    let qs = args.get(1).map(String::as_str).unwrap_or("10,20,30");
    let sq = args.get(2).is_some_and(|s| s == "sq");
    let qs = qs
        .split(',')
        .map(parse_height)
        .collect::<Result<Vec<_>, _>>()?;

    let coord = Coordinator::new(RunConfig::default())?;
    let (report, errors) = coord.sweep(m, &qs, sq);
    print!("{}", report.to_csv());
    for (q, e) in errors {
        eprintln!("Q = {q}: {e}");
    }
    for s in &report.slopes {
        println!(
            "{}: slope {:.3}{} vs {:.2}",
            s.column,
            s.slope,
            if s.log_corrected {
                " after dividing by log Q"
            } else {
                ""
            },
            s.expected
        );
    }
    Ok(())
}
