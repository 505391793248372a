//! The degree-8 Salem number with four square-root witnesses.

use salem_census::sqrt::{find_decompositions, verify_decomposition};
use salem_census::{classify, IntPoly};

fn main() -> salem_census::Result<()> {
    let p = IntPoly::parse("x^8-56x^7-157x^6-228x^5-247x^4-228x^3-157x^2-56x+1")?;
    let record = classify(&p)?.salem().expect("a Salem polynomial").clone();
    println!("lambda = {:.30}", record.lambda.center.re);
    let witnesses = find_decompositions(&record)?;
    println!("{} witnesses (alpha; A; B; phi):", witnesses.len());
    for d in &witnesses {
        let ok = verify_decomposition(d).is_ok();
        println!(
            "  {}  [{}]",
            d.witness_line(),
            if ok { "verified" } else { "FAILED" }
        );
    }
    // Each witness gives q(x) = A(x^2) + sqrt(alpha) x B(x^2) with q(x)q(-x) = p(x^2).
    let d = &witnesses[0];
    println!(
        "q for alpha = {}: even part {}, odd part sqrt({})*x*({})",
        d.alpha, d.a, d.alpha, d.b
    );
    Ok(())
}
