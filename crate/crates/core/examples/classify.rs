//! Classify a few polynomials and print their record lines.
//!
//!     cargo run --example classify -- "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"

use salem_census::{classify, Classification, IntPoly};

fn main() -> salem_census::Result<()> {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "x^2-3x+1",
            "x^4-x^3-x^2-x+1",
            "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1",
            "x^2+x+1",
            "x^4-4x^3+2x^2-4x+1",
            "x^4-3x^3+2x^2-3x+1",
            "1,-1,0,-1,1",
        ]
        .map(String::from)
        .to_vec();
    }
    for text in &inputs {
        let p = IntPoly::parse(text)?;
        match classify(&p)? {
            Classification::Salem(r) => {
                println!(
                    "{text:<36} Salem  m={}  lambda={:.20}",
                    r.m, r.lambda.center.re
                );
                println!("{:<36} record: {}", "", r.record_line());
            }
            Classification::Cyclotomic { order } => {
                println!("{text:<36} cyclotomic, order {order}")
            }
            Classification::ReducibleOrOther => println!("{text:<36} not Salem"),
        }
    }
    Ok(())
}
