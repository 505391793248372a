//! Certified complex root enclosures of Lehmer's polynomial at growing
//! precision, and the trace transform that moves its unit-circle roots
//! onto [-2, 2].

use salem_census::poly::{certified_real, complex_roots};
use salem_census::{IntPoly, PalindromicPoly};

fn main() -> salem_census::Result<()> {
    let lehmer = IntPoly::from_i64s(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
    for bits in [64, 128, 256, 512] {
        let roots = complex_roots(&lehmer, bits)?;
        let widest = roots.iter().map(|r| r.radius.to_f64()).fold(0.0, f64::max);
        let real = certified_real(&roots).iter().filter(|&&b| b).count();
        println!("{bits:>4} bits: widest radius {widest:.3e}, {real} certified real roots");
    }
    let roots = complex_roots(&lehmer, 128)?;
    for r in &roots {
        let z = r.approx();
        println!("  {:+.12} {:+.12}i   |z| = {:.12}", z.re, z.im, z.norm());
    }
    let trace = PalindromicPoly::new(lehmer)?.trace_transform();
    println!("trace polynomial: {}", trace.as_poly());
    Ok(())
}
