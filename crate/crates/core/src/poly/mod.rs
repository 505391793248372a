//! Exact integer polynomials and the numeric tools built on them.

mod hp;
mod int_poly;
mod roots;
mod sturm;
mod text;
mod trace;

pub use hp::{HpComplex, HpReal};
pub use int_poly::IntPoly;
pub use roots::{certified_real, complex_roots, refine_real_root, RootEnclosure};
pub use sturm::{roots_in_half_open, sign_at, sturm_chain, variations, Point, SturmInt};
pub use trace::{trace_inverse, trace_transform, PalindromicPoly, TracePoly};

pub(crate) use roots::{aberth_f64, cauchy_bound};
