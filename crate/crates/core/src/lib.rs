//! Exact census of Salem numbers and of the square-rootable ones.

pub mod census;
pub mod error;
pub mod poly;
pub mod salem;
pub mod sqrt;
pub mod theory;

pub use error::{Error, Result};
pub use poly::{IntPoly, PalindromicPoly, RootEnclosure, TracePoly};
pub use salem::{classify, Classification, EnumOptions, SalemRecord};
