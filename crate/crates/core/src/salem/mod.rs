//! Salem number detection and exhaustive enumeration.

mod classify;
mod cyclotomic;
mod enumerate;
pub(crate) mod shape;

pub use classify::{
    classify, classify_with_bits, is_irreducible, lambda_at_most, parse_record_line,
    Classification, SalemRecord, DEFAULT_PRECISION_BITS, IRREDUCIBILITY_DEGREE_CAP,
};
pub use cyclotomic::{cyclotomic, cyclotomic_factor, euler_phi, orders_with_phi_at_most};
pub use enumerate::{
    coeff_box, enumerate_salem, enumerate_salem_in_box, enumerate_salem_shard, estimate_candidates,
    height, height_f64, parse_height, trace_box, CoeffBox, EnumOptions, DEFAULT_BUDGET,
};

pub(crate) use enumerate::binom;
