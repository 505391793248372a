//! Square-rootable Salem numbers: witnesses, their search and the census.

mod census;
mod decompose;

pub use census::{
    enumerate_P_m_alpha, enumerate_sq_census, estimate_sq_candidates, group_witnesses,
    sq_census_shard, RawWitness, SqGroup,
};
pub use decompose::{
    find_decompositions, is_square_rootable, parse_witness_line, phi, phi_with_bits,
    root_of_unity_audit_orders, square_free_part, verify_decomposition, DecompositionFault,
    PmLatticePoint, SqrtDecomposition,
};
pub(crate) use decompose::{is_square_free, large_root_positive, verify_algebra};
