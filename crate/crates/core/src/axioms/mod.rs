//! Executable checks of the nc-function laws: gradedness, direct sums,
//! unitary equivalence, similarity and intertwining, plus the rotation
//! construction that turns an intertwiner into a unitary equivalence.

mod laws;
mod suite;
mod trace;

pub use laws::{
    check_direct_sums, check_intertwining, check_similarity, check_unitary_equiv, extend_by_similarity,
    intertwining_defect,
};
pub use suite::{replay, run_suite, summarize, SuiteConfig};
pub use trace::{
    intertwiner_pair_gen, intertwining_construction_trace, real_to_nc_check, rotation_equivalence_residual,
    IntertwinerPair, IntertwiningTrace, TraceStep,
};
