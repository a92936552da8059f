//! Dense complex matrix arithmetic and spectral primitives.

pub mod cmat;
pub mod interchange;
pub mod norms;
pub mod random;
pub mod spectral;
pub mod tuple;

pub use cmat::{mat_algebra, pauli, CMat, MatOp, I, ONE, ZERO};
pub use norms::{norm_compare, pair_norm, NormComparison};
pub use random::{random_gen, RandomKind, RandomStream, SampleRng};
pub use spectral::{
    condition_number, defect_rotation, herm_eig, herm_eig_with, min_singular_value, op_norm, polar, sqrt_psd,
    sqrt_psd_scaled, unitarity_residual, DefectRotation, EigOptions, HermEig, Polar, HERM_TOL,
};
pub use tuple::{
    block2_assemble, block2_assemble_tuple, block2_extract, block2_extract_rect, commutator, direct_sum,
    tuple_commutator, Blocks, MatOrTuple, MatTuple,
};
