//! Absolutely compatible pairs of matrix contractions.
//!
//! Two elements `0 ≤ a, b ≤ 1` of a matrix algebra are absolutely compatible
//! when `|a − b| + |1 − a − b| = 1`. This crate detects the relation,
//! checks its block characterization, splits a compatible pair into trivial
//! parts and a strict core, computes the canonical form of a strict pair,
//! builds compatible pairs from commuting data, and computes the canonical
//! form of two projections in generic position for comparison.
//!
//! All checks are numerical and carry explicit [`Tolerance`]s: `tol_eig`
//! classifies eigenvalues as 0 or 1, `tol_res` bounds operator-norm defects.

pub mod canonical;
pub mod compatibility;
pub mod error;
pub mod format;
pub mod harness;
pub mod matrixcore;
pub mod projections;

pub use canonical::{
    canonical_decompose, construct_pair, generic_position_check, halmos_decompose,
    polar_decompose, reconstruct_from_canonical, CanonicalForm, GenericPairForm, PolarParts,
};
pub use compatibility::{
    check_characterization, five_block_decompose, is_abs_compatible, orthogonality_equivalence,
    CharacterizationReport, CompatibilityReport, FiveBlockDecomposition, OrthogonalityReport,
};
pub use error::{Error, Result};
pub use matrixcore::{
    abs_op, apply_spectral_function, in_unit_interval, jordan, op_norm, spectral_decompose,
    sqrt_op, CMatrix, HermitianMatrix, SpectralDecomposition, Tolerance, UnitIntervalElement,
};
pub use projections::{
    block_decompose, commutes, is_strict, meet_commuting, null_projection, one_projection,
    range_projection, BlockDecomposition, ProjectionMatrix,
};
