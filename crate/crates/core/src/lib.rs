//! Equal-range tuples of isometries on sequence spaces and their joint
//! Wold decomposition into `2^n` reducing blocks.
//!
//! Operators are weighted shifts, diagonal unitaries and their tensor
//! products, compositions and direct sums, applied exactly to finitely
//! supported vectors. Subspaces are orthonormal bases on finite windows of
//! the index lattice.

mod dense;
pub mod error;
pub mod fixtures;
pub mod hypotheses;
pub mod lattice;
pub mod operator;
pub mod subspace;
pub mod vector;
pub mod verify;
pub mod wold;

pub use error::{Error, Result};
pub use hypotheses::{
    check_equal_range, check_star_equivalence, classify_commutation, compare_ranges, cyclic_range_gap, CommutationFlags,
    ConditionSummary, HypothesisReport, PowerCheck, RangeComparison, StarAgreement, Verdict, Witness, COHERENCE_FACTOR,
    DEFAULT_CAP,
};
pub use lattice::{AxisKind, Block, Bound, Lattice, LatticePoint, Window, DEFAULT_GUARD};
pub use operator::{
    image_within, kernel_of_adjoint, projection_deviation, range_of_word, range_on_window, window_norm, OperatorKind,
    StructuredOperator, WeightRule, Word,
};
pub use subspace::{
    complement_within, directed_gap, gap_with_witness, intersect, orthogonal_part, orthonormalize, principal_angle_gap,
    project, sum, Projector, SubspaceBasis, SLACK,
};
pub use vector::{SparseVector, C64};
pub use verify::{
    verify_reducing, verify_wandering_identities, IdentityCheck, IdentityKind, ReducingCheck, ReducingReport, WanderingReport,
    SAMPLED_POWERS,
};
pub use wold::{
    interior_window, permutation_probe, wold_pair, wold_single, wold_tuple, working_window, BlockReport, OperatorClass,
    Subset, TupleDecomposition, Warning, WarningKind, WoldReport, DEFAULT_MAX_POWER, MAX_OPERATORS,
};
