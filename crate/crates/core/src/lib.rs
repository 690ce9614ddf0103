//! Latin squares with a prescribed autotopism as vertices of 0/1-polytopes.
//!
//! The crate builds the full and reduced constraint systems of the polytope
//! attached to an isotopism `Θ = (α, β, γ)`, enumerates the Latin squares that
//! admit `Θ`, and computes exact affine dimensions and rank bounds.

pub mod enumerate;
pub mod equiv;
pub mod error;
pub mod latin;
pub mod linalg;
pub mod orbit;
pub mod perm;
pub mod report;
pub mod system;

pub use enumerate::{
    count, enumerate_squares, enumerate_vertices, oracle_count, Budget, EnumerationResult, Enumerator,
};
pub use equiv::{build_equivalence, verify_equivalence, verify_reduced_equivalence, EquivalenceMap, Verdict};
pub use error::{Error, Result};
pub use latin::{
    all_latin_squares, apply_isotopism, embed, is_autotopism, unembed, BinaryVector, Isotopism,
    LatinSquare, TripleIndex,
};
pub use linalg::{
    affine_dimension, dim_report, dim_report_with, full_dimension, matrix_rank, rank_bound, DimReport,
    RankMethod, RankReport, VertexBasis,
};
pub use orbit::{
    canonical_triple, d_theta, fixed_zero_set, reduced_index_map, representative_cells,
    FixedZeroSet, ReducedIndexMap, Reduction, RepresentativeCells,
};
pub use perm::{CycleDecomposition, CycleStructure, Permutation};
pub use system::{
    full_system, lift, reduced_system, reduced_system_raw, restrict, ConstraintSystem, Coordinates,
    RowFamily, SparseMatrix, SparseRow,
};
