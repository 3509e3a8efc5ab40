//! Search and certification toolkit for q-analogs of Steiner systems.
//!
//! The pipeline for `S_2[2,k,n]`:
//!
//! 1. [`field`]: GF(2^n) tables, the Frobenius and cyclic-shift maps, and
//!    cyclotomic cosets.
//! 2. [`candidates`]: group the full-size cosets six at a time by
//!    2-subspaces and enumerate coset-complete `k`-subspace orbits with their
//!    group signatures.
//! 3. [`cover`]: pick signatures that partition the groups (exact cover).
//! 4. [`steiner`]: assemble the chosen representatives, expand their orbits,
//!    and certify that every 2-subspace lies in exactly one block. Derived
//!    designs (a cyclic difference family and blocks of `S(3, 2^k, 2^n)`) are
//!    available from an assembled structure.

pub mod candidates;
pub mod cover;
pub mod field;
pub mod formats;
pub mod geometry;
pub mod reference;
pub mod steiner;
pub mod subspace;

pub use candidates::{CandidateOrbit, CosetGroupTable};
pub use cover::{ExactCoverInstance, Outcome, SearchBudget, SearchMode};
pub use field::{CosetTable, Element, FieldSpec, FieldTables};
pub use geometry::Geometry;
pub use steiner::{CoverageReport, DifferenceFamily, SteinerStructure};
pub use subspace::Subspace;
