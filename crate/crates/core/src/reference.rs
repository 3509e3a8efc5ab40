//! Shipped reference data: the `S_2[2,3,13]` structure and its fields.
//!
//! The fifteen representatives are kept exactly as published. Their
//! exponents close under addition for a root of x^13 + x^12 + x^10 + x^9 + 1,
//! the reciprocal of x^13 + x^4 + x^3 + x + 1, so [`S2_3_13`] is written over
//! that root. [`S2_3_13_MIRROR`] is the same structure over a root of
//! x^13 + x^4 + x^3 + x + 1 (every exponent negated).

use crate::field::FieldSpec;
use crate::formats::{parse_field, parse_structure, StructureFile};

/// Structure file text, exponents as published.
pub const S2_3_13: &str = include_str!("../data/s2_3_13.txt");

/// Structure file text over x^13 + x^4 + x^3 + x + 1.
pub const S2_3_13_MIRROR: &str = include_str!("../data/s2_3_13_mirror.txt");

/// Field file text for GF(2^13) under x^13 + x^4 + x^3 + x + 1.
pub const GF2_13_FIELD: &str = include_str!("../data/gf2_13.field");

pub fn s2_3_13() -> StructureFile {
    parse_structure(S2_3_13).expect("shipped structure file parses")
}

pub fn s2_3_13_mirror() -> StructureFile {
    parse_structure(S2_3_13_MIRROR).expect("shipped structure file parses")
}

pub fn gf2_13_field() -> FieldSpec {
    parse_field(GF2_13_FIELD).expect("shipped field file parses")
}
