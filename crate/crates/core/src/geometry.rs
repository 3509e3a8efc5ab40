use crate::candidates::{CandidateError, CosetGroupTable};
use crate::field::{CosetTable, FieldError, FieldSpec, FieldTables};

/// Field tables, cyclotomic cosets and coset groups for one binary field.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub field: FieldTables,
    pub cosets: CosetTable,
    pub groups: CosetGroupTable,
    /// `residue → group index`, `u32::MAX` at 0.
    pub(crate) group_lookup: Vec<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Groups(#[from] CandidateError),
}

impl Geometry {
    pub fn build(spec: FieldSpec) -> Result<Self, GeometryError> {
        let field = FieldTables::build(spec)?;
        Ok(Geometry::from_field(field)?)
    }

    pub fn from_field(field: FieldTables) -> Result<Self, CandidateError> {
        let cosets = CosetTable::build(&field);
        let groups = CosetGroupTable::build(&field, &cosets)?;
        let group_lookup = groups.residue_lookup(&cosets);
        Ok(Geometry { field, cosets, groups, group_lookup })
    }

    /// Group index of the cyclotomic coset containing residue `d`.
    #[inline]
    pub fn group_of_residue(&self, d: u32) -> Option<u32> {
        match self.group_lookup.get((d % self.field.order()) as usize) {
            Some(&g) if g != u32::MAX => Some(g),
            _ => None,
        }
    }
}
