//! Subspaces of F_p^n in exponent form, the two maps applied to whole
//! subspaces, difference sets and orbit canonicalization.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{CosetTable, Element, FieldTables};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubspaceError {
    #[error("exponent {0} is out of range for the field")]
    ExponentOutOfRange(u32),
    #[error("exponent {0} is listed more than once")]
    Duplicate(u32),
    #[error("element set is not closed under addition: {a} + {b} is missing")]
    NotClosed { a: u32, b: u32 },
    #[error("{0} nonzero elements is not p^k - 1 for any k")]
    BadSize(usize),
    #[error("empty element list")]
    Empty,
    #[error("cannot parse exponent list: {0}")]
    Parse(String),
}

/// A subspace of F_p^n, stored as the sorted exponents of its nonzero elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    dim: u32,
    elems: Vec<u32>,
}

/// `p^k`, saturating.
pub(crate) fn pow(p: u32, k: u32) -> u64 {
    (p as u64).saturating_pow(k)
}

impl Subspace {
    /// The span of the given nonzero elements. Zero generators are ignored; a
    /// rank-deficient generator list simply yields a smaller dimension.
    pub fn span(field: &FieldTables, gens: &[Element]) -> Self {
        let p = field.p();
        let mut vectors: Vec<u32> = vec![0];
        let mut members: HashSet<u32> = HashSet::from([0]);
        let mut dim = 0;
        for &g in gens {
            let g = field.to_vector(g);
            if members.contains(&g) {
                continue;
            }
            dim += 1;
            let base = vectors.clone();
            for c in 1..p {
                let cg = field.scale_vector(c, g);
                for &v in &base {
                    let w = field.add_vectors(v, cg);
                    if members.insert(w) {
                        vectors.push(w);
                    }
                }
            }
        }
        let mut elems: Vec<u32> = vectors
            .into_iter()
            .filter_map(|v| field.log(v))
            .collect();
        elems.sort_unstable();
        Subspace { dim, elems }
    }

    /// Span of `α^e` for the given exponents.
    pub fn span_exps(field: &FieldTables, exps: &[u32]) -> Self {
        let gens: Vec<Element> = exps.iter().map(|&e| field.exp(e as u64)).collect();
        Subspace::span(field, &gens)
    }

    /// Validate an explicit list of nonzero exponents as a subspace.
    pub fn from_exponents(field: &FieldTables, exps: &[u32]) -> Result<Self, SubspaceError> {
        if exps.is_empty() {
            return Err(SubspaceError::Empty);
        }
        let mut elems = exps.to_vec();
        elems.sort_unstable();
        if let Some(&e) = elems.iter().find(|&&e| e >= field.order()) {
            return Err(SubspaceError::ExponentOutOfRange(e));
        }
        if let Some(w) = elems.windows(2).find(|w| w[0] == w[1]) {
            return Err(SubspaceError::Duplicate(w[0]));
        }
        let dim = (1..=field.n())
            .find(|&k| pow(field.p(), k) - 1 == elems.len() as u64)
            .ok_or(SubspaceError::BadSize(elems.len()))?;
        // an additive subgroup of F_p^n of size p^k is a k-dimensional subspace
        for (i, &a) in elems.iter().enumerate() {
            for &b in &elems[i..] {
                if let Some(s) = field.add_exps(a, b) {
                    if elems.binary_search(&s).is_err() {
                        return Err(SubspaceError::NotClosed { a, b });
                    }
                }
            }
        }
        Ok(Subspace { dim, elems })
    }

    /// Build from exponents already known to form a subspace of dimension `dim`.
    pub(crate) fn from_sorted_unchecked(dim: u32, elems: Vec<u32>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        Subspace { dim, elems }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Sorted exponents of the nonzero elements.
    pub fn exponents(&self) -> &[u32] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains_exp(&self, e: u32) -> bool {
        self.elems.binary_search(&e).is_ok()
    }

    /// Vector forms of all `p^k` elements, including zero, ascending.
    pub fn vectors(&self, field: &FieldTables) -> Vec<u32> {
        let mut v: Vec<u32> = std::iter::once(0)
            .chain(self.elems.iter().map(|&e| field.antilog(e)))
            .collect();
        v.sort_unstable();
        v
    }

    /// Checks closure under addition and the element count.
    pub fn is_valid(&self, field: &FieldTables) -> bool {
        Subspace::from_exponents(field, &self.elems).map_or(false, |s| s.dim == self.dim)
    }

    /// `Φ_j(Υ_ℓ(X))`, elementwise `i ↦ i·p^ℓ + j`.
    pub fn map(&self, field: &FieldTables, l: u32, j: u32) -> Subspace {
        let m = field.frobenius_multiplier(l) as u64;
        let order = field.order() as u64;
        let mut elems: Vec<u32> = self
            .elems
            .iter()
            .map(|&i| ((i as u64 * m + j as u64) % order) as u32)
            .collect();
        elems.sort_unstable();
        Subspace { dim: self.dim, elems }
    }

    pub fn shift(&self, field: &FieldTables, j: u32) -> Subspace {
        self.map(field, 0, j)
    }

    pub fn frobenius(&self, field: &FieldTables, l: u32) -> Subspace {
        self.map(field, l, 0)
    }

    /// `Δ(X)`: residues `i_r − i_s` over ordered pairs of distinct nonzero elements.
    pub fn difference_set(&self, field: &FieldTables) -> Vec<u32> {
        let order = field.order();
        let mut d = Vec::with_capacity(self.elems.len() * self.elems.len());
        for &a in &self.elems {
            for &b in &self.elems {
                if a != b {
                    d.push((a + order - b) % order);
                }
            }
        }
        d.sort_unstable();
        d.dedup();
        d
    }

    /// `ρ(Δ(X))`.
    pub fn coset_difference_set(&self, cosets: &CosetTable) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.elems.len() * self.elems.len());
        for &a in &self.elems {
            for &b in &self.elems {
                if a != b {
                    d.push(cosets.rep_of_difference(a, b));
                }
            }
        }
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The no-collision size `(p^k − 1)(p^k − 2)` of a difference set.
    pub fn max_differences(p: u32, k: u32) -> u64 {
        let q = pow(p, k);
        (q - 1) * q.saturating_sub(2)
    }

    pub fn is_complete(&self, field: &FieldTables) -> bool {
        self.difference_set(field).len() as u64 == Subspace::max_differences(field.p(), self.dim)
    }

    pub fn is_coset_complete(&self, cosets: &CosetTable) -> bool {
        coset_complete(&self.elems, cosets)
    }

    /// Lexicographically smallest exponent list among all images `Φ_j(Υ_ℓ(X))`
    /// containing exponent 0.
    pub fn canonical_form(&self, field: &FieldTables) -> Subspace {
        Subspace { dim: self.dim, elems: canonical_exponents(field, &self.elems) }
    }

    /// All distinct images under the `n·(p^n − 1)` maps, sorted.
    pub fn orbit(&self, field: &FieldTables) -> Vec<Subspace> {
        let mut all = Vec::with_capacity(field.n() as usize * field.order() as usize);
        for l in 0..field.n() {
            let base = self.frobenius(field, l);
            for j in 0..field.order() {
                all.push(base.shift(field, j));
            }
        }
        all.sort_unstable();
        all.dedup();
        all
    }

    /// All 2-dimensional subspaces contained in this one (p = 2 only), each as
    /// its sorted exponent triple.
    pub fn two_subspaces(&self, field: &FieldTables) -> Vec<[u32; 3]> {
        assert_eq!(field.p(), 2, "two_subspaces is implemented for p = 2");
        let mut out = Vec::new();
        for (i, &a) in self.elems.iter().enumerate() {
            for &b in &self.elems[i + 1..] {
                if let Some(c) = field.add_exps(a, b) {
                    if c > b {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }
}

/// Coset completeness on a raw exponent list.
pub(crate) fn coset_complete(elems: &[u32], cosets: &CosetTable) -> bool {
    let mut reps = Vec::with_capacity(elems.len() * elems.len());
    for &a in elems {
        for &b in elems {
            if a != b {
                reps.push(cosets.rep_of_difference(a, b));
            }
        }
    }
    let total = reps.len();
    reps.sort_unstable();
    reps.dedup();
    reps.len() == total
}

pub(crate) fn canonical_exponents(field: &FieldTables, elems: &[u32]) -> Vec<u32> {
    let order = field.order() as u64;
    let mut best: Option<Vec<u32>> = None;
    let mut buf = Vec::with_capacity(elems.len());
    for l in 0..field.n() {
        let m = field.frobenius_multiplier(l) as u64;
        let image: Vec<u64> = elems.iter().map(|&i| i as u64 * m % order).collect();
        for &pivot in &image {
            buf.clear();
            buf.extend(image.iter().map(|&i| ((i + order - pivot) % order) as u32));
            buf.sort_unstable();
            if best.as_ref().map_or(true, |b| buf < *b) {
                best = Some(buf.clone());
            }
        }
    }
    best.unwrap_or_default()
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A comma-separated exponent list, unvalidated until paired with a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentList(pub Vec<u32>);

impl FromStr for ExponentList {
    type Err = SubspaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(SubspaceError::Empty);
        }
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| SubspaceError::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(ExponentList)
    }
}
