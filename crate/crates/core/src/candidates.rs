//! Grouping of cyclotomic cosets by 2-subspaces and enumeration of
//! coset-complete subspace orbits, which together form the exact-cover
//! instance whose solutions are Steiner structures.
//!
//! For `p = 2`, the six differences of a 2-subspace `{0, α^a, α^b, α^c}`
//! always land in the same six cyclotomic cosets, whatever shift or
//! Frobenius image of the subspace is taken. Those six cosets form a group,
//! and a coset-complete `k`-subspace touches `(2^k − 1)(2^(k−1) − 1)/3`
//! distinct groups: its signature.

use std::collections::{BTreeSet, HashMap};
use std::io;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::cover::ExactCoverInstance;
use crate::field::{CosetTable, FieldTables};
use crate::formats;
use crate::subspace::{canonical_exponents, pow, Subspace};

#[derive(Debug, Error)]
pub enum CandidateError {
    #[error("operation requires p = 2, field has p = {0}")]
    UnsupportedCharacteristic(u32),
    #[error("groups {first:?} and {second:?} overlap without being equal")]
    GroupCollision { first: Vec<u32>, second: Vec<u32> },
    #[error("2-subspace {triple:?} induces only {distinct} distinct coset representatives")]
    DegenerateGroup { triple: [u32; 3], distinct: usize },
    #[error("coset {0} of full size is not covered by any group")]
    Uncovered(u32),
    #[error("subspace {0} is not coset complete")]
    NotCosetComplete(String),
    #[error("dimension k = {0} is not supported here (need 2 <= k < n)")]
    BadDimension(u32),
    #[error("enumeration for k = {0} > 3 must be explicitly enabled")]
    LargeDimensionGated(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn require_binary(field: &FieldTables) -> Result<(), CandidateError> {
    if field.p() != 2 {
        return Err(CandidateError::UnsupportedCharacteristic(field.p()));
    }
    Ok(())
}

/// The 6-coset groups partitioning the full-size cyclotomic cosets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetGroupTable {
    groups: Vec<[u32; 6]>,
    group_of: HashMap<u32, u32>,
}

impl CosetGroupTable {
    pub fn build(field: &FieldTables, cosets: &CosetTable) -> Result<Self, CandidateError> {
        require_binary(field)?;
        let mut seen: BTreeSet<[u32; 6]> = BTreeSet::new();
        // Every 2-subspace is a shift of one containing α^0; Frobenius and shift
        // images give the same group, so the base subspaces {0, 1, α^a, 1 + α^a} suffice.
        for a in 1..field.order() {
            let Some(b) = field.add_exps(0, a) else { continue };
            if b < a {
                continue;
            }
            let mut g = [
                cosets.rep_of_difference(a, 0),
                cosets.rep_of_difference(0, a),
                cosets.rep_of_difference(b, 0),
                cosets.rep_of_difference(0, b),
                cosets.rep_of_difference(a, b),
                cosets.rep_of_difference(b, a),
            ];
            g.sort_unstable();
            let distinct = 1 + g.windows(2).filter(|w| w[0] != w[1]).count();
            if distinct != 6 {
                return Err(CandidateError::DegenerateGroup { triple: [0, a, b], distinct });
            }
            seen.insert(g);
        }

        let mut group_of = HashMap::new();
        let groups: Vec<[u32; 6]> = seen.into_iter().collect();
        for (idx, g) in groups.iter().enumerate() {
            for &r in g {
                if let Some(&prev) = group_of.get(&r) {
                    return Err(CandidateError::GroupCollision {
                        first: groups[prev as usize].to_vec(),
                        second: g.to_vec(),
                    });
                }
                group_of.insert(r, idx as u32);
            }
        }
        for r in cosets.representatives_of_size(field.n() as usize) {
            if !group_of.contains_key(&r) {
                return Err(CandidateError::Uncovered(r));
            }
        }
        Ok(CosetGroupTable { groups, group_of })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[[u32; 6]] {
        &self.groups
    }

    /// Group index of a coset representative.
    pub fn group_of(&self, rep: u32) -> Option<u32> {
        self.group_of.get(&rep).copied()
    }

    /// Dense lookup `residue → group index` (`u32::MAX` for residue 0).
    pub(crate) fn residue_lookup(&self, cosets: &CosetTable) -> Vec<u32> {
        (0..cosets.modulus())
            .map(|s| self.group_of(cosets.rep(s)).unwrap_or(u32::MAX))
            .collect()
    }
}

/// A canonical coset-complete orbit representative with its signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidateOrbit {
    pub rep: Subspace,
    pub signature: Vec<u32>,
}

/// Number of 2-subspaces inside a `k`-subspace over F_2.
pub fn signature_len(k: u32) -> usize {
    ((pow(2, k) - 1) * (pow(2, k - 1) - 1) / 3) as usize
}

/// The group indices covered by `ρ(Δ(X))`.
pub fn signature(
    x: &Subspace,
    cosets: &CosetTable,
    groups: &CosetGroupTable,
) -> Result<Vec<u32>, CandidateError> {
    if !x.is_coset_complete(cosets) {
        return Err(CandidateError::NotCosetComplete(x.to_string()));
    }
    let mut sig: Vec<u32> = x
        .coset_difference_set(cosets)
        .into_iter()
        .map(|r| groups.group_of(r).expect("nonzero differences lie in full-size cosets"))
        .collect();
    sig.sort_unstable();
    sig.dedup();
    Ok(sig)
}

/// Options for [`enumerate_candidates`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerateOptions {
    /// Allow `k > 3`, whose enumeration cost grows steeply.
    pub allow_large_k: bool,
}

/// Signature of the exponent list if it is coset complete, by counting
/// distinct groups over all 2-subspaces it contains.
fn fast_signature(field: &FieldTables, lookup: &[u32], elems: &[u32], want: usize) -> Option<Vec<u32>> {
    let order = field.order();
    let mut sig = Vec::with_capacity(want);
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i + 1..] {
            let c = field.add_exps(a, b)?;
            if c < b {
                continue;
            }
            let g = lookup[((b + order - a) % order) as usize];
            if sig.contains(&g) {
                return None;
            }
            sig.push(g);
        }
    }
    sig.sort_unstable();
    Some(sig)
}

/// Span of a subspace (as sorted exponents) with one more element, over F_2.
fn extend(field: &FieldTables, elems: &[u32], e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(2 * elems.len() + 1);
    out.extend_from_slice(elems);
    out.push(e);
    for &a in elems {
        if let Some(s) = field.add_exps(a, e) {
            out.push(s);
        }
    }
    out.sort_unstable();
    out
}

/// Every coset-complete `k`-subspace orbit, once, by canonical representative.
///
/// Orbits are grown level by level: a coset-complete subspace has only
/// coset-complete subspaces, and any of them can be moved onto a canonical
/// representative, so extending each canonical `(m−1)`-level representative by
/// every outside element reaches every level-`m` orbit.
pub fn enumerate_candidates(
    field: &FieldTables,
    cosets: &CosetTable,
    groups: &CosetGroupTable,
    k: u32,
    opts: EnumerateOptions,
) -> Result<Vec<CandidateOrbit>, CandidateError> {
    require_binary(field)?;
    if k < 2 || k >= field.n() {
        return Err(CandidateError::BadDimension(k));
    }
    if k > 3 && !opts.allow_large_k {
        return Err(CandidateError::LargeDimensionGated(k));
    }
    let lookup = groups.residue_lookup(cosets);
    let mut level: Vec<Vec<u32>> = vec![vec![0]];
    for m in 2..=k {
        let want = signature_len(m);
        let mut next: Vec<Vec<u32>> = level
            .par_iter()
            .flat_map_iter(|base| {
                let lookup = &lookup;
                (0..field.order())
                    .filter(move |e| base.binary_search(e).is_err())
                    .filter_map(move |e| {
                        let ext = extend(field, base, e);
                        fast_signature(field, lookup, &ext, want)?;
                        Some(canonical_exponents(field, &ext))
                    })
            })
            .collect();
        next.par_sort_unstable();
        next.dedup();
        level = next;
    }

    let mut out: Vec<CandidateOrbit> = level
        .into_iter()
        .map(|elems| {
            let signature = fast_signature(field, &lookup, &elems, signature_len(k))
                .expect("coset complete by construction");
            CandidateOrbit { rep: Subspace::from_sorted_unchecked(k, elems), signature }
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The exact-cover instance over the groups, candidate ids in list order.
pub fn to_instance(candidates: &[CandidateOrbit], groups: &CosetGroupTable) -> ExactCoverInstance {
    ExactCoverInstance::new_unchecked(
        groups.len(),
        candidates.iter().enumerate().map(|(i, c)| (i as u32, c.signature.clone())).collect(),
    )
}

pub fn export_instance(
    candidates: &[CandidateOrbit],
    groups: &CosetGroupTable,
    path: &Path,
) -> Result<(), CandidateError> {
    formats::write_file(path, &formats::instance_to_string(&to_instance(candidates, groups)))?;
    Ok(())
}

/// Edges `(i, j)`, `i < j`, between sets with disjoint signatures.
pub fn conflict_graph_edges<S: AsRef<[u32]>>(signatures: &[S]) -> Vec<(u32, u32)> {
    let masks: Vec<u128> = signatures
        .iter()
        .map(|s| s.as_ref().iter().fold(0u128, |m, &g| m | (1u128 << (g % 128))))
        .collect();
    let disjoint = |i: usize, j: usize| {
        if masks[i] & masks[j] == 0 {
            return true;
        }
        let (a, b) = (signatures[i].as_ref(), signatures[j].as_ref());
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    };
    let mut edges = Vec::new();
    for i in 0..signatures.len() {
        for j in i + 1..signatures.len() {
            if disjoint(i, j) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    edges
}

pub fn export_conflict_graph(candidates: &[CandidateOrbit], path: &Path) -> Result<(), CandidateError> {
    let sigs: Vec<&[u32]> = candidates.iter().map(|c| c.signature.as_slice()).collect();
    let edges = conflict_graph_edges(&sigs);
    formats::write_file(path, &formats::graph_to_string(candidates.len(), &edges))?;
    Ok(())
}
