//! Steiner structures `S_2[2,k,n]` generated by orbit representatives under
//! the Frobenius and cyclic-shift maps, their exhaustive certification, and
//! the designs derived from them.

use std::fmt;
use std::sync::atomic::{AtomicU8, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::candidates::{signature, CandidateError};
use crate::field::FieldSpec;
use crate::formats::StructureFile;
use crate::geometry::{Geometry, GeometryError};
use crate::subspace::{pow, Subspace, SubspaceError};

#[derive(Debug, Error)]
pub enum SteinerError {
    #[error("operation requires p = 2, field has p = {0}")]
    UnsupportedCharacteristic(u32),
    #[error("representative {index}: {source}")]
    BadRepresentative { index: usize, source: SubspaceError },
    #[error("representative {index} has dimension {dim}, expected {k}")]
    WrongDimension { index: usize, dim: u32, k: u32 },
    #[error("structure condition violated: {0}")]
    ConditionViolated(Violation),
    #[error("coverage table needs at least {needed} bytes per pass, budget is {budget}")]
    MemoryBudgetExceeded { needed: u64, budget: u64 },
    #[error("query points are not distinct")]
    PointsNotDistinct,
    #[error("point {0} is not a vector of the field")]
    PointOutOfRange(u32),
    #[error("no block contains the 2-subspace {0:?}")]
    NotCovered([u32; 3]),
    #[error("difference family validation failed: residue {residue} occurs {count} times")]
    ValidationFailed { residue: u32, count: u32 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Candidate(#[from] CandidateError),
}

/// Why a set of representatives does not satisfy the pairwise-disjoint
/// coset-complete condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotCosetComplete { index: usize },
    Overlap { first: usize, second: usize, group: u32 },
    Uncovered { groups: Vec<u32> },
    WrongCount { got: usize, expected: u64 },
    /// `(2^n − 2)` is not divisible by `(2^k − 1)(2^k − 2)·n`.
    NoIntegralCount,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotCosetComplete { index } => write!(f, "representative {index} is not coset complete"),
            Violation::Overlap { first, second, group } => {
                write!(f, "representatives {first} and {second} share group {group}")
            }
            Violation::Uncovered { groups } => write!(f, "{} groups uncovered (first {:?})", groups.len(), groups.first()),
            Violation::WrongCount { got, expected } => write!(f, "{got} representatives, expected {expected}"),
            Violation::NoIntegralCount => f.write_str("no integral representative count for these parameters"),
        }
    }
}

/// `(2^n − 2)/((2^k − 1)(2^k − 2)·n)` when integral.
pub fn required_rep_count(n: u32, k: u32) -> Option<u64> {
    let num = pow(2, n) - 2;
    let den = (pow(2, k) - 1) * (pow(2, k) - 2) * n as u64;
    (den != 0 && num % den == 0).then(|| num / den)
}

/// Gaussian binomial `[n choose 2]_2 = (2^n − 1)(2^(n−1) − 1)/3`.
pub fn two_subspace_count(n: u32) -> u64 {
    (pow(2, n) - 1) * (pow(2, n - 1) - 1) / 3
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerStructure {
    pub field: FieldSpec,
    pub k: u32,
    pub reps: Vec<Subspace>,
    /// Signature of each representative, parallel to `reps`.
    pub signatures: Vec<Vec<u32>>,
    /// Free-form origin note (solver statistics, file name, ...).
    pub provenance: String,
}

fn require_binary(geom: &Geometry) -> Result<(), SteinerError> {
    match geom.field.p() {
        2 => Ok(()),
        p => Err(SteinerError::UnsupportedCharacteristic(p)),
    }
}

/// Validate exponent lists as `k`-subspaces of the geometry's field.
pub fn parse_reps(geom: &Geometry, k: u32, lists: &[Vec<u32>]) -> Result<Vec<Subspace>, SteinerError> {
    lists
        .iter()
        .enumerate()
        .map(|(index, l)| {
            let s = Subspace::from_exponents(&geom.field, l)
                .map_err(|source| SteinerError::BadRepresentative { index, source })?;
            if s.dim() != k {
                return Err(SteinerError::WrongDimension { index, dim: s.dim(), k });
            }
            Ok(s)
        })
        .collect()
}

/// Checks the disjoint coset-complete condition, returning the signatures.
pub fn check_condition(geom: &Geometry, k: u32, reps: &[Subspace]) -> Result<Vec<Vec<u32>>, Violation> {
    let mut owner: Vec<Option<usize>> = vec![None; geom.groups.len()];
    let mut sigs = Vec::with_capacity(reps.len());
    for (i, r) in reps.iter().enumerate() {
        let sig = signature(r, &geom.cosets, &geom.groups).map_err(|_| Violation::NotCosetComplete { index: i })?;
        for &g in &sig {
            if let Some(first) = owner[g as usize] {
                return Err(Violation::Overlap { first, second: i, group: g });
            }
            owner[g as usize] = Some(i);
        }
        sigs.push(sig);
    }
    let uncovered: Vec<u32> = (0..owner.len() as u32).filter(|&g| owner[g as usize].is_none()).collect();
    if !uncovered.is_empty() {
        return Err(Violation::Uncovered { groups: uncovered });
    }
    match required_rep_count(geom.field.n(), k) {
        None => Err(Violation::NoIntegralCount),
        Some(e) if e != reps.len() as u64 => Err(Violation::WrongCount { got: reps.len(), expected: e }),
        Some(_) => Ok(sigs),
    }
}

impl SteinerStructure {
    /// Accepts `reps` only if they are pairwise disjoint coset complete with
    /// signatures covering every group, in the required number.
    pub fn assemble(
        geom: &Geometry,
        k: u32,
        reps: Vec<Subspace>,
        provenance: impl Into<String>,
    ) -> Result<Self, SteinerError> {
        require_binary(geom)?;
        for (index, r) in reps.iter().enumerate() {
            if r.dim() != k {
                return Err(SteinerError::WrongDimension { index, dim: r.dim(), k });
            }
        }
        let signatures = check_condition(geom, k, &reps).map_err(SteinerError::ConditionViolated)?;
        Ok(SteinerStructure {
            field: geom.field.spec().clone(),
            k,
            reps,
            signatures,
            provenance: provenance.into(),
        })
    }

    /// Builds the geometry for a structure file and assembles it.
    pub fn from_file(file: &StructureFile, provenance: impl Into<String>) -> Result<(Geometry, Self), SteinerError> {
        let geom = Geometry::build(file.field.clone())?;
        let reps = parse_reps(&geom, file.k, &file.reps)?;
        let s = SteinerStructure::assemble(&geom, file.k, reps, provenance)?;
        Ok((geom, s))
    }

    pub fn to_file(&self) -> StructureFile {
        StructureFile {
            field: self.field.clone(),
            k: self.k,
            reps: self.reps.iter().map(|r| r.exponents().to_vec()).collect(),
        }
    }

    /// `|reps| · n · (2^n − 1)`.
    pub fn block_count(&self) -> u64 {
        self.reps.len() as u64 * self.field.n as u64 * self.field.order()
    }

    /// Every block `Φ_j(Υ_ℓ(R))`, representative-major, then `ℓ`, then `j`.
    pub fn expand_blocks<'a>(&'a self, geom: &'a Geometry) -> impl Iterator<Item = Subspace> + 'a {
        let f = &geom.field;
        self.reps.iter().flat_map(move |r| {
            (0..f.n()).flat_map(move |l| {
                let base = r.frobenius(f, l);
                (0..f.order()).map(move |j| base.shift(f, j))
            })
        })
    }

    pub fn certify(&self, geom: &Geometry, mem_budget: u64) -> Result<CoverageReport, SteinerError> {
        certify_reps(geom, &self.reps, mem_budget)
    }

    /// Base blocks `Υ_ℓ(R)` for every representative and every `ℓ`.
    pub fn derive_difference_family(&self, geom: &Geometry) -> Result<DifferenceFamily, SteinerError> {
        let f = &geom.field;
        let blocks: Vec<Vec<u32>> = self
            .reps
            .iter()
            .flat_map(|r| (0..f.n()).map(move |l| r.frobenius(f, l).exponents().to_vec()))
            .collect();
        let df = DifferenceFamily {
            v: f.order(),
            w: (pow(2, self.k) - 1) as u32,
            lambda: 1,
            blocks,
        };
        df.validate()?;
        Ok(df)
    }

    /// Precomputes, per group, the representative and its 2-subspace in that group.
    pub fn query_index(&self, geom: &Geometry) -> BlockIndex {
        let mut by_group = vec![None; geom.groups.len()];
        for (ri, r) in self.reps.iter().enumerate() {
            for t in r.two_subspaces(&geom.field) {
                let g = geom.group_of_residue(t[1] + geom.field.order() - t[0]).expect("nonzero difference");
                by_group[g as usize] = Some((ri, t));
            }
        }
        BlockIndex {
            by_group: by_group.into_iter().map(|e| e.expect("assembled structures cover every group")).collect(),
        }
    }
}

/// Lookup table for [`SteinerStructure::block_containing`].
#[derive(Debug, Clone)]
pub struct BlockIndex {
    by_group: Vec<(usize, [u32; 3])>,
}

impl SteinerStructure {
    /// `(rep index, ℓ, j)` with `Φ_j(Υ_ℓ(rep))` the unique block containing
    /// the 2-subspace with sorted nonzero exponents `t`.
    pub fn locate(&self, geom: &Geometry, index: &BlockIndex, t: [u32; 3]) -> Result<(usize, u32, u32), SteinerError> {
        let f = &geom.field;
        let order = f.order();
        let g = geom.group_of_residue(t[1] + order - t[0]).ok_or(SteinerError::NotCovered(t))?;
        let (ri, local) = index.by_group[g as usize];
        for l in 0..f.n() {
            let img = local.map(|e| f.frobenius_exp(e, l));
            for &r in &img {
                let j = (t[0] + order - r) % order;
                let mut moved = img.map(|e| f.shift_exp(e, j));
                moved.sort_unstable();
                if moved == t {
                    return Ok((ri, l, j));
                }
            }
        }
        Err(SteinerError::NotCovered(t))
    }

    /// The block of the derived Steiner system `S(3, 2^k, 2^n)` through three
    /// distinct points of F_2^n: `x + B` where `B` is the structure block
    /// containing the span of `y + x` and `z + x`. Points ascending.
    pub fn block_containing(&self, geom: &Geometry, index: &BlockIndex, points: [u32; 3]) -> Result<Vec<u32>, SteinerError> {
        let f = &geom.field;
        let size = f.order() + 1;
        if let Some(&p) = points.iter().find(|&&p| p >= size) {
            return Err(SteinerError::PointOutOfRange(p));
        }
        let [x, y, z] = points;
        if x == y || y == z || x == z {
            return Err(SteinerError::PointsNotDistinct);
        }
        let (u, v) = (y ^ x, z ^ x);
        let mut t = [f.log(u).unwrap(), f.log(v).unwrap(), f.log(u ^ v).unwrap()];
        t.sort_unstable();
        let (ri, l, j) = self.locate(geom, index, t)?;
        let block = self.reps[ri].map(f, l, j);
        let mut out: Vec<u32> = block.vectors(f).into_iter().map(|b| b ^ x).collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// Outcome of exhaustive 2-subspace coverage counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub total_blocks: u64,
    /// 2-subspaces enumerated by the audit.
    pub total_two_subspaces: u64,
    pub covered_once: u64,
    pub uncovered: u64,
    pub overcovered: u64,
    /// First 2-subspace (sorted exponents) not covered exactly once, with its count.
    pub first_violation: Option<([u32; 3], u32)>,
    pub passes: u32,
}

impl CoverageReport {
    pub fn violations(&self) -> u64 {
        self.uncovered + self.overcovered
    }

    pub fn is_certified(&self) -> bool {
        self.violations() == 0
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certified: {}", self.is_certified())?;
        writeln!(f, "blocks: {}", self.total_blocks)?;
        writeln!(f, "two_subspaces: {}", self.total_two_subspaces)?;
        writeln!(f, "covered_once: {}", self.covered_once)?;
        writeln!(f, "uncovered: {}", self.uncovered)?;
        writeln!(f, "overcovered: {}", self.overcovered)?;
        writeln!(f, "passes: {}", self.passes)?;
        match self.first_violation {
            Some((t, c)) => writeln!(f, "first_violation: {},{},{} count {c}", t[0], t[1], t[2]),
            None => writeln!(f, "first_violation: none"),
        }
    }
}

/// Default coverage-table budget: 4 GiB.
pub const DEFAULT_MEM_BUDGET: u64 = 4 << 30;

/// Expands every representative's full orbit and counts, for every
/// 2-subspace of F_2^n, how many blocks contain it.
///
/// 2-subspaces are keyed by their two smallest nonzero exponents. The count
/// table holds one byte per key row `e1` times `2^n − 1`; if the whole table
/// exceeds `mem_budget` the key space is split into row ranges and the blocks
/// are re-expanded once per range.
pub fn certify_reps(geom: &Geometry, reps: &[Subspace], mem_budget: u64) -> Result<CoverageReport, SteinerError> {
    require_binary(geom)?;
    let f = &geom.field;
    let order = f.order() as u64;
    let n = f.n();
    if order > mem_budget {
        return Err(SteinerError::MemoryBudgetExceeded { needed: order, budget: mem_budget });
    }
    let rows_per_pass = (mem_budget / order).min(order).max(1);

    let mut report = CoverageReport {
        total_blocks: reps.len() as u64 * n as u64 * order,
        total_two_subspaces: 0,
        covered_once: 0,
        uncovered: 0,
        overcovered: 0,
        first_violation: None,
        passes: 0,
    };

    let orbit_starts: Vec<(usize, u32)> = (0..reps.len()).flat_map(|r| (0..n).map(move |l| (r, l))).collect();
    let mut lo = 0u64;
    while lo < order {
        let hi = (lo + rows_per_pass).min(order);
        let counts: Vec<AtomicU8> = (0..((hi - lo) * order) as usize).map(|_| AtomicU8::new(0)).collect();
        orbit_starts.par_iter().for_each(|&(r, l)| {
            let base = reps[r].frobenius(f, l);
            for j in 0..f.order() {
                let block = base.shift(f, j);
                for [a, b, _] in block.two_subspaces(f) {
                    let (a, b) = (a as u64, b as u64);
                    if a < lo || a >= hi {
                        continue;
                    }
                    let cell = &counts[((a - lo) * order + b) as usize];
                    let _ = cell.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |c| Some(c.saturating_add(1)));
                }
            }
        });

        // Audit every key in range: (e1, e2) is a key iff e1 < e2 < e3.
        for a in lo..hi {
            for b in a + 1..order {
                let c = f.add_exps(a as u32, b as u32).expect("distinct exponents") as u64;
                let count = counts[((a - lo) * order + b) as usize].load(Ordering::Relaxed) as u32;
                if c < b {
                    debug_assert_eq!(count, 0);
                    continue;
                }
                report.total_two_subspaces += 1;
                match count {
                    1 => report.covered_once += 1,
                    0 => report.uncovered += 1,
                    _ => report.overcovered += 1,
                }
                if count != 1 && report.first_violation.is_none() {
                    report.first_violation = Some(([a as u32, b as u32, c as u32], count));
                }
            }
        }
        report.passes += 1;
        lo = hi;
    }
    Ok(report)
}

/// Base blocks over `Z_v` in which every nonzero residue should occur exactly
/// `lambda` times as a within-block difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceFamily {
    pub v: u32,
    pub w: u32,
    pub lambda: u32,
    pub blocks: Vec<Vec<u32>>,
}

impl DifferenceFamily {
    /// Occurrences of each residue over ordered pairs of distinct block members.
    pub fn difference_counts(&self) -> Vec<u32> {
        let v = self.v;
        let mut counts = vec![0u32; v as usize];
        for b in &self.blocks {
            for &x in b {
                for &y in b {
                    if x != y {
                        counts[((x + v - y) % v) as usize] += 1;
                    }
                }
            }
        }
        counts
    }

    pub fn validate(&self) -> Result<(), SteinerError> {
        if let Some(b) = self.blocks.iter().find(|b| b.len() != self.w as usize) {
            return Err(SteinerError::ValidationFailed { residue: 0, count: b.len() as u32 });
        }
        let counts = self.difference_counts();
        match (1..self.v).find(|&d| counts[d as usize] != self.lambda) {
            Some(d) => Err(SteinerError::ValidationFailed { residue: d, count: counts[d as usize] }),
            None => Ok(()),
        }
    }
}
