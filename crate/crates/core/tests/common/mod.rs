//! Independent oracles for the integration tests. Nothing here calls into the
//! library's arithmetic.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

/// Carry-less product of two `n`-bit words reduced by `poly` (bit `i` set for
/// each term `x^i`, including `x^n`).
pub fn gf2_mul(mut a: u32, mut b: u32, n: u32, poly: u32) -> u32 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> n & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

pub fn gf2_pow(a: u32, mut e: u64, n: u32, poly: u32) -> u32 {
    let (mut base, mut acc) = (a, 1);
    while e > 0 {
        if e & 1 == 1 {
            acc = gf2_mul(acc, base, n, poly);
        }
        base = gf2_mul(base, base, n, poly);
        e >>= 1;
    }
    acc
}

pub fn poly_mask(terms: &[u32]) -> u32 {
    terms.iter().fold(0, |m, &t| m | 1 << t)
}

/// Nonzero vectors of the F_2-span of `gens`, sorted.
pub fn span(gens: &[u32]) -> Vec<u32> {
    let mut s: BTreeSet<u32> = BTreeSet::from([0]);
    for &g in gens {
        let cur: Vec<u32> = s.iter().copied().collect();
        s.extend(cur.into_iter().map(|v| v ^ g));
    }
    s.remove(&0);
    s.into_iter().collect()
}

/// Every `k`-dimensional subspace of F_2^n as its sorted nonzero vectors.
pub fn all_subspaces(n: u32, k: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, k: u32, gens: &mut Vec<u32>, out: &mut BTreeSet<Vec<u32>>) {
        if gens.len() as u32 == k {
            out.insert(span(gens));
            return;
        }
        let cur = span(gens);
        // reduced echelon style: each new generator larger than the last,
        // outside the current span
        let start = gens.last().map_or(1, |&g| g + 1);
        for v in start..1u32 << n {
            if cur.binary_search(&v).is_err() {
                gens.push(v);
                rec(n, k, gens, out);
                gens.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// Gaussian binomial coefficient over F_2.
pub fn gaussian2(n: u32, k: u32) -> u64 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    (num / den) as u64
}

/// Discrete log table of a primitive element `g` (`log[v]`, `u32::MAX` at 0).
pub fn log_table(g: u32, n: u32, poly: u32) -> Vec<u32> {
    let order = (1u32 << n) - 1;
    let mut log = vec![u32::MAX; 1 << n];
    let mut x = 1;
    for i in 0..order {
        assert_eq!(log[x as usize], u32::MAX, "generator is not primitive");
        log[x as usize] = i;
        x = gf2_mul(x, g, n, poly);
    }
    log
}

/// Minimum of `{s·2^i mod m}`.
pub fn coset_min(s: u32, n: u32) -> u32 {
    let m = (1u64 << n) - 1;
    let mut best = s as u64 % m;
    let mut x = best;
    for _ in 0..n {
        x = x * 2 % m;
        best = best.min(x);
    }
    best as u32
}

/// Solutions of an exact-cover instance by trying every subfamily.
pub fn brute_force_cover_count(universe: usize, sets: &[Vec<u32>]) -> u64 {
    let full: u64 = if universe == 64 { u64::MAX } else { (1u64 << universe) - 1 };
    let masks: Vec<u64> = sets.iter().map(|s| s.iter().fold(0, |m, &c| m | 1 << c)).collect();
    let mut count = 0;
    for pick in 0u64..1 << sets.len() {
        let mut acc = 0u64;
        let mut ok = true;
        for (i, &m) in masks.iter().enumerate() {
            if pick >> i & 1 == 1 {
                if acc & m != 0 {
                    ok = false;
                    break;
                }
                acc |= m;
            }
        }
        if ok && acc == full {
            count += 1;
        }
    }
    count
}

/// How often each residue of Z_v appears as `a − b` over ordered pairs of
/// distinct members of a block.
pub fn difference_multiset(v: u32, blocks: &[Vec<u32>]) -> HashMap<u32, u32> {
    let mut counts = HashMap::new();
    for b in blocks {
        for &x in b {
            for &y in b {
                if x != y {
                    *counts.entry((x + v - y) % v).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Brute-force orbits of `k`-subspaces of GF(2^n) under `v ↦ α^j · v^(2^l)`,
/// computed by applying every map to every subspace.
pub struct OracleOrbits {
    pub subspaces: Vec<Vec<u32>>,
    /// Orbit index of each entry of `subspaces`.
    pub orbit_of: Vec<usize>,
    pub orbits: usize,
}

impl OracleOrbits {
    pub fn compute(n: u32, terms: &[u32], k: u32) -> Self {
        let poly = poly_mask(terms);
        let order = (1u64 << n) - 1;
        let subspaces = all_subspaces(n, k);
        let index: HashMap<&[u32], usize> =
            subspaces.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut orbit_of = vec![usize::MAX; subspaces.len()];
        let mut orbits = 0;
        let mut img = Vec::new();
        for start in 0..subspaces.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            for l in 0..n {
                for j in 0..order {
                    let aj = gf2_pow(2, j, n, poly);
                    img.clear();
                    img.extend(subspaces[start].iter().map(|&v| gf2_mul(aj, gf2_pow(v, 1 << l, n, poly), n, poly)));
                    img.sort_unstable();
                    let t = index[img.as_slice()];
                    assert!(orbit_of[t] == usize::MAX || orbit_of[t] == orbits);
                    orbit_of[t] = orbits;
                }
            }
            orbits += 1;
        }
        OracleOrbits { subspaces, orbit_of, orbits }
    }

    pub fn find(&self, vectors: &[u32]) -> Option<usize> {
        self.subspaces.binary_search_by(|s| s.as_slice().cmp(vectors)).ok()
    }
}

/// Coset completeness from the definition: all `(2^k−1)(2^k−2)` ordered
/// differences of exponents lie in distinct cyclotomic cosets.
pub fn oracle_coset_complete(vectors: &[u32], log: &[u32], n: u32) -> bool {
    let m = (1u32 << n) - 1;
    let exps: Vec<u32> = vectors.iter().map(|&v| log[v as usize]).collect();
    let mut seen = BTreeSet::new();
    for &a in &exps {
        for &b in &exps {
            if a != b && !seen.insert(coset_min((a + m - b) % m, n)) {
                return false;
            }
        }
    }
    true
}
