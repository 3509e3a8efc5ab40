//! Exact cover by Algorithm X over a dancing-links node mesh.
//!
//! The mesh is the usual toroidal one: a root, one header per column, and one
//! node per (set, column) incidence, each linked up/down within its column and
//! left/right within its set. Covering a column unlinks it and every set that
//! meets it in O(1) per link; uncovering restores the links in reverse order.
//! The search loop is iterative, so recursion depth is never an issue.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
}

/// A universe of columns `0..universe_size` and a list of identified sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCoverInstance {
    universe_size: usize,
    sets: Vec<(u32, Vec<u32>)>,
}

impl ExactCoverInstance {
    /// Validates ids, column ranges and member distinctness. Members are sorted.
    pub fn new(universe_size: usize, sets: Vec<(u32, Vec<u32>)>) -> Result<Self, CoverError> {
        let mut ids: Vec<u32> = sets.iter().map(|s| s.0).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(CoverError::MalformedInstance(format!("duplicate set id {}", w[0])));
        }
        let mut out = Vec::with_capacity(sets.len());
        for (id, mut cols) in sets {
            if cols.is_empty() {
                return Err(CoverError::MalformedInstance(format!("set {id} is empty")));
            }
            cols.sort_unstable();
            if let Some(w) = cols.windows(2).find(|w| w[0] == w[1]) {
                return Err(CoverError::MalformedInstance(format!(
                    "set {id} lists column {} twice",
                    w[0]
                )));
            }
            if let Some(&c) = cols.iter().find(|&&c| c as usize >= universe_size) {
                return Err(CoverError::MalformedInstance(format!(
                    "set {id} has column {c} outside universe of size {universe_size}"
                )));
            }
            out.push((id, cols));
        }
        Ok(ExactCoverInstance { universe_size, sets: out })
    }

    pub(crate) fn new_unchecked(universe_size: usize, sets: Vec<(u32, Vec<u32>)>) -> Self {
        debug_assert!(ExactCoverInstance::new(universe_size, sets.clone()).is_ok());
        ExactCoverInstance { universe_size, sets }
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[(u32, Vec<u32>)] {
        &self.sets
    }

    pub fn get(&self, id: u32) -> Option<&[u32]> {
        self.sets.iter().find(|s| s.0 == id).map(|s| s.1.as_slice())
    }
}

/// Chosen set ids, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverSolution(pub Vec<u32>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    #[default]
    FirstSolution,
    /// Count every solution without retaining them.
    CountAll,
    /// Retain solutions until this many are found.
    EnumerateUpTo(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchBudget {
    pub node_limit: Option<u64>,
    pub wall_limit: Option<Duration>,
    /// Seed for shuffling the row order; `None` keeps instance order.
    pub seed: Option<u64>,
    pub mode: SearchMode,
}

impl SearchBudget {
    pub fn unlimited(mode: SearchMode) -> Self {
        SearchBudget { mode, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    /// Search-tree nodes visited.
    pub nodes: u64,
    pub max_depth: usize,
    pub solutions: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// At least one solution, and the mode's goal was reached or the tree was
    /// fully explored.
    Found(Vec<CoverSolution>),
    /// Count-all mode finished with this many solutions (at least one).
    Counted(u64),
    /// The full tree was explored and there is no solution.
    Exhausted,
    /// A limit was hit first; `partial` holds anything found before that.
    BudgetExceeded { partial: Vec<CoverSolution> },
    /// Stopped by a peer in portfolio mode.
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

const ROOT: usize = 0;

struct Mesh {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    /// Index into the instance's set list; unused for headers.
    row: Vec<usize>,
    len: Vec<usize>,
}

impl Mesh {
    fn build(instance: &ExactCoverInstance, seed: Option<u64>) -> Self {
        let cols = instance.universe_size;
        let nodes = 1 + cols + instance.sets.iter().map(|s| s.1.len()).sum::<usize>();
        let mut m = Mesh {
            left: Vec::with_capacity(nodes),
            right: Vec::with_capacity(nodes),
            up: Vec::with_capacity(nodes),
            down: Vec::with_capacity(nodes),
            col: Vec::with_capacity(nodes),
            row: Vec::with_capacity(nodes),
            len: vec![0; cols + 1],
        };
        for h in 0..=cols {
            m.left.push(if h == 0 { cols } else { h - 1 });
            m.right.push(if h == cols { 0 } else { h + 1 });
            m.up.push(h);
            m.down.push(h);
            m.col.push(h);
            m.row.push(usize::MAX);
        }

        let mut order: Vec<usize> = (0..instance.sets.len()).collect();
        if let Some(seed) = seed {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        for r in order {
            let first = m.col.len();
            let members = &instance.sets[r].1;
            for (i, &c) in members.iter().enumerate() {
                let h = c as usize + 1;
                let x = m.col.len();
                m.col.push(h);
                m.row.push(r);
                m.left.push(if i == 0 { first + members.len() - 1 } else { x - 1 });
                m.right.push(if i + 1 == members.len() { first } else { x + 1 });
                let last = m.up[h];
                m.up.push(last);
                m.down.push(h);
                m.down[last] = x;
                m.up[h] = x;
                m.len[h] += 1;
            }
        }
        m
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.len[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.len[self.col[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Uncovered column with the fewest sets, lowest index on ties.
    fn choose_column(&self) -> usize {
        let mut best = self.right[ROOT];
        let mut best_len = self.len[best];
        let mut c = self.right[best];
        while c != ROOT && best_len > 0 {
            if self.len[c] < best_len {
                best = c;
                best_len = self.len[c];
            }
            c = self.right[c];
        }
        best
    }
}

/// How often (in nodes) the clock and the cancellation flag are polled.
const POLL_INTERVAL: u64 = 1024;

fn search(
    instance: &ExactCoverInstance,
    budget: &SearchBudget,
    cancel: Option<&AtomicBool>,
) -> SolveReport {
    let start = Instant::now();
    let mut mesh = Mesh::build(instance, budget.seed);
    let mut stats = SearchStats::default();
    let mut found: Vec<CoverSolution> = Vec::new();
    // chosen[d] is the node selected at depth d
    let mut chosen: Vec<usize> = Vec::new();

    enum Stop {
        Complete,
        Budget,
        Cancelled,
    }

    let record = |chosen: &[usize], mesh: &Mesh| {
        let mut ids: Vec<u32> = chosen.iter().map(|&x| instance.sets[mesh.row[x]].0).collect();
        ids.sort_unstable();
        CoverSolution(ids)
    };

    let stop = 'search: loop {
        // Enter a node: the current partial cover is `chosen`.
        stats.nodes += 1;
        stats.max_depth = stats.max_depth.max(chosen.len());
        if stats.nodes % POLL_INTERVAL == 0 {
            if cancel.map_or(false, |c| c.load(Ordering::Relaxed)) {
                break Stop::Cancelled;
            }
            if budget.wall_limit.map_or(false, |w| start.elapsed() >= w) {
                break Stop::Budget;
            }
        }
        if budget.node_limit.map_or(false, |n| stats.nodes > n) {
            stats.nodes -= 1;
            break Stop::Budget;
        }

        let mut x;
        if mesh.right[ROOT] == ROOT {
            stats.solutions += 1;
            match budget.mode {
                SearchMode::CountAll => {}
                SearchMode::FirstSolution => {
                    found.push(record(&chosen, &mesh));
                    break Stop::Complete;
                }
                SearchMode::EnumerateUpTo(n) => {
                    found.push(record(&chosen, &mesh));
                    if found.len() as u64 >= n {
                        break Stop::Complete;
                    }
                }
            }
            // backtrack into the parent's next alternative
            match chosen.pop() {
                None => break Stop::Complete,
                Some(prev) => x = prev,
            }
        } else {
            let c = mesh.choose_column();
            mesh.cover(c);
            x = mesh.down[c];
            if x != c {
                let mut j = mesh.right[x];
                while j != x {
                    mesh.cover(mesh.col[j]);
                    j = mesh.right[j];
                }
                chosen.push(x);
                continue 'search;
            }
            mesh.uncover(c);
            match chosen.pop() {
                None => break Stop::Complete,
                Some(prev) => x = prev,
            }
        }

        // Retract `x` and advance to the next row in its column; unwind
        // further while columns run out of rows.
        loop {
            let mut j = mesh.left[x];
            while j != x {
                mesh.uncover(mesh.col[j]);
                j = mesh.left[j];
            }
            let c = mesh.col[x];
            x = mesh.down[x];
            if x != c {
                let mut j = mesh.right[x];
                while j != x {
                    mesh.cover(mesh.col[j]);
                    j = mesh.right[j];
                }
                chosen.push(x);
                continue 'search;
            }
            mesh.uncover(c);
            match chosen.pop() {
                None => break 'search Stop::Complete,
                Some(prev) => x = prev,
            }
        }
    };

    stats.elapsed = start.elapsed();
    let outcome = match stop {
        Stop::Cancelled => Outcome::Cancelled,
        Stop::Budget => Outcome::BudgetExceeded { partial: found },
        Stop::Complete => match budget.mode {
            SearchMode::CountAll if stats.solutions > 0 => Outcome::Counted(stats.solutions),
            _ if found.is_empty() => Outcome::Exhausted,
            _ => Outcome::Found(found),
        },
    };
    SolveReport { outcome, stats }
}

/// Single-threaded search. Deterministic for a fixed instance and budget
/// (apart from wall-clock limits).
pub fn solve(instance: &ExactCoverInstance, budget: &SearchBudget) -> SolveReport {
    search(instance, budget, None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortfolioReport {
    /// Worker whose report is returned in `report`.
    pub winner: usize,
    pub report: SolveReport,
    /// Final statistics of every worker, in worker order.
    pub workers: Vec<SolveReport>,
}

impl PortfolioReport {
    pub fn total_nodes(&self) -> u64 {
        self.workers.iter().map(|w| w.stats.nodes).sum()
    }
}

/// Independent seeded searches on `workers` threads. Worker `i` uses seed
/// `base + i` (worker 0 keeps the budget's seed, possibly none). The first
/// worker to find a solution cancels the rest; otherwise any conclusive
/// result (exhausted) wins over budget exhaustion. Only meaningful for
/// `FirstSolution` mode.
pub fn solve_portfolio(instance: &ExactCoverInstance, budget: &SearchBudget, workers: usize) -> PortfolioReport {
    let workers = workers.max(1);
    let cancel = AtomicBool::new(false);
    let base = budget.seed.unwrap_or(0);
    let reports: Vec<SolveReport> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|i| {
                let cancel = &cancel;
                let mut b = *budget;
                b.seed = if i == 0 { budget.seed } else { Some(base.wrapping_add(i as u64)) };
                s.spawn(move || {
                    let r = search(instance, &b, Some(cancel));
                    if matches!(r.outcome, Outcome::Found(_) | Outcome::Counted(_) | Outcome::Exhausted) {
                        cancel.store(true, Ordering::Relaxed);
                    }
                    r
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver worker panicked")).collect()
    });
    let rank = |o: &Outcome| match o {
        Outcome::Found(_) | Outcome::Counted(_) => 0,
        Outcome::Exhausted => 1,
        Outcome::BudgetExceeded { .. } => 2,
        Outcome::Cancelled => 3,
    };
    let winner = (0..reports.len()).min_by_key(|&i| (rank(&reports[i].outcome), i)).unwrap_or(0);
    PortfolioReport { winner, report: reports[winner].clone(), workers: reports }
}

/// Result of [`check_solution`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub unknown_ids: Vec<u32>,
    /// Columns covered more than once, ascending.
    pub duplicated: Vec<u32>,
    /// Columns not covered, ascending.
    pub missing: Vec<u32>,
}

impl CheckReport {
    pub fn is_valid(&self) -> bool {
        self.unknown_ids.is_empty() && self.duplicated.is_empty() && self.missing.is_empty()
    }

    pub fn first_violation(&self) -> Option<String> {
        if let Some(id) = self.unknown_ids.first() {
            return Some(format!("unknown set id {id}"));
        }
        if let Some(c) = self.duplicated.first() {
            return Some(format!("column {c} covered more than once"));
        }
        self.missing.first().map(|c| format!("column {c} not covered"))
    }
}

pub fn check_solution(instance: &ExactCoverInstance, ids: &[u32]) -> CheckReport {
    let mut counts = vec![0u32; instance.universe_size];
    let mut report = CheckReport::default();
    for &id in ids {
        match instance.get(id) {
            None => report.unknown_ids.push(id),
            Some(cols) => {
                for &c in cols {
                    counts[c as usize] += 1;
                }
            }
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        match n {
            0 => report.missing.push(c as u32),
            1 => {}
            _ => report.duplicated.push(c as u32),
        }
    }
    report
}
