//! `qsteiner`: build fields and coset groups, enumerate candidate orbits,
//! solve the exact cover, and certify or query Steiner structures.
//!
//! Primary results go to stdout; progress goes to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qsteiner::candidates::{self, enumerate_candidates, EnumerateOptions};
use qsteiner::cover::{self, CoverSolution, Outcome, SearchBudget, SearchMode, SolveReport};
use qsteiner::formats::{self, CandidatesFile, DifferenceFamilyFile, SolutionFile, StructureFile};
use qsteiner::steiner::{self, SteinerStructure};
use qsteiner::{reference, CosetGroupTable, CosetTable, CoverageReport, FieldSpec, FieldTables, Geometry};

const EXIT_EXHAUSTED: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_NOT_CERTIFIED: u8 = 5;

/// Row-order seed used by `repro-s2-3-13` unless `--seed` is given; with it a
/// single worker finds a cover after about 2·10^7 nodes.
const REPRO_SEED: u64 = 6;

#[derive(Parser, Debug)]
#[command(name = "qsteiner", version, about = "Search and certification of q-analog Steiner structures")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Field file (`p`, `n`, `poly`); defaults to GF(2^13) mod x^13+x^4+x^3+x+1.
    #[arg(long, global = true, env = "QSTEINER_FIELD")]
    field: Option<PathBuf>,
    /// Subspace dimension.
    #[arg(long, global = true, env = "QSTEINER_K", default_value_t = 3)]
    k: u32,
    /// Search-tree node limit for the solver.
    #[arg(long, global = true, env = "QSTEINER_BUDGET_NODES")]
    budget_nodes: Option<u64>,
    /// Wall-clock limit for the solver, in seconds.
    #[arg(long, global = true, env = "QSTEINER_BUDGET_SECS")]
    budget_secs: Option<u64>,
    /// Seed for randomized row order; unset keeps instance order.
    #[arg(long, global = true, env = "QSTEINER_SEED")]
    seed: Option<u64>,
    /// Worker threads (portfolio solving, enumeration, certification).
    #[arg(long, global = true, env = "QSTEINER_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Memory budget for the certification table, in GiB.
    #[arg(long, global = true, env = "QSTEINER_MEM_GIB", default_value_t = 4)]
    mem_gib: u64,
    /// Output file (or directory for `repro-s2-3-13`).
    #[arg(long, global = true, env = "QSTEINER_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the field tables and print their parameters.
    FieldInfo,
    /// Partition the full-size cyclotomic cosets into groups of six.
    Groups,
    /// Enumerate coset-complete orbit representatives and write the cover instance.
    Candidates {
        /// Also write the representatives (needed by `assemble`).
        #[arg(long)]
        reps: Option<PathBuf>,
        /// Permit k > 3.
        #[arg(long)]
        allow_large_k: bool,
    },
    /// Solve an exact-cover instance file.
    Solve {
        instance: PathBuf,
        /// first | count | up-to:<N>
        #[arg(long, default_value = "first", value_parser = parse_mode)]
        mode: SearchMode,
    },
    /// Turn a candidates file and a solution file into a structure file.
    Assemble {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Exhaustively certify a structure file (defaults to the shipped S_2[2,3,13]).
    Verify { structure: Option<PathBuf> },
    /// Derive the (2^n-1, 2^k-1, 1) difference family of a structure.
    DeriveDf { structure: Option<PathBuf> },
    /// Block of S(3, 2^k, 2^n) through three points (vector forms, e.g. 0,1,2).
    QueryBlock {
        #[arg(long, value_parser = parse_points)]
        points: [u32; 3],
        #[arg(long)]
        structure: Option<PathBuf>,
    },
    /// Write the disjointness graph of an instance file in DIMACS edge format.
    ExportGraph { instance: PathBuf },
    /// groups -> candidates -> solve -> assemble -> verify for S_2[2,3,13].
    #[command(name = "repro-s2-3-13")]
    ReproS2313,
}

fn parse_mode(s: &str) -> Result<SearchMode, String> {
    match s {
        "first" => Ok(SearchMode::FirstSolution),
        "count" => Ok(SearchMode::CountAll),
        _ => s
            .strip_prefix("up-to:")
            .and_then(|n| n.parse().ok())
            .filter(|&n| n > 0)
            .map(SearchMode::EnumerateUpTo)
            .ok_or_else(|| format!("expected first, count or up-to:<N>, got {s:?}")),
    }
}

fn parse_points(s: &str) -> Result<[u32; 3], String> {
    let v: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<u32>| format!("expected three points, got {}", v.len()))
}

impl GlobalOpts {
    fn field_spec(&self) -> Result<FieldSpec> {
        match &self.field {
            None => Ok(reference::gf2_13_field()),
            Some(p) => Ok(formats::parse_field(&read(p)?).with_context(|| format!("--field {}", p.display()))?),
        }
    }

    fn geometry(&self) -> Result<Geometry> {
        let spec = self.field_spec()?;
        Ok(Geometry::build(spec)?)
    }

    fn budget(&self, mode: SearchMode) -> SearchBudget {
        SearchBudget {
            node_limit: self.budget_nodes,
            wall_limit: self.budget_secs.map(Duration::from_secs),
            seed: self.seed,
            mode,
        }
    }

    fn mem_budget(&self) -> u64 {
        self.mem_gib.saturating_mul(1 << 30)
    }

    fn require_out(&self, what: &str) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| anyhow!("--out is required for {what}"))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    formats::write_file(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_structure(path: Option<&Path>) -> Result<(Geometry, SteinerStructure)> {
    let (file, origin) = match path {
        None => (reference::s2_3_13(), "shipped S_2[2,3,13]".to_string()),
        Some(p) => (formats::parse_structure(&read(p)?)?, p.display().to_string()),
    };
    SteinerStructure::from_file(&file, origin.clone()).with_context(|| format!("assembling {origin}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.opts.workers > 1 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.opts.workers).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let o = &cli.opts;
    match &cli.command {
        Command::FieldInfo => {
            let f = FieldTables::build(o.field_spec()?)?;
            let cosets = CosetTable::build(&f);
            println!("field: {}", f.spec());
            println!("order: {}", f.order());
            println!("primitive: true");
            println!("cosets_size_n: {}", cosets.count_of_size(f.n() as usize));
            println!("cosets_size_1: {}", cosets.count_of_size(1));
            if f.p() == 2 {
                println!("groups: {}", CosetGroupTable::build(&f, &cosets)?.len());
            }
            Ok(0)
        }
        Command::Groups => {
            let g = o.geometry()?;
            println!("{} cosets, {} groups", g.cosets.count_of_size(g.field.n() as usize), g.groups.len());
            Ok(0)
        }
        Command::Candidates { reps, allow_large_k } => {
            let out = o.require_out("candidates")?;
            let g = o.geometry()?;
            let t = Instant::now();
            let cands = enumerate_candidates(
                &g.field,
                &g.cosets,
                &g.groups,
                o.k,
                EnumerateOptions { allow_large_k: *allow_large_k },
            )?;
            eprintln!("enumerated {} candidate orbits in {:.2?}", cands.len(), t.elapsed());
            candidates::export_instance(&cands, &g.groups, out)?;
            if let Some(path) = reps {
                let file = CandidatesFile {
                    field: g.field.spec().clone(),
                    k: o.k,
                    reps: cands.iter().enumerate().map(|(i, c)| (i as u32, c.rep.exponents().to_vec())).collect(),
                };
                write(path, &formats::candidates_to_string(&file))?;
            }
            println!("candidates: {}", cands.len());
            println!("universe: {}", g.groups.len());
            Ok(0)
        }
        Command::Solve { instance, mode } => {
            let inst = formats::parse_instance(&read(instance)?)?;
            let report = solve(o, &inst, *mode);
            let code = report_outcome(&report);
            if let Some(out) = &o.out {
                write(out, &formats::solution_to_string(&solution_file(&report)))?;
            }
            Ok(code)
        }
        Command::Assemble { candidates, solution } => {
            let out = o.require_out("assemble")?;
            let cands = formats::parse_candidates(&read(candidates)?)?;
            let sol = formats::parse_solution(&read(solution)?)?;
            let file = structure_from_solution(&cands, &sol.ids)?;
            SteinerStructure::from_file(&file, solution.display().to_string())?;
            write(out, &formats::structure_to_string(&file))?;
            println!("representatives: {}", file.reps.len());
            Ok(0)
        }
        Command::Verify { structure } => {
            let (g, s) = load_structure(structure.as_deref())?;
            Ok(verify(o, &g, &s)?.0)
        }
        Command::DeriveDf { structure } => {
            let (g, s) = load_structure(structure.as_deref())?;
            let df = s.derive_difference_family(&g)?;
            println!("v: {}", df.v);
            println!("w: {}", df.w);
            println!("lambda: {}", df.lambda);
            println!("base_blocks: {}", df.blocks.len());
            if let Some(out) = &o.out {
                let file = DifferenceFamilyFile { v: df.v, w: df.w, lambda: df.lambda, blocks: df.blocks };
                write(out, &formats::difference_family_to_string(&file))?;
            }
            Ok(0)
        }
        Command::QueryBlock { points, structure } => {
            let (g, s) = load_structure(structure.as_deref())?;
            let idx = s.query_index(&g);
            let block = s.block_containing(&g, &idx, *points)?;
            println!("{}", block.iter().map(u32::to_string).collect::<Vec<_>>().join(","));
            Ok(0)
        }
        Command::ExportGraph { instance } => {
            let out = o.require_out("export-graph")?;
            let inst = formats::parse_instance(&read(instance)?)?;
            let sigs: Vec<&[u32]> = inst.sets().iter().map(|s| s.1.as_slice()).collect();
            let edges = candidates::conflict_graph_edges(&sigs);
            write(out, &formats::graph_to_string(sigs.len(), &edges))?;
            println!("vertices: {}", sigs.len());
            println!("edges: {}", edges.len());
            Ok(0)
        }
        Command::ReproS2313 => repro(o),
    }
}

fn solve(o: &GlobalOpts, inst: &qsteiner::ExactCoverInstance, mode: SearchMode) -> SolveReport {
    let budget = o.budget(mode);
    eprintln!(
        "solving: {} sets over {} columns, seed {:?}, workers {}",
        inst.sets().len(),
        inst.universe_size(),
        budget.seed,
        o.workers
    );
    let report = if o.workers > 1 && mode == SearchMode::FirstSolution {
        let p = cover::solve_portfolio(inst, &budget, o.workers);
        eprintln!("portfolio winner: worker {} ({} nodes over all workers)", p.winner, p.total_nodes());
        p.report
    } else {
        cover::solve(inst, &budget)
    };
    eprintln!(
        "nodes {} max_depth {} solutions {} elapsed {:.2?}",
        report.stats.nodes, report.stats.max_depth, report.stats.solutions, report.stats.elapsed
    );
    report
}

fn report_outcome(report: &SolveReport) -> u8 {
    match &report.outcome {
        Outcome::Found(s) => {
            println!("status: solution");
            println!("solutions: {}", s.len());
            0
        }
        Outcome::Counted(n) => {
            println!("status: solution");
            println!("solutions: {n}");
            0
        }
        Outcome::Exhausted => {
            println!("status: exhausted");
            EXIT_EXHAUSTED
        }
        Outcome::BudgetExceeded { .. } | Outcome::Cancelled => {
            println!("status: budget-exceeded");
            EXIT_BUDGET
        }
    }
}

/// First solution's ids plus the deterministic statistics (no timings).
fn solution_file(report: &SolveReport) -> SolutionFile {
    let (ids, status) = match &report.outcome {
        Outcome::Found(s) => (s.first().cloned().unwrap_or(CoverSolution(vec![])).0, "solution"),
        Outcome::Counted(_) => (vec![], "solution"),
        Outcome::Exhausted => (vec![], "exhausted"),
        Outcome::BudgetExceeded { partial } => {
            (partial.first().cloned().unwrap_or(CoverSolution(vec![])).0, "budget-exceeded")
        }
        Outcome::Cancelled => (vec![], "budget-exceeded"),
    };
    SolutionFile {
        ids,
        stats: vec![
            ("status".into(), status.into()),
            ("nodes".into(), report.stats.nodes.to_string()),
            ("max_depth".into(), report.stats.max_depth.to_string()),
            ("solutions".into(), report.stats.solutions.to_string()),
        ],
    }
}

fn structure_from_solution(cands: &CandidatesFile, ids: &[u32]) -> Result<StructureFile> {
    let reps = ids
        .iter()
        .map(|id| {
            cands
                .reps
                .iter()
                .find(|(i, _)| i == id)
                .map(|(_, r)| r.clone())
                .ok_or_else(|| anyhow!("solution id {id} not in candidates file"))
        })
        .collect::<Result<Vec<_>>>()?;
    if reps.is_empty() {
        bail!("solution is empty");
    }
    Ok(StructureFile { field: cands.field.clone(), k: cands.k, reps })
}

fn verify(o: &GlobalOpts, g: &Geometry, s: &SteinerStructure) -> Result<(u8, CoverageReport)> {
    eprintln!("certifying {} blocks from {}", s.block_count(), s.provenance);
    let t = Instant::now();
    let report = s.certify(g, o.mem_budget())?;
    eprintln!("certification took {:.2?}", t.elapsed());
    print!("{report}");
    Ok((if report.is_certified() { 0 } else { EXIT_NOT_CERTIFIED }, report))
}

fn repro(o: &GlobalOpts) -> Result<u8> {
    let dir = o.out.clone().unwrap_or_else(|| PathBuf::from("repro-s2-3-13"));
    let g = o.geometry()?;
    let k = o.k;
    println!("{} cosets, {} groups", g.cosets.count_of_size(g.field.n() as usize), g.groups.len());

    let t = Instant::now();
    let cands = enumerate_candidates(&g.field, &g.cosets, &g.groups, k, EnumerateOptions::default())?;
    eprintln!("enumerated {} candidate orbits in {:.2?}", cands.len(), t.elapsed());
    println!("candidates: {}", cands.len());
    let instance = candidates::to_instance(&cands, &g.groups);
    write(&dir.join("instance.txt"), &formats::instance_to_string(&instance))?;
    let cfile = CandidatesFile {
        field: g.field.spec().clone(),
        k,
        reps: cands.iter().enumerate().map(|(i, c)| (i as u32, c.rep.exponents().to_vec())).collect(),
    };
    write(&dir.join("candidates.txt"), &formats::candidates_to_string(&cfile))?;

    let mut o = o.clone();
    o.budget_nodes = o.budget_nodes.or(Some(1_000_000_000));
    o.budget_secs = o.budget_secs.or(Some(3600));
    o.seed = o.seed.or(Some(REPRO_SEED));
    let report = solve(&o, &instance, SearchMode::FirstSolution);
    write(&dir.join("solution.txt"), &formats::solution_to_string(&solution_file(&report)))?;
    let code = report_outcome(&report);
    if code != 0 {
        return Ok(code);
    }
    let ids = solution_file(&report).ids;
    let check = cover::check_solution(&instance, &ids);
    if !check.is_valid() {
        bail!("solver returned an invalid cover: {:?}", check.first_violation());
    }

    let file = structure_from_solution(&cfile, &ids)?;
    write(&dir.join("structure.txt"), &formats::structure_to_string(&file))?;
    let reps = steiner::parse_reps(&g, k, &file.reps)?;
    let s = SteinerStructure::assemble(&g, k, reps, "repro-s2-3-13 solver run")?;
    let (code, report) = verify(&o, &g, &s)?;
    write(&dir.join("report.txt"), &report.to_string())?;
    Ok(code)
}
