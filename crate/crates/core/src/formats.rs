//! Plain-text file formats.
//!
//! All formats are line oriented. Blank lines and lines starting with `#` are
//! ignored on input. Header entries are `key = value`.
//!
//! Field file:
//!
//! ```text
//! p = 2
//! n = 13
//! poly = 1,1,0,1,1,0,0,0,0,0,0,0,0,1
//! ```
//!
//! `poly` lists coefficients constant term first (the example is
//! x^13 + x^4 + x^3 + x + 1).
//!
//! Structure file: the field header plus `k = <dim>`, then one orbit
//! representative per line as a comma-separated exponent list of its nonzero
//! elements, e.g. `0,1,1249,5040,7258,7978,8105`.
//!
//! Candidates file: the structure header, then `<id> <exponent list>` per line.
//!
//! Instance file: `universe <G>`, then `<id> <g1> <g2> ... <gm>` per set,
//! columns ascending.
//!
//! Solution file: one set id per line, followed by `#`-prefixed statistics.
//!
//! Conflict graph: DIMACS edge format, `p edge <V> <E>` then `e <u> <v>` with
//! 1-based vertices.
//!
//! Difference family file: `v = `, `w = `, `lambda = ` header, then one base
//! block per line as a comma-separated residue list.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::cover::{CoverError, ExactCoverInstance};
use crate::field::FieldSpec;
use crate::subspace::ExponentList;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header key `{0}`")]
    MissingKey(&'static str),
    #[error(transparent)]
    Instance(#[from] CoverError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line: line + 1, msg: msg.into() }
}

/// Non-comment, non-blank lines with their 0-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, FormatError>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| syntax(line, format!("bad number {s:?}: {e}")))
}

fn parse_list(line: usize, s: &str) -> Result<Vec<u32>, FormatError> {
    s.parse::<ExponentList>().map(|l| l.0).map_err(|e| syntax(line, e.to_string()))
}

fn join(v: &[u32], sep: &str) -> String {
    let mut out = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        let _ = write!(out, "{x}");
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)
}

#[derive(Debug, Default)]
struct Header {
    p: Option<u32>,
    n: Option<u32>,
    k: Option<u32>,
    poly: Option<Vec<u32>>,
}

impl Header {
    /// Consumes a `key = value` line; returns false for non-header lines.
    fn accept(&mut self, line: usize, text: &str) -> Result<bool, FormatError> {
        let Some((key, value)) = text.split_once('=') else { return Ok(false) };
        match key.trim() {
            "p" => self.p = Some(parse_num(line, value)?),
            "n" => self.n = Some(parse_num(line, value)?),
            "k" => self.k = Some(parse_num(line, value)?),
            "poly" => self.poly = Some(parse_list(line, value)?),
            other => return Err(syntax(line, format!("unknown key `{other}`"))),
        }
        Ok(true)
    }

    fn field(&self) -> Result<FieldSpec, FormatError> {
        Ok(FieldSpec::new(
            self.p.ok_or(FormatError::MissingKey("p"))?,
            self.n.ok_or(FormatError::MissingKey("n"))?,
            self.poly.clone().ok_or(FormatError::MissingKey("poly"))?,
        ))
    }
}

fn field_header(spec: &FieldSpec) -> String {
    format!("p = {}\nn = {}\npoly = {}\n", spec.p, spec.n, join(&spec.poly, ","))
}

pub fn field_to_string(spec: &FieldSpec) -> String {
    format!("# {spec}\n{}", field_header(spec))
}

pub fn parse_field(text: &str) -> Result<FieldSpec, FormatError> {
    let mut h = Header::default();
    for (i, l) in content_lines(text) {
        if !h.accept(i, l)? {
            return Err(syntax(i, "expected `key = value`"));
        }
    }
    if h.k.is_some() {
        return Err(FormatError::Syntax { line: 0, msg: "`k` is not a field key".into() });
    }
    h.field()
}

/// Field, dimension and exponent lists of a structure file (unvalidated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFile {
    pub field: FieldSpec,
    pub k: u32,
    pub reps: Vec<Vec<u32>>,
}

pub fn structure_to_string(s: &StructureFile) -> String {
    let mut out = field_header(&s.field);
    let _ = writeln!(out, "k = {}", s.k);
    for r in &s.reps {
        out.push_str(&join(r, ","));
        out.push('\n');
    }
    out
}

pub fn parse_structure(text: &str) -> Result<StructureFile, FormatError> {
    let mut h = Header::default();
    let mut reps = Vec::new();
    for (i, l) in content_lines(text) {
        if h.accept(i, l)? {
            if !reps.is_empty() {
                return Err(syntax(i, "header key after representatives"));
            }
            continue;
        }
        reps.push(parse_list(i, l)?);
    }
    Ok(StructureFile { field: h.field()?, k: h.k.ok_or(FormatError::MissingKey("k"))?, reps })
}

/// Candidate representatives keyed by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatesFile {
    pub field: FieldSpec,
    pub k: u32,
    pub reps: Vec<(u32, Vec<u32>)>,
}

pub fn candidates_to_string(c: &CandidatesFile) -> String {
    let mut out = field_header(&c.field);
    let _ = writeln!(out, "k = {}", c.k);
    for (id, r) in &c.reps {
        let _ = writeln!(out, "{id} {}", join(r, ","));
    }
    out
}

pub fn parse_candidates(text: &str) -> Result<CandidatesFile, FormatError> {
    let mut h = Header::default();
    let mut reps = Vec::new();
    for (i, l) in content_lines(text) {
        if h.accept(i, l)? {
            continue;
        }
        let (id, list) = l.split_once(char::is_whitespace).ok_or_else(|| syntax(i, "expected `<id> <list>`"))?;
        reps.push((parse_num(i, id)?, parse_list(i, list)?));
    }
    Ok(CandidatesFile { field: h.field()?, k: h.k.ok_or(FormatError::MissingKey("k"))?, reps })
}

pub fn instance_to_string(inst: &ExactCoverInstance) -> String {
    let mut out = format!("universe {}\n", inst.universe_size());
    for (id, cols) in inst.sets() {
        let _ = write!(out, "{id}");
        for c in cols {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_instance(text: &str) -> Result<ExactCoverInstance, FormatError> {
    let mut lines = content_lines(text);
    let (i, head) = lines.next().ok_or(FormatError::MissingKey("universe"))?;
    let universe = match head.split_whitespace().collect::<Vec<_>>()[..] {
        ["universe", g] => parse_num::<usize>(i, g)?,
        _ => return Err(syntax(i, "expected `universe <G>`")),
    };
    let mut sets = Vec::new();
    for (i, l) in lines {
        let mut it = l.split_whitespace();
        let id = parse_num(i, it.next().unwrap_or_default())?;
        let cols = it.map(|c| parse_num(i, c)).collect::<Result<Vec<u32>, _>>()?;
        sets.push((id, cols));
    }
    Ok(ExactCoverInstance::new(universe, sets)?)
}

/// Set ids and `(key, value)` statistics lines.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionFile {
    pub ids: Vec<u32>,
    pub stats: Vec<(String, String)>,
}

pub fn solution_to_string(s: &SolutionFile) -> String {
    let mut out = String::new();
    for id in &s.ids {
        let _ = writeln!(out, "{id}");
    }
    for (k, v) in &s.stats {
        let _ = writeln!(out, "# {k} {v}");
    }
    out
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, FormatError> {
    let mut out = SolutionFile::default();
    for (i, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix('#') {
            let rest = rest.trim();
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            out.stats.push((k.to_string(), v.trim().to_string()));
        } else {
            out.ids.push(parse_num(i, l)?);
        }
    }
    Ok(out)
}

pub fn graph_to_string(vertices: usize, edges: &[(u32, u32)]) -> String {
    let mut out = format!("p edge {vertices} {}\n", edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "e {} {}", u + 1, v + 1);
    }
    out
}

/// Vertex count and 0-based edges of a DIMACS edge file.
pub fn parse_graph(text: &str) -> Result<(usize, Vec<(u32, u32)>), FormatError> {
    let mut vertices = None;
    let mut edges = Vec::new();
    for (i, l) in text.lines().enumerate() {
        let parts: Vec<&str> = l.split_whitespace().collect();
        match parts[..] {
            [] | ["c", ..] => {}
            ["p", "edge", v, _] => vertices = Some(parse_num::<usize>(i, v)?),
            ["e", u, v] => {
                let (u, v): (u32, u32) = (parse_num(i, u)?, parse_num(i, v)?);
                if u == 0 || v == 0 {
                    return Err(syntax(i, "vertices are 1-based"));
                }
                edges.push((u - 1, v - 1));
            }
            _ => return Err(syntax(i, "expected DIMACS `p edge` or `e` line")),
        }
    }
    Ok((vertices.ok_or(FormatError::MissingKey("p edge"))?, edges))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceFamilyFile {
    pub v: u32,
    pub w: u32,
    pub lambda: u32,
    pub blocks: Vec<Vec<u32>>,
}

pub fn difference_family_to_string(df: &DifferenceFamilyFile) -> String {
    let mut out = format!("v = {}\nw = {}\nlambda = {}\n", df.v, df.w, df.lambda);
    for b in &df.blocks {
        out.push_str(&join(b, ","));
        out.push('\n');
    }
    out
}

pub fn parse_difference_family(text: &str) -> Result<DifferenceFamilyFile, FormatError> {
    let (mut v, mut w, mut lambda) = (None, None, None);
    let mut blocks = Vec::new();
    for (i, l) in content_lines(text) {
        if let Some((key, value)) = l.split_once('=') {
            let slot = match key.trim() {
                "v" => &mut v,
                "w" => &mut w,
                "lambda" => &mut lambda,
                other => return Err(syntax(i, format!("unknown key `{other}`"))),
            };
            *slot = Some(parse_num(i, value)?);
        } else {
            blocks.push(parse_list(i, l)?);
        }
    }
    Ok(DifferenceFamilyFile {
        v: v.ok_or(FormatError::MissingKey("v"))?,
        w: w.ok_or(FormatError::MissingKey("w"))?,
        lambda: lambda.ok_or(FormatError::MissingKey("lambda"))?,
        blocks,
    })
}
