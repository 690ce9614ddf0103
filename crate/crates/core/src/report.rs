//! Table rows, bundled expectations and the on-disk result cache.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::enumerate::Budget;
use crate::error::{Error, Result};
use crate::latin::Isotopism;
use crate::linalg::{dim_report, rank_bound};
use crate::perm::CycleStructure;

const BUNDLED: &str = include_str!("../data/tables.txt");

/// A row of the published tables; `None` where the table is blank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedRow {
    pub table: u8,
    pub n: usize,
    pub l_alpha: CycleStructure,
    pub l_beta: CycleStructure,
    pub l_gamma: CycleStructure,
    pub d_theta: usize,
    pub delta: Option<u64>,
    pub dim: Option<usize>,
    pub bound: usize,
}

impl ExpectedRow {
    pub fn structures(&self) -> [CycleStructure; 3] {
        [self.l_alpha.clone(), self.l_beta.clone(), self.l_gamma.clone()]
    }

    pub fn theta(&self) -> Result<Isotopism> {
        Isotopism::from_structures(&self.l_alpha, &self.l_beta, &self.l_gamma)
    }
}

fn blank_or<T: std::str::FromStr>(field: &str, line: usize) -> Result<Option<T>> {
    if field == "-" {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| Error::TableData(format!("line {line}: bad number {field:?}")))
}

fn required<T: std::str::FromStr>(field: &str, line: usize) -> Result<T> {
    blank_or(field, line)?.ok_or_else(|| Error::TableData(format!("line {line}: value required")))
}

/// Parses `table n l_alpha l_beta l_gamma d_theta delta dim bound` lines.
pub fn parse_rows(text: &str) -> Result<Vec<ExpectedRow>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = raw.split_whitespace().collect();
        if f.len() != 9 {
            return Err(Error::TableData(format!("line {line}: expected 9 fields, found {}", f.len())));
        }
        let structure = |s: &str| CycleStructure::parse(s).map_err(|e| Error::TableData(format!("line {line}: {e}")));
        let row = ExpectedRow {
            table: required(f[0], line)?,
            n: required(f[1], line)?,
            l_alpha: structure(f[2])?,
            l_beta: structure(f[3])?,
            l_gamma: structure(f[4])?,
            d_theta: required(f[5], line)?,
            delta: blank_or(f[6], line)?,
            dim: blank_or(f[7], line)?,
            bound: required(f[8], line)?,
        };
        if [&row.l_alpha, &row.l_beta, &row.l_gamma].iter().any(|s| s.n() != row.n) {
            return Err(Error::TableData(format!("line {line}: structure does not match n = {}", row.n)));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn bundled_rows() -> Vec<ExpectedRow> {
    parse_rows(BUNDLED).expect("bundled table data is well formed")
}

pub fn bundled_rows_for(n: usize) -> Vec<ExpectedRow> {
    bundled_rows().into_iter().filter(|r| r.n == n).collect()
}

/// The lower-bound column of the tables is never computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LowerBound {
    #[default]
    Unsupported,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub l_alpha: CycleStructure,
    pub l_beta: CycleStructure,
    pub l_gamma: CycleStructure,
    pub d_theta: usize,
    pub rank: usize,
    pub bound: usize,
    pub delta: Option<u64>,
    pub dim: Option<usize>,
    pub complete: bool,
    pub lower_bound: LowerBound,
    /// Reordered so that cycle counts are nondecreasing, when the given order
    /// is not.
    pub normalized: Option<[CycleStructure; 3]>,
}

/// Orders the structures by number of cycles, keeping ties in place.
pub fn normalize(structures: &[CycleStructure; 3]) -> [CycleStructure; 3] {
    let mut sorted = structures.clone();
    sorted.sort_by_key(CycleStructure::cycle_count);
    sorted
}

fn normalized_if_needed(structures: &[CycleStructure; 3]) -> Option<[CycleStructure; 3]> {
    let sorted = normalize(structures);
    (sorted != *structures).then_some(sorted)
}

impl TableRow {
    pub fn structures(&self) -> [CycleStructure; 3] {
        [self.l_alpha.clone(), self.l_beta.clone(), self.l_gamma.clone()]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain record serializes")
    }
}

/// Computes a row; with `bounds_only` nothing is enumerated.
pub fn compute_row(theta: &Isotopism, budget: Budget, bounds_only: bool) -> Result<TableRow> {
    let structures = theta.structure();
    let normalized = normalized_if_needed(&structures);
    let [l_alpha, l_beta, l_gamma] = structures;
    if bounds_only {
        let (d_theta, rank) = rank_bound(theta);
        return Ok(TableRow {
            n: theta.n(),
            l_alpha,
            l_beta,
            l_gamma,
            d_theta,
            rank: rank.rank,
            bound: d_theta - rank.rank,
            delta: None,
            dim: None,
            complete: false,
            lower_bound: LowerBound::Unsupported,
            normalized,
        });
    }
    let r = dim_report(theta, budget)?;
    Ok(TableRow {
        n: r.n,
        l_alpha,
        l_beta,
        l_gamma,
        d_theta: r.d_theta,
        rank: r.rank,
        bound: r.bound,
        delta: r.delta,
        dim: r.dim,
        complete: r.complete,
        lower_bound: LowerBound::Unsupported,
        normalized,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub column: &'static str,
    pub expected: u64,
    pub found: u64,
}

/// Columns known on both sides that disagree.
pub fn compare(expected: &ExpectedRow, row: &TableRow) -> Vec<Mismatch> {
    let mut out = Vec::new();
    let mut check = |column, e: Option<u64>, f: Option<u64>| {
        if let (Some(expected), Some(found)) = (e, f) {
            if expected != found {
                out.push(Mismatch { column, expected, found });
            }
        }
    };
    check("d_theta", Some(expected.d_theta as u64), Some(row.d_theta as u64));
    check("bound", Some(expected.bound as u64), Some(row.bound as u64));
    check("delta", expected.delta, row.delta);
    check("dim", expected.dim.map(|d| d as u64), row.dim.map(|d| d as u64));
    out
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// Aligned text table; `status` holds one note per row.
pub fn format_rows(rows: &[TableRow], status: &[String], bounds_only: bool) -> String {
    let mut lines: Vec<Vec<String>> = Vec::new();
    let mut header: Vec<String> = ["n", "l_alpha", "l_beta", "l_gamma", "d_theta"].map(String::from).to_vec();
    if !bounds_only {
        header.extend(["delta", "dim"].map(String::from));
    }
    header.push("bound".into());
    header.push("status".into());
    lines.push(header);
    for (row, note) in rows.iter().zip(status) {
        let mut l = vec![
            row.n.to_string(),
            row.l_alpha.to_string(),
            row.l_beta.to_string(),
            row.l_gamma.to_string(),
            row.d_theta.to_string(),
        ];
        if !bounds_only {
            l.push(cell(row.delta));
            l.push(cell(row.dim));
        }
        l.push(row.bound.to_string());
        l.push(note.clone());
        lines.push(l);
    }
    let cols = lines[0].len();
    let widths: Vec<usize> = (0..cols).map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for l in &lines {
        let mut text = String::new();
        for (c, v) in l.iter().enumerate() {
            if c + 1 == cols {
                text.push_str(v);
            } else {
                let _ = write!(text, "{v:<w$}  ", w = widths[c]);
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub computed_at: u64,
    pub budget_nodes: Option<u64>,
    pub budget_secs: Option<f64>,
    pub bounds_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub row: TableRow,
    pub provenance: Provenance,
}

/// One JSON file per `(n, α-structure, β-structure, γ-structure)`.
#[derive(Clone, Debug)]
pub struct ResultCache {
    dir: PathBuf,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn structure_key(s: &CycleStructure) -> String {
    s.counts().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("-")
}

impl ResultCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ResultCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, n: usize, structures: &[CycleStructure; 3]) -> PathBuf {
        let [a, b, c] = structures.each_ref().map(structure_key);
        self.dir.join(format!("n{n}_{a}_{b}_{c}.json"))
    }

    /// A stored row usable for this request: same version, and either complete
    /// or computed under the same budget and mode.
    pub fn get(&self, n: usize, structures: &[CycleStructure; 3], budget: Budget, bounds_only: bool) -> Result<Option<TableRow>> {
        let path = self.path_for(n, structures);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let Ok(entry) = serde_json::from_str::<CacheEntry>(&text) else {
            return Ok(None);
        };
        let p = &entry.provenance;
        if p.version != VERSION {
            return Ok(None);
        }
        let same_request = p.bounds_only == bounds_only
            && p.budget_nodes == budget.max_nodes
            && p.budget_secs == budget.max_time.map(|t| t.as_secs_f64());
        if entry.row.complete || bounds_only || same_request {
            let mut row = entry.row;
            if bounds_only {
                row.delta = None;
                row.dim = None;
                row.complete = false;
            }
            return Ok(Some(row));
        }
        Ok(None)
    }

    pub fn put(&self, row: &TableRow, budget: Budget, bounds_only: bool) -> Result<()> {
        let entry = CacheEntry {
            row: row.clone(),
            provenance: Provenance {
                version: VERSION.to_string(),
                computed_at: SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or(Duration::ZERO).as_secs(),
                budget_nodes: budget.max_nodes,
                budget_secs: budget.max_time.map(|t| t.as_secs_f64()),
                bounds_only,
            },
        };
        let path = self.path_for(row.n, &row.structures());
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&entry)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}
