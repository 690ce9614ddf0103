use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use latin_polytope::equiv::{build_equivalence, verify_equivalence, verify_reduced_equivalence, Verdict};
use latin_polytope::report::{bundled_rows, bundled_rows_for, compare, compute_row, format_rows, ResultCache, TableRow};
use latin_polytope::{
    count, enumerate_vertices, full_system, is_autotopism, reduced_system, reduced_system_raw, Budget,
    ConstraintSystem, CycleStructure, Error, Isotopism, LatinSquare, Reduction,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INCOMPLETE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "lspoly", version, about = "Latin squares with a prescribed autotopism, as 0/1-polytope vertices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of Latin squares admitting the autotopism.
    Count {
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// One table row: d_theta, delta, dim and the rank bound.
    Row {
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        bounds_only: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Every bundled table row for one order, compared with the stored values.
    Table {
        #[arg(short = 'n')]
        n: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        bounds_only: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Write vertices, constraint matrices, the reduced index map or an equivalence map.
    Export {
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        second: SecondThetaArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum)]
        what: ExportKind,
        /// Output file, or file stem for matrix exports.
        #[arg(short, long)]
        out: PathBuf,
        /// Merge duplicate rows of the reduced matrix.
        #[arg(long)]
        dedup: bool,
    },
    /// Build and verify the coordinate permutation between two autotopisms.
    Equiv {
        #[command(flatten)]
        theta: ThetaArgs,
        #[command(flatten)]
        second: SecondThetaArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Test whether a square given in a text file admits the autotopism.
    Check {
        #[command(flatten)]
        theta: ThetaArgs,
        /// First line n, then n rows of 1-based symbols.
        #[arg(long)]
        square: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Vertices,
    FullMatrix,
    ReducedMatrix,
    IndexMap,
    Map,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(short = 'n')]
    n: Option<usize>,
    /// Row permutation in cycle notation, e.g. "(1 2 3)".
    #[arg(short = 'a', allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(short = 'b', allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(short = 'c', allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Cycle structures "l_alpha;l_beta;l_gamma", each a comma-separated count
    /// vector; a flat list of 3n counts also works.
    #[arg(long, conflicts_with_all = ["alpha", "beta", "gamma"])]
    structure: Option<String>,
}

#[derive(Args)]
struct SecondThetaArgs {
    #[arg(long = "a2")]
    alpha2: Option<String>,
    #[arg(long = "b2")]
    beta2: Option<String>,
    #[arg(long = "c2")]
    gamma2: Option<String>,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Search-node limit; 0 for none.
    #[arg(long, default_value_t = 10_000_000)]
    budget_nodes: u64,
    /// Wall-clock limit in seconds; 0 for none.
    #[arg(long, default_value_t = 60.0)]
    budget_secs: f64,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget {
            max_nodes: (self.budget_nodes > 0).then_some(self.budget_nodes),
            max_time: (self.budget_secs > 0.0).then(|| Duration::from_secs_f64(self.budget_secs)),
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidStructure(msg.into())
}

fn parse_structures(text: &str, n: Option<usize>) -> Result<[CycleStructure; 3], Error> {
    let parts: Vec<&str> = text.split([';', '/']).map(str::trim).collect();
    let structures: Vec<CycleStructure> = if parts.len() == 3 {
        parts.iter().map(|p| CycleStructure::parse(p)).collect::<Result<_, _>>()?
    } else if parts.len() == 1 {
        let counts: Vec<usize> = text
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|x| x.trim().parse().map_err(|_| usage(format!("bad count {x:?}"))))
            .collect::<Result<_, _>>()?;
        if !counts.len().is_multiple_of(3) || counts.is_empty() {
            return Err(usage("a flat structure list needs 3n counts"));
        }
        let len = counts.len() / 3;
        counts.chunks(len).map(|c| CycleStructure::new(c.to_vec())).collect::<Result<_, _>>()?
    } else {
        return Err(usage("expected three structures separated by ';'"));
    };
    let [a, b, c]: [CycleStructure; 3] = structures.try_into().expect("three parts");
    if a.n() != b.n() || b.n() != c.n() {
        return Err(usage("structures have different orders"));
    }
    if let Some(n) = n {
        if n != a.n() {
            return Err(Error::DegreeMismatch { expected: n, found: a.n() });
        }
    }
    Ok([a, b, c])
}

impl ThetaArgs {
    fn isotopism(&self) -> Result<Isotopism, Error> {
        if let Some(text) = &self.structure {
            let [a, b, c] = parse_structures(text, self.n)?;
            return Isotopism::from_structures(&a, &b, &c);
        }
        let n = self.n.ok_or_else(|| usage("give -n with -a/-b/-c, or --structure"))?;
        let part = |p: &Option<String>| p.clone().unwrap_or_default();
        Isotopism::parse(&part(&self.alpha), &part(&self.beta), &part(&self.gamma), n)
    }
}

impl SecondThetaArgs {
    fn isotopism(&self, n: usize) -> Result<Isotopism, Error> {
        if self.alpha2.is_none() && self.beta2.is_none() && self.gamma2.is_none() {
            return Err(usage("give the second autotopism with --a2/--b2/--c2"));
        }
        let part = |p: &Option<String>| p.clone().unwrap_or_default();
        Isotopism::parse(&part(&self.alpha2), &part(&self.beta2), &part(&self.gamma2), n)
    }
}

fn status_of(row: &TableRow, bounds_only: bool) -> (String, bool) {
    let expected = bundled_rows().into_iter().find(|e| e.n == row.n && e.structures() == row.structures());
    let mut notes = Vec::new();
    let mut mismatch = false;
    match &expected {
        Some(e) => {
            let diffs = compare(e, row);
            mismatch = !diffs.is_empty();
            for d in diffs {
                notes.push(format!("MISMATCH {} expected {} found {}", d.column, d.expected, d.found));
            }
        }
        None => notes.push("no stored row".into()),
    }
    if !bounds_only && !row.complete {
        notes.push("incomplete".into());
    }
    if notes.is_empty() {
        notes.push("ok".into());
    }
    (notes.join("; "), mismatch)
}

fn cached_row(
    cache: Option<&ResultCache>,
    theta: &Isotopism,
    budget: Budget,
    bounds_only: bool,
) -> Result<(TableRow, bool), Error> {
    if let Some(cache) = cache {
        if let Some(row) = cache.get(theta.n(), &theta.structure(), budget, bounds_only)? {
            return Ok((row, true));
        }
    }
    Ok((compute_row(theta, budget, bounds_only)?, false))
}

fn cmd_count(theta: &ThetaArgs, budget: BudgetArgs, json: bool) -> Result<u8, Error> {
    let t = theta.isotopism()?;
    let r = count(&t, budget.budget())?;
    if json {
        println!("{}", serde_json::json!({ "delta": r.delta, "complete": r.complete, "nodes": r.nodes }));
    } else if r.complete {
        println!("{}", r.delta);
    } else {
        println!("at least {} (budget exhausted after {} nodes)", r.delta, r.nodes);
    }
    Ok(if r.complete { 0 } else { EXIT_INCOMPLETE })
}

fn cmd_row(theta: &ThetaArgs, budget: BudgetArgs, json: bool, bounds_only: bool, cache_dir: Option<&Path>) -> Result<u8, Error> {
    let t = theta.isotopism()?;
    let cache = cache_dir.map(ResultCache::new).transpose()?;
    let (row, hit) = cached_row(cache.as_ref(), &t, budget.budget(), bounds_only)?;
    if let (Some(cache), false) = (&cache, hit) {
        cache.put(&row, budget.budget(), bounds_only)?;
    }
    let (status, mismatch) = status_of(&row, bounds_only);
    if !json {
        print!("{}", format_rows(std::slice::from_ref(&row), &[status], bounds_only));
        if let Some(norm) = &row.normalized {
            println!("normalized structure: {} {} {}", norm[0], norm[1], norm[2]);
        }
    }
    println!("{}", row.to_json());
    Ok(if mismatch {
        EXIT_MISMATCH
    } else if !bounds_only && !row.complete {
        EXIT_INCOMPLETE
    } else {
        0
    })
}

fn cmd_table(n: usize, budget: BudgetArgs, json: bool, bounds_only: bool, cache_dir: Option<&Path>) -> Result<u8, Error> {
    let expected = bundled_rows_for(n);
    if expected.is_empty() {
        return Err(Error::TableData(format!("no stored rows for n = {n}")));
    }
    let cache = cache_dir.map(ResultCache::new).transpose()?;
    let budget = budget.budget();
    let computed: Vec<(TableRow, bool)> = expected
        .par_iter()
        .map(|e| cached_row(cache.as_ref(), &e.theta()?, budget, bounds_only))
        .collect::<Result<_, _>>()?;
    if let Some(cache) = &cache {
        for (row, hit) in &computed {
            if !hit {
                cache.put(row, budget, bounds_only)?;
            }
        }
    }
    let rows: Vec<TableRow> = computed.into_iter().map(|(r, _)| r).collect();
    let mut statuses = Vec::new();
    let mut any_mismatch = false;
    for (e, row) in expected.iter().zip(&rows) {
        let diffs = compare(e, row);
        any_mismatch |= !diffs.is_empty();
        let mut notes: Vec<String> =
            diffs.iter().map(|d| format!("MISMATCH {} expected {} found {}", d.column, d.expected, d.found)).collect();
        if !bounds_only && !row.complete {
            notes.push("incomplete".into());
        }
        statuses.push(if notes.is_empty() { "ok".to_string() } else { notes.join("; ") });
    }
    if json {
        for row in &rows {
            println!("{}", row.to_json());
        }
    } else {
        print!("{}", format_rows(&rows, &statuses, bounds_only));
    }
    if any_mismatch {
        eprintln!("error: computed values disagree with the stored table");
        return Ok(EXIT_MISMATCH);
    }
    Ok(0)
}

fn write_system(system: &ConstraintSystem, stem: &Path) -> Result<(), Error> {
    let mut mtx = BufWriter::new(File::create(stem.with_extension("mtx"))?);
    system.write_matrix_market(&mut mtx)?;
    mtx.flush()?;
    let mut rhs = BufWriter::new(File::create(stem.with_extension("rhs"))?);
    system.write_rhs(&mut rhs)?;
    rhs.flush()?;
    fs::write(stem.with_extension("json"), system.sidecar_json())?;
    Ok(())
}

fn cmd_export(
    theta: &ThetaArgs,
    second: &SecondThetaArgs,
    budget: BudgetArgs,
    what: ExportKind,
    out: &Path,
    dedup: bool,
) -> Result<u8, Error> {
    let t = theta.isotopism()?;
    match what {
        ExportKind::Vertices => {
            let red = Reduction::new(&t);
            let mut lines = Vec::new();
            let r = enumerate_vertices(&t, budget.budget(), |v| {
                lines.push(v.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect::<String>());
                Ok(())
            })?;
            if !r.complete {
                eprintln!("budget exhausted after {} vertices; nothing written", r.delta);
                return Ok(EXIT_INCOMPLETE);
            }
            let mut w = BufWriter::new(File::create(out)?);
            writeln!(w, "{} {} {}", red.d(), t.n(), r.delta)?;
            for l in lines {
                writeln!(w, "{l}")?;
            }
            w.flush()?;
        }
        ExportKind::FullMatrix => write_system(&full_system(&t), out)?,
        ExportKind::ReducedMatrix => {
            let system = if dedup { reduced_system(&t) } else { reduced_system_raw(&t) };
            write_system(&system, out)?;
        }
        ExportKind::IndexMap => fs::write(out, Reduction::new(&t).index_map().to_json())?,
        ExportKind::Map => {
            let t2 = second.isotopism(t.n())?;
            fs::write(out, build_equivalence(&t, &t2)?.to_text())?;
        }
    }
    Ok(0)
}

fn cmd_equiv(theta: &ThetaArgs, second: &SecondThetaArgs, budget: BudgetArgs, json: bool) -> Result<u8, Error> {
    let t1 = theta.isotopism()?;
    let t2 = second.isotopism(t1.n())?;
    let map = build_equivalence(&t1, &t2)?;
    let conjugates = map.conjugates(&t1, &t2);
    let full = verify_equivalence(&map, &t1, &t2, budget.budget())?;
    let reduced = verify_reduced_equivalence(&map, &t1, &t2, budget.budget())?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "s1": map.sigma1.to_string(),
                "s2": map.sigma2.to_string(),
                "s3": map.sigma3.to_string(),
                "conjugates": conjugates,
                "full": full,
                "reduced": reduced,
            })
        );
    } else {
        print!("{}", map.to_text());
        println!("conjugation: {}", if conjugates { "holds" } else { "fails" });
        println!("full vertex sets: {full:?}");
        println!("reduced vertex sets: {reduced:?}");
    }
    Ok(if !conjugates || full == Verdict::Fails || reduced == Verdict::Fails {
        EXIT_MISMATCH
    } else if full == Verdict::Inconclusive || reduced == Verdict::Inconclusive {
        EXIT_INCOMPLETE
    } else {
        0
    })
}

fn cmd_check(theta: &ThetaArgs, square: &Path) -> Result<u8, Error> {
    let l = LatinSquare::parse_text(&fs::read_to_string(square)?)?;
    let with_order = ThetaArgs {
        n: theta.n.or(theta.structure.is_none().then_some(l.n())),
        alpha: theta.alpha.clone(),
        beta: theta.beta.clone(),
        gamma: theta.gamma.clone(),
        structure: theta.structure.clone(),
    };
    let t = with_order.isotopism()?;
    println!("{}", is_autotopism(&l, &t)?);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Count { theta, budget, json } => cmd_count(&theta, budget, json),
        Command::Row { theta, budget, json, bounds_only, cache_dir } => {
            cmd_row(&theta, budget, json, bounds_only, cache_dir.as_deref())
        }
        Command::Table { n, budget, json, bounds_only, cache_dir } => {
            cmd_table(n, budget, json, bounds_only, cache_dir.as_deref())
        }
        Command::Export { theta, second, budget, what, out, dedup } => {
            cmd_export(&theta, &second, budget, what, &out, dedup)
        }
        Command::Equiv { theta, second, budget, json } => cmd_equiv(&theta, &second, budget, json),
        Command::Check { theta, square } => cmd_check(&theta, &square),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_argument_forms() {
        let a = parse_structures("0,0,1;0,0,1;3,0,0", None).unwrap();
        let b = parse_structures("0,0,1/0,0,1/3,0,0", Some(3)).unwrap();
        let c = parse_structures("0,0,1,0,0,1,3,0,0", None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(parse_structures("0,0,1;0,0,1", None).is_err());
        assert!(parse_structures("0,0,1;0,0,1;0,1", None).is_err());
        assert!(parse_structures("0,0,1;0,0,1;0,0,1", Some(4)).is_err());
    }
}
