//! Enumeration of `LS(Θ)`, the Latin squares admitting Θ as an autotopism.
//!
//! Cells are grouped into orbits of `(i, j) -> (α(i), β(j))`. Choosing the
//! symbol of one cell fixes the whole orbit (`l_{α(i),β(j)} = γ(l_{i,j})`), so
//! the search makes one decision per orbit, longest orbits first.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::latin::{all_latin_squares, is_autotopism, Isotopism, LatinSquare, MAX_ORDER, ORACLE_MAX_ORDER};
use crate::orbit::Reduction;

pub type SinkError = Box<dyn std::error::Error + Send + Sync>;

/// Node and wall-clock limits; `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes: Some(max_nodes), max_time: None }
    }

    pub fn with_time(mut self, max_time: Duration) -> Self {
        self.max_time = Some(max_time);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationResult {
    /// `Δ(Θ)` when `complete`, a lower bound otherwise.
    pub delta: u64,
    pub complete: bool,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
struct CellOrbit {
    cells: Vec<(u8, u8)>,
    // symbols whose γ-cycle length divides the orbit length
    start_symbols: Vec<u8>,
}

/// Θ-derived search tables, immutable and shareable between workers.
#[derive(Clone, Debug)]
pub struct Enumerator {
    n: usize,
    orbits: Vec<CellOrbit>,
    gamma: Vec<u8>,
}

enum Stop {
    Budget,
    Sink(SinkError),
}

struct Limits<'a> {
    budget: Budget,
    start: Instant,
    shared_nodes: Option<&'a AtomicU64>,
    cancelled: Option<&'a AtomicBool>,
}

struct Search<'a> {
    en: &'a Enumerator,
    cells: Vec<u8>,
    row_used: Vec<u32>,
    col_used: Vec<u32>,
    nodes: u64,
    reported: u64,
    limits: Limits<'a>,
}

const EMPTY: u8 = u8::MAX;
const CHECK_EVERY: u64 = 1 << 12;

impl Enumerator {
    pub fn new(theta: &Isotopism) -> Result<Self> {
        let n = theta.n();
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge { n, max: MAX_ORDER });
        }
        let mut seen = vec![false; n * n];
        let mut orbits = Vec::new();
        for start in 0..n * n {
            if seen[start] {
                continue;
            }
            let mut cells = Vec::new();
            let (mut i, mut j) = (start / n, start % n);
            while !seen[i * n + j] {
                seen[i * n + j] = true;
                cells.push((i as u8, j as u8));
                i = theta.alpha.apply(i);
                j = theta.beta.apply(j);
            }
            let len = cells.len();
            let start_symbols = (0..n)
                .filter(|&k| len % theta.gamma.cycle_len(k) == 0)
                .map(|k| k as u8)
                .collect();
            orbits.push(CellOrbit { cells, start_symbols });
        }
        // stable: ties stay in lexicographic order of their first cell
        orbits.sort_by_key(|o| std::cmp::Reverse(o.cells.len()));
        let gamma = theta.gamma.images().iter().map(|&g| g as u8).collect();
        Ok(Enumerator { n, orbits, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    /// Orbit lengths in decision order.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.cells.len()).collect()
    }

    fn search<'a>(&'a self, limits: Limits<'a>) -> Search<'a> {
        Search {
            en: self,
            cells: vec![EMPTY; self.n * self.n],
            row_used: vec![0; self.n],
            col_used: vec![0; self.n],
            nodes: 0,
            reported: 0,
            limits,
        }
    }

    /// Visits every square of `LS(Θ)` as 0-based row-major cells, in
    /// lexicographic order of the decision sequence.
    pub fn for_each<F>(&self, budget: Budget, mut visit: F) -> Result<EnumerationResult>
    where
        F: FnMut(&[u8]) -> std::result::Result<(), SinkError>,
    {
        let start = Instant::now();
        let mut search = self.search(Limits { budget, start, shared_nodes: None, cancelled: None });
        let mut delta = 0u64;
        let outcome = search.dfs(0, &mut |cells| {
            delta += 1;
            visit(cells)
        });
        match outcome {
            Ok(()) => Ok(EnumerationResult { delta, complete: true, nodes: search.nodes, elapsed: start.elapsed() }),
            Err(Stop::Budget) => Ok(EnumerationResult { delta, complete: false, nodes: search.nodes, elapsed: start.elapsed() }),
            Err(Stop::Sink(e)) => Err(Error::Sink(e)),
        }
    }

    pub fn count(&self, budget: Budget) -> EnumerationResult {
        self.for_each(budget, |_| Ok(())).expect("counting sink never fails")
    }

    /// Counts with the first decision's branches spread over worker threads.
    /// The node budget is shared; a partial count may differ between runs.
    pub fn count_parallel(&self, budget: Budget) -> EnumerationResult {
        let start = Instant::now();
        let Some(first) = self.orbits.first() else {
            return self.count(budget);
        };
        let shared = AtomicU64::new(0);
        let cancelled = AtomicBool::new(false);
        let results: Vec<(u64, bool)> = first
            .start_symbols
            .par_iter()
            .map(|&k| {
                let limits = Limits { budget, start, shared_nodes: Some(&shared), cancelled: Some(&cancelled) };
                let mut search = self.search(limits);
                let mut delta = 0u64;
                let outcome = search.branch(0, k, &mut |_| {
                    delta += 1;
                    Ok(())
                });
                search.flush_nodes();
                if outcome.is_err() {
                    cancelled.store(true, Ordering::Relaxed);
                }
                (delta, outcome.is_ok())
            })
            .collect();
        EnumerationResult {
            delta: results.iter().map(|r| r.0).sum(),
            complete: results.iter().all(|r| r.1),
            nodes: shared.load(Ordering::Relaxed),
            elapsed: start.elapsed(),
        }
    }
}

impl Search<'_> {
    fn dfs<F>(&mut self, depth: usize, visit: &mut F) -> std::result::Result<(), Stop>
    where
        F: FnMut(&[u8]) -> std::result::Result<(), SinkError>,
    {
        if depth == self.en.orbits.len() {
            return visit(&self.cells).map_err(Stop::Sink);
        }
        let en = self.en;
        for &k in &en.orbits[depth].start_symbols {
            self.branch(depth, k, visit)?;
        }
        Ok(())
    }

    fn branch<F>(&mut self, depth: usize, k: u8, visit: &mut F) -> std::result::Result<(), Stop>
    where
        F: FnMut(&[u8]) -> std::result::Result<(), SinkError>,
    {
        self.tick()?;
        if self.place(depth, k) {
            let result = self.dfs(depth + 1, visit);
            self.unplace(depth, self.en.orbits[depth].cells.len());
            result?;
        }
        Ok(())
    }

    fn tick(&mut self) -> std::result::Result<(), Stop> {
        self.nodes += 1;
        if self.nodes.is_multiple_of(CHECK_EVERY) {
            let total = match self.limits.shared_nodes {
                Some(shared) => {
                    let added = self.nodes - self.reported;
                    self.reported = self.nodes;
                    shared.fetch_add(added, Ordering::Relaxed) + added
                }
                None => self.nodes,
            };
            if self.limits.cancelled.is_some_and(|c| c.load(Ordering::Relaxed)) {
                return Err(Stop::Budget);
            }
            if self.limits.budget.max_time.is_some_and(|t| self.limits.start.elapsed() >= t) {
                return Err(Stop::Budget);
            }
            if self.limits.budget.max_nodes.is_some_and(|m| total >= m) {
                return Err(Stop::Budget);
            }
        } else if self.limits.shared_nodes.is_none() && self.limits.budget.max_nodes.is_some_and(|m| self.nodes >= m) {
            return Err(Stop::Budget);
        }
        Ok(())
    }

    fn flush_nodes(&mut self) {
        if let Some(shared) = self.limits.shared_nodes {
            shared.fetch_add(self.nodes - self.reported, Ordering::Relaxed);
            self.reported = self.nodes;
        }
    }

    /// Writes the orbit of `depth` starting from symbol `k`; on a Latin
    /// conflict, rolls back and returns false.
    fn place(&mut self, depth: usize, k: u8) -> bool {
        let n = self.en.n;
        let orbit = &self.en.orbits[depth];
        let mut symbol = k;
        for (placed, &(r, c)) in orbit.cells.iter().enumerate() {
            let bit = 1u32 << symbol;
            if (self.row_used[r as usize] | self.col_used[c as usize]) & bit != 0 {
                self.unplace(depth, placed);
                return false;
            }
            self.row_used[r as usize] |= bit;
            self.col_used[c as usize] |= bit;
            self.cells[r as usize * n + c as usize] = symbol;
            symbol = self.en.gamma[symbol as usize];
        }
        true
    }

    fn unplace(&mut self, depth: usize, placed: usize) {
        let n = self.en.n;
        for &(r, c) in &self.en.orbits[depth].cells[..placed] {
            let cell = r as usize * n + c as usize;
            let bit = !(1u32 << self.cells[cell]);
            self.row_used[r as usize] &= bit;
            self.col_used[c as usize] &= bit;
            self.cells[cell] = EMPTY;
        }
    }
}

/// `Δ(Θ)`, exact when the budget suffices.
pub fn count(theta: &Isotopism, budget: Budget) -> Result<EnumerationResult> {
    Ok(Enumerator::new(theta)?.count(budget))
}

/// Streams every vertex of the reduced polytope, i.e. the reduced vector of
/// every square in `LS(Θ)`, exactly once and in a deterministic order.
pub fn enumerate_vertices<F>(theta: &Isotopism, budget: Budget, mut sink: F) -> Result<EnumerationResult>
where
    F: FnMut(&[u8]) -> std::result::Result<(), SinkError>,
{
    let red = Reduction::new(theta);
    Enumerator::new(theta)?.for_each(budget, |cells| sink(&red.restrict_cells(cells)))
}

/// Streams the squares of `LS(Θ)`.
pub fn enumerate_squares<F>(theta: &Isotopism, budget: Budget, mut sink: F) -> Result<EnumerationResult>
where
    F: FnMut(LatinSquare) -> std::result::Result<(), SinkError>,
{
    let n = theta.n();
    Enumerator::new(theta)?.for_each(budget, |cells| sink(LatinSquare::from_cells_unchecked(n, cells.to_vec())))
}

/// `Δ(Θ)` by filtering every Latin square of order `n <= 5`.
pub fn oracle_count(theta: &Isotopism) -> Result<u64> {
    let n = theta.n();
    if n > ORACLE_MAX_ORDER {
        return Err(Error::OrderTooLarge { n, max: ORACLE_MAX_ORDER });
    }
    let mut total = 0;
    for l in all_latin_squares(n)? {
        if is_autotopism(&l, theta)? {
            total += 1;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::CycleStructure;

    fn theta(a: &str, b: &str, c: &str, n: usize) -> Isotopism {
        Isotopism::parse(a, b, c, n).unwrap()
    }

    fn from_structures(la: &str, lb: &str, lc: &str) -> Isotopism {
        Isotopism::from_structures(
            &CycleStructure::parse(la).unwrap(),
            &CycleStructure::parse(lb).unwrap(),
            &CycleStructure::parse(lc).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn count_examples() {
        let r = count(&theta("(1 2 3)", "(1 2 3)", "(1 2 3)", 3), Budget::unlimited()).unwrap();
        assert_eq!((r.delta, r.complete), (3, true));
        let r = count(&theta("(1 2 3 4 5)", "(1 2 3 4 5)", "", 5), Budget::unlimited()).unwrap();
        assert_eq!(r.delta, 120);
        let r = count(&from_structures("1,0,0,0,0,1,0", "1,0,0,0,0,1,0", "1,0,0,0,0,1,0"), Budget::unlimited()).unwrap();
        assert_eq!(r.delta, 288);
    }

    #[test]
    fn vertices_examples() {
        let mut seen = Vec::new();
        let r = enumerate_vertices(&theta("(1 2)", "(1 2)", "", 2), Budget::unlimited(), |v| {
            seen.push(v.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(r.delta, 2);
        assert_eq!(seen.len(), 2);
        assert_ne!(seen[0], seen[1]);

        let r = enumerate_vertices(&Isotopism::identity(4), Budget::unlimited(), |_| Ok(())).unwrap();
        assert_eq!(r.delta, 576);

        let r = enumerate_vertices(&theta("(1 2 3 4)", "(1 2 3 4)", "(1 2)(3 4)", 4), Budget::unlimited(), |v| {
            assert_eq!(v.len(), 16);
            Ok(())
        })
        .unwrap();
        assert_eq!(r.delta, 8);
    }

    #[test]
    fn order_two_all_swaps_is_empty() {
        let t = theta("(1 2)", "(1 2)", "(1 2)", 2);
        assert_eq!(count(&t, Budget::unlimited()).unwrap().delta, 0);
        assert_eq!(oracle_count(&t).unwrap(), 0);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_count(&theta("(1 2 3)", "(1 2 3)", "(1 2 3)", 3)).unwrap(), 3);
        assert_eq!(oracle_count(&from_structures("1,0,1,0", "1,0,1,0", "1,0,1,0")).unwrap(), 9);
        assert_eq!(oracle_count(&from_structures("1,2,0,0,0", "1,2,0,0,0", "1,2,0,0,0")).unwrap(), 256);
        assert!(oracle_count(&Isotopism::identity(6)).is_err());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = count(&Isotopism::identity(5), Budget::nodes(100)).unwrap();
        assert!(!r.complete);
        assert!(r.nodes <= 100);
        let full = count(&Isotopism::identity(5), Budget::unlimited()).unwrap();
        assert_eq!(full.delta, 161_280);
        assert!(r.delta < full.delta);
    }

    #[test]
    fn parallel_matches_sequential() {
        for t in [
            Isotopism::identity(5),
            from_structures("0,0,2,0,0,0", "0,0,2,0,0,0", "3,0,1,0,0,0"),
        ] {
            let seq = count(&t, Budget::unlimited()).unwrap();
            let par = Enumerator::new(&t).unwrap().count_parallel(Budget::unlimited());
            assert_eq!((seq.delta, seq.nodes), (par.delta, par.nodes));
            assert!(par.complete);
        }
    }

    #[test]
    fn sink_failure_aborts() {
        let mut calls = 0;
        let r = enumerate_vertices(&Isotopism::identity(3), Budget::unlimited(), |_| {
            calls += 1;
            if calls == 2 {
                Err("disk full".into())
            } else {
                Ok(())
            }
        });
        assert!(matches!(r, Err(Error::Sink(_))));
        assert_eq!(calls, 2);
    }

    #[test]
    fn streaming_is_deterministic() {
        let t = from_structures("0,2,0,0", "0,2,0,0", "2,1,0,0");
        let collect = || {
            let mut out = Vec::new();
            enumerate_vertices(&t, Budget::unlimited(), |v| {
                out.push(v.to_vec());
                Ok(())
            })
            .unwrap();
            out
        };
        let first = collect();
        assert_eq!(first.len(), 32);
        assert_eq!(first, collect());
    }
}
