//! Constraint systems: the full system over `{0,1}^{n^3}` with the symmetry
//! rows `x_{ijk} = x_{α(i)β(j)γ(k)}`, and the reduced system over `S_Θ × [n]`
//! minus the forced zeros.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::latin::{BinaryVector, Isotopism, TripleIndex};
use crate::orbit::{ReducedIndexMap, Reduction};

/// Equation family a row was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RowFamily {
    /// Fixed column and symbol, summing over rows.
    #[serde(rename = "1.1")]
    FullColumnSymbol,
    /// Fixed row and symbol, summing over columns.
    #[serde(rename = "1.2")]
    FullRowSymbol,
    /// Fixed cell, summing over symbols.
    #[serde(rename = "1.3")]
    FullCell,
    #[serde(rename = "1.5")]
    Symmetry,
    #[serde(rename = "2.1")]
    ReducedColumnSymbol,
    #[serde(rename = "2.2")]
    ReducedRowSymbol,
    #[serde(rename = "2.3")]
    ReducedCell,
}

impl fmt::Display for RowFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            RowFamily::FullColumnSymbol => "1.1",
            RowFamily::FullRowSymbol => "1.2",
            RowFamily::FullCell => "1.3",
            RowFamily::Symmetry => "1.5",
            RowFamily::ReducedColumnSymbol => "2.1",
            RowFamily::ReducedRowSymbol => "2.2",
            RowFamily::ReducedCell => "2.3",
        };
        f.write_str(tag)
    }
}

/// Sorted `(column, coefficient)` pairs with no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseRow {
    entries: Vec<(u32, i64)>,
}

impl SparseRow {
    /// Accumulates repeated columns and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut entries: Vec<(u32, i64)> = terms.into_iter().map(|(c, v)| (c as u32, v)).collect();
        entries.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u32, i64)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|e| e.1 != 0);
        SparseRow { entries: merged }
    }

    pub fn entries(&self) -> &[(u32, i64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, x: &[u8]) -> i64 {
        self.entries.iter().map(|&(c, v)| v * x[c as usize] as i64).sum()
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    ncols: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(ncols: usize, rows: Vec<SparseRow>) -> Result<Self> {
        for row in &rows {
            if let Some(&(c, _)) = row.entries.last() {
                if c as usize >= ncols {
                    return Err(Error::LengthMismatch { expected: ncols, found: c as usize + 1 });
                }
            }
        }
        Ok(SparseMatrix { ncols, rows })
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let ncols = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| SparseRow::from_terms(r.iter().copied().enumerate()))
            .collect();
        SparseMatrix { ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.entries.len()).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut dense = vec![0; self.ncols];
                for &(c, v) in &r.entries {
                    dense[c as usize] = v;
                }
                dense
            })
            .collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in &row.entries {
                cols[c as usize].push((r, v));
            }
        }
        SparseMatrix {
            ncols: self.rows.len(),
            rows: cols.into_iter().map(SparseRow::from_terms).collect(),
        }
    }
}

/// Which coordinates the columns refer to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coordinates {
    /// All `n^3` triples in lexicographic order.
    Full { n: usize },
    Reduced(ReducedIndexMap),
}

impl Coordinates {
    pub fn len(&self) -> usize {
        match self {
            Coordinates::Full { n } => n * n * n,
            Coordinates::Reduced(map) => map.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn triple(&self, col: usize) -> TripleIndex {
        match self {
            Coordinates::Full { n } => TripleIndex::from_position(col, *n),
            Coordinates::Reduced(map) => map.coords()[col],
        }
    }
}

/// `A x = b` together with row provenance and duplicate counts.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    matrix: SparseMatrix,
    rhs: Vec<i64>,
    tags: Vec<RowFamily>,
    multiplicity: Vec<usize>,
    coords: Coordinates,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    rows: usize,
    cols: usize,
    row_tags: &'a [RowFamily],
    multiplicity: &'a [usize],
}

impl ConstraintSystem {
    fn from_parts(coords: Coordinates, rows: Vec<(SparseRow, i64, RowFamily)>) -> Self {
        let ncols = coords.len();
        let mut matrix_rows = Vec::with_capacity(rows.len());
        let mut rhs = Vec::with_capacity(rows.len());
        let mut tags = Vec::with_capacity(rows.len());
        for (row, b, tag) in rows {
            matrix_rows.push(row);
            rhs.push(b);
            tags.push(tag);
        }
        let multiplicity = vec![1; matrix_rows.len()];
        ConstraintSystem {
            matrix: SparseMatrix { ncols, rows: matrix_rows },
            rhs,
            tags,
            multiplicity,
            coords,
        }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[i64] {
        &self.rhs
    }

    pub fn tags(&self) -> &[RowFamily] {
        &self.tags
    }

    /// How many raw rows each surviving row stands for.
    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    pub fn coordinates(&self) -> &Coordinates {
        &self.coords
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_satisfied_by(&self, x: &[u8]) -> bool {
        x.len() == self.ncols()
            && self.matrix.rows.iter().zip(&self.rhs).all(|(row, &b)| row.dot(x) == b)
    }

    /// Merges rows with the same sparse pattern and right-hand side, keeping
    /// the first occurrence in place.
    pub fn dedup(&self) -> ConstraintSystem {
        let mut seen: HashMap<(&SparseRow, i64), usize> = HashMap::new();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut tags = Vec::new();
        let mut multiplicity: Vec<usize> = Vec::new();
        for (r, row) in self.matrix.rows.iter().enumerate() {
            match seen.get(&(row, self.rhs[r])) {
                Some(&kept) => multiplicity[kept] += self.multiplicity[r],
                None => {
                    seen.insert((row, self.rhs[r]), rows.len());
                    rows.push(row.clone());
                    rhs.push(self.rhs[r]);
                    tags.push(self.tags[r]);
                    multiplicity.push(self.multiplicity[r]);
                }
            }
        }
        ConstraintSystem {
            matrix: SparseMatrix { ncols: self.matrix.ncols, rows },
            rhs,
            tags,
            multiplicity,
            coords: self.coords.clone(),
        }
    }

    /// All 0/1 solutions, by depth-first search with interval bounds per row.
    pub fn binary_solutions(&self) -> Vec<Vec<u8>> {
        BinarySolver::new(self).run()
    }

    /// `rows cols nnz` header, then `r c v` lines, 1-based.
    pub fn write_matrix_market(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{} {} {}", self.nrows(), self.ncols(), self.matrix.nnz())?;
        for (r, row) in self.matrix.rows.iter().enumerate() {
            for &(c, v) in &row.entries {
                writeln!(out, "{} {} {}", r + 1, c + 1, v)?;
            }
        }
        Ok(())
    }

    /// One right-hand side entry per line.
    pub fn write_rhs(&self, mut out: impl Write) -> Result<()> {
        for b in &self.rhs {
            writeln!(out, "{b}")?;
        }
        Ok(())
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&Sidecar {
            rows: self.nrows(),
            cols: self.ncols(),
            row_tags: &self.tags,
            multiplicity: &self.multiplicity,
        })
        .expect("plain data serializes")
    }
}

/// The three assignment families `(1.1)–(1.3)` plus `n^3` symmetry rows.
/// A symmetry row whose two coordinates coincide is kept as an empty row.
pub fn full_system(theta: &Isotopism) -> ConstraintSystem {
    let n = theta.n();
    let mut rows = Vec::with_capacity(3 * n * n + n * n * n);
    for (family, make) in [
        (RowFamily::FullColumnSymbol, (|a, b, x| TripleIndex::new(x, a, b)) as fn(usize, usize, usize) -> TripleIndex),
        (RowFamily::FullRowSymbol, |a, b, x| TripleIndex::new(a, x, b)),
        (RowFamily::FullCell, |a, b, x| TripleIndex::new(a, b, x)),
    ] {
        for a in 0..n {
            for b in 0..n {
                let row = SparseRow::from_terms((0..n).map(|x| (make(a, b, x).position(n), 1)));
                rows.push((row, 1, family));
            }
        }
    }
    for p in 0..n * n * n {
        let t = TripleIndex::from_position(p, n);
        let image = theta.apply_triple(t).position(n);
        let row = SparseRow::from_terms([(p, 1), (image, -1)]);
        rows.push((row, 0, RowFamily::Symmetry));
    }
    ConstraintSystem::from_parts(Coordinates::Full { n }, rows)
}

/// The reduced system before duplicate rows are merged: `3n^2` rows, one per
/// `(j,k)`, `(i,k)`, `(i,j)`. Each non-forced summand adds `+1` to the column
/// of its canonical triple, so shared canonical triples accumulate.
pub fn reduced_system_raw(theta: &Isotopism) -> ConstraintSystem {
    reduced_rows(&Reduction::new(theta))
}

/// The reduced system with identical rows merged.
pub fn reduced_system(theta: &Isotopism) -> ConstraintSystem {
    reduced_system_raw(theta).dedup()
}

pub(crate) fn reduced_rows(red: &Reduction) -> ConstraintSystem {
    let n = red.n();
    let mut rows = Vec::with_capacity(3 * n * n);
    for (family, make) in [
        (RowFamily::ReducedColumnSymbol, (|a, b, x| TripleIndex::new(x, a, b)) as fn(usize, usize, usize) -> TripleIndex),
        (RowFamily::ReducedRowSymbol, |a, b, x| TripleIndex::new(a, x, b)),
        (RowFamily::ReducedCell, |a, b, x| TripleIndex::new(a, b, x)),
    ] {
        for a in 0..n {
            for b in 0..n {
                let terms = (0..n)
                    .map(|x| make(a, b, x))
                    .filter(|&t| !red.is_forced_zero(t))
                    .map(|t| {
                        let col = red
                            .reduced_column(t)
                            .expect("canonical triple of a non-forced triple is a reduced coordinate");
                        (col, 1)
                    });
                rows.push((SparseRow::from_terms(terms), 1, family));
            }
        }
    }
    ConstraintSystem::from_parts(Coordinates::Reduced(red.index_map().clone()), rows)
}

impl Reduction {
    /// `Ψ_Θ`: zero on forced zeros, `x_{u_Θ v_Θ w_Θ}` elsewhere.
    pub fn lift(&self, v: &[u8]) -> Result<BinaryVector> {
        if v.len() != self.d() {
            return Err(Error::LengthMismatch { expected: self.d(), found: v.len() });
        }
        let n = self.n();
        let bits = (0..n * n * n)
            .map(|p| {
                let t = TripleIndex::from_position(p, n);
                if self.is_forced_zero(t) {
                    0
                } else {
                    v[self.reduced_column(t).expect("non-forced triple has a column")]
                }
            })
            .collect();
        BinaryVector::new(n, bits)
    }

    /// Reads the reduced coordinates off a Θ-symmetric point.
    pub fn restrict(&self, w: &BinaryVector) -> Result<Vec<u8>> {
        let n = self.n();
        if w.n() != n {
            return Err(Error::DegreeMismatch { expected: n, found: w.n() });
        }
        let theta = self.theta();
        for p in 0..n * n * n {
            let t = TripleIndex::from_position(p, n);
            if self.is_forced_zero(t) && w.get(t) != 0 {
                return Err(Error::NotSymmetric(format!("nonzero at forced zero {t}")));
            }
            let image = theta.apply_triple(t);
            if w.get(t) != w.get(image) {
                return Err(Error::NotSymmetric(format!("x{t} differs from x{image}")));
            }
        }
        Ok(self.index_map().coords().iter().map(|&t| w.get(t)).collect())
    }

    /// Reduced vector of a Latin square given as 0-based row-major cells.
    /// The square is assumed to admit Θ.
    pub fn restrict_cells(&self, cells: &[u8]) -> Vec<u8> {
        let n = self.n();
        self.index_map()
            .coords()
            .iter()
            .map(|t| (cells[t.i * n + t.j] as usize == t.k) as u8)
            .collect()
    }
}

pub fn lift(theta: &Isotopism, v: &[u8]) -> Result<BinaryVector> {
    Reduction::new(theta).lift(v)
}

pub fn restrict(theta: &Isotopism, w: &BinaryVector) -> Result<Vec<u8>> {
    Reduction::new(theta).restrict(w)
}

struct BinarySolver<'a> {
    system: &'a ConstraintSystem,
    // per column: (row, coefficient)
    occurrences: Vec<Vec<(usize, i64)>>,
    sum: Vec<i64>,
    pos_left: Vec<i64>,
    neg_left: Vec<i64>,
}

impl<'a> BinarySolver<'a> {
    fn new(system: &'a ConstraintSystem) -> Self {
        let mut occurrences = vec![Vec::new(); system.ncols()];
        let mut pos_left = vec![0; system.nrows()];
        let mut neg_left = vec![0; system.nrows()];
        for (r, row) in system.matrix.rows.iter().enumerate() {
            for &(c, v) in &row.entries {
                occurrences[c as usize].push((r, v));
                if v > 0 {
                    pos_left[r] += v;
                } else {
                    neg_left[r] += v;
                }
            }
        }
        BinarySolver { system, occurrences, sum: vec![0; system.nrows()], pos_left, neg_left }
    }

    fn run(mut self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        if self.feasible_all() {
            let mut x = vec![0u8; self.system.ncols()];
            self.search(0, &mut x, &mut out);
        }
        out
    }

    fn feasible_all(&self) -> bool {
        (0..self.system.nrows()).all(|r| self.feasible(r))
    }

    fn feasible(&self, r: usize) -> bool {
        let b = self.system.rhs[r];
        self.sum[r] + self.neg_left[r] <= b && b <= self.sum[r] + self.pos_left[r]
    }

    fn assign(&mut self, col: usize, value: i64, sign: i64) {
        for &(r, v) in &self.occurrences[col] {
            if v > 0 {
                self.pos_left[r] -= sign * v;
            } else {
                self.neg_left[r] -= sign * v;
            }
            self.sum[r] += sign * value * v;
        }
    }

    fn search(&mut self, col: usize, x: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if col == x.len() {
            out.push(x.clone());
            return;
        }
        for value in [0u8, 1] {
            self.assign(col, value as i64, 1);
            let ok = self.occurrences[col].iter().all(|&(r, _)| self.feasible(r));
            if ok {
                x[col] = value;
                self.search(col + 1, x, out);
                x[col] = 0;
            }
            self.assign(col, value as i64, -1);
        }
    }
}
