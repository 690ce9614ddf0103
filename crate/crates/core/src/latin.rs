//! Latin squares, isotopisms and the embedding of `LS(n)` into `{0,1}^{n^3}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{CycleStructure, Permutation};

/// Largest order handled anywhere in the crate; symbol masks are `u32`.
pub const MAX_ORDER: usize = 32;

/// Largest order accepted by the brute-force oracle.
pub const ORACLE_MAX_ORDER: usize = 5;

/// Coordinate `(i, j, k)` of `{0,1}^{n^3}`, stored 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleIndex {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl TripleIndex {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        TripleIndex { i, j, k }
    }

    /// From 1-based components.
    pub fn one_based(i: usize, j: usize, k: usize) -> Self {
        TripleIndex::new(i - 1, j - 1, k - 1)
    }

    /// Lexicographic position: `k` fastest, then `j`, then `i`.
    #[inline]
    pub fn position(&self, n: usize) -> usize {
        (self.i * n + self.j) * n + self.k
    }

    #[inline]
    pub fn from_position(pos: usize, n: usize) -> Self {
        TripleIndex::new(pos / (n * n), (pos / n) % n, pos % n)
    }

    pub fn to_one_based(self) -> [usize; 3] {
        [self.i + 1, self.j + 1, self.k + 1]
    }
}

impl fmt::Display for TripleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i + 1, self.j + 1, self.k + 1)
    }
}

/// A Latin square over `[n]`, cells stored row-major and 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u8>,
}

impl LatinSquare {
    /// Validates an array of 1-based entries.
    pub fn validate(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare(n));
        }
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge { n, max: MAX_ORDER });
        }
        let mut cells = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v == 0 || v > n {
                    return Err(Error::EntryOutOfRange { row: r + 1, col: c + 1, value: v });
                }
                cells.push((v - 1) as u8);
            }
        }
        Self::from_cells(n, cells)
    }

    /// Validates 0-based row-major cells.
    pub fn from_cells(n: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::NotSquare(n));
        }
        for r in 0..n {
            let mut seen = 0u64;
            for c in 0..n {
                let v = cells[r * n + c] as usize;
                if v >= n {
                    return Err(Error::EntryOutOfRange { row: r + 1, col: c + 1, value: v + 1 });
                }
                if seen & (1 << v) != 0 {
                    return Err(Error::RowDuplicate { row: r + 1, symbol: v + 1 });
                }
                seen |= 1 << v;
            }
        }
        for c in 0..n {
            let mut seen = 0u64;
            for r in 0..n {
                let v = cells[r * n + c] as usize;
                if seen & (1 << v) != 0 {
                    return Err(Error::ColumnDuplicate { col: c + 1, symbol: v + 1 });
                }
                seen |= 1 << v;
            }
        }
        Ok(LatinSquare { n, cells })
    }

    pub(crate) fn from_cells_unchecked(n: usize, cells: Vec<u8>) -> Self {
        debug_assert!(Self::from_cells(n, cells.clone()).is_ok());
        LatinSquare { n, cells }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based symbol at 0-based `(row, col)`.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.cells[row * self.n + col] as usize
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn rows_one_based(&self) -> Vec<Vec<usize>> {
        self.cells
            .chunks(self.n)
            .map(|r| r.iter().map(|&v| v as usize + 1).collect())
            .collect()
    }

    /// Text format: `n` on the first line, then `n` rows of 1-based symbols.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or(Error::NotSquare(0))?
            .parse()
            .map_err(|_| Error::NotSquare(0))?;
        let rows = lines
            .take(n)
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| Error::NotSquare(n)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != n {
            return Err(Error::NotSquare(n));
        }
        Self::validate(&rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.rows_one_based() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// The cyclic square `l_{i,j} = i + j mod n`.
    pub fn cyclic(n: usize) -> Self {
        let cells = (0..n * n).map(|p| ((p / n + p % n) % n) as u8).collect();
        LatinSquare::from_cells_unchecked(n, cells)
    }
}

/// An isotopism `(alpha, beta, gamma)` acting on rows, columns and symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isotopism {
    pub alpha: Permutation,
    pub beta: Permutation,
    pub gamma: Permutation,
}

impl Isotopism {
    pub fn new(alpha: Permutation, beta: Permutation, gamma: Permutation) -> Result<Self> {
        let n = alpha.degree();
        for p in [&beta, &gamma] {
            if p.degree() != n {
                return Err(Error::DegreeMismatch { expected: n, found: p.degree() });
            }
        }
        if n == 0 {
            return Err(Error::NotSquare(0));
        }
        Ok(Isotopism { alpha, beta, gamma })
    }

    pub fn parse(alpha: &str, beta: &str, gamma: &str, n: usize) -> Result<Self> {
        Self::new(
            Permutation::parse(alpha, n)?,
            Permutation::parse(beta, n)?,
            Permutation::parse(gamma, n)?,
        )
    }

    pub fn identity(n: usize) -> Self {
        let id = Permutation::identity(n);
        Isotopism { alpha: id.clone(), beta: id.clone(), gamma: id }
    }

    /// Canonical representative with the given cycle structures.
    pub fn from_structures(la: &CycleStructure, lb: &CycleStructure, lc: &CycleStructure) -> Result<Self> {
        Self::new(la.representative(), lb.representative(), lc.representative())
    }

    pub fn n(&self) -> usize {
        self.alpha.degree()
    }

    pub fn components(&self) -> [&Permutation; 3] {
        [&self.alpha, &self.beta, &self.gamma]
    }

    pub fn structure(&self) -> [CycleStructure; 3] {
        [
            self.alpha.cycle_structure(),
            self.beta.cycle_structure(),
            self.gamma.cycle_structure(),
        ]
    }

    /// Componentwise `self ∘ other`.
    pub fn compose(&self, other: &Isotopism) -> Result<Isotopism> {
        Isotopism::new(
            self.alpha.compose(&other.alpha)?,
            self.beta.compose(&other.beta)?,
            self.gamma.compose(&other.gamma)?,
        )
    }

    pub fn inverse(&self) -> Isotopism {
        Isotopism {
            alpha: self.alpha.inverse(),
            beta: self.beta.inverse(),
            gamma: self.gamma.inverse(),
        }
    }

    /// `(alpha(i), beta(j), gamma(k))`.
    #[inline]
    pub fn apply_triple(&self, t: TripleIndex) -> TripleIndex {
        TripleIndex::new(self.alpha.apply(t.i), self.beta.apply(t.j), self.gamma.apply(t.k))
    }

    #[inline]
    pub fn power_triple(&self, power: i64, t: TripleIndex) -> TripleIndex {
        TripleIndex::new(
            self.alpha.power_apply(power, t.i),
            self.beta.power_apply(power, t.j),
            self.gamma.power_apply(power, t.k),
        )
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DegreeMismatch { expected: n, found: self.n() });
        }
        Ok(())
    }
}

impl fmt::Display for Isotopism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.alpha, self.beta, self.gamma)
    }
}

/// A point of `{0,1}^{n^3}` in lexicographic `(i, j, k)` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryVector {
    n: usize,
    bits: Vec<u8>,
}

impl BinaryVector {
    pub fn new(n: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != n * n * n {
            return Err(Error::LengthMismatch { expected: n * n * n, found: bits.len() });
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::NotFeasible(format!("entry {b} is not 0/1")));
        }
        Ok(BinaryVector { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    #[inline]
    pub fn get(&self, t: TripleIndex) -> u8 {
        self.bits[t.position(self.n)]
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Checks the three slice-sum families; returns the first violated slice.
    pub fn check_slices(&self) -> Result<()> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let fixed_jk: u32 = (0..n).map(|i| self.get(TripleIndex::new(i, a, b)) as u32).sum();
                if fixed_jk != 1 {
                    return Err(Error::NotFeasible(format!("column {} symbol {} sums to {fixed_jk}", a + 1, b + 1)));
                }
                let fixed_ik: u32 = (0..n).map(|j| self.get(TripleIndex::new(a, j, b)) as u32).sum();
                if fixed_ik != 1 {
                    return Err(Error::NotFeasible(format!("row {} symbol {} sums to {fixed_ik}", a + 1, b + 1)));
                }
                let fixed_ij: u32 = (0..n).map(|k| self.get(TripleIndex::new(a, b, k)) as u32).sum();
                if fixed_ij != 1 {
                    return Err(Error::NotFeasible(format!("cell ({},{}) sums to {fixed_ij}", a + 1, b + 1)));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn embed(square: &LatinSquare) -> BinaryVector {
    let n = square.n();
    let mut bits = vec![0u8; n * n * n];
    for i in 0..n {
        for j in 0..n {
            bits[TripleIndex::new(i, j, square.get(i, j)).position(n)] = 1;
        }
    }
    BinaryVector { n, bits }
}

pub fn unembed(v: &BinaryVector) -> Result<LatinSquare> {
    v.check_slices()?;
    let n = v.n();
    let mut cells = vec![0u8; n * n];
    for (cell, slot) in cells.iter_mut().enumerate() {
        let k = v.bits[cell * n..(cell + 1) * n]
            .iter()
            .position(|&b| b == 1)
            .expect("slice sums checked");
        *slot = k as u8;
    }
    Ok(LatinSquare::from_cells_unchecked(n, cells))
}

/// `L^Θ`: cell `(alpha(i), beta(j))` receives `gamma(l_{i,j})`.
pub fn apply_isotopism(square: &LatinSquare, theta: &Isotopism) -> Result<LatinSquare> {
    let n = square.n();
    theta.check_degree(n)?;
    let mut cells = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            let target = theta.alpha.apply(i) * n + theta.beta.apply(j);
            cells[target] = theta.gamma.apply(square.get(i, j)) as u8;
        }
    }
    Ok(LatinSquare::from_cells_unchecked(n, cells))
}

pub fn is_autotopism(square: &LatinSquare, theta: &Isotopism) -> Result<bool> {
    let n = square.n();
    theta.check_degree(n)?;
    Ok((0..n).all(|i| {
        (0..n).all(|j| {
            square.get(theta.alpha.apply(i), theta.beta.apply(j)) == theta.gamma.apply(square.get(i, j))
        })
    }))
}

/// Every Latin square of order `n <= 5`, in lexicographic row-major order.
///
/// Plain cell-by-cell backtracking with row and column masks; it shares no
/// code with the symmetry-aware enumerator and serves as its oracle.
pub fn all_latin_squares(n: usize) -> Result<AllLatinSquares> {
    if n > ORACLE_MAX_ORDER {
        return Err(Error::OrderTooLarge { n, max: ORACLE_MAX_ORDER });
    }
    if n == 0 {
        return Err(Error::NotSquare(0));
    }
    Ok(AllLatinSquares {
        n,
        cells: vec![0; n * n],
        row_used: vec![0; n],
        col_used: vec![0; n],
        pos: 0,
        done: false,
    })
}

pub struct AllLatinSquares {
    n: usize,
    // symbol + 1, 0 for empty
    cells: Vec<u8>,
    row_used: Vec<u32>,
    col_used: Vec<u32>,
    pos: usize,
    done: bool,
}

impl Iterator for AllLatinSquares {
    type Item = LatinSquare;

    fn next(&mut self) -> Option<LatinSquare> {
        let n = self.n;
        if self.done {
            return None;
        }
        if self.pos == n * n {
            self.pos -= 1;
        }
        loop {
            let (r, c) = (self.pos / n, self.pos % n);
            let current = self.cells[self.pos];
            if current > 0 {
                let bit = 1 << (current - 1);
                self.row_used[r] &= !bit;
                self.col_used[c] &= !bit;
            }
            let used = self.row_used[r] | self.col_used[c];
            let next = (current as usize..n).find(|&s| used & (1 << s) == 0);
            match next {
                Some(s) => {
                    self.cells[self.pos] = s as u8 + 1;
                    self.row_used[r] |= 1 << s;
                    self.col_used[c] |= 1 << s;
                    self.pos += 1;
                    if self.pos == n * n {
                        let cells = self.cells.iter().map(|v| v - 1).collect();
                        return Some(LatinSquare::from_cells_unchecked(n, cells));
                    }
                    self.cells[self.pos] = 0;
                }
                None => {
                    self.cells[self.pos] = 0;
                    if self.pos == 0 {
                        self.done = true;
                        return None;
                    }
                    self.pos -= 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(rows: &[&[usize]]) -> Result<LatinSquare> {
        LatinSquare::validate(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn validate_examples() {
        assert!(sq(&[&[1, 2], &[2, 1]]).is_ok());
        assert!(matches!(sq(&[&[1, 2], &[1, 2]]), Err(Error::ColumnDuplicate { col: 1, symbol: 1 })));
        assert!(sq(&[&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]]).is_ok());
        assert!(matches!(sq(&[&[1, 1], &[2, 2]]), Err(Error::RowDuplicate { row: 1, symbol: 1 })));
        assert!(matches!(sq(&[&[1, 3], &[2, 1]]), Err(Error::EntryOutOfRange { row: 1, col: 2, value: 3 })));
        assert!(matches!(sq(&[&[1, 2], &[2]]), Err(Error::NotSquare(_))));
    }

    #[test]
    fn embed_order_two() {
        let l = sq(&[&[1, 2], &[2, 1]]).unwrap();
        let v = embed(&l);
        let ones: Vec<_> = (0..8)
            .filter(|&p| v.bits()[p] == 1)
            .map(|p| TripleIndex::from_position(p, 2).to_string())
            .collect();
        assert_eq!(ones, ["(1,1,1)", "(1,2,2)", "(2,1,2)", "(2,2,1)"]);
        assert_eq!(v.to_string(), "10010110");
        v.check_slices().unwrap();
        assert_eq!(unembed(&v).unwrap(), l);
    }

    #[test]
    fn unembed_rejects_infeasible() {
        let v = BinaryVector::new(2, vec![1, 0, 1, 0, 0, 1, 0, 1]).unwrap();
        assert!(matches!(unembed(&v), Err(Error::NotFeasible(_))));
        assert!(BinaryVector::new(2, vec![0; 7]).is_err());
    }

    #[test]
    fn isotopism_examples() {
        let l = sq(&[&[1, 2], &[2, 1]]).unwrap();
        let id = Isotopism::identity(2);
        assert_eq!(apply_isotopism(&l, &id).unwrap(), l);
        assert!(is_autotopism(&l, &id).unwrap());

        let swap_rows = Isotopism::parse("(1 2)", "", "", 2).unwrap();
        assert_eq!(apply_isotopism(&l, &swap_rows).unwrap(), sq(&[&[2, 1], &[1, 2]]).unwrap());
        assert!(!is_autotopism(&l, &swap_rows).unwrap());

        let both = Isotopism::parse("(1 2)", "(1 2)", "", 2).unwrap();
        assert!(is_autotopism(&l, &both).unwrap());

        let cyclic = LatinSquare::cyclic(3);
        let t = Isotopism::parse("(1 2 3)", "(1 3 2)", "", 3).unwrap();
        assert_eq!(apply_isotopism(&cyclic, &t).unwrap(), cyclic);

        assert!(matches!(
            is_autotopism(&l, &Isotopism::identity(3)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn oracle_counts() {
        assert_eq!(all_latin_squares(1).unwrap().count(), 1);
        assert_eq!(all_latin_squares(2).unwrap().count(), 2);
        assert_eq!(all_latin_squares(3).unwrap().count(), 12);
        assert_eq!(all_latin_squares(4).unwrap().count(), 576);
        assert!(matches!(all_latin_squares(6), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn oracle_is_lexicographic() {
        let all: Vec<_> = all_latin_squares(3).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0].cells() < w[1].cells()));
        assert_eq!(all[0], LatinSquare::cyclic(3));
    }

    #[test]
    fn text_roundtrip() {
        let l = LatinSquare::cyclic(4);
        assert_eq!(LatinSquare::parse_text(&l.to_text()).unwrap(), l);
        assert!(LatinSquare::parse_text("2\n1 2\n").is_err());
    }
}
