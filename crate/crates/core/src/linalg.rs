//! Exact rank and affine dimension over the rationals.
//!
//! Both are built on [`Span`], a reduced row echelon form kept with integer
//! rows and one common denominator. Arithmetic starts in `i128` with checked
//! operations and moves to `BigInt` the first time anything overflows.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_vertices, Budget, EnumerationResult};
use crate::error::{Error, Result};
use crate::latin::Isotopism;
use crate::orbit::Reduction;
use crate::perm::CycleStructure;
use crate::system::{reduced_system, SparseMatrix};

#[derive(Debug)]
struct Overflow;

trait Exact: Clone + Debug + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> std::result::Result<Self, Overflow>;
    fn mul(&self, other: &Self) -> std::result::Result<Self, Overflow>;
    fn sub(&self, other: &Self) -> std::result::Result<Self, Overflow>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, other: &Self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Exact for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> std::result::Result<Self, Overflow> {
        self.checked_neg().ok_or(Overflow)
    }
    fn mul(&self, other: &Self) -> std::result::Result<Self, Overflow> {
        self.checked_mul(*other).ok_or(Overflow)
    }
    fn sub(&self, other: &Self) -> std::result::Result<Self, Overflow> {
        self.checked_sub(*other).ok_or(Overflow)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Exact for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> std::result::Result<Self, Overflow> {
        Ok(-self)
    }
    fn mul(&self, other: &Self) -> std::result::Result<Self, Overflow> {
        Ok(self * other)
    }
    fn sub(&self, other: &Self) -> std::result::Result<Self, Overflow> {
        Ok(self - other)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// RREF `rows / denom`: row `r` holds `denom` at column `pivots[r]` and zero
/// at every other pivot column.
#[derive(Clone, Debug)]
struct Rref<T> {
    width: usize,
    denom: T,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
    is_pivot: Vec<bool>,
}

impl<T: Exact> Rref<T> {
    fn new(width: usize) -> Self {
        Rref { width, denom: T::one(), rows: Vec::new(), pivots: Vec::new(), is_pivot: vec![false; width] }
    }

    fn convert<U: Exact>(&self, f: impl Fn(&T) -> U) -> Rref<U> {
        Rref {
            width: self.width,
            denom: f(&self.denom),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
            pivots: self.pivots.clone(),
            is_pivot: self.is_pivot.clone(),
        }
    }

    /// `denom·w − Σ w[p_r]·rows[r]`, or `None` when `w` lies in the span.
    fn residual(&self, w: &[i64]) -> std::result::Result<Option<Vec<T>>, Overflow> {
        let coeffs: Vec<(usize, T)> = self
            .pivots
            .iter()
            .enumerate()
            .filter(|&(_, &p)| w[p] != 0)
            .map(|(r, &p)| (r, T::from_i64(w[p])))
            .collect();
        let mut u = vec![T::zero(); self.width];
        let mut nonzero = false;
        for c in 0..self.width {
            if self.is_pivot[c] {
                continue;
            }
            let mut acc = self.denom.mul(&T::from_i64(w[c]))?;
            for (r, coeff) in &coeffs {
                let entry = &self.rows[*r][c];
                if !entry.is_zero() {
                    acc = acc.sub(&coeff.mul(entry)?)?;
                }
            }
            nonzero |= !acc.is_zero();
            u[c] = acc;
        }
        Ok(nonzero.then_some(u))
    }

    /// Adds a residual returned by [`Rref::residual`] as a new pivot row.
    fn insert(&mut self, mut u: Vec<T>) -> std::result::Result<(), Overflow> {
        let q = u.iter().position(|x| !x.is_zero()).expect("residual is nonzero");
        if u[q].is_negative() {
            for x in u.iter_mut() {
                *x = x.neg()?;
            }
        }
        let uq = u[q].clone();
        for row in self.rows.iter_mut() {
            let f = row[q].clone();
            for c in 0..self.width {
                let scaled = row[c].mul(&uq)?;
                row[c] = if f.is_zero() || u[c].is_zero() { scaled } else { scaled.sub(&f.mul(&u[c])?)? };
            }
        }
        let mut new_row = Vec::with_capacity(self.width);
        for x in &u {
            new_row.push(x.mul(&self.denom)?);
        }
        self.rows.push(new_row);
        self.denom = self.denom.mul(&uq)?;
        self.pivots.push(q);
        self.is_pivot[q] = true;
        self.normalize();
        Ok(())
    }

    fn normalize(&mut self) {
        let mut g = self.denom.clone();
        for x in self.rows.iter().flatten() {
            if g == T::one() {
                return;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if g == T::one() || g.is_zero() {
            return;
        }
        self.denom = self.denom.div_exact(&g);
        for x in self.rows.iter_mut().flatten() {
            *x = x.div_exact(&g);
        }
    }
}

#[derive(Clone, Debug)]
enum Span {
    Small(Rref<i128>),
    Big(Rref<BigInt>),
}

impl Span {
    fn new(width: usize) -> Self {
        Span::Small(Rref::new(width))
    }

    fn rank(&self) -> usize {
        match self {
            Span::Small(r) => r.rows.len(),
            Span::Big(r) => r.rows.len(),
        }
    }

    fn promote(&mut self) {
        if let Span::Small(r) = self {
            *self = Span::Big(r.convert(Exact::to_big));
        }
    }

    /// Adds `w` to the spanning set; true if the rank grew.
    fn add(&mut self, w: &[i64]) -> bool {
        if let Span::Small(r) = self {
            let grown = r.residual(w).and_then(|u| match u {
                Some(u) => {
                    let mut attempt = r.clone();
                    attempt.insert(u).map(|_| Some(attempt))
                }
                None => Ok(None),
            });
            match grown {
                Ok(Some(attempt)) => {
                    *r = attempt;
                    return true;
                }
                Ok(None) => return false,
                Err(Overflow) => self.promote(),
            }
        }
        let Span::Big(r) = self else { unreachable!() };
        match r.residual(w).expect("bigint arithmetic cannot overflow") {
            Some(u) => {
                r.insert(u).expect("bigint arithmetic cannot overflow");
                true
            }
            None => false,
        }
    }

    fn is_big(&self) -> bool {
        matches!(self, Span::Big(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    FractionFreeElimination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub method: RankMethod,
    /// Always true: every step is exact integer arithmetic.
    pub certified: bool,
    /// Whether intermediates outgrew 128-bit integers.
    pub big_integers: bool,
}

/// Exact rank over the rationals, pivoting on the first nonzero column.
pub fn matrix_rank(m: &SparseMatrix) -> RankReport {
    let mut span = Span::new(m.ncols());
    let mut dense = vec![0i64; m.ncols()];
    for row in m.rows() {
        dense.iter_mut().for_each(|x| *x = 0);
        for &(c, v) in row.entries() {
            dense[c as usize] = v;
        }
        span.add(&dense);
        if span.rank() == m.ncols() {
            break;
        }
    }
    RankReport { rank: span.rank(), method: RankMethod::FractionFreeElimination, certified: true, big_integers: span.is_big() }
}

/// Affine hull of a stream of 0/1 vectors, stored as an anchor plus an
/// echelon basis of differences.
#[derive(Clone, Debug)]
pub struct VertexBasis {
    len: usize,
    anchor: Option<Vec<u8>>,
    span: Span,
    cap: Option<usize>,
    scratch: Vec<i64>,
    seen: u64,
}

impl VertexBasis {
    pub fn new(len: usize) -> Self {
        VertexBasis { len, anchor: None, span: Span::new(len), cap: None, scratch: vec![0; len], seen: 0 }
    }

    /// Stops growing once `dim` reaches `cap`; later vertices are only counted.
    pub fn with_cap(len: usize, cap: usize) -> Self {
        VertexBasis { cap: Some(cap), ..VertexBasis::new(len) }
    }

    pub fn ambient_len(&self) -> usize {
        self.len
    }

    pub fn anchor(&self) -> Option<&[u8]> {
        self.anchor.as_deref()
    }

    /// Affine dimension so far; `None` before the first vertex.
    pub fn dim(&self) -> Option<usize> {
        self.anchor.as_ref().map(|_| self.span.rank())
    }

    pub fn vertices_seen(&self) -> u64 {
        self.seen
    }

    pub fn is_saturated(&self) -> bool {
        let limit = self.cap.unwrap_or(self.len).min(self.len);
        self.anchor.is_some() && self.span.rank() >= limit
    }

    /// Adds a vertex; returns true if the dimension grew.
    pub fn push(&mut self, v: &[u8]) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::LengthMismatch { expected: self.len, found: v.len() });
        }
        self.seen += 1;
        let Some(anchor) = &self.anchor else {
            self.anchor = Some(v.to_vec());
            return Ok(false);
        };
        if self.is_saturated() {
            return Ok(false);
        }
        for ((s, &x), &a) in self.scratch.iter_mut().zip(v).zip(anchor) {
            *s = x as i64 - a as i64;
        }
        if self.scratch.iter().all(|&x| x == 0) {
            return Ok(false);
        }
        Ok(self.span.add(&self.scratch))
    }
}

/// Dimension of the affine hull of a nonempty stream of equal-length vectors.
pub fn affine_dimension<I, V>(vertices: I) -> Result<usize>
where
    I: IntoIterator<Item = V>,
    V: AsRef<[u8]>,
{
    let mut iter = vertices.into_iter();
    let first = iter.next().ok_or(Error::EmptyStream)?;
    let mut basis = VertexBasis::new(first.as_ref().len());
    basis.push(first.as_ref())?;
    for v in iter {
        basis.push(v.as_ref())?;
    }
    Ok(basis.dim().expect("anchor was pushed"))
}

/// One line of the vertex/dimension tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
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
    pub nodes: u64,
}

#[derive(Serialize)]
struct DimRecord<'a> {
    n: usize,
    l_alpha: &'a CycleStructure,
    l_beta: &'a CycleStructure,
    l_gamma: &'a CycleStructure,
    d_theta: usize,
    delta: Option<u64>,
    dim: Option<usize>,
    bound: usize,
}

impl DimReport {
    /// `{n, l_alpha, l_beta, l_gamma, d_theta, delta, dim, bound}` with nulls
    /// for unknown entries.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&DimRecord {
            n: self.n,
            l_alpha: &self.l_alpha,
            l_beta: &self.l_beta,
            l_gamma: &self.l_gamma,
            d_theta: self.d_theta,
            delta: self.delta,
            dim: self.dim,
            bound: self.bound,
        })
        .expect("plain record serializes")
    }

    pub fn bound_holds(&self) -> bool {
        self.dim.is_none_or(|d| d <= self.bound)
    }
}

/// `d_Θ` and `d_Θ − rank(A'_Θ)`, without enumerating anything.
pub fn rank_bound(theta: &Isotopism) -> (usize, RankReport) {
    let system = reduced_system(theta);
    (system.ncols(), matrix_rank(system.matrix()))
}

/// Fills every column of a table row. `dim` and `delta` stay `None` when the
/// budget runs out. With `cap_at_bound`, the vertex basis stops growing once
/// it reaches the bound.
pub fn dim_report_with(theta: &Isotopism, budget: Budget, cap_at_bound: bool) -> Result<DimReport> {
    let (d_theta, rank) = rank_bound(theta);
    let bound = d_theta - rank.rank;
    let mut basis = if cap_at_bound { VertexBasis::with_cap(d_theta, bound) } else { VertexBasis::new(d_theta) };
    let result: EnumerationResult = enumerate_vertices(theta, budget, |v| {
        basis.push(v)?;
        Ok(())
    })?;
    let [l_alpha, l_beta, l_gamma] = theta.structure();
    Ok(DimReport {
        n: theta.n(),
        l_alpha,
        l_beta,
        l_gamma,
        d_theta,
        rank: rank.rank,
        bound,
        delta: result.complete.then_some(result.delta),
        dim: if result.complete { basis.dim() } else { None },
        complete: result.complete,
        nodes: result.nodes,
    })
}

pub fn dim_report(theta: &Isotopism, budget: Budget) -> Result<DimReport> {
    dim_report_with(theta, budget, true)
}

/// Affine dimension of the lifted vertex set in `{0,1}^{n³}`.
pub fn full_dimension(theta: &Isotopism, budget: Budget) -> Result<Option<usize>> {
    let red = Reduction::new(theta);
    let n = theta.n();
    let mut basis = VertexBasis::new(n * n * n);
    let result = enumerate_vertices(theta, budget, |v| {
        let full = red.lift(v)?;
        basis.push(full.bits())?;
        Ok(())
    })?;
    Ok(if result.complete { basis.dim() } else { None })
}
