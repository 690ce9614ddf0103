//! Index machinery derived from an isotopism: forced zeros, representative
//! cells, the canonical triple map and the reduced coordinate space.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::latin::{Isotopism, TripleIndex};
use crate::perm::CycleStructure;

/// Triples `(i,j,k)` that vanish on every Θ-symmetric feasible point:
/// two coordinates fixed by their permutation and the third not fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedZeroSet {
    n: usize,
    triples: BTreeSet<TripleIndex>,
}

impl FixedZeroSet {
    pub fn contains(&self, t: &TripleIndex) -> bool {
        self.triples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TripleIndex> {
        self.triples.iter()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `l¹α·l¹β·(n−l¹γ) + l¹α·l¹γ·(n−l¹β) + l¹β·l¹γ·(n−l¹α)`.
    pub fn expected_len(la: &CycleStructure, lb: &CycleStructure, lc: &CycleStructure) -> usize {
        let n = la.n();
        let (fa, fb, fc) = (la.fixed_points(), lb.fixed_points(), lc.fixed_points());
        fa * fb * (n - fc) + fa * fc * (n - fb) + fb * fc * (n - fa)
    }
}

/// `S_Θ`: rows that are α-cycle minima; all columns for moved rows, β-cycle
/// minima for fixed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentativeCells {
    n: usize,
    cells: Vec<(usize, usize)>,
}

impl RepresentativeCells {
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cells.binary_search(&(i, j)).is_ok()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Reduced coordinates `S_Θ × [n] \ S_Fix(Θ)` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedIndexMap {
    n: usize,
    coords: Vec<TripleIndex>,
    // full lexicographic position -> reduced position, u32::MAX when absent
    lookup: Vec<u32>,
}

#[derive(Serialize)]
struct ReducedIndexMapJson {
    n: usize,
    d: usize,
    coords: Vec<[usize; 3]>,
}

impl ReducedIndexMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[TripleIndex] {
        &self.coords
    }

    pub fn position_of(&self, t: &TripleIndex) -> Option<usize> {
        match self.lookup[t.position(self.n)] {
            u32::MAX => None,
            p => Some(p as usize),
        }
    }

    /// `{ "n": …, "d": …, "coords": [[i,j,k], …] }` with 1-based triples.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ReducedIndexMapJson {
            n: self.n,
            d: self.len(),
            coords: self.coords.iter().map(|t| t.to_one_based()).collect(),
        })
        .expect("plain data serializes")
    }
}

/// All Θ-derived tables, built once: fixed-point flags, `S_Θ` membership and
/// the per-cell shift `m_{i,j}`.
#[derive(Clone, Debug)]
pub struct Reduction {
    theta: Isotopism,
    n: usize,
    fix: [Vec<bool>; 3],
    in_s_theta: Vec<bool>,
    shift: Vec<u32>,
    map: ReducedIndexMap,
}

impl Reduction {
    pub fn new(theta: &Isotopism) -> Self {
        let n = theta.n();
        let fix = theta
            .components()
            .map(|p| (0..n).map(|x| p.is_fixed(x)).collect::<Vec<_>>());

        let mut in_s_theta = vec![false; n * n];
        for i in (0..n).filter(|&i| theta.alpha.is_cycle_min(i)) {
            for j in 0..n {
                if !fix[0][i] || theta.beta.is_cycle_min(j) {
                    in_s_theta[i * n + j] = true;
                }
            }
        }

        let mut shift = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let (mut a, mut b, mut m) = (i, j, 0u32);
                while !in_s_theta[a * n + b] {
                    a = theta.alpha.apply(a);
                    b = theta.beta.apply(b);
                    m += 1;
                }
                shift[i * n + j] = m;
            }
        }

        let mut coords = Vec::new();
        let mut lookup = vec![u32::MAX; n * n * n];
        for i in 0..n {
            for j in 0..n {
                if !in_s_theta[i * n + j] {
                    continue;
                }
                for k in 0..n {
                    let t = TripleIndex::new(i, j, k);
                    if !forced_zero(&fix, t) {
                        lookup[t.position(n)] = coords.len() as u32;
                        coords.push(t);
                    }
                }
            }
        }

        Reduction {
            theta: theta.clone(),
            n,
            fix,
            in_s_theta,
            shift,
            map: ReducedIndexMap { n, coords, lookup },
        }
    }

    pub fn theta(&self) -> &Isotopism {
        &self.theta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.map.len()
    }

    pub fn index_map(&self) -> &ReducedIndexMap {
        &self.map
    }

    #[inline]
    pub fn is_forced_zero(&self, t: TripleIndex) -> bool {
        forced_zero(&self.fix, t)
    }

    #[inline]
    pub fn in_s_theta(&self, i: usize, j: usize) -> bool {
        self.in_s_theta[i * self.n + j]
    }

    /// `m_{i,j} = min { t >= 0 : (α^t(i), β^t(j)) ∈ S_Θ }`.
    #[inline]
    pub fn shift(&self, i: usize, j: usize) -> usize {
        self.shift[i * self.n + j] as usize
    }

    /// `((i_Θ, j_Θ, k_Θ), m)`.
    #[inline]
    pub fn canonical(&self, t: TripleIndex) -> (TripleIndex, usize) {
        let m = self.shift(t.i, t.j);
        (self.theta.power_triple(m as i64, t), m)
    }

    /// Reduced column carrying `x_{i_Θ j_Θ k_Θ}`, or `None` when the canonical
    /// triple is a forced zero.
    #[inline]
    pub fn reduced_column(&self, t: TripleIndex) -> Option<usize> {
        self.map.position_of(&self.canonical(t).0)
    }

    /// True when every orbit of cells under `(i,j) -> (α(i), β(j))` meets
    /// `S_Θ` exactly once. This holds iff, for every moved row `i`, each
    /// β-cycle length divides the α-cycle length of `i`; only then is the
    /// canonical map constant along Θ-orbits.
    pub fn representatives_unique(&self) -> bool {
        let (alpha, beta) = (&self.theta.alpha, &self.theta.beta);
        (0..self.n).filter(|&i| !self.fix[0][i]).all(|i| {
            let a = alpha.cycle_len(i);
            (0..self.n).all(|j| a % beta.cycle_len(j) == 0)
        })
    }

    pub fn fixed_zero_set(&self) -> FixedZeroSet {
        let n = self.n;
        let triples = (0..n * n * n)
            .map(|p| TripleIndex::from_position(p, n))
            .filter(|&t| self.is_forced_zero(t))
            .collect();
        FixedZeroSet { n, triples }
    }

    pub fn representative_cells(&self) -> RepresentativeCells {
        let n = self.n;
        let cells = (0..n * n)
            .filter(|&c| self.in_s_theta[c])
            .map(|c| (c / n, c % n))
            .collect();
        RepresentativeCells { n, cells }
    }
}

#[inline]
fn forced_zero(fix: &[Vec<bool>; 3], t: TripleIndex) -> bool {
    let (a, b, c) = (fix[0][t.i], fix[1][t.j], fix[2][t.k]);
    (a && b && !c) || (a && c && !b) || (b && c && !a)
}

pub fn fixed_zero_set(theta: &Isotopism) -> FixedZeroSet {
    Reduction::new(theta).fixed_zero_set()
}

pub fn representative_cells(theta: &Isotopism) -> RepresentativeCells {
    Reduction::new(theta).representative_cells()
}

/// Direct search for the smallest `m` putting `(α^m(i), β^m(j))` in `S_Θ`.
pub fn canonical_triple(theta: &Isotopism, t: TripleIndex) -> (TripleIndex, usize) {
    let cells = representative_cells(theta);
    let mut current = t;
    let mut m = 0;
    while !cells.contains(current.i, current.j) {
        current = theta.apply_triple(current);
        m += 1;
    }
    (current, m)
}

pub fn reduced_index_map(theta: &Isotopism) -> ReducedIndexMap {
    Reduction::new(theta).map
}

/// Closed form for the number of reduced variables.
pub fn d_theta(la: &CycleStructure, lb: &CycleStructure, lc: &CycleStructure) -> Result<usize> {
    let n = la.n();
    if lb.n() != n || lc.n() != n {
        return Err(Error::StructureMismatch(format!("orders {}, {}, {}", n, lb.n(), lc.n())));
    }
    let n = n as i64;
    let (fa, fb, fc) = (la.fixed_points() as i64, lb.fixed_points() as i64, lc.fixed_points() as i64);
    let (na, nb) = (la.cycle_count() as i64, lb.cycle_count() as i64);
    let total = ((na - fa) * n * n + fa * nb * n) - (fa * fb * (n - fc) + fa * fc * (nb - fb) + fb * fc * (na - fa));
    Ok(total as usize)
}
