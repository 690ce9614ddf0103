//! Coordinate permutations between polytopes of autotopisms with the same
//! cycle structure.
//!
//! Conjugating `δ1` into `δ2` by `σ` sends every square of `LS(Θ1)` to one of
//! `LS(Θ2)`, and on `{0,1}^{n³}` that is the permutation
//! `(i, j, k) -> (σ1(i), σ2(j), σ3(k))`.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::enumerate::{enumerate_squares, enumerate_vertices, Budget};
use crate::error::{Error, Result};
use crate::latin::{embed, BinaryVector, Isotopism, TripleIndex};
use crate::orbit::Reduction;
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceMap {
    pub sigma1: Permutation,
    pub sigma2: Permutation,
    pub sigma3: Permutation,
}

/// Outcome of comparing transported vertex sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    /// An enumeration ran out of budget.
    Inconclusive,
}

/// Pairs equal-length cycles in order of their minima and maps them onto
/// each other element by element, starting at the minima.
pub fn matching_permutation(from: &Permutation, to: &Permutation) -> Result<Permutation> {
    if from.cycle_structure() != to.cycle_structure() {
        return Err(Error::StructureMismatch(format!(
            "{} has structure {} but {} has {}",
            from,
            from.cycle_structure(),
            to,
            to.cycle_structure()
        )));
    }
    let n = from.degree();
    let mut image = vec![0; n];
    let mut targets = vec![Vec::new(); n + 1];
    for cycle in to.cycles().iter() {
        targets[cycle.len()].push(cycle);
    }
    let mut used = vec![0; n + 1];
    for cycle in from.cycles().iter() {
        let len = cycle.len();
        let target = targets[len][used[len]];
        used[len] += 1;
        for (&x, &y) in cycle.iter().zip(target) {
            image[x] = y;
        }
    }
    Permutation::from_images(image)
}

impl EquivalenceMap {
    pub fn sigmas(&self) -> [&Permutation; 3] {
        [&self.sigma1, &self.sigma2, &self.sigma3]
    }

    pub fn n(&self) -> usize {
        self.sigma1.degree()
    }

    pub fn apply_triple(&self, t: TripleIndex) -> TripleIndex {
        TripleIndex::new(self.sigma1.apply(t.i), self.sigma2.apply(t.j), self.sigma3.apply(t.k))
    }

    /// `π` on lexicographic coordinate positions.
    pub fn pi(&self, position: usize) -> usize {
        let n = self.n();
        self.apply_triple(TripleIndex::from_position(position, n)).position(n)
    }

    pub fn apply_vector(&self, v: &BinaryVector) -> BinaryVector {
        let n = self.n();
        let mut bits = vec![0u8; n * n * n];
        for (pos, &b) in v.bits().iter().enumerate() {
            bits[self.pi(pos)] = b;
        }
        BinaryVector::new(n, bits).expect("permuted 0/1 vector")
    }

    /// `σ_c ∘ δ1 ∘ σ_c⁻¹ = δ2` for all three components.
    pub fn conjugates(&self, t1: &Isotopism, t2: &Isotopism) -> bool {
        self.sigmas().iter().zip(t1.components()).zip(t2.components()).all(|((s, d1), d2)| {
            s.compose(d1)
                .and_then(|sd| sd.compose(&s.inverse()))
                .is_ok_and(|c| &c == d2)
        })
    }

    /// Cycle notation of the three permutations and the induced coordinate map.
    pub fn to_text(&self) -> String {
        format!(
            "s1: {}\ns2: {}\ns3: {}\npi: (i,j,k) -> (s1 i, s2 j, s3 k)\n",
            self.sigma1, self.sigma2, self.sigma3
        )
    }
}

impl fmt::Display for EquivalenceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn build_equivalence(t1: &Isotopism, t2: &Isotopism) -> Result<EquivalenceMap> {
    if t1.n() != t2.n() {
        return Err(Error::DegreeMismatch { expected: t1.n(), found: t2.n() });
    }
    let [a1, b1, c1] = t1.components();
    let [a2, b2, c2] = t2.components();
    Ok(EquivalenceMap {
        sigma1: matching_permutation(a1, a2)?,
        sigma2: matching_permutation(b1, b2)?,
        sigma3: matching_permutation(c1, c2)?,
    })
}

fn full_vertices(theta: &Isotopism, budget: Budget) -> Result<Option<Vec<BinaryVector>>> {
    let mut out = Vec::new();
    let r = enumerate_squares(theta, budget, |l| {
        out.push(embed(&l));
        Ok(())
    })?;
    Ok(r.complete.then_some(out))
}

/// Checks that `π` maps the vertex set of `P_LS(Θ1)` onto that of `P_LS(Θ2)`.
pub fn verify_equivalence(map: &EquivalenceMap, t1: &Isotopism, t2: &Isotopism, budget: Budget) -> Result<Verdict> {
    let (Some(v1), Some(v2)) = (full_vertices(t1, budget)?, full_vertices(t2, budget)?) else {
        return Ok(Verdict::Inconclusive);
    };
    let moved: HashSet<BinaryVector> = v1.iter().map(|v| map.apply_vector(v)).collect();
    let target: HashSet<BinaryVector> = v2.into_iter().collect();
    Ok(if moved.len() == v1.len() && moved == target { Verdict::Holds } else { Verdict::Fails })
}

fn reduced_vertices(theta: &Isotopism, budget: Budget) -> Result<Option<Vec<Vec<u8>>>> {
    let mut out = Vec::new();
    let r = enumerate_vertices(theta, budget, |v| {
        out.push(v.to_vec());
        Ok(())
    })?;
    Ok(r.complete.then_some(out))
}

/// Same check on the reduced polytopes: lift under `Θ1`, apply `π`, restrict
/// under `Θ2`.
pub fn verify_reduced_equivalence(
    map: &EquivalenceMap,
    t1: &Isotopism,
    t2: &Isotopism,
    budget: Budget,
) -> Result<Verdict> {
    let (Some(v1), Some(v2)) = (reduced_vertices(t1, budget)?, reduced_vertices(t2, budget)?) else {
        return Ok(Verdict::Inconclusive);
    };
    let (r1, r2) = (Reduction::new(t1), Reduction::new(t2));
    let mut moved = HashSet::new();
    for v in &v1 {
        let full = map.apply_vector(&r1.lift(v)?);
        match r2.restrict(&full) {
            Ok(w) => {
                moved.insert(w);
            }
            Err(_) => return Ok(Verdict::Fails),
        }
    }
    let target: HashSet<Vec<u8>> = v2.into_iter().collect();
    Ok(if moved.len() == v1.len() && moved == target { Verdict::Holds } else { Verdict::Fails })
}
