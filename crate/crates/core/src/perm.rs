//! Permutations of `[n]`, their canonical cycle decomposition and cycle structure.
//!
//! Elements are stored 0-based. Everything that crosses a text boundary
//! (cycle notation, `Display`) is 1-based.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint cycles covering `[n]`, each starting at its minimum and sorted by
/// that minimum. Fixed points are kept as length-1 cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Number of cycles, fixed points included.
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.cycles.iter().map(Vec::as_slice)
    }

    /// Leading element of every cycle.
    pub fn minima(&self) -> impl Iterator<Item = usize> + '_ {
        self.cycles.iter().map(|c| c[0])
    }

    pub fn recompose(&self, n: usize) -> Result<Permutation> {
        let mut image = vec![usize::MAX; n];
        for cycle in &self.cycles {
            for (idx, &x) in cycle.iter().enumerate() {
                if x >= n {
                    return Err(Error::ElementOutOfRange { elem: x + 1, n });
                }
                if image[x] != usize::MAX {
                    return Err(Error::DuplicateElement(x + 1));
                }
                image[x] = cycle[(idx + 1) % cycle.len()];
            }
        }
        for (x, slot) in image.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = x;
            }
        }
        Permutation::from_images(image)
    }
}

/// `(l_1, ..., l_n)`: `l_i` is the number of cycles of length `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CycleStructure {
    counts: Vec<usize>,
}

impl CycleStructure {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidStructure("empty count vector".into()));
        }
        let total: usize = counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
        if total != counts.len() {
            return Err(Error::InvalidStructure(format!(
                "sum of i*l_i is {total}, expected {}",
                counts.len()
            )));
        }
        Ok(CycleStructure { counts })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of cycles of length `len` (1-based length).
    pub fn count(&self, len: usize) -> usize {
        if len == 0 {
            return 0;
        }
        self.counts.get(len - 1).copied().unwrap_or(0)
    }

    pub fn fixed_points(&self) -> usize {
        self.counts[0]
    }

    pub fn cycle_count(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Cycles on consecutive integers, shortest first:
    /// `(1,1,0,1)` becomes `(1)(2 3)(4 5 6 7)`.
    pub fn representative(&self) -> Permutation {
        let n = self.n();
        let mut image: Vec<usize> = (0..n).collect();
        let mut next = 0;
        for (i, &count) in self.counts.iter().enumerate() {
            let len = i + 1;
            for _ in 0..count {
                for k in 0..len {
                    image[next + k] = next + (k + 1) % len;
                }
                next += len;
            }
        }
        Permutation::from_images(image).expect("representative is a bijection")
    }

    /// Parses `0,0,1` or `(0,0,1)`.
    pub fn parse(text: &str) -> Result<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        let counts = inner
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidStructure(format!("bad count {s:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(counts)
    }
}

impl TryFrom<Vec<usize>> for CycleStructure {
    type Error = Error;

    fn try_from(counts: Vec<usize>) -> Result<Self> {
        Self::new(counts)
    }
}

impl From<CycleStructure> for Vec<usize> {
    fn from(s: CycleStructure) -> Self {
        s.counts
    }
}

impl fmt::Display for CycleStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A bijection on `[n]` with its cycle decomposition computed at construction.
#[derive(Clone, Debug)]
pub struct Permutation {
    image: Vec<usize>,
    decomposition: CycleDecomposition,
    // (cycle id, offset inside the cycle) for every element
    position: Vec<(usize, usize)>,
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.image == other.image
    }
}

impl Eq for Permutation {}

impl std::hash::Hash for Permutation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.image.hash(state);
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self::from_images((0..n).collect()).expect("identity")
    }

    /// Builds from 0-based images.
    pub fn from_images(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &y in &image {
            if y >= n {
                return Err(Error::ElementOutOfRange { elem: y + 1, n });
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotAPermutation(n));
            }
        }

        let mut cycles = Vec::new();
        let mut position = vec![(0, 0); n];
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] {
                continue;
            }
            // `start` is the smallest unvisited element, hence the cycle minimum.
            let mut cycle = Vec::new();
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                position[x] = (cycles.len(), cycle.len());
                cycle.push(x);
                x = image[x];
            }
            cycles.push(cycle);
        }

        Ok(Permutation {
            image,
            decomposition: CycleDecomposition { cycles },
            position,
        })
    }

    /// Builds from 1-based images, e.g. `[2, 3, 1]`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        let n = image.len();
        let zero = image
            .iter()
            .map(|&y| {
                if y == 0 || y > n {
                    Err(Error::ElementOutOfRange { elem: y, n })
                } else {
                    Ok(y - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(zero)
    }

    /// Parses a product of disjoint cycles such as `(1 2 3)(4 5)` over `[n]`.
    /// Omitted elements are fixed; the empty string and `()` are the identity.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut used = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(after_open) = rest.strip_prefix('(') else {
                return Err(Error::MalformedCycle(format!("expected '(' in {text:?}")));
            };
            let Some(close) = after_open.find(')') else {
                return Err(Error::MalformedCycle(format!("unclosed '(' in {text:?}")));
            };
            let body = &after_open[..close];
            if body.contains('(') {
                return Err(Error::MalformedCycle(format!("nested '(' in {text:?}")));
            }
            let mut cycle = Vec::new();
            for token in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
                let elem: usize = token
                    .parse()
                    .map_err(|_| Error::MalformedCycle(format!("bad element {token:?}")))?;
                if elem == 0 || elem > n {
                    return Err(Error::ElementOutOfRange { elem, n });
                }
                if std::mem::replace(&mut used[elem - 1], true) {
                    return Err(Error::DuplicateElement(elem));
                }
                cycle.push(elem - 1);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = after_open[close + 1..].trim_start();
        }
        CycleDecomposition { cycles }.recompose(n)
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn one_based_images(&self) -> Vec<usize> {
        self.image.iter().map(|y| y + 1).collect()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn cycles(&self) -> &CycleDecomposition {
        &self.decomposition
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        let n = self.degree();
        let mut counts = vec![0; n.max(1)];
        for c in self.decomposition.iter() {
            counts[c.len() - 1] += 1;
        }
        if n == 0 {
            counts.clear();
        }
        CycleStructure { counts }
    }

    pub fn is_fixed(&self, x: usize) -> bool {
        self.image[x] == x
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.degree()).filter(|&x| self.is_fixed(x))
    }

    /// Length of the cycle through `x`.
    #[inline]
    pub fn cycle_len(&self, x: usize) -> usize {
        self.decomposition.cycles[self.position[x].0].len()
    }

    /// Minimum of the cycle through `x`.
    #[inline]
    pub fn cycle_min(&self, x: usize) -> usize {
        self.decomposition.cycles[self.position[x].0][0]
    }

    /// Offset of `x` inside its cycle, so that `x = p^offset(cycle_min(x))`.
    #[inline]
    pub fn cycle_offset(&self, x: usize) -> usize {
        self.position[x].1
    }

    pub fn is_cycle_min(&self, x: usize) -> bool {
        self.position[x].1 == 0
    }

    /// lcm of the cycle lengths.
    pub fn order(&self) -> u64 {
        self.decomposition
            .iter()
            .fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    /// `p^t(x)` for any integer `t`; negative powers iterate the inverse.
    #[inline]
    pub fn power_apply(&self, t: i64, x: usize) -> usize {
        let (cycle, offset) = self.position[x];
        let cycle = &self.decomposition.cycles[cycle];
        let len = cycle.len() as i64;
        let idx = (offset as i64 + t).rem_euclid(len) as usize;
        cycle[idx]
    }

    pub fn power(&self, t: i64) -> Permutation {
        let image = (0..self.degree()).map(|x| self.power_apply(t, x)).collect();
        Permutation::from_images(image).expect("power of a permutation")
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.degree()];
        for (x, &y) in self.image.iter().enumerate() {
            image[y] = x;
        }
        Permutation::from_images(image).expect("inverse of a permutation")
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: other.degree(),
            });
        }
        let image = other.image.iter().map(|&y| self.image[y]).collect();
        Permutation::from_images(image)
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y)
    }
}

impl fmt::Display for Permutation {
    /// Minimum-first cycles sorted by minimum, fixed points omitted, identity as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for cycle in self.decomposition.iter().filter(|c| c.len() > 1) {
            write!(f, "(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, n: usize) -> Permutation {
        Permutation::parse(text, n).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("(1 2 3)", 3).one_based_images(), vec![2, 3, 1]);
        assert_eq!(p("", 4), Permutation::identity(4));
        assert_eq!(p("(2 3)", 3).one_based_images(), vec![1, 3, 2]);
        assert_eq!(p(" ( 1 2 )( 3 4 ) ", 4).one_based_images(), vec![2, 1, 4, 3]);
        assert_eq!(p("(1)(2 3)", 3), p("(2 3)", 3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Permutation::parse("(1 2)(2 3)", 3), Err(Error::DuplicateElement(2))));
        assert!(matches!(
            Permutation::parse("(1 4)", 3),
            Err(Error::ElementOutOfRange { elem: 4, n: 3 })
        ));
        assert!(matches!(Permutation::parse("(1 2", 3), Err(Error::MalformedCycle(_))));
        assert!(matches!(Permutation::parse("1 2)", 3), Err(Error::MalformedCycle(_))));
        assert!(matches!(Permutation::parse("((1 2))", 3), Err(Error::MalformedCycle(_))));
        assert!(matches!(Permutation::parse("(1 x)", 3), Err(Error::MalformedCycle(_))));
    }

    #[test]
    fn decomposition_examples() {
        let cycles = |perm: &Permutation| -> Vec<Vec<usize>> {
            perm.cycles().iter().map(|c| c.iter().map(|x| x + 1).collect()).collect()
        };
        assert_eq!(cycles(&Permutation::identity(3)), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(cycles(&Permutation::from_one_based(&[2, 3, 1]).unwrap()), vec![vec![1, 2, 3]]);
        assert_eq!(
            cycles(&Permutation::from_one_based(&[2, 1, 3, 4]).unwrap()),
            vec![vec![1, 2], vec![3], vec![4]]
        );
        // minimum-first even when written otherwise
        assert_eq!(cycles(&p("(3 1 2)", 3)), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn structure_examples() {
        let s = |perm: Permutation| perm.cycle_structure().counts().to_vec();
        assert_eq!(s(Permutation::from_one_based(&[2, 1, 3, 4]).unwrap()), vec![2, 1, 0, 0]);
        assert_eq!(s(p("(1 2 3 4)", 4)), vec![0, 0, 0, 1]);
        assert_eq!(s(Permutation::identity(5)), vec![5, 0, 0, 0, 0]);
    }

    #[test]
    fn power_examples() {
        let c = p("(1 2 3)", 3);
        assert_eq!(c.power_apply(2, 1), 0);
        assert_eq!(c.power_apply(-1, 0), 2);
        for x in 0..3 {
            assert_eq!(c.power_apply(0, x), x);
        }
        assert_eq!(c.power(-1), c.inverse());
    }

    #[test]
    fn printer() {
        assert_eq!(Permutation::identity(4).to_string(), "()");
        assert_eq!(p("(3 2)(4 1 5)", 5).to_string(), "(1 5 4)(2 3)");
    }

    #[test]
    fn structure_validation_and_representative() {
        assert!(CycleStructure::new(vec![1, 1, 0]).is_ok());
        assert!(CycleStructure::new(vec![1, 1, 1]).is_err());
        let s = CycleStructure::parse("(1,1,0,1,0,0,0)").unwrap();
        let rep = s.representative();
        assert_eq!(rep.to_string(), "(2 3)(4 5 6 7)");
        assert_eq!(rep.cycle_structure(), s);
        assert_eq!(s.to_string(), "(1,1,0,1,0,0,0)");
        assert_eq!(s.cycle_count(), 3);
        assert_eq!(s.fixed_points(), 1);
    }
}
