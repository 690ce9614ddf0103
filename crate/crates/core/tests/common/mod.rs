#![allow(dead_code)]

use latin_polytope::{CycleStructure, Isotopism, Permutation};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut image: Vec<usize> = (0..n).collect();
    image.shuffle(rng);
    Permutation::from_images(image).unwrap()
}

/// `s ∘ p ∘ s⁻¹`
pub fn conjugate(p: &Permutation, s: &Permutation) -> Permutation {
    s.compose(p).unwrap().compose(&s.inverse()).unwrap()
}

pub fn random_conjugate(theta: &Isotopism, rng: &mut ChaCha8Rng) -> Isotopism {
    let n = theta.n();
    let [a, b, c] = theta.components();
    Isotopism::new(
        conjugate(a, &random_permutation(n, rng)),
        conjugate(b, &random_permutation(n, rng)),
        conjugate(c, &random_permutation(n, rng)),
    )
    .unwrap()
}

/// All permutations of `[n]` in lexicographic order of their image vectors.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(Permutation::from_images(prefix.clone()).unwrap());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                extend(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn permutations_with(structure: &CycleStructure) -> Vec<Permutation> {
    all_permutations(structure.n()).into_iter().filter(|p| &p.cycle_structure() == structure).collect()
}

pub fn structures(a: &str, b: &str, c: &str) -> Isotopism {
    Isotopism::from_structures(
        &CycleStructure::parse(a).unwrap(),
        &CycleStructure::parse(b).unwrap(),
        &CycleStructure::parse(c).unwrap(),
    )
    .unwrap()
}

/// Affine rank by integer Gauss-Jordan elimination with row-content
/// reduction. Small inputs only.
pub fn naive_affine_dimension(vertices: &[Vec<u8>]) -> usize {
    let Some(first) = vertices.first() else { return 0 };
    let rows: Vec<Vec<i128>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(first).map(|(&x, &a)| x as i128 - a as i128).collect())
        .collect();
    naive_rank(rows)
}

pub fn naive_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let (a, b) = (rows[rank][col], rows[r][col]);
                let pivot = rows[rank].clone();
                for (x, &p) in rows[r].iter_mut().zip(&pivot) {
                    *x = *x * a - p * b;
                }
                let g = rows[r].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                if g > 1 {
                    rows[r].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { gcd(b, a % b) }
}
