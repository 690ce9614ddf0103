mod common;

use latin_polytope::orbit::FixedZeroSet;
use latin_polytope::{
    affine_dimension, all_latin_squares, apply_isotopism, canonical_triple, embed, enumerate_vertices, matrix_rank,
    reduced_system, unembed, BinaryVector, Budget, CycleStructure, Isotopism, Permutation, Reduction, SparseMatrix,
    TripleIndex,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|image| Permutation::from_images(image).unwrap())
}

fn isotopism(min_n: usize, max_n: usize) -> impl Strategy<Value = Isotopism> {
    (min_n..=max_n)
        .prop_flat_map(|n| {
            let p = || Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (p(), p(), p())
        })
        .prop_map(|(a, b, c)| {
            Isotopism::new(
                Permutation::from_images(a).unwrap(),
                Permutation::from_images(b).unwrap(),
                Permutation::from_images(c).unwrap(),
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn power_of_order_is_identity(p in permutation(7)) {
        let order = p.order() as i64;
        for x in 0..p.degree() {
            prop_assert_eq!(p.power_apply(order, x), x);
        }
        prop_assert!(p.power(order).is_identity());
    }

    #[test]
    fn fixed_point_count_matches_structure(p in permutation(7)) {
        let fixed = (0..p.degree()).filter(|&x| p.apply(x) == x).count();
        prop_assert_eq!(p.cycle_structure().fixed_points(), fixed);
    }

    #[test]
    fn decomposition_recomposes(p in permutation(7)) {
        prop_assert_eq!(p.cycles().recompose(p.degree()).unwrap(), p);
    }

    #[test]
    fn printed_form_parses_back(p in permutation(6)) {
        prop_assert_eq!(Permutation::parse(&p.to_string(), p.degree()).unwrap(), p);
    }

    #[test]
    fn structure_text_round_trip(p in permutation(7)) {
        let s = p.cycle_structure();
        prop_assert_eq!(CycleStructure::parse(&s.to_string()).unwrap(), s.clone());
        prop_assert_eq!(s.representative().cycle_structure(), s);
    }

    #[test]
    fn fixed_zero_set_matches_formula(t in isotopism(1, 7)) {
        let [la, lb, lc] = t.structure();
        let set = Reduction::new(&t).fixed_zero_set();
        prop_assert_eq!(set.len(), FixedZeroSet::expected_len(&la, &lb, &lc));
    }

    #[test]
    fn canonical_triple_is_idempotent(t in isotopism(1, 5)) {
        let n = t.n();
        for pos in 0..n * n * n {
            let (c, _) = canonical_triple(&t, TripleIndex::from_position(pos, n));
            prop_assert_eq!(canonical_triple(&t, c).1, 0);
        }
    }

    #[test]
    fn reduced_coordinates_partition_representatives(t in isotopism(1, 6)) {
        let red = Reduction::new(&t);
        let n = t.n();
        let fix = red.fixed_zero_set();
        let cells = red.representative_cells();
        let map = red.index_map();
        let mut total = 0;
        for &(i, j) in cells.cells() {
            for k in 0..n {
                let tri = TripleIndex::new(i, j, k);
                let reduced = map.position_of(&tri).is_some();
                prop_assert!(reduced != fix.contains(&tri));
                total += 1;
            }
        }
        prop_assert_eq!(total, map.len() + fix.iter().filter(|x| cells.contains(x.i, x.j)).count());
    }

    #[test]
    fn reduced_row_totals(t in isotopism(1, 6)) {
        // Every reduced row collects the n summands of one assignment row,
        // minus those that are forced to zero.
        let red = Reduction::new(&t);
        let n = t.n();
        let raw = latin_polytope::reduced_system_raw(&t);
        let fix = red.fixed_zero_set();
        for (r, row) in raw.matrix().rows().iter().enumerate() {
            let (family, a, b) = (r / (n * n), (r / n) % n, r % n);
            let free = (0..n)
                .map(|x| match family {
                    0 => TripleIndex::new(x, a, b),
                    1 => TripleIndex::new(a, x, b),
                    _ => TripleIndex::new(a, b, x),
                })
                .filter(|tri| !fix.contains(tri))
                .count();
            prop_assert_eq!(row.coefficient_sum(), free as i64);
        }
    }

    #[test]
    fn rank_equals_transposed_rank(rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 1..7), 1..7)) {
        let width = rows[0].len();
        let rows: Vec<Vec<i64>> = rows.into_iter().map(|mut r| { r.resize(width, 0); r }).collect();
        let m = SparseMatrix::from_dense(&rows);
        let r = matrix_rank(&m).rank;
        prop_assert_eq!(r, matrix_rank(&m.transpose()).rank);
        let naive = common::naive_rank(rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
        prop_assert_eq!(r, naive);
    }

    #[test]
    fn affine_dimension_matches_naive(points in prop::collection::vec(prop::collection::vec(0u8..=1, 6), 1..12)) {
        prop_assert_eq!(affine_dimension(&points).unwrap(), common::naive_affine_dimension(&points));
    }
}

#[test]
fn isotopism_action_composes() {
    let squares: Vec<_> = all_latin_squares(3).unwrap().collect();
    let mut rng = common::rng(7);
    let generators: Vec<Isotopism> = (0..12)
        .map(|_| {
            Isotopism::new(
                common::random_permutation(3, &mut rng),
                common::random_permutation(3, &mut rng),
                common::random_permutation(3, &mut rng),
            )
            .unwrap()
        })
        .collect();
    for l in &squares {
        for t1 in &generators {
            for t2 in &generators {
                let twice = apply_isotopism(&apply_isotopism(l, t1).unwrap(), t2).unwrap();
                assert_eq!(twice, apply_isotopism(l, &t2.compose(t1).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn embedding_round_trips() {
    for n in 1..=4 {
        for l in all_latin_squares(n).unwrap() {
            let v = embed(&l);
            assert_eq!(unembed(&v).unwrap(), l);
            assert_eq!(embed(&unembed(&v).unwrap()), v);
        }
    }
    // Only Latin squares unembed.
    let mut bits = embed(&all_latin_squares(3).unwrap().next().unwrap()).into_bits();
    bits[0] = 0;
    assert!(unembed(&BinaryVector::new(3, bits).unwrap()).is_err());
}

#[test]
fn recomposition_exhaustive_small_orders() {
    for n in 1..=5 {
        for p in common::all_permutations(n) {
            assert_eq!(p.cycles().recompose(n).unwrap(), p);
            assert_eq!(Permutation::parse(&p.to_string(), n).unwrap(), p);
        }
    }
}

#[test]
fn fixed_zero_formula_on_random_draws() {
    let mut rng = common::rng(11);
    for n in 1..=7 {
        for _ in 0..1000 {
            let t = Isotopism::new(
                common::random_permutation(n, &mut rng),
                common::random_permutation(n, &mut rng),
                common::random_permutation(n, &mut rng),
            )
            .unwrap();
            let [la, lb, lc] = t.structure();
            assert_eq!(Reduction::new(&t).fixed_zero_set().len(), FixedZeroSet::expected_len(&la, &lb, &lc));
        }
    }
}

#[test]
fn affine_dimension_ignores_stream_order() {
    let mut rng = common::rng(3);
    for t in [
        common::structures("0,0,0,1", "0,0,0,1", "0,2,0,0"),
        common::structures("1,2,0,0,0", "1,2,0,0,0", "1,2,0,0,0"),
        common::structures("0,2,0,0", "0,2,0,0", "4,0,0,0"),
    ] {
        let mut vertices = Vec::new();
        enumerate_vertices(&t, Budget::unlimited(), |v| {
            vertices.push(v.to_vec());
            Ok(())
        })
        .unwrap();
        let dim = affine_dimension(&vertices).unwrap();
        assert_eq!(dim, common::naive_affine_dimension(&vertices));
        for _ in 0..5 {
            vertices.shuffle(&mut rng);
            assert_eq!(affine_dimension(&vertices).unwrap(), dim);
        }
    }
}

#[test]
fn reduced_system_rank_is_transpose_invariant() {
    for row in latin_polytope::report::bundled_rows().iter().filter(|r| r.n <= 6) {
        let m = reduced_system(&row.theta().unwrap());
        assert_eq!(matrix_rank(m.matrix()).rank, matrix_rank(&m.matrix().transpose()).rank);
    }
}
