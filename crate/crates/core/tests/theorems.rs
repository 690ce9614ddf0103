mod common;

use latin_polytope::equiv::{build_equivalence, verify_equivalence, verify_reduced_equivalence, Verdict};
use latin_polytope::report::bundled_rows;
use latin_polytope::{dim_report_with, enumerate_vertices, full_dimension, rank_bound, Budget, Isotopism};

#[test]
fn lifted_and_reduced_dimensions_agree() {
    let mut rng = common::rng(23);
    for row in bundled_rows().iter().filter(|r| r.n <= 5) {
        let base = row.theta().unwrap();
        for t in [base.clone(), common::random_conjugate(&base, &mut rng)] {
            let report = dim_report_with(&t, Budget::unlimited(), false).unwrap();
            let reduced = report.dim.unwrap();
            assert_eq!(full_dimension(&t, Budget::unlimited()).unwrap(), Some(reduced), "{t}");
            assert!(reduced <= report.bound);

            let mut vertices = Vec::new();
            enumerate_vertices(&t, Budget::unlimited(), |v| {
                vertices.push(v.to_vec());
                Ok(())
            })
            .unwrap();
            assert_eq!(common::naive_affine_dimension(&vertices), reduced);
        }
    }
}

#[test]
fn identity_polytope_has_cube_dimension() {
    for n in 2..=4 {
        let dim = full_dimension(&Isotopism::identity(n), Budget::unlimited()).unwrap();
        assert_eq!(dim, Some((n - 1).pow(3)));
    }
}

#[test]
fn bound_holds_on_order_six_rows() {
    for row in bundled_rows().iter().filter(|r| r.n == 6 && r.delta.is_some_and(|d| d <= 30_000)) {
        let report = dim_report_with(&row.theta().unwrap(), Budget::unlimited(), false).unwrap();
        assert!(report.bound_holds(), "{report:?}");
    }
}

#[test]
fn conjugate_pairs_are_equivalent() {
    let mut rng = common::rng(29);
    let mut pairs = 0;
    for row in bundled_rows().iter().filter(|r| r.n <= 5 && r.delta.is_some_and(|d| d <= 10_000)) {
        let base = row.theta().unwrap();
        for _ in 0..2 {
            let t1 = common::random_conjugate(&base, &mut rng);
            let t2 = common::random_conjugate(&base, &mut rng);
            let map = build_equivalence(&t1, &t2).unwrap();
            assert!(map.conjugates(&t1, &t2));
            assert_eq!(verify_equivalence(&map, &t1, &t2, Budget::unlimited()).unwrap(), Verdict::Holds);
            assert_eq!(verify_reduced_equivalence(&map, &t1, &t2, Budget::unlimited()).unwrap(), Verdict::Holds);

            let r1 = dim_report_with(&t1, Budget::unlimited(), false).unwrap();
            let r2 = dim_report_with(&t2, Budget::unlimited(), false).unwrap();
            assert_eq!((r1.delta, r1.dim, r1.d_theta, r1.rank), (r2.delta, r2.dim, r2.d_theta, r2.rank));
            assert_eq!(rank_bound(&t1).1.rank, r1.rank);
            pairs += 1;
        }
    }
    assert!(pairs >= 10);
}
