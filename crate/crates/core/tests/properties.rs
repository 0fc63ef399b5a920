use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use polykit::autos::{evaluate_letters, Letter};
use polykit::columns::{definitional_bases, facet_criterion};
use polykit::corpus::make;
use polykit::doubling::double;
use polykit::io::{parse_polytope, parse_word, polytope_to_json, Word};
use polykit::linalg::{self, IVec};
use polykit::matrix::Matrix;
use polykit::polygon::convex_hull_2d;
use polykit::ring::Ring;
use polykit::steinberg::{reduce, ReduceLevel};
use polykit::{ColSet, LatticePolytope};

fn point_set(max: i64) -> impl Strategy<Value = Vec<IVec>> {
    prop::collection::vec((0..=max, 0..=max).prop_map(|(x, y)| vec![x, y]), 3..8)
}

fn polygon() -> impl Strategy<Value = LatticePolytope> {
    point_set(4).prop_filter_map("degenerate", |pts| LatticePolytope::from_full_dimensional(&pts).ok())
}

fn cross(o: &IVec, a: &IVec, b: &IVec) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn ring() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just(Ring::Integers),
        Just(Ring::Rationals),
        (2u64..12).prop_map(|m| Ring::integers_mod(m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_vertices_are_extreme(pts in point_set(6)) {
        let hull = convex_hull_2d(&pts);
        prop_assume!(hull.len() >= 3);
        let n = hull.len();
        for i in 0..n {
            let (a, b) = (&hull[i], &hull[(i + 1) % n]);
            // every input point lies weakly left of each counter-clockwise edge
            for p in &pts {
                prop_assert!(cross(a, b, p) >= 0);
            }
            // and no hull vertex lies on the segment between its neighbours
            let prev = &hull[(i + n - 1) % n];
            prop_assert!(cross(prev, a, b) > 0);
        }
        for v in &hull {
            prop_assert!(pts.contains(v));
        }
    }

    #[test]
    fn facet_and_definitional_criteria_agree(p in polygon()) {
        let pts = p.lattice_points();
        let mut seen = BTreeSet::new();
        for a in pts {
            for b in pts {
                let v = linalg::sub(a, b);
                if !seen.insert(v.clone()) {
                    continue;
                }
                let by_facet = facet_criterion(&p, &v);
                let by_def: Vec<usize> = definitional_bases(&p, &v)
                    .into_iter()
                    .filter(|&f| p.facet(f).pairing(&v) == -1)
                    .collect();
                prop_assert_eq!(by_facet.into_iter().collect::<Vec<_>>(), by_def);
            }
        }
    }

    #[test]
    fn products_respect_base_facets(p in polygon()) {
        let c = ColSet::new(Arc::new(p));
        for (i, j, k) in c.product_triples() {
            prop_assert_eq!(c.coords(k), &linalg::add(c.coords(i), c.coords(j)));
            prop_assert_eq!(c.base(k), c.base(i));
            prop_assert_eq!(c.pairing(i, j), 0);
            prop_assert!(c.product_definitional(i, j));
        }
    }

    #[test]
    fn polytope_json_round_trip(p in polygon()) {
        // reading JSON normalizes through the hull, which is idempotent
        let p = LatticePolytope::hull(p.vertices()).unwrap();
        let back = parse_polytope(&polytope_to_json(&p)).unwrap();
        prop_assert_eq!(&back, &p);
    }

    #[test]
    fn doubling_identities_hold(p in polygon(), pick in 0usize..8) {
        let p = Arc::new(p);
        let f = pick % p.facets().len();
        let d = double(&p, f).unwrap();
        prop_assert!(d.verify_identities().is_ok());
        prop_assert_eq!(d.q.dim(), p.dim() + 1);
        let parent = ColSet::new(p.clone());
        let q = ColSet::new(d.q.clone());
        for i in 0..parent.len() {
            prop_assert!(q.contains(&d.embed(parent.coords(i))));
        }
    }

    #[test]
    fn ring_axioms(r in ring(), a in -40i64..40, b in -40i64..40, c in -40i64..40) {
        let (a, b, c) = (r.from_i64(a), r.from_i64(b), r.from_i64(c));
        prop_assert_eq!(r.add(&a, &b), r.add(&b, &a));
        prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
        prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
        prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
        prop_assert!(r.is_zero(&r.add(&a, &r.neg(&a))));
        prop_assert_eq!(r.parse(&r.format(&a)).unwrap(), a);
    }

    #[test]
    fn unipotent_matrices_invert(r in ring(), entries in prop::collection::vec(-9i64..9, 6)) {
        // upper unitriangular 4x4 with the given entries above the diagonal
        let mut m = Matrix::identity(&r, 4);
        let mut it = entries.into_iter();
        for i in 0..4 {
            for j in i + 1..4 {
                m.set(i, j, r.from_i64(it.next().unwrap()));
            }
        }
        let inv = m.inverse(&r).unwrap();
        prop_assert!(m.mul(&r, &inv).is_identity(&r));
        prop_assert!(inv.mul(&r, &m).is_identity(&r));
        prop_assert!(r.is_one(&m.determinant(&r)));
    }

    #[test]
    fn reduction_preserves_value(
        r in ring(),
        letters in prop::collection::vec((0usize..4, -5i64..5), 0..10),
        level in prop_oneof![Just(ReduceLevel::Free), Just(ReduceLevel::Relational)],
    ) {
        let p = Arc::new(make("P_trap").unwrap());
        let c = ColSet::new(p.clone());
        let word: Vec<Letter> = letters
            .iter()
            .map(|&(i, x)| Letter::new(c.coords(i % c.len()).clone(), r.from_i64(x)))
            .collect();
        let reduced = reduce(&word, level, &c, &r);
        prop_assert!(reduced.len() <= word.len() || level == ReduceLevel::Relational);
        let before = evaluate_letters(&p, &word, &r).unwrap();
        let after = evaluate_letters(&p, &reduced, &r).unwrap();
        prop_assert_eq!(before.matrix(), after.matrix());
    }

    #[test]
    fn word_json_round_trip(
        r in ring(),
        letters in prop::collection::vec((prop::collection::vec(-3i64..3, 3), -50i64..50), 0..6),
        stage in prop::option::of(0usize..5),
    ) {
        let w = Word {
            letters: letters.into_iter().map(|(v, x)| Letter::new(v, r.from_i64(x))).collect(),
            ring: r,
            stage,
        };
        prop_assert_eq!(parse_word(&w.to_json_string()).unwrap(), w);
    }
}
