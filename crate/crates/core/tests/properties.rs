use num_bigint::BigInt;
use proptest::prelude::*;

use skewadic::algebra::{
    in_lattice, integer_kernel, invariant_factors, GroupElement, IntegerMatrix, LaurentPolynomial,
};
use skewadic::bratteli::build_diagram;
use skewadic::cocycles::FloorCocycle;
use skewadic::instance::packaged;
use skewadic::maharam::{MaharamMeasure, MaharamParameter};
use skewadic::skew::{birkhoff_sum_at_return, renormalized_phi, SkewCocycle};

fn poly(dim: usize) -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, dim), -5i64..=5), 0..6).prop_map(move |terms| {
        LaurentPolynomial::from_terms(
            dim,
            terms.into_iter().map(|(e, c)| (GroupElement::new(e), BigInt::from(c))),
        )
        .unwrap()
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, cols), rows)
        .prop_map(|r| IntegerMatrix::from_rows(&r).unwrap())
}

/// A product of elementary integer row operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3), 0..8).prop_map(move |ops| {
        let mut u = IntegerMatrix::identity(n);
        for (i, j, c) in ops {
            if i != j {
                let mut e = IntegerMatrix::identity(n);
                e[(i, j)] = BigInt::from(c);
                u = &e * &u;
            }
        }
        u
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn laurent_ring_axioms(p in poly(2), q in poly(2), r in poly(2)) {
        prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
        prop_assert_eq!(p.mul(&q).unwrap().mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
        prop_assert_eq!(
            p.mul(&q.add(&r).unwrap()).unwrap(),
            p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(p.mul(&LaurentPolynomial::one(2)).unwrap(), p.clone());
        prop_assert!(p.sub(&p).unwrap().is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly(2), q in poly(2), x in 0.2f64..3.0, y in 0.2f64..3.0) {
        let at = [x, y];
        let (ep, eq) = (p.eval(&at).unwrap(), q.eval(&at).unwrap());
        prop_assert!(close(p.mul(&q).unwrap().eval(&at).unwrap(), ep * eq));
        prop_assert!(close(p.add(&q).unwrap().eval(&at).unwrap(), ep + eq));
        prop_assert_eq!(p.eval(&[1.0, 1.0]).unwrap(), p.coefficient_sum().to_string().parse::<f64>().unwrap());
    }

    #[test]
    fn kernel_is_annihilated_and_saturated(b in matrix(3, 5)) {
        let kernel = integer_kernel(&b);
        for v in &kernel {
            prop_assert!(b.mul_vec(v).unwrap().iter().all(|x| *x == BigInt::from(0)));
        }
        if !kernel.is_empty() {
            let k = IntegerMatrix::from_big_rows(kernel.clone()).unwrap();
            prop_assert!(invariant_factors(&k).iter().all(|f| *f == BigInt::from(1)));
            prop_assert_eq!(invariant_factors(&k).len(), kernel.len());
        }
    }

    #[test]
    fn invariant_factors_are_unimodular_invariants(b in matrix(3, 3), u in unimodular(3), v in unimodular(3)) {
        let changed = &(&u * &b) * &v.transpose();
        prop_assert_eq!(invariant_factors(&changed), invariant_factors(&b));
        let f = invariant_factors(&b);
        for w in f.windows(2) {
            prop_assert!((&w[1] % &w[0]) == BigInt::from(0));
        }
    }

    #[test]
    fn lattice_contains_combinations(g in matrix(3, 2), c in prop::collection::vec(-5i64..=5, 3)) {
        let target: Vec<BigInt> = (0..2)
            .map(|j| (0..3).map(|i| &g[(i, j)] * BigInt::from(c[i])).sum())
            .collect();
        prop_assert!(in_lattice(&g, &target));
    }

    #[test]
    fn word_sums_renormalize(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 2), 3)) {
        let inst = &packaged()[0];
        let Ok(phi) = SkewCocycle::unchecked(rows.into_iter().map(GroupElement::new).collect()) else {
            return Ok(());
        };
        let a = inst.lp.matrix();
        let next = renormalized_phi(&a, &phi, 1).unwrap();
        for j in 0..3 {
            prop_assert_eq!(&birkhoff_sum_at_return(&inst.towers, &phi, j).unwrap(), next.value(j));
        }
        prop_assert_eq!(
            renormalized_phi(&a, &next, 2).unwrap(),
            renormalized_phi(&a, &phi, 3).unwrap()
        );
    }

    #[test]
    fn dictionary_round_trip(which in 0usize..3, k in 1usize..=4, seed in any::<u64>()) {
        let inst = &packaged()[which];
        let diagram = build_diagram(&inst.towers);
        let heights = diagram.level_heights(k).unwrap().to_vec();
        let j = (seed % heights.len() as u64) as usize;
        let h = (seed / 7) % heights[j];
        let p = diagram.floor_to_path(k, j, h).unwrap();
        let c = diagram.path_to_floor(&p).unwrap();
        prop_assert_eq!((c.tower, c.height), (j, h));
        prop_assert_eq!(diagram.parse_path(&p.to_string()).unwrap(), p.clone());
        if let Ok(next) = diagram.adic_successor(&p) {
            prop_assert_eq!(diagram.adic_predecessor(&next).unwrap(), p);
        }
    }

    #[test]
    fn cylinder_measures_are_additive(which in 0usize..3, k in 1usize..=4, seed in any::<u64>(), t in -1.0f64..1.0) {
        let inst = &packaged()[which];
        let phi = inst.phi.clone().unwrap();
        let diagram = build_diagram(&inst.towers);
        let f = FloorCocycle::new(&diagram, &phi).unwrap();
        let psi = vec![t; phi.m()];
        let mu = MaharamMeasure::new(&diagram, &f, MaharamParameter::new(psi).unwrap()).unwrap();
        let heights = diagram.level_heights(k).unwrap().to_vec();
        let j = (seed % heights.len() as u64) as usize;
        let p = diagram.floor_to_path(k, j, (seed / 11) % heights[j]).unwrap();
        let a = GroupElement::new(vec![(seed % 5) as i64 - 2; phi.m()]);
        // J(p) splits into the cylinders of its one-edge extensions
        let total: f64 = diagram
            .edges()
            .filter(|&e| diagram.source(e) == p.target())
            .map(|e| {
                let mut edges = p.edges().to_vec();
                edges.push(e);
                mu.cylinder_measure(&diagram.path(edges).unwrap(), &a)
            })
            .sum();
        prop_assert!(close(total, mu.cylinder_measure(&p, &a)));
        let b = GroupElement::unit(phi.m(), 0);
        let ratio = mu.cylinder_measure(&p, &(&a + &b)) / mu.cylinder_measure(&p, &a);
        prop_assert!(close(ratio, t.exp()));
    }
}
