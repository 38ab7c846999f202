//! Property tests for the order, lattice, gauge, and gluing laws.

use num_traits::{One, Signed};
use proptest::prelude::*;
use randconvex_core::concat::glue;
use randconvex_core::convex::{gauge, Facet, L0ConvexSet};
use randconvex_core::order::{essinf, esssup};
use randconvex_core::rv::{CompareMode, LatticeOp, RandomVariable};
use randconvex_core::scalar::Scalar;
use randconvex_core::space::{CountablePartition, EventSet, SigmaAlgebra, Space};
use randconvex_core::Q;

fn q(n: i64, pow: u32) -> Q {
    Q::from_int(n) * Q::pow2(-(pow as i32))
}

fn atoms(n: usize) -> SigmaAlgebra<Q> {
    SigmaAlgebra::discrete(&Space::<Q>::uniform(n).unwrap()).unwrap()
}

prop_compose! {
    fn rational()(n in -16i64..=16, p in 0u32..=3) -> Q {
        q(n, p)
    }
}

prop_compose! {
    fn rv3()(vals in prop::collection::vec(rational(), 3)) -> RandomVariable<Q> {
        RandomVariable::from_values(&atoms(3), vals, None).unwrap()
    }
}

proptest! {
    #[test]
    fn order_antisymmetry(x in rv3(), y in rv3()) {
        let both = x.compare(&y, CompareMode::Geq, None).unwrap()
            && y.compare(&x, CompareMode::Geq, None).unwrap();
        prop_assert_eq!(both, x == y);
    }

    #[test]
    fn lattice_commutativity(x in rv3(), y in rv3()) {
        prop_assert_eq!(
            x.lattice(&y, LatticeOp::Meet).unwrap(),
            y.lattice(&x, LatticeOp::Meet).unwrap()
        );
        prop_assert_eq!(
            x.lattice(&y, LatticeOp::Join).unwrap(),
            y.lattice(&x, LatticeOp::Join).unwrap()
        );
    }

    #[test]
    fn lattice_absorption(x in rv3(), y in rv3()) {
        let join = x.lattice(&y, LatticeOp::Join).unwrap();
        prop_assert_eq!(x.lattice(&join, LatticeOp::Meet).unwrap(), x.clone());
        let meet = x.lattice(&y, LatticeOp::Meet).unwrap();
        prop_assert_eq!(x.lattice(&meet, LatticeOp::Join).unwrap(), x);
    }

    #[test]
    fn esssup_is_least_dominator(family in prop::collection::vec(rv3(), 1..5), cand in rv3()) {
        let sup = esssup(&family).unwrap();
        // dominates every member
        for m in &family {
            prop_assert!(sup.compare(m, CompareMode::Geq, None).unwrap());
        }
        // exhaustive cellwise-max oracle agrees
        let alg = atoms(3);
        let oracle_vals: Vec<Q> = (0..3)
            .map(|c| {
                family
                    .iter()
                    .map(|m| m.values()[c].clone())
                    .max()
                    .unwrap()
            })
            .collect();
        prop_assert_eq!(&sup, &RandomVariable::from_values(&alg, oracle_vals, None).unwrap());
        // any other dominator dominates the esssup
        let dominates_all = family
            .iter()
            .all(|m| cand.compare(m, CompareMode::Geq, None).unwrap());
        if dominates_all {
            prop_assert!(cand.compare(&sup, CompareMode::Geq, None).unwrap());
        }
        // essinf mirrors
        let inf = essinf(&family).unwrap();
        for m in &family {
            prop_assert!(m.compare(&inf, CompareMode::Geq, None).unwrap());
        }
    }

    #[test]
    fn glue_of_identical_elements_is_identity(x in rv3(), split in 0usize..3) {
        let alg = atoms(3);
        let a = EventSet::of_cells(&alg, [split]).unwrap();
        let b = a.complement();
        let partition = CountablePartition::new(vec![a, b], EventSet::empty(&alg)).unwrap();
        let glued = glue(&partition, &[x.clone(), x.clone()]).unwrap();
        prop_assert_eq!(glued, x);
    }

    #[test]
    fn glue_restricts_to_members(x in rv3(), y in rv3(), z in rv3()) {
        let alg = atoms(3);
        let partition = CountablePartition::finest(&alg);
        let glued = glue(&partition, &[x.clone(), y.clone(), z.clone()]).unwrap();
        prop_assert_eq!(glued.values()[0].clone(), x.values()[0].clone());
        prop_assert_eq!(glued.values()[1].clone(), y.values()[1].clone());
        prop_assert_eq!(glued.values()[2].clone(), z.values()[2].clone());
    }
}

fn symmetric_box(alg: &SigmaAlgebra<Q>, halfwidths: &[Q]) -> L0ConvexSet<Q> {
    let facets = halfwidths
        .iter()
        .map(|h| {
            vec![
                Facet::new(vec![Q::one()], h.clone()),
                Facet::new(vec![-Q::one()], h.clone()),
            ]
        })
        .collect();
    L0ConvexSet::cell_polytope(alg, alg, facets).unwrap()
}

prop_compose! {
    fn positive_rational()(n in 1i64..=16, p in 0u32..=2) -> Q {
        q(n, p)
    }
}

proptest! {
    #[test]
    fn gauge_homogeneity_on_balanced_polytopes(
        x in rv3(),
        scalar_vals in prop::collection::vec(rational(), 3),
        widths in prop::collection::vec(positive_rational(), 3)
    ) {
        let alg = atoms(3);
        let k = symmetric_box(&alg, &widths);
        let tol = Q::pow2(-10);
        let y = RandomVariable::from_values(&alg, scalar_vals, None).unwrap();
        let lhs = gauge(&k, &y.mul(&x).unwrap(), &tol).unwrap();
        let rhs = gauge(&k, &x, &tol).unwrap();
        prop_assert!(lhs.exact && rhs.exact);
        let lhs_vals = lhs.exact_values().unwrap();
        let rhs_vals = rhs.exact_values().unwrap();
        for c in 0..3 {
            let expected = y.values()[c].abs() * rhs_vals.values()[c].clone();
            prop_assert_eq!(lhs_vals.values()[c].clone(), expected);
        }
    }

    #[test]
    fn gauge_subadditivity_on_polytopes(
        x1 in rv3(),
        x2 in rv3(),
        widths in prop::collection::vec(positive_rational(), 3)
    ) {
        let alg = atoms(3);
        let k = symmetric_box(&alg, &widths);
        let tol = Q::pow2(-10);
        let sum = gauge(&k, &x1.add(&x2).unwrap(), &tol).unwrap().exact_values().unwrap();
        let a = gauge(&k, &x1, &tol).unwrap().exact_values().unwrap();
        let b = gauge(&k, &x2, &tol).unwrap().exact_values().unwrap();
        for c in 0..3 {
            prop_assert!(sum.values()[c].clone() <= a.values()[c].clone() + b.values()[c].clone());
        }
    }

    #[test]
    fn membership_monotone_in_scaling(
        x in rv3(),
        widths in prop::collection::vec(positive_rational(), 3),
        y1 in positive_rational(),
        bump in positive_rational()
    ) {
        // X ∈ yK and y ≤ y' imply X ∈ y'K for convex K containing 0
        let alg = atoms(3);
        let k = symmetric_box(&alg, &widths);
        let y2 = y1.clone() + bump;
        let scaled1: Vec<Q> = x.values().iter().map(|v| v.clone() / y1.clone()).collect();
        let scaled2: Vec<Q> = x.values().iter().map(|v| v.clone() / y2.clone()).collect();
        let member1 = (0..3).all(|c| {
            k.local_member(c, &scaled1[c..=c]).unwrap().unwrap()
        });
        let member2 = (0..3).all(|c| {
            k.local_member(c, &scaled2[c..=c]).unwrap().unwrap()
        });
        if member1 {
            prop_assert!(member2);
        }
    }

    #[test]
    fn codec_roundtrip(x in rv3()) {
        let dto = randconvex_core::codec::rv_to_dto(&x);
        let json = serde_json::to_string(&dto).unwrap();
        let parsed: randconvex_core::codec::RvDto = serde_json::from_str(&json).unwrap();
        let back = randconvex_core::codec::rv_from_dto::<Q>(&parsed, x.algebra().space()).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn total_measure_is_exactly_one_for_all_algebras() {
    for blocks in 1..=6u32 {
        for depth in 1..=4u32 {
            let s = Space::<Q>::dyadic_uniform(blocks, depth, randconvex_core::space::TailRule::zero())
                .unwrap();
            assert!(SigmaAlgebra::fine(&s).unwrap().total_measure().is_one());
            assert!(SigmaAlgebra::coarse(&s).unwrap().total_measure().is_one());
        }
    }
    for n in 1..=6usize {
        let s = Space::<Q>::uniform(n).unwrap();
        assert!(SigmaAlgebra::discrete(&s).unwrap().total_measure().is_one());
    }
}

#[test]
fn generic_over_scalar_width() {
    // the same computation runs at both rational widths
    use randconvex_core::Q64;
    let s = Space::<Q64>::dyadic_uniform(2, 2, randconvex_core::space::TailRule::zero()).unwrap();
    let fine = SigmaAlgebra::fine(&s).unwrap();
    let coarse = SigmaAlgebra::coarse(&s).unwrap();
    let x = RandomVariable::constant(&fine, Q64::ratio(3, 2));
    let n = randconvex_core::condnorm::conditional_l2_norm_sq(&x, &coarse).unwrap();
    assert!(n.values().iter().all(|v| *v == Q64::ratio(9, 4)));

    let s_big = Space::<Q>::dyadic_uniform(2, 2, randconvex_core::space::TailRule::zero()).unwrap();
    let fine_big = SigmaAlgebra::fine(&s_big).unwrap();
    let coarse_big = SigmaAlgebra::coarse(&s_big).unwrap();
    let x_big = RandomVariable::constant(&fine_big, Q::ratio(3, 2));
    let n_big = randconvex_core::condnorm::conditional_l2_norm_sq(&x_big, &coarse_big).unwrap();
    assert!(n_big.values().iter().all(|v| *v == Q::ratio(9, 4)));
}

#[test]
fn zero_is_never_strictly_positive() {
    let alg = atoms(2);
    let zero = RandomVariable::<Q>::zero(&alg);
    assert!(!zero.is_strictly_positive().unwrap());
    assert!(zero.is_nonnegative().unwrap());
}
