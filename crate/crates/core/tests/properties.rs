use proptest::prelude::*;

use rotnorm_core::bounds::{
    diameter_ledger, element_ledger, lower_cl, relation_close, upper_clb_modg, verdict, Bound, BoundLedger, Quantity,
    Status,
};
use rotnorm_core::circle::{IsotopySampler, PLIsotopy};
use rotnorm_core::group::{self, FiniteGroup, Permutation};
use rotnorm_core::lattice::k_hat;
use rotnorm_core::rational::{q, qi, sup_norm};
use rotnorm_core::{AffineCoset, IntLattice, ManifoldContext, Q};

fn generators(m: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, m), 1..=m + 1)
}

fn lattice_and_offset() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, Vec<Q>)> {
    (1usize..=3).prop_flat_map(|m| {
        let offset = prop::collection::vec((-20i64..=20, 1i64..=8).prop_map(|(n, d)| q(n, d)), m);
        (Just(m), generators(m), offset)
    })
}

fn bound() -> impl Strategy<Value = Bound> {
    prop_oneof![
        4 => (0i64..40, 1i64..4).prop_map(|(n, d)| Bound::Value(q(n, d))),
        1 => Just(Bound::Finite),
        1 => Just(Bound::Infinite),
    ]
}

/// Ledgers with upper bounds only, so closure never meets a contradiction.
fn upper_ledger() -> impl Strategy<Value = BoundLedger> {
    prop::collection::vec((0..Quantity::ALL.len(), bound()), 0..6).prop_map(|items| {
        let mut l = BoundLedger::new();
        for (i, b) in items {
            l.tighten_upper(Quantity::ALL[i], b, "given");
        }
        l
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|images| Permutation::from_images(&images).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermite_form_ignores_generator_order((m, gens, _x) in lattice_and_offset()) {
        let a = IntLattice::normalize(m, &gens).unwrap();
        let mut rev = gens.clone();
        rev.reverse();
        prop_assert_eq!(&a, &IntLattice::normalize(m, &rev).unwrap());
        prop_assert_eq!(&a, &IntLattice::normalize(m, a.basis()).unwrap());
        for g in &gens {
            prop_assert!(a.member(g).unwrap());
        }
    }

    #[test]
    fn kernel_functional_kills_the_lattice((m, gens, _x) in lattice_and_offset()) {
        let a = IntLattice::normalize(m, &gens).unwrap();
        match a.kernel_functional() {
            Ok(phi) => {
                prop_assert!(a.rank() < m);
                prop_assert!(phi.iter().any(|&c| c != 0));
                for g in &gens {
                    prop_assert_eq!(g.iter().zip(&phi).map(|(a, b)| a * b).sum::<i64>(), 0);
                }
            }
            Err(_) => prop_assert!(a.is_full_rank()),
        }
    }

    #[test]
    fn full_rank_index_is_product_of_invariant_factors((m, gens, _x) in lattice_and_offset()) {
        let a = IntLattice::normalize(m, &gens).unwrap();
        prop_assume!(a.is_full_rank());
        let pivots: u64 = a.basis().iter().zip(a.pivots()).map(|(r, &p)| r[p] as u64).product();
        prop_assert_eq!(a.invariant_factors().iter().product::<u64>(), pivots);
        let info = a.quotient_info();
        prop_assert_eq!(info.k_hat, info.k_finite().map(k_hat));
    }

    #[test]
    fn theta_is_a_class_function((m, gens, x) in lattice_and_offset(), c in prop::collection::vec(-3i64..=3, 4)) {
        let a = IntLattice::normalize(m, &gens).unwrap();
        let near = AffineCoset::new(a.clone(), x.clone()).unwrap().theta();
        prop_assert!(near.theta <= sup_norm(&x));
        prop_assert!(!near.points.is_empty());
        let coset = AffineCoset::new(a.clone(), x.clone()).unwrap();
        for p in &near.points {
            prop_assert_eq!(sup_norm(p), near.theta.clone());
            prop_assert!(coset.contains(p).unwrap());
        }
        // shifting the offset by a lattice vector changes nothing
        let mut v = vec![0i64; m];
        for (g, k) in gens.iter().zip(&c) {
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi += k * gi;
            }
        }
        let shifted: Vec<Q> = x.iter().zip(&v).map(|(xi, &vi)| xi + qi(vi)).collect();
        let again = AffineCoset::new(a, shifted).unwrap().theta();
        prop_assert_eq!(again.theta, near.theta);
        prop_assert_eq!(again.points, near.points);
    }

    #[test]
    fn theta_is_symmetric((m, gens, x) in lattice_and_offset()) {
        let a = IntLattice::normalize(m, &gens).unwrap();
        let neg: Vec<Q> = x.iter().map(|t| -t.clone()).collect();
        let t1 = AffineCoset::new(a.clone(), x).unwrap().theta().theta;
        let t2 = AffineCoset::new(a, neg).unwrap().theta().theta;
        prop_assert_eq!(t1, t2);
    }

    #[test]
    fn lift_inverse_and_composition(seed in any::<u64>()) {
        let mut s = IsotopySampler::new(seed, 0);
        let (f, g, h) = (s.lift(2), s.lift(2), s.lift(2));
        prop_assert!(f.compose(&f.inverse()).is_identity_map());
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
        let x = s.point();
        prop_assert_eq!(f.compose(&g).eval(&x), f.eval(&g.eval(&x)));
        prop_assert_eq!(f.eval(&(&x + qi(1))), f.eval(&x) + qi(1));
    }

    #[test]
    fn rotation_angle_of_products(seed in any::<u64>()) {
        let mut s = IsotopySampler::new(seed, 1);
        let f = s.based_isotopy();
        let g = s.based_isotopy();
        let p = s.point();
        // μ_p(FG) = μ_{g(p)}(F) + μ_p(G) when F is evaluated along G's endpoint
        let fg = f.compose(&g);
        let gp = g.end().eval(&p);
        prop_assert_eq!(fg.mu(&p), f.mu(&gp) + g.mu(&p));
        prop_assert_eq!(f.straightened().mu(&p), f.mu(&p));
        let inv = f.invert();
        prop_assert_eq!(inv.mu(&f.end().eval(&p)), -f.mu(&p));
    }

    #[test]
    fn loops_have_integer_rotation(seed in any::<u64>(), m in 1usize..=3) {
        let mut s = IsotopySampler::new(seed, 2);
        let f = s.loop_multi(m);
        prop_assert!(f.is_loop());
        prop_assert!(f.nu().iter().all(|x| x.is_integer()));
        let inv: Vec<Q> = f.invert().nu();
        prop_assert!(inv.iter().zip(f.nu()).all(|(a, b)| *a == -b));
    }

    #[test]
    fn rigid_rotation(n in -20i64..=20, d in 1i64..=12, p in 0i64..12) {
        let sigma = q(n, d);
        prop_assert_eq!(PLIsotopy::rotation(sigma.clone()).mu(&q(p, 12)), sigma);
    }

    #[test]
    fn relation_close_is_idempotent_and_monotone(l in upper_ledger()) {
        let closed = relation_close(&l).unwrap();
        prop_assert_eq!(&relation_close(&closed).unwrap(), &closed);
        for qty in Quantity::ALL {
            prop_assert!(closed.upper(qty) <= l.upper(qty));
            prop_assert!(closed.lower(qty) >= l.lower(qty));
        }
        prop_assert!(closed.upper(Quantity::ClF) <= closed.upper(Quantity::ClbF));
        prop_assert!(closed.upper(Quantity::Zeta) <= closed.upper(Quantity::ClbF).scale(&qi(4)));
    }

    #[test]
    fn element_bounds_never_cross(n in 0i64..400, d in 1i64..=12) {
        let theta = q(n, d);
        let lo = lower_cl(&theta, &qi(1), &qi(3)).unwrap();
        let hi = upper_clb_modg(&theta).unwrap();
        prop_assert!(lo <= qi(hi as i64));
        prop_assert!(qi(hi as i64) > theta * qi(2));
        let l = element_ledger(&ManifoldContext::closed_smooth(3, 1), &q(n, d)).unwrap();
        prop_assert!(relation_close(&l).is_ok());
    }

    #[test]
    fn verdict_agrees_with_ledger((m, gens, _x) in lattice_and_offset(), n in 2u32..=9) {
        let a = IntLattice::normalize(m, &gens).unwrap();
        let ctx = ManifoldContext::closed_smooth(n, m);
        let v = verdict(&ctx, &a).unwrap();
        let ledger = diameter_ledger(&ctx, &a.quotient_info(), None).unwrap();
        match v.status {
            Status::Unbounded => prop_assert!(a.kernel_functional().is_ok()),
            Status::Bounded => {
                prop_assert!(ledger.upper(Quantity::Cld).is_finite());
                prop_assert!(ledger.upper(Quantity::Clbd).is_finite());
            }
            Status::Unknown => prop_assert!(a.is_full_rank() && (n == 2 || n == 4)),
        }
    }

    #[test]
    fn commutator_length_is_a_norm(gens in prop::collection::vec(permutation(5), 1..3)) {
        let g = FiniteGroup::generate(5, &gens).unwrap();
        let cl = group::commutator_length(&g);
        prop_assert!(group::check_norm_axioms(&g, &cl).is_ok());
    }
}

#[test]
fn k_hat_is_weakly_increasing() {
    let seq: Vec<u64> = (0..200).map(k_hat).collect();
    assert!(seq.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(&seq[1..7], &[3, 5, 5, 7, 7, 9]);
}
