use cossin::families::{construct, sample, FamilyDescriptor, Triple, Variant};
use cossin::homomorphisms::{decompose_sine_pair, is_sine_solution, Context};
use cossin::semigroup::{
    adjoin_identity, chain, cyclic, dedup_isomorphic, enumerate_semigroups, left_zero, null,
    truncated_add,
};
use cossin::{func, Cyclo, Scalar, Semigroup, C64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// any three of these have lcm ≤ 120, below the default order cap
const ORDERS: [u32; 6] = [1, 3, 4, 5, 8, 12];

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn cyclo() -> impl Strategy<Value = Cyclo> {
    (prop::sample::select(&ORDERS[..]), prop::collection::vec(rational(), 1..8))
        .prop_map(|(order, coeffs)| Cyclo::from_coeffs(order, coeffs).unwrap())
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

fn pool() -> Vec<Semigroup> {
    let mut v = vec![
        cyclic(2).unwrap(),
        cyclic(3).unwrap(),
        null(2).unwrap(),
        left_zero(2).unwrap(),
        chain(2).unwrap(),
        truncated_add(3).unwrap(),
        adjoin_identity(&null(2).unwrap()),
    ];
    v.extend(enumerate_semigroups(3, false).unwrap());
    v
}

fn triple() -> impl Strategy<Value = Triple<Cyclo>> {
    let f = || prop::collection::vec(rational().prop_map(Cyclo::from_rational), 3);
    (f(), f(), f()).prop_map(|(f, g, h)| Triple::new(f, g, h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in cyclo(), b in cyclo(), c in cyclo()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(
            a.clone() * (b.clone() + c.clone()),
            a.clone() * b.clone() + a.clone() * c.clone()
        );
        prop_assert!((a.clone() - a.clone()).is_zero());
        if !a.is_zero() {
            prop_assert!((a.clone() * Scalar::inv(&a).unwrap()).is_one());
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism(a in cyclo(), b in cyclo()) {
        let e = |x: &Cyclo| C64::from_exact(x);
        prop_assert!(close(e(&(a.clone() * b.clone())), e(&a) * e(&b)));
        prop_assert!(close(e(&(a.clone() + b.clone())), e(&a) + e(&b)));
        if !a.is_zero() {
            prop_assert!(close(e(&Scalar::inv(&a).unwrap()), e(&a).inv()));
        }
    }

    #[test]
    fn reduction_is_idempotent(
        order in prop::sample::select(&ORDERS[..]),
        coeffs in prop::collection::vec(rational(), 1..30),
        k in 1u32..4,
    ) {
        let x = Cyclo::from_coeffs(order, coeffs).unwrap();
        let again = Cyclo::from_coeffs(x.order(), x.coeffs().to_vec()).unwrap();
        prop_assert_eq!(&again, &x);
        // the same element written in a larger field
        let wide = x.lift(x.order() * k);
        let back = Cyclo::from_coeffs(wide.order(), wide.coeffs().to_vec()).unwrap();
        prop_assert!((back - x).is_zero());
    }

    #[test]
    fn roots_of_unity_have_their_order(order in 1u32..40, k in -50i64..50) {
        let z = Cyclo::root_of_unity(order, k).unwrap();
        prop_assert!(z.pow(order).is_one());
    }

    #[test]
    fn relabelled_tables_are_identified(idx in 0usize..200, perm in Just(()).prop_perturb(|_, mut rng| {
        let mut p = vec![0usize, 1, 2];
        for i in (1..3).rev() {
            p.swap(i, rng.random_range(0..=i));
        }
        p
    })) {
        let list = enumerate_semigroups(3, false).unwrap();
        let s = &list[idx % list.len()];
        let r = s.relabel(&perm);
        prop_assert!(s.is_isomorphic(&r));
        prop_assert_eq!(s.canonical_form(), r.canonical_form());
        prop_assert_eq!(dedup_isomorphic(&[s.clone(), r]).len(), 1);
    }

    #[test]
    fn sine_space_is_closed_under_combination(
        idx in 0usize..200,
        which in 0usize..16,
        coeffs in prop::collection::vec(rational(), 3),
    ) {
        let list = pool();
        let s = &list[idx % list.len()];
        let ctx = Context::<Cyclo>::new(s).unwrap();
        let j = which % ctx.chars.len();
        let basis = &ctx.sine_bases[j];
        let terms: Vec<(Cyclo, &[Cyclo])> = basis
            .iter()
            .zip(&coeffs)
            .map(|(b, c)| (Cyclo::from_rational(c.clone()), b.as_slice()))
            .collect();
        let phi = func::lincomb(s.order(), &terms);
        prop_assert!(is_sine_solution(s, &phi, &ctx.chars[j].values, 0.0).unwrap());
    }

    #[test]
    fn sine_pair_decomposition_round_trips(
        idx in 0usize..200,
        a in 0usize..16,
        b in 0usize..16,
        lambda in rational(),
    ) {
        prop_assume!(!lambda.is_zero());
        let list = pool();
        let s = &list[idx % list.len()];
        let ctx = Context::<Cyclo>::new(s).unwrap();
        let (i, j) = (a % ctx.chars.len(), b % ctx.chars.len());
        prop_assume!(i != j);
        let (c1, c2) = (&ctx.chars[i].values, &ctx.chars[j].values);
        let n = s.order();
        let lam = Cyclo::from_rational(lambda);
        let k = (Cyclo::from_int(2) * lam.clone()).inv().unwrap();
        let f = func::lincomb(n, &[(k.clone(), c1), (-k, c2)]);
        let half = Cyclo::from_ratio(1, 2);
        let g = func::lincomb(n, &[(half.clone(), c1), (half, c2)]);
        let d = decompose_sine_pair(s, &f, &g, &ctx.char_values(), 0.0).unwrap();
        let same = d.lambda == lam && &d.chi1 == c1 && &d.chi2 == c2;
        let swapped = d.lambda == -lam && &d.chi1 == c2 && &d.chi2 == c1;
        prop_assert!(same || swapped, "{:?}", d);
    }

    #[test]
    fn conjugation_composes(t in triple(), a in rational(), b in rational()) {
        let (a, b) = (Cyclo::from_rational(a), Cyclo::from_rational(b));
        prop_assert_eq!(t.conjugate(&a).conjugate(&b), t.conjugate(&(a.clone() + b)));
        prop_assert_eq!(t.conjugate(&a).conjugate(&-a), t);
    }

    #[test]
    fn scaling_maps_families_to_families(
        idx in 0usize..7,
        v in 0usize..7,
        seed in any::<u64>(),
        s in rational(),
    ) {
        prop_assume!(!s.is_zero());
        let list = pool();
        let sg = &list[idx];
        let ctx = Context::<Cyclo>::new(sg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let variant = Variant::ALL[v];
        let Some(d) = sample::descriptor(&ctx, variant, &mut rng) else {
            return Ok(());
        };
        let s = Cyclo::from_rational(s);
        let scaled: FamilyDescriptor<Cyclo> = d.rescale(&s);
        let t = construct(sg, &d, 0.0).unwrap();
        prop_assert_eq!(construct(sg, &scaled, 0.0).unwrap(), t.rescale(&s));
        prop_assert_eq!(scaled.rescale(&s.inv().unwrap()), d);
    }
}
