use cossin::families::{
    classify, construct, decompose_prop34, fit_linear_constants, fit_structure_constants,
    gamma2_closed_form, gamma2_polynomial, sample, verify_equation, Family, FamilyDescriptor,
    Prop34, Triple, Variant,
};
use cossin::homomorphisms::Context;
use cossin::semigroup::{adjoin_identity, chain, cyclic, left_zero, null, truncated_add};
use cossin::{Cyclo, Scalar, Semigroup, C64};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q(n: i64) -> Cyclo {
    Cyclo::from_int(n)
}

fn v(xs: &[i64]) -> Vec<Cyclo> {
    xs.iter().map(|&x| q(x)).collect()
}

fn test_semigroups() -> Vec<(&'static str, Semigroup)> {
    vec![
        ("cyclic(2)", cyclic(2).unwrap()),
        ("cyclic(3)", cyclic(3).unwrap()),
        ("null(2)", null(2).unwrap()),
        ("left_zero(2)", left_zero(2).unwrap()),
        ("chain(2)", chain(2).unwrap()),
        ("truncated_add(3)", truncated_add(3).unwrap()),
        (
            "adjoin_identity(null(2))",
            adjoin_identity(&null(2).unwrap()),
        ),
    ]
}

#[test]
fn classify_examples() {
    let t3 = truncated_add(3).unwrap();
    let ctx = Context::<Cyclo>::new(&t3).unwrap();
    let t = Triple::new(v(&[0, 0, 0]), v(&[3, -1, 2]), v(&[0, 0, 0]));
    assert_eq!(
        classify(&ctx, &t, 0.0).unwrap().primary.variant(),
        Variant::T11
    );

    let t = Triple::new(v(&[0, 1, 0]), v(&[0, 0, 0]), v(&[1, 0, 0]));
    let c = classify(&ctx, &t, 0.0).unwrap();
    assert_eq!(
        c.primary,
        FamilyDescriptor::new(
            q(0),
            Family::T21 {
                chi: v(&[0, 0, 0]),
                phi: v(&[1, 0, 0]),
                psi: v(&[0, 1, 0])
            }
        )
    );
    assert!(!c.dependent);

    let c2 = cyclic(2).unwrap();
    let ctx = Context::<Cyclo>::new(&c2).unwrap();
    let t = Triple::new(v(&[0, 2]), v(&[1, 0]), v(&[0, 0]));
    let c = classify(&ctx, &t, 0.0).unwrap();
    match &c.primary.family {
        Family::T12 { lambda, rho, .. } => {
            assert_eq!(rho, &q(0));
            assert!(lambda == &q(1) || lambda == &q(-1));
        }
        other => panic!("expected T1.2, got {other:?}"),
    }
    assert_eq!(c.primary.reconstruct(), t);
}

#[test]
fn non_solutions_are_rejected() {
    let c2 = cyclic(2).unwrap();
    let ctx = Context::<Cyclo>::new(&c2).unwrap();
    let bad = Triple::new(v(&[0, 1]), v(&[1, 0]), v(&[0, 1]));
    assert!(matches!(
        classify(&ctx, &bad, 0.0),
        Err(cossin::Error::NotASolution(_))
    ));
}

#[test]
fn structure_constant_examples() {
    let t3 = truncated_add(3).unwrap();
    let t = Triple::new(v(&[0, 1, 0]), v(&[0, 0, 0]), v(&[1, 0, 0]));
    assert_eq!(
        fit_linear_constants(&t3, &t, 0.0).unwrap(),
        [q(0), q(0), q(0), q(0)]
    );

    let c3 = cyclic(3).unwrap();
    let ctx = Context::<Cyclo>::new(&c3).unwrap();
    let chars = ctx.exact_chars.clone();
    let d = FamilyDescriptor::new(
        q(0),
        Family::T24 {
            lambda: q(1),
            rho: q(1),
            c: Cyclo::from_ratio(1, 2),
            chi1: chars[1].clone(),
            chi2: chars[2].clone(),
            chi3: chars[3].clone(),
        },
    );
    let t = construct(&c3, &d, 0.0).unwrap();
    let k = fit_structure_constants(&ctx, &t, 0.0).unwrap();
    assert!(k.quadratic_residual().is_zero());
    assert!(k.lambda_mu_eta_residuals().iter().all(|x| x.is_zero()));
    let back = classify(&ctx, &t, 0.0).unwrap();
    assert_eq!(back.primary.variant(), Variant::T24);
    assert_eq!(back.primary.reconstruct(), t);
}

#[test]
fn case_split_examples() {
    let t3 = truncated_add(3).unwrap();
    let ctx = Context::<Cyclo>::new(&t3).unwrap();
    let base = construct(
        &t3,
        &FamilyDescriptor::new(
            q(0),
            Family::T22 {
                c: q(1),
                mu: v(&[1, 1, 1]),
                chi: v(&[0, 0, 0]),
                phi: v(&[1, 0, 0]),
            },
        ),
        0.0,
    )
    .unwrap();
    match decompose_prop34(&ctx, &base, 0.0).unwrap() {
        Prop34::Multiplicative { beta, mu, .. } => {
            assert_eq!(beta, q(1));
            assert_eq!(mu, v(&[1, 1, 1]));
        }
        other => panic!("expected case 1, got {other:?}"),
    }
    // M(1) shifts the roots of γ₂'(δ) = δ³ + δ² to {1, 1, 0}, so this one
    // still has γ₂ = 0 and lands in case 2.
    let shifted = base.conjugate(&q(1));
    assert_eq!(decompose_prop34(&ctx, &shifted, 0.0).unwrap().case(), 2);

    let psi_pair = Triple::new(v(&[0, 1, 0]), v(&[0, 0, 0]), v(&[1, 0, 0]));
    let moved = psi_pair.conjugate(&q(1));
    let split = decompose_prop34(&ctx, &moved, 0.0).unwrap();
    assert_eq!(split.case(), 3);
    match split {
        Prop34::Conjugated { delta, base: inner } => {
            assert_eq!(delta, q(1));
            assert_eq!(inner.case(), 1);
        }
        _ => unreachable!(),
    }
}

#[test]
fn gamma2_interpolation_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (_, s) in test_semigroups() {
        let ctx = Context::<Cyclo>::new(&s).unwrap();
        for variant in [Variant::T21, Variant::T22, Variant::T23, Variant::T24] {
            let Some(d) = sample::descriptor(&ctx, variant, &mut rng) else {
                continue;
            };
            let t = construct(&s, &d, 0.0).unwrap();
            let lin = fit_linear_constants(&s, &t, 0.0).unwrap();
            assert_eq!(
                gamma2_polynomial(&s, &t, 0.0).unwrap(),
                gamma2_closed_form(&lin)
            );
        }
    }
}

#[test]
fn exact_round_trip_on_test_semigroups() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, s) in test_semigroups() {
        let ctx = Context::<Cyclo>::new(&s).unwrap();
        for variant in Variant::ALL {
            for _ in 0..8 {
                let Some(d) = sample::descriptor(&ctx, variant, &mut rng) else {
                    break;
                };
                let t = construct(&s, &d, 0.0).unwrap_or_else(|e| panic!("{name} {variant}: {e}"));
                assert!(verify_equation(&s, &t, 0.0).unwrap().solves);
                let c = classify(&ctx, &t, 0.0)
                    .unwrap_or_else(|e| panic!("{name} {variant} {d:?}: {e}"));
                assert_eq!(c.primary.reconstruct(), t, "{name} {variant}");
                assert!(
                    c.variants().contains(&variant) || c.primary.variant() <= variant,
                    "{name} {variant}"
                );
            }
        }
    }
}

#[test]
fn float_round_trip_on_test_semigroups() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (name, s) in test_semigroups() {
        let exact = Context::<Cyclo>::new(&s).unwrap();
        let ctx = Context::<C64>::new(&s).unwrap();
        for variant in Variant::ALL {
            for _ in 0..4 {
                let Some(d) = sample::descriptor(&exact, variant, &mut rng) else {
                    break;
                };
                let d: FamilyDescriptor<C64> = d.map(C64::from_exact);
                let t = construct(&s, &d, 1e-9).unwrap();
                let c = classify(&ctx, &t, 1e-8)
                    .unwrap_or_else(|e| panic!("{name} {variant} {d:?}: {e}"));
                assert!(
                    c.primary.reconstruct().approx_eq(&t, 1e-8),
                    "{name} {variant}"
                );
            }
        }
    }
}
