use acpm::harness::gen::{TermGen, Weights};
use acpm::lts::{bisimilar, build_lts};
use acpm::meadow::{MeadowKind, MeadowValue, QuantityEnv, QuantityTerm as Q};
use acpm::normalizer::{normalize, Normalizer};
use acpm::process::{ProcessTerm as P, SpecContext};
use acpm::speclang::{parse_spec, parse_term, SAMPLE_SPEC};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx() -> SpecContext {
    parse_spec(SAMPLE_SPEC).unwrap()
}

fn term(ctx: &SpecContext, seed: u64) -> P {
    let mut gen = TermGen::new(ctx);
    gen.weights = Weights::all_operators();
    gen.term(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn lts_equal(ctx: &SpecContext, l: &P, r: &P) -> bool {
    bisimilar(&build_lts(l, ctx).unwrap(), &build_lts(r, ctx).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_terms_parse_back(seed in any::<u64>()) {
        let ctx = ctx();
        let mut gen = TermGen::new(&ctx);
        gen.weights = Weights::all_operators();
        gen.open = true;
        let t = gen.term(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(parse_term(&t.to_string(), &ctx).unwrap(), t);
    }

    #[test]
    fn normal_form_is_bisimilar_to_the_term(seed in any::<u64>()) {
        let ctx = ctx();
        let t = term(&ctx, seed);
        let nf = normalize(&t, &ctx).unwrap().to_term();
        prop_assert!(lts_equal(&ctx, &t, &nf));
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>()) {
        let ctx = ctx();
        let nf = normalize(&term(&ctx, seed), &ctx).unwrap();
        prop_assert_eq!(normalize(&nf.to_term(), &ctx).unwrap(), nf);
    }

    #[test]
    fn memo_does_not_change_results(a in any::<u64>(), b in any::<u64>()) {
        let ctx = ctx();
        let (s, t) = (term(&ctx, a), term(&ctx, b));
        let mut shared = Normalizer::new(&ctx);
        shared.normalize(&s).unwrap();
        prop_assert_eq!(shared.normalize(&t).unwrap(), normalize(&t, &ctx).unwrap());
    }

    #[test]
    fn bisimilarity_is_an_equivalence(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let ctx = parse_spec("act a, b, c; comm a | b = c; meadow F 2;").unwrap();
        let (x, y, z) = (term(&ctx, a), term(&ctx, b), term(&ctx, c));
        let (lx, ly, lz) = (build_lts(&x, &ctx).unwrap(), build_lts(&y, &ctx).unwrap(), build_lts(&z, &ctx).unwrap());
        prop_assert!(bisimilar(&lx, &lx));
        prop_assert_eq!(bisimilar(&lx, &ly), bisimilar(&ly, &lx));
        if bisimilar(&lx, &ly) && bisimilar(&ly, &lz) {
            prop_assert!(bisimilar(&lx, &lz));
        }
    }

    #[test]
    fn guards_compose_like_conjunction(u in -4i64..=4, v in -4i64..=4, seed in any::<u64>()) {
        let ctx = ctx().with_meadow(MeadowKind::Rationals);
        let x = term(&ctx, seed);
        let (qu, qv) = (Q::literal(&MeadowValue::rational(u, 1)), Q::literal(&MeadowValue::rational(v, 1)));
        // Reference semantics: a guard lets its body through iff its value is zero.
        let expected = if u == 0 && v == 0 { x.clone() } else { P::Deadlock };
        let nested = P::guard(qu.clone(), P::guard(qv.clone(), x.clone()));
        prop_assert_eq!(normalize(&nested, &ctx).unwrap(), normalize(&expected, &ctx).unwrap());
        let either = P::alt(P::guard(qu, x.clone()), P::guard(qv, x.clone()));
        let expected = if u == 0 || v == 0 { x } else { P::Deadlock };
        prop_assert_eq!(normalize(&either, &ctx).unwrap(), normalize(&expected, &ctx).unwrap());
    }

    #[test]
    fn rationals_are_kept_in_lowest_terms(n in -500i64..500, d in 1i64..500, k in 1i64..50) {
        let scaled = MeadowValue::rational(n * k, d * k);
        prop_assert_eq!(&scaled, &MeadowValue::rational(n, d));
        let g = num_integer_gcd(n.abs(), d);
        let shown = scaled.to_string();
        let expected = if d / g == 1 { format!("{}", n / g) } else { format!("{}/{}", n / g, d / g) };
        prop_assert_eq!(shown, expected);
    }

    #[test]
    fn inverse_is_an_involution(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = MeadowKind::Rationals;
        let v = MeadowValue::rational(n, d);
        let env = QuantityEnv::new().bind("u", v.clone());
        prop_assert_eq!(Q::inv(Q::inv(Q::var("u"))).eval(&env, &q).unwrap(), v.clone());
        let expected = if n == 0 {
            MeadowValue::rational(0, 1)
        } else {
            MeadowValue::Rational(BigRational::new(BigInt::from(d), BigInt::from(n)))
        };
        prop_assert_eq!(Q::inv(Q::var("u")).eval(&env, &q).unwrap(), expected);
    }
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.max(1) } else { num_integer_gcd(b, a % b) }
}

/// Inverses in small prime fields agree with a search for `w` with `u * w = 1`.
#[test]
fn prime_field_inverse_matches_search() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let field = MeadowKind::prime_field(p).unwrap();
        for u in field.elements().unwrap() {
            let MeadowValue::Residue { value, .. } = u else { unreachable!() };
            let expected = (0..p).find(|w| value * w % p == 1).unwrap_or(0);
            let got = field.inv(&u).unwrap();
            assert_eq!(got, MeadowValue::Residue { value: expected, modulus: p }, "F{p}: inv({value})");
        }
    }
}
