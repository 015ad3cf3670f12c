use proptest::prelude::*;

use lambda_ca::additive::{sigma, sqleq};
use lambda_ca::fsysp::{derive, f_check, f_sqleq, translate};
use lambda_ca::parse::{parse_term, parse_type};
use lambda_ca::precision::precedes;
use lambda_ca::propgen::{default_context, gen_typed_term, GenConfig};
use lambda_ca::rewrite::{is_normal, normalize, step, Group, Strategy as Reduction, DEFAULT_FUEL};
use lambda_ca::syntax::{alpha_eq, canonicalize_term, Context, Term, Type};
use lambda_ca::typing::synthesize;

fn sample(seed: u64, depth: usize) -> (Context, Term, Type) {
    let cfg = GenConfig { seed, max_depth: depth, ..GenConfig::default() };
    let ctx = default_context(&cfg);
    let (t, ty) = gen_typed_term(&cfg, &ctx).next().unwrap();
    (ctx, t, ty)
}

fn strategy() -> impl Strategy<Value = Reduction> {
    prop_oneof![
        Just(Reduction::Leftmost),
        Just(Reduction::Rightmost),
        any::<u64>().prop_map(Reduction::Random),
        Just(Reduction::ByGroup(vec![Group::Beta, Group::A, Group::F, Group::E])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_then_parsing_is_identity(seed in any::<u64>(), depth in 0usize..4) {
        let (_, t, ty) = sample(seed, depth);
        let back = parse_term(&t.to_string()).unwrap();
        prop_assert!(alpha_eq(&back, &t), "{t} reparsed as {back}");
        prop_assert_eq!(parse_type(&ty.to_string()).unwrap(), ty);
    }

    #[test]
    fn canonicalization_is_idempotent(seed in any::<u64>()) {
        let (_, t, _) = sample(seed, 3);
        let once = canonicalize_term(&t);
        prop_assert_eq!(canonicalize_term(&once), once);
    }

    #[test]
    fn synthesis_is_deterministic_and_matches_generator(seed in any::<u64>()) {
        let (ctx, t, ty) = sample(seed, 3);
        prop_assert_eq!(synthesize(&ctx, &t).unwrap(), ty);
    }

    #[test]
    fn normal_forms_have_no_redex(seed in any::<u64>(), s in strategy()) {
        let (_, t, _) = sample(seed, 3);
        let out = normalize(&t, &s, DEFAULT_FUEL);
        prop_assert!(out.is_normal());
        prop_assert!(is_normal(out.term()));
        prop_assert!(step(out.term()).is_empty());
    }

    #[test]
    fn normal_forms_agree_across_strategies(seed in any::<u64>(), s in strategy()) {
        let (_, t, _) = sample(seed, 3);
        let left = normalize(&t, &Reduction::Leftmost, DEFAULT_FUEL);
        let other = normalize(&t, &s, DEFAULT_FUEL);
        prop_assert!(alpha_eq(left.term(), other.term()), "{} vs {}", left.term(), other.term());
    }

    #[test]
    fn strategy_names_round_trip(s in strategy()) {
        prop_assert_eq!(s.to_string().parse::<Reduction>().unwrap(), s);
    }

    #[test]
    fn precision_is_reflexive_and_grows_with_summands(a in any::<u64>(), b in any::<u64>()) {
        let (_, _, t) = sample(a, 3);
        let (_, _, r) = sample(b, 3);
        prop_assert!(precedes(&t, &t).is_ok());
        let both = Type::from_summands([t.summands(), r.summands()].concat());
        prop_assert!(precedes(&t, &both).is_ok());
        prop_assert!(precedes(&Type::zero(), &r).is_ok());
    }

    #[test]
    fn abstraction_is_idempotent(seed in any::<u64>()) {
        let (_, t, _) = sample(seed, 3);
        let once = sigma(&t);
        prop_assert_eq!(sigma(once.term()), once);
    }

    #[test]
    fn a_part_is_below_the_whole(a in any::<u64>(), b in any::<u64>()) {
        let (_, t, _) = sample(a, 3);
        let (_, r, _) = sample(b, 3);
        let part = sigma(&t);
        let whole = sigma(&Term::sum(vec![t, r]));
        prop_assert!(sqleq(&part, &part));
        prop_assert!(sqleq(&part, &whole));
    }

    #[test]
    fn translations_type_check(seed in any::<u64>()) {
        let (ctx, t, _) = sample(seed, 3);
        let d = derive(&ctx, &sigma(&t)).unwrap();
        prop_assert!(f_check(&d).is_ok());
        let f = translate(&d);
        prop_assert!(f_sqleq(&f, &f));
    }
}
