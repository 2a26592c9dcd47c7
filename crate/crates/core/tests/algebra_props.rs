use num_bigint::BigInt;
use permuchi::algebra::{exact_div_binomial, linear_binomial};
use permuchi::{ExponentVec, LaurentPoly};
use proptest::prelude::*;

fn poly(nvars: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((prop::collection::vec(-5i32..=5, nvars), -20i64..=20), 0..7).prop_map(
        move |terms| {
            LaurentPoly::from_terms(
                nvars,
                terms.into_iter().map(|(e, c)| (ExponentVec::from(e), BigInt::from(c))),
            )
            .unwrap()
        },
    )
}

fn triple() -> impl Strategy<Value = (LaurentPoly, LaurentPoly, LaurentPoly)> {
    (1usize..=5).prop_flat_map(|n| (poly(n), poly(n), poly(n)))
}

fn with_pair() -> impl Strategy<Value = (LaurentPoly, usize, usize)> {
    (2usize..=5).prop_flat_map(|n| (poly(n), 1..=n, 1..=n).prop_filter("a != b", |(_, a, b)| a != b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn addition_laws((p, q, r) in triple()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p + &LaurentPoly::zero(p.nvars()), p.clone());
        prop_assert_eq!(&p + &(-&q), &p - &q);
    }

    #[test]
    fn multiplication_laws((p, q, r) in triple()) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &LaurentPoly::one(p.nvars()), p.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism((p, q, _r) in triple()) {
        prop_assert_eq!((&p + &q).eval_ones(), p.eval_ones() + q.eval_ones());
        prop_assert_eq!((&p * &q).eval_ones(), p.eval_ones() * q.eval_ones());
    }

    #[test]
    fn dualize_is_an_involutive_automorphism((p, q, _r) in triple()) {
        prop_assert_eq!(p.dualize().dualize(), p.clone());
        prop_assert_eq!((&p * &q).dualize(), &p.dualize() * &q.dualize());
        prop_assert_eq!((&p + &q).dualize(), &p.dualize() + &q.dualize());
    }

    #[test]
    fn division_inverts_multiplication((q, a, b) in with_pair()) {
        let prod = &q * &linear_binomial(q.nvars(), a, b);
        prop_assert_eq!(exact_div_binomial(&prod, a, b).unwrap(), q);
    }

    #[test]
    fn text_form_is_canonical((p, _q, _r) in triple()) {
        let s = p.to_string();
        let back = LaurentPoly::parse(&s, p.nvars()).unwrap();
        prop_assert_eq!(back.to_string(), s);
        prop_assert_eq!(back, p);
    }

    #[test]
    fn json_form_round_trips((p, _q, _r) in triple()) {
        let terms = p.to_json_terms();
        let back = LaurentPoly::from_json_terms(p.nvars(), &terms).unwrap();
        prop_assert_eq!(back.to_json_terms(), terms);
        prop_assert_eq!(back, p);
    }
}
