//! Property tests for the structural identities that hold on all inputs.

use proptest::prelude::*;

use cubelim::json::ComplexJson;
use cubelim::polycalc::MultiPolynomial;
use cubelim::poset::{punctured_product, MultiIndex};
use cubelim::random::{random_complex, rng};
use cubelim::ring::{rat, Rat};

fn multi_index_strategy(max_len: usize, max_entry: i64) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, 1..=max_len)
        .prop_map(|v| MultiIndex::new(v).expect("nonnegative entries"))
}

fn multi_index_exact(len: usize, max_entry: i64) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, len..=len)
        .prop_map(|v| MultiIndex::new(v).expect("nonnegative entries"))
}

fn polynomial_strategy(m: usize) -> impl Strategy<Value = MultiPolynomial> {
    prop::collection::btree_map(prop::collection::vec(0..=4i64, m..=m), -9i64..=9, 0..=6).prop_map(
        move |terms| {
            let terms = terms.into_iter().map(|(e, c)| (e, rat(c))).collect();
            MultiPolynomial::new(m, terms).expect("valid exponents")
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn punctured_product_cardinality(jvec in multi_index_strategy(3, 3)) {
        let poset = punctured_product(&jvec).unwrap();
        let expect: u64 = jvec
            .entries()
            .iter()
            .map(|&j| (1u64 << (j + 1)) - 1)
            .product();
        prop_assert_eq!(poset.len() as u64, expect);
    }

    #[test]
    fn truncation_is_idempotent_and_monotone(
        p in polynomial_strategy(2),
        jvec in multi_index_exact(2, 4),
        kvec in multi_index_exact(2, 4),
    ) {
        let once = p.truncate(&jvec).unwrap();
        prop_assert_eq!(once.truncate(&jvec).unwrap(), once.clone());
        // truncating further only removes terms
        let meet = jvec.meet(&kvec).unwrap();
        let smaller = p.truncate(&meet).unwrap();
        for (expo, coeff) in smaller.terms() {
            prop_assert_eq!(&once.coefficient(expo), coeff);
        }
    }

    #[test]
    fn homogeneous_part_is_the_monomial_filter(
        p in polynomial_strategy(2),
        jvec in multi_index_exact(2, 4),
    ) {
        prop_assert_eq!(p.homogeneous_part(&jvec).unwrap(), p.monomial_at(&jvec));
    }

    #[test]
    fn complex_json_roundtrip(seed in any::<u64>()) {
        let c = random_complex::<Rat>(3, 3, &mut rng(seed));
        let encoded = serde_json::to_string(&ComplexJson::from_complex(&c)).unwrap();
        let decoded: ComplexJson = serde_json::from_str(&encoded).unwrap();
        prop_assert_eq!(decoded.to_complex::<Rat>().unwrap(), c);
    }
}
