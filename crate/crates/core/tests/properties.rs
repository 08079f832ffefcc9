use std::collections::HashMap;

use multimoments::enum_oracle::{SupportTable, DEFAULT_BUDGET};
use multimoments::mc_oracle::{sample, stream_rng};
use multimoments::{
    canonical_pattern, central_from_raw, central_moment, factorial_moment, index_tuples, pmf,
    raw_moment, raw_moment_via_mgf, validate_params, Exact, FactorialOrders, MomentKind,
    MultinomialParams, Scalar, TruncatedSeries,
};
use proptest::prelude::*;

fn q(p: i64, r: i64) -> Exact {
    Exact::from_ratio(p, r)
}

/// Probability vectors with denominators up to 12 and `Σx ≤ 1`.
fn simplex_point(d: usize) -> impl Strategy<Value = Vec<Exact>> {
    (1i64..=12, proptest::collection::vec(0i64..=12, d)).prop_map(|(den, nums)| {
        let mut left = den;
        nums.into_iter()
            .map(|n| {
                let take = n.min(left);
                left -= take;
                q(take, den)
            })
            .collect()
    })
}

fn params_strategy() -> impl Strategy<Value = MultinomialParams<Exact>> {
    (1u64..=6, 1usize..=4)
        .prop_flat_map(|(m, d)| (Just(m), simplex_point(d)))
        .prop_map(|(m, x)| validate_params(m, x).unwrap())
}

fn series_strategy() -> impl Strategy<Value = TruncatedSeries<Exact>> {
    proptest::collection::vec(-5i64..=5, 35).prop_map(|c| {
        let mut terms = Vec::new();
        let mut it = c.into_iter();
        for a in 0u8..=4 {
            for b in 0u8..=4 {
                for e in 0u8..=4 {
                    if a + b + e <= 4 {
                        terms.push((vec![a, b, e], q(it.next().unwrap(), 3)));
                    }
                }
            }
        }
        TruncatedSeries::from_terms(3, 4, &terms)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pattern_ignores_relabeling(t in proptest::collection::vec(1usize..=6, 1..=4), shift in 1usize..50, scale in 1usize..7) {
        // i ↦ scale·i + shift is injective.
        let relabeled: Vec<usize> = t.iter().map(|i| scale * i + shift).collect();
        prop_assert_eq!(canonical_pattern(&t), canonical_pattern(&relabeled));
    }

    #[test]
    fn closed_forms_permutation_symmetric(params in params_strategy(), seed in any::<u64>()) {
        let d = params.d();
        let tuple: Vec<usize> = (0..4).map(|k| 1 + ((seed >> (8 * k)) as usize % d)).collect();
        let mut rotated = tuple.clone();
        rotated.rotate_left(1);
        let mut swapped = tuple.clone();
        swapped.swap(0, 3);
        for other in [rotated, swapped] {
            prop_assert_eq!(raw_moment(&params, &tuple).unwrap(), raw_moment(&params, &other).unwrap());
            prop_assert_eq!(central_moment(&params, &tuple).unwrap(), central_moment(&params, &other).unwrap());
        }
    }

    #[test]
    fn three_routes_agree(params in params_strategy(), seed in any::<u64>(), len in 1usize..=4) {
        let d = params.d();
        let tuple: Vec<usize> = (0..len).map(|k| 1 + ((seed >> (8 * k)) as usize % d)).collect();
        let table = SupportTable::build(&params, DEFAULT_BUDGET).unwrap();
        let raw = raw_moment(&params, &tuple).unwrap();
        prop_assert_eq!(&raw, &table.moment(&tuple, MomentKind::Raw).unwrap());
        prop_assert_eq!(&raw, &raw_moment_via_mgf(&params, &tuple).unwrap());
        let central = central_moment(&params, &tuple).unwrap();
        prop_assert_eq!(&central, &table.moment(&tuple, MomentKind::Central).unwrap());
        prop_assert_eq!(&central, &central_from_raw(&params, &tuple).unwrap());
    }

    #[test]
    fn zero_probability_category_zeroes_moments(params in params_strategy(), seed in any::<u64>()) {
        let mut x = params.x().to_vec();
        let zeroed = 1 + (seed as usize % x.len());
        x[zeroed - 1] = q(0, 1);
        let params = validate_params(params.m(), x).unwrap();
        for len in 1..=4 {
            let mut t: Vec<usize> = (0..len).map(|k| 1 + ((seed >> (8 * k + 8)) as usize % params.d())).collect();
            t[(seed as usize >> 3) % len] = zeroed;
            prop_assert_eq!(raw_moment(&params, &t).unwrap(), q(0, 1));
            prop_assert_eq!(central_moment(&params, &t).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn distinct_tuples_are_factorial_moments(params in params_strategy(), mask in 1u32..16) {
        let d = params.d();
        let tuple: Vec<usize> = (1..=d).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        prop_assume!(!tuple.is_empty());
        let orders: Vec<u32> = (1..=d).map(|i| u32::from(tuple.contains(&i))).collect();
        prop_assert_eq!(
            raw_moment(&params, &tuple).unwrap(),
            factorial_moment(&params, &FactorialOrders::new(orders)).unwrap()
        );
    }

    #[test]
    fn pmf_symmetric_under_category_permutation(params in params_strategy(), seed in any::<u64>()) {
        let d = params.d();
        let mut perm: Vec<usize> = (0..d).collect();
        perm.rotate_left(seed as usize % d);
        let xp: Vec<Exact> = perm.iter().map(|&c| params.x()[c].clone()).collect();
        let permuted = validate_params(params.m(), xp).unwrap();
        for pt in multimoments::support(&params) {
            let k: Vec<i64> = pt.k.iter().map(|&v| v as i64).collect();
            let kp: Vec<i64> = perm.iter().map(|&c| k[c]).collect();
            prop_assert_eq!(pmf(&params, &k).unwrap(), pmf(&permuted, &kp).unwrap());
        }
    }

    #[test]
    fn pmf_sums_to_one(params in params_strategy()) {
        let table = SupportTable::build(&params, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(table.total_probability(), q(1, 1));
        for i in 1..=params.d() {
            prop_assert_eq!(table.moment(&[i], MomentKind::Raw).unwrap(), params.mean(i));
        }
    }

    #[test]
    fn jet_product_commutes_and_associates(a in series_strategy(), b in series_strategy(), c in series_strategy()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn samples_stay_in_support(m in 1u64..60, x in proptest::collection::vec(0.0f64..0.5, 1..5), seed in any::<u64>()) {
        let total: f64 = x.iter().sum();
        let x: Vec<f64> = if total > 1.0 { x.iter().map(|v| v / total).collect() } else { x };
        let params = validate_params(m, x).unwrap();
        let mut rng = stream_rng(seed, 3);
        for _ in 0..20 {
            let s = sample(&params, &mut rng);
            prop_assert!(s.iter().sum::<u64>() <= m);
            for (k, xi) in s.iter().zip(params.x()) {
                if *xi == 0.0 {
                    prop_assert_eq!(*k, 0);
                }
            }
        }
    }

    #[test]
    fn exact_render_round_trips(p in -10_000i64..10_000, r in 1i64..10_000) {
        let v = q(p, r);
        prop_assert_eq!(Exact::parse_literal(&v.render()).unwrap(), v);
    }

    #[test]
    fn float_render_round_trips(v in -1e6f64..1e6) {
        prop_assert_eq!(f64::parse_literal(&v.render()).unwrap().to_bits(), v.to_bits());
    }
}

#[test]
fn all_tuples_over_small_support_are_permutation_symmetric() {
    let params = validate_params(3, vec![q(1, 5), q(1, 3), q(1, 6)]).unwrap();
    for order in 1..=4 {
        let mut by_multiset: HashMap<Vec<usize>, (Exact, Exact)> = HashMap::new();
        for t in index_tuples(order, 3) {
            let mut key = t.clone();
            key.sort();
            let v = (
                raw_moment(&params, &t).unwrap(),
                central_moment(&params, &t).unwrap(),
            );
            if let Some(prev) = by_multiset.get(&key) {
                assert_eq!(prev, &v, "{t:?}");
            } else {
                by_multiset.insert(key, v);
            }
        }
    }
}
