//! Property tests for the scalar primitives and bound compositions.

use isac_rdb::channels::wjs_mi_upper_bound_from_avg;
use isac_rdb::mathfn::{binary_entropy, binary_entropy_inverse, digamma, kl_bernoulli, log_gamma};
use isac_rdb::nats::Nats;
use isac_rdb::occupancy::detection_error_lower_bound;
use isac_rdb::optimizer::{pareto_hull, RegionPoint};
use isac_rdb::rd::{bernoulli_rd_inverse, second_order_bound, BernoulliSource};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn entropy_inverse_round_trip(p in 0.0f64..=1.0) {
        let h = binary_entropy(p).unwrap();
        let back = binary_entropy_inverse(h).unwrap();
        prop_assert!((back - p.min(1.0 - p)).abs() <= 1e-10);
    }

    #[test]
    fn binary_entropy_is_concave(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let mid = binary_entropy(0.5 * (a + b)).unwrap().0;
        let avg = 0.5 * (binary_entropy(a).unwrap().0 + binary_entropy(b).unwrap().0);
        prop_assert!(mid >= avg - 1e-12);
    }

    #[test]
    fn digamma_recurrence(x in 0.05f64..50.0) {
        let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
        prop_assert!((lhs - 1.0 / x).abs() <= 1e-10 * (1.0 + 1.0 / x));
    }

    #[test]
    fn log_gamma_recurrence(x in 0.05f64..50.0) {
        let lhs = log_gamma(x + 1.0).unwrap();
        let rhs = log_gamma(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn kl_bernoulli_nonnegative(p in 0.0f64..=1.0, q in 0.001f64..=0.999) {
        prop_assert!(kl_bernoulli(p, q).unwrap().0 >= -1e-15);
    }

    #[test]
    fn bernoulli_inverse_is_convex_in_rate(
        p1 in 0.05f64..=0.95,
        r0 in 0.0f64..0.8,
        r1 in 0.0f64..0.8,
    ) {
        let src = BernoulliSource::new(p1).unwrap();
        let f = |r: f64| bernoulli_rd_inverse(&src, Nats(r)).unwrap();
        let mid = f(0.5 * (r0 + r1));
        let avg = 0.5 * (f(r0) + f(r1));
        prop_assert!(mid <= avg + 1e-9);
    }

    #[test]
    fn wjs_bounded_and_monotone(
        p1 in 0.01f64..=0.99,
        d0 in 0.0f64..10.0,
        delta in 0.0f64..10.0,
    ) {
        let h = binary_entropy(p1).unwrap().0;
        let lo = wjs_mi_upper_bound_from_avg(p1, Nats(d0)).unwrap().0;
        let hi = wjs_mi_upper_bound_from_avg(p1, Nats(d0 + delta)).unwrap().0;
        prop_assert!(lo >= 0.0 && hi <= h + 1e-12);
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn detection_bound_never_exceeds_guessing(
        p1 in 0.01f64..=0.99,
        mi in 0.0f64..2.0,
    ) {
        let b = detection_error_lower_bound(p1, Nats(mi)).unwrap();
        prop_assert!(b >= 0.0);
        prop_assert!(b <= p1.min(1.0 - p1) + 1e-12);
    }

    #[test]
    fn second_order_is_a_relaxation(p in 0.02f64..=0.98, mi in 0.0f64..0.7) {
        let p_star = p.min(1.0 - p);
        let so = second_order_bound(p_star, p_star, Nats(mi)).unwrap();
        let src = BernoulliSource::new(p).unwrap();
        let exact = bernoulli_rd_inverse(&src, Nats(mi)).unwrap();
        prop_assert!(so <= exact + 1e-12);
    }

    #[test]
    fn pareto_hull_is_undominated_and_sorted(
        points in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..24)
    ) {
        let cloud: Vec<RegionPoint> = points
            .iter()
            .map(|&(d, r)| RegionPoint {
                sweep_param: 0.0,
                d_bound: d,
                d_stderr: 0.0,
                rate_mean: r,
                rate_stderr: 0.0,
                bcrb: None,
                excluded: 0,
            })
            .collect();
        let hull = pareto_hull(&cloud);
        prop_assert!(!hull.is_empty());
        for w in hull.windows(2) {
            prop_assert!(w[0].d_bound < w[1].d_bound);
            prop_assert!(w[0].rate_mean <= w[1].rate_mean);
        }
        // no hull point is strictly dominated by any cloud point
        for p in &hull {
            for q in &cloud {
                let dominates = q.d_bound < p.d_bound - 1e-12 && q.rate_mean > p.rate_mean + 1e-12;
                prop_assert!(!dominates);
            }
        }
    }
}
