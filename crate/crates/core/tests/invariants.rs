use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use salem_census::census::{Coordinator, OutputFormat, RunConfig};
use salem_census::poly::{certified_real, complex_roots};
use salem_census::salem::{enumerate_salem, height, EnumOptions};
use salem_census::theory::{
    lattice_det, mean_mult_bound, predict_P_m_alpha, predict_sq_count, squarefree_up_to,
};
use salem_census::{IntPoly, PalindromicPoly, TracePoly};

fn poly(max_deg: usize, range: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-range..=range, 1..=max_deg + 1).prop_map(|c| IntPoly::from_i64s(&c))
}

fn monic_trace(max_m: usize, range: i64) -> impl Strategy<Value = TracePoly> {
    prop::collection::vec(-range..=range, 1..=max_m).prop_map(|mut c| {
        c.push(1);
        TracePoly::new(IntPoly::from_i64s(&c)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trace_round_trip(t in monic_trace(8, 50)) {
        let p = t.trace_inverse();
        prop_assert_eq!(p.half_degree(), t.degree());
        prop_assert_eq!(p.trace_transform(), t.clone());
        // x^m P(x + 1/x) at x = 2: 2^m P(5/2) = p(2).
        let m = t.degree() as i32;
        let lhs = t.as_poly().eval_rational(&BigRational::new(5.into(), 2.into()))
            * BigRational::from_integer(BigInt::from(2).pow(m as u32));
        prop_assert_eq!(lhs, BigRational::from_integer(p.as_poly().eval(&BigInt::from(2))));
    }

    #[test]
    fn palindromic_round_trip(t in monic_trace(6, 20)) {
        let p = t.trace_inverse();
        let back = PalindromicPoly::new(p.as_poly().clone()).unwrap();
        prop_assert_eq!(back.trace_transform(), t);
    }

    #[test]
    fn multiply_then_divide(a in poly(6, 30), b in poly(5, 30)) {
        prop_assume!(!b.is_zero());
        let prod = &a * &b;
        prop_assert_eq!(prod.exact_divide(&b).unwrap(), Some(a.clone()));
        for x in -3i64..=3 {
            let x = BigInt::from(x);
            prop_assert_eq!(prod.eval(&x), a.eval(&x) * b.eval(&x));
        }
    }

    #[test]
    fn compose_square_evaluates(a in poly(6, 30), x in -20i64..=20) {
        let x = BigInt::from(x);
        prop_assert_eq!(a.compose_square().eval(&x), a.eval(&(&x * &x)));
    }

    #[test]
    fn sturm_agrees_with_enclosures(a in poly(7, 12)) {
        prop_assume!(a.degree().unwrap_or(0) >= 1);
        let sf = a.squarefree_part();
        let roots = complex_roots(&sf, 128).unwrap();
        prop_assert_eq!(roots.len(), sf.degree().unwrap());
        let real = certified_real(&roots).into_iter().filter(|&r| r).count();
        prop_assert_eq!(real, a.count_real_roots().unwrap());
    }

    #[test]
    fn root_product_is_constant_over_leading(a in poly(6, 9)) {
        let n = a.degree().unwrap_or(0);
        prop_assume!(n >= 1 && a.is_squarefree());
        let roots = complex_roots(&a, 128).unwrap();
        let prod = roots
            .iter()
            .fold(num_complex::Complex64::new(1.0, 0.0), |acc, r| acc * r.approx());
        let c0: f64 = a.coeff(0).to_string().parse().unwrap();
        let lc: f64 = a.leading().unwrap().to_string().parse().unwrap();
        let want = if n % 2 == 0 { c0 / lc } else { -c0 / lc };
        prop_assert!((prod.re - want).abs() <= 1e-8 * want.abs().max(1.0));
        prop_assert!(prod.im.abs() <= 1e-8 * want.abs().max(1.0));
    }

    #[test]
    fn sandwich_ratio_is_exact(m in 1u32..=12, q in 2.0f64..1e6) {
        let p = predict_sq_count(m, q).unwrap();
        let ratio = p.lower / p.upper;
        if m >= 4 && m % 2 == 0 {
            prop_assert_eq!(ratio, (-2.0 * m as f64).exp2());
        } else {
            prop_assert_eq!(ratio, 1.0);
        }
    }

    #[test]
    fn bound_report_is_linear_in_gamma(n in 4u32..=12, l in 0.5f64..40.0) {
        let r = mean_mult_bound(n, l).unwrap();
        let s = r.scale_gamma(2.0);
        prop_assert_eq!(s.mean_mult_lower, 2.0 * r.mean_mult_lower);
        prop_assert_eq!(s.normalized, 2.0 * r.normalized);
        prop_assert_eq!(s.distinct_lengths_bound, r.distinct_lengths_bound);
        let direct = r.gamma_h / r.distinct_lengths_bound;
        prop_assert!((r.mean_mult_lower - direct).abs() <= 1e-9 * direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn census_is_monotone_in_height(m in 1usize..=2, q1 in 2u64..=20, dq in 0u64..=10) {
        let opts = EnumOptions { shards: 2, ..EnumOptions::default() };
        let a = enumerate_salem(m, &height(q1), &opts).unwrap();
        let b = enumerate_salem(m, &height(q1 + dq), &opts).unwrap();
        prop_assert!(a.len() <= b.len());
        // Sorted by λ, so the smaller census is a prefix.
        prop_assert_eq!(&b[..a.len()], &a[..]);
    }

    #[test]
    fn shard_count_does_not_change_output(m in 1usize..=3, q in 3u64..=12, seed in any::<u64>()) {
        let run = |shards: usize| {
            let c = Coordinator::new(RunConfig {
                shards,
                seed,
                format: OutputFormat::Csv,
                ..RunConfig::default()
            })
            .unwrap();
            let o = c.count(m, &height(q), true).unwrap();
            let mut row = o.row.clone();
            row.wall_seconds = 0.0;
            row.shard_count = 0;
            (row.to_csv(), o.record_stream())
        };
        let one = run(1);
        prop_assert_eq!(&run(2), &one);
        prop_assert_eq!(&run(8), &one);
    }
}

/// The per-`α` main terms summed over square-free `α` approach the
/// census main term for `m >= 5`, where the sum over `α` converges.
#[test]
fn summed_lattice_terms_match_sq_main_term() {
    let r = 1e6_f64;
    for m in [5u32, 6, 7, 8] {
        let base = predict_P_m_alpha(m, 1, r).unwrap();
        let sum: f64 = squarefree_up_to(1_000_000)
            .into_iter()
            .map(|a| base / lattice_det(m, a))
            .sum();
        let spot = predict_P_m_alpha(m, 30, r).unwrap();
        assert!((spot - base / lattice_det(m, 30)).abs() <= 1e-12 * spot);
        // R = √Q, so R^m = Q^{m/2}.
        let main = predict_sq_count(m, r * r).unwrap().upper;
        let ratio = sum / main;
        assert!((0.9..=1.1).contains(&ratio), "m = {m}: ratio {ratio}");
    }
}
