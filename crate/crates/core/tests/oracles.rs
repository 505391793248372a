//! Independent oracles for the census pipelines.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use salem_census::poly::complex_roots;
use salem_census::salem::{enumerate_salem, enumerate_salem_in_box, height, EnumOptions};
use salem_census::sqrt::{enumerate_sq_census, is_square_rootable, verify_decomposition, SqrtDecomposition};
use salem_census::theory::w;
use salem_census::{classify, Classification, IntPoly};

fn opts() -> EnumOptions {
    EnumOptions {
        shards: 3,
        ..EnumOptions::default()
    }
}

/// Quartic Salem polynomials `x^4 + a x^3 + b x^2 + a x + 1` with `λ <= Q`,
/// decided from the quadratic trace `y^2 + a y + (b - 2)` alone: one root
/// in `(2, Q + 1/Q]`, one in `(-2, 2)`, and an irrational pair (a rational
/// pair would make the small factor cyclotomic).
fn quartic_oracle(q: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    let lim = 6 * q;
    for a in -4 * q..=4 * q {
        for b in -lim..=lim {
            let c = b - 2;
            let p = |y_num: i64, y_den: i64| a * y_num * y_den + c * y_den * y_den + y_num * y_num;
            if p(2, 1) >= 0 || p(-2, 1) <= 0 {
                continue;
            }
            // X = (Q^2 + 1)/Q
            if p(q * q + 1, q) < 0 {
                continue;
            }
            let disc = a * a - 4 * c;
            let r = disc.sqrt();
            if r * r == disc {
                continue;
            }
            out.insert((a, b));
        }
    }
    out
}

fn quartic_keys(records: &[salem_census::SalemRecord]) -> BTreeSet<(i64, i64)> {
    records
        .iter()
        .map(|r| {
            let c = r.min_poly.as_poly().to_i64s().unwrap();
            (c[1], c[2])
        })
        .collect()
}

#[test]
fn quartic_census_matches_oracle_and_frozen_counts() {
    for (q, frozen) in [(10, 162), (15, 392), (20, 722), (30, 1682)] {
        let got = enumerate_salem(2, &height(q as u64), &opts()).unwrap();
        let want = quartic_oracle(q);
        assert_eq!(want.len(), frozen, "oracle at Q = {q}");
        assert_eq!(quartic_keys(&got), want, "Q = {q}");
    }
}

#[test]
fn quadratic_census_is_floor_of_x_minus_two() {
    for q in [2u64, 3, 10, 57, 100] {
        let got = enumerate_salem(1, &height(q), &opts()).unwrap();
        // Traces t with 3 <= t <= Q + 1/Q, and floor(Q + 1/Q) = Q here.
        assert_eq!(got.len() as u64, q - 2, "Q = {q}");
    }
}

#[test]
fn trace_box_agrees_with_coefficient_box() {
    for m in 1..=2 {
        for q in [2u64, 5, 9, 15] {
            let fast = enumerate_salem(m, &height(q), &opts()).unwrap();
            let slow = enumerate_salem_in_box(m, &height(q), u64::MAX).unwrap();
            assert_eq!(fast, slow, "m = {m}, Q = {q}");
        }
    }
}

#[test]
fn fractional_heights() {
    let q = BigRational::new(BigInt::from(7), BigInt::from(2));
    let a = enumerate_salem(2, &q, &opts()).unwrap();
    let b = enumerate_salem_in_box(2, &q, u64::MAX).unwrap();
    assert_eq!(a, b);
}

/// Quartic witnesses from the raw `q` coefficient box: `q = x^4 + √α b x^3
/// + a x^2 + √α b x + 1` with `|√α b| <= 4R`, `|a| <= 6R`, `R = √Q`, checked
/// through the general classifier.
fn quartic_witness_oracle(q: u64) -> BTreeSet<(u64, i64, i64)> {
    let r = (q as f64).sqrt();
    let mut out = BTreeSet::new();
    let alpha_max = (16.0 * q as f64).floor() as u64;
    for alpha in 1..=alpha_max {
        if !square_free(alpha) {
            continue;
        }
        let bmax = (4.0 * r / (alpha as f64).sqrt()).floor() as i64;
        let amax = (6.0 * r).floor() as i64;
        for b in -bmax..=bmax {
            if b == 0 {
                continue;
            }
            for a in -amax..=amax {
                let d = match SqrtDecomposition::from_parts(
                    alpha,
                    IntPoly::from_i64s(&[1, a, 1]),
                    IntPoly::from_i64s(&[b, b]),
                ) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                let Ok(Classification::Salem(rec)) = classify(d.source.as_poly()) else {
                    continue;
                };
                if !salem_census::salem::lambda_at_most(&rec, &height(q)) {
                    continue;
                }
                if verify_decomposition(&d).is_ok() {
                    out.insert((alpha, a, b));
                }
            }
        }
    }
    out
}

fn square_free(n: u64) -> bool {
    (2..).take_while(|k| k * k <= n).all(|k| n % (k * k) != 0)
}

#[test]
fn quartic_witnesses_match_raw_box() {
    let q = 12;
    let groups = enumerate_sq_census(2, &height(q), &opts()).unwrap();
    let got: BTreeSet<(u64, i64, i64)> = groups
        .iter()
        .flat_map(|g| &g.witnesses)
        .map(|d| (d.alpha, d.a.to_i64s().unwrap()[1], d.b.to_i64s().unwrap()[0]))
        .collect();
    assert!(!got.is_empty());
    assert_eq!(got, quartic_witness_oracle(q));
}

#[test]
fn cross_pipeline_small() {
    for (m, q) in [(1, 10u64), (1, 30), (2, 10), (2, 20), (2, 30)] {
        let filtered: Vec<_> = enumerate_salem(m, &height(q), &opts())
            .unwrap()
            .into_iter()
            .filter(|r| is_square_rootable(r).unwrap())
            .map(|r| r.min_poly)
            .collect();
        let direct: Vec<_> = enumerate_sq_census(m, &height(q), &opts())
            .unwrap()
            .into_iter()
            .map(|g| g.record.min_poly)
            .collect();
        assert_eq!(filtered, direct, "m = {m}, Q = {q}");
    }
}

/// `w_m` straight from the product formula.
fn w_direct(m: u32) -> BigRational {
    let fact = |n: u32| -> BigInt { (1..=n).map(BigInt::from).product() };
    let mut v = BigRational::new(BigInt::from(2).pow(m * (m + 1)), BigInt::from(m + 1));
    for k in 0..m {
        v *= BigRational::new(fact(k) * fact(k), fact(2 * k + 1));
    }
    v
}

#[test]
fn w_matches_product_formula() {
    for m in 0..=10 {
        assert_eq!(w(m), w_direct(m), "m = {m}");
    }
}

#[test]
fn root_enclosures_of_known_polynomials() {
    // x^4 + 1: primitive 8th roots of unity.
    let roots = complex_roots(&IntPoly::from_i64s(&[1, 0, 0, 0, 1]), 128).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for r in roots {
        let z = r.approx();
        assert!((z.re.abs() - h).abs() < 1e-15 && (z.im.abs() - h).abs() < 1e-15);
    }
}
