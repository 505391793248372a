//! The `(α, q)`-side census.
//!
//! Witnesses are enumerated through the trace polynomial of `q`,
//! `T(y) = E(y) + √α·O(y)` with `q(x) = x^m T(x + 1/x)`. The coefficient of
//! `y^k` is an integer when `m + k` is even and an integer multiple of `√α`
//! otherwise. `T` has `m - 1` roots in `[-2, 2]` and one in `(2, X_R]`,
//! `X_R = R + 1/R`, which bounds each coefficient as for Salem traces; the
//! `√α` entries shrink by `√α`, so only finitely many `α` contribute.
//!
//! Each candidate is certified on the `p` side:
//! `(-1)^m T(y) T(-y) = E(y)² - α O(y)² = P(y² - 2)` where `P` is the trace
//! polynomial of `p`. The candidate is kept when `P` is a Salem trace with
//! `λ <= Q = R²` and `T(2) = q(1) < 0` (the large root of `q` is positive).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{IntPoly, TracePoly};
use crate::salem::shape::{height_to_trace, test_shape, Shape, ShapeTest};
use crate::salem::{binom, EnumOptions, SalemRecord};

use super::decompose::{is_square_free, sum_with_sqrt_is_negative, SqrtDecomposition};

/// A Salem number with all of its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqGroup {
    pub record: SalemRecord,
    pub witnesses: Vec<SqrtDecomposition>,
}

/// Accepted lattice point before grouping: the trace polynomial of `p` and
/// the witness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RawWitness {
    pub trace: IntPoly,
    pub alpha: u64,
    pub a: IntPoly,
    pub b: IntPoly,
}

/// One `α` and its coefficient bounds (`bounds[k]` for `y^k`, in units of
/// `√α` for the irrational entries).
#[derive(Clone, Debug)]
struct AlphaPlan {
    alpha: u64,
    bounds: Vec<i64>,
}

/// `f64` bound on the coefficient of `y^k` of `T`, inflated slightly; the
/// exact certification downstream makes any over-approximation harmless.
fn t_bounds(m: usize, q: &BigRational) -> (Vec<f64>, f64) {
    let r = q.to_f64().unwrap_or(f64::MAX).sqrt();
    let x = (r + 1.0 / r) * (1.0 + 1e-12) + 1e-12;
    let mut out = vec![0.0; m];
    for j in 1..=m as u64 {
        let small = binom(m as u64 - 1, j).to_f64().unwrap() * 2f64.powi(j as i32);
        let large = binom(m as u64 - 1, j - 1).to_f64().unwrap() * 2f64.powi(j as i32 - 1);
        out[m - j as usize] = small + large * x;
    }
    (out, x)
}

fn is_irrational_slot(m: usize, k: usize) -> bool {
    (m + k) % 2 == 1
}

fn plans(m: usize, q: &BigRational, alpha_filter: Option<u64>) -> Vec<AlphaPlan> {
    let (tb, _) = t_bounds(m, q);
    let max_odd = (0..m)
        .filter(|&k| is_irrational_slot(m, k))
        .map(|k| tb[k])
        .fold(0.0f64, f64::max);
    let alpha_max = (max_odd * max_odd).floor() as u64;
    let alphas: Vec<u64> = match alpha_filter {
        Some(a) => vec![a],
        None => (1..=alpha_max).filter(|&a| is_square_free(a)).collect(),
    };
    alphas
        .into_iter()
        .map(|alpha| {
            let s = (alpha as f64).sqrt();
            let bounds = (0..m)
                .map(|k| {
                    let b = if is_irrational_slot(m, k) {
                        tb[k] / s
                    } else {
                        tb[k]
                    };
                    b.floor() as i64
                })
                .collect();
            AlphaPlan { alpha, bounds }
        })
        .filter(|p| (0..m).any(|k| is_irrational_slot(m, k) && p.bounds[k] > 0))
        .collect()
}

fn plan_volume(p: &AlphaPlan) -> u128 {
    p.bounds
        .iter()
        .map(|&b| (2 * b + 1) as u128)
        .fold(1u128, u128::saturating_mul)
}

/// Candidate count of the raw boxes summed over `α`.
pub fn estimate_sq_candidates(m: usize, q: &BigRational) -> u128 {
    if m == 0 || q <= &BigRational::one() {
        return 0;
    }
    plans(m, q, None)
        .iter()
        .map(plan_volume)
        .fold(0u128, u128::saturating_add)
}

/// Work units `(α index, outer coefficient value)` in a fixed global order;
/// shard `s` of `n` takes every unit whose index is `s` mod `n`.
fn units(plans: &[AlphaPlan]) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for (i, p) in plans.iter().enumerate() {
        let m = p.bounds.len();
        if m == 1 {
            out.push((i, 0));
        } else {
            let b = p.bounds[m - 1];
            out.extend((-b..=b).map(|v| (i, v)));
        }
    }
    out
}

/// Exact acceptance state for one `(m, Q)`.
struct Certifier {
    m: usize,
    small: Option<ShapeTest<i128>>,
    big: ShapeTest<BigInt>,
    x_r: f64,
}

impl Certifier {
    fn new(m: usize, q: &BigRational) -> Self {
        let (xn, xd) = height_to_trace(q);
        let big = ShapeTest::new(m, xn, xd);
        let small = big.to_i128();
        let (_, x_r) = t_bounds(m, q);
        Certifier { m, small, big, x_r }
    }
}

/// Enumerates one shard. Results are unsorted.
fn run_shard(
    m: usize,
    plans: &[AlphaPlan],
    cert: &Certifier,
    shard: usize,
    shards: usize,
    opts: &EnumOptions,
) -> Result<Vec<RawWitness>> {
    let mut out = Vec::new();
    for (idx, (pi, outer)) in units(plans).into_iter().enumerate() {
        if idx % shards != shard {
            continue;
        }
        opts.check_cancel()?;
        let plan = &plans[pi];
        let sqrt_alpha = (plan.alpha as f64).sqrt();
        let mut v = vec![0i64; m + 1];
        v[m] = 1;
        if m == 1 {
            inner(plan, sqrt_alpha, &mut v, cert, &mut out);
            continue;
        }
        v[m - 1] = outer;
        // Odometer over v[1 .. m-1); v[m-1] fixed by the unit.
        let inner_dims = m - 2;
        for k in 1..=inner_dims {
            v[k] = -plan.bounds[k];
        }
        'odo: loop {
            inner(plan, sqrt_alpha, &mut v, cert, &mut out);
            let mut k = 1;
            loop {
                if k > inner_dims {
                    break 'odo;
                }
                if v[k] < plan.bounds[k] {
                    v[k] += 1;
                    break;
                }
                v[k] = -plan.bounds[k];
                k += 1;
            }
        }
    }
    Ok(out)
}

/// Loops the constant term over the interval allowed by the linear sign
/// conditions on `T` and certifies each survivor.
fn inner(plan: &AlphaPlan, s: f64, v: &mut [i64], cert: &Certifier, out: &mut Vec<RawWitness>) {
    let m = cert.m;
    let scale = |k: usize| if is_irrational_slot(m, k) { s } else { 1.0 };
    let rest = |y: f64| -> f64 {
        let mut acc = 0.0;
        for k in (1..=m).rev() {
            acc = acc * y + v[k] as f64 * scale(k);
        }
        acc * y
    };
    let s0 = scale(0);
    let b0 = plan.bounds[0] as f64;
    let mut lo = -b0;
    let mut hi = b0;
    let slack = |x: f64| 1.0 + 1e-9 * x.abs();
    // T(2) < 0.
    let r2 = rest(2.0);
    hi = hi.min((-r2 + slack(r2)) / s0);
    // (-1)^m T(-2) > 0.
    let rm2 = rest(-2.0);
    if m % 2 == 0 {
        lo = lo.max((-rm2 - slack(rm2)) / s0);
    } else {
        hi = hi.min((-rm2 + slack(rm2)) / s0);
    }
    // T(X_R) >= 0.
    let rx = rest(cert.x_r);
    lo = lo.max((-rx - slack(rx)) / s0);
    let (lo, hi) = (lo.ceil() as i64, hi.floor() as i64);
    for v0 in lo..=hi {
        v[0] = v0;
        if let Some(w) = certify(plan.alpha, v, cert) {
            out.push(w);
        }
    }
}

/// Exact checks for one lattice point.
fn certify(alpha: u64, v: &[i64], cert: &Certifier) -> Option<RawWitness> {
    let m = cert.m;
    // B must be nonzero.
    if !(0..m).any(|k| is_irrational_slot(m, k) && v[k] != 0) {
        return None;
    }
    let mut e = vec![0i128; m + 1];
    let mut o = vec![0i128; m + 1];
    for k in 0..=m {
        if is_irrational_slot(m, k) {
            o[k] = v[k] as i128;
        } else {
            e[k] = v[k] as i128;
        }
    }
    // q(1) = T(2) < 0.
    let at2 = |c: &[i128]| c.iter().rev().fold(0i128, |acc, &x| acc * 2 + x);
    if !sum_with_sqrt_is_negative(&BigInt::from(at2(&e)), &BigInt::from(at2(&o)), alpha) {
        return None;
    }
    let p_small = trace_of_norm_i128(&e, &o, alpha as i128);
    let shape = test_shape(cert.small.as_ref(), &cert.big, p_small.as_deref(), || {
        trace_of_norm_big(&e, &o, alpha)
    });
    if shape != Shape::Salem {
        return None;
    }
    let trace = IntPoly::new(trace_of_norm_big(&e, &o, alpha));
    let (a, b) = witness_parts(&e, &o, m);
    Some(RawWitness { trace, alpha, a, b })
}

/// `P` with `P(y² - 2) = E(y)² - α O(y)²`, in `i128` when it fits.
fn trace_of_norm_i128(e: &[i128], o: &[i128], alpha: i128) -> Option<Vec<i128>> {
    let n = e.len();
    let mut norm = vec![0i128; 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            let ee = e[i].checked_mul(e[j])?;
            let oo = o[i].checked_mul(o[j])?.checked_mul(alpha)?;
            norm[i + j] = norm[i + j].checked_add(ee)?.checked_sub(oo)?;
        }
    }
    // Even coefficients give Ñ(w) with w = y²; then shift w = z + 2.
    let mut c: Vec<i128> = norm.iter().step_by(2).copied().collect();
    let d = c.len();
    for i in 0..d {
        for j in (i..d - 1).rev() {
            c[j] = c[j].checked_add(c[j + 1].checked_mul(2)?)?;
        }
    }
    Some(c)
}

fn trace_of_norm_big(e: &[i128], o: &[i128], alpha: u64) -> Vec<BigInt> {
    let n = e.len();
    let al = BigInt::from(alpha);
    let mut norm = vec![BigInt::zero(); 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            norm[i + j] += BigInt::from(e[i]) * BigInt::from(e[j]);
            norm[i + j] -= &al * BigInt::from(o[i]) * BigInt::from(o[j]);
        }
    }
    let mut c: Vec<BigInt> = norm.into_iter().step_by(2).collect();
    let d = c.len();
    for i in 0..d {
        for j in (i..d - 1).rev() {
            let t = &c[j + 1] * 2;
            c[j] += t;
        }
    }
    c
}

/// `x^m · sum t_k (x + 1/x)^k` as a coefficient vector of length `2m + 1`.
fn palindromic_expand(t: &[i128], m: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); 2 * m + 1];
    for (k, &c) in t.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let c = BigInt::from(c);
        for i in 0..=k {
            out[m + k - 2 * i] += &c * binom(k as u64, i as u64);
        }
    }
    out
}

fn witness_parts(e: &[i128], o: &[i128], m: usize) -> (IntPoly, IntPoly) {
    let qe = palindromic_expand(e, m);
    let qo = palindromic_expand(o, m);
    let a = IntPoly::new((0..=m).map(|j| qe[2 * j].clone()).collect());
    let b = IntPoly::new((0..m).map(|j| qo[2 * j + 1].clone()).collect());
    (a, b)
}

fn check_sq_budget(m: usize, q: &BigRational, opts: &EnumOptions) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let estimated = estimate_sq_candidates(m, q);
    if estimated > opts.budget as u128 {
        return Err(Error::BudgetExceeded {
            estimated,
            budget: opts.budget,
        });
    }
    Ok(())
}

/// One shard of the census over every square-free `α`: raw accepted points.
pub fn sq_census_shard(
    m: usize,
    q: &BigRational,
    shard: usize,
    shards: usize,
    opts: &EnumOptions,
) -> Result<Vec<RawWitness>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if q <= &BigRational::one() {
        return Ok(Vec::new());
    }
    let plans = plans(m, q, None);
    let cert = Certifier::new(m, q);
    run_shard(m, &plans, &cert, shard, shards.max(1), opts)
}

/// Groups raw points by Salem number, sorted by `λ`; witnesses within a group
/// sorted by `(α, A, B)`.
pub fn group_witnesses(raw: Vec<RawWitness>, precision_bits: u32) -> Vec<SqGroup> {
    let mut by_trace: BTreeMap<IntPoly, Vec<RawWitness>> = BTreeMap::new();
    for w in raw {
        by_trace.entry(w.trace.clone()).or_default().push(w);
    }
    let mut groups: Vec<SqGroup> = by_trace
        .into_iter()
        .map(|(trace, mut ws)| {
            ws.sort();
            ws.dedup();
            let record = SalemRecord::from_certified_trace(
                TracePoly::new(trace).expect("monic"),
                precision_bits,
            );
            let witnesses = ws
                .into_iter()
                .map(|w| SqrtDecomposition {
                    alpha: w.alpha,
                    a: w.a,
                    b: w.b,
                    source: record.min_poly.clone(),
                })
                .collect();
            SqGroup { record, witnesses }
        })
        .collect();
    groups.sort_by(|x, y| x.record.cmp_by_lambda(&y.record));
    groups
}

/// Every square-rootable Salem number of degree `2m` in `(1, Q]` with all of
/// its witnesses.
pub fn enumerate_sq_census(m: usize, q: &BigRational, opts: &EnumOptions) -> Result<Vec<SqGroup>> {
    check_sq_budget(m, q, opts)?;
    let shards = opts.shards.max(1);
    let parts: Vec<Result<Vec<RawWitness>>> = (0..shards)
        .into_par_iter()
        .map(|s| sq_census_shard(m, q, s, shards, opts))
        .collect();
    let mut raw = Vec::new();
    for p in parts {
        raw.extend(p?);
    }
    Ok(group_witnesses(raw, opts.precision_bits))
}

/// All witnesses with the given `α` whose `q` has its large root in `(1, R]`.
#[allow(non_snake_case)]
pub fn enumerate_P_m_alpha(
    m: usize,
    alpha: u64,
    r: &BigRational,
    opts: &EnumOptions,
) -> Result<Vec<SqrtDecomposition>> {
    if !is_square_free(alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} is not square-free"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if r <= &BigRational::one() {
        return Ok(Vec::new());
    }
    let q = r * r;
    let plans = plans(m, &q, Some(alpha));
    let estimated = plans.iter().map(plan_volume).sum::<u128>();
    if estimated > opts.budget as u128 {
        return Err(Error::BudgetExceeded {
            estimated,
            budget: opts.budget,
        });
    }
    let cert = Certifier::new(m, &q);
    let raw = run_shard(m, &plans, &cert, 0, 1, opts)?;
    let mut out: Vec<SqrtDecomposition> = group_witnesses(raw, opts.precision_bits)
        .into_iter()
        .flat_map(|g| g.witnesses)
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::salem::height;
    use crate::sqrt::verify_decomposition;

    fn opts() -> EnumOptions {
        EnumOptions {
            shards: 2,
            ..EnumOptions::default()
        }
    }

    #[test]
    fn norm_trace_matches_direct_expansion() {
        // m = 1, T = y - √5: N = y² - 5, P(z) = z - 3.
        let p = trace_of_norm_i128(&[0, 1], &[-1, 0], 5).unwrap();
        assert_eq!(p, vec![-3, 1]);
    }

    #[test]
    fn degree_two_groups() {
        let g = enumerate_sq_census(1, &height(10), &opts()).unwrap();
        assert_eq!(g.len(), 8);
        for grp in &g {
            assert_eq!(grp.witnesses.len(), 1);
            assert_eq!(verify_decomposition(&grp.witnesses[0]), Ok(()));
        }
        assert_eq!(g[0].witnesses[0].alpha, 5);
    }

    #[test]
    fn p_m_alpha_examples() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let w = enumerate_P_m_alpha(1, 5, &r(2, 1), &opts()).unwrap();
        assert!(w
            .iter()
            .any(|d| d.b == IntPoly::from_i64s(&[-1]) && d.a == IntPoly::from_i64s(&[1, 1])));
        assert!(enumerate_P_m_alpha(1, 3, &r(11, 10), &opts())
            .unwrap()
            .is_empty());
        assert!(enumerate_P_m_alpha(2, 4, &r(3, 1), &opts()).is_err());
        // Beyond (c0 R)^2 nothing survives.
        assert!(enumerate_P_m_alpha(2, 1447, &r(6, 1), &opts())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn quartic_groups_verify() {
        let g = enumerate_sq_census(2, &height(30), &opts()).unwrap();
        assert!(!g.is_empty());
        for grp in &g {
            assert!(grp.witnesses.len() <= 16);
            for w in &grp.witnesses {
                assert_eq!(verify_decomposition(w), Ok(()));
            }
        }
    }
}
