//! Exhaustive enumeration of Salem numbers of degree `2m` up to a height.
//!
//! The search runs over trace polynomials `P(y) = y^m + e_{m-1} y^{m-1} + ...`.
//! With `m - 1` roots in `[-2, 2]` and one in `(2, X]`, `X = Q + 1/Q`, the
//! coefficient of `y^{m-j}` is bounded by
//! `binom(m-1, j) 2^j + binom(m-1, j-1) 2^(j-1) X`.
//! The constant term is never looped over: `P(2) < 0`, `(-1)^m P(-2) > 0` and
//! `P(X) >= 0` are linear in it and cut its range to an interval.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{IntPoly, TracePoly};

use super::classify::{classify, lambda_at_most, Classification, SalemRecord};
use super::shape::{height_to_trace, test_shape, Shape, ShapeTest};

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Knobs shared by every enumeration.
#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Refuse searches whose candidate estimate exceeds this.
    pub budget: u64,
    pub precision_bits: u32,
    /// Number of independent shards; results do not depend on it.
    pub shards: usize,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: DEFAULT_BUDGET,
            precision_bits: super::classify::DEFAULT_PRECISION_BITS,
            shards: rayon::current_num_threads().max(1),
            cancel: None,
        }
    }
}

impl EnumOptions {
    pub(crate) fn check_cancel(&self) -> Result<()> {
        match &self.cancel {
            Some(flag) if flag.load(Ordering::Relaxed) => Err(Error::Cancelled),
            _ => Ok(()),
        }
    }
}

pub(crate) fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Per-coefficient bounds `|p_k| <= binom(2m, k) Q`, `k = 1..=m`, for the
/// free coefficients of a palindromic `p` of degree `2m` with `λ <= Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffBox {
    pub m: usize,
    /// `bounds[k - 1]` bounds `p_k = p_{2m-k}`.
    pub bounds: Vec<BigInt>,
}

impl CoeffBox {
    pub fn bound(&self, k: usize) -> &BigInt {
        &self.bounds[k - 1]
    }

    pub fn volume(&self) -> u128 {
        self.bounds
            .iter()
            .map(|b| (BigInt::from(2) * b + 1u32).to_u128().unwrap_or(u128::MAX))
            .fold(1u128, u128::saturating_mul)
    }
}

/// Every coefficient of `p` is an elementary symmetric function of the roots,
/// all of modulus at most `λ`; hence `|p_k| <= binom(2m, k) λ^{...} <=
/// binom(2m, k) Q` once `λ <= Q` (the conjugates other than `λ` have modulus
/// at most 1).
pub fn coeff_box(m: usize, q: &BigRational) -> CoeffBox {
    let bounds = (1..=m)
        .map(|k| {
            (BigRational::from_integer(binom(2 * m as u64, k as u64)) * q)
                .ceil()
                .to_integer()
        })
        .collect();
    CoeffBox { m, bounds }
}

/// Bounds on the coefficient of `y^{m-j}` of the trace polynomial, `j = 1..=m`,
/// for the large trace root at most `x`.
pub(crate) fn trace_bounds(m: usize, x: &BigRational) -> Vec<BigRational> {
    (1..=m as u64)
        .map(|j| {
            let small = binom(m as u64 - 1, j) * (BigInt::one() << j);
            let large = binom(m as u64 - 1, j - 1) * (BigInt::one() << (j - 1));
            BigRational::from_integer(small) + BigRational::from_integer(large) * x
        })
        .collect()
}

/// Integer bounds for `e_0 .. e_{m-1}` (index = power of `y`).
pub fn trace_box(m: usize, q: &BigRational) -> Vec<BigInt> {
    let (xn, xd) = height_to_trace(q);
    let x = BigRational::new(xn, xd);
    let mut b: Vec<BigInt> = trace_bounds(m, &x)
        .into_iter()
        .map(|r| r.floor().to_integer())
        .collect();
    b.reverse();
    b
}

/// Candidate count of the raw trace box (the constant-term interval cut is
/// not credited).
pub fn estimate_candidates(m: usize, q: &BigRational) -> u128 {
    trace_box(m, q)
        .iter()
        .map(|b| (BigInt::from(2) * b + 1u32).to_u128().unwrap_or(u128::MAX))
        .fold(1u128, u128::saturating_mul)
}

/// All Salem numbers of degree `2m` in `(1, Q]`, sorted by `λ`.
pub fn enumerate_salem(m: usize, q: &BigRational, opts: &EnumOptions) -> Result<Vec<SalemRecord>> {
    let shards = opts.shards.max(1);
    check_budget(m, q, opts)?;
    let parts: Vec<Result<Vec<SalemRecord>>> = (0..shards)
        .into_par_iter()
        .map(|s| enumerate_salem_shard(m, q, s, shards, opts))
        .collect();
    let mut all = Vec::new();
    for part in parts {
        all.extend(part?);
    }
    all.sort_by(SalemRecord::cmp_by_lambda);
    Ok(all)
}

pub(crate) fn check_budget(m: usize, q: &BigRational, opts: &EnumOptions) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let estimated = estimate_candidates(m, q);
    if estimated > opts.budget as u128 {
        return Err(Error::BudgetExceeded {
            estimated,
            budget: opts.budget,
        });
    }
    Ok(())
}

/// Iterates the odometer over `e_1 .. e_{m-1}` restricted to one shard of the
/// outermost coefficient and calls `f` with every complete prefix.
pub(crate) fn for_each_prefix(
    bounds: &[(i64, i64)],
    shard: usize,
    shards: usize,
    opts: &EnumOptions,
    mut f: impl FnMut(&[i64]),
) -> Result<()> {
    let n = bounds.len();
    if n == 0 {
        if shard == 0 {
            f(&[]);
        }
        return Ok(());
    }
    let (outer_lo, outer_hi) = bounds[n - 1];
    for (idx, outer) in (outer_lo..=outer_hi).enumerate() {
        if idx % shards != shard {
            continue;
        }
        opts.check_cancel()?;
        let mut cur: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        cur[n - 1] = outer;
        if n == 1 {
            f(&cur);
            continue;
        }
        'odometer: loop {
            f(&cur);
            let mut k = 0;
            loop {
                if cur[k] < bounds[k].1 {
                    cur[k] += 1;
                    break;
                }
                cur[k] = bounds[k].0;
                k += 1;
                if k == n - 1 {
                    break 'odometer;
                }
            }
        }
    }
    Ok(())
}

/// One shard of [`enumerate_salem`], unsorted.
pub fn enumerate_salem_shard(
    m: usize,
    q: &BigRational,
    shard: usize,
    shards: usize,
    opts: &EnumOptions,
) -> Result<Vec<SalemRecord>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if q <= &BigRational::one() {
        return Ok(Vec::new());
    }
    let (xn, xd) = height_to_trace(q);
    let big = ShapeTest::new(m, xn.clone(), xd.clone());
    let small = big.to_i128();
    let xf = BigRational::new(xn, xd).to_f64().unwrap_or(f64::MAX);
    let box_ = trace_box(m, q);
    let bounds: Vec<(i64, i64)> = box_[1..]
        .iter()
        .map(|b| {
            let b = b.to_i64().expect("trace box fits in i64");
            (-b, b)
        })
        .collect();
    let e0_bound = box_[0].to_i64().expect("trace box fits in i64");

    let mut out = Vec::new();
    let mut coeffs = vec![0i128; m + 1];
    coeffs[m] = 1;
    for_each_prefix(&bounds, shard, shards, opts, |prefix| {
        for (k, &v) in prefix.iter().enumerate() {
            coeffs[k + 1] = v as i128;
        }
        let Some((lo, hi)) = constant_range(&coeffs, m, xf, e0_bound) else {
            return;
        };
        for e0 in lo..=hi {
            coeffs[0] = e0 as i128;
            let shape = test_shape(small.as_ref(), &big, Some(&coeffs), || {
                coeffs.iter().map(|&c| BigInt::from(c)).collect()
            });
            if shape == Shape::Salem {
                let trace = TracePoly::new(IntPoly::new(
                    coeffs.iter().map(|&c| BigInt::from(c)).collect(),
                ))
                .expect("monic");
                out.push(SalemRecord::from_certified_trace(
                    trace,
                    opts.precision_bits,
                ));
            }
        }
    })?;
    Ok(out)
}

/// Range of the constant term allowed by the linear sign conditions, widened
/// by one unit where floating point is involved.
fn constant_range(c: &[i128], m: usize, x: f64, bound: i64) -> Option<(i64, i64)> {
    // rest(y) = P(y) - e_0.
    let rest = |y: i128| -> Option<i128> {
        let mut acc: i128 = 0;
        for k in (1..=m).rev() {
            acc = acc.checked_mul(y)?.checked_add(c[k])?;
        }
        acc.checked_mul(y)
    };
    let mut lo = -bound;
    let mut hi = bound;
    // P(2) < 0.
    if let Some(r2) = rest(2) {
        hi = hi.min(i64::try_from(-r2 - 1).unwrap_or(i64::MAX));
    }
    // (-1)^m P(-2) > 0.
    if let Some(rm2) = rest(-2) {
        if m % 2 == 0 {
            lo = lo.max(i64::try_from(-rm2 + 1).unwrap_or(i64::MIN));
        } else {
            hi = hi.min(i64::try_from(-rm2 - 1).unwrap_or(i64::MAX));
        }
    }
    // P(X) >= 0.
    let mut acc = 0.0f64;
    for k in (1..=m).rev() {
        acc = acc * x + c[k] as f64;
    }
    let rx = acc * x;
    if rx.is_finite() {
        let need = (-rx - 1.0 - 1e-9 * rx.abs()).floor();
        if need > lo as f64 {
            lo = need.min(i64::MAX as f64) as i64;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Direct oracle over the coefficient box of `p` (not the trace box): every
/// palindromic candidate is passed through [`classify`].
pub fn enumerate_salem_in_box(m: usize, q: &BigRational, budget: u64) -> Result<Vec<SalemRecord>> {
    let cbox = coeff_box(m, q);
    let volume = cbox.volume();
    if volume > budget as u128 {
        return Err(Error::BudgetExceeded {
            estimated: volume,
            budget,
        });
    }
    let bounds: Vec<(i64, i64)> = cbox
        .bounds
        .iter()
        .map(|b| {
            let b = b.to_i64().expect("box fits in i64");
            (-b, b)
        })
        .collect();
    let mut out = Vec::new();
    let opts = EnumOptions::default();
    // Treat p_m as an odometer digit too by adding a dummy outer level.
    let mut digits = bounds.clone();
    digits.push((0, 0));
    for_each_prefix(&digits, 0, 1, &opts, |d| {
        let mut c = vec![BigInt::zero(); 2 * m + 1];
        c[0] = BigInt::one();
        c[2 * m] = BigInt::one();
        for k in 1..=m {
            c[k] = BigInt::from(d[k - 1]);
            c[2 * m - k] = BigInt::from(d[k - 1]);
        }
        let p = IntPoly::new(c);
        if let Ok(Classification::Salem(s)) = classify(&p) {
            if lambda_at_most(&s, q) {
                out.push(s);
            }
        }
    })?;
    out.sort_by(SalemRecord::cmp_by_lambda);
    Ok(out)
}

/// Parses a height such as `100`, `2.5` or `7/3` exactly.
pub fn parse_height(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let err = || Error::parse(0, format!("not a positive number: {t:?}"));
    let value = if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        BigRational::new(n, d)
    } else if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| err())?;
        BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(t.parse().map_err(|_| err())?)
    };
    if !value.is_positive() {
        return Err(err());
    }
    Ok(value)
}

/// `Q` as an exact rational from an integer.
pub fn height(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Round-trips `q` through `f64` for reporting.
pub fn height_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
