//! Sturm sequences over an integer ring, fraction free.
//!
//! The routines are generic over the coefficient type so the census loops can
//! run them on `i128` with checked arithmetic and fall back to `BigInt` when a
//! step overflows (every function returns `None` on overflow).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, Zero};

use super::IntPoly;
use crate::error::{Error, Result};

pub trait SturmInt:
    Clone + Integer + Signed + CheckedMul + CheckedAdd + CheckedSub + From<i64>
{
}

impl<T> SturmInt for T where
    T: Clone + Integer + Signed + CheckedMul + CheckedAdd + CheckedSub + From<i64>
{
}

/// Evaluation point for sign-variation counting.
#[derive(Clone, Debug)]
pub enum Point<T> {
    NegInf,
    /// `num / den` with `den > 0`.
    Finite(T, T),
    PosInf,
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn sign<T: Signed>(x: &T) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `den^deg · p(num/den)`, i.e. the sign of `p(num/den)` for `den > 0`.
pub fn sign_at<T: SturmInt>(p: &[T], num: &T, den: &T) -> Option<i32> {
    let mut rev = p.iter().rev();
    let Some(lead) = rev.next() else {
        return Some(0);
    };
    let mut acc = lead.clone();
    let mut den_pow = T::one();
    for c in rev {
        den_pow = den_pow.checked_mul(den)?;
        acc = acc
            .checked_mul(num)?
            .checked_add(&c.checked_mul(&den_pow)?)?;
    }
    Some(sign(&acc))
}

pub fn sign_at_point<T: SturmInt>(p: &[T], at: &Point<T>) -> Option<i32> {
    let lead = p.last()?;
    match at {
        Point::PosInf => Some(sign(lead)),
        Point::NegInf => {
            let s = sign(lead);
            Some(if (p.len() - 1) % 2 == 0 { s } else { -s })
        }
        Point::Finite(n, d) => sign_at(p, n, d),
    }
}

fn derivative<T: SturmInt>(p: &[T]) -> Option<Vec<T>> {
    let mut out = Vec::with_capacity(p.len().saturating_sub(1));
    for (k, c) in p.iter().enumerate().skip(1) {
        out.push(c.checked_mul(&T::from(k as i64))?);
    }
    trim(&mut out);
    Some(out)
}

/// `c · a mod b` for some positive constant `c`, so signs are preserved.
fn positive_pseudo_remainder<T: SturmInt>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    let lead_abs = lead.abs();
    let lead_sign = T::from(sign(lead) as i64);
    let mut rem: Vec<T> = a.to_vec();
    trim(&mut rem);
    while rem.len() > db {
        let top = rem.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        for c in rem.iter_mut() {
            *c = c.checked_mul(&lead_abs)?;
        }
        let factor = top.checked_mul(&lead_sign)?;
        let shift = rem.len() - db;
        for (j, c) in b[..db].iter().enumerate() {
            rem[shift + j] = rem[shift + j].checked_sub(&factor.checked_mul(c)?)?;
        }
        trim(&mut rem);
    }
    Some(rem)
}

fn make_primitive<T: SturmInt>(v: &mut [T]) {
    let g = v.iter().fold(T::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c = c.div_floor(&g);
        }
    }
}

/// Sturm chain `p, p', -rem(p, p'), ...` with every member made primitive.
/// Counts are only reliable at points that are not multiple roots of `p`.
pub fn sturm_chain<T: SturmInt>(p: &[T]) -> Option<Vec<Vec<T>>> {
    let mut p0: Vec<T> = p.to_vec();
    trim(&mut p0);
    let mut chain = vec![p0];
    let d = derivative(&chain[0])?;
    if d.is_empty() {
        return Some(chain);
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let mut r = positive_pseudo_remainder(&chain[n - 2], &chain[n - 1])?;
        if r.is_empty() {
            break;
        }
        for c in r.iter_mut() {
            *c = -c.clone();
        }
        make_primitive(&mut r);
        chain.push(r);
    }
    Some(chain)
}

/// Number of sign changes along the chain at `at`, zeros skipped.
pub fn variations<T: SturmInt>(chain: &[Vec<T>], at: &Point<T>) -> Option<usize> {
    let mut count = 0;
    let mut last = 0;
    for q in chain {
        let s = sign_at_point(q, at)?;
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    Some(count)
}

/// Distinct real roots in the half-open interval `(a, b]`; `a` must not be a
/// root of the chain's first member.
pub fn roots_in_half_open<T: SturmInt>(
    chain: &[Vec<T>],
    a: &Point<T>,
    b: &Point<T>,
) -> Option<usize> {
    let va = variations(chain, a)?;
    let vb = variations(chain, b)?;
    Some(va.saturating_sub(vb))
}

fn to_point(x: &BigRational) -> Point<BigInt> {
    Point::Finite(x.numer().clone(), x.denom().clone())
}

impl IntPoly {
    /// Exact number of distinct real roots in the open interval `(lo, hi)`.
    pub fn count_real_roots_in(&self, lo: &BigRational, hi: &BigRational) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if lo >= hi {
            return Err(Error::EmptyInterval);
        }
        for end in [lo, hi] {
            if self.sign_at_rational(end) == 0 {
                return Err(Error::RootAtEndpoint(end.to_string()));
            }
        }
        let chain = sturm_chain(self.squarefree_part().coeffs())
            .expect("BigInt arithmetic cannot overflow");
        Ok(roots_in_half_open(&chain, &to_point(lo), &to_point(hi)).unwrap())
    }

    /// Distinct real roots in `(lo, +inf)`.
    pub fn count_real_roots_above(&self, lo: &BigRational) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.sign_at_rational(lo) == 0 {
            return Err(Error::RootAtEndpoint(lo.to_string()));
        }
        let chain = sturm_chain(self.squarefree_part().coeffs()).unwrap();
        Ok(roots_in_half_open(&chain, &to_point(lo), &Point::PosInf).unwrap())
    }

    /// Distinct real roots in `(lo, hi]`; only `lo` must avoid the roots.
    pub fn count_real_roots_half_open(&self, lo: &BigRational, hi: &BigRational) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if lo >= hi {
            return Err(Error::EmptyInterval);
        }
        if self.sign_at_rational(lo) == 0 {
            return Err(Error::RootAtEndpoint(lo.to_string()));
        }
        let chain = sturm_chain(self.squarefree_part().coeffs()).unwrap();
        Ok(roots_in_half_open(&chain, &to_point(lo), &to_point(hi)).unwrap())
    }

    /// All distinct real roots.
    pub fn count_real_roots(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let chain = sturm_chain(self.squarefree_part().coeffs()).unwrap();
        Ok(roots_in_half_open(&chain, &Point::NegInf, &Point::PosInf).unwrap())
    }
}
