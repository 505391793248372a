//! Exact Salem test in trace coordinates.
//!
//! A monic palindromic `p` of degree `2m` with trace polynomial `P` is the
//! minimal polynomial of a Salem number exactly when `P` is squarefree, has
//! `m - 1` roots in `(-2, 2)` and one root above `2`, and `p` has no
//! cyclotomic factor. Irreducibility reduces to the last clause: the factor of
//! `p` carrying the root above 1 absorbs its reciprocal, and every other
//! irreducible factor has all roots on the unit circle, hence is cyclotomic by
//! Kronecker's theorem. Such a factor has degree at most `2m - 2`, and for
//! `d >= 3` one has `Φ_d | p` iff the trace of `Φ_d` divides `P`.
//!
//! Everything here is generic over [`SturmInt`] so the census loops can run
//! on `i128` and retry on `BigInt` when a step overflows.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::poly::{roots_in_half_open, sign_at, sturm_chain, IntPoly, Point, SturmInt};

use super::cyclotomic::cyclotomic_traces;

/// Precomputed data for testing trace polynomials of one degree `m` against
/// one height bound `X = Q + 1/Q`.
#[derive(Clone, Debug)]
pub(crate) struct ShapeTest<T> {
    pub m: usize,
    pub x_num: T,
    pub x_den: T,
    pub cyclotomic: Vec<Vec<T>>,
}

impl ShapeTest<BigInt> {
    pub fn new(m: usize, x_num: BigInt, x_den: BigInt) -> Self {
        let cyclotomic = cyclotomic_traces(m.saturating_sub(1))
            .into_iter()
            .map(|(_, p)| p.into_coeffs())
            .collect();
        ShapeTest {
            m,
            x_num,
            x_den,
            cyclotomic,
        }
    }

    /// Narrows to `i128` when every constant fits.
    pub fn to_i128(&self) -> Option<ShapeTest<i128>> {
        let conv = |v: &[BigInt]| {
            v.iter()
                .map(ToPrimitive::to_i128)
                .collect::<Option<Vec<_>>>()
        };
        Some(ShapeTest {
            m: self.m,
            x_num: self.x_num.to_i128()?,
            x_den: self.x_den.to_i128()?,
            cyclotomic: self
                .cyclotomic
                .iter()
                .map(|c| conv(c))
                .collect::<Option<Vec<_>>>()?,
        })
    }
}

/// Outcome of a shape test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    /// Salem minimal polynomial with `λ <= Q`.
    Salem,
    /// Salem-shaped and `λ <= Q`, but divisible by a cyclotomic polynomial.
    CyclotomicFactor,
    Rejected,
}

/// Remainder of `p` modulo monic `d` is zero.
fn divides<T: SturmInt>(d: &[T], p: &[T]) -> Option<bool> {
    let db = d.len() - 1;
    let mut rem: Vec<T> = p.to_vec();
    while rem.len() > db {
        let top = rem.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = rem.len() - db;
        for (j, c) in d[..db].iter().enumerate() {
            rem[shift + j] = rem[shift + j].checked_sub(&top.checked_mul(c)?)?;
        }
    }
    Some(rem.iter().all(Zero::is_zero))
}

impl<T: SturmInt> ShapeTest<T> {
    /// Classifies the monic trace polynomial `p` (coefficients constant term
    /// first, length `m + 1`). `None` means an arithmetic overflow.
    pub fn test(&self, p: &[T]) -> Option<Shape> {
        let m = self.m;
        debug_assert_eq!(p.len(), m + 1);
        let two = T::from(2);
        let one = T::one();
        // P(2) < 0 and (-1)^m P(-2) > 0: an odd number of roots above 2 and an
        // even number below -2; P(X) >= 0 bounds the large root.
        if sign_at(p, &two, &one)? >= 0 {
            return Some(Shape::Rejected);
        }
        let s_neg = sign_at(p, &-two.clone(), &one)?;
        let want_neg = if m % 2 == 0 { 1 } else { -1 };
        if s_neg != want_neg {
            return Some(Shape::Rejected);
        }
        if sign_at(p, &self.x_num, &self.x_den)? < 0 {
            return Some(Shape::Rejected);
        }
        let chain = sturm_chain(p)?;
        if chain.last().map_or(true, |c| c.len() != 1) {
            // Repeated roots.
            return Some(Shape::Rejected);
        }
        let lo = Point::Finite(-two.clone(), one.clone());
        let mid = Point::Finite(two, one);
        let hi = Point::Finite(self.x_num.clone(), self.x_den.clone());
        if roots_in_half_open(&chain, &mid, &hi)? != 1 {
            return Some(Shape::Rejected);
        }
        if roots_in_half_open(&chain, &lo, &mid)? != m - 1 {
            return Some(Shape::Rejected);
        }
        for c in &self.cyclotomic {
            if divides(c, p)? {
                return Some(Shape::CyclotomicFactor);
            }
        }
        Some(Shape::Salem)
    }
}

/// Runs the `i128` test if available, falling back to `BigInt`.
pub(crate) fn test_shape(
    small: Option<&ShapeTest<i128>>,
    big: &ShapeTest<BigInt>,
    p_small: Option<&[i128]>,
    p_big: impl FnOnce() -> Vec<BigInt>,
) -> Shape {
    if let (Some(t), Some(p)) = (small, p_small) {
        if let Some(s) = t.test(p) {
            return s;
        }
    }
    big.test(&p_big())
        .expect("BigInt arithmetic cannot overflow")
}

/// `X = Q + 1/Q` as a reduced fraction.
pub(crate) fn height_to_trace(q: &num_rational::BigRational) -> (BigInt, BigInt) {
    let x = q + q.recip();
    (x.numer().clone(), x.denom().clone())
}

/// Convenience for callers holding an [`IntPoly`] trace polynomial.
pub(crate) fn shape_of(trace: &IntPoly, q: &num_rational::BigRational) -> Shape {
    let m = trace.degree().unwrap_or(0);
    let (xn, xd) = height_to_trace(q);
    let big = ShapeTest::new(m, xn, xd);
    let small = big.to_i128();
    let p_small = trace.to_i128s();
    test_shape(small.as_ref(), &big, p_small.as_deref(), || {
        trace.coeffs().to_vec()
    })
}
