//! Palindromic polynomials and the trace transform `p(x) = x^m · P(x + 1/x)`.
//!
//! The transform expresses `x^k + x^-k` in `y = x + 1/x` through the monic
//! integer recurrence `D_{k+1} = y·D_k - D_{k-1}`; the change of basis is
//! unitriangular, so both directions stay in the integers. Root pairs on the
//! unit circle map to real roots of `P` in `[-2, 2]`; a real pair `λ, 1/λ`
//! with `λ > 1` maps to `λ + 1/λ > 2`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::IntPoly;
use crate::error::{Error, Result};

/// Monic palindromic integer polynomial of even degree `2m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PalindromicPoly(IntPoly);

/// Monic integer polynomial of degree `m` in `y = x + 1/x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TracePoly(IntPoly);

impl PalindromicPoly {
    pub fn new(p: IntPoly) -> Result<Self> {
        let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
        if !p.is_monic() {
            return Err(Error::NotMonic(p.leading().unwrap().to_string()));
        }
        if deg % 2 != 0 || !p.is_palindromic() {
            return Err(Error::InvalidArgument(format!(
                "{p} is not palindromic of even degree"
            )));
        }
        Ok(PalindromicPoly(p))
    }

    pub fn half_degree(&self) -> usize {
        self.0.degree().unwrap_or(0) / 2
    }

    pub fn as_poly(&self) -> &IntPoly {
        &self.0
    }

    pub fn into_poly(self) -> IntPoly {
        self.0
    }

    pub fn trace_transform(&self) -> TracePoly {
        trace_transform(self)
    }
}

impl TracePoly {
    pub fn new(p: IntPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !p.is_monic() {
            return Err(Error::NotMonic(p.leading().unwrap().to_string()));
        }
        Ok(TracePoly(p))
    }

    pub fn degree(&self) -> usize {
        self.0.degree().unwrap_or(0)
    }

    pub fn as_poly(&self) -> &IntPoly {
        &self.0
    }

    pub fn into_poly(self) -> IntPoly {
        self.0
    }

    pub fn trace_inverse(&self) -> PalindromicPoly {
        trace_inverse(self)
    }
}

impl fmt::Display for PalindromicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Printed in the trace variable.
        let s = self.0.to_string();
        f.write_str(&s.replace('x', "y"))
    }
}

/// `D_0 = 1` (the constant slot), `D_1 = y`, `D_2 = y^2 - 2`, ...
/// `D_k` for `k >= 1` is the polynomial with `D_k(x + 1/x) = x^k + x^-k`.
pub(crate) fn dickson_basis(m: usize) -> Vec<Vec<BigInt>> {
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(m + 1);
    basis.push(vec![BigInt::from(1)]);
    if m == 0 {
        return basis;
    }
    basis.push(vec![BigInt::zero(), BigInt::from(1)]);
    for k in 1..m {
        // D_{k+1} = y D_k - D_{k-1}, where D_0 in the recurrence is 2.
        let mut next = vec![BigInt::zero(); k + 2];
        for (j, c) in basis[k].iter().enumerate() {
            next[j + 1] += c;
        }
        if k == 1 {
            next[0] -= BigInt::from(2);
        } else {
            for (j, c) in basis[k - 1].iter().enumerate() {
                next[j] -= c;
            }
        }
        basis.push(next);
    }
    basis
}

pub fn trace_transform(p: &PalindromicPoly) -> TracePoly {
    let m = p.half_degree();
    let c = p.as_poly().coeffs();
    let basis = dickson_basis(m);
    let mut out = vec![BigInt::zero(); m + 1];
    out[0] += &c[m];
    for k in 1..=m {
        let a = &c[m + k];
        if a.is_zero() {
            continue;
        }
        for (j, d) in basis[k].iter().enumerate() {
            out[j] += a * d;
        }
    }
    TracePoly(IntPoly::new(out))
}

pub fn trace_inverse(t: &TracePoly) -> PalindromicPoly {
    let m = t.degree();
    let basis = dickson_basis(m);
    let mut rest: Vec<BigInt> = t.as_poly().coeffs().to_vec();
    rest.resize(m + 1, BigInt::zero());
    let mut p = vec![BigInt::zero(); 2 * m + 1];
    for k in (1..=m).rev() {
        // D_k is monic of degree k, so the y^k coefficient is the x^(m+k) one.
        let a = rest[k].clone();
        if !a.is_zero() {
            for (j, d) in basis[k].iter().enumerate() {
                rest[j] -= &a * d;
            }
        }
        p[m + k] = a.clone();
        p[m - k] = a;
    }
    p[m] = rest[0].clone();
    PalindromicPoly(IntPoly::new(p))
}
