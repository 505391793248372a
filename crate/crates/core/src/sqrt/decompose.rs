//! Square-rootability witnesses.
//!
//! A witness for the Salem polynomial `p` of degree `2m` is a square-free
//! `α >= 1` and a monic palindromic `q(x) = A(x²) + √α·x·B(x²)` with
//! `q(x)q(-x) = p(x²)`, equivalently `A(y)² - α·y·B(y)² = p(y)`. The large
//! root of `q` must be the positive square root of the Salem number.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{complex_roots, HpReal, IntPoly, PalindromicPoly, RootEnclosure};
use crate::salem::{
    classify, cyclotomic_factor, orders_with_phi_at_most, Classification, SalemRecord,
};

/// Largest working precision tried before giving up on a sign search.
const MAX_SEARCH_BITS: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SqrtDecomposition {
    pub alpha: u64,
    /// Even part of `q`: `A(x²)`, monic of degree `m`.
    pub a: IntPoly,
    /// Odd part of `q` divided by `√α·x`: `B(x²)`, degree at most `m - 1`.
    pub b: IntPoly,
    pub source: PalindromicPoly,
}

/// First failed clause of [`verify_decomposition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionFault {
    AlphaNotSquareFree,
    Degree,
    NotPalindromic,
    ZeroOddPart,
    Identity,
    SourceNotSalem,
    /// `q` has its large root at `-√λ` instead of `+√λ`.
    SignNormalization,
    RootOfUnity {
        order: u64,
    },
}

impl fmt::Display for DecompositionFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionFault::AlphaNotSquareFree => f.write_str("alpha is not square-free"),
            DecompositionFault::Degree => {
                f.write_str("A must be monic of degree m and B of degree below m")
            }
            DecompositionFault::NotPalindromic => f.write_str("q is not palindromic"),
            DecompositionFault::ZeroOddPart => f.write_str("B is zero"),
            DecompositionFault::Identity => {
                f.write_str("A(y)^2 - alpha*y*B(y)^2 differs from p(y)")
            }
            DecompositionFault::SourceNotSalem => f.write_str("source is not a Salem polynomial"),
            DecompositionFault::SignNormalization => f.write_str("large root of q is negative"),
            DecompositionFault::RootOfUnity { order } => {
                write!(f, "q may vanish at a root of unity of order {order}")
            }
        }
    }
}

/// A point of the mixed lattice `√α ℤ ⊕ ℤ ⊕ √α ℤ ⊕ ...`: the coefficients
/// `q_1 .. q_m` of `x^1 .. x^m`, odd entries stored as multiples of `√α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PmLatticePoint {
    pub alpha: u64,
    pub coords: Vec<BigInt>,
}

impl PmLatticePoint {
    pub fn to_f64(&self) -> Vec<f64> {
        let s = (self.alpha as f64).sqrt();
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let v = c.to_f64().unwrap_or(f64::NAN);
                if (i + 1) % 2 == 1 {
                    v * s
                } else {
                    v
                }
            })
            .collect()
    }
}

impl SqrtDecomposition {
    pub fn m(&self) -> usize {
        self.source.half_degree()
    }

    /// Coefficients of `q`, constant first; odd positions hold multiples of
    /// `√α`.
    pub fn mixed_coeffs(&self) -> Vec<BigInt> {
        let m = self.m();
        let mut out = vec![BigInt::zero(); 2 * m + 1];
        for (j, c) in self.a.coeffs().iter().enumerate() {
            out[2 * j] = c.clone();
        }
        for (j, c) in self.b.coeffs().iter().enumerate() {
            out[2 * j + 1] = c.clone();
        }
        out
    }

    pub fn lattice_point(&self) -> PmLatticePoint {
        let c = self.mixed_coeffs();
        PmLatticePoint {
            alpha: self.alpha,
            coords: c[1..=self.m()].to_vec(),
        }
    }

    /// `q` with `√α` evaluated at `bits` of precision, constant first.
    pub fn q_coeffs_hp(&self, bits: u32) -> Vec<HpReal> {
        let s = HpReal::from_i64(self.alpha as i64, bits).sqrt();
        self.mixed_coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let v = HpReal::from_int(c, bits);
                if k % 2 == 1 {
                    &v * &s
                } else {
                    v
                }
            })
            .collect()
    }

    /// `alpha; A coefficients; B coefficients; lambda_sq approx`.
    pub fn witness_line(&self) -> String {
        let join = |p: &IntPoly| {
            p.coeffs()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "{}; {}; {}; {:.15}",
            self.alpha,
            join(&self.a),
            join(&self.b),
            phi(self)
        )
    }
}

impl SqrtDecomposition {
    /// Builds the witness and its source `A(y)² - α·y·B(y)²`; nothing beyond
    /// palindromy of the source is checked.
    pub fn from_parts(alpha: u64, a: IntPoly, b: IntPoly) -> Result<Self> {
        let y_b2 = &IntPoly::monomial(1) * &(&b * &b);
        let p = &(&a * &a) - &y_b2.scale(&BigInt::from(alpha));
        let source = PalindromicPoly::new(p)?;
        Ok(SqrtDecomposition {
            alpha,
            a,
            b,
            source,
        })
    }
}

/// Parses the first three fields of a witness line (`alpha; A; B[; phi]`).
pub fn parse_witness_line(line: &str) -> Result<SqrtDecomposition> {
    let fields: Vec<&str> = line.split(';').map(str::trim).collect();
    if fields.len() < 3 {
        return Err(Error::parse(0, "witness needs alpha, A and B"));
    }
    let alpha: u64 = fields[0]
        .parse()
        .map_err(|_| Error::parse(0, format!("bad alpha {:?}", fields[0])))?;
    let a = IntPoly::parse(fields[1])?;
    let b = IntPoly::parse(fields[2])?;
    SqrtDecomposition::from_parts(alpha, a, b)
}

impl fmt::Display for SqrtDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.witness_line())
    }
}

/// `n = s·k²` with `s` square-free.
pub fn square_free_part(n: u64) -> (u64, u64) {
    assert!(n >= 1, "square-free part of zero");
    let (s, k) = square_free_part_big(&BigInt::from(n));
    (s.to_u64().unwrap(), k.to_u64().unwrap())
}

pub(crate) fn square_free_part_big(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut k = BigInt::one();
    // Trial division up to the cube root leaves at most two prime factors.
    let mut p = BigInt::from(2);
    while &p * &p * &p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            s *= &p;
        }
        for _ in 0..e / 2 {
            k *= &p;
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        k *= r;
    } else {
        s *= rest;
    }
    (s, k)
}

pub(crate) fn is_square_free(n: u64) -> bool {
    n >= 1 && square_free_part(n).1 == 1
}

/// Checks every invariant of a witness; the error names the first clause
/// that fails.
pub fn verify_decomposition(d: &SqrtDecomposition) -> std::result::Result<(), DecompositionFault> {
    verify_algebra(d)?;
    let p = d.source.as_poly();
    match classify(p) {
        Ok(Classification::Salem(_)) => {}
        _ => return Err(DecompositionFault::SourceNotSalem),
    }
    if !large_root_positive(d) {
        return Err(DecompositionFault::SignNormalization);
    }
    // A root of unity ξ of q makes ξ² a root of p, so trial division of
    // p(x²) by cyclotomic polynomials of order up to 4m covers the clause.
    let m = d.m() as u64;
    if let Some((order, _)) = cyclotomic_factor(&p.compose_square(), 4 * m) {
        return Err(DecompositionFault::RootOfUnity { order });
    }
    Ok(())
}

/// The exact algebraic clauses only (no Salem certificate).
pub(crate) fn verify_algebra(d: &SqrtDecomposition) -> std::result::Result<(), DecompositionFault> {
    if !is_square_free(d.alpha) {
        return Err(DecompositionFault::AlphaNotSquareFree);
    }
    let m = d.m();
    if d.a.degree() != Some(m) || !d.a.is_monic() || d.b.degree().is_some_and(|k| k + 1 > m) {
        return Err(DecompositionFault::Degree);
    }
    let a = d.a.coeffs();
    let b: Vec<BigInt> = (0..m).map(|j| d.b.coeff(j)).collect();
    if (0..=m).any(|j| a[j] != a[m - j]) || (0..m).any(|j| b[j] != b[m - 1 - j]) {
        return Err(DecompositionFault::NotPalindromic);
    }
    if d.b.is_zero() {
        return Err(DecompositionFault::ZeroOddPart);
    }
    let y_b2 = &IntPoly::monomial(1) * &(&d.b * &d.b);
    let lhs = &(&d.a * &d.a) - &y_b2.scale(&BigInt::from(d.alpha));
    if &lhs != d.source.as_poly() {
        return Err(DecompositionFault::Identity);
    }
    Ok(())
}

/// `q(1) = A(1) + √α B(1) < 0`, decided exactly. Given the identity and a
/// Salem source, `q` holds exactly one of `±√λ` and the same sign of
/// `±1/√λ`; its other roots come in conjugate pairs, so the sign of `q(1)` is
/// negative exactly when the large root is `+√λ`.
pub(crate) fn large_root_positive(d: &SqrtDecomposition) -> bool {
    let one = BigInt::one();
    let a = d.a.eval(&one);
    let b = d.b.eval(&one);
    sum_with_sqrt_is_negative(&a, &b, d.alpha)
}

/// Whether `a + √α·b < 0`.
pub(crate) fn sum_with_sqrt_is_negative(a: &BigInt, b: &BigInt, alpha: u64) -> bool {
    let al = BigInt::from(alpha);
    match (a.signum().to_i32().unwrap(), b.signum().to_i32().unwrap()) {
        (x, y) if x <= 0 && y <= 0 => x < 0 || y < 0,
        (x, y) if x >= 0 && y >= 0 => false,
        // a < 0 < b: need α b² < a².
        (-1, _) => &al * b * b < a * a,
        // b < 0 < a: need α b² > a².
        _ => &al * b * b > a * a,
    }
}

/// `λ_q²` for the large root `λ_q` of `q`, computed from `q` itself by
/// Newton's method at 256 bits.
pub fn phi(d: &SqrtDecomposition) -> HpReal {
    phi_with_bits(d, 256)
}

pub fn phi_with_bits(d: &SqrtDecomposition, bits: u32) -> HpReal {
    let wbits = bits + 32;
    let q = d.q_coeffs_hp(wbits);
    let qf: Vec<f64> = q.iter().map(HpReal::to_f64).collect();
    let start = crate::poly::aberth_f64(&qf)
        .into_iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut x = HpReal::from_f64(start, wbits);
    for _ in 0..100 {
        let mut v = HpReal::zero(wbits);
        let mut dv = HpReal::zero(wbits);
        for c in q.iter().rev() {
            dv = &(&dv * &x) + &v;
            v = &(&v * &x) + c;
        }
        let Some(step) = v.checked_div(&dv) else {
            break;
        };
        x = &x - &step;
        if step.abs() <= HpReal::pow2_neg(wbits - 8, wbits) {
            break;
        }
    }
    (&x * &x).with_bits(bits)
}

/// All witnesses `(α, q)` whose image is the Salem number of `s`, deduplicated
/// and sorted by `α`.
pub fn find_decompositions(s: &SalemRecord) -> Result<Vec<SqrtDecomposition>> {
    let mut bits = 128;
    loop {
        match search_signs(s, bits) {
            Ok(Some(found)) => return Ok(found),
            Ok(None) | Err(Error::CertificationFailed { .. }) if bits < MAX_SEARCH_BITS => {
                bits *= 2
            }
            Ok(None) | Err(Error::CertificationFailed { .. }) => {
                return Err(Error::PrecisionExhausted { bits })
            }
            Err(e) => return Err(e),
        }
    }
}

pub fn is_square_rootable(s: &SalemRecord) -> Result<bool> {
    Ok(!find_decompositions(s)?.is_empty())
}

/// `None` if some rounding was ambiguous at this precision.
fn search_signs(s: &SalemRecord, bits: u32) -> Result<Option<Vec<SqrtDecomposition>>> {
    let p = s.min_poly.as_poly();
    let m = s.m;
    let roots = complex_roots(p, bits)?;
    let one = HpReal::from_i64(1, bits);
    // The unit-circle roots in the upper half plane; λ is the real root > 1.
    let upper: Vec<&RootEnclosure> = roots
        .iter()
        .filter(|r| r.center.im.signum() > 0 && !r.touches_real_axis())
        .collect();
    if upper.len() != m - 1 {
        return Ok(None);
    }
    let lambda = s.lambda.center.re.with_bits(bits);
    let root_l = lambda.sqrt();
    let big_pair = &root_l + &one.div(&root_l);
    let halves: Vec<HpReal> = upper
        .iter()
        .map(|r| {
            // Real part of the principal square root of ζ.
            r.center.sqrt().re
        })
        .collect();

    let tight = HpReal::pow2_neg(bits / 2, bits);
    let loose = HpReal::pow2_neg(10, bits);
    let mut ambiguous = false;
    let mut found: Vec<SqrtDecomposition> = Vec::new();
    for pattern in 0u64..(1u64 << (m - 1)) {
        // q = (x² - (√λ + 1/√λ) x + 1) · prod (x² - 2 s_j Re√ζ_j x + 1)
        let mut q = vec![one.clone(), -&big_pair, one.clone()];
        for (j, h) in halves.iter().enumerate() {
            let c = if pattern >> j & 1 == 1 { -h } else { h.clone() };
            let lin = -&(&c + &c);
            let mut next = vec![HpReal::zero(bits); q.len() + 2];
            for (i, a) in q.iter().enumerate() {
                next[i] = &next[i] + a;
                next[i + 1] = &next[i + 1] + &(a * &lin);
                next[i + 2] = &next[i + 2] + a;
            }
            q = next;
        }
        match recover_witness(&q, m, &tight, &loose) {
            Recovered::Witness { alpha, a, b } => {
                let d = SqrtDecomposition {
                    alpha,
                    a,
                    b,
                    source: s.min_poly.clone(),
                };
                if verify_algebra(&d).is_ok() && large_root_positive(&d) && !found.contains(&d) {
                    found.push(d);
                }
            }
            Recovered::Ambiguous => ambiguous = true,
            Recovered::None => {}
        }
    }
    if ambiguous {
        return Ok(None);
    }
    found.sort();
    Ok(Some(found))
}

enum Recovered {
    Witness { alpha: u64, a: IntPoly, b: IntPoly },
    Ambiguous,
    None,
}

fn recover_witness(q: &[HpReal], m: usize, tight: &HpReal, loose: &HpReal) -> Recovered {
    let mut ambiguous = false;
    let mut a = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let (n, dist) = q[2 * j].round_to_int();
        if &dist > loose {
            return Recovered::None;
        }
        if &dist > tight {
            ambiguous = true;
        }
        a.push(n);
    }
    // Odd coefficients are b_k √α; their squares are the integers α b_k².
    let mut squares = Vec::with_capacity(m);
    for j in 0..m {
        let c = &q[2 * j + 1];
        let (n, dist) = (c * c).round_to_int();
        if &dist > loose {
            return Recovered::None;
        }
        if &dist > tight {
            ambiguous = true;
        }
        squares.push((n, c.signum()));
    }
    if ambiguous {
        return Recovered::Ambiguous;
    }
    let Some(first) = squares.iter().find(|(n, _)| !n.is_zero()) else {
        return Recovered::None;
    };
    let (alpha, _) = square_free_part_big(&first.0);
    let mut b = Vec::with_capacity(m);
    for (n, sign) in &squares {
        if n.is_zero() {
            b.push(BigInt::zero());
            continue;
        }
        let (rem_quot, rem) = n.div_rem(&alpha);
        if !rem.is_zero() {
            return Recovered::None;
        }
        let r = rem_quot.sqrt();
        if &r * &r != rem_quot {
            return Recovered::None;
        }
        b.push(if *sign < 0 { -r } else { r });
    }
    let Some(alpha) = alpha.to_u64() else {
        return Recovered::None;
    };
    Recovered::Witness {
        alpha,
        a: IntPoly::new(a),
        b: IntPoly::new(b),
    }
}

/// Orders `d` whose `Φ_d` could divide `p(x²)` for a degree-`2m` source but
/// exceed `2m` in degree: the audit band of the root-of-unity clause.
pub fn root_of_unity_audit_orders(m: usize) -> Vec<u64> {
    let m = m as u64;
    orders_with_phi_at_most(4 * m)
        .into_iter()
        .filter(|&d| d > 2 * m && d <= 4 * m && crate::salem::euler_phi(d) > 2 * m)
        .collect()
}
