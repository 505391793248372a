//! Fixed-point binary numbers for root refinement.
//!
//! An [`HpReal`] is `mant / 2^bits`. Every root handled here has modulus
//! within a few decades of 1, so fixed point gives a uniform absolute error of
//! about `2^-bits` per operation without an exponent field. Operands of a
//! binary operation must share `bits`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    mant: BigInt,
    bits: u32,
}

impl HpReal {
    pub fn zero(bits: u32) -> Self {
        HpReal {
            mant: BigInt::zero(),
            bits,
        }
    }

    pub fn from_int(v: &BigInt, bits: u32) -> Self {
        HpReal {
            mant: v << bits,
            bits,
        }
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        Self::from_int(&BigInt::from(v), bits)
    }

    /// Exact for every finite `f64` down to `2^-bits`.
    pub fn from_f64(v: f64, bits: u32) -> Self {
        assert!(v.is_finite(), "non-finite value {v}");
        if v == 0.0 {
            return Self::zero(bits);
        }
        let raw = v.to_bits();
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (mantissa, e) = if exp == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut m = BigInt::from(mantissa);
        let shift = e + bits as i64;
        m = if shift >= 0 {
            m << shift as usize
        } else {
            m >> (-shift) as usize
        };
        if v < 0.0 {
            m = -m;
        }
        HpReal { mant: m, bits }
    }

    pub fn from_rational(v: &BigRational, bits: u32) -> Self {
        HpReal {
            mant: (v.numer() << bits) / v.denom(),
            bits,
        }
    }

    /// Unit in the last place, `2^-bits`.
    pub fn ulp(bits: u32) -> Self {
        HpReal {
            mant: BigInt::one(),
            bits,
        }
    }

    /// `2^-k` at `bits` precision (zero when `k > bits`).
    pub fn pow2_neg(k: u32, bits: u32) -> Self {
        if k > bits {
            return Self::zero(bits);
        }
        HpReal {
            mant: BigInt::one() << (bits - k),
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    /// The exact dyadic value as a rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        let drop = self.mant.bits().saturating_sub(64);
        let top = (&self.mant >> drop).to_f64().unwrap_or(f64::NAN);
        ldexp(top, drop as i64 - self.bits as i64)
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        let mant = match bits.cmp(&self.bits) {
            Ordering::Equal => self.mant.clone(),
            Ordering::Greater => &self.mant << (bits - self.bits),
            Ordering::Less => &self.mant >> (self.bits - bits),
        };
        HpReal { mant, bits }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> Self {
        HpReal {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => 0,
        }
    }

    /// Quotient rounded toward zero; `None` for a zero divisor.
    pub fn checked_div(&self, rhs: &HpReal) -> Option<HpReal> {
        debug_assert_eq!(self.bits, rhs.bits);
        if rhs.mant.is_zero() {
            return None;
        }
        Some(HpReal {
            mant: (&self.mant << self.bits) / &rhs.mant,
            bits: self.bits,
        })
    }

    pub fn div(&self, rhs: &HpReal) -> HpReal {
        self.checked_div(rhs).expect("division by zero")
    }

    /// Floor square root; negative inputs clamp to zero.
    pub fn sqrt(&self) -> HpReal {
        if !self.mant.is_positive() {
            return HpReal::zero(self.bits);
        }
        HpReal {
            mant: (&self.mant << self.bits).sqrt(),
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> HpReal {
        HpReal {
            mant: &self.mant * k,
            bits: self.bits,
        }
    }

    /// Nearest integer and the distance to it.
    pub fn round_to_int(&self) -> (BigInt, HpReal) {
        let half = BigInt::one() << (self.bits.max(1) - 1);
        let rounded = (&self.mant + &half) >> self.bits;
        let back = HpReal::from_int(&rounded, self.bits);
        let dist = (self - &back).abs();
        (rounded, dist)
    }
}

/// `x · 2^e` without intermediate overflow or underflow.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl PartialOrd for HpReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HpReal {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.bits, other.bits);
        self.mant.cmp(&other.mant)
    }
}

impl Add for &HpReal {
    type Output = HpReal;
    fn add(self, rhs: &HpReal) -> HpReal {
        debug_assert_eq!(self.bits, rhs.bits);
        HpReal {
            mant: &self.mant + &rhs.mant,
            bits: self.bits,
        }
    }
}

impl Sub for &HpReal {
    type Output = HpReal;
    fn sub(self, rhs: &HpReal) -> HpReal {
        debug_assert_eq!(self.bits, rhs.bits);
        HpReal {
            mant: &self.mant - &rhs.mant,
            bits: self.bits,
        }
    }
}

impl Mul for &HpReal {
    type Output = HpReal;
    fn mul(self, rhs: &HpReal) -> HpReal {
        debug_assert_eq!(self.bits, rhs.bits);
        HpReal {
            mant: (&self.mant * &rhs.mant) >> self.bits,
            bits: self.bits,
        }
    }
}

impl Neg for &HpReal {
    type Output = HpReal;
    fn neg(self) -> HpReal {
        HpReal {
            mant: -&self.mant,
            bits: self.bits,
        }
    }
}

impl fmt::Display for HpReal {
    /// Decimal expansion truncated to the precision carried (about
    /// `bits · log10 2` digits), or to `{:.N}` digits when given.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.bits as f64) * std::f64::consts::LOG10_2).floor() as usize);
        let neg = self.mant.is_negative();
        let mag = self.mant.abs();
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = (&mag * &scale + (BigInt::one() << self.bits) / 2u32) >> self.bits;
        let int_part = &scaled / &scale;
        let frac_part = &scaled % &scale;
        if neg && !scaled.is_zero() {
            f.write_str("-")?;
        }
        if digits == 0 {
            write!(f, "{int_part}")
        } else {
            write!(
                f,
                "{int_part}.{:0>width$}",
                frac_part.to_string(),
                width = digits
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

impl HpComplex {
    pub fn new(re: HpReal, im: HpReal) -> Self {
        debug_assert_eq!(re.bits, im.bits);
        HpComplex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        HpComplex::new(HpReal::zero(bits), HpReal::zero(bits))
    }

    pub fn real(re: HpReal) -> Self {
        let bits = re.bits;
        HpComplex::new(re, HpReal::zero(bits))
    }

    pub fn from_f64(re: f64, im: f64, bits: u32) -> Self {
        HpComplex::new(HpReal::from_f64(re, bits), HpReal::from_f64(im, bits))
    }

    pub fn bits(&self) -> u32 {
        self.re.bits
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        HpComplex::new(self.re.with_bits(bits), self.im.with_bits(bits))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(&self) -> Self {
        HpComplex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> HpReal {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> HpReal {
        self.norm_sqr().sqrt()
    }

    pub fn checked_div(&self, rhs: &HpComplex) -> Option<HpComplex> {
        let den = rhs.norm_sqr();
        if den.is_zero() {
            return None;
        }
        let re = &(&self.re * &rhs.re) + &(&self.im * &rhs.im);
        let im = &(&self.im * &rhs.re) - &(&self.re * &rhs.im);
        Some(HpComplex::new(re.checked_div(&den)?, im.checked_div(&den)?))
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> HpComplex {
        let r = self.abs();
        let re = (&(&r + &self.re) * &HpReal::pow2_neg(1, r.bits)).sqrt();
        let mut im = (&(&r - &self.re) * &HpReal::pow2_neg(1, r.bits)).sqrt();
        if self.im.is_negative() {
            im = -&im;
        }
        HpComplex::new(re, im)
    }

    pub fn scale(&self, k: &HpReal) -> HpComplex {
        HpComplex::new(&self.re * k, &self.im * k)
    }
}

impl Add for &HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl fmt::Display for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        if self.im.is_zero() {
            return write!(f, "{:.digits$}", self.re);
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{:.digits$} {sign} {:.digits$}i", self.re, self.im.abs())
    }
}
