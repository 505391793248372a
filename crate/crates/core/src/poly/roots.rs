//! Certified root enclosures.
//!
//! Complex roots are found by simultaneous (Aberth–Ehrlich) iteration, first
//! in `f64` and then in fixed point at the requested precision. Disks of
//! radius `n·|W_i|` around the approximations, with `W_i` the Weierstrass
//! corrections, cover Gerschgorin disks of a matrix whose eigenvalues are the
//! roots; when they are pairwise disjoint each holds exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hp::{HpComplex, HpReal};
use super::IntPoly;
use crate::error::{Error, Result};

/// Guard bits carried during refinement beyond the requested precision.
const GUARD_BITS: u32 = 32;

/// A disk `|z - center| <= radius` holding exactly one root of its source
/// polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEnclosure {
    pub center: HpComplex,
    pub radius: HpReal,
}

impl RootEnclosure {
    pub fn bits(&self) -> u32 {
        self.center.bits()
    }

    /// Whether `|Im z| <= radius`, i.e. the disk meets the real axis.
    pub fn touches_real_axis(&self) -> bool {
        self.center.im.abs() <= self.radius
    }

    pub fn approx(&self) -> Complex64 {
        let (re, im) = self.center.to_f64();
        Complex64::new(re, im)
    }

    pub fn contains(&self, z: &HpComplex) -> bool {
        let d = &self.center - &z.with_bits(self.bits());
        d.norm_sqr() <= &self.radius * &self.radius
    }
}

fn horner_f64(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth–Ehrlich iteration in double precision.
pub(crate) fn aberth_f64(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    // Fujiwara bound on the root moduli.
    let bound = (1..=n)
        .map(|k| (c[n - k] / lead).abs().powf(1.0 / k as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = bound.max(1e-3) * 0.5 + 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius, t)
        })
        .collect();
    for _ in 0..800 {
        let mut worst = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner_f64(c, z[k]);
            if p == Complex64::zero() {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::one() / (z[k] - z[j]))
                .sum();
            let corr = w / (Complex64::one() - w * s);
            if !corr.is_finite() {
                // Nudge off a singular configuration.
                z[k] += Complex64::new(1e-7, 1e-7);
                worst = f64::INFINITY;
                continue;
            }
            z[k] -= corr;
            worst = worst.max(corr.norm() / (1.0 + z[k].norm()));
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

fn horner_hp(c: &[BigInt], z: &HpComplex) -> (HpComplex, HpComplex) {
    let bits = z.bits();
    let mut p = HpComplex::zero(bits);
    let mut dp = HpComplex::zero(bits);
    for a in c.iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + &HpComplex::real(HpReal::from_int(a, bits));
    }
    (p, dp)
}

fn aberth_refine(c: &[BigInt], z: &mut [HpComplex], bits: u32) {
    let n = z.len();
    let one = HpComplex::real(HpReal::from_i64(1, bits));
    let target = HpReal::pow2_neg(bits.saturating_sub(8), bits);
    for _ in 0..200 {
        let mut done = true;
        for k in 0..n {
            let (p, dp) = horner_hp(c, &z[k]);
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let Some(w) = p.checked_div(&dp) else {
                done = false;
                continue;
            };
            let mut s = HpComplex::zero(bits);
            for j in 0..n {
                if j != k {
                    if let Some(inv) = one.checked_div(&(&z[k] - &z[j])) {
                        s = &s + &inv;
                    }
                }
            }
            let den = &one - &(&w * &s);
            let Some(corr) = w.checked_div(&den) else {
                done = false;
                continue;
            };
            z[k] = &z[k] - &corr;
            if corr.re.abs() > target || corr.im.abs() > target {
                done = false;
            }
        }
        if done {
            break;
        }
    }
}

/// Certified enclosures of every complex root of a squarefree polynomial.
///
/// The returned disks are pairwise disjoint and each contains exactly one
/// root. Failure to separate them at `precision_bits` is reported as
/// [`Error::CertificationFailed`]; retry with more bits.
pub fn complex_roots(p: &IntPoly, precision_bits: u32) -> Result<Vec<RootEnclosure>> {
    let n = p.degree().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if !p.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let bits = precision_bits.max(64);
    if n == 1 {
        let c = p.coeffs();
        let root = num_rational::BigRational::new(-c[0].clone(), c[1].clone());
        let center = HpComplex::real(HpReal::from_rational(&root, bits));
        return Ok(vec![RootEnclosure {
            center,
            radius: HpReal::ulp(bits),
        }]);
    }
    let wbits = bits + GUARD_BITS;
    let cf: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::MAX))
        .collect();
    let seeds = aberth_f64(&cf);
    let mut z: Vec<HpComplex> = seeds
        .iter()
        .map(|s| HpComplex::from_f64(s.re, s.im, wbits))
        .collect();
    aberth_refine(p.coeffs(), &mut z, wbits);

    let radii = weierstrass_radii(p, &z, wbits).ok_or(Error::CertificationFailed { bits })?;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (&z[i] - &z[j]).norm_sqr();
            let reach = &radii[i] + &radii[j];
            if gap <= &reach * &reach {
                return Err(Error::CertificationFailed { bits });
            }
        }
    }
    let mut out: Vec<RootEnclosure> = z
        .into_iter()
        .zip(radii)
        .map(|(c, r)| RootEnclosure {
            center: c.with_bits(bits),
            radius: &r.with_bits(bits) + &HpReal::ulp(bits).mul_int(&BigInt::from(3)),
        })
        .collect();
    out.sort_by(|a, b| {
        a.center
            .re
            .cmp(&b.center.re)
            .then_with(|| a.center.im.cmp(&b.center.im))
    });
    Ok(out)
}

/// For enclosures of all roots of a real polynomial: a disk whose mirror
/// image meets no other disk holds a real root, since the conjugate of its
/// root must lie in it as well.
pub fn certified_real(roots: &[RootEnclosure]) -> Vec<bool> {
    roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if !r.touches_real_axis() {
                return false;
            }
            let mirror = r.center.conj();
            roots.iter().enumerate().all(|(j, o)| {
                if i == j {
                    return true;
                }
                let gap = (&mirror - &o.center).norm_sqr();
                let reach = &r.radius + &o.radius;
                gap > &reach * &reach
            })
        })
        .collect()
}

/// `n·(|p(z_i)| + e_i) / |lc · prod_{j != i}(z_i - z_j)|` plus one ulp, where
/// `e_i` bounds the fixed-point evaluation error.
fn weierstrass_radii(p: &IntPoly, z: &[HpComplex], bits: u32) -> Option<Vec<HpReal>> {
    let n = z.len();
    let c = p.coeffs();
    let lead = HpReal::from_int(&c[n].abs(), bits);
    let coef_sum: BigInt = c.iter().map(|a| a.abs()).sum();
    let one = HpReal::from_i64(1, bits);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (val, _) = horner_hp(c, &z[i]);
        let mut denom = lead.clone();
        for j in 0..n {
            if j != i {
                denom = &denom * &(&z[i] - &z[j]).abs();
            }
        }
        if denom.is_zero() {
            return None;
        }
        let modulus = z[i].abs().max(one.clone());
        let mut growth = one.clone();
        for _ in 0..n {
            growth = &growth * &modulus;
        }
        // Each Horner step loses a few ulps relative to the running magnitude.
        let eval_err = (&growth * &HpReal::ulp(bits))
            .mul_int(&(coef_sum.clone() * BigInt::from(8 * (n as i64 + 1))))
            .max(HpReal::ulp(bits));
        let num = &val.abs() + &eval_err;
        let w = num.checked_div(&denom)?;
        let r = &w.mul_int(&BigInt::from(n as i64 + 1)) + &HpReal::ulp(bits);
        out.push(r);
    }
    Some(out)
}

/// Sign of `p` at the exact dyadic value of `x`.
pub(crate) fn exact_sign(p: &IntPoly, x: &HpReal) -> i32 {
    p.sign_at(x.mantissa(), &(BigInt::one() << x.bits()))
}

fn eval_hp(c: &[BigInt], x: &HpReal) -> (HpReal, HpReal) {
    let bits = x.bits();
    let mut p = HpReal::zero(bits);
    let mut dp = HpReal::zero(bits);
    for a in c.iter().rev() {
        dp = &(&dp * x) + &p;
        p = &(&p * x) + &HpReal::from_int(a, bits);
    }
    (p, dp)
}

/// Certified enclosure of the unique root of `p` in `(lo, hi)`.
///
/// Requires `p(lo)` and `p(hi)` of opposite (nonzero) signs and a single root
/// between them. The returned center is real and the enclosure is checked by
/// exact sign evaluation at `center ± radius`.
pub fn refine_real_root(
    p: &IntPoly,
    lo: &HpReal,
    hi: &HpReal,
    precision_bits: u32,
) -> Result<RootEnclosure> {
    let bits = precision_bits.max(64);
    let wbits = bits + GUARD_BITS;
    let mut lo = lo.with_bits(wbits);
    let mut hi = hi.with_bits(wbits);
    let s_lo = exact_sign(p, &lo);
    let s_hi = exact_sign(p, &hi);
    if s_lo == 0 || s_hi == 0 || s_lo == s_hi {
        return Err(Error::InvalidArgument(
            "real root bracket needs a strict sign change".into(),
        ));
    }

    // Cheap double-precision bisection for a starting point.
    let cf: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::MAX))
        .collect();
    let (mut a, mut b) = (lo.to_f64(), hi.to_f64());
    let fa = s_lo as f64;
    for _ in 0..120 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let v = cf.iter().rev().fold(0.0, |acc, &c| acc * mid + c);
        if v == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if v.signum() == fa.signum() {
            a = mid;
        } else {
            b = mid;
        }
    }
    let mut x = HpReal::from_f64(0.5 * (a + b), wbits);
    for _ in 0..64 {
        let (v, dv) = eval_hp(p.coeffs(), &x);
        let Some(step) = v.checked_div(&dv) else {
            break;
        };
        x = &x - &step;
        if step.abs() <= HpReal::pow2_neg(wbits - 4, wbits) {
            break;
        }
    }
    let radius = HpReal::pow2_neg(bits - 2, wbits);
    let left = &x - &radius;
    let right = &x + &radius;
    if left > lo && right < hi {
        let sl = exact_sign(p, &left);
        let sr = exact_sign(p, &right);
        if sl == s_lo && sr == s_hi {
            return Ok(real_enclosure(&x, &radius, bits));
        }
    }

    // Fallback: exact bisection.
    let target = HpReal::pow2_neg(bits - 1, wbits);
    while &hi - &lo > target {
        let mid = HpReal::from_rational(
            &((lo.to_rational() + hi.to_rational()) / BigInt::from(2)),
            wbits,
        );
        match exact_sign(p, &mid) {
            0 => return Ok(real_enclosure(&mid, &HpReal::ulp(wbits), bits)),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    let half = HpReal::from_rational(
        &((hi.to_rational() - lo.to_rational()) / BigInt::from(2)),
        wbits,
    );
    let center = &lo + &half;
    Ok(real_enclosure(
        &center,
        &(&half + &HpReal::ulp(wbits)),
        bits,
    ))
}

fn real_enclosure(center: &HpReal, radius: &HpReal, bits: u32) -> RootEnclosure {
    RootEnclosure {
        center: HpComplex::real(center.with_bits(bits)),
        radius: &radius.with_bits(bits) + &HpReal::ulp(bits).mul_int(&BigInt::from(2)),
    }
}

/// Cauchy bound `1 + max |c_k / c_n|`, rounded up to an integer.
pub(crate) fn cauchy_bound(p: &IntPoly) -> BigInt {
    let c = p.coeffs();
    let lead = c.last().expect("nonzero polynomial").abs();
    let max = c[..c.len() - 1]
        .iter()
        .map(|a| a.abs())
        .max()
        .unwrap_or_default();
    let q = (&max + &lead - BigInt::one()) / &lead;
    q + BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn quadratic_roots() {
        let roots = complex_roots(&p(&[1, -3, 1]), 128).unwrap();
        assert_eq!(roots.len(), 2);
        let want = [(3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0];
        for (r, w) in roots.iter().zip(want) {
            assert!((r.approx().re - w).abs() < 1e-14);
            assert!(r.approx().im.abs() < 1e-30);
            assert!(r.radius.to_f64() < 1e-30);
        }
    }

    #[test]
    fn imaginary_unit() {
        let roots = complex_roots(&p(&[1, 0, 1]), 128).unwrap();
        let mut ims: Vec<f64> = roots.iter().map(|r| r.approx().im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-15 && (ims[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lehmer_polynomial_has_one_root_outside() {
        let lehmer = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let roots = complex_roots(&lehmer, 256).unwrap();
        assert_eq!(roots.len(), 10);
        let outside: Vec<_> = roots
            .iter()
            .filter(|r| r.approx().norm() > 1.0 + 1e-9)
            .collect();
        assert_eq!(outside.len(), 1);
        assert!((outside[0].approx().re - 1.176_280_818_259_917).abs() < 1e-12);
        let real = certified_real(&roots);
        assert_eq!(real.iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn radii_shrink_with_precision() {
        let q = p(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let lo = complex_roots(&q, 128).unwrap();
        let hi = complex_roots(&q, 512).unwrap();
        let max_lo = lo.iter().map(|r| r.radius.to_f64()).fold(0.0, f64::max);
        let max_hi = hi.iter().map(|r| r.radius.to_f64()).fold(0.0, f64::max);
        assert!(max_hi < max_lo);
        assert!(max_hi < 1e-140);
    }

    #[test]
    fn repeated_roots_are_rejected() {
        assert!(matches!(
            complex_roots(&p(&[1, 2, 1]), 128),
            Err(Error::NotSquarefree)
        ));
    }

    #[test]
    fn real_root_refinement() {
        let q = p(&[1, -3, 1]);
        let e =
            refine_real_root(&q, &HpReal::from_i64(1, 64), &HpReal::from_i64(3, 64), 300).unwrap();
        let golden_sq = HpReal::from_i64(5, 300).sqrt();
        let want = &(&golden_sq + &HpReal::from_i64(3, 300)) * &HpReal::pow2_neg(1, 300);
        assert!((&e.center.re - &want).abs() <= e.radius);
        assert!(e.radius.to_f64() < 1e-85);
    }
}
