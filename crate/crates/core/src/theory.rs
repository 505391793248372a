//! Main terms of the census asymptotics and the constants around them.
//!
//! Exact rationals are used for `w_m`; everything carrying `π`, `ζ` or a
//! logarithm is `f64`. Curves that grow like `e^{cL}` are evaluated in log
//! space so the bound ratios stay finite for large `L`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `w_m = 2^{m(m+1)}/(m+1) · prod_{k<m} (k!)²/(2k+1)!`, exact.
pub fn w(m: u32) -> BigRational {
    // w_{k+1}/w_k = 4^{k+1} (k+1)/(k+2) (k!)²/(2k+1)!
    let mut acc = BigRational::one();
    let mut fact_k = BigInt::one(); // k!
    let mut fact_2k1 = BigInt::one(); // (2k+1)!
    for k in 0..m {
        if k > 0 {
            fact_k *= k;
            fact_2k1 *= (2 * k) * (2 * k + 1);
        }
        let num = (BigInt::one() << (2 * (k + 1))) * (k + 1) * &fact_k * &fact_k;
        let den = BigInt::from(k + 2) * &fact_2k1;
        acc *= BigRational::new(num, den);
    }
    acc
}

pub fn w_f64(m: u32) -> f64 {
    w(m).to_f64().unwrap_or(f64::INFINITY)
}

/// `w_m <= 4^m / sqrt((m+1)!)`, decided exactly as `w_m² (m+1)! <= 16^m`.
pub fn w_upper_bound_check(m: u32) -> bool {
    let wm = w(m);
    let fact: BigInt = (1..=m + 1).map(BigInt::from).product();
    let lhs = &wm * &wm * BigRational::from_integer(fact);
    lhs <= BigRational::from_integer(BigInt::one() << (4 * m))
}

/// Growth factor of the square-rootable census relative to `Q^{m/2}`.
pub fn eta(q: f64, m: u32) -> f64 {
    match m {
        1 | 2 => q.sqrt(),
        3 | 4 => q.ln(),
        _ => 1.0,
    }
}

const SIEVE_LIMIT: usize = 1 << 21;

/// Square-free flags for `0..SIEVE_LIMIT`, built once.
fn sieve() -> &'static [bool] {
    static TABLE: OnceLock<Vec<bool>> = OnceLock::new();
    TABLE.get_or_init(|| squarefree_flags(SIEVE_LIMIT))
}

fn squarefree_flags(n: usize) -> Vec<bool> {
    let mut flags = vec![true; n];
    if n > 0 {
        flags[0] = false;
    }
    let mut p = 2usize;
    while p * p < n {
        let sq = p * p;
        let mut k = sq;
        while k < n {
            flags[k] = false;
            k += sq;
        }
        p += 1;
    }
    flags
}

fn with_flags<R>(x: u64, f: impl FnOnce(&[bool]) -> R) -> R {
    let need = x as usize + 1;
    if need <= SIEVE_LIMIT {
        f(&sieve()[..need])
    } else {
        f(&squarefree_flags(need))
    }
}

/// Square-free `n <= x`, ascending.
pub fn squarefree_up_to(x: u64) -> Vec<u64> {
    with_flags(x, |fl| {
        fl.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| i as u64)
            .collect()
    })
}

/// `sum 1/n` over square-free `n <= x`, exact. The denominator grows like
/// `lcm(1..x)`, so this is meant for `x` up to a few thousand.
pub fn squarefree_harmonic(x: u64) -> BigRational {
    let mut acc = BigRational::from_integer(0.into());
    for n in squarefree_up_to(x) {
        acc += BigRational::new(1.into(), n.into());
    }
    acc
}

/// Compensated `f64` version of [`squarefree_harmonic`].
pub fn squarefree_harmonic_f64(x: u64) -> f64 {
    partial_sum(1.0, x)
}

/// `sum n^{-s}` over square-free `n <= x`, Neumaier-compensated.
pub fn partial_sum(s: f64, x: u64) -> f64 {
    with_flags(x, |fl| {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (n, _) in fl.iter().enumerate().filter(|(_, &sf)| sf) {
            let t = (n as f64).powf(-s);
            let u = sum + t;
            if sum.abs() >= t.abs() {
                comp += (sum - u) + t;
            } else {
                comp += (t - u) + sum;
            }
            sum = u;
        }
        sum + comp
    })
}

const EM_TERMS: usize = 30;
// B_{2k} for k = 1..=8.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Riemann zeta for real `s > 1` by Euler–Maclaurin with `N = 30` and eight
/// Bernoulli corrections. The first omitted term is below `1e-20` for
/// `1 < s <= 20`, so the total error is set by `f64` rounding (`~1e-15`).
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("zeta needs s > 1, got {s}")));
    }
    let n = EM_TERMS as f64;
    let mut sum = 0.0;
    for k in (1..EM_TERMS).rev() {
        sum += (k as f64).powf(-s);
    }
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // term_k = B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1}
    let mut rising = s; // s(s+1)…(s+2k-2)
    let mut fact = 2.0; // (2k)!
    let mut power = n.powf(-s - 1.0);
    for (i, b) in BERNOULLI.iter().enumerate() {
        let k = i + 1;
        sum += b / fact * rising * power;
        let a = 2.0 * k as f64;
        rising *= (s + a - 1.0) * (s + a);
        fact *= (a + 1.0) * (a + 2.0);
        power /= n * n;
    }
    Ok(sum)
}

/// `sum_{n square-free} n^{-s} = ζ(s)/ζ(2s)`.
pub fn squarefree_zeta(s: f64) -> Result<f64> {
    Ok(zeta(s)? / zeta(2.0 * s)?)
}

/// Which main term a prediction is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryKind {
    AllSalem,
    SqSalemLower,
    SqSalemUpper,
    SqSalemMain,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub m: u32,
    #[serde(rename = "Q")]
    pub q: f64,
    pub kind: TheoryKind,
    pub value: f64,
}

/// Lower and upper main terms of the square-rootable census; equal except
/// for even `m >= 4`, where they differ by exactly `2^{-2m}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqPrediction {
    pub m: u32,
    #[serde(rename = "Q")]
    pub q: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SqPrediction {
    pub fn is_sandwich(&self) -> bool {
        self.m >= 4 && self.m % 2 == 0
    }

    pub fn predictions(&self) -> Vec<TheoryPrediction> {
        let p = |kind, value| TheoryPrediction {
            m: self.m,
            q: self.q,
            kind,
            value,
        };
        if self.is_sandwich() {
            vec![
                p(TheoryKind::SqSalemLower, self.lower),
                p(TheoryKind::SqSalemUpper, self.upper),
            ]
        } else {
            vec![
                p(TheoryKind::SqSalemLower, self.lower),
                p(TheoryKind::SqSalemUpper, self.upper),
                p(TheoryKind::SqSalemMain, self.upper),
            ]
        }
    }
}

fn ln_w(m: u32) -> f64 {
    let v = w(m);
    // Ratio of big integers can overflow f64 for large m; go through bit lengths.
    let (n, d) = (v.numer(), v.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(900);
    let nf = (n >> shift).to_f64().unwrap();
    let df = (d >> shift).to_f64().unwrap();
    nf.ln() - df.ln()
}

/// `ln` of the upper (or only) square-rootable main term at `ln Q`.
fn ln_sq_upper(m: u32, ln_q: f64) -> f64 {
    let six_over_pi2 = (6.0 / (PI * PI)).ln();
    let half = m as f64 / 2.0 * ln_q;
    match m {
        1 => ln_q,
        2 => (4.0f64 / 3.0).ln() + 1.5 * ln_q,
        3 | 4 => ln_w(m - 1) + six_over_pi2 + half + ln_q.ln(),
        _ => {
            let s = if m % 2 == 1 {
                (m + 1) as f64 / 4.0
            } else {
                m as f64 / 4.0
            };
            ln_w(m - 1) + squarefree_zeta(s).expect("s > 1 for m >= 5").ln() + half
        }
    }
}

/// Upper (or only) square-rootable main term, evaluated directly.
fn sq_upper(m: u32, q: f64) -> f64 {
    let half = q.powf(m as f64 / 2.0);
    match m {
        1 => q,
        2 => 4.0 / 3.0 * q.powf(1.5),
        3 | 4 => w_f64(m - 1) * 6.0 / (PI * PI) * half * q.ln(),
        _ => {
            let s = if m % 2 == 1 {
                (m + 1) as f64 / 4.0
            } else {
                m as f64 / 4.0
            };
            w_f64(m - 1) * squarefree_zeta(s).expect("s > 1 for m >= 5") * half
        }
    }
}

/// `log2` of lower/upper: `-2m` in the even-`m` sandwich, else 0.
fn sandwich_shift(m: u32) -> f64 {
    if m >= 4 && m % 2 == 0 {
        -2.0 * m as f64
    } else {
        0.0
    }
}

fn ln_all(m: u32, ln_q: f64) -> f64 {
    ln_w(m - 1) + m as f64 * ln_q
}

/// Main terms of the square-rootable census of degree `2m` up to `Q`.
pub fn predict_sq_count(m: u32, q: f64) -> Result<SqPrediction> {
    check_mq(m, q)?;
    let upper = sq_upper(m, q);
    Ok(SqPrediction {
        m,
        q,
        lower: upper * sandwich_shift(m).exp2(),
        upper,
    })
}

/// `w_{m-1} Q^m`.
pub fn predict_all_count(m: u32, q: f64) -> Result<TheoryPrediction> {
    check_mq(m, q)?;
    Ok(TheoryPrediction {
        m,
        q,
        kind: TheoryKind::AllSalem,
        value: w_f64(m - 1) * q.powi(m as i32),
    })
}

fn check_mq(m: u32, q: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(q > 1.0) {
        return Err(Error::InvalidArgument(format!("Q must exceed 1, got {q}")));
    }
    Ok(())
}

/// Covolume of the lattice of witnesses with a fixed `α`: `α^{[(m+1)/2]/2}`.
pub fn lattice_det(m: u32, alpha: u64) -> f64 {
    (alpha as f64).powf(((m + 1) / 2) as f64 / 2.0)
}

/// Main term `w_{m-1} R^m / α^{[(m+1)/2]/2}` of the witness count for one `α`.
#[allow(non_snake_case)]
pub fn predict_P_m_alpha(m: u32, alpha: u64, r: f64) -> Result<f64> {
    if alpha == 0 || !crate::sqrt::is_square_free(alpha) {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} is not square-free"
        )));
    }
    check_mq(m, r)?;
    Ok(w_f64(m - 1) * r.powi(m as i32) / lattice_det(m, alpha))
}

/// Prime geodesic main term `e^{(n-1)L}/((n-1)L)`.
pub fn margulis_curve(n: u32, l: f64) -> f64 {
    ln_margulis(n, l).exp()
}

fn ln_margulis(n: u32, l: f64) -> f64 {
    let k = (n - 1) as f64;
    k * l - (k * l).ln()
}

fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.into_iter().collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + v.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

fn ln_distinct(n: u32, l: f64) -> f64 {
    if n % 2 == 0 {
        log_sum_exp((1..=n / 2).map(|m| ln_all(m, l)))
    } else {
        log_sum_exp((1..=(n + 1) / 2).map(|m| ln_sq_upper(m, 2.0 * l)))
    }
}

/// Main-term proxy for the number of distinct translation lengths up to `L`
/// in dimension `n`: Salem numbers up to `e^L` for even `n`, square-rootable
/// ones up to `e^{2L}` for odd `n` (upper sandwich term for even `m`).
pub fn distinct_length_bound(n: u32, l: f64) -> Result<f64> {
    check_nl(n, l)?;
    Ok(ln_distinct(n, l).exp())
}

fn check_nl(n: u32, l: f64) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "dimension must be at least 4, got {n}"
        )));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "length must be positive, got {l}"
        )));
    }
    Ok(())
}

pub fn delta57(n: u32) -> u32 {
    u32::from(n == 5 || n == 7)
}

/// `c'(n) = 1/((n-1) w_{[(n+1)/2]-1})` times `1`, `π²/6` or
/// `ζ([(n+3)/4])/ζ([(n+3)/4]/2)` for even `n`, `n ∈ {5, 7}` and odd `n >= 9`.
pub fn c_prime(n: u32) -> Result<f64> {
    check_nl(n, 1.0)?;
    let base = 1.0 / ((n - 1) as f64 * w_f64((n + 1) / 2 - 1));
    let factor = if n % 2 == 0 {
        1.0
    } else if n == 5 || n == 7 {
        PI * PI / 6.0
    } else {
        let k = ((n + 3) / 4) as f64;
        zeta(k)? / zeta(k / 2.0)?
    };
    Ok(base * factor)
}

/// Limit of `mean_mult_lower · L^{1+δ} / e^{([n/2]-1)L}` computed from the
/// main terms themselves. For `n ∈ {5, 7}` the dominant summand carries
/// `log Q = 2L`, so the limit is `c'(n)/2`.
pub fn ratio_limit(n: u32) -> Result<f64> {
    Ok(c_prime(n)? / (1 + delta57(n)) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u32,
    #[serde(rename = "L")]
    pub l: f64,
    pub gamma_h: f64,
    pub distinct_lengths_bound: f64,
    /// Always "main-term proxy": no implicit constants are available.
    pub distinct_lengths_kind: String,
    pub mean_mult_lower: f64,
    /// `mean_mult_lower · L^{1+δ} / e^{([n/2]-1)L}`, evaluated in log space;
    /// tends to `ratio_limit`.
    pub normalized: f64,
    pub c_prime: f64,
    pub ratio_limit: f64,
    pub delta57: u32,
}

impl BoundReport {
    /// The same report with the Margulis constant multiplied by `factor`.
    pub fn scale_gamma(&self, factor: f64) -> BoundReport {
        BoundReport {
            gamma_h: self.gamma_h * factor,
            mean_mult_lower: self.mean_mult_lower * factor,
            normalized: self.normalized * factor,
            ..self.clone()
        }
    }
}

/// Mean multiplicity lower bound from main terms.
pub fn mean_mult_bound(n: u32, l: f64) -> Result<BoundReport> {
    check_nl(n, l)?;
    let lg = ln_margulis(n, l);
    let ld = ln_distinct(n, l);
    let d = delta57(n);
    let ln_norm = lg - ld + (1 + d) as f64 * l.ln() - (n / 2 - 1) as f64 * l;
    Ok(BoundReport {
        n,
        l,
        gamma_h: lg.exp(),
        distinct_lengths_bound: ld.exp(),
        distinct_lengths_kind: "main-term proxy".into(),
        mean_mult_lower: (lg - ld).exp(),
        normalized: ln_norm.exp(),
        c_prime: c_prime(n)?,
        ratio_limit: ratio_limit(n)?,
        delta57: d,
    })
}

/// The record printed by the `theory --m --max` command.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    pub m: u32,
    #[serde(rename = "Q")]
    pub q: f64,
    pub all_main: f64,
    pub sq_lower: f64,
    pub sq_upper: f64,
}

pub fn theory_row(m: u32, q: f64) -> Result<TheoryRow> {
    let sq = predict_sq_count(m, q)?;
    Ok(TheoryRow {
        m,
        q,
        all_main: predict_all_count(m, q)?.value,
        sq_lower: sq.lower,
        sq_upper: sq.upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn w_values() {
        assert_eq!(w(0), BigRational::one());
        assert_eq!(w(1), BigRational::from_integer(2.into()));
        assert_eq!(w(2), BigRational::new(32.into(), 9.into()));
        assert!((0..=20).all(w_upper_bound_check));
    }

    #[test]
    fn eta_cases() {
        assert!(close(eta(100.0, 2), 10.0, 1e-15));
        assert!(close(eta(100.0, 3), 100f64.ln(), 1e-15));
        assert_eq!(eta(100.0, 7), 1.0);
    }

    #[test]
    fn zeta_values() {
        assert!(close(zeta(2.0).unwrap(), PI * PI / 6.0, 1e-14));
        assert!(close(zeta(4.0).unwrap(), PI.powi(4) / 90.0, 1e-14));
        assert!(close(zeta(1.5).unwrap(), 2.612_375_348_685_488, 1e-13));
        assert!(close(zeta(3.0).unwrap(), 1.202_056_903_159_594, 1e-14));
        assert!(zeta(1.0).is_err());
        assert!(close(
            squarefree_zeta(2.0).unwrap(),
            15.0 / (PI * PI),
            1e-14
        ));
        assert!(close(squarefree_zeta(1.5).unwrap(), 2.17325, 1e-5));
    }

    #[test]
    fn harmonic_small() {
        // 1 + 1/2 + 1/3 + 1/5 + 1/6 + 1/7 + 1/10
        assert_eq!(
            squarefree_harmonic(10),
            BigRational::new(171.into(), 70.into())
        );
        assert_eq!(squarefree_harmonic(1), BigRational::one());
        assert!(close(squarefree_harmonic_f64(10), 171.0 / 70.0, 1e-15));
    }

    #[test]
    fn predictions() {
        assert!(close(
            predict_sq_count(2, 100.0).unwrap().upper,
            4000.0 / 3.0,
            1e-12
        ));
        assert!(close(
            predict_all_count(3, 10.0).unwrap().value,
            32000.0 / 9.0,
            1e-12
        ));
        assert!(close(
            predict_all_count(1, 10.0).unwrap().value,
            10.0,
            1e-12
        ));
        let p = predict_sq_count(3, 50.0).unwrap();
        let want = 32.0 / 9.0 * 6.0 / (PI * PI) * 50f64.powf(1.5) * 50f64.ln();
        assert!(close(p.upper, want, 1e-12) && p.lower == p.upper);
        let p = predict_sq_count(4, 50.0).unwrap();
        assert!(close(p.lower / p.upper, 2f64.powi(-8), 1e-12));
        assert!(close(
            predict_P_m_alpha(3, 2, 10.0).unwrap(),
            32000.0 / 18.0,
            1e-12
        ));
        assert!(predict_P_m_alpha(3, 4, 10.0).is_err());
    }

    #[test]
    fn bound_report() {
        assert!(close(margulis_curve(2, 1.0), std::f64::consts::E, 1e-15));
        assert!(close(margulis_curve(4, 2.0), 6f64.exp() / 6.0, 1e-14));
        assert!(close(c_prime(4).unwrap(), 1.0 / 6.0, 1e-15));
        let r = mean_mult_bound(5, 3.0).unwrap();
        assert_eq!(r.delta57, 1);
        assert!(close(
            r.mean_mult_lower,
            r.gamma_h / r.distinct_lengths_bound,
            1e-12
        ));
        assert!(mean_mult_bound(3, 1.0).is_err());
    }
}
