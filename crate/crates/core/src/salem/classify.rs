use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{
    cauchy_bound, certified_real, complex_roots, refine_real_root, HpComplex, HpReal, IntPoly,
    PalindromicPoly, RootEnclosure, TracePoly,
};

use super::cyclotomic::cyclotomic_order;
use super::shape::{Shape, ShapeTest};

pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Largest degree accepted by [`is_irreducible`].
pub const IRREDUCIBILITY_DEGREE_CAP: usize = 24;

/// A certified Salem number: its minimal polynomial and an enclosure of the
/// root above 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SalemRecord {
    pub min_poly: PalindromicPoly,
    pub lambda: RootEnclosure,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Salem(SalemRecord),
    Cyclotomic { order: u64 },
    ReducibleOrOther,
}

impl Classification {
    pub fn is_salem(&self) -> bool {
        matches!(self, Classification::Salem(_))
    }

    pub fn salem(self) -> Option<SalemRecord> {
        match self {
            Classification::Salem(s) => Some(s),
            _ => None,
        }
    }
}

impl SalemRecord {
    /// Builds the record for a trace polynomial already known to be a Salem
    /// trace; only the enclosure of `λ` is computed.
    pub(crate) fn from_certified_trace(trace: TracePoly, precision_bits: u32) -> SalemRecord {
        let m = trace.degree();
        let min_poly = trace.trace_inverse();
        let lambda = lambda_enclosure(min_poly.as_poly(), precision_bits);
        SalemRecord {
            min_poly,
            lambda,
            m,
        }
    }

    pub fn trace_poly(&self) -> TracePoly {
        self.min_poly.trace_transform()
    }

    pub fn degree(&self) -> usize {
        2 * self.m
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.center.re.to_f64()
    }

    pub fn lambda_hp(&self) -> &HpReal {
        &self.lambda.center.re
    }

    /// `lambda_approx, m, p_0, p_1, ..., p_2m`.
    pub fn record_line(&self) -> String {
        let coeffs: Vec<String> = self
            .min_poly
            .as_poly()
            .coeffs()
            .iter()
            .map(ToString::to_string)
            .collect();
        format!(
            "{:.15}, {}, {}",
            self.lambda.center.re,
            self.m,
            coeffs.join(", ")
        )
    }

    /// Ordering by `λ`, ties (never expected) broken by coefficients.
    pub fn cmp_by_lambda(&self, other: &SalemRecord) -> Ordering {
        self.lambda
            .center
            .re
            .with_bits(64)
            .cmp(&other.lambda.center.re.with_bits(64))
            .then_with(|| self.min_poly.cmp(&other.min_poly))
    }
}

impl fmt::Display for SalemRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.record_line())
    }
}

/// Parses a record line back into `(lambda_approx, m, polynomial)`.
pub fn parse_record_line(line: &str) -> Result<(f64, usize, IntPoly)> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() < 4 {
        return Err(Error::parse(0, "record needs lambda, m and coefficients"));
    }
    let lambda: f64 = fields[0]
        .parse()
        .map_err(|_| Error::parse(0, format!("bad lambda {:?}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| Error::parse(0, format!("bad m {:?}", fields[1])))?;
    let coeffs = fields[2..]
        .iter()
        .map(|c| c.parse::<BigInt>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::parse(0, "bad coefficient"))?;
    let p = IntPoly::new(coeffs);
    if p.degree() != Some(2 * m) {
        return Err(Error::parse(0, "degree does not match m"));
    }
    Ok((lambda, m, p))
}

/// Enclosure of the unique root above 1 of a Salem polynomial.
pub(crate) fn lambda_enclosure(p: &IntPoly, bits: u32) -> RootEnclosure {
    // Only one root lies in (1, inf) and p(1) != 0; bound it by Cauchy.
    let hi = HpReal::from_int(&cauchy_bound(p), 64);
    let lo = HpReal::from_i64(1, 64);
    refine_real_root(p, &lo, &hi, bits).expect("Salem polynomial changes sign on (1, bound)")
}

/// Decides whether a monic integer polynomial is the minimal polynomial of a
/// Salem number (degree 2 admitted).
pub fn classify(p: &IntPoly) -> Result<Classification> {
    classify_with_bits(p, DEFAULT_PRECISION_BITS)
}

pub fn classify_with_bits(p: &IntPoly, precision_bits: u32) -> Result<Classification> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if !p.is_monic() {
        return Err(Error::NotMonic(p.leading().unwrap().to_string()));
    }
    if deg < 2 {
        return Err(Error::DegreeTooSmall {
            degree: deg,
            min: 2,
        });
    }
    if let Some(order) = cyclotomic_order(p) {
        return Ok(Classification::Cyclotomic { order });
    }
    if deg % 2 != 0 || !p.is_palindromic() || !p.is_squarefree() {
        return Ok(Classification::ReducibleOrOther);
    }
    let pal = PalindromicPoly::new(p.clone())?;
    let trace = pal.trace_transform();
    let m = trace.degree();
    // Endpoint roots mean p(±1) = 0.
    if trace.as_poly().eval(&BigInt::from(2)).is_zero()
        || trace.as_poly().eval(&BigInt::from(-2)).is_zero()
    {
        return Ok(Classification::ReducibleOrOther);
    }
    // With X = +inf replaced by a bound beyond every root.
    let bound = trace
        .as_poly()
        .coeffs()
        .iter()
        .map(|c| c.abs())
        .sum::<BigInt>()
        + BigInt::from(3);
    let test = ShapeTest::new(m, bound, BigInt::one());
    match test.test(trace.as_poly().coeffs()).unwrap() {
        Shape::Salem => Ok(Classification::Salem(SalemRecord::from_certified_trace(
            trace,
            precision_bits,
        ))),
        _ => Ok(Classification::ReducibleOrOther),
    }
}

/// Whether `p` admits no factorization into monic integer polynomials of
/// positive degree.
///
/// Works by factor reconstruction from certified complex roots: every subset
/// of roots closed under conjugation whose elementary symmetric functions are
/// near integers is tested by exact division.
pub fn is_irreducible(p: &IntPoly) -> Result<bool> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    if !p.is_monic() {
        return Err(Error::NotMonic(p.leading().unwrap().to_string()));
    }
    if deg > IRREDUCIBILITY_DEGREE_CAP {
        return Err(Error::DegreeCap {
            degree: deg,
            cap: IRREDUCIBILITY_DEGREE_CAP,
        });
    }
    if deg <= 1 {
        return Ok(true);
    }
    if !p.is_squarefree() {
        return Ok(false);
    }
    let mut bits = 128;
    loop {
        match factor_search(p, bits) {
            Ok(Some(found)) => return Ok(!found),
            Ok(None) | Err(Error::CertificationFailed { .. }) if bits < 4096 => bits *= 2,
            Ok(None) => return Err(Error::PrecisionExhausted { bits }),
            Err(e) => return Err(e),
        }
    }
}

/// A real root or a conjugate pair, the smallest units a rational factor can
/// take.
struct Atom {
    roots: Vec<HpComplex>,
    sum: f64,
}

fn atoms(roots: &[RootEnclosure]) -> Vec<Atom> {
    let real = certified_real(roots);
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if real[i] {
            out.push(Atom {
                roots: vec![HpComplex::real(roots[i].center.re.clone())],
                sum: roots[i].approx().re,
            });
            continue;
        }
        let target = roots[i].approx().conj();
        let j = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (roots[a].approx() - target).norm();
                let db = (roots[b].approx() - target).norm();
                da.total_cmp(&db)
            })
            .expect("complex roots of a real polynomial pair up");
        used[j] = true;
        let z = &roots[i].center;
        out.push(Atom {
            roots: vec![z.clone(), z.conj()],
            sum: 2.0 * roots[i].approx().re,
        });
    }
    out
}

/// `Some(true)` if a proper factor exists, `Some(false)` if none, `None` when
/// a rounding was ambiguous at this precision.
fn factor_search(p: &IntPoly, bits: u32) -> Result<Option<bool>> {
    let deg = p.degree().unwrap();
    let roots = complex_roots(p, bits)?;
    let atoms = atoms(&roots);
    let k = atoms.len();
    let scale: f64 = roots.iter().map(|r| r.approx().norm()).sum::<f64>() + 1.0;
    let screen = 1e-6 * scale;
    let mut ambiguous = false;
    // Gray-code walk over subsets keeps the root sum incremental.
    let mut in_set = vec![false; k];
    let mut sum = 0.0f64;
    let mut size = 0usize;
    for step in 1u64..(1u64 << k) {
        let flip = step.trailing_zeros() as usize;
        in_set[flip] = !in_set[flip];
        let a = &atoms[flip];
        if in_set[flip] {
            sum += a.sum;
            size += a.roots.len();
        } else {
            sum -= a.sum;
            size -= a.roots.len();
        }
        if size == 0 || 2 * size > deg || (sum - sum.round()).abs() > screen {
            continue;
        }
        let chosen: Vec<&HpComplex> = (0..k)
            .filter(|&i| in_set[i])
            .flat_map(|i| atoms[i].roots.iter())
            .collect();
        match round_product(&chosen, bits) {
            Rounded::Integer(f) => {
                if p.exact_divide(&f)?.is_some() {
                    return Ok(Some(true));
                }
            }
            Rounded::Ambiguous => ambiguous = true,
            Rounded::Far => {}
        }
    }
    Ok(if ambiguous { None } else { Some(false) })
}

enum Rounded {
    Integer(IntPoly),
    Ambiguous,
    Far,
}

fn round_product(roots: &[&HpComplex], bits: u32) -> Rounded {
    let mut acc = vec![HpComplex::real(HpReal::from_i64(1, bits))];
    for r in roots {
        let mut next = vec![HpComplex::zero(bits); acc.len() + 1];
        for (j, c) in acc.iter().enumerate() {
            next[j + 1] = &next[j + 1] + c;
            next[j] = &next[j] - &(c * *r);
        }
        acc = next;
    }
    let tight = HpReal::pow2_neg(bits / 2, bits);
    let loose = HpReal::pow2_neg(8, bits);
    let mut coeffs = Vec::with_capacity(acc.len());
    let mut ambiguous = false;
    for c in &acc {
        let (n, dist) = c.re.round_to_int();
        let off = dist.max(c.im.abs());
        if off > loose {
            return Rounded::Far;
        }
        if off > tight {
            ambiguous = true;
        }
        coeffs.push(n);
    }
    if ambiguous {
        Rounded::Ambiguous
    } else {
        Rounded::Integer(IntPoly::new(coeffs))
    }
}

/// Height test `λ <= Q` for a certified record, exact.
pub fn lambda_at_most(record: &SalemRecord, q: &BigRational) -> bool {
    if q <= &BigRational::one() {
        return false;
    }
    let x = q + q.recip();
    record.trace_poly().as_poly().sign_at_rational(&x) >= 0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    const LEHMER: [i64; 11] = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];

    #[test]
    fn classify_examples() {
        match classify(&p(&[1, -3, 1])).unwrap() {
            Classification::Salem(s) => {
                assert_eq!(s.m, 1);
                assert!((s.lambda_f64() - 2.618_033_988_749_895).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            classify(&p(&[1, 1, 1])).unwrap(),
            Classification::Cyclotomic { order: 3 }
        );
        assert_eq!(
            classify(&p(&[1, 0, -3, 0, 1])).unwrap(),
            Classification::ReducibleOrOther
        );
        assert_eq!(
            classify(&p(&[-2, 0, 0, 1])).unwrap(),
            Classification::ReducibleOrOther
        );
        let lehmer = classify(&p(&LEHMER)).unwrap().salem().unwrap();
        assert_eq!(lehmer.m, 5);
        assert!((lehmer.lambda_f64() - 1.176_280_818_259_917).abs() < 1e-14);
    }

    #[test]
    fn classify_rejects_bad_input() {
        assert!(matches!(
            classify(&p(&[2, 1])),
            Err(Error::DegreeTooSmall { .. })
        ));
        assert!(matches!(classify(&p(&[1, 0, 2])), Err(Error::NotMonic(_))));
    }

    #[test]
    fn salem_times_cyclotomic_is_reducible() {
        let f = p(&[1, -3, 1]).multiply(&p(&[1, 1, 1]));
        assert_eq!(classify(&f).unwrap(), Classification::ReducibleOrOther);
        let g = p(&[1, -3, 1]).multiply(&p(&[1, -3, 1]));
        assert_eq!(classify(&g).unwrap(), Classification::ReducibleOrOther);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&p(&[1, -3, 1])).unwrap());
        assert!(!is_irreducible(&p(&[1, 0, -3, 0, 1])).unwrap());
        assert!(is_irreducible(&p(&LEHMER)).unwrap());
        assert!(!is_irreducible(&p(&[-1, 0, 0, 0, 1])).unwrap());
        assert!(!is_irreducible(&p(&[4, 0, 0, 0, 1])).unwrap()); // Sophie Germain
        assert!(is_irreducible(&p(&[-2, 0, 0, 1])).unwrap());
        assert!(!is_irreducible(&p(&[1, 2, 1])).unwrap());
    }

    #[test]
    fn irreducibility_cap() {
        let mut c = vec![0i64; 26];
        c[0] = 1;
        c[25] = 1;
        assert!(matches!(
            is_irreducible(&p(&c)),
            Err(Error::DegreeCap { .. })
        ));
    }

    #[test]
    fn record_line_round_trip() {
        let s = classify(&p(&[1, -3, 1])).unwrap().salem().unwrap();
        let line = s.record_line();
        assert_eq!(line, "2.618033988749895, 1, 1, -3, 1");
        let (lambda, m, poly) = parse_record_line(&line).unwrap();
        assert_eq!(m, 1);
        assert_eq!(poly, p(&[1, -3, 1]));
        assert!((lambda - 2.618033988749895).abs() < 1e-15);
    }

    #[test]
    fn height_test() {
        let s = classify(&p(&[1, -10, 1])).unwrap().salem().unwrap();
        let q = |n: i64| BigRational::from_integer(n.into());
        assert!(lambda_at_most(&s, &q(10)));
        assert!(!lambda_at_most(&s, &q(9)));
    }
}
