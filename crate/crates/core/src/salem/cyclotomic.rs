//! Cyclotomic polynomials and trial division by them.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;

use crate::poly::{IntPoly, PalindromicPoly};

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn cache() -> &'static Mutex<HashMap<u64, IntPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Φ_d = (x^d - 1) / prod_{e | d, e < d} Φ_e`, memoized per process.
pub fn cyclotomic(d: u64) -> IntPoly {
    assert!(d >= 1, "cyclotomic order must be positive");
    if let Some(p) = cache().lock().unwrap().get(&d) {
        return p.clone();
    }
    let mut num = IntPoly::monomial(d as usize);
    num = &num - &IntPoly::one();
    for e in (1..d).filter(|e| d % e == 0) {
        num = num
            .exact_divide(&cyclotomic(e))
            .expect("nonzero divisor")
            .expect("cyclotomic factor divides x^d - 1");
    }
    cache().lock().unwrap().insert(d, num.clone());
    num
}

/// Every order `d` with `φ(d) <= n`, ascending. Uses `φ(d) >= sqrt(d/2)`.
pub fn orders_with_phi_at_most(n: u64) -> Vec<u64> {
    (1..=2 * n * n + 2).filter(|&d| euler_phi(d) <= n).collect()
}

/// The smallest `d <= max_order` with `Φ_d | p`, together with `Φ_d`.
pub fn cyclotomic_factor(p: &IntPoly, max_order: u64) -> Option<(u64, IntPoly)> {
    let deg = p.degree()? as u64;
    (1..=max_order)
        .filter(|&d| euler_phi(d) <= deg)
        .find_map(|d| {
            let phi = cyclotomic(d);
            match p.exact_divide(&phi) {
                Ok(Some(_)) => Some((d, phi)),
                _ => None,
            }
        })
}

/// Trace polynomials of `Φ_d` for `d >= 3` with `φ(d) / 2 <= max_degree`,
/// ordered by `d`. `Φ_1` and `Φ_2` correspond to the trace values `±2` and
/// are handled by endpoint evaluation instead.
pub(crate) fn cyclotomic_traces(max_degree: usize) -> Vec<(u64, IntPoly)> {
    orders_with_phi_at_most(2 * max_degree as u64)
        .into_iter()
        .filter(|&d| d >= 3)
        .map(|d| {
            let p = PalindromicPoly::new(cyclotomic(d)).expect("Φ_d is palindromic for d >= 3");
            (d, p.trace_transform().into_poly())
        })
        .collect()
}

/// Whether `p` equals some `Φ_d`; returns the order.
pub(crate) fn cyclotomic_order(p: &IntPoly) -> Option<u64> {
    let deg = p.degree()? as u64;
    if !p.leading().is_some_and(One::is_one) {
        return None;
    }
    orders_with_phi_at_most(deg)
        .into_iter()
        .filter(|&d| euler_phi(d) == deg)
        .find(|&d| &cyclotomic(d) == p)
}
