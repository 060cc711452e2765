//! Points of Z_p and the integer combinatorics (binomials, Stirling numbers)
//! that the Mahler and Amice transforms are built on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};

/// An element of Z_p known modulo `p^digits`, stored as a representative
/// in `[0, p^digits)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpPoint {
    pub value: BigInt,
    pub digits: i64,
}

impl ZpPoint {
    pub fn new(value: BigInt, digits: i64, p: u32) -> Self {
        let m = num_traits::pow(BigInt::from(p), digits.max(0) as usize);
        ZpPoint { value: value.mod_floor(&m), digits }
    }

    /// Reads a field element that must lie in Z_p.
    pub fn from_element(x: &FieldElement) -> Result<Self> {
        let (v, digits) = x.as_zp()?;
        Ok(ZpPoint::new(v, digits, x.p()))
    }
}

/// Reads a tuple of field elements as a point of Z_p^d.
pub fn zp_tuple(xs: &[FieldElement]) -> Result<Vec<ZpPoint>> {
    xs.iter().map(ZpPoint::from_element).collect()
}

/// `⌊log_p n⌋` for `n ≥ 1`.
pub fn floor_log(n: u64, p: u64) -> i64 {
    let mut k = 0;
    let mut m = n;
    while m >= p {
        m /= p;
        k += 1;
    }
    k
}

pub fn vp_u64(mut n: u64, p: u64) -> i64 {
    if n == 0 {
        return i64::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn vp_big(n: &BigInt, p: u32) -> i64 {
    if n.is_zero() {
        return i64::MAX;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Exact `binom(x, n)` for an arbitrary integer `x`.
pub fn binomial_big(x: &BigInt, n: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        num *= x - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// `binom(x, n)` as an element of `k`, where `x` is known mod `p^digits`.
/// The result is known to `digits − ⌊log_p n⌋` p-adic digits.
pub fn binomial_at(k: &LocalField, x: &ZpPoint, n: u64) -> FieldElement {
    let loss = if n == 0 { 0 } else { floor_log(n, k.p() as u64) };
    let digits = if n == 0 { i64::MAX / (4 * k.e() as i64) } else { x.digits - loss };
    k.from_bigint(&binomial_big(&x.value, n))
        .lift_prec(k.prec())
        .with_prec(digits.saturating_mul(k.e() as i64))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Stirling numbers of the second kind `S(n, j)` for `0 ≤ j ≤ n < size`.
pub fn stirling2_table(size: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); size]; size];
    if size == 0 {
        return s;
    }
    s[0][0] = BigInt::one();
    for n in 1..size {
        for j in 1..=n {
            s[n][j] = &s[n - 1][j - 1] + BigInt::from(j) * &s[n - 1][j];
        }
    }
    s
}

/// Signed Stirling numbers of the first kind `s(n, j)`:
/// `x(x−1)···(x−n+1) = Σ_j s(n, j) x^j`.
pub fn stirling1_table(size: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); size]; size];
    if size == 0 {
        return s;
    }
    s[0][0] = BigInt::one();
    for n in 1..size {
        for j in 1..=n {
            s[n][j] = &s[n - 1][j - 1] - BigInt::from(n - 1) * &s[n - 1][j];
        }
    }
    s
}

/// Base-p digits of a nonnegative integer, little endian.
pub fn digits_of(x: &BigInt, p: u32) -> Result<Vec<u32>> {
    if x.is_negative() {
        return Err(Error::InvalidInput("negative value has no digit expansion".into()));
    }
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    let mut m = x.clone();
    while !m.is_zero() {
        let (q, r) = m.div_rem(&pb);
        out.push(u32::try_from(&r).expect("digit fits"));
        m = q;
    }
    Ok(out)
}
