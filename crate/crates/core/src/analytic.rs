//! The p-adic logarithm and exponential as truncated power series with
//! explicit tail bounds.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::FieldElement;

fn vp_u64(mut n: u64, p: u64) -> i64 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Largest `n` whose log-series term `y^n/n` may still fall below `target`,
/// for `v(y) = v` in π-units. Terms beyond it are provably `≥ target`.
fn log_terms(v: i64, e: i64, p: u64, target: i64) -> u64 {
    // n v − e log_p(n) is increasing once n v grows faster than e log_p n; scan
    // until n v − e (⌊log_p n⌋ + 1) clears the target for a full p-adic decade.
    let mut last_bad = 0u64;
    let mut n = 1u64;
    let mut log_n = 0i64;
    let mut next_pow = p;
    loop {
        if n == next_pow {
            log_n += 1;
            next_pow = next_pow.saturating_mul(p);
        }
        if (n as i64) * v - e * vp_u64(n, p) < target {
            last_bad = n;
        }
        if (n as i64) * v - e * (log_n + 1) >= target && (n as i64) * v >= 2 * e && n > 2 * last_bad.max(1) {
            return last_bad;
        }
        n += 1;
    }
}

/// `log(x) = Σ_{n≥1} (−1)^{n+1} (x−1)^n / n` for `v(x − 1) > 0`.
///
/// The returned precision is the smaller of the input precision and what
/// survives the divisions by `n`.
pub fn padic_log(x: &FieldElement) -> Result<FieldElement> {
    let k = x.field();
    let y = x - &k.one();
    let target = x.prec();
    let v = y.val_lower_bound();
    if v <= 0 {
        return Err(Error::OutsideDomain(format!("v(x - 1) = {} <= 0", y.valuation())));
    }
    if y.is_zero() {
        return Ok(k.zero().with_prec(target));
    }
    let e = x.e() as i64;
    let p = x.p() as u64;
    let terms = log_terms(v, e, p, target);
    let mut acc = k.zero().lift_prec(target);
    let mut power = y.clone();
    for n in 1..=terms.max(1) {
        let term = power.div_int(&BigInt::from(n))?;
        acc = if n % 2 == 1 { &acc + &term } else { &acc - &term };
        power = &power * &y;
    }
    Ok(acc)
}

/// `exp(x) = Σ x^n / n!` for `v(x) > 1/(p − 1)`.
pub fn padic_exp(x: &FieldElement) -> Result<FieldElement> {
    let k = x.field();
    let e = x.e() as i64;
    let p = x.p() as i64;
    let target = x.prec();
    let v = x.val_lower_bound();
    if (p - 1) * v <= e {
        return Err(Error::OutsideDomain(format!(
            "v(x) = {} <= 1/{}",
            x.valuation(),
            p - 1
        )));
    }
    if x.is_zero() {
        return Ok(k.one().with_prec(target));
    }
    // v(x^n/n!) ≥ n v − e (n − 1)/(p − 1); stop once that reaches the target.
    let slope = (p - 1) * v - e;
    let need = (target * (p - 1) - e + slope - 1).div_euclid(slope).max(1);
    let mut acc = k.one().lift_prec(target);
    let mut term = k.one().lift_prec(target);
    for n in 1..=need {
        term = (&term * x).div_int(&BigInt::from(n))?;
        acc = &acc + &term;
    }
    Ok(acc.with_prec(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::LocalField;
    use crate::valuation::PValuation;

    #[test]
    fn log_of_one_is_zero() {
        let k = LocalField::qp(5, 12).unwrap();
        let l = padic_log(&k.one()).unwrap();
        assert!(l.is_zero());
    }

    #[test]
    fn log_homomorphism_on_six() {
        let k = LocalField::qp(5, 12).unwrap();
        let x = k.from_int(6);
        let l1 = padic_log(&x).unwrap();
        assert_eq!(l1.valuation(), PValuation::integer(1));
        let l2 = padic_log(&x.square()).unwrap();
        assert!(l2.eq_at_prec(&l1.mul_int(&BigInt::from(2))));
        assert_eq!(l1.prec(), 12);
    }

    #[test]
    fn log_kills_roots_of_unity() {
        let k = LocalField::cyclotomic(5, 1, 40).unwrap();
        let zeta = k.primitive_root_of_unity(1).unwrap();
        let l = padic_log(&zeta).unwrap();
        assert!(l.is_zero(), "{l}");
        assert!(l.prec() >= 30);
    }

    #[test]
    fn exp_domain() {
        let k = LocalField::qp(5, 12).unwrap();
        assert!(matches!(padic_exp(&k.one()), Err(Error::OutsideDomain(_))));
        assert!(padic_exp(&k.zero()).unwrap().is_one());
        let x = k.from_int(26);
        let back = padic_exp(&padic_log(&x).unwrap()).unwrap();
        assert!(back.eq_at_prec(&x));
        assert!(back.prec() >= 10);
    }

    #[test]
    fn log_series_matches_a_mod_p_power_oracle() {
        // Independent oracle: log(1+p) over Q with rational summation, reduced mod p^10.
        use num_rational::BigRational;
        use num_traits::{One, Zero};
        let p = 5i64;
        let mut sum = BigRational::zero();
        let y = BigRational::from_integer(BigInt::from(p));
        let mut pow = BigRational::one();
        for n in 1..60i64 {
            pow = &pow * &y;
            let term = &pow / BigRational::from_integer(BigInt::from(n));
            if n % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let modulus = num_traits::pow(BigInt::from(p), 10);
        let den_inv = crate::field::mod_inverse(sum.denom(), &modulus).unwrap();
        let expected = (sum.numer() * den_inv) % &modulus;
        let k = LocalField::qp(5, 10).unwrap();
        let got = padic_log(&k.from_int(1 + p)).unwrap();
        assert!(got.eq_at_prec(&k.from_bigint(&expected)));
    }
}
