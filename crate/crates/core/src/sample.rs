//! Seeded random generators for property sweeps.

use num_bigint::{BigInt, RandBigInt};
use rand::Rng;

use crate::amice::AmiceDistribution;
use crate::analytic::padic_exp;
use crate::charvar::{Character, DifferentialCondition};
use crate::error::Result;
use crate::field::{FieldElement, LocalField};
use crate::linalg::{self, Matrix};

/// Uniform integer in `[0, p^digits)`.
pub fn random_digits<R: Rng>(rng: &mut R, p: u32, digits: u32) -> BigInt {
    let bound = num_traits::pow(BigInt::from(p), digits as usize);
    rng.gen_bigint_range(&BigInt::from(0), &bound)
}

/// An element of Z_p ⊆ k, uniform modulo `p^digits`.
pub fn random_zp<R: Rng>(k: &LocalField, rng: &mut R, digits: u32) -> FieldElement {
    k.from_bigint(&random_digits(rng, k.p(), digits))
}

/// An element of O_k with every power-basis coordinate uniform modulo `p^digits`.
pub fn random_integral<R: Rng>(k: &LocalField, rng: &mut R, digits: u32) -> FieldElement {
    let coords: Vec<BigInt> = (0..k.degree()).map(|_| random_digits(rng, k.p(), digits)).collect();
    k.from_coords(&coords).expect("coordinate count matches the degree")
}

/// `1 + π^v u` with `u` integral, so `v(z − 1) ≥ v` in π-units.
pub fn random_near_one<R: Rng>(k: &LocalField, rng: &mut R, v: u32, digits: u32) -> FieldElement {
    let u = random_integral(k, rng, digits);
    &k.one() + &(&k.uniformizer().pow(v as u64) * &u)
}

/// A random `d × r` integral matrix of full column rank.
pub fn random_full_rank<R: Rng>(k: &LocalField, rng: &mut R, d: usize, r: usize, digits: u32) -> Result<Matrix> {
    loop {
        let m: Matrix = (0..d).map(|_| (0..r).map(|_| random_integral(k, rng, digits)).collect()).collect();
        if r == 0 || linalg::rank(&m, k)? == r {
            return Ok(m);
        }
    }
}

/// A random condition of rank `r` with integral basis.
pub fn random_condition<R: Rng>(k: &LocalField, rng: &mut R, d: usize, r: usize, digits: u32) -> Result<DifferentialCondition> {
    if r == 0 {
        return Ok(DifferentialCondition::zero(k, d));
    }
    DifferentialCondition::new(k, d, random_full_rank(k, rng, d, r, digits)?)
}

/// A character of W: `z = exp(p B w)` times an optional finite-order part
/// `ζ^c` (which has logarithm zero).
pub fn random_member<R: Rng>(
    w: &DifferentialCondition,
    rng: &mut R,
    zeta: Option<&FieldElement>,
    order: u64,
    digits: u32,
) -> Result<Character> {
    let k = &w.field;
    let coords: Vec<FieldElement> = (0..w.rank()).map(|_| random_integral(k, rng, digits)).collect();
    let p = k.from_int(k.p() as i64);
    let mut z = Vec::with_capacity(w.d);
    for row in &w.basis {
        let y = row.iter().zip(&coords).fold(k.zero(), |acc, (b, c)| &acc + &(b * c));
        let mut zi = padic_exp(&(&p * &y))?;
        if let Some(zeta) = zeta {
            zi = &zi * &zeta.pow(rng.gen_range(0..order));
        }
        z.push(zi);
    }
    Character::new(k, z)
}

/// A character with `z_i = 1 + π u_i`.
pub fn random_character<R: Rng>(k: &LocalField, rng: &mut R, d: usize, digits: u32) -> Result<Character> {
    Character::new(k, (0..d).map(|_| random_near_one(k, rng, 1, digits)).collect())
}

/// A distribution with Amice coefficients uniform in O_k modulo `p^digits`.
pub fn random_distribution<R: Rng>(k: &LocalField, rng: &mut R, d: usize, m: usize, digits: u32) -> Result<AmiceDistribution> {
    let len = m.pow(d as u32);
    AmiceDistribution::from_coeffs(k, d, m, (0..len).map(|_| random_integral(k, rng, digits)).collect())
}
