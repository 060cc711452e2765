//! Dense polynomials over the prime field F_p, used to validate unramified
//! defining polynomials.

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime; Fermat.
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut k: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while k > 0 {
        if k & 1 == 1 {
            r = ((r as u128 * a as u128) % p as u128) as u64;
        }
        a = ((a as u128 * a as u128) % p as u128) as u64;
        k >>= 1;
    }
    r
}

/// Reduces a polynomial with signed integer coefficients modulo p.
pub fn reduce_coeffs(coeffs: &[i128], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = coeffs
        .iter()
        .map(|c| c.rem_euclid(p as i128) as u64)
        .collect();
    trim(&mut out);
    out
}

pub fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] as u128 * lead_inv as u128 % p as u128) as u64;
        if c != 0 {
            for (i, mi) in m.iter().enumerate() {
                let idx = dr - dm + i;
                r[idx] = ((r[idx] as u128 + p as u128 * p as u128 - c as u128 * *mi as u128)
                    % p as u128) as u64;
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + *x as u128 * *y as u128) % p as u128) as u64;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test for a polynomial over F_p of degree >= 1.
pub fn is_irreducible(g: &[u64], p: u64) -> bool {
    let mut g = g.to_vec();
    trim(&mut g);
    if g.len() < 2 {
        return false;
    }
    let deg = g.len() - 1;
    if deg == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut h = x.clone();
    for _ in 0..deg / 2 {
        // h <- h^p mod g
        let mut acc = vec![1u64];
        let mut base = h.clone();
        let mut k = p;
        while k > 0 {
            if k & 1 == 1 {
                acc = poly_mul_mod(&acc, &base, &g, p);
            }
            base = poly_mul_mod(&base, &base, &g, p);
            k >>= 1;
        }
        h = acc;
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let gcd = poly_gcd(&g, &diff, p);
        if gcd.len() != 1 {
            return false;
        }
    }
    true
}

/// Roots of `g` in F_p by exhaustive search.
pub fn roots_mod_p(g: &[u64], p: u64) -> Vec<u64> {
    (0..p)
        .filter(|x| {
            let mut acc = 0u128;
            for c in g.iter().rev() {
                acc = (acc * *x as u128 + *c as u128) % p as u128;
            }
            acc == 0
        })
        .collect()
}

/// Smallest monic irreducible polynomial of degree `f` over F_p in
/// lexicographic order of its lower coefficients.
pub fn first_irreducible(p: u64, f: usize) -> Vec<u64> {
    let total = (p as u128).pow(f as u32);
    for code in 0..total {
        let mut c = code;
        let mut poly = Vec::with_capacity(f + 1);
        for _ in 0..f {
            poly.push((c % p as u128) as u64);
            c /= p as u128;
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_irreducibility_matches_root_search() {
        for p in [2u64, 3, 5, 7] {
            for a in 0..p {
                for b in 0..p {
                    let g = vec![a, b, 1];
                    assert_eq!(is_irreducible(&g, p), roots_mod_p(&g, p).is_empty());
                }
            }
        }
    }

    #[test]
    fn quartic_product_of_quadratics_is_reducible() {
        // (x^2+2)(x^2+3) over F_5: no roots but reducible
        let g = reduce_coeffs(&[6, 0, 5, 0, 1], 5);
        assert!(roots_mod_p(&g, 5).is_empty());
        assert!(!is_irreducible(&g, 5));
        assert!(is_irreducible(&first_irreducible(5, 4), 5));
    }
}
