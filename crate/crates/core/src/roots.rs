//! Polynomials over a local field: evaluation, Hensel lifting, root search
//! and the embeddings between fields they give rise to.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{cyclotomic_shifted, FieldElement, FieldKind, LocalField};

/// Horner evaluation of `Σ coeffs[k] X^k`.
pub fn poly_eval(coeffs: &[FieldElement], x: &FieldElement) -> FieldElement {
    let mut acc = coeffs.last().expect("nonempty polynomial").clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn poly_derivative(coeffs: &[FieldElement]) -> Vec<FieldElement> {
    if coeffs.len() <= 1 {
        return vec![coeffs[0].field().zero()];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul_int(&BigInt::from(k)))
        .collect()
}

fn min_prec(coeffs: &[FieldElement]) -> i64 {
    coeffs.iter().map(|c| c.prec()).min().unwrap_or(i64::MAX)
}

/// Newton iteration from `approx` to a root of `f`.
///
/// The root is determined to `P - v(f'(root))` where `P` is the smallest
/// coefficient precision; callers wanting a root at a given precision pass
/// coefficients with the corresponding headroom.
pub fn hensel_lift_root(f: &[FieldElement], approx: &FieldElement) -> Result<FieldElement> {
    if f.is_empty() || f.iter().any(|c| !c.same_field_as(approx)) {
        return Err(Error::FieldMismatch);
    }
    let pc = min_prec(f);
    let df = poly_derivative(f);
    let mut a = approx.lift_prec(pc);
    let fa = poly_eval(f, &a);
    let dfa = poly_eval(&df, &a);
    let vd = match dfa.val_pi() {
        Some(v) => v,
        None => {
            return Err(Error::NewtonConditionFailed {
                fa: fa.valuation().to_string(),
                dfa: "inf".into(),
            })
        }
    };
    if let Some(vf) = fa.val_pi() {
        if vf <= 2 * vd {
            return Err(Error::NewtonConditionFailed {
                fa: fa.valuation().to_string(),
                dfa: dfa.valuation().to_string(),
            });
        }
    }
    let target = pc - vd;
    for _ in 0..200 {
        let fa = poly_eval(f, &a);
        let dfa = poly_eval(&df, &a);
        let vf = match fa.val_pi() {
            Some(v) => v,
            None => return Ok(a.with_prec(target)),
        };
        if vf >= pc {
            return Ok(a.with_prec(target));
        }
        let step = fa.div(&dfa)?;
        a = (&a - &step).lift_prec(pc);
    }
    Err(Error::NonConvergence)
}

/// All roots in `k` of a monic polynomial with integral coefficients, found by
/// a residue-digit search followed by Hensel lifting. Coefficients should
/// carry enough precision for the requested roots.
pub fn roots_in_field(k: &LocalField, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let deg = f.len() - 1;
    let pc = min_prec(f);
    let df = poly_derivative(f);
    let reps = k.residue_representatives();
    let pi = k.uniformizer();
    let mut roots: Vec<FieldElement> = Vec::new();
    let mut frontier: Vec<(FieldElement, i64)> = vec![(k.zero().lift_prec(pc), 0)];
    let max_candidates = 200_000usize;
    let mut visited = 0usize;
    while let Some((base, level)) = frontier.pop() {
        if roots.len() >= deg {
            break;
        }
        let step = pi.pow(level as u64).lift_prec(pc);
        for r in &reps {
            visited += 1;
            if visited > max_candidates {
                return Err(Error::NonConvergence);
            }
            let cand = (&base + &(&r.lift_prec(pc) * &step)).lift_prec(pc);
            let val = poly_eval(f, &cand);
            let vf = val.val_pi().unwrap_or(i64::MAX);
            if vf < level + 1 {
                continue;
            }
            let vd = poly_eval(&df, &cand).val_pi();
            match vd {
                Some(vd) if vf > 2 * vd => {
                    let root = hensel_lift_root(f, &cand)?;
                    if !roots.iter().any(|x| x.eq_at_prec(&root)) {
                        roots.push(root);
                    }
                }
                _ => {
                    if level + 1 >= pc {
                        return Err(Error::NonConvergence);
                    }
                    frontier.push((cand, level + 1));
                }
            }
        }
    }
    roots.sort_by(|a, b| a.numerator().cmp(b.numerator()));
    Ok(roots)
}

/// Teichmüller representative of the residue class of `a` (the unique
/// (q−1)-th root of unity congruent to it). `a` must be a unit.
pub fn teichmuller(a: &FieldElement) -> Result<FieldElement> {
    let k = a.field();
    let q = k.q();
    if a.val_lower_bound() != 0 {
        return Err(Error::NotIntegral);
    }
    let mut poly = vec![k.zero(); q as usize - 1];
    poly[0] = k.from_int(-1);
    poly.push(k.one());
    hensel_lift_root(&poly, a)
}

/// A field map `source → target` given by the images of the generators.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    pub source: LocalField,
    pub target: LocalField,
    /// Image of the unramified generator `t` (unused when f = 1).
    pub t_image: FieldElement,
    /// Image of the uniformizer `π` (unused when e = 1).
    pub pi_image: FieldElement,
}

impl FieldEmbedding {
    fn basis_images(&self) -> Vec<FieldElement> {
        let (e, f) = (self.source.e(), self.source.f());
        let mut out = Vec::with_capacity(e * f);
        let mut pi_pow = self.target.one();
        for _ in 0..e {
            let mut t_pow = pi_pow.clone();
            for _ in 0..f {
                out.push(t_pow.clone());
                t_pow = &t_pow * &self.t_image;
            }
            pi_pow = &pi_pow * &self.pi_image;
        }
        out
    }

    /// Applies the embedding. Precision in target units is
    /// `prec · e_target / e_source`, capped by the precision of the images.
    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if !x.in_field(&self.source) {
            return Err(Error::FieldMismatch);
        }
        let ratio = (self.target.e() / self.source.e()) as i64;
        let images = self.basis_images();
        let num_prec = (x.prec() + (self.source.e() as i64) * x.shift() as i64).saturating_mul(ratio);
        let mut acc = self.target.zero().lift_prec(num_prec);
        for (c, img) in x.numerator().iter().zip(&images) {
            if !c.is_zero() {
                acc = &acc + &img.mul_int(c);
            }
        }
        let scale = num_traits::pow(self.source.p_big().clone(), x.shift() as usize);
        let acc = acc.div_int(&scale)?;
        Ok(acc.with_prec(x.prec().saturating_mul(ratio)))
    }

    /// Images of the power basis of the source.
    pub fn images_of_basis(&self) -> Vec<FieldElement> {
        self.basis_images()
    }

    pub fn is_identity(&self) -> bool {
        self.source.same_field(&self.target)
            && (self.source.f() == 1 || self.t_image.eq_at_prec(&self.target.unramified_generator()))
            && (self.source.e() == 1 || self.pi_image.eq_at_prec(&self.target.uniformizer()))
    }
}

fn lift_poly(k: &LocalField, coeffs: &[BigInt], prec: i64) -> Vec<FieldElement> {
    let kk = k.with_precision(prec);
    coeffs.iter().map(|c| kk.from_bigint(c)).collect()
}

/// All Q_p-algebra maps `l → k`. Fails with `InsufficientTarget` when `k`
/// does not contain enough conjugates. When `l` and `k` coincide the identity
/// is listed first.
pub fn embeddings(l: &LocalField, k: &LocalField) -> Result<Vec<FieldEmbedding>> {
    if l.p() != k.p() {
        return Err(Error::FieldMismatch);
    }
    let n = l.degree();
    let work = 2 * k.prec() + 8;
    let kw = k.with_precision(work);
    let need_e = l.e();
    let need_f = l.f();
    if k.e() % need_e != 0 || k.f() % need_f != 0 {
        return Err(Error::InsufficientTarget { found: 0, needed: n });
    }
    let t_images: Vec<FieldElement> = if l.f() == 1 {
        vec![k.zero()]
    } else {
        let g = lift_poly(k, l.unramified_poly(), work);
        roots_in_field(&kw, &g)?
    };
    let mut out = Vec::new();
    for tau in &t_images {
        let pi_images: Vec<FieldElement> = if l.e() == 1 {
            vec![k.from_bigint(l.p_big())]
        } else if let (Some(lk), Some(kk)) = (l.cyclotomic_level(), k.cyclotomic_level()) {
            if kk >= lk && l.kind() == FieldKind::Eisenstein {
                cyclotomic_conjugates(k, l.p(), lk, kk)
            } else {
                eisenstein_roots(l, k, tau, work)?
            }
        } else {
            eisenstein_roots(l, k, tau, work)?
        };
        for rho in pi_images {
            out.push(FieldEmbedding {
                source: l.clone(),
                target: k.clone(),
                t_image: tau.with_prec(k.prec()),
                pi_image: rho.with_prec(k.prec()),
            });
        }
    }
    if out.len() < n {
        return Err(Error::InsufficientTarget { found: out.len(), needed: n });
    }
    if let Some(pos) = out.iter().position(|emb| emb.is_identity()) {
        let id = out.remove(pos);
        out.insert(0, id);
    }
    Ok(out)
}

fn eisenstein_roots(l: &LocalField, k: &LocalField, tau: &FieldElement, work: i64) -> Result<Vec<FieldElement>> {
    let kw = k.with_precision(work);
    let tau_w = tau.lift_prec(work);
    let mut poly = Vec::new();
    for coeff in l.eisenstein_poly() {
        let mut acc = kw.zero();
        let mut t_pow = kw.one();
        for c in coeff {
            if !c.is_zero() {
                acc = &acc + &t_pow.mul_int(c);
            }
            t_pow = &t_pow * &tau_w;
        }
        poly.push(acc);
    }
    roots_in_field(&kw, &poly)
}

/// Roots of Φ_{p^lk}(X + 1) in the cyclotomic field of level `kk ≥ lk`:
/// `ζ^a − 1` for `ζ = (1 + π)^{p^{kk−lk}}` and `a` prime to p.
fn cyclotomic_conjugates(k: &LocalField, p: u32, lk: u32, kk: u32) -> Vec<FieldElement> {
    let order = (p as u64).pow(lk);
    let zeta = (&k.one() + &k.uniformizer()).pow((p as u64).pow(kk - lk));
    debug_assert_eq!(cyclotomic_shifted(p, lk).len() as u64, order - order / p as u64 + 1);
    (1..order)
        .filter(|a| a % p as u64 != 0)
        .map(|a| &zeta.pow(a) - &k.one())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teichmuller_lifts_are_roots_of_unity() {
        let k = LocalField::qp(7, 15).unwrap();
        for a in 1..7 {
            let w = teichmuller(&k.from_int(a)).unwrap();
            assert!(w.pow(6).is_one());
            assert!((&w - &k.from_int(a)).val_lower_bound() >= 1);
        }
    }

    #[test]
    fn square_root_of_one_plus_p() {
        let k = LocalField::qp(5, 20).unwrap();
        let f = vec![k.from_int(-6), k.zero(), k.one()];
        let r = hensel_lift_root(&f, &k.one()).unwrap();
        assert!(r.square().eq_at_prec(&k.from_int(6)));
        assert_eq!(r.prec(), 20);
    }

    #[test]
    fn exact_root_is_fixed_point() {
        let k = LocalField::qp(5, 20).unwrap();
        // (X - 3)(X - 4)
        let f = vec![k.from_int(12), k.from_int(-7), k.one()];
        let r = hensel_lift_root(&f, &k.from_int(3)).unwrap();
        assert!(r.eq_at_prec(&k.from_int(3)));
    }

    #[test]
    fn newton_condition_is_checked() {
        let k = LocalField::qp(5, 20).unwrap();
        // X^2 - 5 has no root near 0 satisfying the condition.
        let f = vec![k.from_int(-5), k.zero(), k.one()];
        assert!(matches!(
            hensel_lift_root(&f, &k.zero()),
            Err(Error::NewtonConditionFailed { .. })
        ));
    }

    #[test]
    fn ramified_quadratic_has_sign_embeddings() {
        let l = LocalField::eisenstein(5, &[-5, 0, 1], 20).unwrap();
        let embs = embeddings(&l, &l).unwrap();
        assert_eq!(embs.len(), 2);
        assert!(embs[0].is_identity());
        assert!(embs[1].pi_image.eq_at_prec(&(-&l.uniformizer())));
    }

    #[test]
    fn unramified_quadratic_embeddings_are_roots() {
        let l = LocalField::unramified(5, &[2, 0, 1], 20).unwrap();
        let embs = embeddings(&l, &l).unwrap();
        assert_eq!(embs.len(), 2);
        let g: Vec<FieldElement> = [2, 0, 1].iter().map(|c| l.from_int(*c)).collect();
        for emb in &embs {
            assert!(poly_eval(&g, &emb.t_image).is_zero());
        }
        let x = &l.unramified_generator() + &l.from_int(3);
        let y = &l.unramified_generator().square() + &l.from_int(11);
        for emb in &embs {
            let lhs = emb.apply(&(&x * &y)).unwrap();
            let rhs = &emb.apply(&x).unwrap() * &emb.apply(&y).unwrap();
            assert!(lhs.eq_at_prec(&rhs));
        }
    }

    #[test]
    fn base_field_has_one_embedding_and_small_target_fails() {
        let q = LocalField::qp(5, 10).unwrap();
        let l = LocalField::eisenstein(5, &[-5, 0, 1], 10).unwrap();
        assert_eq!(embeddings(&q, &l).unwrap().len(), 1);
        assert!(matches!(embeddings(&l, &q), Err(Error::InsufficientTarget { .. })));
        // Q_5(sqrt 10) does not contain sqrt 5.
        let l2 = LocalField::eisenstein(5, &[-10, 0, 1], 10).unwrap();
        assert!(matches!(embeddings(&l, &l2), Err(Error::InsufficientTarget { .. })));
    }

    #[test]
    fn cyclotomic_embeddings_are_galois_conjugates() {
        let k = LocalField::cyclotomic(5, 1, 24).unwrap();
        let embs = embeddings(&k, &k).unwrap();
        assert_eq!(embs.len(), 4);
        assert!(embs[0].is_identity());
        let zeta = &k.one() + &k.uniformizer();
        for emb in &embs {
            assert!(emb.apply(&zeta).unwrap().pow(5).is_one());
        }
    }
}
