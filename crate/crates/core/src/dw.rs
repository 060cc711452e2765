//! Truncated D_W distributions: the values of a distribution on the dense
//! family of functions `1_{a + p^m T}(x) · Π_k β_k(x − a)^{α_k}`, where the
//! `β_k` are the basis functionals of W and `|α| ≤ D`.
//!
//! Values are computed from Amice coefficients through exact integer Mahler
//! expansions of the coset-localized monomials. The Mahler coefficients of a
//! function that is periodic mod p^m are annihilated by
//! `(1 + Δ)^{p^m} − 1`, which gives the explicit lower bound [`periodic_bound`]
//! for the part of the expansion cut off by the truncation.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::amice::AmiceDistribution;
use crate::charvar::{char_eval, diff_at_zero, membership, Character, DifferentialCondition, Verdict, Witness};
use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::valuation::PValuation;
use crate::zp::{factorial, vp_big};

/// Lower bounds `lb[n] ≤ v_p(Δ^n f(0))` valid for every integer-valued
/// function `f` that is periodic modulo `p^m`, for `n < len`. The bound is
/// made nondecreasing so it also covers `(x − a)^k f` shifted by `k`.
pub fn periodic_bound(p: u32, m: u32, len: usize) -> Vec<i64> {
    let period = (p as usize).pow(m);
    let binom_vals: Vec<i64> = (0..=period)
        .map(|j| {
            let b = crate::zp::binomial_big(&BigInt::from(period), j as u64);
            vp_big(&b, p)
        })
        .collect();
    let mut lb = vec![0i64; len];
    for n in period.min(len)..len {
        let mut best = i64::MAX;
        for (j, bv) in binom_vals.iter().enumerate().take(period).skip(1) {
            best = best.min(bv + lb[n - period + j]);
        }
        lb[n] = best;
    }
    // Suffix minimum keeps the bound valid and monotone.
    for n in (0..len.saturating_sub(1)).rev() {
        lb[n] = lb[n].min(lb[n + 1]);
    }
    lb
}

/// Exact Mahler coefficients of `x ↦ [x ≡ a mod p^m] (x − a)^k` for `n < len`.
pub fn localized_mahler(p: u32, m: u32, a: u64, k: usize, len: usize) -> Vec<BigInt> {
    let period = (p as u64).pow(m);
    let mut vals: Vec<BigInt> = (0..len as u64)
        .map(|x| {
            if x % period == a % period {
                num_traits::pow(BigInt::from(x as i64 - a as i64), k)
            } else {
                BigInt::zero()
            }
        })
        .collect();
    // Forward differences in place: after step n, vals[n] = Δ^n f(0).
    for n in 1..len {
        for x in (n..len).rev() {
            vals[x] = &vals[x] - &vals[x - 1];
        }
    }
    vals
}

fn multi_indices(r: usize, max_total: usize) -> Vec<Vec<usize>> {
    // Graded lexicographic order.
    let mut out = Vec::new();
    for total in 0..=max_total {
        let mut cur = vec![0usize; r];
        fill(&mut out, &mut cur, 0, total);
    }
    if r == 0 {
        out.truncate(1);
    }
    out
}

fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, pos: usize, left: usize) {
    if pos + 1 >= cur.len() {
        if let Some(last) = cur.last_mut() {
            *last = left;
        } else if left > 0 {
            return;
        }
        out.push(cur.clone());
        return;
    }
    for v in (0..=left).rev() {
        cur[pos] = v;
        fill(out, cur, pos + 1, left - v);
    }
    cur[pos] = 0;
}

fn coset_list(p: u32, m: u32, d: usize) -> Vec<Vec<u64>> {
    let period = (p as u64).pow(m);
    let total = period.pow(d as u32);
    (0..total)
        .map(|mut c| {
            let mut a = vec![0u64; d];
            for slot in a.iter_mut().rev() {
                *slot = c % period;
                c /= period;
            }
            a
        })
        .collect()
}

/// The table of a distribution on the level-m, degree-D dense family.
#[derive(Clone, Debug)]
pub struct DWDistribution {
    pub field: LocalField,
    pub condition: DifferentialCondition,
    pub level: u32,
    pub degree: usize,
    /// Coset representatives in `[0, p^m)^d`, mixed-radix order.
    pub cosets: Vec<Vec<u64>>,
    /// W-monomial exponents `α` with `|α| ≤ D`, graded lexicographic.
    pub alphas: Vec<Vec<usize>>,
    /// `table[c * alphas.len() + j]` for coset `c` and exponent `alphas[j]`.
    pub table: Vec<FieldElement>,
    /// Valuation floor of the source distribution's coefficients.
    pub scale: PValuation,
}

impl DWDistribution {
    /// An empty table with the same layout (used to assemble unit tables).
    pub fn with_table(&self, table: Vec<FieldElement>) -> Result<DWDistribution> {
        if table.len() != self.table.len() {
            return Err(Error::TruncationMismatch("table size differs".into()));
        }
        Ok(DWDistribution { table, ..self.clone() })
    }

    pub fn value(&self, coset: usize, alpha: usize) -> &FieldElement {
        &self.table[coset * self.alphas.len() + alpha]
    }

    pub fn columns(&self) -> usize {
        self.table.len()
    }
}

/// Expands `Π_k (Σ_i B_ik y_i)^{α_k}` into monomials `y^γ`.
fn w_monomial(k: &LocalField, basis: &[Vec<FieldElement>], alpha: &[usize]) -> Vec<(Vec<usize>, FieldElement)> {
    let d = basis.len();
    let mut poly: Vec<(Vec<usize>, FieldElement)> = vec![(vec![0; d], k.one())];
    for (col, &power) in alpha.iter().enumerate() {
        for _ in 0..power {
            let mut next: Vec<(Vec<usize>, FieldElement)> = Vec::new();
            for (gamma, c) in &poly {
                for (i, row) in basis.iter().enumerate() {
                    if row[col].is_zero() && row[col].prec() >= k.prec() {
                        continue;
                    }
                    let mut g = gamma.clone();
                    g[i] += 1;
                    let term = c * &row[col];
                    match next.iter_mut().find(|(h, _)| *h == g) {
                        Some((_, acc)) => *acc = &*acc + &term,
                        None => next.push((g, term)),
                    }
                }
            }
            poly = next;
        }
    }
    poly
}

/// Restricts `λ` to the level-m, degree-D family of W.
pub fn dw_restrict(
    lambda: &AmiceDistribution,
    w: &DifferentialCondition,
    level: u32,
    degree: usize,
) -> Result<DWDistribution> {
    let k = &lambda.field;
    let wk = w.over(k)?;
    let d = lambda.d();
    if wk.d != d {
        return Err(Error::InvalidInput("condition and distribution differ in rank".into()));
    }
    let p = k.p();
    let m_trunc = lambda.m();
    let lb = periodic_bound(p, level, m_trunc + 1);
    if m_trunc <= degree {
        return Err(Error::TruncationInsufficient(format!("M = {m_trunc} must exceed D = {degree}")));
    }
    let scale = lambda.min_coeff_valuation();
    let b_min = wk
        .basis
        .iter()
        .flatten()
        .filter_map(|x| x.val_pi())
        .min()
        .unwrap_or(0)
        .min(0);
    // Omitted Mahler indices have some n_i ≥ M, where the localized monomial
    // of degree ≤ D has valuation ≥ lb[M − D].
    let tail_pi = match scale.floor_pi_units(k.e()) {
        Some(s) => s + lb[m_trunc - degree] * k.e() as i64 + degree as i64 * b_min,
        None => i64::MAX / 4,
    };
    if tail_pi < 1 {
        return Err(Error::TruncationInsufficient(format!(
            "tail bound {} at level {level}, degree {degree}, M = {m_trunc}",
            PValuation::from_pi_units(tail_pi, k.e())
        )));
    }
    let cosets = coset_list(p, level, d);
    let alphas = multi_indices(wk.rank(), degree);
    let period = (p as u64).pow(level);
    // mahler[a][γ] for one coordinate.
    let mahler: Vec<Vec<Vec<BigInt>>> = (0..period)
        .map(|a| (0..=degree).map(|g| localized_mahler(p, level, a, g, m_trunc)).collect())
        .collect();
    let shape = lambda.shape;
    let mut cache: std::collections::HashMap<(Vec<u64>, Vec<usize>), FieldElement> = Default::default();
    let mut table = Vec::with_capacity(cosets.len() * alphas.len());
    for a in &cosets {
        for alpha in &alphas {
            let mut acc = k.zero();
            for (gamma, coef) in w_monomial(k, &wk.basis, alpha) {
                let key = (a.clone(), gamma.clone());
                let base = match cache.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let mut s = k.zero();
                        for (idx, b) in lambda.coeffs.iter().enumerate() {
                            let n = shape.multi(idx);
                            let mut mult = BigInt::one();
                            for i in 0..d {
                                mult *= &mahler[a[i] as usize][gamma[i]][n[i]];
                                if mult.is_zero() {
                                    break;
                                }
                            }
                            if !mult.is_zero() {
                                s = &s + &b.mul_int(&mult);
                            }
                        }
                        cache.insert(key, s.clone());
                        s
                    }
                };
                acc = &acc + &(&coef * &base);
            }
            table.push(acc.with_prec(tail_pi));
        }
    }
    Ok(DWDistribution {
        field: k.clone(),
        condition: wk,
        level,
        degree,
        cosets,
        alphas,
        table,
        scale,
    })
}

/// Checks the level-m table against the level-(m+1) table: each coarse
/// value is the sum over sub-cosets of re-centered fine values. Returns the
/// smallest valuation of a discrepancy (infinite when all agree).
pub fn refinement_discrepancy(coarse: &DWDistribution, fine: &DWDistribution) -> Result<PValuation> {
    if fine.level != coarse.level + 1 || fine.degree != coarse.degree {
        return Err(Error::TruncationMismatch("tables are not consecutive levels".into()));
    }
    let k = &coarse.field;
    let basis = &coarse.condition.basis;
    let period = (k.p() as u64).pow(coarse.level);
    let mut worst = PValuation::Infinite;
    for (ci, a) in coarse.cosets.iter().enumerate() {
        for (ai, alpha) in coarse.alphas.iter().enumerate() {
            let mut acc = k.zero();
            for (fi, a2) in fine.cosets.iter().enumerate() {
                if a2.iter().zip(a).any(|(x, y)| x % period != *y) {
                    continue;
                }
                // c_k = β_k(a' − a)
                let shift: Vec<FieldElement> = (0..coarse.condition.rank())
                    .map(|col| {
                        basis.iter().zip(a2.iter().zip(a)).fold(k.zero(), |s, (row, (x, y))| {
                            &s + &row[col].mul_int(&BigInt::from(*x as i64 - *y as i64))
                        })
                    })
                    .collect();
                for (aj, alpha2) in fine.alphas.iter().enumerate() {
                    if alpha2.iter().zip(alpha).any(|(x, y)| x > y) {
                        continue;
                    }
                    let mut coef = k.one();
                    for ((&full, &part), c) in alpha.iter().zip(alpha2).zip(&shift) {
                        let b = crate::zp::binomial_big(&BigInt::from(full), part as u64);
                        coef = &coef.mul_int(&b) * &c.pow((full - part) as u64);
                    }
                    acc = &acc + &(&coef * fine.value(fi, aj));
                }
            }
            let diff = &acc - coarse.value(ci, ai);
            worst = worst.min(diff.valuation());
        }
    }
    Ok(worst)
}

/// Value of a D_W table at a member character, with the bound on the
/// omitted degrees.
#[derive(Clone, Debug)]
pub struct DwEvaluation {
    pub value: FieldElement,
    pub tail: PValuation,
}

/// Coefficients of the table entries in `λ(χ)`: `χ(a) ℓ^α / α!` where `ℓ`
/// are the W-coordinates of `log z`.
pub fn evaluation_row(dw: &DWDistribution, chi: &Character) -> Result<(Vec<FieldElement>, PValuation)> {
    let k = &dw.field;
    if !chi.field.same_field(k) {
        return Err(Error::FieldMismatch);
    }
    let cert = membership(chi, &dw.condition)?;
    let ell = match (cert.verdict, cert.witness) {
        (Verdict::Member, Witness::Coordinates(c)) => c,
        _ => return Err(Error::NotAMember),
    };
    let p = k.p() as i64;
    let e = k.e() as i64;
    // Need v(p^m log z_i) > 1/(p − 1) for the coset-wise exponential.
    let logs = diff_at_zero(chi)?;
    let mut u: Option<Ratio<i64>> = None;
    for l in &logs {
        if let Some(v) = l.val_pi() {
            let val = Ratio::new(v + e * dw.level as i64, e);
            if val <= Ratio::new(1, p - 1) {
                return Err(Error::ConvergenceBudget(format!(
                    "v(p^{} log z) = {val} <= 1/{}",
                    dw.level,
                    p - 1
                )));
            }
            u = Some(u.map_or(val, |x: Ratio<i64>| x.min(val)));
        }
    }
    let mut row = Vec::with_capacity(dw.columns());
    let char_at: Vec<FieldElement> = dw
        .cosets
        .iter()
        .map(|a| {
            let g: Vec<FieldElement> = a.iter().map(|x| k.from_int(*x as i64)).collect();
            char_eval(chi, &g)
        })
        .collect::<Result<_>>()?;
    let monomials: Vec<FieldElement> = dw
        .alphas
        .iter()
        .map(|alpha| {
            let mut t = k.one();
            let mut fact = BigInt::one();
            for (l, &a) in ell.iter().zip(alpha) {
                t = &t * &l.pow(a as u64);
                fact *= factorial(a as u64);
            }
            t.div_int(&fact)
        })
        .collect::<Result<_>>()?;
    for ca in &char_at {
        for mono in &monomials {
            row.push(ca * mono);
        }
    }
    // Omitted degrees j > D: v(s^j / j!) ≥ j u − v_p(j!) on each coset.
    let tail = match u {
        None => PValuation::Infinite,
        Some(u) => {
            let mut best: Option<Ratio<i64>> = None;
            for j in dw.degree + 1..dw.degree + 64 {
                let vf = vp_big(&factorial(j as u64), k.p());
                let t = u * Ratio::from_integer(j as i64) - Ratio::from_integer(vf);
                best = Some(best.map_or(t, |b: Ratio<i64>| b.min(t)));
            }
            let b = best.expect("nonempty range");
            match dw.scale {
                PValuation::Finite(s) => PValuation::Finite(b + s),
                PValuation::Infinite => PValuation::Infinite,
            }
        }
    };
    Ok((row, tail))
}

/// `λ(χ) = Σ_a χ(a) Σ_{|α| ≤ D} ℓ^α / α! · table(a, α)`.
pub fn dw_eval_on_char(dw: &DWDistribution, chi: &Character) -> Result<DwEvaluation> {
    let (row, tail) = evaluation_row(dw, chi)?;
    let k = &dw.field;
    let mut value = row.iter().zip(&dw.table).fold(k.zero(), |acc, (r, t)| &acc + &(r * t));
    if let Some(cap) = tail.floor_pi_units(k.e()) {
        value = value.with_prec(cap);
    }
    Ok(DwEvaluation { value, tail })
}
