//! Characters of T = Z_p^d with values in a local field K, differential
//! conditions W, and the membership predicates cutting out the characters
//! whose differential lies in W.
//!
//! Convention: Hom_{Z_p}(T, L) is identified with L^d through the dual of the
//! standard basis of T, so a functional `λ` has coordinates `λ(e_i)`. The
//! Lie algebra 𝔱 = T ⊗ Q_p pairs with it by `⟨X, λ⟩ = Σ_i X_i λ_i`, and W^⊥
//! is taken with respect to that pairing: for W = span{(1, 1)} in d = 2 the
//! annihilator is span{(1, −1)}.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::amice::AmiceDistribution;
use crate::analytic::padic_log;
use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::linalg::{self, Matrix};
use crate::roots::FieldEmbedding;
use crate::valuation::PValuation;
use crate::zp::{binomial_at, ZpPoint};

/// The lattice T ≅ Z_p^d, optionally with an action of O_L given by the
/// integer matrices of multiplication by a Z_p-basis of O_L.
#[derive(Clone, Debug)]
pub struct CharacterLattice {
    pub d: usize,
    pub labels: Vec<String>,
    pub ol_action: Option<Vec<Vec<Vec<BigInt>>>>,
}

impl CharacterLattice {
    pub fn standard(d: usize) -> Self {
        CharacterLattice { d, labels: (0..d).map(|i| format!("e{i}")).collect(), ol_action: None }
    }

    /// T = O_L with its power basis `π^i t^j`; the action matrices are those
    /// of multiplication by each basis element.
    pub fn ring_of_integers(l: &LocalField) -> Self {
        let structure = l.structure_constants();
        let n = structure.len();
        let mats = structure
            .iter()
            .map(|by_b| {
                let mut m = vec![vec![BigInt::zero(); n]; n];
                for (col, prod) in by_b.iter().enumerate() {
                    for (row, coord) in prod.iter().enumerate() {
                        m[row][col] = coord.clone();
                    }
                }
                m
            })
            .collect();
        let mut labels = Vec::with_capacity(n);
        for i in 0..l.e() {
            for j in 0..l.f() {
                labels.push(format!("pi^{i}*t^{j}"));
            }
        }
        CharacterLattice { d: n, labels, ol_action: Some(mats) }
    }

    /// Checks that the action matrices pairwise commute.
    pub fn action_commutes(&self) -> bool {
        let Some(mats) = &self.ol_action else { return true };
        let mul = |a: &Vec<Vec<BigInt>>, b: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            let n = a.len();
            (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
                .collect()
        };
        mats.iter().all(|a| mats.iter().all(|b| mul(a, b) == mul(b, a)))
    }
}

/// A point of the character variety: `χ(g) = Π z_i^{g_i}` with `v(z_i − 1) > 0`.
#[derive(Clone, Debug)]
pub struct Character {
    pub field: LocalField,
    pub z: Vec<FieldElement>,
}

impl Character {
    pub fn new(k: &LocalField, z: Vec<FieldElement>) -> Result<Self> {
        for zi in &z {
            if !zi.in_field(k) {
                return Err(Error::FieldMismatch);
            }
            let y = zi - &k.one();
            if let Some(v) = y.val_pi() {
                if v <= 0 {
                    return Err(Error::OutsideDomain(format!("v(z - 1) = {} <= 0", y.valuation())));
                }
            }
        }
        Ok(Character { field: k.clone(), z })
    }

    pub fn trivial(k: &LocalField, d: usize) -> Self {
        Character { field: k.clone(), z: vec![k.one(); d] }
    }

    pub fn d(&self) -> usize {
        self.z.len()
    }

    /// Smallest absolute precision among the coordinates.
    pub fn prec(&self) -> i64 {
        self.z.iter().map(|z| z.prec()).min().unwrap_or(self.field.prec())
    }
}

/// `z^g = Σ_n binom(g, n) (z − 1)^n` for `g ∈ Z_p`.
pub fn zp_power(z: &FieldElement, g: &ZpPoint) -> Result<FieldElement> {
    let k = z.field();
    let y = z - &k.one();
    let target = z.prec();
    let v = match y.val_pi() {
        None => return Ok(k.one().with_prec(target.min(y.prec()))),
        Some(v) if v <= 0 => {
            return Err(Error::OutsideDomain(format!("v(z - 1) = {} <= 0", y.valuation())))
        }
        Some(v) => v,
    };
    // Terms with n v ≥ target vanish at the working precision.
    let terms = (target + v - 1) / v;
    let mut acc = k.zero();
    let mut pw = k.one();
    for n in 0..terms.max(1) as u64 {
        let b = binomial_at(&k, g, n);
        acc = &acc + &(&b * &pw);
        pw = &pw * &y;
    }
    Ok(acc.with_prec(target))
}

/// `χ(g) = Π_i z_i^{g_i}`.
pub fn char_eval(chi: &Character, g: &[FieldElement]) -> Result<FieldElement> {
    if g.len() != chi.d() {
        return Err(Error::InvalidInput(format!("point of rank {} for a rank-{} character", g.len(), chi.d())));
    }
    let mut acc = chi.field.one();
    for (z, gi) in chi.z.iter().zip(g) {
        let pt = ZpPoint::from_element(gi)?;
        acc = &acc * &zp_power(z, &pt)?;
    }
    Ok(acc)
}

pub fn char_mul(a: &Character, b: &Character) -> Result<Character> {
    if !a.field.same_field(&b.field) {
        return Err(Error::FieldMismatch);
    }
    if a.d() != b.d() {
        return Err(Error::InvalidInput("characters of different rank".into()));
    }
    let z = a.z.iter().zip(&b.z).map(|(x, y)| x * y).collect();
    Ok(Character { field: a.field.clone(), z })
}

pub fn char_inv(a: &Character) -> Result<Character> {
    let z = a.z.iter().map(|x| x.inv()).collect::<Result<Vec<_>>>()?;
    Ok(Character { field: a.field.clone(), z })
}

/// `(dχ)|_0 = (log z_1, …, log z_d)`.
pub fn diff_at_zero(chi: &Character) -> Result<Vec<FieldElement>> {
    chi.z.iter().map(padic_log).collect()
}

/// `(dχ)|_g = χ(g) · (dχ)|_0`.
pub fn diff_at(chi: &Character, g: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let value = char_eval(chi, g)?;
    Ok(diff_at_zero(chi)?.iter().map(|l| &value * l).collect())
}

/// `(χ(g + p^m e_i) − χ(g)) / p^m`, the finite-difference approximation of
/// the i-th partial derivative.
pub fn difference_quotient(chi: &Character, g: &[FieldElement], i: usize, m: u32) -> Result<FieldElement> {
    let k = &chi.field;
    let step = num_traits::pow(k.p_big().clone(), m as usize);
    let mut shifted = g.to_vec();
    shifted[i] = &shifted[i] + &shifted[i].field().from_bigint(&step);
    let a = char_eval(chi, &shifted)?;
    let b = char_eval(chi, g)?;
    (&a - &b).div_int(&step)
}

/// A subspace W ⊆ Hom(T, L) ≅ L^d given by the columns of a d × r matrix.
#[derive(Clone, Debug)]
pub struct DifferentialCondition {
    pub field: LocalField,
    pub d: usize,
    pub basis: Matrix,
}

impl DifferentialCondition {
    /// Validates that the columns are independent at the working precision.
    pub fn new(l: &LocalField, d: usize, basis: Matrix) -> Result<Self> {
        if basis.len() != d {
            return Err(Error::InvalidInput(format!("basis has {} rows, expected {d}", basis.len())));
        }
        let r = basis.first().map_or(0, |row| row.len());
        if basis.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidInput("ragged basis matrix".into()));
        }
        if basis.iter().flatten().any(|x| !x.in_field(l)) {
            return Err(Error::FieldMismatch);
        }
        if r > 0 {
            linalg::require_full_column_rank(&basis, l, "differential condition")?;
        }
        Ok(DifferentialCondition { field: l.clone(), d, basis })
    }

    pub fn full(l: &LocalField, d: usize) -> Self {
        DifferentialCondition { field: l.clone(), d, basis: linalg::identity(l, d) }
    }

    pub fn zero(l: &LocalField, d: usize) -> Self {
        DifferentialCondition { field: l.clone(), d, basis: vec![Vec::new(); d] }
    }

    pub fn rank(&self) -> usize {
        self.basis.first().map_or(0, |row| row.len())
    }

    /// Column `j` of the basis matrix.
    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        self.basis.iter().map(|row| row[j].clone()).collect()
    }

    /// W ⊗_L K through an embedding `L → K`.
    pub fn base_change(&self, emb: &FieldEmbedding) -> Result<DifferentialCondition> {
        if !emb.source.same_field(&self.field) {
            return Err(Error::FieldMismatch);
        }
        let basis = self
            .basis
            .iter()
            .map(|row| row.iter().map(|x| emb.apply(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Matrix>>()?;
        Ok(DifferentialCondition { field: emb.target.clone(), d: self.d, basis })
    }

    /// W over `k` when L is `k` itself or Q_p.
    pub fn over(&self, k: &LocalField) -> Result<DifferentialCondition> {
        if self.field.same_field(k) {
            return Ok(self.clone());
        }
        let basis = self
            .basis
            .iter()
            .map(|row| row.iter().map(|x| k.coerce(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Matrix>>()?;
        Ok(DifferentialCondition { field: k.clone(), d: self.d, basis })
    }
}

/// Basis of W^⊥ ⊆ 𝔱 as rows: every row `X` satisfies `Σ_i X_i B_ij = 0`.
pub fn wperp_basis(w: &DifferentialCondition) -> Result<Matrix> {
    if w.rank() == 0 {
        return Ok(linalg::identity(&w.field, w.d));
    }
    linalg::require_full_column_rank(&w.basis, &w.field, "differential condition")?;
    linalg::kernel(&linalg::transpose(&w.basis), &w.field, w.d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Member => "member",
            Verdict::NonMember => "non-member",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Witness {
    /// W-coordinates `w` with `B w = log z`.
    Coordinates(Vec<FieldElement>),
    /// A W^⊥ functional with nonzero value on `log z`.
    Functional { index: usize, valuation: PValuation },
    None,
}

#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub verdict: Verdict,
    pub witness: Witness,
    /// Smallest precision among the residuals that were tested.
    pub prec: PValuation,
}

/// Controls when vanishing residuals certify membership.
#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    /// Residuals must be known to this absolute precision (π-units of K).
    pub certify: i64,
}

impl MembershipOptions {
    pub fn for_field(k: &LocalField) -> Self {
        MembershipOptions { certify: k.prec() / 2 }
    }
}

fn verdict_from_residuals(
    k: &LocalField,
    residuals: &[FieldElement],
    opts: MembershipOptions,
) -> (Verdict, Option<(usize, PValuation)>, PValuation) {
    let min_prec = residuals.iter().map(|r| r.prec()).min().unwrap_or(k.prec());
    let prec = PValuation::from_pi_units(min_prec, k.e());
    let worst = residuals
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.val_pi().map(|v| (v, i)))
        .min();
    if let Some((_, i)) = worst {
        return (Verdict::NonMember, Some((i, residuals[i].valuation())), prec);
    }
    if min_prec >= opts.certify {
        (Verdict::Member, None, prec)
    } else {
        (Verdict::Inconclusive, None, prec)
    }
}

fn log_vector(chi: &Character, w: &DifferentialCondition) -> Result<(Vec<FieldElement>, DifferentialCondition)> {
    if chi.d() != w.d {
        return Err(Error::InvalidInput(format!("rank {} character vs rank {} condition", chi.d(), w.d)));
    }
    let wk = w.over(&chi.field)?;
    Ok((diff_at_zero(chi)?, wk))
}

/// Solves `B w = log z` by elimination; the rows annihilated by the
/// elimination are W^⊥ functionals whose values decide membership.
pub fn membership(chi: &Character, w: &DifferentialCondition) -> Result<MembershipCertificate> {
    membership_with(chi, w, MembershipOptions::for_field(&chi.field))
}

pub fn membership_with(
    chi: &Character,
    w: &DifferentialCondition,
    opts: MembershipOptions,
) -> Result<MembershipCertificate> {
    let (ell, wk) = log_vector(chi, w)?;
    subspace_membership(&chi.field, &ell, &wk, opts)
}

/// Decides whether `v ∈ W` (W already over `k`) by elimination on the basis
/// matrix; used for log-vectors of characters and for differentials alike.
pub fn subspace_membership(
    k: &LocalField,
    ell: &[FieldElement],
    wk: &DifferentialCondition,
    opts: MembershipOptions,
) -> Result<MembershipCertificate> {
    if ell.len() != wk.d {
        return Err(Error::InvalidInput("vector length differs from the condition's rank".into()));
    }
    let ell = ell.to_vec();
    let r = wk.rank();
    let (coords, residuals) = if r == 0 {
        (Vec::new(), ell.clone())
    } else {
        let ech = linalg::require_full_column_rank(&wk.basis, k, "differential condition")?;
        let u_ell = linalg::mat_vec(&ech.transform, &ell, k);
        let mut coords = vec![k.zero(); r];
        for (row, col) in &ech.pivots {
            coords[*col] = u_ell[*row].clone();
        }
        (coords, u_ell[r..].to_vec())
    };
    let (verdict, bad, prec) = verdict_from_residuals(k, &residuals, opts);
    let witness = match verdict {
        Verdict::Member => Witness::Coordinates(coords),
        Verdict::NonMember => {
            let (index, valuation) = bad.expect("non-member has a witness");
            Witness::Functional { index, valuation }
        }
        Verdict::Inconclusive => Witness::None,
    };
    Ok(MembershipCertificate { verdict, witness, prec })
}

/// Evaluates `F_{ι(X)}(χ) = Σ_i X_i log z_i` for a basis `X` of W^⊥.
pub fn membership_via_wperp(chi: &Character, w: &DifferentialCondition) -> Result<MembershipCertificate> {
    membership_via_wperp_with(chi, w, MembershipOptions::for_field(&chi.field))
}

pub fn membership_via_wperp_with(
    chi: &Character,
    w: &DifferentialCondition,
    opts: MembershipOptions,
) -> Result<MembershipCertificate> {
    let (ell, wk) = log_vector(chi, w)?;
    let k = &chi.field;
    let perp = wperp_basis(&wk)?;
    let residuals = linalg::mat_vec(&perp, &ell, k);
    let (verdict, bad, prec) = verdict_from_residuals(k, &residuals, opts);
    let witness = match verdict {
        Verdict::NonMember => {
            let (index, valuation) = bad.expect("non-member has a witness");
            Witness::Functional { index, valuation }
        }
        _ => Witness::None,
    };
    Ok(MembershipCertificate { verdict, witness, prec })
}

/// Both legs of the cartesian square for a member: the point `z`, its
/// logarithm, the W-coordinates `w`, and `B w` recomputed from them.
#[derive(Clone, Debug)]
pub struct FiberProductReport {
    pub z: Vec<FieldElement>,
    pub log_z: Vec<FieldElement>,
    pub w: Vec<FieldElement>,
    pub reconstructed: Vec<FieldElement>,
    /// `B w` agrees with `log z` at the common precision.
    pub agree: bool,
}

pub fn fiber_product_check(chi: &Character, w: &DifferentialCondition) -> Result<FiberProductReport> {
    let cert = membership(chi, w)?;
    let coords = match (cert.verdict, cert.witness) {
        (Verdict::Member, Witness::Coordinates(c)) => c,
        _ => return Err(Error::NotAMember),
    };
    let k = &chi.field;
    let wk = w.over(k)?;
    let log_z = diff_at_zero(chi)?;
    let reconstructed = if wk.rank() == 0 {
        vec![k.zero(); wk.d]
    } else {
        let col: Matrix = coords.iter().map(|c| vec![c.clone()]).collect();
        linalg::mat_mul(&wk.basis, &col, k).into_iter().map(|mut r| r.remove(0)).collect()
    };
    let agree = reconstructed.iter().zip(&log_z).all(|(a, b)| a.eq_at_prec(b));
    Ok(FiberProductReport { z: chi.z.clone(), log_z, w: coords, reconstructed, agree })
}

/// All characters of T/p^n T with values in μ_{p^n} ⊆ K, ordered
/// lexicographically in the exponents of a fixed primitive root.
pub fn torsion_characters(n: u32, d: usize, k: &LocalField) -> Result<Vec<Character>> {
    let zeta = k.primitive_root_of_unity(n)?;
    let order = (k.p() as u64).pow(n) as usize;
    let powers: Vec<FieldElement> = (0..order as u64).map(|a| zeta.pow(a)).collect();
    let total = order.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code;
        let mut exps = vec![0usize; d];
        for slot in exps.iter_mut().rev() {
            *slot = c % order;
            c /= order;
        }
        out.push(Character { field: k.clone(), z: exps.iter().map(|a| powers[*a].clone()).collect() });
    }
    Ok(out)
}

/// `χ ∘ φ` for `φ: T_2 → T_1` given as a d_1 × d_2 matrix over Z_p:
/// `z'_j = Π_i z_i^{φ_ij}`.
pub fn char_pullback(phi: &[Vec<FieldElement>], chi: &Character) -> Result<Character> {
    if phi.len() != chi.d() {
        return Err(Error::InvalidInput("matrix rows must match the character rank".into()));
    }
    let d2 = phi.first().map_or(0, |r| r.len());
    let k = &chi.field;
    let mut z = vec![k.one(); d2];
    for (i, row) in phi.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            let pt = ZpPoint::from_element(entry)?;
            z[j] = &z[j] * &zp_power(&chi.z[i], &pt)?;
        }
    }
    Ok(Character { field: k.clone(), z })
}

/// Checks `φ^*(W_1) ⊆ W_2`, i.e. `W_2^⊥ · φ^T · B_1 = 0`, then pulls back.
pub fn char_pullback_with_conditions(
    phi: &[Vec<FieldElement>],
    chi: &Character,
    w1: &DifferentialCondition,
    w2: &DifferentialCondition,
) -> Result<Character> {
    let l = &w2.field;
    let w1l = w1.over(l)?;
    let phi_l: Matrix = phi
        .iter()
        .map(|row| row.iter().map(|x| l.coerce(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Matrix>>()?;
    if w1l.rank() > 0 {
        let image = linalg::mat_mul(&linalg::transpose(&phi_l), &w1l.basis, l);
        let perp = wperp_basis(w2)?;
        if !perp.is_empty() {
            let test = linalg::mat_mul(&perp, &image, l);
            if test.iter().flatten().any(|x| !x.is_zero()) {
                return Err(Error::ConditionNotMapped);
            }
        }
    }
    char_pullback(phi, chi)
}

/// The distribution `ι(X): f ↦ (X.f)(0)` in both of its forms.
#[derive(Clone, Debug)]
pub struct Iota {
    pub x: Vec<FieldElement>,
    /// Amice coefficients `b_{n e_i} = X_i (−1)^{n−1} / n`.
    pub distribution: AmiceDistribution,
}

impl Iota {
    pub fn new(k: &LocalField, x: &[FieldElement], m: usize) -> Result<Self> {
        let mut dist = AmiceDistribution::zero(k, x.len(), m)?;
        for (i, xi) in x.iter().enumerate() {
            let xi = k.coerce(xi)?;
            for n in 1..m {
                let mut idx = vec![0; x.len()];
                idx[i] = n;
                let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
                let c = xi.mul_int(&sign).div_int(&BigInt::from(n))?;
                let pos = dist.shape.index(&idx);
                dist.coeffs[pos] = c;
            }
        }
        Ok(Iota { x: x.to_vec(), distribution: dist })
    }

    /// Direct evaluation `Σ X_i log z_i`.
    pub fn eval_direct(&self, chi: &Character) -> Result<FieldElement> {
        let logs = diff_at_zero(chi)?;
        let mut acc = chi.field.zero();
        for (xi, l) in self.x.iter().zip(&logs) {
            acc = &acc + &(&chi.field.coerce(xi)? * l);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> LocalField {
        LocalField::qp(5, 20).unwrap()
    }

    #[test]
    fn char_eval_basics() {
        let k = q5();
        let chi = Character::new(&k, vec![k.from_int(6)]).unwrap();
        assert!(char_eval(&chi, &[k.zero()]).unwrap().is_one());
        assert!(char_eval(&chi, &[k.one()]).unwrap().eq_at_prec(&k.from_int(6)));
        let g = k.from_int(125);
        let direct = k.from_int(6).pow(125);
        assert!(char_eval(&chi, &[g]).unwrap().eq_at_prec(&direct));
        assert!(matches!(Character::new(&k, vec![k.from_int(2)]), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn wperp_of_diagonal() {
        let k = q5();
        let w = DifferentialCondition::new(&k, 2, vec![vec![k.one()], vec![k.one()]]).unwrap();
        let perp = wperp_basis(&w).unwrap();
        assert_eq!(perp.len(), 1);
        assert!((&perp[0][0] + &perp[0][1]).is_zero());
        assert!(wperp_basis(&DifferentialCondition::full(&k, 2)).unwrap().is_empty());
        assert_eq!(wperp_basis(&DifferentialCondition::zero(&k, 3)).unwrap().len(), 3);
    }

    #[test]
    fn membership_on_coordinate_line() {
        let k = LocalField::cyclotomic(5, 1, 40).unwrap();
        let zeta = k.primitive_root_of_unity(1).unwrap();
        let w = DifferentialCondition::new(&k, 2, vec![vec![k.one()], vec![k.zero()]]).unwrap();
        let member = Character::new(&k, vec![k.from_int(6), zeta]).unwrap();
        let outsider = Character::new(&k, vec![k.from_int(6), k.from_int(6)]).unwrap();
        assert_eq!(membership(&member, &w).unwrap().verdict, Verdict::Member);
        assert_eq!(membership_via_wperp(&member, &w).unwrap().verdict, Verdict::Member);
        assert_eq!(membership(&outsider, &w).unwrap().verdict, Verdict::NonMember);
        assert_eq!(membership_via_wperp(&outsider, &w).unwrap().verdict, Verdict::NonMember);
    }

    #[test]
    fn fiber_product_on_diagonal() {
        let k = q5();
        let w = DifferentialCondition::new(&k, 2, vec![vec![k.one()], vec![k.one()]]).unwrap();
        let chi = Character::new(&k, vec![k.from_int(6), k.from_int(6)]).unwrap();
        let rep = fiber_product_check(&chi, &w).unwrap();
        assert!(rep.agree);
        assert!(rep.w[0].eq_at_prec(&padic_log(&k.from_int(6)).unwrap()));
        let bad = Character::new(&k, vec![k.from_int(6), k.one()]).unwrap();
        assert!(matches!(fiber_product_check(&bad, &w), Err(Error::NotAMember)));
    }

    #[test]
    fn torsion_enumeration_counts() {
        let k = LocalField::cyclotomic(5, 1, 20).unwrap();
        assert_eq!(torsion_characters(1, 1, &k).unwrap().len(), 5);
        assert_eq!(torsion_characters(0, 2, &k).unwrap().len(), 1);
        assert_eq!(torsion_characters(1, 2, &k).unwrap().len(), 25);
        assert!(matches!(torsion_characters(2, 1, &k), Err(Error::MissingRootsOfUnity(25))));
    }

    #[test]
    fn pullback_by_p_raises_to_p() {
        let k = q5();
        let chi = Character::new(&k, vec![k.from_int(6)]).unwrap();
        let pulled = char_pullback(&[vec![k.from_int(5)]], &chi).unwrap();
        assert!(pulled.z[0].eq_at_prec(&k.from_int(6).pow(5)));
    }

    #[test]
    fn pullback_condition_is_checked() {
        let k = q5();
        let chi = Character::new(&k, vec![k.from_int(6), k.from_int(11)]).unwrap();
        let w_line = DifferentialCondition::new(&k, 2, vec![vec![k.one()], vec![k.zero()]]).unwrap();
        let w_other = DifferentialCondition::new(&k, 2, vec![vec![k.zero()], vec![k.one()]]).unwrap();
        let id = vec![vec![k.one(), k.zero()], vec![k.zero(), k.one()]];
        assert!(char_pullback_with_conditions(&id, &chi, &w_line, &w_line).is_ok());
        assert!(matches!(
            char_pullback_with_conditions(&id, &chi, &w_line, &w_other),
            Err(Error::ConditionNotMapped)
        ));
    }

    #[test]
    fn iota_of_unit_vector_is_log() {
        let k = q5();
        let iota = Iota::new(&k, &[k.one()], 40).unwrap();
        let chi = Character::new(&k, vec![k.from_int(6)]).unwrap();
        let direct = iota.eval_direct(&chi).unwrap();
        let series = iota.distribution.fourier_eval(&chi.z).unwrap().value;
        assert!(direct.eq_at_prec(&padic_log(&k.from_int(6)).unwrap()));
        assert!(series.eq_at_prec(&direct), "{series} vs {direct}");
    }

    #[test]
    fn ring_of_integers_action_commutes() {
        let l = LocalField::eisenstein(5, &[-5, 0, 1], 20).unwrap();
        let t = CharacterLattice::ring_of_integers(&l);
        assert_eq!(t.d, 2);
        assert!(t.action_commutes());
    }
}
