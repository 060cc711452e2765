//! Σ-analyticity on O_L: the idempotents of L ⊗ K, the subspace W(Σ) of
//! Hom_{Z_p}(O_L, K) spanned by a set of embeddings, the two equivalent
//! Σ-analyticity tests, and Hodge–Tate pair bookkeeping for CM types.
//!
//! O_L is identified with Z_p^n through its power basis `ω_j = π^i t^j`, so a
//! point is `z = Σ_j x_j ω_j` and `σ(z) = Σ_j σ(ω_j) x_j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::amice::Polynomial;
use crate::charvar::{subspace_membership, CharacterLattice, DifferentialCondition, MembershipOptions, Verdict};
use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::linalg::{self, Matrix};
use crate::roots::{embeddings, FieldEmbedding};

/// A subset Σ of the embeddings `L → K`, by index into [`embeddings`].
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    pub l: LocalField,
    pub k: LocalField,
    pub all: Vec<FieldEmbedding>,
    pub sigma: Vec<usize>,
}

impl EmbeddingSet {
    pub fn new(l: &LocalField, k: &LocalField, sigma: Vec<usize>) -> Result<Self> {
        let all = embeddings(l, k)?;
        Self::from_embeddings(l, k, all, sigma)
    }

    pub fn from_embeddings(l: &LocalField, k: &LocalField, all: Vec<FieldEmbedding>, sigma: Vec<usize>) -> Result<Self> {
        let mut seen = sigma.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != sigma.len() {
            return Err(Error::InvalidInput("repeated embedding index".into()));
        }
        if let Some(bad) = sigma.iter().find(|i| **i >= all.len()) {
            return Err(Error::InvalidInput(format!("embedding index {bad} out of range")));
        }
        Ok(EmbeddingSet { l: l.clone(), k: k.clone(), all, sigma })
    }

    pub fn with_sigma(&self, sigma: Vec<usize>) -> Result<Self> {
        Self::from_embeddings(&self.l, &self.k, self.all.clone(), sigma)
    }

    pub fn degree(&self) -> usize {
        self.l.degree()
    }

    /// `V[σ][j] = σ(ω_j)` over all embeddings.
    pub fn conjugate_matrix(&self) -> Matrix {
        self.all.iter().map(|e| e.images_of_basis()).collect()
    }
}

/// A CM type: L together with Σ; the height is [L : Q_p].
#[derive(Clone, Debug)]
pub struct CMType {
    pub sigma: EmbeddingSet,
}

impl CMType {
    pub fn height(&self) -> usize {
        self.sigma.degree()
    }
}

/// An element of L ⊗ K, as K-coordinates on the power basis of L.
#[derive(Clone, Debug)]
pub struct TensorElement {
    pub coords: Vec<FieldElement>,
}

/// Multiplication table of L ⊗ K: integer structure constants of the power
/// basis of O_L.
#[derive(Clone, Debug)]
pub struct TensorAlgebra {
    pub l: LocalField,
    pub k: LocalField,
    structure: Vec<Vec<Vec<BigInt>>>,
}

impl TensorAlgebra {
    pub fn new(l: &LocalField, k: &LocalField) -> Self {
        TensorAlgebra { l: l.clone(), k: k.clone(), structure: l.structure_constants() }
    }

    pub fn n(&self) -> usize {
        self.structure.len()
    }

    pub fn one(&self) -> TensorElement {
        let mut coords = vec![self.k.zero(); self.n()];
        coords[0] = self.k.one();
        TensorElement { coords }
    }

    /// `x ⊗ 1` for `x` in L.
    pub fn from_l(&self, x: &FieldElement) -> Result<TensorElement> {
        let kx = x.field();
        if x.shift() > 0 {
            // x = num / p^s: scale in K.
            let coords = x
                .numerator()
                .iter()
                .map(|c| self.k.from_bigint(c).div_int(&num_traits::pow(kx.p_big().clone(), x.shift() as usize)))
                .collect::<Result<_>>()?;
            return Ok(TensorElement { coords });
        }
        Ok(TensorElement { coords: x.numerator().iter().map(|c| self.k.from_bigint(c)).collect() })
    }

    /// `1 ⊗ a` for `a` in K.
    pub fn from_k(&self, a: &FieldElement) -> TensorElement {
        let mut t = self.one();
        t.coords[0] = a.clone();
        t
    }

    pub fn add(&self, x: &TensorElement, y: &TensorElement) -> TensorElement {
        TensorElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &TensorElement, y: &TensorElement) -> TensorElement {
        TensorElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, x: &TensorElement, c: &FieldElement) -> TensorElement {
        TensorElement { coords: x.coords.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, x: &TensorElement, y: &TensorElement) -> TensorElement {
        let n = self.n();
        let mut out = vec![self.k.zero(); n];
        for i in 0..n {
            for j in 0..n {
                let prod = &x.coords[i] * &y.coords[j];
                for (kk, c) in self.structure[i][j].iter().enumerate() {
                    if c.sign() != num_bigint::Sign::NoSign {
                        out[kk] = &out[kk] + &prod.mul_int(c);
                    }
                }
            }
        }
        TensorElement { coords: out }
    }

    /// `x ⊗ a ↦ σ(x) a`.
    pub fn project(&self, x: &TensorElement, emb: &FieldEmbedding) -> FieldElement {
        emb.images_of_basis()
            .iter()
            .zip(&x.coords)
            .fold(self.k.zero(), |acc, (s, c)| &acc + &(s * c))
    }

    pub fn is_zero(&self, x: &TensorElement) -> bool {
        x.coords.iter().all(|c| c.is_zero())
    }

    pub fn eq(&self, x: &TensorElement, y: &TensorElement) -> bool {
        self.is_zero(&self.sub(x, y))
    }
}

/// A primitive element `π + c t` (or `t`, or `π`) of L whose conjugates are
/// pairwise distinct.
fn primitive_element(l: &LocalField, all: &[FieldEmbedding]) -> Result<FieldElement> {
    if l.degree() == 1 {
        return Ok(l.zero());
    }
    let candidates: Vec<FieldElement> = match (l.e() > 1, l.f() > 1) {
        (true, true) => (0..l.p() as i64 + 2)
            .map(|c| &l.uniformizer() + &l.unramified_generator().mul_int(&BigInt::from(c)))
            .collect(),
        (true, false) => vec![l.uniformizer()],
        _ => vec![l.unramified_generator()],
    };
    for theta in candidates {
        let images = all.iter().map(|e| e.apply(&theta)).collect::<Result<Vec<_>>>()?;
        let distinct = (0..images.len()).all(|i| (i + 1..images.len()).all(|j| !images[i].eq_at_prec(&images[j])));
        if distinct {
            return Ok(theta);
        }
    }
    Err(Error::PrecisionExhausted("conjugates of the primitive element collide".into()))
}

/// The idempotents `e_σ` of L ⊗ K, by Lagrange interpolation on the
/// conjugates of a primitive element, in the order of `embeddings(L, K)`.
pub fn idempotents(l: &LocalField, k: &LocalField) -> Result<(TensorAlgebra, Vec<TensorElement>, Vec<FieldEmbedding>)> {
    let all = embeddings(l, k)?;
    let alg = TensorAlgebra::new(l, k);
    if l.degree() == 1 {
        return Ok((alg.clone(), vec![alg.one()], all));
    }
    let theta = primitive_element(l, &all)?;
    let theta_t = alg.from_l(&theta)?;
    let conj = all.iter().map(|e| e.apply(&theta)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(all.len());
    for (s, cs) in conj.iter().enumerate() {
        let mut acc = alg.one();
        for (t, ct) in conj.iter().enumerate() {
            if t == s {
                continue;
            }
            let factor = alg.sub(&theta_t, &alg.from_k(ct));
            let denom = (cs - ct).inv()?;
            acc = alg.scale(&alg.mul(&acc, &factor), &denom);
        }
        out.push(acc);
    }
    Ok((alg, out, all))
}

/// W(Σ): the span of the functionals `x ↦ σ(x)`, σ ∈ Σ, as a basis matrix
/// with columns `(σ(ω_j))_j`.
pub fn build_w_sigma(set: &EmbeddingSet) -> Result<DifferentialCondition> {
    let n = set.degree();
    let basis: Matrix = (0..n)
        .map(|j| set.sigma.iter().map(|&s| set.all[s].images_of_basis()[j].clone()).collect())
        .collect();
    if set.sigma.is_empty() {
        return Ok(DifferentialCondition::zero(&set.k, n));
    }
    DifferentialCondition::new(&set.k, n, basis)
}

/// Input to [`sigma_analytic_test`].
#[derive(Clone, Debug)]
pub enum SigmaFunction {
    /// A polynomial in the Z_p-coordinates `x_j` of `z = Σ x_j ω_j`.
    Coordinates(Polynomial),
    /// A polynomial in the variables `u_σ = σ(z)`, one per embedding.
    EmbeddingVariables(Polynomial),
}

/// Verdicts of the two routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaVerdict {
    pub differential: bool,
    pub support: bool,
    /// True when neither route met a coefficient too imprecise to decide.
    pub decided: bool,
}

impl SigmaVerdict {
    pub fn agree(&self) -> bool {
        self.differential == self.support
    }
}

type PolyMap = BTreeMap<Vec<usize>, FieldElement>;

fn to_map(k: &LocalField, poly: &Polynomial) -> Result<PolyMap> {
    let mut map = PolyMap::new();
    for (alpha, c) in &poly.terms {
        let c = k.coerce(c)?;
        match map.get_mut(alpha) {
            Some(acc) => *acc = &*acc + &c,
            None => {
                map.insert(alpha.clone(), c);
            }
        }
    }
    Ok(map)
}

/// Substitutes `x_j = Σ_k m[j][k] y_k`.
fn linear_substitute(k: &LocalField, poly: &PolyMap, m: &Matrix) -> PolyMap {
    let nvars = m.first().map_or(0, |r| r.len());
    let mut out = PolyMap::new();
    for (alpha, c) in poly {
        let mut partial: PolyMap = PolyMap::new();
        partial.insert(vec![0; nvars], c.clone());
        for (j, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                let mut next = PolyMap::new();
                for (gamma, coef) in &partial {
                    for (kk, mjk) in m[j].iter().enumerate() {
                        if mjk.is_zero() && mjk.prec() >= k.prec() {
                            continue;
                        }
                        let mut g = gamma.clone();
                        g[kk] += 1;
                        let t = coef * mjk;
                        match next.get_mut(&g) {
                            Some(acc) => *acc = &*acc + &t,
                            None => {
                                next.insert(g, t);
                            }
                        }
                    }
                }
                partial = next;
            }
        }
        for (g, t) in partial {
            match out.get_mut(&g) {
                Some(acc) => *acc = &*acc + &t,
                None => {
                    out.insert(g, t);
                }
            }
        }
    }
    out
}

fn gradient(poly: &PolyMap, n: usize) -> Vec<PolyMap> {
    (0..n)
        .map(|j| {
            let mut out = PolyMap::new();
            for (alpha, c) in poly {
                if alpha[j] == 0 {
                    continue;
                }
                let mut g = alpha.clone();
                g[j] -= 1;
                let t = c.mul_int(&BigInt::from(alpha[j]));
                match out.get_mut(&g) {
                    Some(acc) => *acc = &*acc + &t,
                    None => {
                        out.insert(g, t);
                    }
                }
            }
            out
        })
        .collect()
}

fn eval_map(k: &LocalField, poly: &PolyMap, x: &[FieldElement]) -> FieldElement {
    poly.iter().fold(k.zero(), |acc, (alpha, c)| {
        let t = alpha.iter().zip(x).fold(c.clone(), |t, (a, xi)| &t * &xi.pow(*a as u64));
        &acc + &t
    })
}

/// Largest total degree accepted by [`sigma_analytic_test`].
pub const MAX_SIGMA_DEGREE: usize = 8;

/// Decides Σ-analyticity of a polynomial by the differential route and the
/// monomial-support route. `sample_points` random Z_p-points are also
/// checked on the differential route.
pub fn sigma_analytic_test<R: Rng>(
    f: &SigmaFunction,
    set: &EmbeddingSet,
    rng: &mut R,
    sample_points: usize,
) -> Result<SigmaVerdict> {
    let k = &set.k;
    let n = set.degree();
    let v = set.conjugate_matrix();
    let vinv = invert(&v, k)?;
    let (x_poly, u_poly) = match f {
        SigmaFunction::Coordinates(p) => {
            check_vars(p, n)?;
            let x = to_map(k, p)?;
            // x = V^{-1} u
            let u = linear_substitute(k, &x, &vinv);
            (x, u)
        }
        SigmaFunction::EmbeddingVariables(p) => {
            check_vars(p, n)?;
            let u = to_map(k, p)?;
            // u = V x
            let x = linear_substitute(k, &u, &v);
            (x, u)
        }
    };
    let w = build_w_sigma(set)?;
    let opts = MembershipOptions::for_field(k);
    let mut decided = true;

    // Differential route: every coefficient vector of df lies in W(Σ).
    let grad = gradient(&x_poly, n);
    let mut monomials: Vec<Vec<usize>> = grad.iter().flat_map(|g| g.keys().cloned()).collect();
    monomials.sort();
    monomials.dedup();
    let mut differential = true;
    let mut test_vector = |vec: Vec<FieldElement>| -> Result<()> {
        let cert = subspace_membership(k, &vec, &w, opts)?;
        match cert.verdict {
            Verdict::Member => {}
            Verdict::NonMember => differential = false,
            Verdict::Inconclusive => decided = false,
        }
        Ok(())
    };
    for mono in &monomials {
        let vec: Vec<FieldElement> = grad.iter().map(|g| g.get(mono).cloned().unwrap_or_else(|| k.zero())).collect();
        test_vector(vec)?;
    }
    for _ in 0..sample_points {
        let pt: Vec<FieldElement> = (0..n).map(|_| k.from_int(rng.gen_range(0..1_000_000))).collect();
        let vec: Vec<FieldElement> = grad.iter().map(|g| eval_map(k, g, &pt)).collect();
        test_vector(vec)?;
    }

    // Support route: only the Σ-variables occur after rewriting in u.
    let mut support = true;
    for (alpha, c) in &u_poly {
        let outside = alpha.iter().enumerate().any(|(s, a)| *a > 0 && !set.sigma.contains(&s));
        if !outside {
            continue;
        }
        if c.val_pi().is_some() {
            support = false;
        } else if c.prec() < opts.certify {
            decided = false;
        }
    }
    Ok(SigmaVerdict { differential, support, decided })
}

fn check_vars(p: &Polynomial, n: usize) -> Result<()> {
    if p.d != n || p.terms.iter().any(|(a, _)| a.len() != n) {
        return Err(Error::InvalidInput(format!("polynomial must have {n} variables")));
    }
    if p.total_degree() > MAX_SIGMA_DEGREE {
        return Err(Error::DegreeOverflow(format!(
            "degree {} exceeds {MAX_SIGMA_DEGREE}",
            p.total_degree()
        )));
    }
    Ok(())
}

fn invert(a: &Matrix, k: &LocalField) -> Result<Matrix> {
    let ech = linalg::echelon(a, k)?;
    if ech.rank() < a.len() {
        return Err(Error::InsufficientTarget { found: ech.rank(), needed: a.len() });
    }
    // R = U A is the identity up to the column order of the pivots.
    let n = a.len();
    let mut inv = linalg::zeros(k, n, n);
    for (row, col) in &ech.pivots {
        inv[*col] = ech.transform[*row].clone();
    }
    Ok(inv)
}

/// The Hodge–Tate datum (W, T).
#[derive(Clone, Debug)]
pub struct HTPair {
    pub lattice: CharacterLattice,
    pub w: DifferentialCondition,
}

/// `(W(Σ), O_L)` for a CM type, with O_L acting on T = O_L by multiplication.
pub fn ht_pair_of_cm(cm: &CMType) -> Result<HTPair> {
    let lattice = CharacterLattice::ring_of_integers(&cm.sigma.l);
    let w = build_w_sigma(&cm.sigma)?;
    Ok(HTPair { lattice, w })
}

/// Checks `M_a^T c_σ = σ(a) c_σ` for every column `c_σ` of W(Σ) and every
/// basis element `a` of O_L.
pub fn eigenvector_check(pair: &HTPair, set: &EmbeddingSet) -> Result<bool> {
    let k = &set.k;
    let Some(mats) = &pair.lattice.ol_action else { return Ok(true) };
    let basis = set.l.integral_basis();
    for (a, m) in basis.iter().zip(mats) {
        for (col, &s) in set.sigma.iter().enumerate() {
            let c = pair.w.column(col);
            let sa = set.all[s].apply(a)?;
            for i in 0..m.len() {
                let lhs = (0..m.len()).fold(k.zero(), |acc, j| &acc + &c[j].mul_int(&m[j][i]));
                if !lhs.eq_at_prec(&(&sa * &c[i])) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Sum over σ ∈ Σ of the eigenspaces of the transposed multiplication by a
/// primitive element, as columns of a matrix.
pub fn eigenspace_basis(set: &EmbeddingSet) -> Result<Matrix> {
    let k = &set.k;
    let l = &set.l;
    let n = set.degree();
    let theta = primitive_element(l, &set.all)?;
    let structure = l.structure_constants();
    // θ is an integer combination of the basis, so M_θ is exact.
    let theta_coords = theta.numerator();
    // M_θ^T[j][i] = coordinate i of θ ω_j.
    let mut mt: Matrix = linalg::zeros(k, n, n);
    for (j, row) in mt.iter_mut().enumerate() {
        for (i, x) in row.iter_mut().enumerate() {
            let c: BigInt = theta_coords.iter().enumerate().map(|(a, t)| t * &structure[a][j][i]).sum();
            *x = k.from_bigint(&c);
        }
    }
    let mut cols: Vec<Vec<FieldElement>> = Vec::new();
    for &s in &set.sigma {
        let lambda = set.all[s].apply(&theta)?;
        let mut shifted = mt.clone();
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] = &row[i] - &lambda;
        }
        cols.extend(linalg::kernel(&shifted, k, n)?);
    }
    Ok(if cols.is_empty() { vec![Vec::new(); n] } else { linalg::transpose(&cols) })
}

/// Rank of the column span of the concatenation `[A | B]`.
pub fn joint_rank(a: &Matrix, b: &Matrix, k: &LocalField) -> Result<usize> {
    let joined: Matrix = a.iter().zip(b).map(|(x, y)| x.iter().chain(y).cloned().collect()).collect();
    if joined.first().map_or(true, |r| r.is_empty()) {
        return Ok(0);
    }
    linalg::rank(&joined, k)
}
