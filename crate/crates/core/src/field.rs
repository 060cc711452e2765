//! Local fields of the form Q_p, Q_q = Q_p[t]/(g), Q_p[π]/(E) and the two-step
//! tower Q_q[π]/(E), with elements stored at an absolute π-adic precision.
//!
//! An element is `num / p^shift` where `num` is an integral combination of the
//! power basis `π^i t^j` (`0 <= i < e`, `0 <= j < f`). Because the terms
//! `c_i π^i` with `c_i ∈ Z_q` have pairwise distinct valuations mod `e`, the
//! ideal `π^N O` is exactly the set of combinations whose `Z_p`-coordinates in
//! row `i` are divisible by `p^⌈(N - i)/e⌉`. Canonical forms reduce each
//! coordinate accordingly, so two elements with the same precision are equal
//! iff their representations are equal.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::residue;
use crate::valuation::PValuation;

/// Shape of a local field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Base,
    Unramified,
    Eisenstein,
    TwoStep,
}

impl FieldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::Base => "base",
            FieldKind::Unramified => "unramified",
            FieldKind::Eisenstein => "eisenstein",
            FieldKind::TwoStep => "two-step",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(FieldKind::Base),
            "unramified" => Ok(FieldKind::Unramified),
            "eisenstein" => Ok(FieldKind::Eisenstein),
            "two-step" | "two_step" => Ok(FieldKind::TwoStep),
            other => Err(Error::UnsupportedTower(format!("unknown field kind {other:?}"))),
        }
    }
}

/// Construction data for [`LocalField::create`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Base,
    /// Monic polynomial over Z, coefficients low to high, irreducible mod p.
    Unramified(Vec<BigInt>),
    /// Monic Eisenstein polynomial over Z, coefficients low to high.
    Eisenstein(Vec<BigInt>),
    /// Unramified polynomial `g(t)` followed by an Eisenstein polynomial whose
    /// coefficients are elements of `Z[t]/(g)` (each a vector of length `deg g`).
    TwoStep {
        unramified: Vec<BigInt>,
        eisenstein: Vec<Vec<BigInt>>,
    },
}

pub(crate) struct FieldCore {
    pub(crate) p: u32,
    pub(crate) p_big: BigInt,
    pub(crate) kind: FieldKind,
    pub(crate) e: usize,
    pub(crate) f: usize,
    /// `g`, monic of degree f (for f = 1 this is `t`).
    pub(crate) unram: Vec<BigInt>,
    /// `E` with Z_q coefficients, monic of degree e (for e = 1 this is `X - p`).
    pub(crate) eis: Vec<Vec<BigInt>>,
    pub(crate) id: String,
    pow_cache: Vec<BigInt>,
    log2_p: f64,
}

impl FieldCore {
    pub(crate) fn n(&self) -> usize {
        self.e * self.f
    }

    pub(crate) fn pow_p(&self, k: u32) -> BigInt {
        match self.pow_cache.get(k as usize) {
            Some(v) => v.clone(),
            None => num_traits::pow(self.p_big.clone(), k as usize),
        }
    }

    fn same_structure(&self, other: &FieldCore) -> bool {
        self.p == other.p && self.unram == other.unram && self.eis == other.eis
    }

    fn zq_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let f = self.f;
        if f == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut out = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        self.reduce_t(&mut out);
        out.truncate(f);
        out
    }

    fn reduce_t(&self, row: &mut [BigInt]) {
        let f = self.f;
        if row.len() <= f {
            return;
        }
        for deg in (f..row.len()).rev() {
            if row[deg].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut row[deg]);
            for k in 0..f {
                if !self.unram[k].is_zero() {
                    row[deg - f + k] -= &c * &self.unram[k];
                }
            }
        }
    }

    /// Exact product of two integral numerators (no modular reduction).
    pub(crate) fn mul_raw(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let (e, f) = (self.e, self.f);
        if e == 1 && f == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut rows = vec![vec![BigInt::zero(); 2 * f - 1]; 2 * e - 1];
        for i1 in 0..e {
            for j1 in 0..f {
                let x = &a[i1 * f + j1];
                if x.is_zero() {
                    continue;
                }
                for i2 in 0..e {
                    for j2 in 0..f {
                        let y = &b[i2 * f + j2];
                        if !y.is_zero() {
                            rows[i1 + i2][j1 + j2] += x * y;
                        }
                    }
                }
            }
        }
        for row in rows.iter_mut() {
            self.reduce_t(row);
            row.truncate(f);
        }
        for i in (e..2 * e - 1).rev() {
            let top = std::mem::take(&mut rows[i]);
            if top.iter().all(|c| c.is_zero()) {
                continue;
            }
            for k in 0..e {
                let prod = self.zq_mul(&top, &self.eis[k]);
                for (dst, c) in rows[i - e + k].iter_mut().zip(prod) {
                    *dst -= c;
                }
            }
        }
        let mut out = Vec::with_capacity(e * f);
        for row in rows.into_iter().take(e) {
            out.extend(row);
        }
        out
    }

    /// Reduces `num / p^shift` modulo π^prec and strips common factors of p.
    fn canonicalize(&self, num: &mut [BigInt], shift: &mut u32, prec: i64) {
        let (e, f) = (self.e as i64, self.f);
        for i in 0..self.e {
            let k = *shift as i64 + ceil_div(prec - i as i64, e);
            let mut modulus: Option<BigInt> = None;
            for j in 0..f {
                let c = &mut num[i * f + j];
                if c.is_zero() {
                    continue;
                }
                if k <= 0 {
                    c.set_zero();
                    continue;
                }
                // Nonnegative values visibly below p^k need no reduction.
                if c.sign() == num_bigint::Sign::Plus && (c.bits() as f64) < (k as f64) * self.log2_p - 1.0 {
                    continue;
                }
                let m = modulus.get_or_insert_with(|| self.pow_p(k as u32));
                *c = c.mod_floor(m);
            }
        }
        if num.iter().all(|c| c.is_zero()) {
            *shift = 0;
            return;
        }
        while *shift > 0 && num.iter().all(|c| (c % &self.p_big).is_zero()) {
            for c in num.iter_mut() {
                *c = &*c / &self.p_big;
            }
            *shift -= 1;
        }
    }
}

/// A finite extension of Q_p together with a default absolute precision
/// (elements are known modulo π^prec).
#[derive(Clone)]
pub struct LocalField {
    pub(crate) core: Arc<FieldCore>,
    prec: i64,
}

impl fmt::Debug for LocalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ O(π^{})", self.core.id, self.prec)
    }
}

impl PartialEq for LocalField {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.prec == other.prec
    }
}

fn vp_big(x: &BigInt, p: &BigInt) -> u32 {
    if x.is_zero() {
        return u32::MAX;
    }
    let mut v = 0;
    let mut m = x.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn poly_to_string(coeffs: &[BigInt], var: &str) -> String {
    let terms: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
    format!("{var}:[{}]", terms.join(","))
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl LocalField {
    /// Validates construction data and builds the field.
    pub fn create(p: u32, spec: FieldSpec, prec: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPolynomial(format!("{p} is not prime")));
        }
        if prec < 1 {
            return Err(Error::InvalidInput(format!("precision must be >= 1, got {prec}")));
        }
        let p_big = BigInt::from(p);
        let (kind, unram, eis) = match spec {
            FieldSpec::Base => (
                FieldKind::Base,
                vec![BigInt::zero(), BigInt::one()],
                vec![vec![-p_big.clone()], vec![BigInt::one()]],
            ),
            FieldSpec::Unramified(g) => {
                check_unramified(&g, p)?;
                let f = g.len() - 1;
                let mut a0 = vec![BigInt::zero(); f];
                a0[0] = -p_big.clone();
                let mut one = vec![BigInt::zero(); f];
                one[0] = BigInt::one();
                (FieldKind::Unramified, g, vec![a0, one])
            }
            FieldSpec::Eisenstein(poly) => {
                let coeffs: Vec<Vec<BigInt>> = poly.iter().map(|c| vec![c.clone()]).collect();
                check_eisenstein(&coeffs, &p_big)?;
                (FieldKind::Eisenstein, vec![BigInt::zero(), BigInt::one()], coeffs)
            }
            FieldSpec::TwoStep { unramified, eisenstein } => {
                check_unramified(&unramified, p)?;
                let f = unramified.len() - 1;
                if eisenstein.iter().any(|c| c.len() > f) {
                    return Err(Error::InvalidPolynomial(
                        "Eisenstein coefficient exceeds the unramified degree".into(),
                    ));
                }
                let coeffs: Vec<Vec<BigInt>> = eisenstein
                    .into_iter()
                    .map(|mut c| {
                        c.resize(f, BigInt::zero());
                        c
                    })
                    .collect();
                check_eisenstein(&coeffs, &p_big)?;
                (FieldKind::TwoStep, unramified, coeffs)
            }
        };
        let f = unram.len() - 1;
        let e = eis.len() - 1;
        let id = match kind {
            FieldKind::Base => format!("Q{p}"),
            FieldKind::Unramified => format!("Q{p}({})", poly_to_string(&unram, "t")),
            FieldKind::Eisenstein => {
                let flat: Vec<BigInt> = eis.iter().map(|c| c[0].clone()).collect();
                format!("Q{p}({})", poly_to_string(&flat, "pi"))
            }
            FieldKind::TwoStep => {
                let parts: Vec<String> = eis
                    .iter()
                    .map(|c| {
                        let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                        format!("[{}]", s.join(","))
                    })
                    .collect();
                format!("Q{p}({})(pi:[{}])", poly_to_string(&unram, "t"), parts.join(","))
            }
        };
        let mut pow_cache = Vec::with_capacity(400);
        let mut acc = BigInt::one();
        for _ in 0..400 {
            pow_cache.push(acc.clone());
            acc *= &p_big;
        }
        Ok(LocalField {
            core: Arc::new(FieldCore { p, p_big, kind, e, f, unram, eis, id, pow_cache, log2_p: (p as f64).log2() }),
            prec,
        })
    }

    pub fn qp(p: u32, prec: i64) -> Result<Self> {
        Self::create(p, FieldSpec::Base, prec)
    }

    pub fn unramified(p: u32, poly: &[i64], prec: i64) -> Result<Self> {
        Self::create(p, FieldSpec::Unramified(to_big(poly)), prec)
    }

    /// Unramified extension of degree `f` with the first irreducible modulus.
    pub fn unramified_of_degree(p: u32, f: usize, prec: i64) -> Result<Self> {
        if f == 1 {
            return Self::qp(p, prec);
        }
        let g = residue::first_irreducible(p as u64, f);
        let g: Vec<BigInt> = g.into_iter().map(BigInt::from).collect();
        Self::create(p, FieldSpec::Unramified(g), prec)
    }

    pub fn eisenstein(p: u32, poly: &[i64], prec: i64) -> Result<Self> {
        Self::create(p, FieldSpec::Eisenstein(to_big(poly)), prec)
    }

    /// Q_p(ζ_{p^k}) presented by the Eisenstein polynomial Φ_{p^k}(X + 1), so
    /// that `1 + π` is a primitive p^k-th root of unity.
    pub fn cyclotomic(p: u32, k: u32, prec: i64) -> Result<Self> {
        if k == 0 {
            return Self::qp(p, prec);
        }
        Self::create(p, FieldSpec::Eisenstein(cyclotomic_shifted(p, k)), prec)
    }

    pub fn p(&self) -> u32 {
        self.core.p
    }

    pub fn p_big(&self) -> &BigInt {
        &self.core.p_big
    }

    pub fn e(&self) -> usize {
        self.core.e
    }

    pub fn f(&self) -> usize {
        self.core.f
    }

    /// Degree over Q_p.
    pub fn degree(&self) -> usize {
        self.core.n()
    }

    /// Residue field cardinality.
    pub fn q(&self) -> u64 {
        (self.core.p as u64).pow(self.core.f as u32)
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn kind(&self) -> FieldKind {
        self.core.kind
    }

    pub fn id(&self) -> &str {
        &self.core.id
    }

    pub fn unramified_poly(&self) -> &[BigInt] {
        &self.core.unram
    }

    pub fn eisenstein_poly(&self) -> &[Vec<BigInt>] {
        &self.core.eis
    }

    pub fn with_precision(&self, prec: i64) -> LocalField {
        LocalField { core: self.core.clone(), prec }
    }

    /// Same underlying field, ignoring default precision.
    pub fn same_field(&self, other: &LocalField) -> bool {
        Arc::ptr_eq(&self.core, &other.core) || self.core.same_structure(&other.core)
    }

    pub(crate) fn element(&self, num: Vec<BigInt>, shift: u32, prec: i64) -> FieldElement {
        FieldElement::from_parts(self.core.clone(), num, shift, prec)
    }

    pub fn zero(&self) -> FieldElement {
        self.element(vec![BigInt::zero(); self.degree()], 0, self.prec)
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = n.clone();
        self.element(num, 0, self.prec)
    }

    /// `num / den` for integers; errors when `den == 0`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<FieldElement> {
        self.from_int(num).div_int(&BigInt::from(den))
    }

    /// Element from power-basis coordinates `π^i t^j` at index `i*f + j`.
    pub fn from_coords(&self, coords: &[BigInt]) -> Result<FieldElement> {
        if coords.len() > self.degree() {
            return Err(Error::InvalidInput(format!(
                "{} coordinates for a degree-{} field",
                coords.len(),
                self.degree()
            )));
        }
        let mut num = coords.to_vec();
        num.resize(self.degree(), BigInt::zero());
        Ok(self.element(num, 0, self.prec))
    }

    pub fn from_coords_i64(&self, coords: &[i64]) -> Result<FieldElement> {
        self.from_coords(&to_big(coords))
    }

    /// The uniformizer: π for ramified fields, p otherwise.
    pub fn uniformizer(&self) -> FieldElement {
        if self.e() == 1 {
            return self.from_bigint(&self.core.p_big);
        }
        let mut num = vec![BigInt::zero(); self.degree()];
        num[self.f()] = BigInt::one();
        self.element(num, 0, self.prec)
    }

    /// The generator `t` of the unramified part (zero when f = 1).
    pub fn unramified_generator(&self) -> FieldElement {
        let mut num = vec![BigInt::zero(); self.degree()];
        if self.f() > 1 {
            num[1] = BigInt::one();
        }
        self.element(num, 0, self.prec)
    }

    /// Basis element `π^i t^j`.
    pub fn basis_element(&self, i: usize, j: usize) -> FieldElement {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[i * self.f() + j] = BigInt::one();
        self.element(num, 0, self.prec)
    }

    /// Power basis `π^i t^j` ordered by `i*f + j`; also a Z_p-basis of O.
    /// Exact integer products of the integral basis: `ω_a ω_b = Σ_c s[a][b][c] ω_c`.
    pub(crate) fn structure_constants(&self) -> Vec<Vec<Vec<BigInt>>> {
        let n = self.degree();
        let unit = |a: usize| (0..n).map(|c| BigInt::from((a == c) as u8)).collect::<Vec<_>>();
        (0..n).map(|a| (0..n).map(|b| self.core.mul_raw(&unit(a), &unit(b))).collect()).collect()
    }

    pub fn integral_basis(&self) -> Vec<FieldElement> {
        (0..self.e())
            .flat_map(|i| (0..self.f()).map(move |j| (i, j)))
            .map(|(i, j)| self.basis_element(i, j))
            .collect()
    }

    /// Representatives `Σ c_j t^j`, `0 <= c_j < p`, of the residue field.
    pub fn residue_representatives(&self) -> Vec<FieldElement> {
        let p = self.p() as u64;
        let f = self.f();
        let q = self.q();
        (0..q)
            .map(|code| {
                let mut c = code;
                let mut num = vec![BigInt::zero(); self.degree()];
                for slot in num.iter_mut().take(f) {
                    *slot = BigInt::from(c % p);
                    c /= p;
                }
                self.element(num, 0, self.prec)
            })
            .collect()
    }

    /// Maps an element whose coordinates are Q_p-rational into this field.
    pub fn coerce_rational(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.core.p != self.core.p {
            return Err(Error::FieldMismatch);
        }
        if x.num.iter().skip(1).any(|c| !c.is_zero()) {
            return Err(Error::FieldMismatch);
        }
        let digits = ceil_div(x.prec, x.core.e as i64);
        let prec = if x.core.e == 1 { x.prec * self.e() as i64 } else { digits * self.e() as i64 };
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = x.num[0].clone();
        Ok(self.element(num, x.shift, prec))
    }

    /// Coerces an element of this field or of Q_p.
    pub fn coerce(&self, x: &FieldElement) -> Result<FieldElement> {
        if self.core.same_structure(&x.core) {
            let mut y = x.clone();
            y.core = self.core.clone();
            return Ok(y);
        }
        if x.core.kind == FieldKind::Base {
            return self.coerce_rational(x);
        }
        Err(Error::FieldMismatch)
    }

    /// Detects presentations Φ_{p^k}(X + 1) and returns k.
    pub fn cyclotomic_level(&self) -> Option<u32> {
        if !matches!(self.kind(), FieldKind::Eisenstein | FieldKind::TwoStep) {
            return None;
        }
        let flat: Vec<BigInt> = self
            .core
            .eis
            .iter()
            .map(|c| {
                if c.iter().skip(1).any(|x| !x.is_zero()) {
                    None
                } else {
                    Some(c[0].clone())
                }
            })
            .collect::<Option<Vec<_>>>()?;
        let e = self.e() as u64;
        let p = self.p() as u64;
        let mut k = 1u32;
        let mut deg = p - 1;
        while deg < e {
            deg *= p;
            k += 1;
        }
        if deg != e {
            return None;
        }
        (flat == cyclotomic_shifted(self.p(), k)).then_some(k)
    }

    /// A primitive p^n-th root of unity in this field.
    pub fn primitive_root_of_unity(&self, n: u32) -> Result<FieldElement> {
        if n == 0 {
            return Ok(self.one());
        }
        let order = (self.p() as u64).pow(n);
        if let Some(k) = self.cyclotomic_level() {
            if k >= n {
                let zeta = &self.one() + &self.uniformizer();
                return Ok(zeta.pow((self.p() as u64).pow(k - n)));
            }
        }
        // General case: root search on Φ_{p^n}(1 + X).
        let poly: Vec<FieldElement> =
            cyclotomic_shifted(self.p(), n).iter().map(|c| self.from_bigint(c)).collect();
        let roots = crate::roots::roots_in_field(self, &poly).map_err(|_| Error::MissingRootsOfUnity(order))?;
        match roots.first() {
            Some(r) => Ok(&self.one() + r),
            None => Err(Error::MissingRootsOfUnity(order)),
        }
    }
}

/// Ceiling division for a positive divisor.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|c| BigInt::from(*c)).collect()
}

/// Coefficients (low to high) of Φ_{p^k}(X + 1) = Σ_{j<p} (X+1)^{j p^{k-1}}.
pub fn cyclotomic_shifted(p: u32, k: u32) -> Vec<BigInt> {
    let m = (p as usize).pow(k - 1);
    let deg = (p as usize - 1) * m;
    let mut out = vec![BigInt::zero(); deg + 1];
    for j in 0..p as usize {
        let n = j * m;
        let mut binom = BigInt::one();
        for (i, slot) in out.iter_mut().enumerate().take(n + 1) {
            *slot += &binom;
            if i < n {
                binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
            }
        }
    }
    out
}

fn check_unramified(g: &[BigInt], p: u32) -> Result<()> {
    if g.len() < 2 {
        return Err(Error::InvalidPolynomial("unramified polynomial must have degree >= 1".into()));
    }
    if !g.last().unwrap().is_one() {
        return Err(Error::InvalidPolynomial("unramified polynomial must be monic".into()));
    }
    let pb = BigInt::from(p);
    let red: Vec<u64> = g.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    if !residue::is_irreducible(&red, p as u64) {
        return Err(Error::InvalidPolynomial(format!(
            "{} is reducible modulo {p}",
            poly_to_string(g, "t")
        )));
    }
    Ok(())
}

fn check_eisenstein(coeffs: &[Vec<BigInt>], p: &BigInt) -> Result<()> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidPolynomial("Eisenstein polynomial must have degree >= 1".into()));
    }
    let lead = coeffs.last().unwrap();
    if !lead[0].is_one() || lead.iter().skip(1).any(|c| !c.is_zero()) {
        return Err(Error::InvalidPolynomial("Eisenstein polynomial must be monic".into()));
    }
    let v = |c: &[BigInt]| c.iter().map(|x| vp_big(x, p)).min().unwrap_or(u32::MAX);
    if v(&coeffs[0]) != 1 {
        return Err(Error::InvalidPolynomial("constant term must have valuation exactly 1".into()));
    }
    if coeffs[1..coeffs.len() - 1].iter().any(|c| v(c) < 1) {
        return Err(Error::InvalidPolynomial("middle coefficients must be divisible by p".into()));
    }
    Ok(())
}

/// An element of a [`LocalField`] known modulo π^prec.
#[derive(Clone)]
pub struct FieldElement {
    pub(crate) core: Arc<FieldCore>,
    pub(crate) num: Vec<BigInt>,
    pub(crate) shift: u32,
    pub(crate) prec: i64,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.core.same_structure(&other.core)
            && self.prec == other.prec
            && self.shift == other.shift
            && self.num == other.num
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (e, f) = (self.core.e, self.core.f);
        let mut terms = Vec::new();
        for i in 0..e {
            for j in 0..f {
                let c = &self.num[i * f + j];
                if c.is_zero() {
                    continue;
                }
                let mut t = c.to_string();
                if i > 0 {
                    t.push_str(&format!("*pi^{i}"));
                }
                if j > 0 {
                    t.push_str(&format!("*t^{j}"));
                }
                terms.push(t);
            }
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if self.shift > 0 {
            write!(fm, "({body})/{}^{} + O(pi^{})", self.core.p, self.shift, self.prec)
        } else {
            write!(fm, "{body} + O(pi^{})", self.prec)
        }
    }
}

impl FieldElement {
    pub(crate) fn from_parts(core: Arc<FieldCore>, mut num: Vec<BigInt>, mut shift: u32, prec: i64) -> Self {
        core.canonicalize(&mut num, &mut shift, prec);
        FieldElement { core, num, shift, prec }
    }

    fn same(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.core, &other.core) || self.core.same_structure(&other.core)
    }

    fn assert_same(&self, other: &FieldElement) {
        assert!(self.same(other), "field mismatch: {} vs {}", self.core.id, other.core.id);
    }

    /// The parent field at this element's precision.
    pub fn field(&self) -> LocalField {
        LocalField { core: self.core.clone(), prec: self.prec.max(1) }
    }

    pub fn same_field_as(&self, other: &FieldElement) -> bool {
        self.same(other)
    }

    pub fn in_field(&self, k: &LocalField) -> bool {
        Arc::ptr_eq(&self.core, &k.core) || self.core.same_structure(&k.core)
    }

    pub fn p(&self) -> u32 {
        self.core.p
    }

    pub fn e(&self) -> usize {
        self.core.e
    }

    /// Absolute precision in powers of the uniformizer.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Absolute precision normalized so that v(p) = 1.
    pub fn precision(&self) -> PValuation {
        PValuation::from_pi_units(self.prec, self.core.e)
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Valuation in uniformizer units, `None` if indistinguishable from zero.
    pub fn val_pi(&self) -> Option<i64> {
        let (e, f) = (self.core.e, self.core.f);
        let mut best: Option<i64> = None;
        for i in 0..e {
            let vrow = (0..f).map(|j| vp_big(&self.num[i * f + j], &self.core.p_big)).min().unwrap();
            if vrow == u32::MAX {
                continue;
            }
            let v = e as i64 * vrow as i64 + i as i64;
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        best.map(|v| v - e as i64 * self.shift as i64)
    }

    /// Valuation, or the precision when the element is zero at its precision.
    pub fn val_lower_bound(&self) -> i64 {
        self.val_pi().unwrap_or(self.prec)
    }

    pub fn valuation(&self) -> PValuation {
        match self.val_pi() {
            Some(v) => PValuation::from_pi_units(v, self.core.e),
            None => PValuation::Infinite,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.val_lower_bound() >= 0
    }

    /// Equality modulo the smaller of the two precisions.
    pub fn eq_at_prec(&self, other: &FieldElement) -> bool {
        (self - other).is_zero()
    }

    /// Drops digits beyond `prec` (no-op if already coarser).
    pub fn with_prec(&self, prec: i64) -> FieldElement {
        if prec >= self.prec {
            return self.clone();
        }
        FieldElement::from_parts(self.core.clone(), self.num.clone(), self.shift, prec)
    }

    /// Treats the stored representative as exact up to a higher precision.
    /// Used where the true precision is established analytically afterwards.
    pub fn lift_prec(&self, prec: i64) -> FieldElement {
        FieldElement { prec: prec.max(self.prec), ..self.clone() }
    }

    fn align(&self, s: u32) -> Vec<BigInt> {
        if s == self.shift {
            return self.num.clone();
        }
        let m = self.core.pow_p(s - self.shift);
        self.num.iter().map(|c| c * &m).collect()
    }

    fn add_impl(&self, other: &FieldElement, negate: bool) -> FieldElement {
        self.assert_same(other);
        let s = self.shift.max(other.shift);
        let a = self.align(s);
        let b = other.align(s);
        let num = a
            .into_iter()
            .zip(b)
            .map(|(x, y)| if negate { x - y } else { x + y })
            .collect();
        FieldElement::from_parts(self.core.clone(), num, s, self.prec.min(other.prec))
    }

    fn mul_impl(&self, other: &FieldElement) -> FieldElement {
        self.assert_same(other);
        let prec = (self.prec + other.val_lower_bound()).min(other.prec + self.val_lower_bound());
        let num = self.core.mul_raw(&self.num, &other.num);
        FieldElement::from_parts(self.core.clone(), num, self.shift + other.shift, prec)
    }

    pub fn square(&self) -> FieldElement {
        self.mul_impl(self)
    }

    pub fn pow(&self, mut k: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc: Option<FieldElement> = None;
        if k == 0 {
            return LocalField { core: self.core.clone(), prec: self.prec.max(1) }.one();
        }
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        acc.unwrap()
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> FieldElement {
        if n.is_zero() {
            return FieldElement::from_parts(self.core.clone(), vec![BigInt::zero(); self.core.n()], 0, i64::MAX / 4);
        }
        let v = vp_big(n, &self.core.p_big) as i64;
        let num = self.num.iter().map(|c| c * n).collect();
        FieldElement::from_parts(self.core.clone(), num, self.shift, self.prec + v * self.core.e as i64)
    }

    /// Division by an exact nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Result<FieldElement> {
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = vp_big(n, &self.core.p_big);
        let unit = n / self.core.pow_p(v);
        let prec = self.prec - v as i64 * self.core.e as i64;
        let shift = self.shift + v;
        let (e, _) = (self.core.e as i64, ());
        let k = shift as i64 + ceil_div(prec, e) + 1;
        let modulus = self.core.pow_p(k.max(1) as u32);
        let inv = mod_inverse(&unit.mod_floor(&modulus), &modulus).expect("unit is invertible");
        let num = self.num.iter().map(|c| c * &inv).collect();
        Ok(FieldElement::from_parts(self.core.clone(), num, shift, prec))
    }

    /// Inverse to absolute precision `target` (computed from the representative).
    fn inverse_to(&self, target: i64) -> Result<FieldElement> {
        let w = self.val_pi().ok_or(Error::DivisionByZero)?;
        let core = &self.core;
        let n = core.n();
        let e = core.e as i64;
        // Valuation of Y = num as an integral element.
        let wy = w + e * self.shift as i64;
        let det_v = core.f as i64 * wy;
        let digits = ceil_div(target + e * self.shift as i64, e).max(1) + 2 * det_v + 6;
        let modulus = core.pow_p(digits as u32);
        let mut mat = vec![vec![BigInt::zero(); n]; n];
        for k in 0..n {
            let mut basis = vec![BigInt::zero(); n];
            basis[k] = BigInt::one();
            let col = core.mul_raw(&self.num, &basis);
            for (r, c) in col.into_iter().enumerate() {
                mat[r][k] = c.mod_floor(&modulus);
            }
        }
        let mut rhs = vec![BigInt::zero(); n];
        rhs[0] = BigInt::one();
        let (z, t) = solve_zp(mat, rhs, &core.p_big, &modulus).ok_or(Error::DivisionByZero)?;
        // 1/y = p^shift * Z / p^t
        let (num, shift) = if t >= self.shift {
            (z, t - self.shift)
        } else {
            let m = core.pow_p(self.shift - t);
            (z.into_iter().map(|c| c * &m).collect(), 0)
        };
        Ok(FieldElement::from_parts(core.clone(), num, shift, target))
    }

    /// Checked division with precision propagation.
    pub fn div(&self, y: &FieldElement) -> Result<FieldElement> {
        if !self.same(y) {
            return Err(Error::FieldMismatch);
        }
        let vy = y.val_pi().ok_or(Error::DivisionByZero)?;
        let vx = self.val_lower_bound();
        let prec = (self.prec - vy).min(y.prec + vx - 2 * vy);
        if let Some(vx) = self.val_pi() {
            if prec <= vx - vy {
                return Err(Error::PrecisionExhausted(format!(
                    "quotient has valuation {} but precision {}",
                    vx - vy,
                    prec
                )));
            }
        }
        let inv = y.inverse_to(prec - vx + self.core.e as i64 + 2)?;
        let num = self.core.mul_raw(&self.num, &inv.num);
        Ok(FieldElement::from_parts(self.core.clone(), num, self.shift + inv.shift, prec))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        LocalField { core: self.core.clone(), prec: self.prec.max(1) }
            .one()
            .lift_prec(self.prec.max(1) + 4 * self.val_lower_bound().abs())
            .div(self)
    }

    /// Integer representative and p-adic digit count for an element of Z_p.
    pub fn as_zp(&self) -> Result<(BigInt, i64)> {
        if self.num.iter().skip(1).any(|c| !c.is_zero()) {
            return Err(Error::NotZpRational(self.to_string()));
        }
        if self.shift > 0 {
            return Err(Error::NotZpRational(format!("{self} is not integral")));
        }
        let digits = ceil_div(self.prec, self.core.e as i64);
        Ok((self.num[0].clone(), digits))
    }

    /// Residue class modulo π as coordinates in F_p[t]/(g), if integral.
    pub fn residue(&self) -> Option<Vec<u64>> {
        if self.shift > 0 {
            return None;
        }
        let p = &self.core.p_big;
        Some(
            self.num[..self.core.f]
                .iter()
                .map(|c| c.mod_floor(p).to_u64().unwrap())
                .collect(),
        )
    }

    /// Canonical base-p digit expansion of each numerator coordinate
    /// (little endian).
    pub fn digit_arrays(&self) -> Vec<Vec<u32>> {
        let p = &self.core.p_big;
        self.num
            .iter()
            .map(|c| {
                let mut out = Vec::new();
                let mut m = c.clone();
                while !m.is_zero() {
                    let (q, r) = m.div_rem(p);
                    out.push(r.to_u32().unwrap());
                    m = q;
                }
                out
            })
            .collect()
    }

    /// Rebuilds an element from base-p digit arrays.
    pub fn from_digit_arrays(k: &LocalField, digits: &[Vec<u32>], shift: u32, prec: i64) -> Result<FieldElement> {
        if digits.len() > k.degree() {
            return Err(Error::InvalidInput("too many coordinates".into()));
        }
        let p = BigInt::from(k.p());
        let mut num = vec![BigInt::zero(); k.degree()];
        for (slot, ds) in num.iter_mut().zip(digits) {
            let mut acc = BigInt::zero();
            for d in ds.iter().rev() {
                if *d >= k.p() {
                    return Err(Error::InvalidInput(format!("digit {d} out of range")));
                }
                acc = acc * &p + BigInt::from(*d);
            }
            *slot = acc;
        }
        Ok(FieldElement::from_parts(k.core.clone(), num, shift, prec))
    }

    pub fn is_one(&self) -> bool {
        let one = LocalField { core: self.core.clone(), prec: self.prec.max(1) }.one();
        self.eq_at_prec(&one)
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        self.mul_impl(rhs)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let num = self.num.iter().map(|c| -c).collect();
        FieldElement::from_parts(self.core.clone(), num, self.shift, self.prec)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        &self + &rhs
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        &self - &rhs
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        &self * &rhs
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Binary operations for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic on two elements of the same field.
pub fn arith(x: &FieldElement, y: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    if !x.same(y) {
        return Err(Error::FieldMismatch);
    }
    let out = match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => return x.div(y),
    };
    if out.prec <= i64::MIN / 8 {
        return Err(Error::PrecisionExhausted("precision underflow".into()));
    }
    Ok(out)
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Solves `A z = b` over Z_p modulo `modulus = p^W` with full valuation
/// pivoting. Returns `(Z, T)` with `z = Z / p^T`.
pub(crate) fn solve_zp(
    mut a: Vec<Vec<BigInt>>,
    mut b: Vec<BigInt>,
    p: &BigInt,
    modulus: &BigInt,
) -> Option<(Vec<BigInt>, u32)> {
    let n = a.len();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut piv_v = vec![0u32; n];
    let mut piv_inv = vec![BigInt::zero(); n];
    for k in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(k) {
            for (c, x) in row.iter().enumerate().skip(k) {
                let v = vp_big(x, p);
                if v != u32::MAX && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, r, c));
                }
            }
        }
        let (v, r, c) = best?;
        a.swap(k, r);
        b.swap(k, r);
        for row in a.iter_mut() {
            row.swap(k, c);
        }
        cols.swap(k, c);
        let pv = num_traits::pow(p.clone(), v as usize);
        let unit = (&a[k][k] / &pv).mod_floor(modulus);
        let uinv = mod_inverse(&unit, modulus)?;
        piv_v[k] = v;
        piv_inv[k] = uinv.clone();
        for r in k + 1..n {
            if a[r][k].is_zero() {
                continue;
            }
            let m = ((&a[r][k] / &pv) * &uinv).mod_floor(modulus);
            for j in k..n {
                let t = &m * &a[k][j];
                a[r][j] = (&a[r][j] - t).mod_floor(modulus);
            }
            let t = &m * &b[k];
            b[r] = (&b[r] - t).mod_floor(modulus);
        }
    }
    let t: u32 = piv_v.iter().sum();
    let pt = num_traits::pow(p.clone(), t as usize);
    let mut z = vec![BigInt::zero(); n];
    for k in (0..n).rev() {
        let mut acc = &b[k] * &pt;
        for j in k + 1..n {
            acc -= &a[k][j] * &z[j];
        }
        let acc = acc.mod_floor(modulus);
        let pv = num_traits::pow(p.clone(), piv_v[k] as usize);
        z[k] = ((acc / pv) * &piv_inv[k]).mod_floor(modulus);
    }
    let mut out = vec![BigInt::zero(); n];
    for (k, c) in cols.iter().enumerate() {
        out[*c] = z[k].clone();
    }
    let _ = Signed::abs(&BigInt::one());
    Some((out, t))
}
