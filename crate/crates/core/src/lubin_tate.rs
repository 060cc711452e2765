//! Lubin–Tate formal groups over O_L at a total-degree truncation.
//!
//! Everything is built by the same degree-by-degree recursion: a series `g`
//! with prescribed linear part and `f ∘ g = g ∘ (f, …, f)` is determined one
//! homogeneous degree at a time by `g_k = −E_k / (π − π^k)`, where `E_k` is
//! the degree-k defect of the partial solution.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::valuation::PValuation;

/// Default total-degree bound.
pub const DEFAULT_DEGREE: usize = 12;

/// A power series in `vars` variables with all monomials of total degree
/// above `degree` dropped.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    pub field: LocalField,
    pub vars: usize,
    pub degree: usize,
    coeffs: BTreeMap<Vec<usize>, FieldElement>,
}

fn total(alpha: &[usize]) -> usize {
    alpha.iter().sum()
}

impl TruncatedSeries {
    pub fn zero(k: &LocalField, vars: usize, degree: usize) -> Self {
        TruncatedSeries { field: k.clone(), vars, degree, coeffs: BTreeMap::new() }
    }

    /// The coordinate function `X_i`.
    pub fn var(k: &LocalField, vars: usize, degree: usize, i: usize) -> Self {
        let mut s = Self::zero(k, vars, degree);
        let mut alpha = vec![0; vars];
        alpha[i] = 1;
        s.set(alpha, k.one());
        s
    }

    /// One-variable series from its coefficient list `c_0, c_1, …`.
    pub fn from_coeffs(k: &LocalField, degree: usize, coeffs: &[FieldElement]) -> Self {
        let mut s = Self::zero(k, 1, degree);
        for (i, c) in coeffs.iter().enumerate().take(degree + 1) {
            s.set(vec![i], c.clone());
        }
        s
    }

    pub fn from_terms(k: &LocalField, vars: usize, degree: usize, terms: Vec<(Vec<usize>, FieldElement)>) -> Result<Self> {
        let mut s = Self::zero(k, vars, degree);
        for (alpha, c) in terms {
            if alpha.len() != vars {
                return Err(Error::InvalidInput(format!("exponent vector of length {} for {vars} variables", alpha.len())));
            }
            let cur = s.coeff(&alpha);
            s.set(alpha, &cur + &c);
        }
        Ok(s)
    }

    pub fn coeff(&self, alpha: &[usize]) -> FieldElement {
        self.coeffs.get(alpha).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Coefficient of `X^n` of a one-variable series.
    pub fn coeff1(&self, n: usize) -> FieldElement {
        self.coeff(&[n])
    }

    /// Nonzero-or-imprecise terms in graded lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<usize>, FieldElement)> {
        let mut out: Vec<_> = self.coeffs.iter().map(|(a, c)| (a.clone(), c.clone())).collect();
        out.sort_by(|(a, _), (b, _)| total(a).cmp(&total(b)).then_with(|| b.cmp(a)));
        out
    }

    fn set(&mut self, alpha: Vec<usize>, c: FieldElement) {
        if total(&alpha) > self.degree {
            return;
        }
        // Exact zeros are dropped; imprecise zeros keep their precision.
        if c.is_zero() && c.prec() >= self.field.prec().max(i64::MAX / 8) {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
    }

    fn accumulate(&mut self, alpha: Vec<usize>, c: FieldElement) {
        if total(&alpha) > self.degree {
            return;
        }
        match self.coeffs.get_mut(&alpha) {
            Some(acc) => *acc = &*acc + &c,
            None => {
                self.coeffs.insert(alpha, c);
            }
        }
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let mut s = Self::zero(&self.field, self.vars, degree.min(self.degree));
        for (a, c) in &self.coeffs {
            s.set(a.clone(), c.clone());
        }
        s
    }

    /// The homogeneous part of total degree `k`.
    pub fn homogeneous(&self, k: usize) -> Self {
        let mut s = Self::zero(&self.field, self.vars, self.degree);
        for (a, c) in self.coeffs.iter().filter(|(a, _)| total(a) == k) {
            s.set(a.clone(), c.clone());
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.degree = self.degree.min(other.degree);
        s = s.truncate(s.degree);
        for (a, c) in &other.coeffs {
            s.accumulate(a.clone(), c.clone());
        }
        s
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c = -&*c;
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut s = Self::zero(&self.field, self.vars, self.degree);
        for (a, x) in &self.coeffs {
            s.accumulate(a.clone(), x * c);
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree.min(other.degree);
        let mut s = Self::zero(&self.field, self.vars, degree);
        for (a, x) in &self.coeffs {
            let da = total(a);
            for (b, y) in &other.coeffs {
                if da + total(b) > degree {
                    continue;
                }
                let g: Vec<usize> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                s.accumulate(g, x * y);
            }
        }
        s
    }

    /// Substitutes series without constant term for the variables.
    pub fn compose(&self, subs: &[TruncatedSeries]) -> Result<Self> {
        if subs.len() != self.vars {
            return Err(Error::InvalidInput(format!("{} substitutions for {} variables", subs.len(), self.vars)));
        }
        let vars = subs[0].vars;
        if subs.iter().any(|s| s.vars != vars || !s.coeff(&vec![0; vars]).is_zero()) {
            return Err(Error::InvalidInput("substituted series must share variables and vanish at 0".into()));
        }
        let degree = subs.iter().map(|s| s.degree).min().unwrap_or(self.degree);
        let one = {
            let mut o = Self::zero(&self.field, vars, degree);
            o.set(vec![0; vars], self.field.one());
            o
        };
        let max_exp = self.coeffs.keys().flat_map(|a| a.iter().copied()).max().unwrap_or(0).min(degree);
        let powers: Vec<Vec<Self>> = subs
            .iter()
            .map(|s| {
                let mut ps = vec![one.clone()];
                for _ in 0..max_exp {
                    ps.push(ps.last().unwrap().mul(s).truncate(degree));
                }
                ps
            })
            .collect();
        let mut out = Self::zero(&self.field, vars, degree);
        for (alpha, c) in &self.coeffs {
            if total(alpha) > degree {
                continue;
            }
            let mut term = one.scale(c);
            for (i, &a) in alpha.iter().enumerate() {
                if a > 0 {
                    term = term.mul(&powers[i][a]);
                }
            }
            for (b, y) in term.coeffs {
                out.accumulate(b, y);
            }
        }
        Ok(out)
    }

    /// Formal partial derivative.
    pub fn derivative(&self, i: usize) -> Self {
        let mut s = Self::zero(&self.field, self.vars, self.degree.saturating_sub(1));
        for (a, c) in &self.coeffs {
            if a[i] == 0 {
                continue;
            }
            let mut b = a.clone();
            b[i] -= 1;
            s.accumulate(b, c.mul_int(&BigInt::from(a[i])));
        }
        s
    }

    /// True when every coefficient vanishes at its tracked precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    /// Coefficientwise agreement up to the common degree bound.
    pub fn eq_at_prec(&self, other: &Self) -> bool {
        let d = self.degree.min(other.degree);
        self.truncate(d).sub(&other.truncate(d)).is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integral())
    }

    /// Smallest coefficient precision, in π-units.
    pub fn min_prec(&self) -> i64 {
        self.coeffs.values().map(|c| c.prec()).min().unwrap_or(i64::MAX / 4)
    }

    /// Lowers the precision of every coefficient to at most `prec`.
    pub fn with_prec(&self, prec: i64) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c = c.with_prec(prec);
        }
        s
    }

    /// Moves the coefficients to another precision of the same field.
    fn rebase(&self, k: &LocalField) -> Self {
        TruncatedSeries { field: k.clone(), ..self.clone() }
    }
}

/// Frobenius series choices.
#[derive(Clone, Debug)]
pub enum FrobeniusChoice {
    /// `πX + X^q`.
    Standard,
    /// `(1 + X)^p − 1`, over Q_p with `π = p`.
    Multiplicative,
    /// Explicit coefficients `f_0, f_1, …`.
    Custom(Vec<FieldElement>),
}

/// A formal group law `F(X, Y)` with its Frobenius series `f`.
#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    pub field: LocalField,
    pub pi: FieldElement,
    pub q: u64,
    pub choice: FrobeniusChoice,
    pub frobenius: TruncatedSeries,
    pub law: TruncatedSeries,
    /// Working precision of the recursion, in π-units.
    work: i64,
}

/// `[a](X)`.
#[derive(Clone, Debug)]
pub struct EndomorphismSeries {
    pub a: FieldElement,
    pub series: TruncatedSeries,
}

fn working_field(l: &LocalField, degree: usize) -> LocalField {
    l.with_precision(l.prec() + 2 * (degree as i64 + 2) * l.e() as i64)
}

/// Builds `f` over `w` (L at a working precision) and validates it.
fn frobenius_series(w: &LocalField, pi: &FieldElement, choice: &FrobeniusChoice, degree: usize) -> Result<TruncatedSeries> {
    let l = w;
    let q = l.q() as usize;
    let coeffs = match choice {
        FrobeniusChoice::Standard => {
            let mut c = vec![l.zero(); q + 1];
            c[1] = pi.clone();
            c[q] = l.one();
            c
        }
        FrobeniusChoice::Multiplicative => {
            if l.degree() != 1 || !pi.eq_at_prec(&l.from_int(l.p() as i64)) {
                return Err(Error::InvalidFrobenius("(1+X)^p - 1 needs L = Q_p and π = p".into()));
            }
            let p = l.p() as u64;
            (0..=p)
                .map(|i| if i == 0 { l.zero() } else { l.from_bigint(&crate::zp::binomial_big(&BigInt::from(p), i)) })
                .collect()
        }
        FrobeniusChoice::Custom(c) => c.iter().map(|x| l.coerce(x)).collect::<Result<_>>()?,
    };
    if q > degree {
        return Err(Error::DegreeBudget { needed: q, have: degree });
    }
    let get = |i: usize| coeffs.get(i).cloned().unwrap_or_else(|| l.zero());
    if !get(0).is_zero() {
        return Err(Error::InvalidFrobenius("nonzero constant term".into()));
    }
    if !(&get(1) - pi).is_zero() {
        return Err(Error::InvalidFrobenius("linear coefficient differs from π".into()));
    }
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_integral() {
            return Err(Error::InvalidFrobenius(format!("coefficient {i} is not integral")));
        }
        let reduced_ok = if i == q { !c.is_zero() && c.val_pi() == Some(0) && (c - &l.one()).val_lower_bound() >= 1 } else { c.val_lower_bound() >= 1 };
        if !reduced_ok {
            return Err(Error::InvalidFrobenius(format!("f is not X^q mod π at degree {i}")));
        }
    }
    if q >= coeffs.len() {
        return Err(Error::InvalidFrobenius("f is not X^q mod π".into()));
    }
    Ok(TruncatedSeries::from_coeffs(l, degree, &coeffs))
}

/// Solves `f ∘ g = g ∘ (f, …, f)` with `g ≡ linear` mod degree 2.
fn commuting_series(f: &TruncatedSeries, pi: &FieldElement, linear: &TruncatedSeries) -> Result<TruncatedSeries> {
    let k = &f.field;
    let vars = linear.vars;
    let degree = linear.degree;
    let fx: Vec<TruncatedSeries> = (0..vars)
        .map(|i| f.compose(&[TruncatedSeries::var(k, vars, degree, i)]))
        .collect::<Result<_>>()?;
    let mut g = linear.truncate(degree);
    for d in 2..=degree {
        let lhs = f.compose(&[g.truncate(d)])?;
        let rhs = g.truncate(d).compose(&fx.iter().map(|s| s.truncate(d)).collect::<Vec<_>>())?;
        let defect = lhs.sub(&rhs).homogeneous(d);
        let denom = pi - &pi.pow(d as u64);
        for (alpha, e) in defect.coeffs {
            let c = -&e.div(&denom)?;
            if !c.is_integral() {
                return Err(Error::RecursionObstruction(d));
            }
            g.accumulate(alpha, c);
        }
    }
    Ok(g)
}

/// Builds the Lubin–Tate formal group law attached to `f` up to total degree `degree`.
pub fn lt_construct(l: &LocalField, pi: &FieldElement, choice: &FrobeniusChoice, degree: usize) -> Result<FormalGroupLaw> {
    if !pi.in_field(l) || pi.val_pi() != Some(1) {
        return Err(Error::InvalidFrobenius("π must be a uniformizer of L".into()));
    }
    let work = working_field(l, degree);
    let pi_w = exact_uniformizer(&work, pi)?;
    let f = frobenius_series(&work, &pi_w, choice, degree)?;
    let linear = TruncatedSeries::var(&work, 2, degree, 0).add(&TruncatedSeries::var(&work, 2, degree, 1));
    let law = commuting_series(&f, &pi_w, &linear)?;
    Ok(FormalGroupLaw { field: l.clone(), pi: pi_w, q: l.q(), choice: choice.clone(), frobenius: f, law, work: work.prec() })
}

/// Recognizes the presentation's uniformizer and `p`, which are exact; any
/// other π keeps the precision it was given.
fn exact_uniformizer(w: &LocalField, pi: &FieldElement) -> Result<FieldElement> {
    let l = pi.field();
    if pi.eq_at_prec(&l.uniformizer()) {
        return Ok(w.uniformizer());
    }
    if pi.eq_at_prec(&l.from_int(l.p() as i64)) {
        return Ok(w.from_int(l.p() as i64));
    }
    w.coerce(pi)
}

impl FormalGroupLaw {
    pub fn degree(&self) -> usize {
        self.law.degree
    }

    /// The field the recursion ran over (L at a raised precision).
    pub fn working_field(&self) -> LocalField {
        self.field.with_precision(self.work)
    }

    /// `F(a(X), b(X))` for one-variable series `a`, `b`.
    pub fn add_series(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.law.compose(&[a.clone(), b.clone()])
    }

    /// `F(X, Y) = F(Y, X)`.
    pub fn is_commutative(&self) -> Result<bool> {
        let k = self.working_field();
        let d = self.degree();
        let swapped = self.law.compose(&[TruncatedSeries::var(&k, 2, d, 1), TruncatedSeries::var(&k, 2, d, 0)])?;
        Ok(swapped.eq_at_prec(&self.law))
    }

    /// `F(F(X, Y), Z) = F(X, F(Y, Z))`.
    pub fn is_associative(&self) -> Result<bool> {
        let k = self.working_field();
        let d = self.degree();
        let v = |i| TruncatedSeries::var(&k, 3, d, i);
        let f3 = |a: TruncatedSeries, b: TruncatedSeries| self.law.compose(&[a, b]);
        let left = f3(f3(v(0), v(1))?, v(2))?;
        let right = f3(v(0), f3(v(1), v(2))?)?;
        Ok(left.eq_at_prec(&right))
    }

    /// `F(X, 0) = X` and `F(0, Y) = Y`.
    pub fn has_unit(&self) -> bool {
        let k = self.working_field();
        let d = self.degree();
        let x = TruncatedSeries::var(&k, 1, d, 0);
        let zero = TruncatedSeries::zero(&k, 1, d);
        let a = self.law.compose(&[x.clone(), zero.clone()]);
        let b = self.law.compose(&[zero, x.clone()]);
        matches!((a, b), (Ok(a), Ok(b)) if a.eq_at_prec(&x) && b.eq_at_prec(&x))
    }

    /// The inverse series `ι = [−1]`, checked against `F(X, ι(X)) = 0`.
    pub fn inverse_series(&self) -> Result<(TruncatedSeries, bool)> {
        let iota = lt_endomorphism(self, &self.working_field().from_int(-1))?.series;
        let x = TruncatedSeries::var(&self.working_field(), 1, self.degree(), 0);
        let sum = self.add_series(&x, &iota)?;
        Ok((iota, sum.is_zero()))
    }
}

/// `[a](X)` for `a` in O_L.
pub fn lt_endomorphism(g: &FormalGroupLaw, a: &FieldElement) -> Result<EndomorphismSeries> {
    let k = g.working_field();
    let a = k.coerce(a)?;
    if !a.is_integral() {
        return Err(Error::NotIntegral);
    }
    let linear = TruncatedSeries::var(&k, 1, g.degree(), 0).scale(&a);
    let series = commuting_series(&g.frobenius, &g.pi, &linear)?;
    Ok(EndomorphismSeries { a, series })
}

/// `[π^n](X) = f^{∘n}(X)`.
pub fn pi_power_series(g: &FormalGroupLaw, n: u32) -> Result<TruncatedSeries> {
    let k = g.working_field();
    let mut s = TruncatedSeries::var(&k, 1, g.degree(), 0);
    for _ in 0..n {
        s = g.frobenius.compose(&[s])?;
    }
    Ok(s)
}

/// The formal logarithm from `log′(X) · ∂_Y F(X, 0) = 1`.
pub fn lt_logarithm(g: &FormalGroupLaw) -> Result<TruncatedSeries> {
    let k = g.working_field();
    let d = g.degree();
    // h(X) = ∂_Y F(X, 0)
    let dy = g.law.derivative(1);
    let h = dy.compose(&[TruncatedSeries::var(&k, 1, d, 0), TruncatedSeries::zero(&k, 1, d)])
        .unwrap_or_else(|_| TruncatedSeries::zero(&k, 1, d));
    let h = {
        // compose requires vanishing at 0; add the constant term by hand.
        let mut h = h;
        let c0 = dy.coeff(&[0, 0]);
        h.accumulate(vec![0], c0);
        h
    };
    let mut ell: Vec<FieldElement> = vec![k.zero(), k.one()];
    for n in 2..=d {
        // Σ_{j=1}^{n} j ℓ_j h_{n−j} = 0
        let mut acc = k.zero();
        for (j, lj) in ell.iter().enumerate().take(n).skip(1) {
            acc = &acc + &(lj.mul_int(&BigInt::from(j)) * h.coeff1(n - j));
        }
        ell.push((-&acc).div_int(&BigInt::from(n))?);
    }
    Ok(TruncatedSeries::from_coeffs(&k, d, &ell))
}

/// The formal logarithm as `π^{−n} [π^n](X)` for large `n`.
pub fn lt_logarithm_limit(g: &FormalGroupLaw) -> Result<TruncatedSeries> {
    let k = g.working_field();
    let d = g.degree() as i64;
    let e = g.field.e() as i64;
    let p = g.field.p() as i64;
    let log_d = (1..).take_while(|i| p.pow(*i) <= d).count() as i64;
    // Loss from the coefficient denominators of log and exp up to degree D.
    let loss = e * d * (1 + log_d);
    let n = g.field.prec() + loss;
    let big = k.with_precision(k.prec() + n + loss);
    let pi = exact_uniformizer(&big, &g.pi)?;
    let f = frobenius_series(&big, &pi, &g.choice, g.degree())?;
    let mut s = TruncatedSeries::var(&big, 1, g.degree(), 0);
    for _ in 0..n {
        s = f.compose(&[s])?;
    }
    let scale = pi.pow(n as u64).inv()?;
    let s = s.scale(&scale);
    Ok(s.with_prec(n - loss).rebase(&k))
}

/// A lower convex hull of `(degree, valuation)` points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Vertices `(degree, p-adic valuation)`.
    pub vertices: Vec<(usize, Ratio<i64>)>,
    pub segments: Vec<Segment>,
}

/// A hull segment: `multiplicity` roots of valuation `root_valuation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    pub root_valuation: Ratio<i64>,
    pub multiplicity: usize,
}

/// Newton polygon of a one-variable series up to its degree bound.
pub fn newton_polygon(s: &TruncatedSeries) -> Result<NewtonPolygon> {
    let e = s.field.e() as i64;
    let pts: Vec<(usize, Ratio<i64>)> = (0..=s.degree)
        .filter_map(|n| s.coeff1(n).val_pi().map(|v| (n, Ratio::new(v, e))))
        .collect();
    if pts.is_empty() {
        return Err(Error::ZeroSeries);
    }
    newton_polygon_of_points(&pts)
}

/// Newton polygon truncated at the first coefficient of valuation zero.
pub fn newton_polygon_to_unit(s: &TruncatedSeries) -> Result<NewtonPolygon> {
    let e = s.field.e() as i64;
    let mut pts = Vec::new();
    for n in 0..=s.degree {
        if let Some(v) = s.coeff1(n).val_pi() {
            pts.push((n, Ratio::new(v, e)));
            if v == 0 {
                break;
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::ZeroSeries);
    }
    newton_polygon_of_points(&pts)
}

fn newton_polygon_of_points(pts: &[(usize, Ratio<i64>)]) -> Result<NewtonPolygon> {
    let mut hull: Vec<(usize, Ratio<i64>)> = Vec::new();
    for &pt in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop the middle point when it lies on or above the chord.
            let lhs = (y2 - y1) * Ratio::from(pt.0 as i64 - x1 as i64);
            let rhs = (pt.1 - y1) * Ratio::from(x2 as i64 - x1 as i64);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (x1, y1) = w[0];
            let (x2, y2) = w[1];
            Segment {
                from: x1,
                to: x2,
                root_valuation: (y1 - y2) / Ratio::from((x2 - x1) as i64),
                multiplicity: x2 - x1,
            }
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, segments })
}

/// Root valuations of `[π^n]` against the predicted spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionReport {
    pub level: u32,
    /// Nonzero roots in the open unit disc.
    pub nonzero_roots: usize,
    /// `(p-adic valuation, multiplicity)`, largest valuation first.
    pub spectrum: Vec<(Ratio<i64>, usize)>,
    pub predicted: Vec<(Ratio<i64>, usize)>,
    pub matches: bool,
}

/// Reads the torsion of level `n` off the Newton polygon of `[π^n]`.
pub fn torsion_report(g: &FormalGroupLaw, n: u32) -> Result<TorsionReport> {
    let q = g.q as usize;
    let needed = q.checked_pow(n).unwrap_or(usize::MAX);
    if needed > g.degree() {
        return Err(Error::DegreeBudget { needed, have: g.degree() });
    }
    let s = pi_power_series(g, n)?;
    let poly = newton_polygon_to_unit(&s)?;
    let spectrum: Vec<(Ratio<i64>, usize)> =
        poly.segments.iter().map(|seg| (seg.root_valuation, seg.multiplicity)).collect();
    let nonzero_roots = spectrum.iter().map(|(_, m)| m).sum();
    let e = g.field.e() as i64;
    let predicted: Vec<(Ratio<i64>, usize)> = (1..=n)
        .map(|k| {
            let count = q.pow(k - 1) * (q - 1);
            (Ratio::new(1, e * count as i64), count)
        })
        .collect();
    let matches = spectrum == predicted && nonzero_roots + 1 == needed;
    Ok(TorsionReport { level: n, nonzero_roots, spectrum, predicted, matches })
}

/// p-adic valuation of `ζ_{p^k} − 1` computed inside Q_p(ζ_{p^k}).
pub fn cyclotomic_valuation(p: u32, k: u32) -> Result<PValuation> {
    let field = LocalField::cyclotomic(p, k, 8 * (p as i64).pow(k))?;
    let zeta = field.primitive_root_of_unity(k)?;
    Ok((&zeta - &field.one()).valuation())
}
