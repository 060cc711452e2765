//! Mahler expansions and distributions on Z_p^d in Amice coordinates.
//!
//! A distribution `μ` is stored through `b_n = μ(binom(x, n))` for every
//! multi-index `n` in the hypercube `n_i < M`. The same array read as
//! `Σ b_n (z − 1)^n` is the Fourier transform of `μ`, so convolution is the
//! Cauchy product of arrays.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::valuation::PValuation;
use crate::zp::{binomial_at, factorial, stirling1_table, stirling2_table, ZpPoint};

/// Largest supported rank.
pub const MAX_RANK: usize = 3;

/// Dense hypercube `{0..M}^d` of multi-indices in mixed-radix order
/// (first coordinate varies slowest).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub d: usize,
    pub m: usize,
}

impl Shape {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if d == 0 || d > MAX_RANK {
            return Err(Error::DegreeOverflow(format!("rank {d} outside 1..={MAX_RANK}")));
        }
        if m == 0 {
            return Err(Error::DegreeOverflow("truncation must be positive".into()));
        }
        Ok(Shape { d, m })
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, n: &[usize]) -> usize {
        n.iter().fold(0, |acc, &k| acc * self.m + k)
    }

    pub fn multi(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.m;
            idx /= self.m;
        }
        out
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(move |i| self.multi(i))
    }
}

/// A multivariate polynomial `Σ c_α x^α` over a field.
#[derive(Clone, Debug)]
pub struct Polynomial {
    pub d: usize,
    pub terms: Vec<(Vec<usize>, FieldElement)>,
}

impl Polynomial {
    pub fn new(d: usize, terms: Vec<(Vec<usize>, FieldElement)>) -> Self {
        Polynomial { d, terms }
    }

    pub fn total_degree(&self) -> usize {
        self.terms.iter().map(|(a, _)| a.iter().sum::<usize>()).max().unwrap_or(0)
    }

    /// Value at integer points (exact integer powers).
    pub fn eval(&self, k: &LocalField, x: &[FieldElement]) -> FieldElement {
        let mut acc = k.zero();
        for (alpha, c) in &self.terms {
            let mut t = c.clone();
            for (xi, a) in x.iter().zip(alpha) {
                t = &t * &xi.pow(*a as u64);
            }
            acc = &acc + &t;
        }
        acc
    }
}

fn check_field(k: &LocalField, x: &FieldElement) -> Result<()> {
    if x.in_field(k) {
        Ok(())
    } else {
        Err(Error::FieldMismatch)
    }
}

/// Applies `new[.., i, ..] = Σ_j mat[i][j] old[.., j, ..] / div[i]` on one axis.
fn transform_axis(
    k: &LocalField,
    shape: Shape,
    data: &[FieldElement],
    axis: usize,
    mat: &[Vec<BigInt>],
    div: Option<&[BigInt]>,
) -> Result<Vec<FieldElement>> {
    let mut out = vec![k.zero(); data.len()];
    for idx in 0..shape.len() {
        let n = shape.multi(idx);
        let i = n[axis];
        let mut acc = k.zero();
        let mut src = n.clone();
        for (j, c) in mat[i].iter().enumerate().take(shape.m) {
            if c.is_zero() {
                continue;
            }
            src[axis] = j;
            acc = &acc + &data[shape.index(&src)].mul_int(c);
        }
        out[idx] = match div {
            Some(dv) => acc.div_int(&dv[i])?,
            None => acc,
        };
    }
    Ok(out)
}

/// A function `Σ a_n binom(x, n)` truncated to the hypercube `n_i < M`.
#[derive(Clone, Debug)]
pub struct MahlerSeries {
    pub field: LocalField,
    pub shape: Shape,
    pub coeffs: Vec<FieldElement>,
}

impl MahlerSeries {
    pub fn zero(k: &LocalField, d: usize, m: usize) -> Result<Self> {
        let shape = Shape::new(d, m)?;
        Ok(MahlerSeries { field: k.clone(), shape, coeffs: vec![k.zero(); shape.len()] })
    }

    pub fn coeff(&self, n: &[usize]) -> &FieldElement {
        &self.coeffs[self.shape.index(n)]
    }

    /// Exact binomial-basis expansion of a polynomial of total degree `< M`.
    pub fn from_polynomial(k: &LocalField, poly: &Polynomial, m: usize) -> Result<Self> {
        let shape = Shape::new(poly.d, m)?;
        if poly.total_degree() >= m {
            return Err(Error::DegreeOverflow(format!(
                "total degree {} needs truncation > {}",
                poly.total_degree(),
                m
            )));
        }
        let s2 = stirling2_table(m);
        let facts: Vec<BigInt> = (0..m as u64).map(factorial).collect();
        let mut coeffs = vec![k.zero(); shape.len()];
        for (alpha, c) in &poly.terms {
            check_field(k, c)?;
            if alpha.len() != poly.d {
                return Err(Error::InvalidInput("exponent length differs from rank".into()));
            }
            // x^α = Π_i Σ_j S(α_i, j) j! binom(x_i, j)
            for idx in 0..shape.len() {
                let n = shape.multi(idx);
                let mut mult = BigInt::from(1);
                for (a, j) in alpha.iter().zip(&n) {
                    if j > a {
                        mult = BigInt::zero();
                        break;
                    }
                    mult *= &s2[*a][*j] * &facts[*j];
                }
                if !mult.is_zero() {
                    coeffs[idx] = &coeffs[idx] + &c.mul_int(&mult);
                }
            }
        }
        Ok(MahlerSeries { field: k.clone(), shape, coeffs })
    }

    /// `Σ a_n Π binom(x_i, n_i)` at a point of Z_p^d.
    pub fn eval(&self, x: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.shape.d {
            return Err(Error::TruncationMismatch("point has the wrong rank".into()));
        }
        let pts = x.iter().map(ZpPoint::from_element).collect::<Result<Vec<_>>>()?;
        let binoms = binomial_tables(&self.field, &pts, self.shape.m);
        let mut acc = self.field.zero();
        for (idx, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.prec() >= self.field.prec() {
                continue;
            }
            let n = self.shape.multi(idx);
            let mut t = a.clone();
            for (i, ni) in n.iter().enumerate() {
                t = &t * &binoms[i][*ni];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }
}

fn binomial_tables(k: &LocalField, pts: &[ZpPoint], m: usize) -> Vec<Vec<FieldElement>> {
    pts.iter()
        .map(|g| (0..m as u64).map(|n| binomial_at(k, g, n)).collect())
        .collect()
}

/// A distribution in Amice coordinates `b_n = μ(binom(x, n))`.
#[derive(Clone, Debug)]
pub struct AmiceDistribution {
    pub field: LocalField,
    pub shape: Shape,
    pub coeffs: Vec<FieldElement>,
}

/// Moments `m_n = μ(x^n)` on the same hypercube.
#[derive(Clone, Debug)]
pub struct MomentVector {
    pub field: LocalField,
    pub shape: Shape,
    pub moments: Vec<FieldElement>,
}

/// Result of evaluating a truncated Fourier transform.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Value, with precision capped by the truncation tail.
    pub value: FieldElement,
    /// Lower bound for the valuation of the omitted terms, assuming the
    /// missing coefficients are no smaller than the observed ones.
    pub tail: PValuation,
    /// Set when `z` lies outside the disc where the tail bound is reliable.
    pub heuristic: bool,
}

/// Smallest valuation of `z − 1` below which evaluations are flagged as
/// heuristic; the default is `1/(p − 1)`.
#[derive(Clone, Copy, Debug)]
pub struct FourierConfig {
    pub threshold: Ratio<i64>,
}

impl FourierConfig {
    pub fn for_prime(p: u32) -> Self {
        FourierConfig { threshold: Ratio::new(1, p as i64 - 1) }
    }
}

impl AmiceDistribution {
    pub fn zero(k: &LocalField, d: usize, m: usize) -> Result<Self> {
        let shape = Shape::new(d, m)?;
        Ok(AmiceDistribution { field: k.clone(), shape, coeffs: vec![k.zero(); shape.len()] })
    }

    pub fn from_coeffs(k: &LocalField, d: usize, m: usize, coeffs: Vec<FieldElement>) -> Result<Self> {
        let shape = Shape::new(d, m)?;
        if coeffs.len() != shape.len() {
            return Err(Error::TruncationMismatch(format!(
                "{} coefficients for a {}^{} hypercube",
                coeffs.len(),
                m,
                d
            )));
        }
        for c in &coeffs {
            check_field(k, c)?;
        }
        Ok(AmiceDistribution { field: k.clone(), shape, coeffs })
    }

    pub fn d(&self) -> usize {
        self.shape.d
    }

    pub fn m(&self) -> usize {
        self.shape.m
    }

    pub fn coeff(&self, n: &[usize]) -> &FieldElement {
        &self.coeffs[self.shape.index(n)]
    }

    /// The point mass at `g`, with `b_n = binom(g, n)`.
    pub fn dirac(k: &LocalField, g: &[FieldElement], m: usize) -> Result<Self> {
        let shape = Shape::new(g.len(), m)?;
        let pts = g.iter().map(ZpPoint::from_element).collect::<Result<Vec<_>>>()?;
        let binoms = binomial_tables(k, &pts, m);
        let coeffs = (0..shape.len())
            .map(|idx| {
                let n = shape.multi(idx);
                n.iter()
                    .enumerate()
                    .fold(k.one(), |acc, (i, ni)| &acc * &binoms[i][*ni])
            })
            .collect();
        Ok(AmiceDistribution { field: k.clone(), shape, coeffs })
    }

    fn check_compatible(&self, other_field: &LocalField, other: Shape) -> Result<()> {
        if !self.field.same_field(other_field) {
            return Err(Error::FieldMismatch);
        }
        if self.shape != other {
            return Err(Error::TruncationMismatch(format!(
                "(d, M) = ({}, {}) vs ({}, {})",
                self.shape.d, self.shape.m, other.d, other.m
            )));
        }
        Ok(())
    }

    /// `μ(f) = Σ a_n b_n`.
    pub fn pair(&self, f: &MahlerSeries) -> Result<FieldElement> {
        self.check_compatible(&f.field, f.shape)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&f.coeffs)
            .fold(self.field.zero(), |acc, (b, a)| &acc + &(a * b)))
    }

    pub fn add(&self, other: &AmiceDistribution) -> Result<AmiceDistribution> {
        self.check_compatible(&other.field, other.shape)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(AmiceDistribution { coeffs, ..self.clone() })
    }

    pub fn sub(&self, other: &AmiceDistribution) -> Result<AmiceDistribution> {
        self.check_compatible(&other.field, other.shape)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(AmiceDistribution { coeffs, ..self.clone() })
    }

    pub fn scale(&self, c: &FieldElement) -> AmiceDistribution {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        AmiceDistribution { coeffs, ..self.clone() }
    }

    /// Convolution: the hypercube Cauchy product of the coefficient arrays.
    pub fn convolve(&self, other: &AmiceDistribution) -> Result<AmiceDistribution> {
        self.check_compatible(&other.field, other.shape)?;
        let shape = self.shape;
        let mut coeffs = vec![self.field.zero(); shape.len()];
        for i in 0..shape.len() {
            let a = &self.coeffs[i];
            if a.is_zero() && a.prec() >= self.field.prec() {
                continue;
            }
            let ni = shape.multi(i);
            for j in 0..shape.len() {
                let nj = shape.multi(j);
                if ni.iter().zip(&nj).any(|(x, y)| x + y >= shape.m) {
                    continue;
                }
                let sum: Vec<usize> = ni.iter().zip(&nj).map(|(x, y)| x + y).collect();
                let t = shape.index(&sum);
                coeffs[t] = &coeffs[t] + &(a * &other.coeffs[j]);
            }
        }
        Ok(AmiceDistribution { field: self.field.clone(), shape, coeffs })
    }

    /// Moments via `x^k = Σ_j S(k, j) j! binom(x, j)` on every axis.
    pub fn moments(&self) -> Result<MomentVector> {
        let m = self.shape.m;
        let s2 = stirling2_table(m);
        let mat: Vec<Vec<BigInt>> = (0..m)
            .map(|k| (0..m).map(|j| &s2[k][j] * factorial(j as u64)).collect())
            .collect();
        let mut data = self.coeffs.clone();
        for axis in 0..self.shape.d {
            data = transform_axis(&self.field, self.shape, &data, axis, &mat, None)?;
        }
        Ok(MomentVector { field: self.field.clone(), shape: self.shape, moments: data })
    }

    /// Inverse of [`AmiceDistribution::moments`]: `binom(x, n) = Σ_k s(n, k) x^k / n!`.
    pub fn from_moments(mv: &MomentVector) -> Result<AmiceDistribution> {
        let m = mv.shape.m;
        let s1 = stirling1_table(m);
        let facts: Vec<BigInt> = (0..m as u64).map(factorial).collect();
        let mut data = mv.moments.clone();
        for axis in 0..mv.shape.d {
            data = transform_axis(&mv.field, mv.shape, &data, axis, &s1, Some(&facts))?;
        }
        Ok(AmiceDistribution { field: mv.field.clone(), shape: mv.shape, coeffs: data })
    }

    /// Smallest valuation among the stored coefficients (zero ones skipped).
    pub fn min_coeff_valuation(&self) -> PValuation {
        self.coeffs.iter().map(|c| c.valuation()).min().unwrap_or(PValuation::Infinite)
    }

    /// `F_μ(z) = Σ b_n Π (z_i − 1)^{n_i}` with a recorded tail bound.
    pub fn fourier_eval(&self, z: &[FieldElement]) -> Result<Evaluation> {
        self.fourier_eval_with(z, FourierConfig::for_prime(self.field.p()))
    }

    pub fn fourier_eval_with(&self, z: &[FieldElement], cfg: FourierConfig) -> Result<Evaluation> {
        if z.len() != self.shape.d {
            return Err(Error::TruncationMismatch("point has the wrong rank".into()));
        }
        let k = &self.field;
        let mut powers = Vec::with_capacity(z.len());
        let mut vmin = PValuation::Infinite;
        for zi in z {
            check_field(k, zi)?;
            let y = zi - &k.one();
            let v = y.val_lower_bound();
            if v <= 0 {
                return Err(Error::OutsideDomain(format!("v(z - 1) = {} <= 0", y.valuation())));
            }
            vmin = vmin.min(PValuation::from_pi_units(v, k.e()));
            let mut pw = Vec::with_capacity(self.shape.m);
            let mut acc = k.one().with_prec(zi.prec());
            for _ in 0..self.shape.m {
                pw.push(acc.clone());
                acc = &acc * &y;
            }
            powers.push(pw);
        }
        let mut value = k.zero();
        for (idx, b) in self.coeffs.iter().enumerate() {
            if b.is_zero() && b.prec() >= k.prec() {
                continue;
            }
            let n = self.shape.multi(idx);
            let mut t = b.clone();
            for (i, ni) in n.iter().enumerate() {
                t = &t * &powers[i][*ni];
            }
            value = &value + &t;
        }
        let min_b = self.min_coeff_valuation();
        let tail = match (min_b, vmin) {
            (PValuation::Finite(b), PValuation::Finite(v)) => {
                PValuation::Finite(b + v * Ratio::from_integer(self.shape.m as i64))
            }
            _ => PValuation::Infinite,
        };
        if let Some(cap) = tail.floor_pi_units(k.e()) {
            value = value.with_prec(cap);
        }
        let heuristic = match vmin {
            PValuation::Finite(v) => v <= cfg.threshold,
            PValuation::Infinite => false,
        };
        Ok(Evaluation { value, tail, heuristic })
    }

    /// The pushforward of `x_i · μ`: `c_n = (n_i + 1) b_{n + e_i} + n_i b_n`,
    /// truncated to `M − 1`.
    pub fn mult_by_x(&self, axis: usize) -> Result<AmiceDistribution> {
        if axis >= self.shape.d {
            return Err(Error::InvalidInput(format!("coordinate {axis} out of range")));
        }
        if self.shape.m < 2 {
            return Err(Error::DegreeOverflow("truncation too small to multiply by x".into()));
        }
        let out_shape = Shape::new(self.shape.d, self.shape.m - 1)?;
        let coeffs = (0..out_shape.len())
            .map(|idx| {
                let n = out_shape.multi(idx);
                let mut up = n.clone();
                up[axis] += 1;
                let ni = n[axis] as i64;
                let a = self.coeff(&up).mul_int(&BigInt::from(ni + 1));
                let b = self.coeff(&n).mul_int(&BigInt::from(ni));
                &a + &b
            })
            .collect();
        Ok(AmiceDistribution { field: self.field.clone(), shape: out_shape, coeffs })
    }

    /// Twist by the finite character `x ↦ Π ζ_i^{x_i}`: the result has
    /// Fourier transform `z ↦ F_μ(ζ z)`.
    pub fn twist_by_finite_character(&self, zeta: &[FieldElement]) -> Result<AmiceDistribution> {
        if zeta.len() != self.shape.d {
            return Err(Error::TruncationMismatch("character has the wrong rank".into()));
        }
        let k = &self.field;
        let m = self.shape.m;
        let min_b = self.min_coeff_valuation();
        let mut data = self.coeffs.clone();
        for (axis, z) in zeta.iter().enumerate() {
            check_field(k, z)?;
            let w = z - &k.one();
            let vw = w.val_lower_bound();
            if vw <= 0 {
                return Err(Error::OutsideDomain("ζ − 1 must be topologically nilpotent".into()));
            }
            // c_k = Σ_{n≥k} b_n binom(n, k) ζ^k (ζ − 1)^{n − k}
            let zeta_pows: Vec<FieldElement> = (0..m).map(|j| z.pow(j as u64)).collect();
            let w_pows: Vec<FieldElement> = (0..m).map(|j| w.pow(j as u64)).collect();
            let mut out = vec![k.zero(); data.len()];
            for idx in 0..self.shape.len() {
                let nk = self.shape.multi(idx);
                let kk = nk[axis];
                let mut acc = k.zero();
                let mut src = nk.clone();
                let mut binom = BigInt::from(1);
                for n in kk..m {
                    if n > kk {
                        binom = binom * BigInt::from(n) / BigInt::from(n - kk);
                    }
                    src[axis] = n;
                    let t = data[self.shape.index(&src)].mul_int(&binom);
                    acc = &acc + &(&t * &w_pows[n - kk]);
                }
                acc = &acc * &zeta_pows[kk];
                // Omitted n ≥ M contribute at valuation ≥ min_b + (M − k) v(ζ − 1).
                if let Some(b) = min_b.floor_pi_units(k.e()) {
                    acc = acc.with_prec(b + (m - kk) as i64 * vw);
                }
                out[idx] = acc;
            }
            data = out;
        }
        Ok(AmiceDistribution { field: k.clone(), shape: self.shape, coeffs: data })
    }
}

impl MomentVector {
    pub fn moment(&self, n: &[usize]) -> &FieldElement {
        &self.moments[self.shape.index(n)]
    }
}
