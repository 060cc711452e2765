//! Named property suites with seeded inputs and machine-readable reports.
//!
//! Each suite draws its cases from a ChaCha stream seeded by the caller, so a
//! report is a pure function of `(suite, seed)`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::amice::{AmiceDistribution, Polynomial};
use crate::charvar::{
    char_eval, diff_at, diff_at_zero, difference_quotient, fiber_product_check, membership, membership_via_wperp,
    torsion_characters, Character, DifferentialCondition, Verdict,
};
use crate::dw::{dw_restrict, evaluation_row};
use crate::error::{Error, Result};
use crate::field::{FieldElement, LocalField};
use crate::linalg;
use crate::lubin_tate::{
    cyclotomic_valuation, lt_construct, lt_endomorphism, lt_logarithm, lt_logarithm_limit, newton_polygon,
    pi_power_series, torsion_report, FrobeniusChoice, TruncatedSeries,
};
use crate::sample;
use crate::sigma::{idempotents, sigma_analytic_test, EmbeddingSet, SigmaFunction};
use crate::valuation::PValuation;

/// Names accepted by [`run_suite`].
pub const SUITES: &[&str] = &[
    "convolution",
    "integration",
    "predicate-equivalence",
    "cocycle",
    "torsion-universality",
    "mult-x",
    "lt-multiplicative",
    "lubin-tate",
    "sigma-routes",
    "vanishing",
    "fiber-product",
];

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Up to five failing case descriptions.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub params: Value,
    pub properties: Vec<PropertyReport>,
    /// Smallest valuation of a residual that was required to vanish or be
    /// small (`inf` when every residual vanished at its precision).
    pub min_residual_valuation: PValuation,
    pub passed: bool,
    pub detail: Value,
}

/// Tuning knobs; `None` keeps the suite's default.
#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteOptions {
    pub cases: Option<usize>,
    pub prec: Option<i64>,
    pub degree: Option<usize>,
    pub level: Option<u32>,
}

#[derive(Default)]
struct Tally {
    props: Vec<PropertyReport>,
    residual: Option<PValuation>,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, case: impl FnOnce() -> String) {
        let idx = match self.props.iter().position(|p| p.name == name) {
            Some(i) => i,
            None => {
                self.props.push(PropertyReport {
                    name: name.to_string(),
                    cases: 0,
                    passed: 0,
                    failed: 0,
                    failures: Vec::new(),
                });
                self.props.len() - 1
            }
        };
        let p = &mut self.props[idx];
        p.cases += 1;
        if ok {
            p.passed += 1;
        } else {
            p.failed += 1;
            if p.failures.len() < 5 {
                p.failures.push(case());
            }
        }
    }

    fn residual(&mut self, v: PValuation) {
        self.residual = Some(match self.residual {
            Some(r) => r.min(v),
            None => v,
        });
    }

    fn finish(self, suite: &str, seed: u64, params: Value, detail: Value) -> SuiteReport {
        let passed = self.props.iter().all(|p| p.failed == 0);
        SuiteReport {
            suite: suite.to_string(),
            seed,
            params,
            properties: self.props,
            min_residual_valuation: self.residual.unwrap_or(PValuation::Infinite),
            passed,
            detail,
        }
    }
}

/// Valuation of `a − b`, infinite when they agree at the common precision.
fn residual(a: &FieldElement, b: &FieldElement) -> PValuation {
    (a - b).valuation()
}

pub fn run_suite(name: &str, seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    match name {
        "convolution" => convolution(seed, opts),
        "integration" => integration(seed, opts),
        "predicate-equivalence" => predicate_equivalence(seed, opts),
        "cocycle" => cocycle(seed, opts),
        "torsion-universality" => torsion_universality(seed, opts),
        "mult-x" => mult_x(seed, opts),
        "lt-multiplicative" => lt_multiplicative(seed, opts),
        "lubin-tate" => lubin_tate(seed, opts),
        "sigma-routes" => sigma_routes(seed, opts),
        "vanishing" => vanishing(seed, opts),
        "fiber-product" => fiber_product(seed, opts),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Binomial-convolution of moment vectors: `Σ_k binom(n, k) a_k b_{n−k}`.
fn moment_oracle(a: &[FieldElement], b: &[FieldElement], k: &LocalField) -> Vec<FieldElement> {
    let m = a.len();
    (0..m)
        .map(|n| {
            let mut binom = BigInt::from(1);
            let mut acc = k.zero();
            for j in 0..=n {
                acc = &acc + &(&a[j] * &b[n - j]).mul_int(&binom);
                binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
            }
            acc
        })
        .collect()
}

fn convolution(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(500);
    let n = opts.prec.unwrap_or(12);
    let m = 32;
    let mut r = rng(seed);
    let mut t = Tally::default();
    for case in 0..cases {
        let p = if case % 2 == 0 { 2 } else { 5 };
        let k = LocalField::qp(p, n)?;
        let lam = sample::random_distribution(&k, &mut r, 1, m, n as u32)?;
        let mu = sample::random_distribution(&k, &mut r, 1, m, n as u32)?;
        let conv = lam.convolve(&mu)?;
        let mut ok = true;
        for i in 0..m {
            let cauchy = (0..=i).fold(k.zero(), |acc, j| &acc + &(&lam.coeffs[j] * &mu.coeffs[i - j]));
            let res = residual(&conv.coeffs[i], &cauchy);
            t.residual(res);
            ok &= res.is_infinite();
        }
        t.record("amice-product", ok, || format!("case {case}, p = {p}"));
        let (ml, mm, mc) = (lam.moments()?, mu.moments()?, conv.moments()?);
        let oracle = moment_oracle(&ml.moments, &mm.moments, &k);
        let ok = oracle.iter().zip(&mc.moments).all(|(a, b)| {
            let res = residual(a, b);
            t.residual(res);
            res.is_infinite()
        });
        t.record("binomial-moments", ok, || format!("case {case}, p = {p}"));
    }
    Ok(t.finish("convolution", seed, json!({"cases": cases, "d": 1, "M": m, "p": [2, 5], "N": n}), Value::Null))
}

fn integration(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(100);
    let n = opts.prec.unwrap_or(20);
    let mut r = rng(seed);
    let mut t = Tally::default();
    for case in 0..cases {
        let p = if case % 2 == 0 { 5 } else { 2 };
        let k = LocalField::qp(p, n)?;
        let g = sample::random_zp(&k, &mut r, n as u32);
        let z = sample::random_near_one(&k, &mut r, 1, n as u32);
        let mu = AmiceDistribution::dirac(&k, std::slice::from_ref(&g), n as usize + 2)?;
        let ev = mu.fourier_eval(std::slice::from_ref(&z))?;
        let chi = Character::new(&k, vec![z])?;
        let direct = char_eval(&chi, &[g])?;
        let diff = &ev.value - &direct;
        let res = diff.valuation();
        t.residual(res);
        let ok = diff.prec() >= n - 2 && res >= PValuation::integer(n - 2);
        t.record("fourier-equals-character", ok, || format!("case {case}, p = {p}, residual {res}"));
    }
    Ok(t.finish("integration", seed, json!({"cases": cases, "N": n, "p": [5, 2]}), Value::Null))
}

/// Field, root of unity and its order used by the membership suites.
fn membership_field(prec: i64) -> Result<(LocalField, FieldElement)> {
    let k = LocalField::cyclotomic(5, 1, prec)?;
    let zeta = k.primitive_root_of_unity(1)?;
    Ok((k, zeta))
}

/// Random `(χ, W)` pairs, half of them members by construction.
pub fn membership_cases(seed: u64, cases: usize, prec: i64) -> Result<Vec<(Character, DifferentialCondition)>> {
    let (k, zeta) = membership_field(prec)?;
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(cases);
    for _ in 0..cases {
        let d = r.gen_range(1..=3);
        let rank = r.gen_range(0..=d);
        let w = sample::random_condition(&k, &mut r, d, rank, 3)?;
        let chi = if r.gen_bool(0.5) {
            sample::random_member(&w, &mut r, Some(&zeta), 5, 4)?
        } else {
            sample::random_character(&k, &mut r, d, 6)?
        };
        out.push((chi, w));
    }
    Ok(out)
}

fn predicate_equivalence(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(1000);
    let prec = opts.prec.unwrap_or(64);
    let mut t = Tally::default();
    let mut verdicts = String::with_capacity(cases);
    for (i, (chi, w)) in membership_cases(seed, cases, prec)?.iter().enumerate() {
        let a = membership(chi, w)?;
        let b = membership_via_wperp(chi, w)?;
        t.record("verdicts-agree", a.verdict == b.verdict, || format!("case {i}: {:?} vs {:?}", a.verdict, b.verdict));
        t.record("decided", a.verdict != Verdict::Inconclusive, || format!("case {i} inconclusive"));
        verdicts.push(match a.verdict {
            Verdict::Member => 'M',
            Verdict::NonMember => 'N',
            Verdict::Inconclusive => '?',
        });
    }
    let members = verdicts.chars().filter(|c| *c == 'M').count();
    let detail = json!({"members": members, "non_members": verdicts.chars().filter(|c| *c == 'N').count(), "verdicts": verdicts});
    Ok(t.finish("predicate-equivalence", seed, json!({"cases": cases, "p": 5, "field": "Q5(zeta_5)", "prec": prec}), detail))
}

fn cocycle(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(100);
    let n = opts.prec.unwrap_or(20);
    let step = 6;
    let k = LocalField::qp(5, n)?;
    let mut r = rng(seed);
    let mut t = Tally::default();
    for case in 0..cases {
        let d = r.gen_range(1..=2);
        let chi = sample::random_character(&k, &mut r, d, n as u32)?;
        let g: Vec<FieldElement> = (0..d).map(|_| sample::random_zp(&k, &mut r, n as u32)).collect();
        let at_g = diff_at(&chi, &g)?;
        let value = char_eval(&chi, &g)?;
        let at_zero = diff_at_zero(&chi)?;
        for i in 0..d {
            let q = difference_quotient(&chi, &g, i, step)?;
            let res = residual(&q, &at_g[i]);
            t.residual(res);
            t.record("quotient-matches-differential", res >= PValuation::integer(5), || format!("case {case}, axis {i}: {res}"));
            let ident = residual(&at_g[i], &(&value * &at_zero[i]));
            t.record("translation-identity", ident.is_infinite(), || format!("case {case}, axis {i}"));
        }
    }
    Ok(t.finish("cocycle", seed, json!({"cases": cases, "p": 5, "N": n, "step": format!("p^{step}")}), Value::Null))
}

/// Torsion fields used by the universality check: Q_p(ζ_{p^2}) for p = 2, 3.
fn torsion_fields(prec_digits: i64) -> Result<Vec<LocalField>> {
    [2u32, 3]
        .iter()
        .map(|&p| LocalField::cyclotomic(p, 2, prec_digits * (p as i64 - 1) * p as i64))
        .collect()
}

fn torsion_universality(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let conditions = opts.cases.unwrap_or(20);
    let digits = opts.prec.unwrap_or(12);
    let mut r = rng(seed);
    let mut t = Tally::default();
    let mut counts = Vec::new();
    for k in torsion_fields(digits)? {
        let p = k.p() as usize;
        for n in 0..=2u32 {
            for d in 1..=2usize {
                let chars = torsion_characters(n, d, &k)?;
                let expected = p.pow(n * d as u32);
                t.record("count", chars.len() == expected, || format!("p = {p}, n = {n}, d = {d}: {}", chars.len()));
                counts.push(json!({"p": p, "n": n, "d": d, "count": chars.len()}));
                for _ in 0..conditions {
                    let rank = r.gen_range(0..=d);
                    let w = sample::random_condition(&k, &mut r, d, rank, 3)?;
                    for (i, chi) in chars.iter().enumerate() {
                        let v = membership(chi, &w)?.verdict;
                        t.record("member", v == Verdict::Member, || format!("p = {p}, n = {n}, d = {d}, char {i}: {v:?}"));
                    }
                }
            }
        }
    }
    Ok(t.finish(
        "torsion-universality",
        seed,
        json!({"conditions_per_case": conditions, "fields": ["Q2(zeta_4)", "Q3(zeta_9)"], "n_max": 2, "d_max": 2}),
        json!({"counts": counts}),
    ))
}

/// `z · dF/dz` for `F = Σ b_n (z − 1)^n`, truncated to `len` terms.
fn z_times_derivative(b: &[FieldElement], k: &LocalField, len: usize) -> Vec<FieldElement> {
    let deriv: Vec<FieldElement> = (1..b.len()).map(|n| b[n].mul_int(&BigInt::from(n))).collect();
    // z = 1 + (z − 1)
    (0..len)
        .map(|n| {
            let mut acc = deriv.get(n).cloned().unwrap_or_else(|| k.zero());
            if n > 0 {
                acc = &acc + &deriv[n - 1];
            }
            acc
        })
        .collect()
}

fn mult_x(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(200);
    let n = opts.prec.unwrap_or(12);
    let mut r = rng(seed);
    let mut t = Tally::default();
    for case in 0..cases {
        let p = [2u32, 3, 5][case % 3];
        let k = LocalField::qp(p, n)?;
        let m = r.gen_range(4..=24);
        let lam = sample::random_distribution(&k, &mut r, 1, m, n as u32)?;
        let out = lam.mult_by_x(0)?;
        let oracle = z_times_derivative(&lam.coeffs, &k, m - 1);
        let ok = oracle.iter().zip(&out.coeffs).all(|(a, b)| {
            let res = residual(a, b);
            t.residual(res);
            res.is_infinite()
        });
        t.record("series-intertwining", ok, || format!("case {case}, p = {p}, M = {m}"));
        let (before, after) = (lam.moments()?, out.moments()?);
        let ok = (0..m - 1).all(|i| residual(&after.moments[i], &before.moments[i + 1]).is_infinite());
        t.record("moment-shift", ok, || format!("case {case}, p = {p}, M = {m}"));
    }
    Ok(t.finish("mult-x", seed, json!({"cases": cases, "d": 1, "p": [2, 3, 5], "N": n}), Value::Null))
}

fn lt_multiplicative(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let degree = opts.degree.unwrap_or(12);
    let mut t = Tally::default();
    for p in [2u32, 3, 5] {
        let l = LocalField::qp(p, opts.prec.unwrap_or(20))?;
        let g = lt_construct(&l, &l.from_int(p as i64), &FrobeniusChoice::Multiplicative, degree)?;
        let k = g.working_field();
        let expected = TruncatedSeries::from_terms(
            &k,
            2,
            degree,
            vec![(vec![1, 0], k.one()), (vec![0, 1], k.one()), (vec![1, 1], k.one())],
        )?;
        let diff = g.law.sub(&expected);
        for (_, c) in diff.terms() {
            t.residual(c.valuation());
        }
        t.record("law-is-x+y+xy", diff.is_zero(), || format!("p = {p}"));
    }
    Ok(t.finish("lt-multiplicative", seed, json!({"D": degree, "p": [2, 3, 5]}), Value::Null))
}

/// Q_p and Q_3(√3) with `f = πX + X^q`.
pub fn lubin_tate_fields(prec: i64) -> Result<Vec<LocalField>> {
    Ok(vec![LocalField::qp(3, prec)?, LocalField::qp(5, prec)?, LocalField::eisenstein(3, &[-3, 0, 1], prec)?])
}

fn lubin_tate(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let degree = opts.degree.unwrap_or(12);
    let mut r = rng(seed);
    let mut t = Tally::default();
    let mut spectra = Vec::new();
    for l in lubin_tate_fields(opts.prec.unwrap_or(20))? {
        let id = l.id().to_string();
        let g = lt_construct(&l, &l.uniformizer(), &FrobeniusChoice::Standard, degree)?;
        let k = g.working_field();
        t.record("unit", g.has_unit(), || id.clone());
        t.record("commutative", g.is_commutative()?, || id.clone());
        t.record("associative", g.is_associative()?, || id.clone());
        t.record("inverse", g.inverse_series()?.1, || id.clone());
        let pi_series = lt_endomorphism(&g, &g.pi)?.series;
        t.record("[pi]-is-f", pi_series.eq_at_prec(&g.frobenius.truncate(degree)), || id.clone());
        let mod_pi = (0..=degree).all(|n| {
            let c = pi_series.coeff1(n);
            let target = if n as u64 == g.q { k.one() } else { k.zero() };
            (&c - &target).val_lower_bound() >= 1
        });
        t.record("[pi]-is-x^q-mod-pi", mod_pi, || id.clone());
        let log = lt_logarithm(&g)?;
        t.record("log-routes-agree", log.eq_at_prec(&lt_logarithm_limit(&g)?), || id.clone());
        let mut scalars: Vec<FieldElement> = vec![k.one(), g.pi.clone(), k.from_int(-1)];
        for _ in 0..3 {
            scalars.push(sample::random_integral(&k, &mut r, 4));
        }
        let ends = scalars.iter().map(|a| lt_endomorphism(&g, a).map(|e| e.series)).collect::<Result<Vec<_>>>()?;
        for (a, ea) in scalars.iter().zip(&ends) {
            t.record("derivative-at-0", ea.coeff1(1).eq_at_prec(a), || format!("{id}: a = {a}"));
            let lhs = log.compose(std::slice::from_ref(ea))?;
            t.record("log-intertwining", lhs.eq_at_prec(&log.scale(a)), || format!("{id}: a = {a}"));
        }
        for i in 0..scalars.len() {
            for j in i..scalars.len() {
                let (a, b) = (&scalars[i], &scalars[j]);
                let sum = lt_endomorphism(&g, &(a + b))?.series;
                t.record("[a+b]=F([a],[b])", g.add_series(&ends[i], &ends[j])?.eq_at_prec(&sum), || format!("{id}: {a}, {b}"));
                let prod = lt_endomorphism(&g, &(a * b))?.series;
                t.record("[ab]=[a]o[b]", ends[i].compose(std::slice::from_ref(&ends[j]))?.eq_at_prec(&prod), || format!("{id}: {a}, {b}"));
            }
        }
        let q = g.q as usize;
        let poly = newton_polygon(&pi_power_series(&g, 1)?.truncate(q))?;
        let slope_ok = poly.segments.len() == 1
            && poly.segments[0].multiplicity == q - 1
            && poly.segments[0].root_valuation == num_rational::Ratio::new(1, (l.e() * (q - 1)) as i64);
        t.record("newton-slope", slope_ok, || format!("{id}: {:?}", poly.segments));
        let rep = torsion_report(&g, 1)?;
        t.record("torsion-spectrum", rep.matches, || format!("{id}: {:?}", rep.spectrum));
        spectra.push(json!({"field": id, "spectrum": rep.spectrum.iter().map(|(v, m)| json!([v.to_string(), m])).collect::<Vec<_>>()}));
    }
    // Multiplicative group against cyclotomic valuations.
    for p in [2u32, 3] {
        let l = LocalField::qp(p, opts.prec.unwrap_or(20))?;
        let g = lt_construct(&l, &l.from_int(p as i64), &FrobeniusChoice::Multiplicative, degree)?;
        for level in 1..=2u32 {
            let rep = torsion_report(&g, level)?;
            let mut ok = rep.matches;
            for (kk, (v, _)) in rep.spectrum.iter().enumerate() {
                let cyc = cyclotomic_valuation(p, kk as u32 + 1)?;
                ok &= cyc == PValuation::Finite(*v);
            }
            t.record("multiplicative-torsion-vs-cyclotomic", ok, || format!("p = {p}, n = {level}: {:?}", rep.spectrum));
        }
    }
    Ok(t.finish(
        "lubin-tate",
        seed,
        json!({"D": degree, "fields": ["Q3", "Q5", "Q3(sqrt 3)"]}),
        json!({"spectra": spectra}),
    ))
}

/// Fields for the Σ-analyticity sweep: an unramified and a ramified quadratic.
pub fn sigma_fields(prec: i64) -> Result<Vec<LocalField>> {
    Ok(vec![LocalField::unramified(5, &[2, 0, 1], prec)?, LocalField::eisenstein(5, &[-5, 0, 1], prec)?])
}

/// A random polynomial of total degree ≤ `max_deg` in two variables; with
/// `restrict = Some(i)` only variable `i` occurs.
pub fn random_polynomial<R: Rng>(k: &LocalField, r: &mut R, max_deg: usize, restrict: Option<usize>) -> Polynomial {
    let terms = r.gen_range(1..=5);
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let deg = r.gen_range(0..=max_deg);
        let alpha = match restrict {
            Some(0) => vec![deg, 0],
            Some(_) => vec![0, deg],
            None => {
                let a = r.gen_range(0..=deg);
                vec![a, deg - a]
            }
        };
        out.push((alpha, sample::random_integral(k, r, 3)));
    }
    Polynomial::new(2, out)
}

fn sigma_routes(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(200);
    let mut r = rng(seed);
    let mut t = Tally::default();
    let mut analytic = 0;
    let sets: Vec<EmbeddingSet> = sigma_fields(opts.prec.unwrap_or(40))?
        .iter()
        .map(|l| EmbeddingSet::new(l, l, vec![]))
        .collect::<Result<_>>()?;
    for set in &sets {
        let (alg, es, _) = idempotents(&set.l, &set.k)?;
        let id = set.l.id().to_string();
        let sum = es.iter().fold(alg.from_k(&set.k.zero()), |acc, e| alg.add(&acc, e));
        t.record("idempotents-sum-to-one", alg.eq(&sum, &alg.one()), || id.clone());
        for (i, a) in es.iter().enumerate() {
            for (j, b) in es.iter().enumerate() {
                let prod = alg.mul(a, b);
                let ok = if i == j { alg.eq(&prod, a) } else { alg.is_zero(&prod) };
                t.record("idempotent-products", ok, || format!("{id}: e_{i} e_{j}"));
            }
        }
    }
    let subsets: [Vec<usize>; 4] = [vec![], vec![0], vec![1], vec![0, 1]];
    for case in 0..cases {
        let base = &sets[case % sets.len()];
        let set = base.with_sigma(subsets[(case / sets.len()) % 4].clone())?;
        let k = &set.k;
        let f = if r.gen_bool(0.5) {
            let restrict = if r.gen_bool(0.5) { Some(r.gen_range(0..2)) } else { None };
            SigmaFunction::EmbeddingVariables(random_polynomial(k, &mut r, 4, restrict))
        } else {
            SigmaFunction::Coordinates(random_polynomial(k, &mut r, 4, None))
        };
        let v = sigma_analytic_test(&f, &set, &mut r, 2)?;
        analytic += usize::from(v.differential);
        t.record("routes-agree", v.agree(), || format!("case {case}: {v:?}"));
        t.record("decided", v.decided, || format!("case {case}"));
    }
    Ok(t.finish(
        "sigma-routes",
        seed,
        json!({"cases": cases, "fields": sets.iter().map(|s| s.l.id().to_string()).collect::<Vec<_>>(), "max_degree": 4}),
        json!({"analytic": analytic}),
    ))
}

/// Evaluation matrix of the level-m, degree-D D_W layout on characters
/// `ζ^c exp(p B w)`, and its rank against the column count.
pub fn vanishing_rank(
    k: &LocalField,
    zeta: &FieldElement,
    w: &DifferentialCondition,
    level: u32,
    degree: usize,
    samples_per_root: usize,
    r: &mut ChaCha8Rng,
) -> Result<(usize, usize)> {
    let d = w.d;
    let lam = sample::random_distribution(k, r, d, degree + 24, 4)?;
    let dw = dw_restrict(&lam, w, level, degree)?;
    let p = k.p() as u64;
    let mut rows = Vec::new();
    for code in 0..p.pow(d as u32) {
        let exps: Vec<u64> = (0..d).map(|i| (code / p.pow(i as u32)) % p).collect();
        for _ in 0..samples_per_root {
            let base = sample::random_member(w, r, None, 1, 4)?;
            let z: Vec<FieldElement> = base.z.iter().zip(&exps).map(|(zi, c)| zi * &zeta.pow(*c)).collect();
            let chi = Character::new(k, z)?;
            rows.push(evaluation_row(&dw, &chi)?.0);
        }
    }
    Ok((linalg::rank(&rows, k)?, dw.columns()))
}

fn vanishing(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let level = opts.level.unwrap_or(1);
    let degree = opts.degree.unwrap_or(2);
    let (k, zeta) = membership_field(opts.prec.unwrap_or(40))?;
    let mut r = rng(seed);
    let mut t = Tally::default();
    let mut ranks = Vec::new();
    let line = DifferentialCondition::new(&k, 2, vec![vec![k.one()], vec![k.from_int(2)]])?;
    let conditions = [
        ("full, d = 1", DifferentialCondition::full(&k, 1)),
        ("zero, d = 1", DifferentialCondition::zero(&k, 1)),
        ("line, d = 2", line),
    ];
    for (name, w) in &conditions {
        let samples = (w.rank() + 1) * (degree + 1) + 1;
        let (rank, cols) = vanishing_rank(&k, &zeta, w, level, degree, samples, &mut r)?;
        t.record("full-column-rank", rank == cols, || format!("{name}: rank {rank} of {cols}"));
        ranks.push(json!({"W": name, "rank": rank, "columns": cols}));
    }
    Ok(t.finish("vanishing", seed, json!({"p": 5, "level": level, "D": degree}), json!({"ranks": ranks})))
}

fn fiber_product(seed: u64, opts: SuiteOptions) -> Result<SuiteReport> {
    let cases = opts.cases.unwrap_or(1000);
    let prec = opts.prec.unwrap_or(64);
    let mut t = Tally::default();
    let check = |t: &mut Tally, chi: &Character, w: &DifferentialCondition, label: String| -> Result<()> {
        if membership(chi, w)?.verdict != Verdict::Member {
            return Ok(());
        }
        let rep = fiber_product_check(chi, w)?;
        for (a, b) in rep.reconstructed.iter().zip(&rep.log_z) {
            t.residual(residual(a, b));
        }
        t.record("reconstructs-log", rep.agree, || label.clone());
        let other = membership_via_wperp(chi, w)?.verdict;
        t.record("routes-agree", other == Verdict::Member, || label);
        Ok(())
    };
    for (i, (chi, w)) in membership_cases(seed, cases, prec)?.iter().enumerate() {
        check(&mut t, chi, w, format!("random case {i}"))?;
    }
    let mut r = rng(seed ^ 0x5eed);
    for k in torsion_fields(12)? {
        for n in 1..=2u32 {
            for d in 1..=2usize {
                let rank = r.gen_range(0..=d);
                let w = sample::random_condition(&k, &mut r, d, rank, 3)?;
                for (i, chi) in torsion_characters(n, d, &k)?.iter().enumerate() {
                    check(&mut t, chi, &w, format!("{} torsion n = {n}, d = {d}, char {i}", k.id()))?;
                }
            }
        }
    }
    Ok(t.finish("fiber-product", seed, json!({"cases": cases, "prec": prec}), Value::Null))
}
