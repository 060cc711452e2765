//! JSON encodings of fields, elements and the higher-level objects.
//!
//! Output is canonical: element coordinates are the reduced representatives
//! written as little-endian base-p digit arrays, and every list is emitted in
//! a fixed order, so identical inputs give byte-identical documents.
//!
//! Integers in input documents may be JSON numbers or decimal strings.

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::amice::{AmiceDistribution, Polynomial, Shape};
use crate::charvar::{Character, CharacterLattice, DifferentialCondition, MembershipCertificate, Witness};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldKind, FieldSpec, LocalField};
use crate::linalg::Matrix;
use crate::lubin_tate::TruncatedSeries;
use crate::sigma::{CMType, HTPair};

fn bad(msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(msg.to_string())
}

/// Decodes a serde-typed payload, mapping schema errors to `InvalidInput`.
pub fn decode<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(bad)
}

pub fn int_to_json(n: &BigInt) -> Value {
    match i64::try_from(n) {
        Ok(x) => json!(x),
        Err(_) => json!(n.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad(format!("{n} is not an integer"))),
        Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| bad(format!("{s:?} is not an integer"))),
        other => Err(bad(format!("expected an integer, got {other}"))),
    }
}

fn ints_from_json(v: &Value) -> Result<Vec<BigInt>> {
    v.as_array().ok_or_else(|| bad("expected an integer array"))?.iter().map(int_from_json).collect()
}

fn ints_to_json(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int_to_json).collect())
}

// ---------------------------------------------------------------- fields

/// Polynomials of a field presentation. `eisenstein` holds Z[t]/(g)
/// coefficient vectors, one per power of X.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolysJson {
    #[serde(default)]
    pub unramified: Option<Value>,
    #[serde(default)]
    pub eisenstein: Option<Value>,
}

/// Input schema for a field. Either `polys`, `cyclotomic` (a level k for
/// Q_p(ζ_{p^k})) or `degree` (unramified of that degree) selects the shape.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub p: u32,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub polys: Option<PolysJson>,
    #[serde(default)]
    pub cyclotomic: Option<u32>,
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub e: Option<usize>,
    #[serde(default)]
    pub f: Option<usize>,
    #[serde(default)]
    pub prec: Option<i64>,
    #[serde(default)]
    pub id: Option<String>,
}

pub fn field_to_json(k: &LocalField) -> Value {
    let unram = match k.kind() {
        FieldKind::Unramified | FieldKind::TwoStep => ints_to_json(k.unramified_poly()),
        _ => Value::Null,
    };
    let eis = match k.kind() {
        FieldKind::Eisenstein | FieldKind::TwoStep => {
            Value::Array(k.eisenstein_poly().iter().map(|c| ints_to_json(c)).collect())
        }
        _ => Value::Null,
    };
    json!({
        "id": k.id(),
        "p": k.p(),
        "kind": k.kind().as_str(),
        "polys": {"unramified": unram, "eisenstein": eis},
        "e": k.e(),
        "f": k.f(),
        "prec": k.prec(),
    })
}

/// Builds a field; `prec_override` wins over the document's `prec`.
pub fn field_from_json(v: &Value, prec_override: Option<i64>, default_prec: i64) -> Result<LocalField> {
    let fj: FieldJson = decode(v)?;
    let prec = prec_override.or(fj.prec).unwrap_or(default_prec);
    let field = if let Some(level) = fj.cyclotomic {
        LocalField::cyclotomic(fj.p, level, prec)?
    } else if let Some(deg) = fj.degree {
        LocalField::unramified_of_degree(fj.p, deg, prec)?
    } else {
        let polys = fj.polys.unwrap_or(PolysJson { unramified: None, eisenstein: None });
        let unram = polys.unramified.filter(|v| !v.is_null()).map(|v| ints_from_json(&v)).transpose()?;
        let eis = polys.eisenstein.filter(|v| !v.is_null());
        // Without an explicit kind, infer it from which polynomials are present.
        let kind = match (&fj.kind, unram.is_some(), eis.is_some()) {
            (Some(s), _, _) => FieldKind::parse(s)?,
            (None, false, false) => FieldKind::Base,
            (None, true, false) => FieldKind::Unramified,
            (None, false, true) => FieldKind::Eisenstein,
            (None, true, true) => FieldKind::TwoStep,
        };
        if kind == FieldKind::Base && (unram.is_some() || eis.is_some()) {
            return Err(bad("kind \"base\" takes no polynomials"));
        }
        let spec = match kind {
            FieldKind::Base => FieldSpec::Base,
            FieldKind::Unramified => FieldSpec::Unramified(unram.ok_or_else(|| bad("missing polys.unramified"))?),
            FieldKind::Eisenstein => {
                let e = eis.ok_or_else(|| bad("missing polys.eisenstein"))?;
                let arr = e.as_array().ok_or_else(|| bad("polys.eisenstein must be an array"))?;
                // Accept both [c0, c1, …] and [[c0], [c1], …].
                let flat = arr
                    .iter()
                    .map(|c| match c {
                        Value::Array(inner) if inner.len() == 1 => int_from_json(&inner[0]),
                        other => int_from_json(other),
                    })
                    .collect::<Result<Vec<_>>>()?;
                FieldSpec::Eisenstein(flat)
            }
            FieldKind::TwoStep => {
                let e = eis.ok_or_else(|| bad("missing polys.eisenstein"))?;
                let arr = e.as_array().ok_or_else(|| bad("polys.eisenstein must be an array"))?;
                FieldSpec::TwoStep {
                    unramified: unram.ok_or_else(|| bad("missing polys.unramified"))?,
                    eisenstein: arr.iter().map(ints_from_json).collect::<Result<_>>()?,
                }
            }
        };
        LocalField::create(fj.p, spec, prec)?
    };
    if fj.e.is_some_and(|e| e != field.e()) || fj.f.is_some_and(|f| f != field.f()) {
        return Err(bad(format!("declared e/f do not match the polynomials (e = {}, f = {})", field.e(), field.f())));
    }
    if fj.id.as_deref().is_some_and(|id| id != field.id()) {
        return Err(bad(format!("declared id does not match {}", field.id())));
    }
    Ok(field)
}

// -------------------------------------------------------------- elements

pub fn element_to_json(x: &FieldElement) -> Value {
    let prec = if x.prec() >= i64::MAX / 8 { Value::Null } else { json!(x.prec()) };
    json!({
        "field": x.field().id(),
        "coeffs": x.digit_arrays(),
        "shift": x.shift(),
        "prec": prec,
        "valuation": x.valuation().to_string(),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    #[serde(default)]
    field: Option<String>,
    #[serde(default)]
    coeffs: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    coords: Option<Vec<Value>>,
    #[serde(default)]
    shift: Option<u32>,
    #[serde(default)]
    prec: Option<i64>,
    /// Informational in output documents; ignored on input.
    #[serde(default, rename = "valuation")]
    _valuation: Option<String>,
}

/// Reads an element of `k`. Accepts an integer, a `"a/b"` string, an object
/// with base-p digit arrays (`coeffs`), or an object with integer
/// coordinates on the power basis (`coords`).
pub fn element_from_json(k: &LocalField, v: &Value) -> Result<FieldElement> {
    match v {
        Value::Number(_) => Ok(k.from_bigint(&int_from_json(v)?)),
        Value::String(s) => {
            if let Some((a, b)) = s.split_once('/') {
                let num = a.trim().parse::<i64>().map_err(|_| bad(format!("bad rational {s:?}")))?;
                let den = b.trim().parse::<i64>().map_err(|_| bad(format!("bad rational {s:?}")))?;
                k.from_ratio(num, den)
            } else {
                Ok(k.from_bigint(&int_from_json(v)?))
            }
        }
        Value::Object(_) => {
            let ej: ElementJson = decode(v)?;
            if let Some(id) = &ej.field {
                if id != k.id() {
                    return Err(Error::FieldMismatch);
                }
            }
            let prec = ej.prec.unwrap_or(k.prec());
            let x = match (ej.coeffs, ej.coords) {
                (Some(d), None) => FieldElement::from_digit_arrays(k, &d, ej.shift.unwrap_or(0), prec)?,
                (None, Some(c)) => {
                    let coords = c.iter().map(int_from_json).collect::<Result<Vec<_>>>()?;
                    let x = k.with_precision(prec).from_coords(&coords)?;
                    match ej.shift {
                        Some(s) if s > 0 => x.div_int(&num_traits::pow(k.p_big().clone(), s as usize))?,
                        _ => x,
                    }
                }
                _ => return Err(bad("element needs exactly one of coeffs or coords")),
            };
            Ok(x)
        }
        other => Err(bad(format!("cannot read an element from {other}"))),
    }
}

pub fn elements_from_json(k: &LocalField, v: &Value) -> Result<Vec<FieldElement>> {
    v.as_array().ok_or_else(|| bad("expected an array of elements"))?.iter().map(|x| element_from_json(k, x)).collect()
}

pub fn elements_to_json(xs: &[FieldElement]) -> Value {
    Value::Array(xs.iter().map(element_to_json).collect())
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|r| elements_to_json(r)).collect())
}

pub fn matrix_from_json(k: &LocalField, v: &Value) -> Result<Matrix> {
    let rows = v.as_array().ok_or_else(|| bad("expected a matrix"))?;
    let m: Matrix = rows.iter().map(|r| elements_from_json(k, r)).collect::<Result<_>>()?;
    if m.iter().any(|r| r.len() != m[0].len()) {
        return Err(bad("ragged matrix"));
    }
    Ok(m)
}

fn exps_from_json(v: &Value) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| bad("expected an exponent vector"))?
        .iter()
        .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| bad("exponents must be nonnegative integers")))
        .collect()
}

fn terms_from_json(k: &LocalField, v: &Value, vars: usize) -> Result<Vec<(Vec<usize>, FieldElement)>> {
    let arr = v.as_array().ok_or_else(|| bad("expected a list of [exponents, coefficient] pairs"))?;
    arr.iter()
        .map(|t| {
            let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("each term is [exponents, coefficient]"))?;
            let alpha = exps_from_json(&pair[0])?;
            if alpha.len() != vars {
                return Err(bad(format!("exponent vector {alpha:?} does not have {vars} entries")));
            }
            Ok((alpha, element_from_json(k, &pair[1])?))
        })
        .collect()
}

// ------------------------------------------------------------ polynomials

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialJson {
    d: usize,
    terms: Value,
}

pub fn polynomial_from_json(k: &LocalField, v: &Value) -> Result<Polynomial> {
    let pj: PolynomialJson = decode(v)?;
    Ok(Polynomial::new(pj.d, terms_from_json(k, &pj.terms, pj.d)?))
}

pub fn polynomial_to_json(poly: &Polynomial) -> Value {
    json!({
        "d": poly.d,
        "terms": poly.terms.iter().map(|(a, c)| json!([a, element_to_json(c)])).collect::<Vec<_>>(),
    })
}

// ----------------------------------------------------------------- amice

pub fn amice_to_json(mu: &AmiceDistribution) -> Value {
    let shape = mu.shape;
    let coeffs: Vec<Value> = shape.indices().map(|n| json!([n.clone(), element_to_json(mu.coeff(&n))])).collect();
    json!({"d": shape.d, "M": shape.m, "coeffs": coeffs})
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmiceJson {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    coeffs: Value,
}

/// Missing multi-indices are zero.
pub fn amice_from_json(k: &LocalField, v: &Value) -> Result<AmiceDistribution> {
    let aj: AmiceJson = decode(v)?;
    let shape = Shape::new(aj.d, aj.m)?;
    let mut coeffs = vec![k.zero(); shape.len()];
    for (n, c) in terms_from_json(k, &aj.coeffs, aj.d)? {
        if n.iter().any(|&x| x >= aj.m) {
            return Err(Error::TruncationMismatch(format!("index {n:?} outside M = {}", aj.m)));
        }
        coeffs[shape.index(&n)] = c;
    }
    AmiceDistribution::from_coeffs(k, aj.d, aj.m, coeffs)
}

// ------------------------------------------------------------- charvar

pub fn character_to_json(chi: &Character) -> Value {
    json!({"z": elements_to_json(&chi.z)})
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CharacterJson {
    z: Value,
}

pub fn character_from_json(k: &LocalField, v: &Value) -> Result<Character> {
    let cj: CharacterJson = decode(v)?;
    Character::new(k, elements_from_json(k, &cj.z)?)
}

pub fn condition_to_json(w: &DifferentialCondition) -> Value {
    json!({"L": w.field.id(), "d": w.d, "B": matrix_to_json(&w.basis)})
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionJson {
    #[serde(rename = "L", default)]
    l: Option<String>,
    #[serde(default)]
    d: Option<usize>,
    #[serde(rename = "B", default)]
    b: Option<Value>,
    /// Shorthand: "full" or "zero".
    #[serde(default)]
    preset: Option<String>,
}

/// Reads a condition over `l` for T ≅ Z_p^d. `B` is a d×r matrix of
/// column basis vectors; a bare string is read as a preset.
pub fn condition_from_json(l: &LocalField, d: usize, v: &Value) -> Result<DifferentialCondition> {
    if let Value::String(preset) = v {
        return condition_from_json(l, d, &json!({ "preset": preset }));
    }
    let cj: ConditionJson = decode(v)?;
    if cj.l.as_deref().is_some_and(|id| id != l.id()) {
        return Err(Error::FieldMismatch);
    }
    let d = cj.d.unwrap_or(d);
    match (cj.preset.as_deref(), cj.b) {
        (Some("full"), None) => Ok(DifferentialCondition::full(l, d)),
        (Some("zero"), None) => Ok(DifferentialCondition::zero(l, d)),
        (None, Some(b)) => {
            let m = matrix_from_json(l, &b)?;
            if m.len() != d {
                return Err(bad(format!("B has {} rows, expected {d}", m.len())));
            }
            DifferentialCondition::new(l, d, m)
        }
        _ => Err(bad("condition needs B or preset \"full\"/\"zero\"")),
    }
}

pub fn certificate_to_json(c: &MembershipCertificate) -> Value {
    let witness = match &c.witness {
        Witness::Coordinates(w) => json!({"coordinates": elements_to_json(w)}),
        Witness::Functional { index, valuation } => {
            json!({"functional": {"index": index, "valuation": valuation.to_string()}})
        }
        Witness::None => Value::Null,
    };
    json!({"verdict": c.verdict.as_str(), "witness": witness, "prec": c.prec.to_string()})
}

pub fn lattice_to_json(t: &CharacterLattice) -> Value {
    let action = match &t.ol_action {
        Some(mats) => Value::Array(
            mats.iter().map(|m| Value::Array(m.iter().map(|r| ints_to_json(r)).collect())).collect(),
        ),
        None => Value::Null,
    };
    json!({"d": t.d, "labels": t.labels, "ol_action": action})
}

// --------------------------------------------------------------- sigma

pub fn cm_type_to_json(cm: &CMType) -> Value {
    json!({"L": cm.sigma.l.id(), "sigma": cm.sigma.sigma})
}

pub fn ht_pair_to_json(pair: &HTPair) -> Value {
    json!({"T": lattice_to_json(&pair.lattice), "W": condition_to_json(&pair.w)})
}

// ------------------------------------------------------------- series

pub fn series_to_json(s: &TruncatedSeries) -> Value {
    let coeffs: Vec<Value> = s
        .terms()
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(a, c)| json!([a, element_to_json(&c)]))
        .collect();
    json!({"vars": s.vars, "D": s.degree, "coeffs": coeffs})
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesJson {
    vars: usize,
    #[serde(rename = "D")]
    degree: usize,
    coeffs: Value,
}

pub fn series_from_json(k: &LocalField, v: &Value) -> Result<TruncatedSeries> {
    let sj: SeriesJson = decode(v)?;
    if !(1..=2).contains(&sj.vars) {
        return Err(bad("series must have 1 or 2 variables"));
    }
    TruncatedSeries::from_terms(k, sj.vars, sj.degree, terms_from_json(k, &sj.coeffs, sj.vars)?)
}
