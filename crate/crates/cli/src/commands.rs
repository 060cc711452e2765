//! Payload schemas and command handlers.

use padic_fourier::amice::AmiceDistribution;
use padic_fourier::analytic::{padic_exp, padic_log};
use padic_fourier::charvar::{
    char_eval, char_mul, char_pullback, char_pullback_with_conditions, membership, membership_via_wperp,
    torsion_characters, DifferentialCondition, Verdict,
};
use padic_fourier::json::*;
use padic_fourier::lubin_tate::{
    lt_construct, lt_endomorphism, lt_logarithm, lt_logarithm_limit, newton_polygon, pi_power_series, torsion_report,
    FormalGroupLaw, FrobeniusChoice, NewtonPolygon, DEFAULT_DEGREE,
};
use padic_fourier::roots::embeddings;
use padic_fourier::selftest::{run_suite, SuiteOptions};
use padic_fourier::sigma::{
    build_w_sigma, eigenvector_check, ht_pair_of_cm, idempotents, sigma_analytic_test, CMType, EmbeddingSet,
    SigmaFunction,
};
use padic_fourier::{Error, LocalField, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{AmiceOp, CharOp, Command, Global, LtOp};

const DEFAULT_PREC: i64 = 20;

fn missing(name: &str) -> Error {
    Error::InvalidInput(format!("payload is missing \"{name}\""))
}

fn field_of(g: &Global, v: &Option<Value>, name: &str) -> Result<LocalField> {
    field_from_json(v.as_ref().ok_or_else(|| missing(name))?, g.prec, DEFAULT_PREC)
}

fn req<'a>(v: &'a Option<Value>, name: &str) -> Result<&'a Value> {
    v.as_ref().ok_or_else(|| missing(name))
}

pub fn dispatch(cmd: &Command, g: &Global, payload: &Value) -> Result<Value> {
    match cmd {
        Command::Field => field_cmd(g, payload),
        Command::Amice { op } => amice_cmd(*op, g, payload),
        Command::Char { op } => char_cmd(*op, g, payload),
        Command::Sigma => sigma_cmd(g, payload),
        Command::Lt { op } => lt_cmd(*op, g, payload),
        Command::Selftest { suite, cases } => {
            let opts = SuiteOptions { cases: *cases, prec: g.prec, degree: g.degree, level: g.level };
            let report = run_suite(suite, g.seed, opts)?;
            serde_json::to_value(report).map_err(|e| Error::InvalidInput(e.to_string()))
        }
    }
}

// ------------------------------------------------------------------ field

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldPayload {
    field: Option<Value>,
    #[serde(default)]
    op: Option<String>,
    #[serde(default)]
    x: Option<Value>,
    #[serde(default)]
    y: Option<Value>,
    /// Target field for `embeddings`.
    #[serde(default)]
    target: Option<Value>,
}

fn field_cmd(g: &Global, payload: &Value) -> Result<Value> {
    let p: FieldPayload = decode(payload)?;
    let k = field_of(g, &p.field, "field")?;
    let x = || element_from_json(&k, req(&p.x, "x")?);
    let y = || element_from_json(&k, req(&p.y, "y")?);
    let result = match p.op.as_deref() {
        None => Value::Null,
        Some("add") => element_to_json(&(&x()? + &y()?)),
        Some("sub") => element_to_json(&(&x()? - &y()?)),
        Some("mul") => element_to_json(&(&x()? * &y()?)),
        Some("div") => element_to_json(&x()?.div(&y()?)?),
        Some("inv") => element_to_json(&x()?.inv()?),
        Some("log") => element_to_json(&padic_log(&x()?)?),
        Some("exp") => element_to_json(&padic_exp(&x()?)?),
        Some("valuation") => json!(x()?.valuation().to_string()),
        Some("embeddings") => {
            let target = field_of(g, &p.target, "target")?;
            let embs = embeddings(&k, &target)?;
            Value::Array(
                embs.iter()
                    .map(|e| json!({"identity": e.is_identity(), "basis_images": elements_to_json(&e.images_of_basis())}))
                    .collect(),
            )
        }
        Some(other) => return Err(Error::InvalidInput(format!("unknown field op {other:?}"))),
    };
    Ok(json!({"field": field_to_json(&k), "result": result}))
}

// ------------------------------------------------------------------ amice

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmicePayload {
    field: Option<Value>,
    #[serde(default)]
    mu: Option<Value>,
    #[serde(default)]
    a: Option<Value>,
    #[serde(default)]
    b: Option<Value>,
    #[serde(default)]
    g: Option<Value>,
    #[serde(default, rename = "M")]
    m: Option<usize>,
    #[serde(default)]
    z: Option<Value>,
    #[serde(default)]
    axis: Option<usize>,
    #[serde(default)]
    zeta: Option<Value>,
}

fn amice_cmd(op: AmiceOp, g: &Global, payload: &Value) -> Result<Value> {
    let p: AmicePayload = decode(payload)?;
    let k = field_of(g, &p.field, "field")?;
    let mu = || amice_from_json(&k, req(&p.mu, "mu")?);
    Ok(match op {
        AmiceOp::Dirac => {
            let pts = elements_from_json(&k, req(&p.g, "g")?)?;
            let m = p.m.or(g.degree).ok_or_else(|| missing("M"))?;
            json!({"result": amice_to_json(&AmiceDistribution::dirac(&k, &pts, m)?)})
        }
        AmiceOp::Convolve => {
            let a = amice_from_json(&k, req(&p.a, "a")?)?;
            let b = amice_from_json(&k, req(&p.b, "b")?)?;
            json!({"result": amice_to_json(&a.convolve(&b)?)})
        }
        AmiceOp::Moments => {
            let mv = mu()?.moments()?;
            let moments: Vec<Value> =
                mv.shape.indices().map(|n| json!([n.clone(), element_to_json(mv.moment(&n))])).collect();
            json!({"d": mv.shape.d, "M": mv.shape.m, "moments": moments})
        }
        AmiceOp::Eval => {
            let z = elements_from_json(&k, req(&p.z, "z")?)?;
            let ev = mu()?.fourier_eval(&z)?;
            json!({"value": element_to_json(&ev.value), "tail": ev.tail.to_string(), "heuristic": ev.heuristic})
        }
        AmiceOp::MultX => json!({"result": amice_to_json(&mu()?.mult_by_x(p.axis.unwrap_or(0))?)}),
        AmiceOp::Twist => {
            let zeta = elements_from_json(&k, req(&p.zeta, "zeta")?)?;
            json!({"result": amice_to_json(&mu()?.twist_by_finite_character(&zeta)?)})
        }
    })
}

// ------------------------------------------------------------------- char

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CharPayload {
    field: Option<Value>,
    #[serde(default)]
    chi: Option<Value>,
    #[serde(default)]
    psi: Option<Value>,
    #[serde(default)]
    g: Option<Value>,
    #[serde(default, rename = "W")]
    w: Option<Value>,
    #[serde(default, rename = "W1")]
    w1: Option<Value>,
    #[serde(default, rename = "W2")]
    w2: Option<Value>,
    #[serde(default)]
    phi: Option<Value>,
    #[serde(default)]
    d: Option<usize>,
}

fn char_cmd(op: CharOp, g: &Global, payload: &Value) -> Result<Value> {
    let p: CharPayload = decode(payload)?;
    let k = field_of(g, &p.field, "field")?;
    let chi = || character_from_json(&k, req(&p.chi, "chi")?);
    Ok(match op {
        CharOp::Eval => {
            let chi = chi()?;
            let pt = elements_from_json(&k, req(&p.g, "g")?)?;
            json!({"value": element_to_json(&char_eval(&chi, &pt)?)})
        }
        CharOp::Mul => {
            let psi = character_from_json(&k, req(&p.psi, "psi")?)?;
            json!({"result": character_to_json(&char_mul(&chi()?, &psi)?)})
        }
        CharOp::Member => {
            let chi = chi()?;
            let w = condition_from_json(&k, chi.d(), req(&p.w, "W")?)?;
            let cert = membership(&chi, &w)?;
            let other = membership_via_wperp(&chi, &w)?;
            let mut out = certificate_to_json(&cert);
            out["wperp_verdict"] = json!(other.verdict.as_str());
            out
        }
        CharOp::Torsion => {
            let n = g.level.unwrap_or(1);
            let d = p.d.ok_or_else(|| missing("d"))?;
            let chars = torsion_characters(n, d, &k)?;
            let w = p.w.as_ref().map(|v| condition_from_json(&k, d, v)).transpose()?;
            let verdicts = match &w {
                Some(w) => chars
                    .iter()
                    .map(|c| membership(c, w).map(|m| json!(m.verdict.as_str())))
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            let all_members = w.is_some() && verdicts.iter().all(|v| v == Verdict::Member.as_str());
            json!({
                "level": n,
                "d": d,
                "count": chars.len(),
                "characters": chars.iter().map(character_to_json).collect::<Vec<_>>(),
                "verdicts": verdicts,
                "all_members": all_members,
            })
        }
        CharOp::Pullback => {
            let chi = chi()?;
            let phi = matrix_from_json(&k, req(&p.phi, "phi")?)?;
            let d2 = phi.first().map_or(0, |r| r.len());
            let out = match (&p.w1, &p.w2) {
                (Some(a), Some(b)) => {
                    let w1: DifferentialCondition = condition_from_json(&k, chi.d(), a)?;
                    let w2 = condition_from_json(&k, d2, b)?;
                    char_pullback_with_conditions(&phi, &chi, &w1, &w2)?
                }
                (None, None) => char_pullback(&phi, &chi)?,
                _ => return Err(Error::InvalidInput("give both W1 and W2 or neither".into())),
            };
            json!({"result": character_to_json(&out)})
        }
    })
}

// ------------------------------------------------------------------ sigma

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SigmaPayload {
    #[serde(rename = "L")]
    l: Option<Value>,
    #[serde(default, rename = "K")]
    k: Option<Value>,
    sigma: Vec<usize>,
    #[serde(default)]
    f: Option<FunctionPayload>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionPayload {
    #[serde(default)]
    coordinates: Option<Value>,
    #[serde(default)]
    embeddings: Option<Value>,
}

fn sigma_cmd(g: &Global, payload: &Value) -> Result<Value> {
    let p: SigmaPayload = decode(payload)?;
    let l = field_of(g, &p.l, "L")?;
    let k = match &p.k {
        Some(v) => field_from_json(v, g.prec, DEFAULT_PREC)?,
        None => l.clone(),
    };
    let set = EmbeddingSet::new(&l, &k, p.sigma.clone())?;
    let cm = CMType { sigma: set.clone() };
    let pair = ht_pair_of_cm(&cm)?;
    let (alg, es, _) = idempotents(&l, &k)?;
    let sum = es.iter().fold(alg.from_k(&k.zero()), |acc, e| alg.add(&acc, e));
    let orthogonal = es.iter().enumerate().all(|(i, a)| {
        es.iter().enumerate().all(|(j, b)| {
            let prod = alg.mul(a, b);
            if i == j {
                alg.eq(&prod, a)
            } else {
                alg.is_zero(&prod)
            }
        })
    });
    let mut out = json!({
        "cm_type": cm_type_to_json(&cm),
        "height": cm.height(),
        "embeddings": set.all.len(),
        "W_sigma": condition_to_json(&build_w_sigma(&set)?),
        "ht_pair": ht_pair_to_json(&pair),
        "eigenvectors": eigenvector_check(&pair, &set)?,
        "idempotents": {"sum_is_one": alg.eq(&sum, &alg.one()), "orthogonal": orthogonal},
    });
    if let Some(f) = &p.f {
        let func = match (&f.coordinates, &f.embeddings) {
            (Some(c), None) => SigmaFunction::Coordinates(polynomial_from_json(&k, c)?),
            (None, Some(e)) => SigmaFunction::EmbeddingVariables(polynomial_from_json(&k, e)?),
            _ => return Err(Error::InvalidInput("f needs exactly one of coordinates or embeddings".into())),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        let v = sigma_analytic_test(&func, &set, &mut rng, 4)?;
        out["analytic"] = json!({
            "differential": v.differential,
            "support": v.support,
            "agree": v.agree(),
            "decided": v.decided,
        });
    }
    Ok(out)
}

// --------------------------------------------------------------------- lt

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LtPayload {
    field: Option<Value>,
    #[serde(default)]
    pi: Option<Value>,
    /// "standard", "multiplicative", or a coefficient list.
    #[serde(default)]
    frobenius: Option<Value>,
    #[serde(default)]
    a: Option<Value>,
    #[serde(default)]
    series: Option<Value>,
}

fn build_group(g: &Global, p: &LtPayload, k: &LocalField) -> Result<FormalGroupLaw> {
    let pi = match &p.pi {
        Some(v) => element_from_json(k, v)?,
        None => k.uniformizer(),
    };
    let choice = match &p.frobenius {
        None => FrobeniusChoice::Standard,
        Some(Value::String(s)) if s == "standard" => FrobeniusChoice::Standard,
        Some(Value::String(s)) if s == "multiplicative" => FrobeniusChoice::Multiplicative,
        Some(v @ Value::Array(_)) => FrobeniusChoice::Custom(elements_from_json(k, v)?),
        Some(other) => return Err(Error::InvalidInput(format!("unknown frobenius {other}"))),
    };
    lt_construct(k, &pi, &choice, g.degree.unwrap_or(DEFAULT_DEGREE))
}

fn polygon_to_json(poly: &NewtonPolygon) -> Value {
    json!({
        "vertices": poly.vertices.iter().map(|(n, v)| json!([n, v.to_string()])).collect::<Vec<_>>(),
        "segments": poly.segments.iter().map(|s| json!({
            "from": s.from,
            "to": s.to,
            "root_valuation": s.root_valuation.to_string(),
            "multiplicity": s.multiplicity,
        })).collect::<Vec<_>>(),
    })
}

fn lt_cmd(op: LtOp, g: &Global, payload: &Value) -> Result<Value> {
    let p: LtPayload = decode(payload)?;
    let k = field_of(g, &p.field, "field")?;
    if let LtOp::Newton = op {
        if let Some(s) = &p.series {
            return Ok(polygon_to_json(&newton_polygon(&series_from_json(&k, s)?)?));
        }
    }
    let group = build_group(g, &p, &k)?;
    Ok(match op {
        LtOp::Construct => json!({
            "law": series_to_json(&group.law),
            "frobenius": series_to_json(&group.frobenius),
            "q": group.q,
            "axioms": {
                "unit": group.has_unit(),
                "commutative": group.is_commutative()?,
                "associative": group.is_associative()?,
                "inverse": group.inverse_series()?.1,
            },
        }),
        LtOp::Endo => {
            let a = element_from_json(&group.working_field(), req(&p.a, "a")?)?;
            json!({"series": series_to_json(&lt_endomorphism(&group, &a)?.series)})
        }
        LtOp::Log => {
            let log = lt_logarithm(&group)?;
            let limit = lt_logarithm_limit(&group)?;
            json!({"log": series_to_json(&log), "routes_agree": log.eq_at_prec(&limit)})
        }
        LtOp::Newton => {
            let n = g.level.unwrap_or(1);
            polygon_to_json(&newton_polygon(&pi_power_series(&group, n)?)?)
        }
        LtOp::Torsion => {
            let rep = torsion_report(&group, g.level.unwrap_or(1))?;
            let spec = |v: &[(num_rational::Ratio<i64>, usize)]| -> Vec<Value> {
                v.iter().map(|(val, m)| json!({"valuation": val.to_string(), "multiplicity": m})).collect()
            };
            json!({
                "level": rep.level,
                "nonzero_roots": rep.nonzero_roots,
                "spectrum": spec(&rep.spectrum),
                "predicted": spec(&rep.predicted),
                "matches": rep.matches,
            })
        }
    })
}
