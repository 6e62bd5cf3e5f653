//! Canonical JSON for vectors, decisions and random instances.
//!
//! Keys are sorted, scalars and points are strings in lowest terms, and no
//! floating point appears anywhere, so equal values always print identically.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::decide::{Certificate, Decision, SpanTerm};
use crate::oracle::{Instance, InstanceProfile, WitnessTerm};
use crate::pmod::{AugVector, ModVector};
use crate::ring::{format_rational, parse_rational, RingSpec, Scalar};
use crate::structure::{ParamSet, PatternKey, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    At { path: String, message: String },
}

fn err(path: &str, message: impl Into<String>) -> FormatError {
    FormatError::At {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))
}

fn points_to_json(points: &[Point]) -> Value {
    Value::Array(points.iter().map(|p| Value::String(format_rational(p))).collect())
}

pub fn param_set_to_json(params: &ParamSet) -> Value {
    points_to_json(params.points())
}

pub fn modvector_to_json(v: &ModVector) -> Value {
    let terms: Vec<Value> = v
        .terms()
        .map(|(tuple, c)| json!({"coeff": c.to_string(), "tuple": points_to_json(tuple)}))
        .collect();
    json!({"arity": v.arity(), "ring": v.ring().to_string(), "terms": terms})
}

pub fn augvector_to_json(a: &AugVector) -> Value {
    Value::Object(
        a.entries()
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
            .collect(),
    )
}

fn span_term_to_json(t: &SpanTerm) -> Value {
    json!({
        "coeff": t.coeff.to_string(),
        "generator": t.generator,
        "representative": modvector_to_json(&t.representative),
    })
}

fn witness_term_to_json(t: &WitnessTerm) -> Value {
    json!({
        "coeff": t.coeff.to_string(),
        "generator": t.generator,
        "image": modvector_to_json(&t.image),
    })
}

pub fn certificate_to_json(c: &Certificate) -> Value {
    let mut obj = Map::new();
    obj.insert("type".into(), Value::String(c.kind().into()));
    match c {
        Certificate::Span { terms, witness } => {
            obj.insert("terms".into(), Value::Array(terms.iter().map(span_term_to_json).collect()));
            if let Some(w) = witness {
                obj.insert("witness".into(), Value::Array(w.iter().map(witness_term_to_json).collect()));
            }
        }
        Certificate::Functional(phi) => {
            obj.insert("functional".into(), augvector_to_json(phi));
        }
        Certificate::Character(chi) => {
            let entries = chi
                .iter()
                .map(|(k, v)| (k.to_string(), Value::String(format_rational(v))))
                .collect();
            obj.insert("character".into(), Value::Object(entries));
        }
    }
    Value::Object(obj)
}

pub fn decision_to_json(d: &Decision) -> Value {
    json!({
        "certificate": certificate_to_json(&d.certificate),
        "member": d.member,
        "paramSet": param_set_to_json(&d.param_set),
        "repCount": d.rep_count,
        "ring": d.ring.to_string(),
    })
}

pub fn instance_to_json(inst: &Instance) -> Value {
    json!({
        "generators": inst.generators.iter().map(modvector_to_json).collect::<Vec<_>>(),
        "planted": inst.planted,
        "profile": serde_json::to_value(&inst.profile).expect("profile serializes"),
        "seed": inst.seed,
        "target": modvector_to_json(&inst.target),
    })
}

fn field<'a>(obj: &'a Value, name: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.get(name).ok_or_else(|| err(path, format!("missing field \"{name}\"")))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str, FormatError> {
    v.as_str().ok_or_else(|| err(path, "expected a string"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FormatError> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn count(v: &Value, path: &str) -> Result<usize, FormatError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| err(path, "expected a non-negative integer"))
}

fn ring_of(v: &Value, path: &str) -> Result<RingSpec, FormatError> {
    string(v, path)?.parse().map_err(|e: crate::ring::RingError| err(path, e.to_string()))
}

fn scalar(ring: RingSpec, v: &Value, path: &str) -> Result<Scalar, FormatError> {
    let s = string(v, path)?;
    Scalar::parse(ring, s).map_err(|e| err(path, format!("\"{s}\": {e}")))
}

fn rational(v: &Value, path: &str) -> Result<Point, FormatError> {
    let s = string(v, path)?;
    parse_rational(s).map_err(|e| err(path, format!("\"{s}\": {e}")))
}

/// Parses a vector. With `ring` given, coefficients are read in that ring
/// regardless of the file's own ring (terms that vanish there are dropped);
/// otherwise the file's ring is used and zero coefficients are rejected.
/// Duplicate tuples are always rejected.
pub fn modvector_from_json(v: &Value, ring: Option<RingSpec>, path: &str) -> Result<ModVector, FormatError> {
    object(v, path)?;
    let ring = match ring {
        Some(r) => r,
        None => ring_of(field(v, "ring", path)?, &format!("{path}.ring"))?,
    };
    let arity = count(field(v, "arity", path)?, &format!("{path}.arity"))?;
    let mut terms: BTreeMap<Vec<Point>, Scalar> = BTreeMap::new();
    let coerced = v.get("ring").and_then(Value::as_str) != Some(ring.to_string().as_str());
    for (i, term) in array(field(v, "terms", path)?, &format!("{path}.terms"))?.iter().enumerate() {
        let tpath = format!("{path}.terms[{i}]");
        let coeff = scalar(ring, field(term, "coeff", &tpath)?, &format!("{tpath}.coeff"))?;
        let tuple: Vec<Point> = array(field(term, "tuple", &tpath)?, &format!("{tpath}.tuple"))?
            .iter()
            .enumerate()
            .map(|(j, x)| rational(x, &format!("{tpath}.tuple[{j}]")))
            .collect::<Result<_, _>>()?;
        if tuple.len() != arity {
            return Err(err(&tpath, format!("tuple of length {} in arity {arity}", tuple.len())));
        }
        if terms.contains_key(&tuple) {
            return Err(err(&tpath, "duplicate tuple"));
        }
        if coeff.is_zero() && !coerced {
            return Err(err(&tpath, "zero coefficient"));
        }
        terms.insert(tuple, coeff);
    }
    ModVector::from_terms(ring, arity, terms).map_err(|e| err(path, e.to_string()))
}

/// A single vector object or an array of them.
pub fn modvectors_from_json(v: &Value, ring: Option<RingSpec>, path: &str) -> Result<Vec<ModVector>, FormatError> {
    match v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, item)| modvector_from_json(item, ring, &format!("{path}[{i}]")))
            .collect(),
        _ => Ok(vec![modvector_from_json(v, ring, path)?]),
    }
}

fn keyed<T>(
    v: &Value,
    path: &str,
    mut parse: impl FnMut(&Value, &str) -> Result<T, FormatError>,
) -> Result<Vec<(PatternKey, T)>, FormatError> {
    object(v, path)?
        .iter()
        .map(|(k, x)| Ok((PatternKey::new(k.clone()), parse(x, &format!("{path}[\"{k}\"]"))?)))
        .collect()
}

pub fn augvector_from_json(v: &Value, ring: RingSpec, path: &str) -> Result<AugVector, FormatError> {
    let entries = keyed(v, path, |x, p| scalar(ring, x, p))?;
    Ok(AugVector::from_entries(ring, entries))
}

fn certificate_from_json(v: &Value, ring: RingSpec, path: &str) -> Result<Certificate, FormatError> {
    let kind = string(field(v, "type", path)?, &format!("{path}.type"))?;
    match kind {
        "span-witness" | "explicit-witness" => {
            let tpath = format!("{path}.terms");
            let terms = array(field(v, "terms", path)?, &tpath)?
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let p = format!("{tpath}[{i}]");
                    Ok(SpanTerm {
                        coeff: scalar(ring, field(t, "coeff", &p)?, &format!("{p}.coeff"))?,
                        generator: count(field(t, "generator", &p)?, &format!("{p}.generator"))?,
                        representative: modvector_from_json(field(t, "representative", &p)?, None, &format!("{p}.representative"))?,
                    })
                })
                .collect::<Result<_, FormatError>>()?;
            let witness = match (kind, v.get("witness")) {
                ("span-witness", None) => None,
                ("explicit-witness", Some(w)) => {
                    let wpath = format!("{path}.witness");
                    Some(
                        array(w, &wpath)?
                            .iter()
                            .enumerate()
                            .map(|(i, t)| {
                                let p = format!("{wpath}[{i}]");
                                Ok(WitnessTerm {
                                    coeff: scalar(ring, field(t, "coeff", &p)?, &format!("{p}.coeff"))?,
                                    generator: count(field(t, "generator", &p)?, &format!("{p}.generator"))?,
                                    image: modvector_from_json(field(t, "image", &p)?, None, &format!("{p}.image"))?,
                                })
                            })
                            .collect::<Result<_, FormatError>>()?,
                    )
                }
                _ => return Err(err(path, "witness present exactly for explicit-witness certificates")),
            };
            Ok(Certificate::Span { terms, witness })
        }
        "dual-functional" => Ok(Certificate::Functional(augvector_from_json(
            field(v, "functional", path)?,
            ring,
            &format!("{path}.functional"),
        )?)),
        "character" => {
            let entries = keyed(field(v, "character", path)?, &format!("{path}.character"), rational)?;
            Ok(Certificate::Character(entries.into_iter().collect()))
        }
        other => Err(err(&format!("{path}.type"), format!("unknown certificate type \"{other}\""))),
    }
}

pub fn decision_from_json(v: &Value, path: &str) -> Result<Decision, FormatError> {
    let ring = ring_of(field(v, "ring", path)?, &format!("{path}.ring"))?;
    let member = field(v, "member", path)?
        .as_bool()
        .ok_or_else(|| err(&format!("{path}.member"), "expected a boolean"))?;
    let ppath = format!("{path}.paramSet");
    let points = array(field(v, "paramSet", path)?, &ppath)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational(x, &format!("{ppath}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let param_set = ParamSet::new(points).map_err(|e| err(&ppath, e.to_string()))?;
    let rep_count = count(field(v, "repCount", path)?, &format!("{path}.repCount"))?;
    let certificate = certificate_from_json(field(v, "certificate", path)?, ring, &format!("{path}.certificate"))?;
    Ok(Decision {
        member,
        certificate,
        param_set,
        rep_count,
        ring,
    })
}

pub fn instance_from_json(v: &Value, path: &str) -> Result<Instance, FormatError> {
    let profile: InstanceProfile = serde_json::from_value(field(v, "profile", path)?.clone())
        .map_err(|e| err(&format!("{path}.profile"), e.to_string()))?;
    let seed = field(v, "seed", path)?
        .as_u64()
        .ok_or_else(|| err(&format!("{path}.seed"), "expected a non-negative integer"))?;
    let planted = field(v, "planted", path)?
        .as_bool()
        .ok_or_else(|| err(&format!("{path}.planted"), "expected a boolean"))?;
    Ok(Instance {
        seed,
        profile,
        target: modvector_from_json(field(v, "target", path)?, None, &format!("{path}.target"))?,
        generators: modvectors_from_json(field(v, "generators", path)?, None, &format!("{path}.generators"))?,
        planted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::{Decider, MembershipOptions};
    use crate::oracle::random_instance;

    const Q: RingSpec = RingSpec::Rationals;

    #[test]
    fn modvector_layout() {
        let v = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[2])]);
        assert_eq!(
            serde_json::to_string(&modvector_to_json(&v)).unwrap(),
            r#"{"arity":1,"ring":"Q","terms":[{"coeff":"1","tuple":["0"]},{"coeff":"-1","tuple":["2"]}]}"#
        );
        assert_eq!(modvector_from_json(&modvector_to_json(&v), None, "x").unwrap(), v);
    }

    #[test]
    fn parse_errors_name_the_term() {
        let bad = parse_json(r#"{"arity":1,"ring":"Q","terms":[{"coeff":"1","tuple":["1/0"]}]}"#).unwrap();
        let e = modvector_from_json(&bad, None, "x.json").unwrap_err().to_string();
        assert!(e.contains("x.json.terms[0].tuple[0]") && e.contains("1/0"), "{e}");

        let zero = parse_json(r#"{"arity":1,"ring":"Q","terms":[{"coeff":"0","tuple":["1"]}]}"#).unwrap();
        assert!(modvector_from_json(&zero, None, "z").unwrap_err().to_string().contains("zero coefficient"));

        let dup = parse_json(
            r#"{"arity":1,"ring":"Q","terms":[{"coeff":"1","tuple":["1"]},{"coeff":"2","tuple":["2/2"]}]}"#,
        )
        .unwrap();
        assert!(modvector_from_json(&dup, None, "d").unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn ring_override_coerces() {
        let v = parse_json(r#"{"arity":1,"ring":"Q","terms":[{"coeff":"-1","tuple":["0"]},{"coeff":"2","tuple":["1"]}]}"#).unwrap();
        let gf2 = RingSpec::PrimeField(2);
        let parsed = modvector_from_json(&v, Some(gf2), "v").unwrap();
        assert_eq!(parsed, ModVector::from_int_terms(gf2, &[(1, &[0])]));
    }

    #[test]
    fn decisions_round_trip() {
        let d = Decider::default();
        let gen = ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[1])]);
        let opts = MembershipOptions {
            param_set: None,
            witness_budget: 4,
        };
        for target in [
            ModVector::from_int_terms(Q, &[(1, &[0]), (-1, &[2])]),
            ModVector::from_int_terms(Q, &[(1, &[0])]),
        ] {
            let decision = d.membership(&target, &[gen.clone()], &opts).unwrap();
            let json = decision_to_json(&decision);
            assert_eq!(decision_from_json(&json, "d").unwrap(), decision);
        }
        let z = RingSpec::Integers;
        let target = ModVector::from_int_terms(z, &[(1, &[0]), (1, &[1])]);
        let decision = d.membership(&target, &[ModVector::from_int_terms(z, &[(2, &[0])])], &opts).unwrap();
        let json = decision_to_json(&decision);
        assert_eq!(json["certificate"]["character"]["p0=x0<p1"], "1/2");
        assert_eq!(decision_from_json(&json, "d").unwrap(), decision);
    }

    #[test]
    fn instances_round_trip() {
        let inst = random_instance(3, &InstanceProfile::new(2, 3, RingSpec::PrimeField(3)));
        assert_eq!(instance_from_json(&instance_to_json(&inst), "i").unwrap(), inst);
    }
}
