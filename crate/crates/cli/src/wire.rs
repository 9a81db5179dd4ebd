//! JSON wire formats. Every `*_to_value` output is accepted by the matching
//! `*_from_value` parser.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use catdiv_core::burnside::{FinMap, OChain, Span};
use catdiv_core::cantor::{parse_torsion, CantorPoint, Clopen, RawClopen, RawPoint, RawTorsion, TorsionElement};
use catdiv_core::sheaf::EqSheafMap;
use catdiv_core::smooth::IntWire;
use catdiv_core::{EqSheaf, Field, FieldTag, LocMorphism, LocObject, Localized, Matrix, PrimeSet, SmoothNumber};

use crate::{CliError, Result};

fn bad(what: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{what}: {detail}"))
}

pub fn parse_json(s: &str, what: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| bad(what, e))
}

fn field_of(v: &Value, what: &str) -> Result<Option<FieldTag>> {
    match v.get("field") {
        None | Some(Value::Null) => Ok(None),
        Some(t) => serde_json::from_value(t.clone()).map(Some).map_err(|e| bad(what, e)),
    }
}

fn check_field(v: &Value, expected: FieldTag, what: &str) -> Result<()> {
    match field_of(v, what)? {
        Some(t) if t != expected => Err(bad(what, format!("field {t} does not match --field {expected}"))),
        _ => Ok(()),
    }
}

fn uint(v: &Value, key: &str, what: &str) -> Result<u64> {
    v.get(key).and_then(Value::as_u64).ok_or_else(|| bad(what, format!("missing non-negative integer {key:?}")))
}

pub fn smooth_from_value(v: &Value, primes: &PrimeSet, what: &str) -> Result<SmoothNumber> {
    let n = v.as_u64().ok_or_else(|| bad(what, "expected a positive integer"))?;
    primes.smooth(n).map_err(|e| bad(what, e))
}

pub fn smooth_from_str(s: &str, primes: &PrimeSet, what: &str) -> Result<SmoothNumber> {
    let n: u64 = s.trim().parse().map_err(|e| bad(what, e))?;
    primes.smooth(n).map_err(|e| bad(what, e))
}

/// `{"dim": d, "level": m, "field": tag}`; the field is optional.
pub fn object_from_value(v: &Value, primes: &PrimeSet, field: FieldTag) -> Result<LocObject> {
    check_field(v, field, "object")?;
    let dim = uint(v, "dim", "object")? as usize;
    let level = smooth_from_value(v.get("level").unwrap_or(&json!(1)), primes, "object level")?;
    Ok(LocObject::sigma(dim, level))
}

pub fn object_to_value(x: &LocObject, field: FieldTag) -> Value {
    json!({ "dim": x.dim, "level": x.level.value(), "field": field })
}

/// `{"num": a, "den": b}` or a bare integer.
pub fn rational_from_value(v: &Value) -> Result<BigRational> {
    let int = |v: &Value| -> Result<BigInt> {
        match v {
            Value::Number(n) => n.to_string().parse().map_err(|e| bad("rational", e)),
            Value::String(s) => s.parse().map_err(|e| bad("rational", e)),
            _ => Err(bad("rational", "expected an integer")),
        }
    };
    match v {
        Value::Object(_) => {
            let num = int(v.get("num").ok_or_else(|| bad("rational", "missing num"))?)?;
            let den = v.get("den").map(int).transpose()?.unwrap_or_else(BigInt::one);
            if den.is_zero() {
                return Err(bad("rational", "zero denominator"));
            }
            Ok(BigRational::new(num, den))
        }
        _ => Ok(BigRational::from_integer(int(v)?)),
    }
}

pub fn rational_to_value(q: &BigRational) -> Value {
    json!({ "num": to_value(&IntWire(q.numer())), "den": to_value(&IntWire(q.denom())) })
}

pub fn elem_from_value<F: Field>(field: &F, v: &Value) -> Result<F::Elem> {
    let q = rational_from_value(v)?;
    field.from_rational(&q).ok_or_else(|| bad("matrix entry", format!("{q} is not defined in {}", field.tag())))
}

pub fn elem_to_value<F: Field>(field: &F, e: &F::Elem) -> Value {
    let q = field.to_rational(e);
    debug_assert!(!q.denom().is_negative());
    rational_to_value(&q)
}

pub fn matrix_from_value<F: Field>(field: &F, v: &Value, cols: usize) -> Result<Matrix<F>> {
    let rows = v.as_array().ok_or_else(|| bad("matrix", "expected an array of rows"))?;
    let rows: Vec<Vec<F::Elem>> = rows
        .iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| bad("matrix", "rows must be arrays"))?;
            r.iter().map(|e| elem_from_value(field, e)).collect()
        })
        .collect::<Result<_>>()?;
    Matrix::from_rows(rows, cols).map_err(|e| bad("matrix", e))
}

pub fn matrix_to_value<F: Field>(field: &F, m: &Matrix<F>) -> Value {
    Value::Array(
        (0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(|e| elem_to_value(field, e)).collect())).collect(),
    )
}

/// `{"source": obj, "target": obj, "level": r, "matrix": [[q]]}`.
pub fn morphism_from_value<F: Field>(loc: &Localized<F>, v: &Value) -> Result<LocMorphism<F>> {
    let tag = loc.field().tag();
    let get = |k: &str| v.get(k).ok_or_else(|| bad("morphism", format!("missing {k:?}")));
    let source = object_from_value(get("source")?, &loc.primes, tag)?;
    let target = object_from_value(get("target")?, &loc.primes, tag)?;
    let level = smooth_from_value(get("level")?, &loc.primes, "morphism level")?;
    let cols = source.size_at(&level).map_err(|e| bad("morphism", e))?;
    let matrix = matrix_from_value(loc.field(), get("matrix")?, cols)?;
    loc.morphism(source, target, level, matrix).map_err(|e| bad("morphism", e))
}

pub fn morphism_to_value<F: Field>(loc: &Localized<F>, f: &LocMorphism<F>) -> Value {
    let tag = loc.field().tag();
    json!({
        "source": object_to_value(&f.source, tag),
        "target": object_to_value(&f.target, tag),
        "level": f.level.value(),
        "matrix": matrix_to_value(loc.field(), &f.matrix),
    })
}

/// `{"2": [1,0,1], "3": [2]}`.
pub fn point_from_value(v: &Value, primes: &PrimeSet) -> Result<CantorPoint> {
    let raw: RawPoint = serde_json::from_value(v.clone()).map_err(|e| bad("point", e))?;
    raw.validate(primes).map_err(|e| bad("point", e))
}

pub fn point_to_value(x: &CantorPoint) -> Value {
    serde_json::to_value(x).expect("points serialize")
}

/// `"a/b"`, `"a"` or `{"num": a, "den": b}`.
pub fn torsion_from_str(s: &str, primes: &PrimeSet) -> Result<TorsionElement> {
    if s.trim_start().starts_with('{') {
        let raw: RawTorsion = serde_json::from_str(s).map_err(|e| bad("torsion element", e))?;
        return raw.validate(primes).map_err(|e| bad("torsion element", e));
    }
    parse_torsion(s, primes).map_err(|e| bad("torsion element", e))
}

pub fn torsion_to_value(t: &TorsionElement) -> Value {
    serde_json::to_value(t).expect("torsion elements serialize")
}

/// `{"depth": {"2": 2}, "prefixes": [[0,1],[1,0]]}`.
pub fn clopen_from_value(v: &Value, primes: &PrimeSet) -> Result<Clopen> {
    let raw: RawClopen = serde_json::from_value(v.clone()).map_err(|e| bad("clopen", e))?;
    raw.validate(primes).map_err(|e| bad("clopen", e))
}

pub fn clopen_to_value(u: &Clopen) -> Value {
    serde_json::to_value(u).expect("clopens serialize")
}

pub fn finmap_from_value(v: &Value) -> Result<FinMap> {
    serde_json::from_value(v.clone()).map_err(|e| bad("finite map", e))
}

pub fn span_from_value(v: &Value) -> Result<Span> {
    serde_json::from_value(v.clone()).map_err(|e| bad("span", e))
}

pub fn ints(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| to_value(&IntWire(x))).collect())
}

pub fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("payloads serialize")
}

/// `"m0:n0,m1:n1,..."`, each `mᵢ | nᵢ` and both sequences divisibility chains.
pub fn chain_from_str(s: &str, primes: &PrimeSet) -> Result<OChain> {
    let pairs = s
        .split(',')
        .map(|pair| {
            let (m, n) = pair.split_once(':').ok_or_else(|| bad("chain", format!("{pair:?} is not m:n")))?;
            Ok((smooth_from_str(m, primes, "chain")?, smooth_from_str(n, primes, "chain")?))
        })
        .collect::<Result<Vec<_>>>()?;
    OChain::new(pairs).map_err(|e| bad("chain", e))
}

pub fn chain_to_string(c: &OChain) -> String {
    c.pairs().iter().map(|(m, n)| format!("{m}:{n}")).collect::<Vec<_>>().join(",")
}

/// `{"stalk_dim": d, "level": m, "field": tag}` or `{"summands": [..]}` of those.
pub fn sheaf_from_value(v: &Value, primes: &PrimeSet, field: FieldTag) -> Result<EqSheaf> {
    check_field(v, field, "sheaf")?;
    if let Some(parts) = v.get("summands") {
        let parts = parts.as_array().ok_or_else(|| bad("sheaf", "summands must be an array"))?;
        let mut out = EqSheaf { summands: vec![] };
        for p in parts {
            out = out.sum(&sheaf_from_value(p, primes, field)?);
        }
        return Ok(out);
    }
    let dim = uint(v, "stalk_dim", "sheaf")? as usize;
    let level = smooth_from_value(v.get("level").unwrap_or(&json!(1)), primes, "sheaf level")?;
    Ok(EqSheaf::induce(dim, level))
}

pub fn sheaf_to_value(f: &EqSheaf, field: FieldTag) -> Value {
    let one = |x: &LocObject| json!({ "stalk_dim": x.dim, "level": x.level.value(), "field": field });
    match f.summands.as_slice() {
        [x] => one(x),
        xs => json!({ "summands": xs.iter().map(one).collect::<Vec<_>>(), "field": field }),
    }
}

/// Kernel blocks per cell; within a block, rows and columns are grouped by coset.
pub fn sheaf_map_to_value<F: Field>(field: &F, k: &EqSheafMap<F>) -> Value {
    let tag = field.tag();
    json!({
        "source": sheaf_to_value(&EqSheaf::induce(k.source.dim, k.source.level.clone()), tag),
        "target": sheaf_to_value(&EqSheaf::induce(k.target.dim, k.target.level.clone()), tag),
        "depth": k.depth,
        "blocks": k.blocks.iter().map(|b| matrix_to_value(field, b)).collect::<Vec<_>>(),
    })
}
