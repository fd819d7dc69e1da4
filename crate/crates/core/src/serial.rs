//! JSON interchange for the library's value types.
//!
//! Maps are emitted with sorted keys, so equal values serialize to equal
//! bytes.

use crate::error::{Error, Result};
use crate::matop::{IndexSet, MatPsdo};
use crate::psdo::Psdo;
use crate::pvsa::BracketTable;
use crate::superpoly::{DiffPoly, Family, Name, Scalar, Var};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

/// Conversion to and from the JSON schema of a type.
pub trait Json: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json values always serialize")
    }

    fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn bad(what: &str) -> Error {
    Error::Parse(what.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(&format!("missing field {key}")))
}

fn uint(v: &Value, key: &str) -> Result<u64> {
    field(v, key)?.as_u64().ok_or_else(|| bad(&format!("{key} is not a nonnegative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(&format!("{what} is not an array")))
}

fn small(x: u64, what: &str) -> Result<u16> {
    u16::try_from(x).map_err(|_| bad(&format!("{what} out of range")))
}

impl Json for Scalar {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        let s = v.as_str().ok_or_else(|| bad("coefficient is not a string"))?;
        let r: Scalar = s.parse().map_err(|_| bad(&format!("bad rational {s}")))?;
        if r.denom().sign() == num_bigint::Sign::Minus {
            return Err(bad("negative denominator"));
        }
        Ok(r)
    }
}

impl Json for Var {
    fn to_json(&self) -> Value {
        let (family, name) = match self.family {
            Family::Named(n) => ("named", Some(n.as_str())),
            f => (f.label(), None),
        };
        let mut v = json!({
            "family": family,
            "M": self.m,
            "i": self.i,
            "j": self.j,
            "der": self.der,
            "odd": self.odd,
        });
        if let Some(n) = name {
            v["name"] = json!(n);
        }
        v
    }

    fn from_json(v: &Value) -> Result<Self> {
        let label = field(v, "family")?.as_str().ok_or_else(|| bad("family is not a string"))?;
        let family = match label {
            "named" => Family::Named(Name::intern(field(v, "name")?.as_str().ok_or_else(|| bad("name is not a string"))?)),
            "u" | "q" | "w" | "lambda" | "mu" | "nu" | "eps" => Family::from_label(label),
            other => return Err(bad(&format!("unknown family {other}"))),
        };
        let m = match v.get("M") {
            None | Some(Value::Null) => None,
            Some(x) => Some(small(x.as_u64().ok_or_else(|| bad("M is not an integer"))?, "M")?),
        };
        let odd = match v.get("odd") {
            None => false,
            Some(x) => x.as_bool().ok_or_else(|| bad("odd is not a boolean"))?,
        };
        if odd && family.is_parameter() {
            return Err(bad("parameters are even"));
        }
        Ok(Var {
            family,
            m,
            i: small(uint(v, "i")?, "i")?,
            j: small(uint(v, "j")?, "j")?,
            der: small(uint(v, "der")?, "der")?,
            odd,
        })
    }
}

impl Json for DiffPoly {
    fn to_json(&self) -> Value {
        let terms = self
            .terms()
            .map(|(m, c)| {
                let factors: Vec<Value> = m
                    .factors()
                    .iter()
                    .map(|(v, e)| {
                        let mut f = v.to_json();
                        f["exp"] = json!(e);
                        f
                    })
                    .collect();
                json!({ "coeff": c.to_json(), "factors": factors })
            })
            .collect();
        Value::Array(terms)
    }

    fn from_json(v: &Value) -> Result<Self> {
        let mut out = DiffPoly::zero();
        for t in array(v, "polynomial")? {
            let c = Scalar::from_json(field(t, "coeff")?)?;
            let mut list = Vec::new();
            for f in array(field(t, "factors")?, "factors")? {
                let e = u32::try_from(uint(f, "exp")?).map_err(|_| bad("exp out of range"))?;
                if e == 0 {
                    return Err(bad("zero exponent"));
                }
                list.push((Var::from_json(f)?, e));
            }
            out += DiffPoly::product_of(&list, c);
        }
        Ok(out)
    }
}

/// A bracket value as a polynomial in `λ` and `μ`.
///
/// Schema: a list of `{"lambda": a, "mu": b, "coeff": DiffPoly}`.
pub fn lambda_poly_to_json(p: &DiffPoly) -> Value {
    let mut rows = Vec::new();
    for (a, c) in p.coeffs_in(Family::Lambda) {
        for (b, d) in c.coeffs_in(Family::Mu) {
            rows.push(json!({ "lambda": a, "mu": b, "coeff": d.to_json() }));
        }
    }
    Value::Array(rows)
}

pub fn lambda_poly_from_json(v: &Value) -> Result<DiffPoly> {
    let mut out = DiffPoly::zero();
    for r in array(v, "bracket value")? {
        let a = u32::try_from(uint(r, "lambda")?).map_err(|_| bad("lambda degree out of range"))?;
        let b = u32::try_from(uint(r, "mu")?).map_err(|_| bad("mu degree out of range"))?;
        let c = DiffPoly::from_json(field(r, "coeff")?)?;
        let lm = &DiffPoly::var_pow(Var::lambda(), a) * &DiffPoly::var_pow(Var::param(Family::Mu), b);
        out += &lm * &c;
    }
    Ok(out)
}

impl Json for Psdo {
    fn to_json(&self) -> Value {
        let coeffs: Map<String, Value> = self.coeffs().iter().map(|(k, c)| (k.to_string(), c.to_json())).collect();
        let floor = match self.floor() {
            None => json!("exact"),
            Some(t) => json!(t),
        };
        json!({ "coeffs": coeffs, "floor": floor })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let floor = match field(v, "floor")? {
            Value::String(s) if s == "exact" => None,
            x => Some(
                x.as_i64()
                    .and_then(|t| i32::try_from(t).ok())
                    .ok_or_else(|| bad("floor is neither an integer nor \"exact\""))?,
            ),
        };
        let mut coeffs = BTreeMap::new();
        let map = field(v, "coeffs")?.as_object().ok_or_else(|| bad("coeffs is not an object"))?;
        for (k, c) in map {
            let e: i32 = k.parse().map_err(|_| bad(&format!("bad exponent {k}")))?;
            if floor.is_some_and(|t| e < t) {
                return Err(bad("coefficient below the floor"));
            }
            coeffs.insert(e, DiffPoly::from_json(c)?);
        }
        Ok(Psdo::new(coeffs, floor))
    }
}

impl Json for IndexSet {
    fn to_json(&self) -> Value {
        json!({ "ids": self.ids(), "odd": self.profile() })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let ids = array(field(v, "ids")?, "ids")?
            .iter()
            .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(|| bad("id is not an integer")))
            .collect::<Result<Vec<_>>>()?;
        let odd = array(field(v, "odd")?, "odd")?
            .iter()
            .map(|x| x.as_bool().ok_or_else(|| bad("parity is not a boolean")))
            .collect::<Result<Vec<_>>>()?;
        IndexSet::new(ids, odd)
    }
}

impl Json for MatPsdo {
    fn to_json(&self) -> Value {
        let (r, c) = (self.rows().len(), self.cols().len());
        let grid: Vec<Value> =
            (0..r).map(|i| Value::Array((0..c).map(|j| self.at(i, j).to_json()).collect())).collect();
        json!({ "rows": self.rows().to_json(), "cols": self.cols().to_json(), "entries": grid })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let rows = IndexSet::from_json(field(v, "rows")?)?;
        let cols = IndexSet::from_json(field(v, "cols")?)?;
        let mut entries = Vec::new();
        for row in array(field(v, "entries")?, "entries")? {
            let row = array(row, "row")?;
            if row.len() != cols.len() {
                return Err(bad("row length differs from the column count"));
            }
            for e in row {
                entries.push(Psdo::from_json(e)?);
            }
        }
        MatPsdo::new(rows, cols, entries)
    }
}

impl Json for BracketTable {
    fn to_json(&self) -> Value {
        let generators: Vec<Value> = self.generators().iter().map(Var::to_json).collect();
        let entries: Vec<Value> = self
            .entries()
            .filter(|(_, v)| !v.is_zero())
            .map(|((a, b), v)| json!({ "a": a.to_json(), "b": b.to_json(), "value": lambda_poly_to_json(v) }))
            .collect();
        json!({ "generators": generators, "entries": entries })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let generators =
            array(field(v, "generators")?, "generators")?.iter().map(Var::from_json).collect::<Result<Vec<_>>>()?;
        let mut t = BracketTable::new(generators);
        for e in array(field(v, "entries")?, "entries")? {
            let a = Var::from_json(field(e, "a")?)?;
            let b = Var::from_json(field(e, "b")?)?;
            for g in [&a, &b] {
                if !t.contains(g) {
                    return Err(Error::UnknownGenerator(g.to_string()));
                }
            }
            t.insert(a, b, lambda_poly_from_json(field(e, "value")?)?);
        }
        Ok(t)
    }
}
