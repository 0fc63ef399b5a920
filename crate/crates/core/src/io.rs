//! JSON forms of polytopes, rings, words and reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::autos::Letter;
use crate::corpus::make;
use crate::error::{Error, Result};
use crate::linalg::IVec;
use crate::polytope::LatticePolytope;
use crate::ring::Ring;

/// `{"name": ...}` looks a polytope up in the corpus; `{"vertices": [...]}`
/// takes the convex hull, optionally naming it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<IVec>>,
}

impl PolytopeJson {
    pub fn of(p: &LatticePolytope) -> Self {
        PolytopeJson {
            name: p.name().map(str::to_string),
            vertices: Some(p.vertices().to_vec()),
        }
    }
}

fn syntax(e: serde_json::Error) -> Error {
    Error::schema(format!("line {}, column {}", e.line(), e.column()), e.to_string())
}

fn as_int_vec(v: &Value, at: &str) -> Result<IVec> {
    let arr = v.as_array().ok_or_else(|| Error::schema(at, "expected an array of integers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| x.as_i64().ok_or_else(|| Error::schema(format!("{at}[{i}]"), "expected an integer")))
        .collect()
}

/// Reads a polytope from its JSON text.
pub fn parse_polytope(text: &str) -> Result<LatticePolytope> {
    let v: Value = serde_json::from_str(text).map_err(syntax)?;
    let obj = v.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| *k != "name" && *k != "vertices") {
        return Err(Error::schema(format!("$.{k}"), "unknown field"));
    }
    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(Error::schema("$.name", "expected a string")),
    };
    let Some(verts) = obj.get("vertices") else {
        let name = name.ok_or_else(|| Error::schema("$", "need `name` or `vertices`"))?;
        return make(&name);
    };
    let arr = verts.as_array().ok_or_else(|| Error::schema("$.vertices", "expected an array"))?;
    if arr.is_empty() {
        return Err(Error::schema("$.vertices", "no vertices"));
    }
    let pts = arr
        .iter()
        .enumerate()
        .map(|(i, x)| as_int_vec(x, &format!("$.vertices[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let n = pts[0].len();
    if let Some(i) = pts.iter().position(|p| p.len() != n) {
        return Err(Error::schema(
            format!("$.vertices[{i}]"),
            format!("has {} coordinates, expected {n}", pts[i].len()),
        ));
    }
    let p = LatticePolytope::hull(&pts)?;
    Ok(match name {
        Some(s) => p.with_name(s),
        None => p,
    })
}

pub fn polytope_to_json(p: &LatticePolytope) -> String {
    serde_json::to_string(&PolytopeJson::of(p)).expect("polytope JSON")
}

/// Accepts inline JSON, a path to a JSON file, or a corpus name.
pub fn resolve_polytope(arg: &str) -> Result<LatticePolytope> {
    let t = arg.trim();
    if t.starts_with('{') {
        return parse_polytope(t);
    }
    let path = Path::new(t);
    if t.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::schema(t, e.to_string()))?;
        return parse_polytope(&text);
    }
    make(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
}

impl RingJson {
    pub fn of(r: &Ring) -> Self {
        let (modulus, variables) = match r {
            Ring::IntegersMod(m) => (Some(*m), None),
            Ring::Polynomials(v) => (None, Some(v.clone())),
            _ => (None, None),
        };
        RingJson {
            kind: r.kind().into(),
            modulus,
            variables,
        }
    }

    pub fn to_ring(&self) -> Result<Ring> {
        match (self.kind.as_str(), self.modulus, &self.variables) {
            ("int", None, None) => Ok(Ring::Integers),
            ("rat", None, None) => Ok(Ring::Rationals),
            ("mod", Some(m), None) => Ring::integers_mod(m),
            ("poly", None, None) => Ring::from_name("poly"),
            ("poly", None, Some(v)) => Ring::polynomials(v),
            ("mod", None, _) => Err(Error::schema("$.ring.modulus", "required for kind `mod`")),
            ("int" | "rat" | "mod" | "poly", _, _) => Err(Error::schema("$.ring", "fields do not fit the ring kind")),
            (k, _, _) => Err(Error::schema("$.ring.kind", format!("unknown ring kind `{k}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterJson {
    pub v: IVec,
    pub coef: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordJson {
    pub ring: RingJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    pub letters: Vec<LetterJson>,
}

/// A word together with its coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub ring: Ring,
    pub stage: Option<usize>,
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn to_json(&self) -> WordJson {
        WordJson {
            ring: RingJson::of(&self.ring),
            stage: self.stage,
            letters: self
                .letters
                .iter()
                .map(|l| LetterJson {
                    v: l.v.clone(),
                    coef: self.ring.format(&l.coef),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("word JSON")
    }
}

pub fn parse_word(text: &str) -> Result<Word> {
    let wj: WordJson = serde_json::from_str(text).map_err(syntax)?;
    let ring = wj.ring.to_ring()?;
    let n = wj.letters.first().map_or(0, |l| l.v.len());
    let letters = wj
        .letters
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if l.v.len() != n {
                return Err(Error::schema(format!("$.letters[{i}].v"), "inconsistent arity"));
            }
            let coef = ring
                .parse(&l.coef)
                .map_err(|e| Error::schema(format!("$.letters[{i}].coef"), e.to_string()))?;
            Ok(Letter::new(l.v.clone(), coef))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word {
        ring,
        stage: wj.stage,
        letters,
    })
}

/// Inline JSON or a path to a JSON file.
pub fn resolve_word(arg: &str) -> Result<Word> {
    let t = arg.trim();
    if t.starts_with('{') {
        return parse_word(t);
    }
    let text = std::fs::read_to_string(t).map_err(|e| Error::schema(t, e.to_string()))?;
    parse_word(&text)
}

/// Output envelope of every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub result: Value,
}

impl Report {
    pub fn new(command: impl Into<String>, result: impl Serialize) -> Self {
        Report {
            command: command.into(),
            inputs: BTreeMap::new(),
            result: serde_json::to_value(result).expect("serializable result"),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs
            .insert(key.into(), serde_json::to_value(value).expect("serializable input"));
        self
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report JSON")
    }
}

/// Parses `"1,0,-1"` or `"(1,0,-1)"` into a vector.
pub fn parse_vector(s: &str) -> Result<IVec> {
    let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    t.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad vector `{s}`"))))
        .collect()
}

/// Parses `"1,0;0,1"` (semicolon separated) into a list of vectors.
pub fn parse_vector_list(s: &str) -> Result<Vec<IVec>> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(parse_vector).collect()
}
