//! Input documents: a fan, an optional morphism, named divisors,
//! polynomials and fiber points.
//!
//! Integers are JSON integers or decimal strings; rationals are strings
//! such as `"-3/4"`. Floating point numbers are rejected.
//!
//! ```json
//! {
//!   "version": 1,
//!   "rank": 2,
//!   "rays": [[1, 0], [0, 1], [-1, -1]],
//!   "cones": [[0, 1], [1, 2], [0, 2]],
//!   "divisors": { "H": [0, 0, 1] },
//!   "polynomials": { "cubic": [{ "coeff": "1", "exponents": [3, 0, 0] }] }
//! }
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::cox::{Exponents, FiberPoint, GradedPolynomial};
use crate::error::{invalid, Result};
use crate::linalg::{Int, IntMatrix, Rat};
use crate::polyhedra::{Cone, Fan};
use crate::toric::{build_setup, over_point, ClassGroupData, EquivariantSetup};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    /// `π_*`, one row per coordinate of the base lattice.
    pub matrix: Vec<Vec<Int>>,
    /// Generators of `σ'`.
    pub target_cone: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rat,
    pub exponents: Exponents,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub character: Vec<Int>,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub version: u64,
    pub rank: usize,
    pub rays: Vec<Vec<Int>>,
    pub cones: Vec<Vec<usize>>,
    pub morphism: Option<Morphism>,
    pub divisors: BTreeMap<String, Vec<Int>>,
    pub polynomials: BTreeMap<String, Vec<Term>>,
    pub fibers: BTreeMap<String, Vec<Character>>,
}

fn err(path: &str, msg: impl std::fmt::Display) -> crate::Error {
    invalid(format!("{path}: {msg}"))
}

fn parse_int(v: &Value, path: &str) -> Result<Int> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Int::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Int::from(u))
            } else {
                Err(err(path, format!("{n} is not an exact integer")))
            }
        }
        Value::String(s) => Int::from_str(s.trim()).map_err(|_| err(path, format!("{s:?} is not an integer"))),
        other => Err(err(path, format!("expected an integer, found {other}"))),
    }
}

fn parse_rat(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => {
            let t = s.trim();
            if let Some((a, b)) = t.split_once('/') {
                let num = Int::from_str(a.trim()).map_err(|_| err(path, format!("{s:?} is not a rational")))?;
                let den = Int::from_str(b.trim()).map_err(|_| err(path, format!("{s:?} is not a rational")))?;
                if den == Int::from(0) {
                    return Err(err(path, "zero denominator"));
                }
                Ok(Rat::new(num, den))
            } else {
                Ok(Rat::from_integer(parse_int(v, path)?))
            }
        }
        _ => Ok(Rat::from_integer(parse_int(v, path)?)),
    }
}

fn parse_usize(v: &Value, path: &str) -> Result<usize> {
    let i = parse_int(v, path)?;
    usize::try_from(&i).map_err(|_| err(path, format!("{i} is not a nonnegative index")))
}

fn parse_u32(v: &Value, path: &str) -> Result<u32> {
    let i = parse_int(v, path)?;
    u32::try_from(&i).map_err(|_| err(path, format!("{i} is not a nonnegative exponent")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn int_vec(v: &Value, path: &str, len: Option<usize>) -> Result<Vec<Int>> {
    let a = array(v, path)?;
    if let Some(l) = len {
        if a.len() != l {
            return Err(err(path, format!("expected {l} entries, found {}", a.len())));
        }
    }
    a.iter().enumerate().map(|(i, x)| parse_int(x, &format!("{path}[{i}]"))).collect()
}

fn check_keys(m: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    for k in m.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(err(path, format!("unknown field {k:?}")));
        }
    }
    Ok(())
}

fn int_json(x: &Int) -> Value {
    match i64::try_from(x) {
        Ok(i) => Value::from(i),
        Err(_) => Value::String(x.to_string()),
    }
}

pub fn rat_json(x: &Rat) -> Value {
    Value::String(x.to_string())
}

pub fn int_vec_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let root: Value = serde_json::from_str(text).map_err(|e| invalid(format!("malformed document: {e}")))?;
        Document::from_value(&root)
    }

    pub fn from_value(root: &Value) -> Result<Document> {
        let top = object(root, "document")?;
        check_keys(top, "document", &["version", "rank", "rays", "cones", "morphism", "divisors", "polynomials", "fibers"])?;
        let get = |k: &str| top.get(k).ok_or_else(|| err("document", format!("missing field {k:?}")));
        let version = parse_int(get("version")?, "version")?;
        if version != Int::from(SCHEMA_VERSION) {
            return Err(err("version", format!("unsupported schema version {version}")));
        }
        let rank = parse_usize(get("rank")?, "rank")?;
        let rays: Vec<Vec<Int>> = array(get("rays")?, "rays")?
            .iter()
            .enumerate()
            .map(|(i, r)| int_vec(r, &format!("rays[{i}]"), Some(rank)))
            .collect::<Result<_>>()?;
        let cones: Vec<Vec<usize>> = array(get("cones")?, "cones")?
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let path = format!("cones[{i}]");
                array(c, &path)?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let p = format!("{path}[{j}]");
                        let idx = parse_usize(x, &p)?;
                        if idx >= rays.len() {
                            return Err(err(&p, format!("cone {i} refers to ray {idx}, but there are {} rays", rays.len())));
                        }
                        Ok(idx)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let morphism = match top.get("morphism") {
            None | Some(Value::Null) => None,
            Some(m) => {
                let mo = object(m, "morphism")?;
                check_keys(mo, "morphism", &["matrix", "target_cone"])?;
                let matrix: Vec<Vec<Int>> = array(mo.get("matrix").ok_or_else(|| err("morphism", "missing field \"matrix\""))?, "morphism.matrix")?
                    .iter()
                    .enumerate()
                    .map(|(i, r)| int_vec(r, &format!("morphism.matrix[{i}]"), Some(rank)))
                    .collect::<Result<_>>()?;
                let rows = matrix.len();
                let target_cone: Vec<Vec<Int>> = array(
                    mo.get("target_cone").ok_or_else(|| err("morphism", "missing field \"target_cone\""))?,
                    "morphism.target_cone",
                )?
                .iter()
                .enumerate()
                .map(|(i, r)| int_vec(r, &format!("morphism.target_cone[{i}]"), Some(rows)))
                .collect::<Result<_>>()?;
                Some(Morphism { matrix, target_cone })
            }
        };
        let nrays = rays.len();
        let mut divisors = BTreeMap::new();
        if let Some(d) = top.get("divisors") {
            for (name, v) in object(d, "divisors")? {
                divisors.insert(name.clone(), int_vec(v, &format!("divisors.{name}"), Some(nrays))?);
            }
        }
        let mut polynomials = BTreeMap::new();
        if let Some(p) = top.get("polynomials") {
            for (name, v) in object(p, "polynomials")? {
                let path = format!("polynomials.{name}");
                let terms = array(v, &path)?
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let tp = format!("{path}[{i}]");
                        let to = object(t, &tp)?;
                        check_keys(to, &tp, &["coeff", "exponents"])?;
                        let coeff = parse_rat(to.get("coeff").ok_or_else(|| err(&tp, "missing field \"coeff\""))?, &format!("{tp}.coeff"))?;
                        let ep = format!("{tp}.exponents");
                        let ea = array(to.get("exponents").ok_or_else(|| err(&tp, "missing field \"exponents\""))?, &ep)?;
                        if ea.len() != nrays {
                            return Err(err(&ep, format!("expected {nrays} exponents, found {}", ea.len())));
                        }
                        let exponents = ea.iter().enumerate().map(|(j, x)| parse_u32(x, &format!("{ep}[{j}]"))).collect::<Result<_>>()?;
                        Ok(Term { coeff, exponents })
                    })
                    .collect::<Result<_>>()?;
                polynomials.insert(name.clone(), terms);
            }
        }
        let mut fibers = BTreeMap::new();
        if let Some(f) = top.get("fibers") {
            let base_rank = morphism.as_ref().map_or(0, |m| m.matrix.len());
            for (name, v) in object(f, "fibers")? {
                let path = format!("fibers.{name}");
                let chars = array(v, &path)?
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let cp = format!("{path}[{i}]");
                        let co = object(c, &cp)?;
                        check_keys(co, &cp, &["character", "value"])?;
                        let character = int_vec(co.get("character").ok_or_else(|| err(&cp, "missing field \"character\""))?, &format!("{cp}.character"), Some(base_rank))?;
                        let value = parse_rat(co.get("value").ok_or_else(|| err(&cp, "missing field \"value\""))?, &format!("{cp}.value"))?;
                        Ok(Character { character, value })
                    })
                    .collect::<Result<_>>()?;
                fibers.insert(name.clone(), chars);
            }
        }
        Ok(Document { version: SCHEMA_VERSION, rank, rays, cones, morphism, divisors, polynomials, fibers })
    }

    pub fn to_value(&self) -> Value {
        let mut top = Map::new();
        top.insert("version".into(), Value::from(self.version));
        top.insert("rank".into(), Value::from(self.rank as u64));
        top.insert("rays".into(), Value::Array(self.rays.iter().map(|r| int_vec_json(r)).collect()));
        top.insert(
            "cones".into(),
            Value::Array(self.cones.iter().map(|c| Value::Array(c.iter().map(|&i| Value::from(i as u64)).collect())).collect()),
        );
        if let Some(m) = &self.morphism {
            let mut mo = Map::new();
            mo.insert("matrix".into(), Value::Array(m.matrix.iter().map(|r| int_vec_json(r)).collect()));
            mo.insert("target_cone".into(), Value::Array(m.target_cone.iter().map(|r| int_vec_json(r)).collect()));
            top.insert("morphism".into(), Value::Object(mo));
        }
        if !self.divisors.is_empty() {
            let d: Map<String, Value> = self.divisors.iter().map(|(k, v)| (k.clone(), int_vec_json(v))).collect();
            top.insert("divisors".into(), Value::Object(d));
        }
        if !self.polynomials.is_empty() {
            let p: Map<String, Value> = self
                .polynomials
                .iter()
                .map(|(k, terms)| {
                    let ts = terms
                        .iter()
                        .map(|t| {
                            let mut o = Map::new();
                            o.insert("coeff".into(), rat_json(&t.coeff));
                            o.insert("exponents".into(), Value::Array(t.exponents.iter().map(|&e| Value::from(e)).collect()));
                            Value::Object(o)
                        })
                        .collect();
                    (k.clone(), Value::Array(ts))
                })
                .collect();
            top.insert("polynomials".into(), Value::Object(p));
        }
        if !self.fibers.is_empty() {
            let f: Map<String, Value> = self
                .fibers
                .iter()
                .map(|(k, cs)| {
                    let arr = cs
                        .iter()
                        .map(|c| {
                            let mut o = Map::new();
                            o.insert("character".into(), int_vec_json(&c.character));
                            o.insert("value".into(), rat_json(&c.value));
                            Value::Object(o)
                        })
                        .collect();
                    (k.clone(), Value::Array(arr))
                })
                .collect();
            top.insert("fibers".into(), Value::Object(f));
        }
        Value::Object(top)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("values serialize")
    }

    pub fn fan(&self) -> Result<Fan> {
        Fan::new(self.rank, self.rays.clone(), self.cones.clone())
    }

    /// The equivariant setup; without a morphism the base is a point.
    pub fn setup(&self) -> Result<EquivariantSetup> {
        let fan = self.fan()?;
        match &self.morphism {
            None => over_point(fan),
            Some(m) => {
                let rows = m.matrix.len();
                let matrix = IntMatrix::from_rows(&m.matrix, self.rank);
                build_setup(fan, matrix, Cone::new(rows, m.target_cone.clone()))
            }
        }
    }

    pub fn divisor(&self, name: &str) -> Result<Vec<Int>> {
        self.divisors.get(name).cloned().ok_or_else(|| invalid(format!("no divisor named {name:?}")))
    }

    pub fn polynomial(&self, name: &str, groups: &ClassGroupData) -> Result<GradedPolynomial> {
        let terms = self.polynomials.get(name).ok_or_else(|| invalid(format!("no polynomial named {name:?}")))?;
        GradedPolynomial::new(groups, terms.iter().map(|t| (t.coeff.clone(), t.exponents.clone())).collect())
            .map_err(|e| invalid(format!("polynomials.{name}: {e}")))
    }

    pub fn fiber(&self, name: &str) -> Result<FiberPoint> {
        let chars = self.fibers.get(name).ok_or_else(|| invalid(format!("no fiber point named {name:?}")))?;
        Ok(FiberPoint { values: chars.iter().map(|c| (c.character.clone(), c.value.clone())).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P2: &str = r#"{
        "version": 1, "rank": 2,
        "rays": [[1, 0], [0, 1], [-1, -1]],
        "cones": [[0, 1], [1, 2], [0, 2]],
        "divisors": {"H": [0, 0, 1]},
        "polynomials": {"cubic": [{"coeff": "1", "exponents": [3, 0, 0]}, {"coeff": "-2/3", "exponents": [0, 3, 0]}]}
    }"#;

    #[test]
    fn round_trip() {
        let d = Document::parse(P2).unwrap();
        let again = Document::parse(&d.to_json()).unwrap();
        assert_eq!(d, again);
        assert_eq!(d.polynomials["cubic"][1].coeff, Rat::new(Int::from(-2), Int::from(3)));
    }

    #[test]
    fn rejects_floats_and_bad_indices() {
        let f = P2.replace("[1, 0], [0, 1]", "[1.0, 0], [0, 1]");
        assert!(Document::parse(&f).is_err());
        let bad = P2.replace("[1, 2], [0, 2]", "[1, 7], [0, 2]");
        let e = Document::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("cone 1"), "{e}");
        let short = P2.replace("\"H\": [0, 0, 1]", "\"H\": [0, 1]");
        assert!(Document::parse(&short).is_err());
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = Document::parse("{\n \"version\": 1,\n \"rank\": }").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
    }
}
