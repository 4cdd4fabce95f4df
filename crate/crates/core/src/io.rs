//! JSON documents and the text rendering of Laurent polynomials.
//!
//! Integers are written as JSON numbers of arbitrary size. Terms appear in
//! lexicographic exponent order and object keys in a fixed order, so
//! emitting the same value twice gives identical bytes.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::fan::{Fan, FanError, SubdivisionMap};
use crate::ktheory::PairingMatrix;
use crate::lattice::{Character, LatticePoint};
use crate::laurent::LaurentPoly;
use crate::pexp::{gkm_validate, CartierData, GkmViolation, PExpError, PExpFun, Validation};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    PExp(#[from] PExpError),
}

fn schema(msg: impl Into<String>) -> IoError {
    IoError::Schema(msg.into())
}

/// An integer of any size, carried as a JSON number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_str(&self.0.to_string()).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        BigInt::from_str(&n.to_string())
            .map(Int)
            .map_err(|_| serde::de::Error::custom(format!("expected an integer, got {n}")))
    }
}

impl Int {
    pub fn vec(v: &[BigInt]) -> Vec<Int> {
        ints(v)
    }
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

fn bigs(v: Vec<Int>) -> Vec<BigInt> {
    v.into_iter().map(|i| i.0).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: Int,
    pub exp: Vec<Int>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaurentDoc {
    pub rank: usize,
    pub terms: Vec<TermDoc>,
}

impl From<&LaurentPoly> for LaurentDoc {
    fn from(p: &LaurentPoly) -> Self {
        LaurentDoc {
            rank: p.rank(),
            terms: p.terms().map(|(u, c)| TermDoc { coeff: Int(c.clone()), exp: ints(u.coords()) }).collect(),
        }
    }
}

impl TryFrom<LaurentDoc> for LaurentPoly {
    type Error = IoError;

    /// Rejects zero coefficients, repeated exponents and rank mismatches, so
    /// every accepted document is already canonical up to term order.
    fn try_from(doc: LaurentDoc) -> Result<Self, IoError> {
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            if t.exp.len() != doc.rank {
                return Err(schema(format!("exponent of length {} in a rank {} polynomial", t.exp.len(), doc.rank)));
            }
            let u = Character::new(bigs(t.exp));
            if t.coeff.0 == BigInt::from(0) {
                return Err(schema(format!("zero coefficient at exponent {u}")));
            }
            if !seen.insert(u.clone()) {
                return Err(schema(format!("duplicate exponent {u}")));
            }
            terms.push((u, t.coeff.0));
        }
        Ok(LaurentPoly::from_iter_terms(doc.rank, terms))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDoc {
    pub rank: usize,
    pub rays: Vec<Vec<Int>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl From<&Fan> for FanDoc {
    fn from(f: &Fan) -> Self {
        FanDoc {
            rank: f.rank(),
            rays: f.rays().iter().map(|r| ints(r.coords())).collect(),
            max_cones: f.max_cones().to_vec(),
        }
    }
}

impl TryFrom<FanDoc> for Fan {
    type Error = IoError;

    fn try_from(doc: FanDoc) -> Result<Self, IoError> {
        let rays = doc.rays.into_iter().map(|r| LatticePoint::new(bigs(r))).collect();
        Ok(Fan::new(doc.rank, rays, doc.max_cones)?)
    }
}

/// A fan given inline or as a path relative to the referring document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FanRef {
    Inline(FanDoc),
    Path(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PExpDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanRef>,
    pub values: Vec<LaurentDoc>,
}

impl From<&PExpFun> for PExpDoc {
    fn from(f: &PExpFun) -> Self {
        PExpDoc { fan: Some(FanRef::Inline(f.fan().as_ref().into())), values: f.values().iter().map(Into::into).collect() }
    }
}

/// A file holding several functions on one fan.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanRef>,
    pub functions: Vec<PExpDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartierDoc {
    pub m: Vec<Vec<Int>>,
}

impl From<&CartierData> for CartierDoc {
    fn from(d: &CartierData) -> Self {
        CartierDoc { m: d.m.iter().map(|u| ints(u.coords())).collect() }
    }
}

impl From<CartierDoc> for CartierData {
    fn from(doc: CartierDoc) -> Self {
        CartierData::new(doc.m.into_iter().map(|u| Character::new(bigs(u))).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubdivisionDoc {
    pub coarse: FanDoc,
    pub fine: FanDoc,
    pub assignment: Vec<usize>,
}

impl From<&SubdivisionMap> for SubdivisionDoc {
    fn from(s: &SubdivisionMap) -> Self {
        SubdivisionDoc {
            coarse: s.coarse.as_ref().into(),
            fine: s.fine.as_ref().into(),
            assignment: s.assignment.clone(),
        }
    }
}

impl TryFrom<SubdivisionDoc> for SubdivisionMap {
    type Error = IoError;

    fn try_from(doc: SubdivisionDoc) -> Result<Self, IoError> {
        let coarse: Fan = doc.coarse.try_into()?;
        let fine: Fan = doc.fine.try_into()?;
        if doc.assignment.len() != fine.max_cones().len() {
            return Err(schema("assignment needs one entry per fine maximal cone"));
        }
        for (i, &a) in doc.assignment.iter().enumerate() {
            let inside = coarse
                .max_cones()
                .get(a)
                .is_some_and(|_| fine.max_cones()[i].iter().all(|&r| coarse.max_cone(a).cone().contains(&fine.rays()[r])));
            if !inside {
                return Err(schema(format!("fine cone {:?} is not inside coarse cone {a}", fine.max_cones()[i])));
            }
        }
        Ok(SubdivisionMap { fine: Arc::new(fine), coarse: Arc::new(coarse), assignment: doc.assignment })
    }
}

/// Extra keys (such as a shape annotation) are ignored on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairingDoc {
    pub rank: usize,
    pub rows: Vec<String>,
    pub columns: Vec<Vec<usize>>,
    pub entries: Vec<Vec<LaurentDoc>>,
}

impl From<&PairingMatrix> for PairingDoc {
    fn from(m: &PairingMatrix) -> Self {
        PairingDoc {
            rank: m.rank,
            rows: m.row_labels.clone(),
            columns: m.columns.clone(),
            entries: m.entries.iter().map(|row| row.iter().map(Into::into).collect()).collect(),
        }
    }
}

impl TryFrom<PairingDoc> for PairingMatrix {
    type Error = IoError;

    fn try_from(doc: PairingDoc) -> Result<Self, IoError> {
        if doc.entries.len() != doc.rows.len() || doc.entries.iter().any(|r| r.len() != doc.columns.len()) {
            return Err(schema("pairing matrix shape does not match its labels"));
        }
        let entries = doc
            .entries
            .into_iter()
            .map(|row| row.into_iter().map(LaurentPoly::try_from).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if entries.iter().flatten().any(|e| e.rank() != doc.rank) {
            return Err(schema("pairing entry has the wrong rank"));
        }
        Ok(PairingMatrix { rank: doc.rank, row_labels: doc.rows, columns: doc.columns, entries })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub face: Vec<usize>,
    pub first_value: LaurentDoc,
    pub second_value: LaurentDoc,
}

impl ViolationDoc {
    pub fn new(fan: &Fan, v: &GkmViolation) -> Self {
        ViolationDoc {
            first: fan.max_cones()[v.first].clone(),
            second: fan.max_cones()[v.second].clone(),
            face: v.face.clone(),
            first_value: (&v.first_value).into(),
            second_value: (&v.second_value).into(),
        }
    }
}

/// Reads and parses a JSON file.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_owned(), source })?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, context: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|source| IoError::Json { context: context.to_owned(), source })
}

/// Indented JSON with a trailing newline. Arrays and objects made only of
/// scalars (exponent vectors, ray lists, single terms) stay on one line.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("documents serialize");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(map) => map.values().all(|x| !x.is_object() && (!x.is_array() || is_flat(x))),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if !items.is_empty() && !is_flat(v) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() && !is_flat(v) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, indent);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, x)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&serde_json::to_string(k).expect("keys serialize"));
                out.push_str(": ");
                write_value(out, x, indent);
            }
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalars serialize")),
    }
}

pub fn read_fan(path: &Path) -> Result<Fan, IoError> {
    read_json::<FanDoc>(path)?.try_into()
}

fn resolve_fan_ref(fan: Option<FanRef>, base: Option<&Path>, fallback: Option<&Arc<Fan>>) -> Result<Arc<Fan>, IoError> {
    let named = match fan {
        None => None,
        Some(FanRef::Inline(doc)) => Some(Fan::try_from(doc)?),
        Some(FanRef::Path(p)) => {
            let p = base.and_then(Path::parent).map_or_else(|| PathBuf::from(&p), |dir| dir.join(&p));
            Some(read_fan(&p)?)
        }
    };
    match (named, fallback) {
        (Some(f), Some(g)) if f != **g => Err(schema("function file names a different fan than the one supplied")),
        (Some(_), Some(g)) => Ok(g.clone()),
        (Some(f), None) => Ok(Arc::new(f)),
        (None, Some(g)) => Ok(g.clone()),
        (None, None) => Err(schema("no fan given for the function")),
    }
}

/// Raw values of a function document, before compatibility checking.
pub fn pexp_values(doc: PExpDoc, base: Option<&Path>, fan: Option<&Arc<Fan>>) -> Result<(Arc<Fan>, Vec<LaurentPoly>), IoError> {
    let fan = resolve_fan_ref(doc.fan, base, fan)?;
    let values = doc.values.into_iter().map(LaurentPoly::try_from).collect::<Result<Vec<_>, _>>()?;
    Ok((fan, values))
}

/// A validated function; compatibility failures become schema errors.
pub fn pexp_from_doc(doc: PExpDoc, base: Option<&Path>, fan: Option<&Arc<Fan>>) -> Result<PExpFun, IoError> {
    let (fan, values) = pexp_values(doc, base, fan)?;
    match gkm_validate(&fan, values)? {
        Validation::Valid(f) => Ok(f),
        Validation::Violations(v) => Err(schema(format!("not a piecewise exponential function: {}", v[0]))),
    }
}

pub fn read_pexp(path: &Path, fan: Option<&Arc<Fan>>) -> Result<PExpFun, IoError> {
    pexp_from_doc(read_json(path)?, Some(path), fan)
}

/// Reads a basis file: either `{"fan": .., "functions": [..]}` or a bare
/// array of function documents.
pub fn read_basis(path: &Path, fan: Option<&Arc<Fan>>) -> Result<Vec<PExpFun>, IoError> {
    let value: serde_json::Value = read_json(path)?;
    let context = path.display().to_string();
    let doc: BasisDoc = if value.is_array() {
        BasisDoc { fan: None, functions: serde_json::from_value(value).map_err(|source| IoError::Json { context, source })? }
    } else {
        serde_json::from_value(value).map_err(|source| IoError::Json { context, source })?
    };
    let fan = match (doc.fan, fan) {
        (None, Some(f)) => Some(f.clone()),
        (None, None) => None,
        (r, f) => Some(resolve_fan_ref(r, Some(path), f)?),
    };
    doc.functions.into_iter().map(|d| pexp_from_doc(d, Some(path), fan.as_ref())).collect()
}

/// Parses the text form produced by `Display`: `0`, or terms `c*e^[..]`
/// joined by ` + `.
pub fn parse_laurent_text(rank: usize, s: &str) -> Result<LaurentPoly, IoError> {
    let s = s.trim();
    if s == "0" {
        return Ok(LaurentPoly::zero(rank));
    }
    let mut doc = LaurentDoc { rank, terms: Vec::new() };
    for term in s.split(" + ") {
        let (c, e) = term.split_once("*e^").ok_or_else(|| schema(format!("malformed term {term:?}")))?;
        let coeff = BigInt::from_str(c).map_err(|_| schema(format!("bad coefficient {c:?}")))?;
        let inner = e
            .strip_prefix('[')
            .and_then(|e| e.strip_suffix(']'))
            .ok_or_else(|| schema(format!("bad exponent {e:?}")))?;
        let exp = if inner.is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|x| BigInt::from_str(x.trim()).map(Int).map_err(|_| schema(format!("bad exponent {e:?}"))))
                .collect::<Result<Vec<_>, _>>()?
        };
        doc.terms.push(TermDoc { coeff: Int(coeff), exp });
    }
    doc.try_into()
}
