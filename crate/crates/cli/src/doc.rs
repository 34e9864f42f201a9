//! JSON documents. Rationals are always strings; keys are emitted sorted.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use pcm_core::operator::{Cycle, FiniteOperator, PointPair};
use pcm_core::polyhedra::{HPolyhedron, LinearInequality, Relation, VPolyhedron};
use pcm_core::rational::{format_rational, parse_rational, QVector, Rational};

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub x: Vec<String>,
    pub xs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDocument {
    pub dim: usize,
    pub points: Vec<PointDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    #[serde(rename = "input-hash")]
    pub input_hash: String,
    pub p: usize,
    #[serde(rename = "tool-version")]
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultDocument {
    pub kind: String,
    pub meta: Meta,
    pub payload: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDoc {
    pub a: Vec<String>,
    pub b: String,
    /// `">="` or `"="`.
    pub rel: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VrepDoc {
    pub lineality: Vec<Vec<String>>,
    pub rays: Vec<Vec<String>>,
    pub vertices: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub k: usize,
    pub xk: Vec<String>,
    pub fiber: Vec<RowDoc>,
    pub vrep: VrepDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracePayload {
    pub engine: String,
    pub final_f: OperatorDocument,
    pub order: Vec<Vec<String>>,
    pub seed: OperatorDocument,
    pub steps: Vec<StepDoc>,
}

pub fn rational_str(q: &Rational) -> String {
    format_rational(q)
}

pub fn vector_strs(v: &QVector) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn parse_vector(items: &[String], dim: usize, field: &str) -> Result<QVector, CliError> {
    if items.len() != dim {
        return Err(CliError::Parse(format!(
            "{field}: expected {dim} coordinates, found {}",
            items.len()
        )));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, s)| {
            parse_rational(s)
                .map_err(|_| CliError::Parse(format!("{field}[{i}]: invalid rational {s:?}")))
        })
        .collect()
}

pub fn pair_doc(p: &PointPair) -> PointDoc {
    PointDoc {
        x: vector_strs(&p.x),
        xs: vector_strs(&p.xs),
    }
}

impl OperatorDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: OperatorDocument = serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("operator document: {e}")))?;
        if doc.dim == 0 {
            return Err(CliError::Parse("dim: must be positive".into()));
        }
        if doc.points.is_empty() {
            return Err(CliError::Parse("points: must not be empty".into()));
        }
        Ok(doc)
    }

    /// Points in document order.
    pub fn pairs(&self) -> Result<Vec<PointPair>, CliError> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let x = parse_vector(&p.x, self.dim, &format!("points[{i}].x"))?;
                let xs = parse_vector(&p.xs, self.dim, &format!("points[{i}].xs"))?;
                Ok(PointPair::new(x, xs)?)
            })
            .collect()
    }

    pub fn operator(&self) -> Result<FiniteOperator, CliError> {
        Ok(FiniteOperator::new(self.dim, self.pairs()?)?)
    }

    pub fn from_pairs<'a>(dim: usize, pairs: impl IntoIterator<Item = &'a PointPair>) -> Self {
        OperatorDocument {
            dim,
            points: pairs.into_iter().map(pair_doc).collect(),
        }
    }

    pub fn from_operator(f: &FiniteOperator) -> Self {
        Self::from_pairs(f.dim(), f.iter())
    }

    /// SHA-256 of the canonical serialization, so equivalent spellings of
    /// the same document hash alike.
    pub fn hash(&self) -> Result<String, CliError> {
        let canonical = OperatorDocument::from_pairs(self.dim, &self.pairs()?);
        let bytes = to_canonical_string(&canonical)?;
        Ok(hex::encode(Sha256::digest(bytes.as_bytes())))
    }
}

impl ResultDocument {
    pub fn new(
        kind: &str,
        p: usize,
        input_hash: String,
        payload: impl Serialize,
    ) -> Result<Self, CliError> {
        Ok(ResultDocument {
            kind: kind.to_string(),
            meta: Meta {
                input_hash,
                p,
                tool_version: TOOL_VERSION.to_string(),
            },
            payload: serde_json::to_value(payload).map_err(|e| CliError::Io(e.to_string()))?,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("result document: {e}")))
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(value: &impl Serialize) -> Result<String, CliError> {
    // Routing through `Value` sorts object keys.
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn row_doc(row: &LinearInequality) -> RowDoc {
    RowDoc {
        a: vector_strs(&row.a),
        b: rational_str(&row.b),
        rel: match row.rel {
            Relation::Ge => ">=".into(),
            Relation::Eq => "=".into(),
        },
    }
}

pub fn rows_doc(h: &HPolyhedron) -> Vec<RowDoc> {
    h.rows().iter().map(row_doc).collect()
}

pub fn rows_from_doc(dim: usize, rows: &[RowDoc]) -> Result<HPolyhedron, CliError> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let a = parse_vector(&r.a, dim, &format!("rows[{i}].a"))?;
            let b = parse_rational(&r.b)
                .map_err(|_| CliError::Parse(format!("rows[{i}].b: invalid rational")))?;
            let rel = match r.rel.as_str() {
                ">=" => Relation::Ge,
                "=" => Relation::Eq,
                other => {
                    return Err(CliError::Parse(format!(
                        "rows[{i}].rel: unknown relation {other:?}"
                    )))
                }
            };
            Ok(LinearInequality::new(a, b, rel))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(HPolyhedron::new(dim, parsed)?)
}

fn set_strs(s: &BTreeSet<QVector>) -> Vec<Vec<String>> {
    s.iter().map(vector_strs).collect()
}

pub fn vrep_doc(v: &VPolyhedron) -> VrepDoc {
    VrepDoc {
        lineality: set_strs(&v.lineality),
        rays: set_strs(&v.rays),
        vertices: set_strs(&v.vertices),
    }
}

pub fn vrep_from_doc(dim: usize, d: &VrepDoc) -> Result<VPolyhedron, CliError> {
    let read = |items: &[Vec<String>], name: &str| {
        items
            .iter()
            .enumerate()
            .map(|(i, s)| parse_vector(s, dim, &format!("{name}[{i}]")))
            .collect::<Result<Vec<_>, CliError>>()
    };
    Ok(VPolyhedron::new(
        dim,
        read(&d.vertices, "vertices")?,
        read(&d.rays, "rays")?,
        read(&d.lineality, "lineality")?,
    )?)
}

pub fn cycle_doc(c: &Cycle) -> Vec<PointDoc> {
    c.entries().iter().map(pair_doc).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"dim": 2, "points": [{"x": ["1", "0"], "xs": ["2/4", "-1"]}]}"#;

    #[test]
    fn operator_round_trip() {
        let doc = OperatorDocument::parse(DOC).unwrap();
        let canonical = OperatorDocument::from_operator(&doc.operator().unwrap());
        assert_eq!(canonical.points[0].xs, vec!["1/2", "-1"]);
        let text = to_canonical_string(&canonical).unwrap();
        assert_eq!(OperatorDocument::parse(&text).unwrap(), canonical);
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn hash_ignores_spelling() {
        let a = OperatorDocument::parse(DOC).unwrap();
        let b = OperatorDocument::parse(&DOC.replace("2/4", "1/2")).unwrap();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn field_diagnostics() {
        let bad = DOC.replace("2/4", "1/0");
        let err = OperatorDocument::parse(&bad).unwrap().pairs().unwrap_err();
        assert!(err.to_string().contains("points[0].xs[0]"), "{err}");
        let short = DOC.replace(r#"["1", "0"]"#, r#"["1"]"#);
        assert!(OperatorDocument::parse(&short).unwrap().pairs().is_err());
        let syntax = OperatorDocument::parse("{\"dim\": 2,\n \"points\": [}").unwrap_err();
        assert!(syntax.to_string().contains("line 2"), "{syntax}");
    }

    #[test]
    fn result_round_trip() {
        let r = ResultDocument::new(
            "pmono",
            2,
            "ab".into(),
            serde_json::json!({"verdict": true}),
        )
        .unwrap();
        let text = to_canonical_string(&r).unwrap();
        assert_eq!(ResultDocument::parse(&text).unwrap(), r);
        let kind = text.find("\"kind\"").unwrap();
        let meta = text.find("\"meta\"").unwrap();
        let payload = text.find("\"payload\"").unwrap();
        assert!(kind < meta && meta < payload);
    }

    #[test]
    fn rows_and_vrep_round_trip() {
        let h = HPolyhedron::new(
            2,
            [
                LinearInequality::ge(
                    QVector::from_ints(&[1, 0]),
                    Rational::from_integer(0.into()),
                ),
                LinearInequality::ge(
                    QVector::from_ints(&[0, 1]),
                    Rational::from_integer(1.into()),
                ),
            ],
        )
        .unwrap();
        assert_eq!(rows_from_doc(2, &rows_doc(&h)).unwrap(), h);
        let v = pcm_core::polyhedra::vertices_and_rays(&h);
        assert_eq!(vrep_from_doc(2, &vrep_doc(&v)).unwrap(), v);
    }
}
