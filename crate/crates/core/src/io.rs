//! JSON files for structures and chains.
//!
//! Indices are 1-based on disk. Emission is canonical: object keys sorted,
//! sets sorted by cardinality then lexicographically, rationals in lowest
//! terms, two-space indentation, LF line endings and a trailing newline.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::index_set::{IndexSet, MAX_DIM};
use crate::integer::{IntegerChain, IntegerReport};
use crate::linalg::{Matrix, Vector};
use crate::realization::{ChainReport, RealizationChain, Stage};
use crate::scalar::Scalar;
use crate::structure::{ConeStructure, PieceSpec, StructureCandidate, StructureError, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field { path: path.into(), message: message.into() }
}

fn parse_value(text: &str) -> Result<Value, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Pretty-prints with a trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value always serializes");
    s.push('\n');
    s
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FormatError> {
    v.as_object().ok_or_else(|| field(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, FormatError> {
    v.as_array().ok_or_else(|| field(path, "expected an array"))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    obj.get(key).ok_or_else(|| field(path, format!("missing field \"{key}\"")))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), FormatError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(field(path, format!("unknown field \"{k}\""))),
        None => Ok(()),
    }
}

pub fn parse_rational<S: Scalar>(v: &Value, path: &str) -> Result<S, FormatError> {
    let s = v.as_str().ok_or_else(|| field(path, "expected a rational string such as \"3/4\""))?;
    S::parse_str(s).ok_or_else(|| field(path, format!("malformed rational \"{s}\"")))
}

pub fn emit_rational<S: Scalar>(x: &S) -> Value {
    Value::String(x.to_string())
}

fn parse_matrix<S: Scalar>(v: &Value, path: &str) -> Result<Matrix<S>, FormatError> {
    let rows = array(v, path)?;
    let n = rows.len();
    if n == 0 {
        return Err(field(path, "empty matrix"));
    }
    let mut parsed = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let row = array(row, &p)?;
        if row.len() != n {
            return Err(field(p, format!("row has {} entries, matrix has {n} rows", row.len())));
        }
        let entries = row
            .iter()
            .enumerate()
            .map(|(j, x)| parse_rational(x, &format!("{path}[{i}][{j}]")))
            .collect::<Result<Vec<S>, _>>()?;
        parsed.push(entries);
    }
    Ok(Matrix::from_rows(parsed).expect("square by construction"))
}

pub fn emit_matrix<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(m.rows().map(|r| Value::Array(r.iter().map(emit_rational).collect())).collect())
}

pub fn emit_vector<S: Scalar>(v: &Vector<S>) -> Value {
    Value::Array(v.iter().map(emit_rational).collect())
}

/// Parses `"a/b,c,..."`.
pub fn parse_vector_literal<S: Scalar>(text: &str) -> Result<Vector<S>, FormatError> {
    text.split(',')
        .enumerate()
        .map(|(i, part)| {
            S::parse_str(part.trim())
                .ok_or_else(|| field(format!("vector entry {}", i + 1), format!("malformed rational \"{part}\"")))
        })
        .collect::<Result<Vec<S>, _>>()
        .map(Vector::new)
}

fn parse_index_list(v: &Value, n: usize, path: &str) -> Result<IndexSet, FormatError> {
    let items = array(v, path)?;
    let mut indices = Vec::with_capacity(items.len());
    for (k, item) in items.iter().enumerate() {
        let i = item.as_u64().ok_or_else(|| field(format!("{path}[{k}]"), "expected a positive integer"))?;
        if indices.contains(&i) {
            return Err(field(path, format!("index {i} repeated")));
        }
        indices.push(i);
    }
    IndexSet::from_one_based(&indices, n).ok_or_else(|| field(path, format!("indices must lie in 1..={n}")))
}

fn emit_set(s: IndexSet) -> Value {
    json!(s.to_one_based())
}

fn structure_from_value(v: &Value, path: &str) -> Result<StructureCandidate, FormatError> {
    let obj = object(v, path)?;
    reject_unknown(obj, &["n", "sets"], path)?;
    let n_path = format!("{path}.n");
    let n = get(obj, "n", path)?.as_u64().ok_or_else(|| field(&n_path, "expected a positive integer"))?;
    if n == 0 || n > MAX_DIM as u64 {
        return Err(field(n_path, format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    let n = n as usize;
    let sets_path = format!("{path}.sets");
    let sets = array(get(obj, "sets", path)?, &sets_path)?;
    let mut pieces = Vec::with_capacity(sets.len());
    for (k, entry) in sets.iter().enumerate() {
        let p = format!("{sets_path}[{k}]");
        let e = object(entry, &p)?;
        let set = parse_index_list(get(e, "S", &p)?, n, &format!("{p}.S"))?;
        // name the entry by its S from here on
        let p = format!("{p} (S = {set})");
        reject_unknown(e, &["S", "e_pos", "e_free"], &p)?;
        let e_pos = parse_index_list(get(e, "e_pos", &p)?, n, &format!("{p}.e_pos"))?;
        let e_free = parse_index_list(get(e, "e_free", &p)?, n, &format!("{p}.e_free"))?;
        pieces.push(PieceSpec::new(set, e_pos, e_free));
    }
    Ok(StructureCandidate { n, pieces })
}

fn structure_to_value(c: &StructureCandidate) -> Value {
    let mut pieces = c.pieces.clone();
    pieces.sort_by(|a, b| a.set.canonical_cmp(&b.set));
    let sets: Vec<Value> = pieces
        .iter()
        .map(|p| json!({ "S": emit_set(p.set), "e_pos": emit_set(p.e_pos), "e_free": emit_set(p.e_free) }))
        .collect();
    json!({ "n": c.n, "sets": sets })
}

/// Parses a structure file. The result still needs validating.
pub fn parse_structure(text: &str) -> Result<StructureCandidate, FormatError> {
    structure_from_value(&parse_value(text)?, "structure")
}

pub fn emit_structure(c: &StructureCandidate) -> String {
    to_canonical_string(&structure_to_value(c))
}

/// The integer section of a chain file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSection<S> {
    pub scalars: Vec<S>,
    pub matrices: Vec<Matrix<S>>,
    pub primes: Vec<u64>,
}

impl<S: Scalar> From<IntegerChain<S>> for IntegerSection<S> {
    fn from(ic: IntegerChain<S>) -> Self {
        IntegerSection { scalars: ic.scalars, matrices: ic.connecting, primes: ic.primes }
    }
}

impl<S: Scalar> IntegerSection<S> {
    pub fn to_chain(&self) -> IntegerChain<S> {
        IntegerChain { connecting: self.matrices.clone(), scalars: self.scalars.clone(), primes: self.primes.clone() }
    }
}

/// A chain file as written on disk, before any validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFile<S> {
    pub structure: StructureCandidate,
    pub stages: Vec<Stage<S>>,
    pub connecting: Vec<Matrix<S>>,
    pub integer: Option<IntegerSection<S>>,
}

impl<S: Scalar> ChainFile<S> {
    pub fn from_chain(c: &RealizationChain<S>, integer: Option<IntegerChain<S>>) -> Self {
        ChainFile {
            structure: c.structure().to_candidate(),
            stages: c.stages().to_vec(),
            connecting: c.connecting().to_vec(),
            integer: integer.map(IntegerSection::from),
        }
    }

    /// Validates the embedded structure and assembles the chain. The chain
    /// itself is not verified.
    pub fn to_chain(&self) -> Result<RealizationChain<S>, StructureError> {
        let s = ConeStructure::new(&self.structure)?;
        Ok(RealizationChain::from_parts(s, self.stages.clone(), self.connecting.clone()))
    }
}

pub fn parse_chain<S: Scalar>(text: &str) -> Result<ChainFile<S>, FormatError> {
    let v = parse_value(text)?;
    let obj = object(&v, "chain")?;
    reject_unknown(obj, &["structure", "stages", "connecting", "integer"], "chain")?;
    let structure = structure_from_value(get(obj, "structure", "chain")?, "chain.structure")?;

    let mut stages = Vec::new();
    for (k, st) in array(get(obj, "stages", "chain")?, "chain.stages")?.iter().enumerate() {
        let p = format!("chain.stages[{k}]");
        let o = object(st, &p)?;
        reject_unknown(o, &["R", "eps", "phi"], &p)?;
        stages.push(Stage {
            big_r: parse_rational(get(o, "R", &p)?, &format!("{p}.R"))?,
            epsilon: parse_rational(get(o, "eps", &p)?, &format!("{p}.eps"))?,
            phi: parse_matrix(get(o, "phi", &p)?, &format!("{p}.phi"))?,
        });
    }
    let connecting = array(get(obj, "connecting", "chain")?, "chain.connecting")?
        .iter()
        .enumerate()
        .map(|(k, m)| parse_matrix(m, &format!("chain.connecting[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;

    let integer = match obj.get("integer") {
        None => None,
        Some(iv) => {
            let p = "chain.integer";
            let o = object(iv, p)?;
            reject_unknown(o, &["scalars", "matrices", "primes"], p)?;
            let scalars = array(get(o, "scalars", p)?, "chain.integer.scalars")?
                .iter()
                .enumerate()
                .map(|(k, x)| parse_rational(x, &format!("chain.integer.scalars[{k}]")))
                .collect::<Result<Vec<S>, _>>()?;
            let matrices = array(get(o, "matrices", p)?, "chain.integer.matrices")?
                .iter()
                .enumerate()
                .map(|(k, m)| parse_matrix(m, &format!("chain.integer.matrices[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let primes = array(get(o, "primes", p)?, "chain.integer.primes")?
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    x.as_u64().ok_or_else(|| field(format!("chain.integer.primes[{k}]"), "expected a positive integer"))
                })
                .collect::<Result<Vec<u64>, _>>()?;
            Some(IntegerSection { scalars, matrices, primes })
        }
    };
    Ok(ChainFile { structure, stages, connecting, integer })
}

pub fn emit_chain<S: Scalar>(f: &ChainFile<S>) -> String {
    let stages: Vec<Value> = f
        .stages
        .iter()
        .map(|s| json!({ "R": emit_rational(&s.big_r), "eps": emit_rational(&s.epsilon), "phi": emit_matrix(&s.phi) }))
        .collect();
    let mut root = json!({
        "structure": structure_to_value(&f.structure),
        "stages": stages,
        "connecting": f.connecting.iter().map(emit_matrix).collect::<Vec<_>>(),
    });
    if let Some(ic) = &f.integer {
        root["integer"] = json!({
            "scalars": ic.scalars.iter().map(emit_rational).collect::<Vec<_>>(),
            "matrices": ic.matrices.iter().map(emit_matrix).collect::<Vec<_>>(),
            "primes": ic.primes,
        });
    }
    to_canonical_string(&root)
}

pub fn validation_report_json(r: &ValidationReport) -> Value {
    let list: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            json!({
                "clause": v.clause.name(),
                "witnesses": v.witnesses.iter().map(|w| emit_set(*w)).collect::<Vec<_>>(),
                "detail": v.detail,
            })
        })
        .collect();
    json!({ "valid": r.is_valid(), "violations": list })
}

pub fn chain_report_json(r: &ChainReport) -> Value {
    let list: Vec<Value> =
        r.failures.iter().map(|f| json!({ "stage": f.stage, "clause": f.clause.name(), "detail": f.detail })).collect();
    json!({ "passed": r.passed(), "failures": list })
}

pub fn integer_report_json(r: &IntegerReport) -> Value {
    let list: Vec<Value> =
        r.failures.iter().map(|f| json!({ "map": f.index, "clause": f.clause.name(), "detail": f.detail })).collect();
    let coverage: Vec<Value> = r.coverage.iter().map(|(p, c)| json!({ "prime": p, "maps": c })).collect();
    json!({ "passed": r.passed(), "failures": list, "coverage": coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::build_chain;
    use crate::scalar::Rational;
    use crate::testkit::fixtures::{bad2, lex2, orth2};

    const LEX2_FILE: &str = r#"{
  "n": 2,
  "sets": [
    {
      "S": [],
      "e_free": [],
      "e_pos": []
    },
    {
      "S": [
        1,
        2
      ],
      "e_free": [
        2
      ],
      "e_pos": [
        1
      ]
    }
  ]
}
"#;

    #[test]
    fn lex2_emits_canonically() {
        assert_eq!(emit_structure(&lex2().to_candidate()), LEX2_FILE);
        let c = parse_structure(LEX2_FILE).unwrap();
        assert_eq!(ConeStructure::new(&c).unwrap(), lex2());
        assert_eq!(emit_structure(&c), LEX2_FILE);
    }

    #[test]
    fn unsorted_input_is_canonicalized() {
        let text = r#"{"sets":[{"S":[2,1],"e_pos":[1],"e_free":[2]},{"S":[],"e_pos":[],"e_free":[]}],"n":2}"#;
        assert_eq!(emit_structure(&parse_structure(text).unwrap()), LEX2_FILE);
    }

    #[test]
    fn missing_e_pos_names_entry() {
        let text = r#"{"n":2,"sets":[{"S":[],"e_pos":[],"e_free":[]},{"S":[1,2],"e_free":[2]}]}"#;
        let err = parse_structure(text).unwrap_err().to_string();
        assert!(err.contains("S = {1,2}") && err.contains("e_pos"), "{err}");
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_structure("{\"n\": 2,"), Err(FormatError::Syntax { line: 1, .. })));
        assert!(parse_structure(r#"{"n":0,"sets":[]}"#).is_err());
        assert!(parse_structure(r#"{"n":2,"sets":[{"S":[3],"e_pos":[],"e_free":[]}]}"#).is_err());
        assert!(parse_structure(r#"{"n":2,"sets":[],"extra":1}"#).is_err());
        assert!(parse_structure(r#"{"n":2,"sets":[{"S":[1,1],"e_pos":[],"e_free":[]}]}"#).is_err());
    }

    #[test]
    fn bad2_parses_but_fails_validation() {
        let text = emit_structure(&bad2());
        let c = parse_structure(&text).unwrap();
        assert!(matches!(ConeStructure::new(&c), Err(StructureError::Invalid(_))));
    }

    #[test]
    fn rationals_canonicalize() {
        let v: Vector<Rational> = parse_vector_literal("2/4, -6/3,0").unwrap();
        assert_eq!(emit_vector(&v), json!(["1/2", "-2", "0"]));
        assert!(parse_vector_literal::<Rational>("1/0").is_err());
        assert!(parse_vector_literal::<Rational>("1.5").is_err());
    }

    #[test]
    fn chain_round_trip() {
        let c = build_chain(&lex2(), 3, &Rational::from(1), &Rational::from(1)).unwrap();
        let ic = crate::integer::integerize_chain(&c, &[2, 3]).unwrap();
        let text = emit_chain(&ChainFile::from_chain(&c, Some(ic)));
        let parsed: ChainFile<Rational> = parse_chain(&text).unwrap();
        assert_eq!(emit_chain(&parsed), text);
        assert_eq!(parsed.to_chain().unwrap(), c);

        let c = build_chain(&orth2(), 2, &Rational::from(1), &Rational::from(1)).unwrap();
        let text = emit_chain(&ChainFile::from_chain(&c, None));
        let noncanonical = text.replacen("\"1\"", "\"2/2\"", 1);
        assert_ne!(noncanonical, text);
        let parsed: ChainFile<Rational> = parse_chain(&noncanonical).unwrap();
        assert_eq!(emit_chain(&parsed), text);
    }

    #[test]
    fn ragged_matrix_rejected() {
        let text = emit_chain(&ChainFile::from_chain(
            &build_chain(&lex2(), 1, &Rational::from(1), &Rational::from(1)).unwrap(),
            None,
        ));
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut broken = v.clone();
        broken["stages"][0]["phi"][0] = json!(["1"]);
        let err = parse_chain::<Rational>(&broken.to_string()).unwrap_err().to_string();
        assert!(err.contains("chain.stages[0].phi[0]"), "{err}");
    }
}
