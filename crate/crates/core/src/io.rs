//! JSON documents for plants and results.
//!
//! Coefficients are listed in ascending powers of `z`; a real coefficient is a
//! bare number and a complex one is a `[re, im]` pair. Floats are written in
//! the shortest form that parses back to the same value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::NumericConfig;
use crate::factor::NormalizedFactorization;
use crate::polyalg::{Polynomial, RationalFn};
use crate::polymat::RationalMatrix;
use crate::tfm::TransferMatrix;
use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "1.0";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Complex64> for Coefficient {
    fn from(c: Complex64) -> Self {
        if c.im == 0.0 {
            Coefficient::Real(c.re)
        } else {
            Coefficient::Complex([c.re, c.im])
        }
    }
}

impl From<Coefficient> for Complex64 {
    fn from(c: Coefficient) -> Self {
        match c {
            Coefficient::Real(re) => Complex64::new(re, 0.0),
            Coefficient::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn coefficients(p: &Polynomial) -> Vec<Coefficient> {
    p.coeffs().iter().map(|&c| c.into()).collect()
}

fn polynomial(cs: &[Coefficient]) -> Polynomial {
    Polynomial::new(cs.iter().map(|&c| c.into()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDocument {
    pub num: Vec<Coefficient>,
    pub den: Vec<Coefficient>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantKind {
    Siso,
    Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantDocument {
    pub schema_version: String,
    pub kind: PlantKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Row-major grid of entries.
    pub entries: Vec<Vec<EntryDocument>>,
}

fn parse_error(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { pointer: pointer.into(), message: message.into() }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl PlantDocument {
    pub fn from_plant(p: &TransferMatrix, label: Option<String>) -> Self {
        let entries = (0..p.rows())
            .map(|i| {
                (0..p.cols())
                    .map(|j| {
                        let e = p.entry(i, j);
                        EntryDocument { num: coefficients(e.num()), den: coefficients(e.den()) }
                    })
                    .collect()
            })
            .collect();
        let kind = if p.is_siso() { PlantKind::Siso } else { PlantKind::Matrix };
        Self { schema_version: SCHEMA_VERSION.into(), kind, label, entries }
    }

    pub fn to_plant(&self, cfg: &NumericConfig) -> Result<TransferMatrix> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(parse_error("/schema_version", format!("unsupported schema version {:?}", self.schema_version)));
        }
        let rows = self.entries.len();
        if rows == 0 || self.entries[0].is_empty() {
            return Err(parse_error("/entries", "plant has no entries"));
        }
        let cols = self.entries[0].len();
        if self.kind == PlantKind::Siso && (rows, cols) != (1, 1) {
            return Err(parse_error("/kind", format!("siso plant with {rows}x{cols} entries")));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != cols {
                return Err(parse_error(format!("/entries/{i}"), format!("expected {cols} entries, found {}", row.len())));
            }
            for (j, e) in row.iter().enumerate() {
                let at = format!("/entries/{i}/{j}");
                let all = e.num.iter().chain(&e.den).all(|&c| {
                    let z: Complex64 = c.into();
                    z.re.is_finite() && z.im.is_finite()
                });
                if !all {
                    return Err(parse_error(at, "non-finite coefficient"));
                }
                let den = polynomial(&e.den);
                if den.is_zero() {
                    return Err(parse_error(format!("{at}/den"), "zero denominator"));
                }
                let r = RationalFn::new(polynomial(&e.num), den, cfg).map_err(|err| parse_error(at.clone(), err.to_string()))?;
                entries.push(r);
            }
        }
        TransferMatrix::new(rows, cols, entries, cfg).map_err(|err| parse_error("/entries", err.to_string()))
    }
}

/// Parses a plant document, reporting the JSON pointer of the first problem.
pub fn parse_plant_document(text: &str) -> Result<PlantDocument> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = json_pointer(e.path());
        parse_error(pointer, e.into_inner().to_string())
    })
}

pub fn parse_plant(text: &str, cfg: &NumericConfig) -> Result<(PlantDocument, TransferMatrix)> {
    let doc = parse_plant_document(text)?;
    let plant = doc.to_plant(cfg)?;
    Ok((doc, plant))
}

pub fn emit_plant(p: &TransferMatrix, label: Option<String>) -> String {
    to_json(&PlantDocument::from_plant(p, label))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize to JSON")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRef {
    pub label: Option<String>,
    pub sha256: String,
}

impl InputRef {
    pub fn new(label: Option<String>, bytes: &[u8]) -> Self {
        Self { label, sha256: sha256_hex(bytes) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub operation: String,
    pub tool_version: String,
    pub inputs: Vec<InputRef>,
    pub config: NumericConfig,
    pub result: serde_json::Value,
}

impl ResultDocument {
    pub fn new<T: Serialize>(operation: &str, inputs: Vec<InputRef>, cfg: &NumericConfig, result: &T) -> Self {
        Self {
            operation: operation.into(),
            tool_version: TOOL_VERSION.into(),
            inputs,
            config: *cfg,
            result: serde_json::to_value(result).expect("results serialize to JSON"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMatrixDocument {
    /// Row-major numerator coefficient arrays.
    pub num: Vec<Vec<Vec<Coefficient>>>,
    /// Shared monic denominator.
    pub den: Vec<Coefficient>,
}

impl From<&RationalMatrix> for RationalMatrixDocument {
    fn from(m: &RationalMatrix) -> Self {
        let num = (0..m.rows()).map(|i| (0..m.cols()).map(|j| coefficients(m.num.get(i, j))).collect()).collect();
        Self { num, den: coefficients(&m.den) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationDocument {
    pub n: RationalMatrixDocument,
    pub d: RationalMatrixDocument,
    pub residual_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bezout_residual: Option<f64>,
}

impl From<&NormalizedFactorization> for FactorizationDocument {
    fn from(f: &NormalizedFactorization) -> Self {
        Self { n: (&f.n).into(), d: (&f.d).into(), residual_norm: f.residual_norm, bezout_residual: f.bezout_residual }
    }
}

/// Writes plot rows as CSV with a header row.
pub fn write_csv<const N: usize>(path: &std::path::Path, header: [&str; N], rows: &[[f64; N]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
    let io = |e: csv::Error| Error::Domain(format!("cannot write {}: {e}", path.display()));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
