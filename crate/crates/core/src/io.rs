//! JSON bundles for matrices and channel representations, and the timing CSV.
//!
//! A bundle looks like
//!
//! ```json
//! {"kind":"ptm","qubits":1,"data":[[[1.0,0.0],[0.0,0.0]],...],
//!  "convention":{"vector_orientation":"row-major","choi_sign_rule":"index-first"}}
//! ```
//!
//! `data` is a list of rows of `[re, im]` pairs. For `kraus` it is a list of
//! items, each either a single matrix (meaning `L = K`) or a two-element
//! list `[K, L]`. Numbers are written with the shortest decimal form that
//! round-trips, so reading back a written bundle is bit-exact.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelRep, KrausPair, RepKind};
use crate::error::{PtmError, Result};
use crate::instance::InstanceKind;
use crate::matrix::DenseMatrix;
use crate::pauli::Orientation;

/// Name of the Choi convention written into every bundle: the first tensor
/// factor of the Choi matrix indexes the input matrix unit.
pub const CHOI_SIGN_RULE: &str = "index-first";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convention {
    pub vector_orientation: Orientation,
    pub choi_sign_rule: String,
}

impl Default for Convention {
    fn default() -> Self {
        Self {
            vector_orientation: Orientation::RowMajor,
            choi_sign_rule: CHOI_SIGN_RULE.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BundleKind {
    Matrix,
    Can,
    Choi,
    Chi,
    Ptm,
    Kraus,
}

impl BundleKind {
    pub fn name(self) -> &'static str {
        match self {
            BundleKind::Matrix => "matrix",
            BundleKind::Can => "can",
            BundleKind::Choi => "choi",
            BundleKind::Chi => "chi",
            BundleKind::Ptm => "ptm",
            BundleKind::Kraus => "kraus",
        }
    }

    pub fn rep_kind(self) -> Option<RepKind> {
        match self {
            BundleKind::Matrix => None,
            BundleKind::Can => Some(RepKind::Can),
            BundleKind::Choi => Some(RepKind::Choi),
            BundleKind::Chi => Some(RepKind::Chi),
            BundleKind::Ptm => Some(RepKind::Ptm),
            BundleKind::Kraus => Some(RepKind::Kraus),
        }
    }

    /// Side length of the matrices of an `n`-qubit bundle of this kind.
    fn dim(self, n: usize) -> usize {
        match self {
            BundleKind::Matrix | BundleKind::Kraus => 1 << n,
            _ => 1 << (2 * n),
        }
    }
}

impl From<RepKind> for BundleKind {
    fn from(k: RepKind) -> Self {
        match k {
            RepKind::Can => BundleKind::Can,
            RepKind::Choi => BundleKind::Choi,
            RepKind::Chi => BundleKind::Chi,
            RepKind::Ptm => BundleKind::Ptm,
            RepKind::Kraus => BundleKind::Kraus,
        }
    }
}

impl fmt::Display for BundleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BundlePayload {
    Matrix(DenseMatrix),
    Kraus(Vec<KrausPair>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepBundle {
    pub kind: BundleKind,
    pub qubits: usize,
    pub payload: BundlePayload,
    pub convention: Convention,
}

impl RepBundle {
    /// Bundle holding a plain `2^n x 2^n` operator.
    pub fn matrix(m: DenseMatrix) -> Result<Self> {
        let qubits = crate::matrix::operator_qubits(&m)?;
        Ok(Self {
            kind: BundleKind::Matrix,
            qubits,
            payload: BundlePayload::Matrix(m),
            convention: Convention::default(),
        })
    }

    pub fn from_rep(rep: &ChannelRep) -> Self {
        let payload = match rep {
            ChannelRep::Kraus(pairs) => BundlePayload::Kraus(pairs.clone()),
            other => BundlePayload::Matrix(other.matrix().expect("matrix variant").clone()),
        };
        Self {
            kind: rep.kind().into(),
            qubits: rep.qubits(),
            payload,
            convention: Convention::default(),
        }
    }

    pub fn to_rep(&self) -> Result<ChannelRep> {
        let kind = self.kind.rep_kind().ok_or_else(|| PtmError::Parse {
            path: "kind".into(),
            message: "a `matrix` bundle is not a channel representation".into(),
        })?;
        match &self.payload {
            BundlePayload::Kraus(pairs) => ChannelRep::kraus(pairs.clone()),
            BundlePayload::Matrix(m) => ChannelRep::from_matrix(kind, m.clone()),
        }
    }

    pub fn as_matrix(&self) -> Option<&DenseMatrix> {
        match &self.payload {
            BundlePayload::Matrix(m) => Some(m),
            BundlePayload::Kraus(_) => None,
        }
    }
}

type WireMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Deserialize)]
#[serde(untagged)]
enum WireKrausItem {
    Single(WireMatrix),
    Pair([WireMatrix; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireIn {
    kind: BundleKind,
    qubits: usize,
    data: serde_json::Value,
    convention: Convention,
}

#[derive(Serialize)]
struct WireOut<'a, T: Serialize> {
    kind: BundleKind,
    qubits: usize,
    data: T,
    convention: &'a Convention,
}

fn parse_error(path: impl Into<String>, message: impl Into<String>) -> PtmError {
    PtmError::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn decode<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            prefix.to_string()
        } else if inner.starts_with('[') {
            format!("{prefix}{inner}")
        } else {
            format!("{prefix}.{inner}")
        };
        parse_error(path, e.into_inner().to_string())
    })
}

fn to_dense(rows: WireMatrix, dim: usize, path: &str, qubits: usize) -> Result<DenseMatrix> {
    if rows.len() != dim {
        return Err(parse_error(
            "qubits",
            format!(
                "qubits = {qubits} implies {dim} rows, but `{path}` has {}",
                rows.len()
            ),
        ));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (r, row) in rows.into_iter().enumerate() {
        if row.len() != dim {
            return Err(parse_error(
                "qubits",
                format!(
                    "qubits = {qubits} implies {dim} columns, but `{path}[{r}]` has {}",
                    row.len()
                ),
            ));
        }
        for (c, [re, im]) in row.into_iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(parse_error(format!("{path}[{r}][{c}]"), "non-finite entry"));
            }
            data.push(Complex64::new(re, im));
        }
    }
    DenseMatrix::from_vec(dim, dim, data)
}

fn to_wire(m: &DenseMatrix) -> WireMatrix {
    m.rows_iter()
        .map(|row| row.iter().map(|x| [x.re, x.im]).collect())
        .collect()
}

/// Parses and validates a bundle document.
pub fn read_bundle(text: &str) -> Result<RepBundle> {
    let mut de = serde_json::Deserializer::from_str(text);
    let wire: WireIn = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(path, e.into_inner().to_string())
    })?;
    de.end()
        .map_err(|e| parse_error(".", format!("trailing content: {e}")))?;

    if wire.convention.vector_orientation != Orientation::RowMajor {
        return Err(parse_error(
            "convention.vector_orientation",
            "only row-major bundles are supported",
        ));
    }
    if wire.convention.choi_sign_rule != CHOI_SIGN_RULE {
        return Err(parse_error(
            "convention.choi_sign_rule",
            format!("expected `{CHOI_SIGN_RULE}`"),
        ));
    }
    let max_qubits = if wire.kind.dim(1) == 4 { 15 } else { 30 };
    if wire.qubits > max_qubits {
        return Err(parse_error(
            "qubits",
            format!("{} qubits is out of range", wire.qubits),
        ));
    }
    let dim = wire.kind.dim(wire.qubits);
    let payload = if wire.kind == BundleKind::Kraus {
        let items: Vec<WireKrausItem> = decode(wire.data, "data")?;
        if items.is_empty() {
            return Err(parse_error(
                "data",
                "a Kraus bundle needs at least one item",
            ));
        }
        let mut pairs = Vec::with_capacity(items.len());
        for (i, item) in items.into_iter().enumerate() {
            pairs.push(match item {
                WireKrausItem::Single(k) => {
                    KrausPair::single(to_dense(k, dim, &format!("data[{i}]"), wire.qubits)?)
                }
                WireKrausItem::Pair([k, l]) => KrausPair::new(
                    to_dense(k, dim, &format!("data[{i}][0]"), wire.qubits)?,
                    to_dense(l, dim, &format!("data[{i}][1]"), wire.qubits)?,
                ),
            });
        }
        BundlePayload::Kraus(pairs)
    } else {
        let rows: WireMatrix = decode(wire.data, "data")?;
        BundlePayload::Matrix(to_dense(rows, dim, "data", wire.qubits)?)
    };
    Ok(RepBundle {
        kind: wire.kind,
        qubits: wire.qubits,
        payload,
        convention: wire.convention,
    })
}

/// Serializes a bundle. Identical bundles give byte-identical output.
pub fn write_bundle(bundle: &RepBundle) -> String {
    let text = match &bundle.payload {
        BundlePayload::Matrix(m) => serde_json::to_string(&WireOut {
            kind: bundle.kind,
            qubits: bundle.qubits,
            data: to_wire(m),
            convention: &bundle.convention,
        }),
        BundlePayload::Kraus(pairs) => {
            let items: Vec<serde_json::Value> = pairs
                .iter()
                .map(|p| {
                    if p.is_plain() {
                        serde_json::to_value(to_wire(&p.k))
                    } else {
                        serde_json::to_value([to_wire(&p.k), to_wire(&p.l)])
                    }
                    .expect("finite numbers serialize")
                })
                .collect();
            serde_json::to_string(&WireOut {
                kind: bundle.kind,
                qubits: bundle.qubits,
                data: items,
                convention: &bundle.convention,
            })
        }
    };
    let mut text = text.expect("bundle serializes");
    text.push('\n');
    text
}

pub fn read_bundle_file(path: &Path) -> Result<RepBundle> {
    read_bundle(&std::fs::read_to_string(path)?)
}

pub fn write_bundle_file(path: &Path, bundle: &RepBundle) -> Result<()> {
    std::fs::write(path, write_bundle(bundle))?;
    Ok(())
}

/// One row of the timing CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub algorithm: String,
    pub n: usize,
    pub instance_kind: InstanceKind,
    pub seed: u64,
    pub repetitions: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// Columns that identify a record; a later record with the same key
/// replaces an earlier one.
pub type TimingKey = (String, usize, InstanceKind, u64, usize);

impl TimingRecord {
    pub fn key(&self) -> TimingKey {
        (
            self.algorithm.clone(),
            self.n,
            self.instance_kind,
            self.seed,
            self.repetitions,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(parse_error("repetitions", "must be at least 1"));
        }
        if !(self.mean_seconds > 0.0 && self.mean_seconds.is_finite()) {
            return Err(parse_error("mean_seconds", "must be positive and finite"));
        }
        if !(self.std_seconds >= 0.0 && self.std_seconds.is_finite()) {
            return Err(parse_error("std_seconds", "must be nonnegative and finite"));
        }
        Ok(())
    }
}

pub const TIMING_HEADER: &str =
    "algorithm,n,instance_kind,seed,repetitions,mean_seconds,std_seconds";

pub fn write_timings(records: &[TimingRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
        .expect("csv output is utf-8");
    Ok(format!("{TIMING_HEADER}\n{body}"))
}

pub fn read_timings(text: &str) -> Result<Vec<TimingRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != TIMING_HEADER {
        return Err(parse_error("header", format!("expected `{TIMING_HEADER}`")));
    }
    let mut out = Vec::new();
    for rec in r.deserialize() {
        let rec: TimingRecord = rec?;
        rec.validate()?;
        out.push(rec);
    }
    Ok(out)
}

/// Merges `new` into `existing`: records with a known key replace the old
/// row in place, others are appended in order.
pub fn merge_timings(existing: Vec<TimingRecord>, new: &[TimingRecord]) -> Vec<TimingRecord> {
    let mut out = existing;
    let mut index: HashMap<TimingKey, usize> =
        out.iter().enumerate().map(|(i, r)| (r.key(), i)).collect();
    for r in new {
        match index.get(&r.key()) {
            Some(&i) => out[i] = r.clone(),
            None => {
                index.insert(r.key(), out.len());
                out.push(r.clone());
            }
        }
    }
    out
}

/// Appends records to a timing CSV on disk, creating it if needed.
pub fn append_timings_file(path: &Path, records: &[TimingRecord]) -> Result<()> {
    let existing = if path.exists() {
        read_timings(&std::fs::read_to_string(path)?)?
    } else {
        Vec::new()
    };
    std::fs::write(path, write_timings(&merge_timings(existing, records))?)?;
    Ok(())
}

impl FromStr for BundleKind {
    type Err = PtmError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| parse_error("kind", format!("unknown bundle kind `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    #[test]
    fn matrix_round_trip() {
        let m = DenseMatrix::from_rows(vec![
            vec![Complex64::new(0.1, -1e-300), ONE],
            vec![ZERO, Complex64::new(1.0 / 3.0, 2.5e17)],
        ])
        .unwrap();
        let b = RepBundle::matrix(m).unwrap();
        let text = write_bundle(&b);
        assert_eq!(read_bundle(&text).unwrap(), b);
        assert_eq!(write_bundle(&read_bundle(&text).unwrap()), text);
    }

    #[test]
    fn kraus_items() {
        let text = r#"{"kind":"kraus","qubits":1,
            "data":[[[[0,0],[1,0]],[[1,0],[0,0]]],
                    [[[[1,0],[0,0]],[[0,0],[1,0]]],[[[0,0],[0,0]],[[0,0],[0,0]]]]],
            "convention":{"vector_orientation":"row-major","choi_sign_rule":"index-first"}}"#;
        let b = read_bundle(text).unwrap();
        let BundlePayload::Kraus(pairs) = &b.payload else {
            panic!("kraus payload")
        };
        assert_eq!(pairs.len(), 2);
        assert!(pairs[0].is_plain());
        assert_eq!(pairs[1].l, DenseMatrix::zeros(2, 2));
        assert_eq!(read_bundle(&write_bundle(&b)).unwrap(), b);
    }

    #[test]
    fn qubit_mismatch_names_qubits() {
        let b = RepBundle::from_rep(&ChannelRep::ptm(DenseMatrix::identity(64)).unwrap());
        let text = write_bundle(&b).replace("\"qubits\":3", "\"qubits\":2");
        match read_bundle(&text).unwrap_err() {
            PtmError::Parse { path, .. } => assert_eq!(path, "qubits"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn field_paths_in_errors() {
        let unknown = r#"{"kind":"ptm","qubits":0,"data":[[[1,0]]],"extra":1,
            "convention":{"vector_orientation":"row-major","choi_sign_rule":"index-first"}}"#;
        assert!(read_bundle(unknown)
            .unwrap_err()
            .to_string()
            .contains("extra"));
        let bad_entry = r#"{"kind":"matrix","qubits":1,"data":[[[1,0],[0,"x"]],[[0,0],[1,0]]],
            "convention":{"vector_orientation":"row-major","choi_sign_rule":"index-first"}}"#;
        match read_bundle(bad_entry).unwrap_err() {
            PtmError::Parse { path, .. } => assert_eq!(path, "data[0][1][1]"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_conv = r#"{"kind":"matrix","qubits":0,"data":[[[1,0]]],
            "convention":{"vector_orientation":"column-major","choi_sign_rule":"index-first"}}"#;
        match read_bundle(bad_conv).unwrap_err() {
            PtmError::Parse { path, .. } => assert_eq!(path, "convention.vector_orientation"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_kind = r#"{"kind":"superop","qubits":0,"data":[[[1,0]]],
            "convention":{"vector_orientation":"row-major","choi_sign_rule":"index-first"}}"#;
        match read_bundle(bad_kind).unwrap_err() {
            PtmError::Parse { path, .. } => assert_eq!(path, "kind"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn timing_csv() {
        assert_eq!(write_timings(&[]).unwrap(), format!("{TIMING_HEADER}\n"));
        let rec = TimingRecord {
            algorithm: "l-ptm".into(),
            n: 3,
            instance_kind: InstanceKind::Diagonal,
            seed: 42,
            repetitions: 5,
            mean_seconds: 1.25e-4,
            std_seconds: 3.0e-6,
        };
        let text = write_timings(std::slice::from_ref(&rec)).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(read_timings(&text).unwrap(), vec![rec.clone()]);

        let mut updated = rec.clone();
        updated.mean_seconds = 2.0e-4;
        let merged = merge_timings(vec![rec.clone()], &[updated.clone()]);
        assert_eq!(merged, vec![updated.clone()]);
        let again = merge_timings(merged.clone(), &[updated]);
        assert_eq!(again, merged);
    }

    #[test]
    fn rejects_bad_timings() {
        let text = format!("{TIMING_HEADER}\nl-ptm,1,dense,0,0,1.0,0.0\n");
        assert!(read_timings(&text).is_err());
        assert!(read_timings("a,b\n").is_err());
    }
}
