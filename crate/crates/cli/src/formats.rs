//! JSON interchange formats and their conversions to library types.
//!
//! Floats are written with 17 significant digits so that every value
//! round-trips exactly.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use regdec_core::certify::{RegularDecomposition, Verdict, Witness};
use regdec_core::spinmap::{classical_mixture, CoherentLabel, MixtureTerm};
use regdec_core::{ComplexMatrix, DensityMatrix, SymTensor};

use crate::error::CliError;

/// Name of the basis ordering written into density files.
pub const DICKE_BASIS: &str = "dicke_k";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub idx: Vec<usize>,
    pub val: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub order: usize,
    pub dim: usize,
    pub entries: Vec<EntryJson>,
}

impl TensorJson {
    /// Nonzero canonical entries of `a`.
    pub fn from_tensor(a: &SymTensor) -> Self {
        let entries = a
            .entries()
            .filter(|(_, _, v)| *v != 0.0)
            .map(|(idx, _, val)| EntryJson {
                idx: idx.iter().map(|&i| i as usize).collect(),
                val,
            })
            .collect();
        Self {
            order: a.order(),
            dim: a.dim(),
            entries,
        }
    }

    pub fn to_tensor(&self) -> Result<SymTensor, CliError> {
        Ok(SymTensor::make(
            self.order,
            self.dim,
            self.entries.iter().map(|e| (e.idx.clone(), e.val)),
        )?)
    }
}

/// Density matrix on the symmetric sector, rows and columns indexed by the
/// number `k = 0..N` of `|0>` factors (`m = k - N/2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    /// Set on output when the source tensor failed the regular symmetry check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regular_symmetric: Option<bool>,
}

impl DensityJson {
    pub fn from_matrix(n: usize, m: &ComplexMatrix) -> Self {
        let matrix = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            n,
            basis: Some(DICKE_BASIS.to_owned()),
            matrix,
            regular_symmetric: None,
        }
    }

    fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if let Some(b) = &self.basis {
            if b != DICKE_BASIS {
                return Err(CliError::Input(format!("unsupported basis {b:?}, expected {DICKE_BASIS:?}")));
            }
        }
        let d = self.n + 1;
        if self.matrix.len() != d || self.matrix.iter().any(|r| r.len() != d) {
            return Err(CliError::Input(format!("matrix must be {d}x{d} for N = {}", self.n)));
        }
        let data = self
            .matrix
            .iter()
            .flat_map(|r| r.iter().map(|[re, im]| Complex64::new(*re, *im)))
            .collect();
        Ok(ComplexMatrix::from_row_major(d, d, data)?)
    }

    /// Validated density matrix (Hermitian and PSD).
    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        Ok(DensityMatrix::new(self.n, self.to_matrix()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureTermJson {
    pub w: f64,
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub terms: Vec<MixtureTermJson>,
}

impl MixtureJson {
    pub fn from_terms(n: usize, terms: &[MixtureTerm]) -> Self {
        Self {
            n,
            terms: terms
                .iter()
                .map(|t| MixtureTermJson {
                    w: t.weight,
                    theta: t.label.theta(),
                    phi: t.label.phi(),
                })
                .collect(),
        }
    }

    pub fn to_terms(&self) -> Result<Vec<MixtureTerm>, CliError> {
        self.terms
            .iter()
            .map(|t| {
                Ok(MixtureTerm {
                    weight: t.w,
                    label: CoherentLabel::new(t.theta, t.phi)?,
                })
            })
            .collect()
    }

    pub fn build(&self) -> Result<(DensityMatrix, SymTensor), CliError> {
        Ok(classical_mixture(self.n, &self.to_terms()?)?)
    }
}

/// Any of the three input schemas, recognized by their keys.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Tensor(TensorJson),
    Density(DensityJson),
    Mixture(MixtureJson),
}

impl Input {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::Input("top-level JSON value must be an object".into()))?;
        let schema = |e: serde_json::Error| CliError::Input(format!("schema violation: {e}"));
        if obj.contains_key("order") {
            Ok(Input::Tensor(serde_json::from_value(value).map_err(schema)?))
        } else if obj.contains_key("matrix") {
            Ok(Input::Density(serde_json::from_value(value).map_err(schema)?))
        } else if obj.contains_key("terms") {
            Ok(Input::Mixture(serde_json::from_value(value).map_err(schema)?))
        } else {
            Err(CliError::Input(
                "unrecognized input: expected a tensor, density or mixture object".into(),
            ))
        }
    }

    /// The representing tensor, converting states as needed.
    pub fn tensor(&self) -> Result<SymTensor, CliError> {
        match self {
            Input::Tensor(t) => t.to_tensor(),
            Input::Density(d) => Ok(regdec_core::density_to_tensor(&d.to_density()?)?),
            Input::Mixture(m) => Ok(m.build()?.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermJson {
    pub alpha: f64,
    pub nhat: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateJson {
    pub terms: Vec<TermJson>,
    pub residual: f64,
}

impl CertificateJson {
    pub fn new(dec: &RegularDecomposition) -> Self {
        Self {
            terms: dec
                .terms
                .iter()
                .map(|t| TermJson {
                    alpha: t.alpha,
                    nhat: t.nhat.clone(),
                })
                .collect(),
            residual: dec.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessJson {
    pub kind: &'static str,
    pub point: Vec<f64>,
    pub value: f64,
}

impl WitnessJson {
    pub fn new(w: &Witness) -> Self {
        Self {
            kind: w.kind.as_str(),
            point: w.point.clone(),
            value: w.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageJson {
    pub name: &'static str,
    pub outcome: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictJson {
    pub status: &'static str,
    pub stages: Vec<StageJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

impl VerdictJson {
    pub fn new(v: &Verdict) -> Self {
        Self {
            status: v.status.as_str(),
            stages: v
                .stages
                .iter()
                .map(|s| StageJson {
                    name: s.name,
                    outcome: s.outcome,
                    value: s.value,
                })
                .collect(),
            certificate: v.certificate.as_ref().map(CertificateJson::new),
            witness: v.witness.as_ref().map(WitnessJson::new),
        }
    }
}

/// Pretty JSON formatter printing every float with 17 significant digits
/// and non-finite values as `null`.
struct FullPrecision<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// Serializes `value` as pretty JSON with full-precision floats and a
/// trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = FullPrecision {
        inner: serde_json::ser::PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&vec![0.1f64, -1.0 / 3.0, f64::NAN]);
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], Some(0.1));
        assert_eq!(back[1], Some(-1.0 / 3.0));
        assert_eq!(back[2], None);
        assert!(s.contains("1.0000000000000001e-1") || s.contains("1.0000000000000000e-1"));
    }

    #[test]
    fn schemas_are_detected() {
        let t = Input::parse(r#"{"order": 1, "dim": 4, "entries": [{"idx": [0], "val": 1.0}]}"#).unwrap();
        assert!(matches!(t, Input::Tensor(_)));
        let d = Input::parse(r#"{"N": 1, "matrix": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}"#).unwrap();
        assert!(matches!(d, Input::Density(_)));
        let m = Input::parse(r#"{"N": 2, "terms": [{"w": 1.0, "theta": 0.5, "phi": 0.0}]}"#).unwrap();
        assert!(matches!(m, Input::Mixture(_)));
        assert!(matches!(Input::parse("[1, 2]"), Err(CliError::Input(_))));
        assert!(matches!(Input::parse("{"), Err(CliError::Input(_))));
        assert!(matches!(
            Input::parse(r#"{"order": 1, "dim": 4, "entries": [], "extra": 1}"#),
            Err(CliError::Input(_))
        ));
    }

    #[test]
    fn tensor_round_trip() {
        let a = SymTensor::outer_power(&[1.0, 0.2, -0.3, 0.5], 3).unwrap();
        let text = to_json(&TensorJson::from_tensor(&a));
        let back = match Input::parse(&text).unwrap() {
            Input::Tensor(t) => t.to_tensor().unwrap(),
            other => panic!("{other:?}"),
        };
        assert_eq!(back, a);
    }

    #[test]
    fn wrong_basis_rejected() {
        let d = DensityJson {
            n: 1,
            basis: Some("computational".into()),
            matrix: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
            regular_symmetric: None,
        };
        assert!(d.to_density().is_err());
    }
}
