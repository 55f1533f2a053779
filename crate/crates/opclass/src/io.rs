//! JSON document formats for series, polynomials, matrices, sequences and
//! the emitted certificates, plus the versioned schema dump.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{CMat, OperatorMatrix};
use crate::poly::Polynomial;
use crate::scalar::Coeff;
use crate::seq::EventualSeq;
use crate::series::TruncatedSeries;
use crate::weight::GoodWeight;

pub const SCHEMA_VERSION: &str = "1";

fn default_weight() -> GoodWeight {
    GoodWeight::unit()
}

/// Float series document: `{"coeffs": [...], "tail_bound": x, "weight": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub coeffs: Vec<f64>,
    #[serde(default)]
    pub tail_bound: f64,
    #[serde(default = "default_weight")]
    pub weight: GoodWeight,
}

impl SeriesDoc {
    pub fn to_series(&self) -> Result<TruncatedSeries<f64>> {
        self.weight.check(1.0)?;
        TruncatedSeries::new(self.coeffs.clone(), self.tail_bound, self.weight.clone())
    }

    pub fn from_series(s: &TruncatedSeries<f64>) -> Self {
        SeriesDoc {
            coeffs: s.coeffs().to_vec(),
            tail_bound: s.tail_bound(),
            weight: s.weight().clone(),
        }
    }
}

/// Exact polynomial document: `{"rational_coeffs": [["p","q"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyDoc {
    pub rational_coeffs: Vec<(String, String)>,
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>()
        .map_err(|e| Error::Input(format!("bad integer literal {s:?}: {e}")))
}

impl PolyDoc {
    pub fn to_poly(&self) -> Result<Polynomial<BigRational>> {
        let mut coeffs = Vec::with_capacity(self.rational_coeffs.len());
        for (p, q) in &self.rational_coeffs {
            let den = parse_bigint(q)?;
            if den == BigInt::from(0) {
                return Err(Error::Input("zero denominator".into()));
            }
            coeffs.push(BigRational::new(parse_bigint(p)?, den));
        }
        Ok(Polynomial::new(coeffs))
    }

    pub fn to_rat_series(&self) -> Result<TruncatedSeries<BigRational>> {
        Ok(self.to_poly()?.to_series(GoodWeight::unit()))
    }

    pub fn from_rationals(coeffs: &[BigRational]) -> Self {
        PolyDoc {
            rational_coeffs: coeffs
                .iter()
                .map(|c| (c.numer().to_string(), c.denom().to_string()))
                .collect(),
        }
    }
}

/// Dense matrix document: `{"dim": d, "re": [row-major], "im": [row-major]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl MatrixDoc {
    pub fn to_operator(&self) -> Result<OperatorMatrix> {
        let n = self.dim * self.dim;
        if self.re.len() != n {
            return Err(Error::Input(format!(
                "matrix re has {} entries, expected {n}",
                self.re.len()
            )));
        }
        let im = if self.im.is_empty() {
            vec![0.0; n]
        } else if self.im.len() == n {
            self.im.clone()
        } else {
            return Err(Error::Input(format!(
                "matrix im has {} entries, expected {n}",
                self.im.len()
            )));
        };
        Ok(OperatorMatrix::from_complex_rows(self.dim, &self.re, &im))
    }

    pub fn from_cmat(m: &CMat) -> Self {
        let dim = m.nrows();
        let mut re = Vec::with_capacity(dim * dim);
        let mut im = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixDoc { dim, re, im }
    }
}

/// Rectangular basis document (columns span a subspace).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisDoc {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl BasisDoc {
    pub fn from_cmat(m: &CMat) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        BasisDoc {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
        }
    }
}

/// Eventually-constant sequence document:
/// `{"prefix": [...], "eventual": c}`, or the exact form with string
/// rationals in `rational_prefix` / `rational_eventual`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeqDoc {
    #[serde(default)]
    pub prefix: Vec<f64>,
    #[serde(default)]
    pub eventual: f64,
    #[serde(default)]
    pub rational_prefix: Option<Vec<(String, String)>>,
    #[serde(default)]
    pub rational_eventual: Option<(String, String)>,
}

impl SeqDoc {
    pub fn to_f64_seq(&self) -> EventualSeq<f64> {
        EventualSeq::new(self.prefix.clone(), self.eventual)
    }

    pub fn from_rat_seq(seq: &EventualSeq<BigRational>) -> Self {
        let f = seq.map_to_f64();
        SeqDoc {
            prefix: f.prefix().to_vec(),
            eventual: *f.eventual(),
            rational_prefix: Some(
                seq.prefix()
                    .iter()
                    .map(|c| (c.numer().to_string(), c.denom().to_string()))
                    .collect(),
            ),
            rational_eventual: Some((
                seq.eventual().numer().to_string(),
                seq.eventual().denom().to_string(),
            )),
        }
    }
}

/// Vector document for probe inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorDoc {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl VectorDoc {
    pub fn to_cvec(&self) -> Result<crate::matrix::CVec> {
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(Error::Input("vector re/im length mismatch".into()));
        }
        Ok(crate::matrix::CVec::from_iterator(
            self.re.len(),
            self.re.iter().enumerate().map(|(k, &r)| {
                num_complex::Complex::new(r, self.im.get(k).copied().unwrap_or(0.0))
            }),
        ))
    }
}

/// A symbol that may arrive either as a float series or as exact rational
/// polynomial data.
#[derive(Clone, Debug)]
pub enum SymbolDoc {
    Float(SeriesDoc),
    Exact(PolyDoc),
}

impl SymbolDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        if value.get("rational_coeffs").is_some() {
            Ok(SymbolDoc::Exact(serde_json::from_value(value)?))
        } else {
            Ok(SymbolDoc::Float(serde_json::from_value(value)?))
        }
    }

    pub fn to_f64_series(&self) -> Result<TruncatedSeries<f64>> {
        match self {
            SymbolDoc::Float(d) => d.to_series(),
            SymbolDoc::Exact(d) => Ok(d.to_poly()?.to_f64_poly().to_series(GoodWeight::unit())),
        }
    }

    pub fn to_rat_series(&self) -> Result<TruncatedSeries<BigRational>> {
        match self {
            SymbolDoc::Exact(d) => d.to_rat_series(),
            SymbolDoc::Float(_) => Err(Error::Unsupported(
                "exact path needs rational_coeffs data".into(),
            )),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SymbolDoc::Exact(_))
    }
}

/// Versioned schemas of every document the tool reads or writes: for each
/// document kind, the required and optional top-level keys.
pub fn schema_dump() -> Value {
    json!({
        "version": SCHEMA_VERSION,
        "documents": {
            "series": {
                "required": ["coeffs"],
                "optional": ["tail_bound", "weight"],
                "weight": {"required": ["kind"], "optional": ["prefix", "eventual"],
                            "kinds": ["unit", "explicit", "operator_induced"]}
            },
            "polynomial": {
                "required": ["rational_coeffs"],
                "coefficients": "array of [numerator, denominator] decimal strings"
            },
            "matrix": {
                "required": ["dim", "re"],
                "optional": ["im"],
                "layout": "row-major"
            },
            "sequence": {
                "required": ["prefix", "eventual"],
                "optional": ["rational_prefix", "rational_eventual"]
            },
            "vector": {"required": ["re"], "optional": ["im"]},
            "certificates": {
                "factor": {"required": ["verdict_g", "verdict_fg", "epsilon", "n_split", "cofactor"]},
                "admissible": {"required": ["admissible", "strongly_admissible",
                                             "min_on_unit_interval", "circle_root_margin"]},
                "member": {"required": ["verdict", "min_eigenvalue", "truncation_n",
                                         "series_tail", "spectral_ok", "summability_ok"]},
                "renorm": {"required": ["gram", "w", "contraction_norm", "gram_floor",
                                         "defect_residual"]},
                "decompose": {"required": ["h0_basis", "h1_basis", "unitary_residual",
                                            "invariance_residual"]},
                "model": {"required": ["samples", "max_theta_norm"]},
                "include": {"required": ["status", "gamma_prefix"]},
                "limits": {"required": ["outcome", "falsification_alarm"]}
            }
        }
    })
}

/// Checks a certificate document against the dumped schema: every key the
/// schema marks as required for that certificate kind must be present.
pub fn validate_certificate(kind: &str, doc: &Value) -> Result<()> {
    let schema = schema_dump();
    let required = schema["documents"]["certificates"][kind]["required"]
        .as_array()
        .ok_or_else(|| Error::Input(format!("unknown certificate kind {kind:?}")))?;
    for key in required {
        let key = key.as_str().unwrap_or_default();
        if doc.get(key).is_none() {
            return Err(Error::Verification(format!(
                "certificate of kind {kind:?} is missing required key {key:?}"
            )));
        }
    }
    Ok(())
}

/// Serializes an exact-rational gamma prefix for inclusion reports.
pub fn gamma_prefix_json<S: Coeff>(gamma: &[S]) -> Value {
    json!(gamma.iter().map(|c| c.to_f64()).collect::<Vec<f64>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_roundtrip() {
        let text = r#"{"coeffs":[1.0,-1.0],"tail_bound":0.0,"weight":{"kind":"unit"}}"#;
        let doc: SeriesDoc = serde_json::from_str(text).unwrap();
        let s = doc.to_series().unwrap();
        assert_eq!(s.coeffs(), &[1.0, -1.0]);
        let back = SeriesDoc::from_series(&s);
        assert_eq!(back.coeffs, doc.coeffs);
    }

    #[test]
    fn series_defaults() {
        let doc: SeriesDoc = serde_json::from_str(r#"{"coeffs":[2.0]}"#).unwrap();
        assert_eq!(doc.tail_bound, 0.0);
        assert_eq!(doc.weight, GoodWeight::unit());
    }

    #[test]
    fn poly_doc_parses_rationals() {
        let doc: PolyDoc =
            serde_json::from_str(r#"{"rational_coeffs":[["1","1"],["-3","2"],["1","2"]]}"#)
                .unwrap();
        let p = doc.to_poly().unwrap();
        assert_eq!(p.coeff(1), BigRational::from_ratio(-3, 2));
        assert!(PolyDoc {
            rational_coeffs: vec![("1".into(), "0".into())]
        }
        .to_poly()
        .is_err());
    }

    #[test]
    fn matrix_doc_row_major() {
        let doc: MatrixDoc =
            serde_json::from_str(r#"{"dim":2,"re":[0.0,2.0,0.0,0.0]}"#).unwrap();
        let t = doc.to_operator().unwrap();
        assert_eq!(t.matrix()[(0, 1)].re, 2.0);
        assert_eq!(t.matrix()[(1, 0)].re, 0.0);
        let back = MatrixDoc::from_cmat(t.matrix());
        assert_eq!(back.re, doc.re);
    }

    #[test]
    fn symbol_doc_dispatches() {
        let f = SymbolDoc::parse(r#"{"coeffs":[1.0,-1.0]}"#).unwrap();
        assert!(!f.is_exact());
        let e = SymbolDoc::parse(r#"{"rational_coeffs":[["1","1"],["-1","1"]]}"#).unwrap();
        assert!(e.is_exact());
        assert_eq!(e.to_f64_series().unwrap().coeffs(), &[1.0, -1.0]);
    }

    #[test]
    fn schema_mentions_core_fields() {
        let s = schema_dump();
        let series_req = s["documents"]["series"]["required"].as_array().unwrap();
        assert!(series_req.iter().any(|k| k == "coeffs"));
        let mat_req = s["documents"]["matrix"]["required"].as_array().unwrap();
        assert!(mat_req.iter().any(|k| k == "re"));
    }

    #[test]
    fn certificate_validation() {
        let doc = json!({"verdict":"member","min_eigenvalue":0.0,"truncation_n":3,
                          "series_tail":0.0,"spectral_ok":true,"summability_ok":true});
        validate_certificate("member", &doc).unwrap();
        assert!(validate_certificate("member", &json!({"verdict":"member"})).is_err());
        assert!(validate_certificate("nope", &doc).is_err());
    }
}
