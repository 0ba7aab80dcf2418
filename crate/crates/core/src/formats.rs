//! File schemas: algebras as sparse structure constants, forms as sparse
//! coefficient lists (1-based indices on disk, 0-based in memory), torsion
//! tensors as slice lists, and the deterministic report envelope.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::exterior::{KForm, Space};
use crate::lie::MetricLieAlgebra;
use crate::torsion::TorsionTensor;

/// One sparse entry `[i, j, k, value]` (1-based, i < j).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

impl Serialize for AlgebraEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.i, self.j, self.k, self.value).serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (i, j, k, value) = <(usize, usize, usize, f64)>::deserialize(d)?;
        Ok(AlgebraEntry { i, j, k, value })
    }
}

/// Structure constants of a metric Lie algebra: `[e_i, e_j] = Σ c_{ij}^k e_k`
/// with only i < j entries stored; antisymmetry is completed on load.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgebraFile {
    pub dim: usize,
    pub c: Vec<AlgebraEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
}

impl AlgebraFile {
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.c {
            if e.i < 1 || e.j < 1 || e.k < 1 || e.i > self.dim || e.j > self.dim || e.k > self.dim
            {
                return Err(CoreError::Precondition(format!(
                    "index out of range in entry [{}, {}, {}] for dim {}",
                    e.i, e.j, e.k, self.dim
                )));
            }
            if e.i >= e.j {
                return Err(CoreError::Precondition(format!(
                    "entries require i < j, got [{}, {}, {}]",
                    e.i, e.j, e.k
                )));
            }
            if !seen.insert((e.i, e.j, e.k)) {
                return Err(CoreError::Precondition(format!(
                    "duplicate entry ({}, {}, {})",
                    e.i, e.j, e.k
                )));
            }
            if !e.value.is_finite() {
                return Err(CoreError::Precondition("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn to_algebra(&self) -> Result<MetricLieAlgebra> {
        self.validate()?;
        let space = Space::new(self.dim)?;
        let entries: Vec<(usize, usize, usize, f64)> = self
            .c
            .iter()
            .map(|e| (e.i - 1, e.j - 1, e.k - 1, e.value))
            .collect();
        MetricLieAlgebra::from_entries(space, &entries)
    }

    pub fn from_algebra(alg: &MetricLieAlgebra, name: Option<String>) -> Self {
        let n = alg.dim();
        let mut c = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = alg.c(i, j, k);
                    if v != 0.0 {
                        c.push(AlgebraEntry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            value: v,
                        });
                    }
                }
            }
        }
        AlgebraFile { dim: n, c, name }
    }
}

/// One coefficient row `[i_1, …, i_k, value]` with strictly increasing
/// 1-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffRow {
    pub indices: Vec<usize>,
    pub value: f64,
}

impl Serialize for CoeffRow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.indices.len() + 1))?;
        for &i in &self.indices {
            seq.serialize_element(&i)?;
        }
        seq.serialize_element(&self.value)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CoeffRow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<serde_json::Number>::deserialize(d)?;
        if raw.is_empty() {
            return Err(D::Error::custom("empty coefficient row"));
        }
        let (value, idx) = raw.split_last().unwrap();
        let indices = idx
            .iter()
            .map(|n| {
                n.as_u64()
                    .map(|v| v as usize)
                    .ok_or_else(|| D::Error::custom(format!("bad index {n}")))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let value = value
            .as_f64()
            .ok_or_else(|| D::Error::custom("bad coefficient value"))?;
        Ok(CoeffRow { indices, value })
    }
}

/// A degree-k form as a sparse coefficient list.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormFile {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<CoeffRow>,
}

impl FormFile {
    pub fn validate(&self) -> Result<()> {
        for row in &self.coeffs {
            if row.indices.len() != self.degree {
                return Err(CoreError::Precondition(format!(
                    "row has {} indices, degree is {}",
                    row.indices.len(),
                    self.degree
                )));
            }
            if row.indices.iter().any(|&i| i < 1 || i > self.dim) {
                return Err(CoreError::Precondition(format!(
                    "index out of range in row {:?} for dim {}",
                    row.indices, self.dim
                )));
            }
            if row.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CoreError::Precondition(format!(
                    "indices must be strictly increasing, got {:?}",
                    row.indices
                )));
            }
            if !row.value.is_finite() {
                return Err(CoreError::Precondition("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn to_kform(&self) -> Result<KForm> {
        self.validate()?;
        let space = Space::new(self.dim)?;
        let mut f = KForm::zero(space, self.degree);
        let mut seen = std::collections::BTreeSet::new();
        for row in &self.coeffs {
            if !seen.insert(row.indices.clone()) {
                return Err(CoreError::Precondition(format!(
                    "duplicate multi-index {:?}",
                    row.indices
                )));
            }
            let zero_based: Vec<usize> = row.indices.iter().map(|&i| i - 1).collect();
            f.add_term(zero_based, row.value)?;
        }
        Ok(f)
    }

    pub fn from_kform(f: &KForm) -> Self {
        let coeffs = f
            .coeffs()
            .filter(|(_, &v)| v != 0.0)
            .map(|(idx, &v)| CoeffRow {
                indices: idx.iter().map(|&i| i + 1).collect(),
                value: v,
            })
            .collect();
        FormFile {
            dim: f.space().dim(),
            degree: f.degree(),
            coeffs,
        }
    }
}

/// A torsion tensor as its list of 2-form slices T(e_i, ·, ·).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TorsionFile {
    pub dim: usize,
    pub slices: Vec<FormFile>,
}

impl TorsionFile {
    pub fn to_torsion(&self) -> Result<TorsionTensor> {
        let space = Space::new(self.dim)?;
        if self.slices.len() != self.dim {
            return Err(CoreError::Precondition(format!(
                "expected {} slices, got {}",
                self.dim,
                self.slices.len()
            )));
        }
        let mut slices = Vec::new();
        for (i, s) in self.slices.iter().enumerate() {
            if s.dim != self.dim || s.degree != 2 {
                return Err(CoreError::Precondition(format!(
                    "slice {i} must be a 2-form on dim {}",
                    self.dim
                )));
            }
            slices.push(s.to_kform()?);
        }
        TorsionTensor::new(space, slices)
    }

    pub fn from_torsion(t: &TorsionTensor) -> Self {
        TorsionFile {
            dim: t.space().dim(),
            slices: t.slices().iter().map(FormFile::from_kform).collect(),
        }
    }
}

/// Verdict of a CLI run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Diagnostic,
}

/// Deterministic report envelope: fixed field order, sorted maps, and
/// serde_json's shortest-round-trip float formatting give byte-identical
/// output for identical inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub results: serde_json::Value,
    pub residuals: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_round_trip() {
        let alg = MetricLieAlgebra::su3();
        let file = AlgebraFile::from_algebra(&alg, Some("su3".into()));
        let json = serde_json::to_string_pretty(&file).unwrap();
        let back: AlgebraFile = serde_json::from_str(&json).unwrap();
        assert_eq!(file, back);
        let alg2 = back.to_algebra().unwrap();
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    assert_eq!(alg.c(i, j, k), alg2.c(i, j, k));
                }
            }
        }
    }

    #[test]
    fn form_round_trip() {
        let f = MetricLieAlgebra::su2().canonical_three_form().unwrap();
        let file = FormFile::from_kform(&f);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("[1,2,3,-2.0]"), "{json}");
        let back: FormFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_kform().unwrap(), f);
    }

    #[test]
    fn rejects_malformed() {
        let bad: AlgebraFile = serde_json::from_str(
            r#"{"dim": 3, "c": [[2, 1, 3, 1.0]]}"#,
        )
        .unwrap();
        assert!(bad.validate().is_err(), "i >= j must be rejected");
        let dup: AlgebraFile = serde_json::from_str(
            r#"{"dim": 3, "c": [[1, 2, 3, 1.0], [1, 2, 3, 0.5]]}"#,
        )
        .unwrap();
        assert!(dup.validate().is_err());
        let range: FormFile = serde_json::from_str(
            r#"{"dim": 3, "degree": 2, "coeffs": [[1, 4, 1.0]]}"#,
        )
        .unwrap();
        assert!(range.to_kform().is_err());
        let order: FormFile = serde_json::from_str(
            r#"{"dim": 4, "degree": 2, "coeffs": [[3, 2, 1.0]]}"#,
        )
        .unwrap();
        assert!(order.to_kform().is_err());
    }

    #[test]
    fn torsion_round_trip() {
        let space = Space::new(4).unwrap();
        let mut slices = Vec::new();
        for i in 0..4 {
            let mut s = KForm::zero(space, 2);
            s.add_term(vec![0, (i + 1) % 4 + usize::from((i + 1) % 4 == 0)], 1.5 * i as f64)
                .ok();
            slices.push(s);
        }
        let t = TorsionTensor::new(space, slices).unwrap();
        let file = TorsionFile::from_torsion(&t);
        let json = serde_json::to_string(&file).unwrap();
        let back: TorsionFile = serde_json::from_str(&json).unwrap();
        let t2 = back.to_torsion().unwrap();
        assert!(t.sub(&t2).unwrap().norm() == 0.0);
    }

    #[test]
    fn report_determinism() {
        let mk = || Report {
            command: "classify".into(),
            inputs: [("tau.json".to_string(), "abc123".to_string())].into(),
            seed: 42,
            tolerances: [("defect".to_string(), 1e-8)].into(),
            results: serde_json::json!({"bricks": 2}),
            residuals: [("tau_jacobi".to_string(), 1e-16)].into(),
            verdict: Verdict::Pass,
        };
        assert_eq!(mk().to_json(), mk().to_json());
    }
}
