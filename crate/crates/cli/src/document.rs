//! The analysis document: a JSON object describing one algebra, one metric,
//! optional subspace and immersion data, and the tasks to run. The schema
//! rejects unknown keys and checks every cross-referenced dimension before
//! any numerics start.

use gaussmap_core::harmonicity::ImmersionPointData;
use gaussmap_core::{
    BracketEntry, InnerProduct, LieAlgebra, MetricLieAlgebra, Subspace, Vector,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::tasks::TASK_NAMES;

pub const METRIC_KEYWORDS: [&str; 2] = ["identity", "neg_killing"];

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnalysisDocument {
    pub algebra: AlgebraSpec,
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub immersion: Option<ImmersionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Sparse structure constants with i < j; the other half is implied.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketSpec>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum MetricSpec {
    /// "identity" or "neg_killing" (the negated Killing form).
    Keyword(String),
    /// Full symmetric positive definite matrix, row by row.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ImmersionSpec {
    pub tangent_frame: Vec<Vec<f64>>,
    pub normal_frame: Vec<Vec<f64>>,
    /// b[i][j][alpha]: n×n×q, symmetric in (i, j).
    pub b: Vec<Vec<Vec<f64>>>,
    /// dH[j][alpha]: n×q; zero when omitted.
    #[serde(rename = "dH", default, skip_serializing_if = "Option::is_none")]
    pub dh: Option<Vec<Vec<f64>>>,
}

/// Parse a document from JSON text. Syntax problems map to `Parse`, schema
/// and shape problems to `Schema`/`Dimension`.
pub fn parse_document(text: &str) -> Result<AnalysisDocument, CliError> {
    let doc: AnalysisDocument = match serde_json::from_str(text) {
        Ok(d) => d,
        Err(e) => {
            return Err(match e.classify() {
                serde_json::error::Category::Data => CliError::Schema(e.to_string()),
                _ => CliError::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: e.to_string(),
                },
            });
        }
    };
    doc.validate()?;
    Ok(doc)
}

/// Canonical JSON emission; `parse_document(emit(doc))` reproduces the
/// document field for field.
pub fn emit(doc: &AnalysisDocument) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("document serializes");
    out.push('\n');
    out
}

impl AnalysisDocument {
    /// Schema and dimension validation, before any numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        let dim = self.algebra.dim;
        if dim == 0 {
            return Err(CliError::Dimension("algebra dimension must be positive".into()));
        }
        if let Some(labels) = &self.algebra.labels {
            if labels.len() != dim {
                return Err(CliError::Dimension(format!(
                    "{} labels for dimension {dim}",
                    labels.len()
                )));
            }
        }
        for e in &self.algebra.brackets {
            if e.i >= e.j {
                return Err(CliError::Schema(format!(
                    "bracket entry requires i < j, got i={}, j={}",
                    e.i, e.j
                )));
            }
            if e.i >= dim || e.j >= dim || e.k >= dim {
                return Err(CliError::Dimension(format!(
                    "bracket entry ({}, {}, {}) out of range for dimension {dim}",
                    e.i, e.j, e.k
                )));
            }
        }
        match &self.metric {
            MetricSpec::Keyword(k) => {
                if !METRIC_KEYWORDS.contains(&k.as_str()) {
                    return Err(CliError::Schema(format!(
                        "unknown metric keyword '{k}' (expected one of {METRIC_KEYWORDS:?})"
                    )));
                }
            }
            MetricSpec::Matrix(rows) => check_matrix("metric", rows, dim, dim)?,
        }
        if let Some(rows) = &self.subspace {
            for (r, row) in rows.iter().enumerate() {
                if row.len() != dim {
                    return Err(CliError::Dimension(format!(
                        "subspace generator {r} has length {}, expected {dim}",
                        row.len()
                    )));
                }
            }
        }
        if let Some(imm) = &self.immersion {
            let n = imm.tangent_frame.len();
            let q = imm.normal_frame.len();
            if n == 0 {
                return Err(CliError::Dimension("tangent frame is empty".into()));
            }
            if n + q != dim {
                return Err(CliError::Dimension(format!(
                    "frame sizes {n}+{q} do not fill dimension {dim}"
                )));
            }
            check_matrix("tangent_frame", &imm.tangent_frame, n, dim)?;
            check_matrix("normal_frame", &imm.normal_frame, q, dim)?;
            if imm.b.len() != n {
                return Err(CliError::Dimension(format!(
                    "b has {} rows, expected n = {n}",
                    imm.b.len()
                )));
            }
            for (i, plane) in imm.b.iter().enumerate() {
                if plane.len() != n {
                    return Err(CliError::Dimension(format!(
                        "b[{i}] has {} rows, expected n = {n}",
                        plane.len()
                    )));
                }
                for (j, fibre) in plane.iter().enumerate() {
                    if fibre.len() != q {
                        return Err(CliError::Dimension(format!(
                            "b[{i}][{j}] has {} entries, expected q = {q}",
                            fibre.len()
                        )));
                    }
                }
            }
            if let Some(dh) = &imm.dh {
                check_matrix("dH", dh, n, q)?;
            }
        }
        for t in &self.tasks {
            if !TASK_NAMES.contains(&t.as_str()) {
                return Err(CliError::Schema(format!(
                    "unknown task '{t}' (expected one of {TASK_NAMES:?})"
                )));
            }
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) {
                return Err(CliError::Schema(format!("tolerance must be positive, got {tol}")));
            }
        }
        Ok(())
    }

    /// Build the algebra and metric. Core-level rejections (antisymmetry,
    /// positive definiteness) surface as precondition failures, not schema
    /// errors.
    pub fn build_metric_algebra(&self) -> Result<MetricLieAlgebra, CliError> {
        let entries: Vec<BracketEntry> = self
            .algebra
            .brackets
            .iter()
            .map(|e| BracketEntry { i: e.i, j: e.j, k: e.k, c: e.c })
            .collect();
        let alg = LieAlgebra::from_entries(self.algebra.dim, self.algebra.labels.clone(), &entries)?;
        let ip = match &self.metric {
            MetricSpec::Keyword(k) if k == "identity" => InnerProduct::identity(self.algebra.dim),
            MetricSpec::Keyword(_) => InnerProduct::new(-alg.killing_form())?,
            MetricSpec::Matrix(rows) => InnerProduct::new(rows_to_matrix(rows))?,
        };
        Ok(MetricLieAlgebra::new(alg, ip)?)
    }

    pub fn build_subspace(&self, dim: usize) -> Result<Option<Subspace>, CliError> {
        match &self.subspace {
            None => Ok(None),
            Some(rows) => {
                let gens: Vec<Vector> =
                    rows.iter().map(|r| Vector::from_vec(r.clone())).collect();
                Ok(Some(Subspace::span(dim, gens)?))
            }
        }
    }

    /// Assemble immersion data against a built metric algebra; validation of
    /// orthonormality and symmetry happens in the core layer.
    pub fn build_immersion(
        &self,
        m: &MetricLieAlgebra,
    ) -> gaussmap_core::Result<Option<ImmersionPointData>> {
        let Some(imm) = &self.immersion else { return Ok(None) };
        let tf: Vec<Vector> = imm.tangent_frame.iter().map(|r| Vector::from_vec(r.clone())).collect();
        let nf: Vec<Vector> = imm.normal_frame.iter().map(|r| Vector::from_vec(r.clone())).collect();
        let n = tf.len();
        let q = nf.len();
        let mut slices = vec![DMatrix::zeros(n, n); q];
        for i in 0..n {
            for j in 0..n {
                for (gamma, slice) in slices.iter_mut().enumerate() {
                    slice[(i, j)] = imm.b[i][j][gamma];
                }
            }
        }
        let dh = imm.dh.as_ref().map(|rows| {
            DMatrix::from_fn(n, q, |r, c| rows[r][c])
        });
        Ok(Some(ImmersionPointData::new(m, tf, nf, slices, dh)?))
    }
}

fn check_matrix(name: &str, rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<(), CliError> {
    if rows.len() != nrows {
        return Err(CliError::Dimension(format!(
            "{name} has {} rows, expected {nrows}",
            rows.len()
        )));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(CliError::Dimension(format!(
                "{name} row {r} has {} entries, expected {ncols}",
                row.len()
            )));
        }
    }
    Ok(())
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c])
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            r#"{{"algebra": {{"dim": 3, "brackets": [{{"i":0,"j":1,"k":2,"c":1.0}}]}}, "metric": "identity"{extra}}}"#
        )
    }

    #[test]
    fn parses_a_minimal_document() {
        let doc = parse_document(&minimal("")).unwrap();
        assert_eq!(doc.algebra.dim, 3);
        assert!(matches!(&doc.metric, MetricSpec::Keyword(k) if k == "identity"));
    }

    #[test]
    fn round_trips_through_emit() {
        let text = minimal(
            r#", "subspace": [[1.0, 0.0, 0.0]], "tasks": ["validate"], "tolerance": 1e-9, "seed": 7"#,
        );
        let doc = parse_document(&text).unwrap();
        let doc2 = parse_document(&emit(&doc)).unwrap();
        assert_eq!(doc, doc2);
        assert_eq!(emit(&doc), emit(&doc2));
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let err = parse_document("{ nope").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 1, .. }));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_document(&minimal(r#", "surprise": 1"#)).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
    }

    #[test]
    fn diagonal_bracket_entries_are_schema_errors() {
        let text = r#"{"algebra": {"dim": 3, "brackets": [{"i":1,"j":1,"k":2,"c":1.0}]}, "metric": "identity"}"#;
        let err = parse_document(text).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
    }

    #[test]
    fn out_of_range_indices_are_dimension_errors() {
        let text = r#"{"algebra": {"dim": 2, "brackets": [{"i":0,"j":1,"k":5,"c":1.0}]}, "metric": "identity"}"#;
        let err = parse_document(text).unwrap_err();
        assert!(matches!(err, CliError::Dimension(_)));
    }

    #[test]
    fn unknown_tasks_and_keywords_are_schema_errors() {
        let err = parse_document(&minimal(r#", "tasks": ["frobnicate"]"#)).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
        let text = r#"{"algebra": {"dim": 2}, "metric": "killing"}"#;
        assert!(matches!(parse_document(text).unwrap_err(), CliError::Schema(_)));
    }

    #[test]
    fn neg_killing_keyword_builds_twice_the_identity_on_so3() {
        let text = r#"{"algebra": {"dim": 3, "brackets": [
            {"i":0,"j":1,"k":2,"c":1.0}, {"i":1,"j":2,"k":0,"c":1.0}, {"i":0,"j":2,"k":1,"c":-1.0}
        ]}, "metric": "neg_killing"}"#;
        let doc = parse_document(text).unwrap();
        let m = doc.build_metric_algebra().unwrap();
        let expected = DMatrix::identity(3, 3).scale(2.0);
        assert!((m.inner().matrix() - expected).amax() <= 1e-12);
    }

    #[test]
    fn immersion_shapes_are_checked() {
        let text = r#"{"algebra": {"dim": 3}, "metric": "identity",
            "immersion": {"tangent_frame": [[1,0,0],[0,1,0]], "normal_frame": [[0,0,1]],
                          "b": [[[0]],[[0]]], "dH": [[0],[0]]}}"#;
        let err = parse_document(text).unwrap_err();
        assert!(matches!(err, CliError::Dimension(_)), "b rows mismatch: {err}");
    }
}
