//! Bridges the core catalog to analysis documents, so every builtin is
//! expressible as (and indistinguishable from) a parsed input file.

use gaussmap_core::catalog::{self, CatalogEntry};
use nalgebra::DMatrix;

use crate::document::{
    matrix_to_rows, AlgebraSpec, AnalysisDocument, BracketSpec, MetricSpec,
};
use crate::error::CliError;

#[cfg(test)]
pub const BUILTIN_NAMES: [&str; 7] = [
    "so3",
    "so3xso3",
    "heisenberg3",
    "heisenberg5",
    "euclidean",
    "so3_plus_R",
    "j_singular3",
];

/// Materialize a builtin as a document. `params` supplies `a` for the
/// product family and `n` for the flat family; unknown or out-of-range
/// parameters are schema errors.
pub fn builtin_document(
    name: &str,
    params: &[(String, f64)],
) -> Result<AnalysisDocument, CliError> {
    for (k, _) in params {
        let expected = match name {
            "so3xso3" => k == "a",
            "euclidean" => k == "n",
            _ => false,
        };
        if !expected {
            return Err(CliError::Schema(format!(
                "builtin '{name}' does not take parameter '{k}'"
            )));
        }
    }
    let get = |key: &str| params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v);
    let (entry, tasks) = match name {
        "so3" => (catalog::so3(), vec!["validate", "classify_structure"]),
        "so3xso3" => {
            let a = get("a").unwrap_or(1.0);
            if a == 0.0 || !a.is_finite() {
                return Err(CliError::Schema(format!(
                    "parameter a must be a nonzero finite real, got {a}"
                )));
            }
            (
                catalog::so3xso3(a),
                vec!["validate", "harmonicity_tg", "classify_harmonicity"],
            )
        }
        "heisenberg3" => (catalog::heisenberg3(), vec!["validate", "nilpotent_geodesic"]),
        "heisenberg5" => (catalog::heisenberg5(), vec!["validate", "nilpotent_geodesic"]),
        "euclidean" => {
            let n = get("n").unwrap_or(3.0);
            if n.fract() != 0.0 || n < 1.0 || n > 64.0 {
                return Err(CliError::Schema(format!(
                    "parameter n must be an integer in 1..=64, got {n}"
                )));
            }
            (catalog::euclidean(n as usize), vec!["validate"])
        }
        "so3_plus_R" => (catalog::so3_plus_r(), vec!["validate", "classify_structure"]),
        "j_singular3" => (catalog::j_singular3(), vec!["validate", "nilpotent_geodesic"]),
        _ => return Err(CliError::UnknownBuiltin(name.to_string())),
    };
    Ok(entry_to_document(&entry, tasks))
}

fn entry_to_document(entry: &CatalogEntry, tasks: Vec<&str>) -> AnalysisDocument {
    let dim = entry.algebra.dim();
    let brackets = entry
        .algebra
        .entries()
        .into_iter()
        .map(|e| BracketSpec { i: e.i, j: e.j, k: e.k, c: e.c })
        .collect();
    let metric = if entry.metric.matrix() == &DMatrix::identity(dim, dim) {
        MetricSpec::Keyword("identity".into())
    } else {
        MetricSpec::Matrix(matrix_to_rows(entry.metric.matrix()))
    };
    let subspace = entry.tangent.as_ref().map(|s| {
        s.generators()
            .iter()
            .map(|g| g.iter().copied().collect())
            .collect()
    });
    AnalysisDocument {
        algebra: AlgebraSpec {
            dim,
            labels: Some(entry.algebra.labels().to_vec()),
            brackets,
        },
        metric,
        subspace,
        immersion: None,
        tasks: tasks.into_iter().map(String::from).collect(),
        tolerance: None,
        seed: None,
        lambda: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{emit, parse_document};

    #[test]
    fn builtins_emit_valid_documents() {
        for name in BUILTIN_NAMES {
            let doc = builtin_document(name, &[]).unwrap();
            doc.validate().unwrap();
            let parsed = parse_document(&emit(&doc)).unwrap();
            assert_eq!(doc, parsed, "{name} must round-trip");
            doc.build_metric_algebra().unwrap();
        }
    }

    #[test]
    fn product_builtin_takes_its_scale() {
        let doc = builtin_document("so3xso3", &[("a".into(), 2.0)]).unwrap();
        let m = doc.build_metric_algebra().unwrap();
        assert_eq!(m.inner().matrix()[(3, 3)], 4.0);
        assert_eq!(m.inner().matrix()[(0, 0)], 1.0);
        assert_eq!(doc.subspace.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn unknown_names_and_parameters_are_rejected() {
        assert!(matches!(
            builtin_document("so4", &[]).unwrap_err(),
            CliError::UnknownBuiltin(_)
        ));
        assert!(matches!(
            builtin_document("so3", &[("a".into(), 2.0)]).unwrap_err(),
            CliError::Schema(_)
        ));
        assert!(matches!(
            builtin_document("euclidean", &[("n".into(), 2.5)]).unwrap_err(),
            CliError::Schema(_)
        ));
        assert!(matches!(
            builtin_document("so3xso3", &[("a".into(), 0.0)]).unwrap_err(),
            CliError::Schema(_)
        ));
    }
}
