//! Built-in reference algebras. Each entry bundles the algebra, a metric,
//! and (where a standard example exists) a preloaded tangent subspace.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::lie::{BracketEntry, LieAlgebra};
use crate::metric::{InnerProduct, MetricLieAlgebra};
use crate::subspace::Subspace;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra,
    pub metric: InnerProduct,
    /// Default tangent subspace for tasks that need one.
    pub tangent: Option<Subspace>,
}

impl CatalogEntry {
    pub fn metric_algebra(&self) -> Result<MetricLieAlgebra> {
        MetricLieAlgebra::new(self.algebra.clone(), self.metric.clone())
    }
}

fn so3_entries(offset: usize) -> Vec<BracketEntry> {
    vec![
        BracketEntry { i: offset, j: offset + 1, k: offset + 2, c: 1.0 },
        BracketEntry { i: offset + 1, j: offset + 2, k: offset, c: 1.0 },
        BracketEntry { i: offset, j: offset + 2, k: offset + 1, c: -1.0 },
    ]
}

/// so(3) with the flat metric: [e1,e2] = e3 cyclically.
pub fn so3() -> CatalogEntry {
    let labels = vec!["e1".into(), "e2".into(), "e3".into()];
    let algebra = LieAlgebra::from_entries(3, Some(labels), &so3_entries(0)).expect("valid");
    CatalogEntry {
        name: "so3".into(),
        algebra,
        metric: InnerProduct::identity(3),
        tangent: None,
    }
}

/// so(3)⊕so(3) with metric diag(I₃, a²·I₃), biinvariant for every a ≠ 0.
///
/// The preloaded tangent is the twisted diagonal span(e1+f1, e2-f2, e3+f3),
/// a Lie triple system that meets its own bracket span trivially.
pub fn so3xso3(a: f64) -> CatalogEntry {
    let labels = vec![
        "e1".into(),
        "e2".into(),
        "e3".into(),
        "f1".into(),
        "f2".into(),
        "f3".into(),
    ];
    let mut entries = so3_entries(0);
    entries.extend(so3_entries(3));
    let algebra = LieAlgebra::from_entries(6, Some(labels), &entries).expect("valid");
    let mut g = DMatrix::identity(6, 6);
    for i in 3..6 {
        g[(i, i)] = a * a;
    }
    let tangent = Subspace::span(
        6,
        vec![
            algebra.basis_vector(0) + algebra.basis_vector(3),
            algebra.basis_vector(1) - algebra.basis_vector(4),
            algebra.basis_vector(2) + algebra.basis_vector(5),
        ],
    )
    .expect("valid");
    CatalogEntry {
        name: "so3xso3".into(),
        algebra,
        metric: InnerProduct::new(g).expect("positive definite for a != 0"),
        tangent: Some(tangent),
    }
}

/// Three-dimensional Heisenberg algebra [X1, X2] = Z, flat metric.
/// The preloaded direction X1 + Z is the standard non-harmonic geodesic.
pub fn heisenberg3() -> CatalogEntry {
    let labels = vec!["X1".into(), "X2".into(), "Z".into()];
    let algebra = LieAlgebra::from_entries(
        3,
        Some(labels),
        &[BracketEntry { i: 0, j: 1, k: 2, c: 1.0 }],
    )
    .expect("valid");
    let tangent = Subspace::span(3, vec![algebra.basis_vector(0) + algebra.basis_vector(2)])
        .expect("valid");
    CatalogEntry {
        name: "heisenberg3".into(),
        algebra,
        metric: InnerProduct::identity(3),
        tangent: Some(tangent),
    }
}

/// Five-dimensional Heisenberg algebra [X1,X2] = [X3,X4] = Z, flat metric.
pub fn heisenberg5() -> CatalogEntry {
    let labels = vec!["X1".into(), "X2".into(), "X3".into(), "X4".into(), "Z".into()];
    let algebra = LieAlgebra::from_entries(
        5,
        Some(labels),
        &[
            BracketEntry { i: 0, j: 1, k: 4, c: 1.0 },
            BracketEntry { i: 2, j: 3, k: 4, c: 1.0 },
        ],
    )
    .expect("valid");
    let tangent = Subspace::span(5, vec![algebra.basis_vector(0) + algebra.basis_vector(4)])
        .expect("valid");
    CatalogEntry {
        name: "heisenberg5".into(),
        algebra,
        metric: InnerProduct::identity(5),
        tangent: Some(tangent),
    }
}

/// Abelian algebra of dimension n with the flat metric.
pub fn euclidean(n: usize) -> CatalogEntry {
    let algebra = LieAlgebra::from_entries(n.max(1), None, &[]).expect("valid");
    CatalogEntry {
        name: "euclidean".into(),
        algebra,
        metric: InnerProduct::identity(n.max(1)),
        tangent: None,
    }
}

/// so(3) ⊕ ℝ with the flat metric; the line is central.
pub fn so3_plus_r() -> CatalogEntry {
    let labels = vec!["e1".into(), "e2".into(), "e3".into(), "u".into()];
    let algebra = LieAlgebra::from_entries(4, Some(labels), &so3_entries(0)).expect("valid");
    CatalogEntry {
        name: "so3_plus_R".into(),
        algebra,
        metric: InnerProduct::identity(4),
        tangent: None,
    }
}

/// Two-step nilpotent algebra [X1,X2] = Z1, [X1,X3] = Z2 with flat metric.
/// Its complement to the center is odd-dimensional, so every J(Z) is
/// singular; the preloaded direction is X1 + Z1.
pub fn j_singular3() -> CatalogEntry {
    let labels = vec!["X1".into(), "X2".into(), "X3".into(), "Z1".into(), "Z2".into()];
    let algebra = LieAlgebra::from_entries(
        5,
        Some(labels),
        &[
            BracketEntry { i: 0, j: 1, k: 3, c: 1.0 },
            BracketEntry { i: 0, j: 2, k: 4, c: 1.0 },
        ],
    )
    .expect("valid");
    let tangent = Subspace::span(5, vec![algebra.basis_vector(0) + algebra.basis_vector(3)])
        .expect("valid");
    CatalogEntry {
        name: "j_singular3".into(),
        algebra,
        metric: InnerProduct::identity(5),
        tangent: Some(tangent),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn all_catalog_algebras_satisfy_jacobi() {
        let entries = [
            so3(),
            so3xso3(2.0),
            heisenberg3(),
            heisenberg5(),
            euclidean(4),
            so3_plus_r(),
            j_singular3(),
        ];
        for e in entries {
            assert!(e.algebra.jacobi_residual() <= 1e-12, "{}", e.name);
            assert_eq!(e.metric.dim(), e.algebra.dim(), "{}", e.name);
        }
    }

    #[test]
    fn so3xso3_killing_form_is_block_minus_two() {
        let k = so3xso3(1.0).algebra.killing_form();
        assert!((k + DMatrix::identity(6, 6).scale(2.0)).amax() < 1e-12);
    }

    #[test]
    fn biinvariant_entries_are_biinvariant() {
        for e in [so3(), so3xso3(0.5), so3xso3(3.0), euclidean(2), so3_plus_r()] {
            let m = e.metric_algebra().unwrap();
            assert!(m.is_biinvariant(1e-12), "{}", e.name);
        }
    }

    #[test]
    fn heisenberg5_center_is_the_line_z() {
        let c = heisenberg5().algebra.center();
        assert_eq!(c.rank(), 1);
        assert!(c.contains_vector(&heisenberg5().algebra.basis_vector(4), 1e-9));
    }

    #[test]
    fn j_singular3_center_is_two_dimensional() {
        let c = j_singular3().algebra.center();
        assert_eq!(c.rank(), 2);
    }
}
