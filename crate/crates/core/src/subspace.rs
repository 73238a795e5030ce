//! Linear subspaces of the algebra, with rank-revealed spans.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Coefficient vector in the basis of an ambient algebra.
pub type Vector = DVector<f64>;

/// A linear subspace, kept as the original generators plus a
/// Euclidean-orthonormal row basis computed by SVD at construction.
///
/// Generators are preserved in input order: operations that build frames by
/// Gram-Schmidt consume them in that order, so results are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    generators: Vec<Vector>,
    onb: DMatrix<f64>,
}

impl Subspace {
    /// Span of `generators` inside an `ambient`-dimensional algebra.
    /// Dependent or zero generators are allowed; the rank reflects the span.
    pub fn span(ambient: usize, generators: Vec<Vector>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.len() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "generator {i} has length {}, ambient dimension is {ambient}",
                    g.len()
                )));
            }
        }
        let onb = linalg::row_space(&linalg::stack_rows(&generators, ambient));
        Ok(Subspace { ambient, generators, onb })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            generators: Vec::new(),
            onb: DMatrix::zeros(0, ambient),
        }
    }

    pub fn whole(ambient: usize) -> Self {
        let gens = (0..ambient)
            .map(|i| {
                let mut v = DVector::zeros(ambient);
                v[i] = 1.0;
                v
            })
            .collect();
        Subspace {
            ambient,
            generators: gens,
            onb: DMatrix::identity(ambient, ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Numerical dimension of the span.
    pub fn rank(&self) -> usize {
        self.onb.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Generators exactly as supplied at construction.
    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// Euclidean-orthonormal basis, one row per dimension.
    pub fn onb_rows(&self) -> &DMatrix<f64> {
        &self.onb
    }

    pub fn onb_vectors(&self) -> Vec<Vector> {
        (0..self.rank()).map(|i| self.onb.row(i).transpose()).collect()
    }

    /// Euclidean orthogonal projection onto the span.
    pub fn project(&self, v: &Vector) -> Vector {
        let coeffs = &self.onb * v;
        self.onb.transpose() * coeffs
    }

    /// Euclidean projector matrix Bᵀ B.
    pub fn projector(&self) -> DMatrix<f64> {
        self.onb.transpose() * &self.onb
    }

    /// Euclidean norm of the component of `v` outside the span.
    pub fn residual(&self, v: &Vector) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn contains_vector(&self, v: &Vector, tol: f64) -> bool {
        self.residual(v) <= tol * v.norm().max(1.0)
    }

    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        (0..other.rank()).all(|i| self.contains_vector(&other.onb.row(i).transpose(), tol))
    }

    /// Span of the union of two subspaces.
    pub fn sum(&self, other: &Subspace) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Subspace::span(self.ambient, gens)
    }

    /// Operator-norm-free distance ‖P_a − P_b‖_F between projectors;
    /// zero iff the subspaces coincide.
    pub fn distance(&self, other: &Subspace) -> f64 {
        (self.projector() - other.projector()).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vector {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn span_collapses_dependent_generators() {
        let s = Subspace::span(3, vec![e(3, 0), e(3, 0).scale(2.0)]).unwrap();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.generators().len(), 2);
    }

    #[test]
    fn zero_generator_gives_zero_subspace() {
        let s = Subspace::span(3, vec![DVector::zeros(3)]).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn projection_and_containment() {
        let s = Subspace::span(3, vec![e(3, 0), e(3, 1)]).unwrap();
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let p = s.project(&v);
        assert!((p - DVector::from_vec(vec![1.0, 2.0, 0.0])).norm() < 1e-12);
        assert!(!s.contains_vector(&v, 1e-9));
        assert!(s.contains_vector(&e(3, 1), 1e-9));
    }

    #[test]
    fn wrong_generator_length_is_rejected() {
        let err = Subspace::span(3, vec![DVector::zeros(2)]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn distance_separates_subspaces() {
        let a = Subspace::span(3, vec![e(3, 0)]).unwrap();
        let b = Subspace::span(3, vec![e(3, 1)]).unwrap();
        let a2 = Subspace::span(3, vec![e(3, 0).scale(-3.0)]).unwrap();
        assert!(a.distance(&b) > 1.0);
        assert!(a.distance(&a2) < 1e-12);
    }
}
