//! Left-invariant metrics: inner products on the algebra, the Levi-Civita
//! connection via the Koszul formula, and curvature of left-invariant fields.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::subspace::{Subspace, Vector};

/// Symmetry defect accepted for a metric matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative cutoff below which a Gram-Schmidt remainder counts as dependent.
pub const GS_REL_TOL: f64 = 1e-9;

/// Positive-definite symmetric bilinear form on the algebra.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    g: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl PartialEq for InnerProduct {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl InnerProduct {
    /// Validates symmetry (within [`SYMMETRY_TOL`]) and positive definiteness
    /// (smallest eigenvalue must be strictly positive).
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "metric matrix is {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        let asym = (&g - g.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let sym = (&g + g.transpose()).scale(0.5);
        let min_eig = sym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite(min_eig));
        }
        let chol = Cholesky::new(sym.clone())
            .ok_or_else(|| Error::Numerical("Cholesky failed on a positive-definite matrix".into()))?;
        Ok(InnerProduct { g: sym, chol })
    }

    pub fn identity(dim: usize) -> Self {
        InnerProduct::new(DMatrix::identity(dim, dim)).expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn pairing(&self, x: &Vector, y: &Vector) -> f64 {
        (x.transpose() * &self.g * y)[(0, 0)]
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        self.pairing(x, x).max(0.0).sqrt()
    }

    /// Solve g·v = rhs.
    pub fn solve(&self, rhs: &Vector) -> Vector {
        self.chol.solve(rhs)
    }

    /// Lower Cholesky factor L with g = L·Lᵀ.
    pub fn cholesky_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }
}

/// A Lie algebra together with a left-invariant metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    alg: LieAlgebra,
    ip: InnerProduct,
}

impl MetricLieAlgebra {
    pub fn new(alg: LieAlgebra, ip: InnerProduct) -> Result<Self> {
        if ip.dim() != alg.dim() {
            return Err(Error::DimensionMismatch(format!(
                "metric dimension {} for algebra dimension {}",
                ip.dim(),
                alg.dim()
            )));
        }
        Ok(MetricLieAlgebra { alg, ip })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn inner(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// Levi-Civita connection of left-invariant fields, from the Koszul
    /// formula ⟨∇_x y, z⟩ = ½(⟨[x,y],z⟩ − ⟨[y,z],x⟩ + ⟨[z,x],y⟩).
    pub fn connection(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let n = self.dim();
        let bxy = self.alg.bracket(x, y)?;
        let mut rhs = Vector::zeros(n);
        for k in 0..n {
            let bk = self.alg.basis_vector(k);
            let bybk = self.alg.bracket(y, &bk)?;
            let bbkx = self.alg.bracket(&bk, x)?;
            rhs[k] = 0.5
                * (self.ip.pairing(&bxy, &bk) - self.ip.pairing(&bybk, x)
                    + self.ip.pairing(&bbkx, y));
        }
        Ok(self.ip.solve(&rhs))
    }

    /// R(x,y)z = ∇_x ∇_y z − ∇_y ∇_x z − ∇_{[x,y]} z on left-invariant fields.
    pub fn curvature(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector> {
        let nyz = self.connection(y, z)?;
        let nxz = self.connection(x, z)?;
        let bxy = self.alg.bracket(x, y)?;
        Ok(self.connection(x, &nyz)? - self.connection(y, &nxz)? - self.connection(&bxy, z)?)
    }

    /// Max over basis triples of |⟨[b_i,b_j],b_k⟩ − ⟨b_i,[b_j,b_k]⟩|.
    /// Zero (within tolerance) iff the metric is biinvariant.
    pub fn biinvariance_residual(&self) -> f64 {
        let n = self.dim();
        let basis: Vec<Vector> = (0..n).map(|i| self.alg.basis_vector(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let bij = self.alg.bracket(&basis[i], &basis[j]).expect("basis");
                for k in 0..n {
                    let bjk = self.alg.bracket(&basis[j], &basis[k]).expect("basis");
                    let d = self.ip.pairing(&bij, &basis[k]) - self.ip.pairing(&basis[i], &bjk);
                    worst = worst.max(d.abs());
                }
            }
        }
        worst
    }

    pub fn is_biinvariant(&self, tol: f64) -> bool {
        self.biinvariance_residual() <= tol
    }

    /// Modified Gram-Schmidt in input order, re-orthogonalized once more to
    /// push cross terms to roundoff. Fails with `RankDeficient` if any input
    /// is (numerically) dependent on its predecessors.
    pub fn orthonormalize(&self, vs: &[Vector]) -> Result<Vec<Vector>> {
        let mut frame: Vec<Vector> = Vec::with_capacity(vs.len());
        for (idx, v) in vs.iter().enumerate() {
            if v.len() != self.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "vector {idx} has length {}, algebra dimension is {}",
                    v.len(),
                    self.dim()
                )));
            }
            match self.gs_step(&frame, v) {
                Some(u) => frame.push(u),
                None => return Err(Error::RankDeficient(idx)),
            }
        }
        Ok(frame)
    }

    /// One Gram-Schmidt step against an existing metric-orthonormal frame.
    /// Returns None when the remainder is below the dependence cutoff.
    fn gs_step(&self, frame: &[Vector], v: &Vector) -> Option<Vector> {
        let scale = self.ip.norm(v);
        let mut u = v.clone();
        for _pass in 0..2 {
            for f in frame {
                let c = self.ip.pairing(&u, f);
                u -= f.scale(c);
            }
        }
        let rem = self.ip.norm(&u);
        if rem <= GS_REL_TOL * scale.max(1.0) {
            return None;
        }
        Some(u.unscale(rem))
    }

    /// Metric-orthonormal frame spanning `s`, from its generators in order.
    pub fn metric_onb(&self, s: &Subspace) -> Result<Vec<Vector>> {
        let mut frame: Vec<Vector> = Vec::with_capacity(s.rank());
        for v in s.generators() {
            if let Some(u) = self.gs_step(&frame, v) {
                frame.push(u);
            }
        }
        if frame.len() != s.rank() {
            return Err(Error::Numerical(format!(
                "metric frame rank {} disagrees with subspace rank {}",
                frame.len(),
                s.rank()
            )));
        }
        Ok(frame)
    }

    /// Orthogonal complement of `s` with respect to this metric, inside
    /// `within` (the whole algebra if None). The returned generators are a
    /// metric-orthonormal frame of the complement, built deterministically
    /// by sweeping the enclosing generators after those of `s`.
    pub fn orthogonal_complement(
        &self,
        s: &Subspace,
        within: Option<&Subspace>,
    ) -> Result<Subspace> {
        let whole;
        let within = match within {
            Some(w) => w,
            None => {
                whole = Subspace::whole(self.dim());
                &whole
            }
        };
        if s.ambient_dim() != self.dim() || within.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch(
                "subspace ambient dimension differs from the algebra".into(),
            ));
        }
        let worst = (0..s.rank())
            .map(|i| within.residual(&s.onb_rows().row(i).transpose()))
            .fold(0.0, f64::max);
        if worst > GS_REL_TOL {
            return Err(Error::NotContained(worst));
        }
        let mut frame = self.metric_onb(s)?;
        let base = frame.len();
        for v in within.generators() {
            if let Some(u) = self.gs_step(&frame, v) {
                frame.push(u);
            }
        }
        Subspace::span(self.dim(), frame.split_off(base))
    }

    /// Component of `v` inside span(frame); the frame must be
    /// metric-orthonormal.
    pub fn project_onto_frame(&self, frame: &[Vector], v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for f in frame {
            out += f.scale(self.ip.pairing(v, f));
        }
        out
    }
}
