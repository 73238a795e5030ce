//! Finite-dimensional real Lie algebras given by structure constants.
//!
//! The bracket is stored as the tensor c with [b_i, b_j] = Σ_k c[i][j][k] b_k,
//! kept internally as one n×n component matrix per output index k.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::subspace::{Subspace, Vector};

/// Hard cap on the antisymmetry defect accepted at construction.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// One structure-constant entry: [b_i, b_j] gains `c`·b_k, with i < j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    /// comp[k][(i, j)] = c[i][j][k]; each comp[k] is antisymmetric.
    comp: Vec<DMatrix<f64>>,
}

impl LieAlgebra {
    /// Build from sparse entries with i < j; the i > j half is implied.
    pub fn from_entries(
        dim: usize,
        labels: Option<Vec<String>>,
        entries: &[BracketEntry],
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "{} labels for dimension {dim}",
                        l.len()
                    )));
                }
                l
            }
            None => (1..=dim).map(|i| format!("b{i}")).collect(),
        };
        let mut comp = vec![DMatrix::zeros(dim, dim); dim];
        for e in entries {
            if e.i >= dim || e.j >= dim || e.k >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "bracket entry ({}, {}, {}) out of range for dimension {dim}",
                    e.i, e.j, e.k
                )));
            }
            if e.i >= e.j {
                return Err(Error::DimensionMismatch(format!(
                    "bracket entry requires i < j, got ({}, {})",
                    e.i, e.j
                )));
            }
            comp[e.k][(e.i, e.j)] += e.c;
            comp[e.k][(e.j, e.i)] -= e.c;
        }
        Ok(LieAlgebra { dim, labels, comp })
    }

    /// Build from a full tensor c[i][j][k] laid out as component matrices.
    ///
    /// The tensor is antisymmetrized in (i, j); if that correction exceeds
    /// [`ANTISYMMETRY_TOL`] the input is rejected rather than repaired.
    pub fn from_components(labels: Option<Vec<String>>, comp: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = comp.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        for m in &comp {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "component matrix is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let mut correction: f64 = 0.0;
        let mut anti = Vec::with_capacity(dim);
        for m in &comp {
            let a = (m - m.transpose()).scale(0.5);
            correction = correction.max((m - &a).amax());
            anti.push(a);
        }
        if correction > ANTISYMMETRY_TOL {
            return Err(Error::NotAntisymmetric(correction));
        }
        let labels = match labels {
            Some(l) if l.len() != dim => {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for dimension {dim}",
                    l.len()
                )))
            }
            Some(l) => l,
            None => (1..=dim).map(|i| format!("b{i}")).collect(),
        };
        Ok(LieAlgebra { dim, labels, comp: anti })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.comp[k][(i, j)]
    }

    /// Sparse entries with i < j and nonzero coefficient, in (i, j, k) order.
    pub fn entries(&self) -> Vec<BracketEntry> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                for k in 0..self.dim {
                    let c = self.comp[k][(i, j)];
                    if c != 0.0 {
                        out.push(BracketEntry { i, j, k, c });
                    }
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} in algebra of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// [x, y]_k = Σ_{i,j} x_i y_j c[i][j][k].
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        let mut out = DVector::zeros(self.dim);
        for k in 0..self.dim {
            out[k] = (x.transpose() * &self.comp[k] * y)[(0, 0)];
        }
        Ok(out)
    }

    /// Matrix of ad(x): y ↦ [x, y] in the algebra basis.
    pub fn ad_matrix(&self, x: &Vector) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim {
            m.set_row(k, &(x.transpose() * &self.comp[k]));
        }
        Ok(m)
    }

    /// Max over basis triples of ‖[[b_i,b_j],b_k] + [[b_j,b_k],b_i] + [[b_k,b_i],b_j]‖₂.
    pub fn jacobi_residual(&self) -> f64 {
        let basis: Vec<Vector> = (0..self.dim).map(|i| self.basis_vector(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let bij = self.bracket(&basis[i], &basis[j]).expect("basis");
                for k in (j + 1)..self.dim {
                    let bjk = self.bracket(&basis[j], &basis[k]).expect("basis");
                    let bki = self.bracket(&basis[k], &basis[i]).expect("basis");
                    let jac = self.bracket(&bij, &basis[k]).expect("basis")
                        + self.bracket(&bjk, &basis[i]).expect("basis")
                        + self.bracket(&bki, &basis[j]).expect("basis");
                    worst = worst.max(jac.norm());
                }
            }
        }
        worst
    }

    /// Killing form K[a][b] = tr(ad(b_a)·ad(b_b)); symmetric by construction.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let ads: Vec<DMatrix<f64>> = (0..self.dim)
            .map(|a| self.ad_matrix(&self.basis_vector(a)).expect("basis"))
            .collect();
        let mut k = DMatrix::zeros(self.dim, self.dim);
        for a in 0..self.dim {
            for b in a..self.dim {
                let t = (&ads[a] * &ads[b]).trace();
                k[(a, b)] = t;
                k[(b, a)] = t;
            }
        }
        k
    }

    /// Center {x : [x, y] = 0 ∀y}, via the null space of the stacked ad map.
    pub fn center(&self) -> Subspace {
        let n = self.dim;
        let mut stacked = DMatrix::zeros(n * n, n);
        for a in 0..n {
            let ad = self.ad_matrix(&self.basis_vector(a)).expect("basis");
            for r in 0..n {
                for c in 0..n {
                    // Row block index r*n + c holds entry (r, c) of ad(b_a) as
                    // the coefficient of x_a in ad(x)[r][c].
                    stacked[(r * n + c, a)] = ad[(r, c)];
                }
            }
        }
        let null = linalg::null_space(&stacked);
        Subspace::span(n, null).expect("null space vectors have ambient length")
    }

    /// Derived subalgebra: span of all [b_i, b_j].
    pub fn derived_subalgebra(&self) -> Subspace {
        let mut gens = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                gens.push(
                    self.bracket(&self.basis_vector(i), &self.basis_vector(j))
                        .expect("basis"),
                );
            }
        }
        Subspace::span(self.dim, gens).expect("brackets have ambient length")
    }
}
