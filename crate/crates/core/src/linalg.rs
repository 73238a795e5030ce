//! Shared dense-linear-algebra helpers built on SVD.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Orthonormal basis (rows) of the row space of `m`, rank-revealed by SVD.
pub fn row_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let ncols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::zeros(0, ncols);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_REL_TOL * smax.max(f64::MIN_POSITIVE))
        .collect();
    let mut out = DMatrix::zeros(keep.len(), ncols);
    for (r, &i) in keep.iter().enumerate() {
        out.set_row(r, &v_t.row(i));
    }
    out
}

/// Orthonormal basis (as column vectors) of the null space of `m`.
///
/// `m` must have at least as many rows as columns; pad with zero rows first
/// if necessary so the thin SVD sees every right-singular direction.
pub fn null_space(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let ncols = m.ncols();
    let padded = if m.nrows() < ncols {
        let mut p = DMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let smax = svd.singular_values.max();
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= RANK_REL_TOL * smax.max(f64::MIN_POSITIVE))
        .map(|i| v_t.row(i).transpose())
        .collect()
}

/// Stack row vectors into a matrix; `ncols` disambiguates the empty case.
pub fn stack_rows(rows: &[DVector<f64>], ncols: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows.len(), ncols);
    for (r, v) in rows.iter().enumerate() {
        m.set_row(r, &v.transpose());
    }
    m
}
