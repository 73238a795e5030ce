//! Structural decompositions used by the harmonicity classification:
//! generated subalgebras, the central/semisimple splitting of a compact
//! algebra, and the decomposition of a semisimple part into simple ideals
//! with their metric-vs-Killing multipliers.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg;
use crate::metric::MetricLieAlgebra;
use crate::subspace::{Subspace, Vector};

/// Relative eigenvalue gap that separates clusters when splitting a
/// semisimple algebra along a random commutant element.
const CLUSTER_GAP: f64 = 1e-6;

/// Random draws attempted before giving up on splitting a commutant.
const MAX_SPLIT_ATTEMPTS: usize = 8;

/// Splitting of a compact subalgebra into its center and derived part,
/// orthogonal with respect to the ambient metric.
#[derive(Debug, Clone)]
pub struct CompactSplit {
    pub abelian_part: Subspace,
    pub semisimple_part: Subspace,
}

#[derive(Debug, Clone)]
pub struct SimpleIdeal {
    pub subspace: Subspace,
    /// λ with ⟨·,·⟩ = λ·K on this ideal, when the fit is exact to 1e-9
    /// relative residual; None when the metric is not proportional there.
    pub killing_multiplier: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct SimpleIdealList {
    pub ideals: Vec<SimpleIdeal>,
}

impl SimpleIdealList {
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }
}

/// Span of all brackets [u, v] with u from `a` and v from `b`.
pub fn bracket_span(alg: &LieAlgebra, a: &Subspace, b: &Subspace) -> Result<Subspace> {
    let ua = a.onb_vectors();
    let ub = b.onb_vectors();
    let mut gens = Vec::with_capacity(ua.len() * ub.len());
    for u in &ua {
        for v in &ub {
            gens.push(alg.bracket(u, v)?);
        }
    }
    Subspace::span(alg.dim(), gens)
}

/// Max Euclidean residual of a bracket of `s` outside `s`, relative to the
/// bracket size; zero iff `s` is a subalgebra.
pub fn closure_residual(alg: &LieAlgebra, s: &Subspace) -> Result<f64> {
    let u = s.onb_vectors();
    let mut worst: f64 = 0.0;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            let b = alg.bracket(&u[i], &u[j])?;
            worst = worst.max(s.residual(&b) / b.norm().max(1.0));
        }
    }
    Ok(worst)
}

/// Max norm of the component of [[u, v], w] outside `w_sub`, swept over an
/// orthonormal basis of `w_sub`. Zero iff `w_sub` is a Lie triple system.
pub fn lie_triple_residual(alg: &LieAlgebra, w_sub: &Subspace) -> Result<f64> {
    if w_sub.ambient_dim() != alg.dim() {
        return Err(Error::DimensionMismatch(
            "subspace ambient dimension differs from the algebra".into(),
        ));
    }
    let u = w_sub.onb_vectors();
    let mut worst: f64 = 0.0;
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            let bij = alg.bracket(&u[i], &u[j])?;
            for s in &u {
                let t = alg.bracket(&bij, s)?;
                worst = worst.max(w_sub.residual(&t));
            }
        }
    }
    Ok(worst)
}

/// Smallest subalgebra containing `w` when `w` is a Lie triple system:
/// span(w ∪ [w,w]). Errors with `NotClosed` if that span fails to close
/// under the bracket (which happens exactly when `w` is not one).
pub fn generated_subalgebra(alg: &LieAlgebra, w: &Subspace, tol: f64) -> Result<Subspace> {
    let bw = bracket_span(alg, w, w)?;
    let n = w.sum(&bw)?;
    let res = closure_residual(alg, &n)?;
    if res > tol {
        return Err(Error::NotClosed(res));
    }
    Ok(n)
}

/// Whether [ambient, s] ⊆ s within `tol`; `s` must lie inside `ambient`.
pub fn is_ideal(alg: &LieAlgebra, ambient: &Subspace, s: &Subspace, tol: f64) -> Result<bool> {
    if !ambient.contains(s, linalg::RANK_REL_TOL) {
        let worst = (0..s.rank())
            .map(|i| ambient.residual(&s.onb_rows().row(i).transpose()))
            .fold(0.0, f64::max);
        return Err(Error::NotContained(worst));
    }
    for u in ambient.onb_vectors() {
        for v in s.onb_vectors() {
            let b = alg.bracket(&u, &v)?;
            if s.residual(&b) > tol * b.norm().max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Intersection of two subspaces of the same ambient algebra, via the null
/// space of the stacked complement projectors.
pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    let n = a.ambient_dim();
    let id = DMatrix::identity(n, n);
    let mut stacked = DMatrix::zeros(2 * n, n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&(&id - a.projector()));
    stacked.view_mut((n, 0), (n, n)).copy_from(&(&id - b.projector()));
    Subspace::span(n, linalg::null_space(&stacked))
}

/// Split a compact subalgebra as center ⊕ derived part, orthogonally for the
/// metric. Requires the metric to be biinvariant and `sub` to close under
/// the bracket; fails with `SplitFailed` if the orthogonal complement of the
/// derived part is not central in `sub`.
pub fn compact_split(m: &MetricLieAlgebra, sub: &Subspace, tol: f64) -> Result<CompactSplit> {
    let res = m.biinvariance_residual();
    if res > tol {
        return Err(Error::NotBiinvariant(res));
    }
    let closure = closure_residual(m.algebra(), sub)?;
    if closure > tol {
        return Err(Error::NotSubalgebra(closure));
    }
    let semisimple_part = bracket_span(m.algebra(), sub, sub)?;
    let abelian_part = m.orthogonal_complement(&semisimple_part, Some(sub))?;
    let mut central_defect: f64 = 0.0;
    for z in abelian_part.onb_vectors() {
        for u in sub.onb_vectors() {
            central_defect = central_defect.max(m.algebra().bracket(&z, &u)?.norm());
        }
    }
    if central_defect > tol {
        return Err(Error::SplitFailed(central_defect));
    }
    Ok(CompactSplit { abelian_part, semisimple_part })
}

/// The adjoint action of `sub` restricted to itself, one matrix per
/// orthonormal basis vector, in the coordinates of `sub.onb_rows()`.
fn restricted_ad(alg: &LieAlgebra, sub: &Subspace) -> Result<Vec<DMatrix<f64>>> {
    let b = sub.onb_rows();
    sub.onb_vectors()
        .iter()
        .map(|u| Ok(b * alg.ad_matrix(u)? * b.transpose()))
        .collect()
}

/// Killing form of `sub` as an algebra in its own right, in the coordinates
/// of its Euclidean orthonormal basis.
fn restricted_killing(alg: &LieAlgebra, sub: &Subspace) -> Result<DMatrix<f64>> {
    let ads = restricted_ad(alg, sub)?;
    let r = ads.len();
    let mut k = DMatrix::zeros(r, r);
    for p in 0..r {
        for q in p..r {
            let t = (&ads[p] * &ads[q]).trace();
            k[(p, q)] = t;
            k[(q, p)] = t;
        }
    }
    Ok(k)
}

/// Basis of {S : S·ad(u) = ad(u)·S for all u in sub}, as matrices in the
/// coordinates of the subspace's orthonormal basis.
fn commutant_basis(alg: &LieAlgebra, sub: &Subspace) -> Result<Vec<DMatrix<f64>>> {
    let ads = restricted_ad(alg, sub)?;
    let r = sub.rank();
    let id = DMatrix::identity(r, r);
    let mut stacked = DMatrix::zeros(ads.len() * r * r, r * r);
    for (blk, a) in ads.iter().enumerate() {
        // vec(S·A - A·S) = (Aᵀ ⊗ I - I ⊗ A)·vec(S), column-major vec.
        let k = a.transpose().kronecker(&id) - id.kronecker(a);
        stacked.view_mut((blk * r * r, 0), (r * r, r * r)).copy_from(&k);
    }
    Ok(linalg::null_space(&stacked)
        .into_iter()
        .map(|v| DMatrix::from_column_slice(r, r, v.as_slice()))
        .collect())
}

/// Recursively split `sub` into ad-invariant summands by eigendecomposing a
/// random metric-symmetric commutant element, until each summand has a
/// one-dimensional commutant (and so is simple).
fn split_into_ideals<R: Rng>(
    m: &MetricLieAlgebra,
    sub: &Subspace,
    rng: &mut R,
) -> Result<Vec<Subspace>> {
    let r = sub.rank();
    if r == 0 {
        return Ok(Vec::new());
    }
    let commutant = commutant_basis(m.algebra(), sub)?;
    if commutant.is_empty() {
        return Err(Error::Numerical("commutant lost the identity operator".into()));
    }
    if commutant.len() == 1 {
        return Ok(vec![sub.clone()]);
    }

    let b = sub.onb_rows();
    let gram = b * m.inner().matrix() * b.transpose();
    let chol = Cholesky::new(gram.clone())
        .ok_or_else(|| Error::Numerical("restricted metric Gram is not positive definite".into()))?;
    let l = chol.l();
    let gram_inv_t = |t: &DMatrix<f64>| chol.solve(&t.transpose());

    for _attempt in 0..MAX_SPLIT_ATTEMPTS {
        let mut t = DMatrix::zeros(r, r);
        for c in &commutant {
            let xi: f64 = rng.sample(StandardNormal);
            t += c.scale(xi);
        }
        // Metric-symmetric part ½(T + G⁻¹TᵀG) stays in the commutant when
        // the metric is biinvariant; its eigenspaces are then ideals.
        let t_sym = (&t + gram_inv_t(&t) * &gram).scale(0.5);
        // Conjugate to a Euclidean-symmetric problem: T̃ = Lᵀ·T_sym·L⁻ᵀ.
        let m1 = l.transpose() * &t_sym;
        let y = l
            .solve_lower_triangular(&m1.transpose())
            .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
        let t_tilde = y.transpose();
        let t_tilde = (&t_tilde + t_tilde.transpose()).scale(0.5);
        let eig = t_tilde.symmetric_eigen();

        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
        let max_abs = eig.eigenvalues.amax();
        let gap = CLUSTER_GAP * max_abs.max(1.0);

        let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
        for w in order.windows(2) {
            if eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]] > gap {
                clusters.push(Vec::new());
            }
            clusters.last_mut().expect("nonempty").push(w[1]);
        }
        if clusters.len() < 2 {
            continue; // degenerate draw; redraw coefficients
        }

        let lt = l.transpose();
        let mut parts = Vec::with_capacity(clusters.len());
        for cluster in &clusters {
            let gens: Vec<Vector> = cluster
                .iter()
                .map(|&idx| {
                    let q = eig.eigenvectors.column(idx).into_owned();
                    let coords = lt
                        .solve_upper_triangular(&q)
                        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
                    Ok(b.transpose() * coords)
                })
                .collect::<Result<_>>()?;
            parts.push(Subspace::span(sub.ambient_dim(), gens)?);
        }
        let mut out = Vec::new();
        for part in &parts {
            out.extend(split_into_ideals(m, part, rng)?);
        }
        return Ok(out);
    }
    Err(Error::Numerical(format!(
        "failed to split a {r}-dimensional commutant after {MAX_SPLIT_ATTEMPTS} draws"
    )))
}

/// Decompose a semisimple subalgebra into its simple ideals, ordered by the
/// first basis axis with a nonzero projection, and fit the metric-to-Killing
/// multiplier on each ideal.
pub fn simple_ideals<R: Rng>(
    m: &MetricLieAlgebra,
    semisimple: &Subspace,
    tol: f64,
    rng: &mut R,
) -> Result<SimpleIdealList> {
    if semisimple.is_zero() {
        return Ok(SimpleIdealList::default());
    }
    let closure = closure_residual(m.algebra(), semisimple)?;
    if closure > tol {
        return Err(Error::NotSemisimple(format!(
            "not closed under the bracket (residual {closure:.3e})"
        )));
    }
    let killing = restricted_killing(m.algebra(), semisimple)?;
    let svd = killing.clone().svd(false, false);
    let smin = svd.singular_values.min();
    let smax = svd.singular_values.max();
    if smin <= linalg::RANK_REL_TOL * smax.max(1.0) {
        return Err(Error::NotSemisimple(format!(
            "restricted Killing form is degenerate (singular value ratio {:.3e})",
            smin / smax.max(f64::MIN_POSITIVE)
        )));
    }

    let mut parts = split_into_ideals(m, semisimple, rng)?;
    for part in &parts {
        if !is_ideal(m.algebra(), semisimple, part, tol.max(1e-7))? {
            return Err(Error::Numerical(
                "a computed summand is not an ideal; the metric is likely not biinvariant".into(),
            ));
        }
    }
    // Deterministic order: compare projections of the basis axes onto each
    // ideal, largest-first at the first axis where they differ.
    let n = semisimple.ambient_dim();
    let key = |s: &Subspace| -> Vec<i64> {
        (0..n)
            .map(|k| {
                let mut e = DVector::zeros(n);
                e[k] = 1.0;
                (s.project(&e).norm() * 1e9).round() as i64
            })
            .collect()
    };
    parts.sort_by(|a, b| key(b).cmp(&key(a)));

    let mut ideals = Vec::with_capacity(parts.len());
    for part in parts {
        let k = restricted_killing(m.algebra(), &part)?;
        let b = part.onb_rows();
        let gram = b * m.inner().matrix() * b.transpose();
        let denom = k.dot(&k);
        let lambda = gram.dot(&k) / denom;
        let rel_res = (&gram - k.scale(lambda)).norm() / gram.norm();
        let killing_multiplier = (rel_res <= 1e-9).then_some(lambda);
        ideals.push(SimpleIdeal { subspace: part, killing_multiplier });
    }
    Ok(SimpleIdealList { ideals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::DEFAULT_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    fn diag_w(m: &MetricLieAlgebra) -> Subspace {
        let a = m.algebra();
        Subspace::span(
            6,
            vec![
                a.basis_vector(0) + a.basis_vector(3),
                a.basis_vector(1) - a.basis_vector(4),
                a.basis_vector(2) + a.basis_vector(5),
            ],
        )
        .unwrap()
    }

    #[test]
    fn twisted_diagonal_is_a_lie_triple_system() {
        let m = catalog::so3xso3(2.0).metric_algebra().unwrap();
        let w = diag_w(&m);
        assert!(lie_triple_residual(m.algebra(), &w).unwrap() <= 1e-12);
    }

    #[test]
    fn plane_in_so3_is_a_lie_triple_system() {
        let m = catalog::so3().metric_algebra().unwrap();
        let a = m.algebra();
        let w = Subspace::span(3, vec![a.basis_vector(0), a.basis_vector(1)]).unwrap();
        assert!(lie_triple_residual(a, &w).unwrap() <= 1e-14);
    }

    #[test]
    fn mixed_plane_is_not_a_lie_triple_system() {
        let m = catalog::so3xso3(1.0).metric_algebra().unwrap();
        let a = m.algebra();
        let w = Subspace::span(
            6,
            vec![a.basis_vector(0), a.basis_vector(1) + a.basis_vector(4)],
        )
        .unwrap();
        assert!(lie_triple_residual(a, &w).unwrap() > 0.4);
    }

    #[test]
    fn generated_subalgebra_of_twisted_diagonal_is_everything() {
        let m = catalog::so3xso3(2.0).metric_algebra().unwrap();
        let n = generated_subalgebra(m.algebra(), &diag_w(&m), DEFAULT_TOL).unwrap();
        assert_eq!(n.rank(), 6);
    }

    #[test]
    fn generated_subalgebra_of_a_line_is_the_line() {
        let m = catalog::so3().metric_algebra().unwrap();
        let w = Subspace::span(3, vec![m.algebra().basis_vector(0)]).unwrap();
        let n = generated_subalgebra(m.algebra(), &w, DEFAULT_TOL).unwrap();
        assert_eq!(n.rank(), 1);
    }

    #[test]
    fn generated_subalgebra_rejects_non_triple_systems() {
        let m = catalog::so3xso3(1.0).metric_algebra().unwrap();
        let a = m.algebra();
        let w = Subspace::span(
            6,
            vec![a.basis_vector(0), a.basis_vector(1) + a.basis_vector(4)],
        )
        .unwrap();
        let err = generated_subalgebra(a, &w, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotClosed(_)));
    }

    #[test]
    fn compact_split_of_so3_plus_line() {
        let m = catalog::so3_plus_r().metric_algebra().unwrap();
        let split = compact_split(&m, &Subspace::whole(4), DEFAULT_TOL).unwrap();
        assert_eq!(split.abelian_part.rank(), 1);
        assert_eq!(split.semisimple_part.rank(), 3);
        assert!(split.abelian_part.contains_vector(&m.algebra().basis_vector(3), 1e-9));
    }

    #[test]
    fn compact_split_of_abelian_algebra_is_all_center() {
        let m = catalog::euclidean(3).metric_algebra().unwrap();
        let split = compact_split(&m, &Subspace::whole(3), DEFAULT_TOL).unwrap();
        assert_eq!(split.abelian_part.rank(), 3);
        assert!(split.semisimple_part.is_zero());
    }

    #[test]
    fn compact_split_requires_biinvariance() {
        let m = catalog::heisenberg3().metric_algebra().unwrap();
        let err = compact_split(&m, &Subspace::whole(3), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotBiinvariant(_)));
    }

    #[test]
    fn compact_split_fails_on_noncentral_complement() {
        // Shrinking the metric on the center makes the Heisenberg algebra
        // pass the biinvariance gate (residual 1e-4) while its derived
        // complement still fails to be central.
        let alg = catalog::heisenberg3().algebra;
        let mut g = DMatrix::identity(3, 3);
        g[(2, 2)] = 1e-4;
        let m = MetricLieAlgebra::new(alg, crate::InnerProduct::new(g).unwrap()).unwrap();
        let err = compact_split(&m, &Subspace::whole(3), 0.05).unwrap_err();
        assert!(matches!(err, Error::SplitFailed(_)));
    }

    #[test]
    fn simple_ideals_of_so3xso3_are_the_factors() {
        let m = catalog::so3xso3(2.0).metric_algebra().unwrap();
        let list = simple_ideals(&m, &Subspace::whole(6), DEFAULT_TOL, &mut rng()).unwrap();
        assert_eq!(list.len(), 2);
        let first = Subspace::span(
            6,
            (0..3).map(|i| m.algebra().basis_vector(i)).collect(),
        )
        .unwrap();
        let second = Subspace::span(
            6,
            (3..6).map(|i| m.algebra().basis_vector(i)).collect(),
        )
        .unwrap();
        assert!(list.ideals[0].subspace.distance(&first) <= 1e-9);
        assert!(list.ideals[1].subspace.distance(&second) <= 1e-9);
        // Metric blocks I and a²I against Killing -2I per factor.
        assert!((list.ideals[0].killing_multiplier.unwrap() + 0.5).abs() <= 1e-9);
        assert!((list.ideals[1].killing_multiplier.unwrap() + 2.0).abs() <= 1e-9);
    }

    #[test]
    fn ideal_order_is_seed_independent() {
        for seed in [1u64, 7, 123456] {
            let m = catalog::so3xso3(1.3).metric_algebra().unwrap();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let list = simple_ideals(&m, &Subspace::whole(6), DEFAULT_TOL, &mut r).unwrap();
            assert_eq!(list.len(), 2);
            assert!(list.ideals[0]
                .subspace
                .contains_vector(&m.algebra().basis_vector(0), 1e-9));
        }
    }

    #[test]
    fn simple_ideals_of_so3_is_itself() {
        let m = catalog::so3().metric_algebra().unwrap();
        let list = simple_ideals(&m, &Subspace::whole(3), DEFAULT_TOL, &mut rng()).unwrap();
        assert_eq!(list.len(), 1);
        assert!((list.ideals[0].killing_multiplier.unwrap() + 0.5).abs() <= 1e-12);
    }

    #[test]
    fn simple_ideals_rejects_degenerate_killing() {
        let m = catalog::heisenberg3().metric_algebra().unwrap();
        let err = simple_ideals(&m, &Subspace::whole(3), DEFAULT_TOL, &mut rng()).unwrap_err();
        assert!(matches!(err, Error::NotSemisimple(_)));
    }

    #[test]
    fn simple_ideals_of_zero_subspace_is_empty() {
        let m = catalog::so3().metric_algebra().unwrap();
        let list = simple_ideals(&m, &Subspace::zero(3), DEFAULT_TOL, &mut rng()).unwrap();
        assert!(list.is_empty());
    }

    #[test]
    fn is_ideal_examples() {
        let h = catalog::heisenberg3().metric_algebra().unwrap();
        let z = Subspace::span(3, vec![h.algebra().basis_vector(2)]).unwrap();
        assert!(is_ideal(h.algebra(), &Subspace::whole(3), &z, DEFAULT_TOL).unwrap());

        let s = catalog::so3().metric_algebra().unwrap();
        let line = Subspace::span(3, vec![s.algebra().basis_vector(0)]).unwrap();
        assert!(!is_ideal(s.algebra(), &Subspace::whole(3), &line, DEFAULT_TOL).unwrap());

        let err = is_ideal(s.algebra(), &line, &Subspace::whole(3), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotContained(_)));
    }

    #[test]
    fn intersection_examples() {
        let m = catalog::so3xso3(1.0).metric_algebra().unwrap();
        let a = m.algebra();
        let s1 = Subspace::span(6, vec![a.basis_vector(0), a.basis_vector(1)]).unwrap();
        let s2 = Subspace::span(6, vec![a.basis_vector(1), a.basis_vector(2)]).unwrap();
        let i = subspace_intersect(&s1, &s2).unwrap();
        assert_eq!(i.rank(), 1);
        assert!(i.contains_vector(&a.basis_vector(1), 1e-9));

        let w = diag_w(&m);
        let bw = bracket_span(a, &w, &w).unwrap();
        assert!(subspace_intersect(&w, &bw).unwrap().is_zero());
    }
}
