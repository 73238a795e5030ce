//! Harmonicity of the Gauss map, decided through pointwise residual
//! criteria on an orthonormal frame adapted to the submanifold.
//!
//! All criteria produce an n×q residual matrix indexed by (tangent frame
//! vector, normal frame vector); the Gauss map condition holds at the point
//! iff every entry vanishes. The general criterion works for any
//! left-invariant metric; specialized forms assume a totally geodesic
//! submanifold, a biinvariant metric, or both.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::metric::{InnerProduct, MetricLieAlgebra};
use crate::structure::{
    bracket_span, compact_split, generated_subalgebra, lie_triple_residual, simple_ideals,
    subspace_intersect, CompactSplit, SimpleIdealList,
};
use crate::subspace::{Subspace, Vector};

/// Orthonormality defect accepted for a supplied frame.
pub const FRAME_TOL: f64 = 1e-9;

/// Symmetry defect accepted for the second fundamental form.
pub const SECOND_FORM_SYMMETRY_TOL: f64 = 1e-12;

/// Doublings of the witness scale attempted when the residual degenerates.
const WITNESS_RETRIES: usize = 5;

/// Which residual criterion produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Full criterion for any left-invariant metric and immersion data.
    General,
    /// Totally geodesic submanifold (second form and mean curvature zero).
    TotallyGeodesic,
    /// Immersion data under a biinvariant metric.
    Biinvariant,
    /// Normal-bracket form, biinvariant and totally geodesic.
    NormalForm,
    /// Tangent-bracket form, biinvariant and totally geodesic.
    TangentForm,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::General => "general",
            Criterion::TotallyGeodesic => "totally_geodesic",
            Criterion::Biinvariant => "biinvariant",
            Criterion::NormalForm => "normal_form",
            Criterion::TangentForm => "tangent_form",
        }
    }
}

/// Residual matrix of one criterion, with the verdict at tolerance `tol`.
#[derive(Debug, Clone)]
pub struct HarmonicityReport {
    pub criterion: Criterion,
    /// Entry (j, α): residual against tangent frame j, normal frame α.
    pub residual: DMatrix<f64>,
    pub max_abs: f64,
    pub harmonic: bool,
    pub tol: f64,
    /// True when the normal derivative of the mean curvature was not
    /// supplied and defaulted to zero.
    pub dh_defaulted: bool,
}

impl HarmonicityReport {
    fn new(criterion: Criterion, residual: DMatrix<f64>, tol: f64, dh_defaulted: bool) -> Self {
        let max_abs = if residual.is_empty() { 0.0 } else { residual.amax() };
        HarmonicityReport {
            criterion,
            residual,
            max_abs,
            harmonic: max_abs <= tol,
            tol,
            dh_defaulted,
        }
    }
}

/// Pointwise data of an immersed submanifold: adapted orthonormal frames,
/// the second fundamental form b, and the frame derivative dH of the mean
/// curvature in normal directions.
#[derive(Debug, Clone)]
pub struct ImmersionPointData {
    tangent_frame: Vec<Vector>,
    normal_frame: Vec<Vector>,
    /// b[γ] is the n×n symmetric matrix ⟨B(Y_i, Y_j), Y_γ⟩.
    b: Vec<DMatrix<f64>>,
    /// dh[(j, γ)] = ⟨∇_{Y_j}(nH), Y_γ⟩, zero when not supplied.
    dh: DMatrix<f64>,
    dh_defaulted: bool,
}

impl ImmersionPointData {
    /// Validates frame lengths, orthonormality of the combined frame for the
    /// metric of `m`, and symmetry of the second fundamental form.
    pub fn new(
        m: &MetricLieAlgebra,
        tangent_frame: Vec<Vector>,
        normal_frame: Vec<Vector>,
        b: Vec<DMatrix<f64>>,
        dh: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = tangent_frame.len();
        let q = normal_frame.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("tangent frame is empty".into()));
        }
        if n + q != m.dim() {
            return Err(Error::DimensionMismatch(format!(
                "frame sizes {n}+{q} do not fill dimension {}",
                m.dim()
            )));
        }
        for v in tangent_frame.iter().chain(normal_frame.iter()) {
            if v.len() != m.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "frame vector length {} in dimension {}",
                    v.len(),
                    m.dim()
                )));
            }
        }
        let combined: Vec<&Vector> = tangent_frame.iter().chain(normal_frame.iter()).collect();
        let mut defect: f64 = 0.0;
        for (r, u) in combined.iter().enumerate() {
            for (c, v) in combined.iter().enumerate() {
                let want = if r == c { 1.0 } else { 0.0 };
                defect = defect.max((m.inner().pairing(u, v) - want).abs());
            }
        }
        if defect > FRAME_TOL {
            return Err(Error::FrameNotOrthonormal(defect));
        }
        if b.len() != q {
            return Err(Error::DimensionMismatch(format!(
                "{} second-form slices for codimension {q}",
                b.len()
            )));
        }
        for slice in &b {
            if slice.nrows() != n || slice.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "second-form slice is {}x{}, expected {n}x{n}",
                    slice.nrows(),
                    slice.ncols()
                )));
            }
            let asym = if slice.is_empty() { 0.0 } else { (slice - slice.transpose()).amax() };
            if asym > SECOND_FORM_SYMMETRY_TOL {
                return Err(Error::SecondFormAsymmetric(asym));
            }
        }
        let (dh, dh_defaulted) = match dh {
            Some(d) => {
                if d.nrows() != n || d.ncols() != q {
                    return Err(Error::DimensionMismatch(format!(
                        "mean-curvature derivative is {}x{}, expected {n}x{q}",
                        d.nrows(),
                        d.ncols()
                    )));
                }
                (d, false)
            }
            None => (DMatrix::zeros(n, q), true),
        };
        Ok(ImmersionPointData { tangent_frame, normal_frame, b, dh, dh_defaulted })
    }

    /// Totally geodesic data over a tangent subspace: frames come from
    /// Gram-Schmidt on the generators and the metric complement, and both b
    /// and dH vanish identically. Dependent generators are rejected so that
    /// reported frames stay in one-to-one correspondence with the input.
    pub fn totally_geodesic(m: &MetricLieAlgebra, tangent: &Subspace) -> Result<Self> {
        if tangent.is_zero() {
            return Err(Error::DimensionMismatch("tangent subspace is zero".into()));
        }
        let tangent_frame = m.orthonormalize(tangent.generators())?;
        let normal_frame = m.orthogonal_complement(tangent, None)?.generators().to_vec();
        let n = tangent_frame.len();
        let q = normal_frame.len();
        Ok(ImmersionPointData {
            tangent_frame,
            normal_frame,
            b: vec![DMatrix::zeros(n, n); q],
            dh: DMatrix::zeros(n, q),
            dh_defaulted: false,
        })
    }

    pub fn n(&self) -> usize {
        self.tangent_frame.len()
    }

    pub fn q(&self) -> usize {
        self.normal_frame.len()
    }

    pub fn tangent_frame(&self) -> &[Vector] {
        &self.tangent_frame
    }

    pub fn normal_frame(&self) -> &[Vector] {
        &self.normal_frame
    }

    pub fn dh_defaulted(&self) -> bool {
        self.dh_defaulted
    }

    /// nH = Σ_i B(Y_i, Y_i) as an ambient vector.
    pub fn mean_curvature_vector(&self) -> Vector {
        let dim = self.tangent_frame[0].len();
        let mut nh = Vector::zeros(dim);
        for (gamma, slice) in self.b.iter().enumerate() {
            nh += self.normal_frame[gamma].scale(slice.trace());
        }
        nh
    }
}

/// Precomputed connection table over the combined frame.
struct FrameTable<'a> {
    m: &'a MetricLieAlgebra,
    tangent: &'a [Vector],
    normal: &'a [Vector],
    /// conn[a][b] = ∇_{F_a} F_b over the combined frame, tangent first.
    conn: Vec<Vec<Vector>>,
}

impl<'a> FrameTable<'a> {
    fn new(m: &'a MetricLieAlgebra, tangent: &'a [Vector], normal: &'a [Vector]) -> Result<Self> {
        let all: Vec<&Vector> = tangent.iter().chain(normal.iter()).collect();
        let mut conn = Vec::with_capacity(all.len());
        for x in &all {
            let mut row = Vec::with_capacity(all.len());
            for y in &all {
                row.push(m.connection(x, y)?);
            }
            conn.push(row);
        }
        Ok(FrameTable { m, tangent, normal, conn })
    }

    fn tangent_part(&self, v: &Vector) -> Vector {
        self.m.project_onto_frame(self.tangent, v)
    }

    fn normal_part(&self, v: &Vector) -> Vector {
        self.m.project_onto_frame(self.normal, v)
    }
}

/// General pointwise criterion for any left-invariant metric.
///
/// Entry (j, α) sums seven terms: the curvature trace, the correction by
/// ∇_{Y_i}Y_i, the mean-curvature transport ⟨∇_{nH}Y_j, Y_α⟩ − dH[j][α],
/// two second-form couplings, and the split ⟨∇Y_j, ∇Y_α⟩ products over
/// tangent and normal parts.
pub fn residual_general(
    m: &MetricLieAlgebra,
    data: &ImmersionPointData,
    tol: f64,
) -> Result<HarmonicityReport> {
    let n = data.n();
    let q = data.q();
    let t = FrameTable::new(m, &data.tangent_frame, &data.normal_frame)?;
    let nh = data.mean_curvature_vector();
    let mut residual = DMatrix::zeros(n, q);
    for j in 0..n {
        let conn_nh_yj = m.connection(&nh, &data.tangent_frame[j])?;
        for alpha in 0..q
        {
            let y_alpha = &data.normal_frame[alpha];
            let mut r = 0.0;
            // Curvature trace Σ_i ⟨R(Y_j, Y_i)Y_i, Y_α⟩.
            for i in 0..n {
                let rc = m.curvature(&data.tangent_frame[j], &data.tangent_frame[i], &data.tangent_frame[i])?;
                r += m.inner().pairing(&rc, y_alpha);
            }
            // -Σ_i ⟨∇_{∇_{Y_i}Y_i} Y_j, Y_α⟩.
            for i in 0..n {
                let inner = m.connection(&t.conn[i][i], &data.tangent_frame[j])?;
                r -= m.inner().pairing(&inner, y_alpha);
            }
            // ⟨∇_{nH}Y_j, Y_α⟩ - dH[j][α].
            r += m.inner().pairing(&conn_nh_yj, y_alpha) - data.dh[(j, alpha)];
            // 2 Σ_{i,k} b[i][k][α] ⟨∇_{Y_i}Y_k, Y_j⟩.
            for i in 0..n {
                for k in 0..n {
                    r += 2.0
                        * data.b[alpha][(i, k)]
                        * m.inner().pairing(&t.conn[i][k], &data.tangent_frame[j]);
                }
            }
            // 2 Σ_{i,γ} b[i][j][γ] ⟨∇_{Y_i}Y_γ, Y_α⟩.
            for i in 0..n {
                for gamma in 0..q {
                    r += 2.0
                        * data.b[gamma][(i, j)]
                        * m.inner().pairing(&t.conn[i][n + gamma], y_alpha);
                }
            }
            // Σ_i (⟨(∇_{Y_i}Y_α)^⊥, (∇_{Y_i}Y_j)^⊥⟩ - ⟨(∇_{Y_i}Y_α)^T, (∇_{Y_i}Y_j)^T⟩).
            for i in 0..n {
                let dj = &t.conn[i][j];
                let da = &t.conn[i][n + alpha];
                r += m.inner().pairing(&t.normal_part(dj), &t.normal_part(da));
                r -= m.inner().pairing(&t.tangent_part(dj), &t.tangent_part(da));
            }
            residual[(j, alpha)] = r;
        }
    }
    Ok(HarmonicityReport::new(Criterion::General, residual, tol, data.dh_defaulted))
}

/// Criterion for a totally geodesic submanifold given only its tangent
/// space; frames are built deterministically from the generators.
pub fn residual_totally_geodesic(
    m: &MetricLieAlgebra,
    tangent: &Subspace,
    tol: f64,
) -> Result<HarmonicityReport> {
    let data = ImmersionPointData::totally_geodesic(m, tangent)?;
    let n = data.n();
    let q = data.q();
    let t = FrameTable::new(m, &data.tangent_frame, &data.normal_frame)?;
    let alg = m.algebra();
    let mut residual = DMatrix::zeros(n, q);
    for j in 0..n {
        let yj = &data.tangent_frame[j];
        let mut vec_j = Vector::zeros(m.dim());
        for i in 0..n {
            let yi = &data.tangent_frame[i];
            vec_j += alg.bracket(yj, &t.conn[i][i])?;
            vec_j += alg.bracket(yi, &alg.bracket(yj, yi)?)?;
            let arg = t.tangent_part(&alg.bracket(yi, yj)?) - t.normal_part(&t.conn[j][i]);
            vec_j += m.connection(yi, &arg)?.scale(2.0);
        }
        for alpha in 0..q {
            residual[(j, alpha)] = m.inner().pairing(&vec_j, &data.normal_frame[alpha]);
        }
    }
    Ok(HarmonicityReport::new(Criterion::TotallyGeodesic, residual, tol, false))
}

/// Criterion under a biinvariant metric, for arbitrary immersion data.
pub fn residual_biinvariant(
    m: &MetricLieAlgebra,
    data: &ImmersionPointData,
    tol: f64,
) -> Result<HarmonicityReport> {
    let biinv = m.biinvariance_residual();
    if biinv > tol {
        return Err(Error::NotBiinvariant(biinv));
    }
    let n = data.n();
    let q = data.q();
    let t = FrameTable::new(m, &data.tangent_frame, &data.normal_frame)?;
    let alg = m.algebra();
    let nh = data.mean_curvature_vector();
    let mut residual = DMatrix::zeros(n, q);
    for j in 0..n {
        let yj = &data.tangent_frame[j];
        let conn_nh_yj = m.connection(&nh, yj)?;
        for alpha in 0..q {
            let y_alpha = &data.normal_frame[alpha];
            let mut r = m.inner().pairing(&conn_nh_yj, y_alpha) - data.dh[(j, alpha)];
            for i in 0..n {
                let yi = &data.tangent_frame[i];
                for gamma in 0..q {
                    let big = alg.bracket(yi, &data.normal_frame[gamma])?;
                    r += data.b[gamma][(i, j)] * m.inner().pairing(&big, y_alpha);
                }
                let bij = alg.bracket(yi, yj)?;
                let bia = alg.bracket(yi, y_alpha)?;
                r += 0.5 * m.inner().pairing(&t.normal_part(&bij), &t.normal_part(&bia));
            }
            residual[(j, alpha)] = r;
        }
    }
    Ok(HarmonicityReport::new(Criterion::Biinvariant, residual, tol, data.dh_defaulted))
}

/// Both bracket forms of the criterion for a totally geodesic submanifold
/// under a biinvariant metric; the tangent subspace must be a Lie triple
/// system. Returns (normal form, tangent form); for such inputs the two
/// matrices are negatives of each other.
pub fn residual_biinvariant_tg(
    m: &MetricLieAlgebra,
    tangent: &Subspace,
    tol: f64,
) -> Result<(HarmonicityReport, HarmonicityReport)> {
    let biinv = m.biinvariance_residual();
    if biinv > tol {
        return Err(Error::NotBiinvariant(biinv));
    }
    let lts = lie_triple_residual(m.algebra(), tangent)?;
    if lts > tol {
        return Err(Error::NotLieTriple(lts));
    }
    let data = ImmersionPointData::totally_geodesic(m, tangent)?;
    let n = data.n();
    let q = data.q();
    let t = FrameTable::new(m, &data.tangent_frame, &data.normal_frame)?;
    let alg = m.algebra();
    let mut normal = DMatrix::zeros(n, q);
    let mut tangential = DMatrix::zeros(n, q);
    for j in 0..n {
        for alpha in 0..q {
            let mut rn = 0.0;
            let mut rt = 0.0;
            for i in 0..n {
                let bij = alg.bracket(&data.tangent_frame[i], &data.tangent_frame[j])?;
                let bia = alg.bracket(&data.tangent_frame[i], &data.normal_frame[alpha])?;
                rn += m.inner().pairing(&t.normal_part(&bij), &t.normal_part(&bia));
                rt += m.inner().pairing(&t.tangent_part(&bij), &t.tangent_part(&bia));
            }
            normal[(j, alpha)] = rn;
            tangential[(j, alpha)] = rt;
        }
    }
    Ok((
        HarmonicityReport::new(Criterion::NormalForm, normal, tol, false),
        HarmonicityReport::new(Criterion::TangentForm, tangential, tol, false),
    ))
}

/// Classification of a totally geodesic submanifold's Gauss map across all
/// biinvariant metrics, via the structure of the subalgebra generated by
/// its tangent space.
#[derive(Debug, Clone)]
pub struct HarmonicityClassification {
    pub tangent: Subspace,
    /// Subalgebra generated by the tangent space.
    pub generated: Subspace,
    /// Center ⊕ derived splitting of the generated subalgebra.
    pub split: CompactSplit,
    /// Metric projection of the tangent space onto the semisimple part.
    pub projected_tangent: Subspace,
    /// Part of the projected tangent that meets its own bracket span.
    pub tangent_ideal: Subspace,
    /// Orthogonal complement of the tangent ideal in the semisimple part.
    pub reduced_semisimple: Subspace,
    pub ideals: SimpleIdealList,
    /// Intersection of the projected tangent with the reduced part.
    pub reduced_tangent: Subspace,
    /// Metric projections of the reduced tangent onto each simple ideal.
    pub ideal_projections: Vec<Subspace>,
    /// The metric restricted to the reduced part is a single negative
    /// multiple of the Killing form (sufficient for harmonicity here).
    pub killing_proportional: bool,
    /// Every ideal projection meets its own bracket span trivially: the
    /// Gauss map is harmonic for every biinvariant metric.
    pub harmonic_for_all_biinvariant: bool,
    /// Negation of the above: some biinvariant metric makes it non-harmonic.
    pub nonharmonic_metric_exists: bool,
    /// First ideal whose projection witnesses the failure.
    pub witness_ideal: Option<usize>,
}

/// Metric projection of `s` onto the span of a metric-orthonormal frame.
fn metric_project_subspace(
    m: &MetricLieAlgebra,
    frame: &[Vector],
    s: &Subspace,
) -> Result<Subspace> {
    let gens = s
        .onb_vectors()
        .iter()
        .map(|v| m.project_onto_frame(frame, v))
        .collect();
    Subspace::span(m.dim(), gens)
}

/// Classify a Lie-triple-system tangent space under a biinvariant metric.
pub fn classify_harmonicity<R: Rng>(
    m: &MetricLieAlgebra,
    tangent: &Subspace,
    tol: f64,
    rng: &mut R,
) -> Result<HarmonicityClassification> {
    if tangent.is_zero() {
        return Err(Error::DimensionMismatch("tangent subspace is zero".into()));
    }
    let biinv = m.biinvariance_residual();
    if biinv > tol {
        return Err(Error::NotBiinvariant(biinv));
    }
    let lts = lie_triple_residual(m.algebra(), tangent)?;
    if lts > tol {
        return Err(Error::NotLieTriple(lts));
    }
    let generated = generated_subalgebra(m.algebra(), tangent, tol)?;
    let split = compact_split(m, &generated, tol)?;

    let semi_frame = m.metric_onb(&split.semisimple_part)?;
    let projected_tangent = metric_project_subspace(m, &semi_frame, tangent)?;
    let bracket = bracket_span(m.algebra(), &projected_tangent, &projected_tangent)?;
    let tangent_ideal = subspace_intersect(&projected_tangent, &bracket)?;
    let reduced_semisimple =
        m.orthogonal_complement(&tangent_ideal, Some(&split.semisimple_part))?;
    let ideals = simple_ideals(m, &reduced_semisimple, tol, rng)?;
    let reduced_tangent = subspace_intersect(&projected_tangent, &reduced_semisimple)?;

    let mut ideal_projections = Vec::with_capacity(ideals.len());
    let mut witness_ideal = None;
    for (l, ideal) in ideals.ideals.iter().enumerate() {
        let frame = m.metric_onb(&ideal.subspace)?;
        let p = metric_project_subspace(m, &frame, &reduced_tangent)?;
        let pb = bracket_span(m.algebra(), &p, &p)?;
        if witness_ideal.is_none() && !subspace_intersect(&p, &pb)?.is_zero() {
            witness_ideal = Some(l);
        }
        ideal_projections.push(p);
    }

    let killing_proportional = reduced_semisimple.is_zero() || {
        let multipliers: Option<Vec<f64>> =
            ideals.ideals.iter().map(|i| i.killing_multiplier).collect();
        match multipliers {
            Some(ls) => {
                let max = ls.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
                let spread = ls.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                    - ls.iter().fold(f64::INFINITY, |a, &b| a.min(b));
                spread <= tol * max.max(1.0)
            }
            None => false,
        }
    };
    let harmonic_for_all_biinvariant = reduced_semisimple.is_zero() || witness_ideal.is_none();

    Ok(HarmonicityClassification {
        tangent: tangent.clone(),
        generated,
        split,
        projected_tangent,
        tangent_ideal,
        reduced_semisimple,
        ideals,
        reduced_tangent,
        ideal_projections,
        killing_proportional,
        harmonic_for_all_biinvariant,
        nonharmonic_metric_exists: !harmonic_for_all_biinvariant,
        witness_ideal,
    })
}

/// Construct a biinvariant metric that makes the classified tangent space
/// non-harmonic, by rescaling the witness ideal's Killing block by an extra
/// factor 1+λ² while resetting the other ideals to their negative Killing
/// forms. If the residual under the new metric degenerately vanishes, the
/// scale is doubled up to five times before giving up.
pub fn witness_metric(
    m: &MetricLieAlgebra,
    cls: &HarmonicityClassification,
    lambda: f64,
    tol: f64,
) -> Result<InnerProduct> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    if !cls.nonharmonic_metric_exists {
        return Err(Error::NoWitness);
    }
    let l0 = cls.witness_ideal.expect("witness index set when a witness exists");
    let dim = m.dim();
    let alg = m.algebra();

    let complement = m.orthogonal_complement(&cls.reduced_semisimple, None)?;
    let mut comp_gram = DMatrix::zeros(dim, dim);
    for c in complement.generators() {
        // Generators are metric-orthonormal, so P v = Σ ⟨v,c⟩c and the
        // pulled-back form is Σ (gc)(gc)ᵀ.
        let gc = m.inner().matrix() * c;
        comp_gram += &gc * gc.transpose();
    }

    // Per-ideal pulled-back Killing forms M_l[a][b] = tr(ad P_l e_a ∘ ad P_l e_b).
    let mut killing_pullbacks = Vec::with_capacity(cls.ideals.len());
    for ideal in &cls.ideals.ideals {
        let s = &ideal.subspace;
        let frame = m.metric_onb(s)?;
        let onb = s.onb_rows();
        let mut restricted = Vec::with_capacity(dim);
        for a in 0..dim {
            let mut e = Vector::zeros(dim);
            e[a] = 1.0;
            let p = m.project_onto_frame(&frame, &e);
            restricted.push(onb * alg.ad_matrix(&p)? * onb.transpose());
        }
        let mut mk = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in a..dim {
                let t = (&restricted[a] * &restricted[b]).trace();
                mk[(a, b)] = t;
                mk[(b, a)] = t;
            }
        }
        killing_pullbacks.push(mk);
    }

    let mut scale = lambda;
    for _retry in 0..=WITNESS_RETRIES {
        let mut g = comp_gram.clone();
        for (l, mk) in killing_pullbacks.iter().enumerate() {
            g -= mk;
            if l == l0 {
                g -= mk.scale(scale * scale);
            }
        }
        let ip = InnerProduct::new(g)?;
        let m2 = MetricLieAlgebra::new(alg.clone(), ip.clone())?;
        let biinv = m2.biinvariance_residual();
        if biinv > tol {
            return Err(Error::Numerical(format!(
                "witness metric failed biinvariance (residual {biinv:.3e}); \
                 the reduced semisimple part is not an ideal of the ambient algebra"
            )));
        }
        let (normal_form, _) = residual_biinvariant_tg(&m2, &cls.tangent, tol)?;
        if normal_form.max_abs > tol {
            return Ok(ip);
        }
        scale *= 2.0;
    }
    Err(Error::DegenerateLambda(scale, WITNESS_RETRIES))
}
