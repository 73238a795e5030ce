//! 2-step nilpotent algebras: the center/complement splitting, the skew
//! operators J(Z) defined by ⟨J(Z)X, Y⟩ = ⟨[X,Y], Z⟩ on the complement,
//! a nonsingularity probe, the closed-form connection, and the geodesic
//! Gauss-map verdict along one-parameter subgroup directions.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::metric::MetricLieAlgebra;
use crate::structure::bracket_span;
use crate::subspace::{Subspace, Vector};

/// Skewness defect accepted for the cached J matrices.
const J_SKEW_TOL: f64 = 1e-12;

/// A metric 2-step nilpotent algebra split as center ⊕ complement, with
/// the J operators cached on the metric-orthonormal frames of both parts.
#[derive(Debug, Clone)]
pub struct NilpotentStructure {
    m: MetricLieAlgebra,
    z: Subspace,
    v: Subspace,
    z_frame: Vec<Vector>,
    v_frame: Vec<Vector>,
    /// j_cache[i] is J(z_i) in v_frame coordinates, one per center frame
    /// vector; J(z) for arbitrary central z follows by linearity.
    j_cache: Vec<DMatrix<f64>>,
    tol: f64,
}

/// Outcome of sampling the center for singular J operators.
#[derive(Debug, Clone)]
pub struct NonsingularReport {
    /// No sampled (or, for a one-dimensional center, no) direction had a
    /// singular J.
    pub nonsingular_witnessed: bool,
    /// A unit central direction with |det J| ≤ tol, when one was found.
    pub singular_z: Option<Vector>,
    /// True when the verdict rests on random sampling rather than an exact
    /// determinant, i.e. for centers of dimension at least two.
    pub probabilistic: bool,
    pub samples_used: usize,
}

/// Pointwise Gauss-map verdict along a geodesic direction. `harmonic` and
/// `one_parameter` always agree: the Gauss map of the geodesic through the
/// identity is harmonic exactly when the geodesic is a one-parameter
/// subgroup, which happens exactly when J(Z')X' vanishes.
#[derive(Debug, Clone)]
pub struct GeodesicVerdict {
    /// Complement part of the unit tangent.
    pub x_part: Vector,
    /// Central part of the unit tangent.
    pub z_part: Vector,
    /// |J(Z')X'| for the unit tangent X' + Z'.
    pub jzx_norm: f64,
    /// Norm of the component of J(Z')²X' orthogonal to the unit tangent.
    pub residual_norm: f64,
    pub harmonic: bool,
    pub one_parameter: bool,
    pub tol: f64,
}

impl NilpotentStructure {
    /// Validates 2-step nilpotency: the derived algebra is nonzero, central
    /// within `tol`, and brackets back to zero within `tol`. The complement
    /// is the metric-orthogonal complement of the center.
    pub fn new(m: MetricLieAlgebra, tol: f64) -> Result<Self> {
        let alg = m.algebra();
        let whole = Subspace::whole(m.dim());
        let derived = bracket_span(alg, &whole, &whole)?;
        if derived.is_zero() {
            return Err(Error::NotTwoStep("the derived algebra is zero".into()));
        }
        let z = alg.center();
        let mut central_defect: f64 = 0.0;
        let mut second_defect: f64 = 0.0;
        for d in derived.onb_vectors() {
            central_defect = central_defect.max(z.residual(&d));
            for a in 0..m.dim() {
                let e = alg.basis_vector(a);
                second_defect = second_defect.max(alg.bracket(&d, &e)?.norm());
            }
        }
        if second_defect > tol {
            return Err(Error::NotTwoStep(format!(
                "the derived algebra is not central: bracket residual {second_defect:.3e}"
            )));
        }
        if central_defect > tol {
            return Err(Error::NotTwoStep(format!(
                "the derived algebra leaves the center: residual {central_defect:.3e}"
            )));
        }
        let v = m.orthogonal_complement(&z, None)?;
        let z_frame = m.metric_onb(&z)?;
        let v_frame = v.generators().to_vec();
        let mut j_cache = Vec::with_capacity(z_frame.len());
        for zi in &z_frame {
            let d = v_frame.len();
            let mut jm = DMatrix::zeros(d, d);
            for q in 0..d {
                for p in 0..d {
                    jm[(p, q)] = m.inner().pairing(&alg.bracket(&v_frame[q], &v_frame[p])?, zi);
                }
            }
            let skew = if jm.is_empty() { 0.0 } else { (&jm + jm.transpose()).amax() };
            if skew > J_SKEW_TOL {
                return Err(Error::Numerical(format!(
                    "J operator is not skew: defect {skew:.3e}"
                )));
            }
            j_cache.push(jm);
        }
        Ok(NilpotentStructure { m, z, v, z_frame, v_frame, j_cache, tol })
    }

    pub fn metric_algebra(&self) -> &MetricLieAlgebra {
        &self.m
    }

    pub fn center(&self) -> &Subspace {
        &self.z
    }

    pub fn complement(&self) -> &Subspace {
        &self.v
    }

    /// J(z) in the coordinates of the complement frame.
    pub fn j_operator(&self, z: &Vector) -> Result<DMatrix<f64>> {
        let res = self.z.residual(z);
        if res > self.tol {
            return Err(Error::NotCentral(res));
        }
        let d = self.v_frame.len();
        let mut jm = DMatrix::zeros(d, d);
        for (i, zi) in self.z_frame.iter().enumerate() {
            jm += self.j_cache[i].scale(self.m.inner().pairing(z, zi));
        }
        Ok(jm)
    }

    /// J(z) applied to the complement part of `w`, as an ambient vector.
    pub fn apply_j(&self, z: &Vector, w: &Vector) -> Result<Vector> {
        let jm = self.j_operator(z)?;
        let coords = Vector::from_iterator(
            self.v_frame.len(),
            self.v_frame.iter().map(|f| self.m.inner().pairing(w, f)),
        );
        let out_coords = jm * coords;
        let mut out = Vector::zeros(self.m.dim());
        for (p, f) in self.v_frame.iter().enumerate() {
            out += f.scale(out_coords[p]);
        }
        Ok(out)
    }

    /// Closed-form connection of a 2-step algebra:
    /// ∇_X Y = ½[X, Y] on the complement, ∇_X Z = ∇_Z X = −½J(Z)X across,
    /// and zero on the center, extended bilinearly.
    pub fn connection(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let xv = self.m.project_onto_frame(&self.v_frame, x);
        let xz = self.m.project_onto_frame(&self.z_frame, x);
        let yv = self.m.project_onto_frame(&self.v_frame, y);
        let yz = self.m.project_onto_frame(&self.z_frame, y);
        let mut out = self.m.algebra().bracket(&xv, &yv)?.scale(0.5);
        out -= self.apply_j(&yz, &xv)?.scale(0.5);
        out -= self.apply_j(&xz, &yv)?.scale(0.5);
        Ok(out)
    }

    /// Search the center for a direction with singular J. A one-dimensional
    /// center is decided exactly through one determinant; otherwise `samples`
    /// seeded unit directions are tried and a clean outcome is probabilistic.
    pub fn nonsingular_probe(&self, samples: usize, seed: u64) -> Result<NonsingularReport> {
        if samples == 0 {
            return Err(Error::DimensionMismatch("sample count must be positive".into()));
        }
        if self.z_frame.len() == 1 {
            let det = self.j_cache[0].clone().determinant();
            let singular = det.abs() <= self.tol;
            return Ok(NonsingularReport {
                nonsingular_witnessed: !singular,
                singular_z: singular.then(|| self.z_frame[0].clone()),
                probabilistic: false,
                samples_used: 1,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for used in 1..=samples {
            let mut coords = Vector::zeros(self.z_frame.len());
            loop {
                for c in coords.iter_mut() {
                    *c = StandardNormal.sample(&mut rng);
                }
                if coords.norm() > 1e-6 {
                    break;
                }
            }
            coords.unscale_mut(coords.norm());
            let mut z = Vector::zeros(self.m.dim());
            for (i, f) in self.z_frame.iter().enumerate() {
                z += f.scale(coords[i]);
            }
            let det = self.j_operator(&z)?.determinant();
            if det.abs() <= self.tol {
                return Ok(NonsingularReport {
                    nonsingular_witnessed: false,
                    singular_z: Some(z),
                    probabilistic: false,
                    samples_used: used,
                });
            }
        }
        Ok(NonsingularReport {
            nonsingular_witnessed: true,
            singular_z: None,
            probabilistic: true,
            samples_used: samples,
        })
    }

    /// Gauss-map verdict for the geodesic through the identity in direction
    /// `v`: with unit tangent X' + Z', the map is harmonic iff J(Z')X' = 0,
    /// iff the geodesic is a one-parameter subgroup. The residual is the
    /// component of J(Z')²X' orthogonal to the unit tangent.
    pub fn geodesic_verdict(&self, v: &Vector) -> Result<GeodesicVerdict> {
        if v.len() != self.m.dim() {
            return Err(Error::DimensionMismatch(format!(
                "direction length {} in dimension {}",
                v.len(),
                self.m.dim()
            )));
        }
        let norm = self.m.inner().norm(v);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let y1 = v.unscale(norm);
        let x_part = self.m.project_onto_frame(&self.v_frame, &y1);
        let z_part = self.m.project_onto_frame(&self.z_frame, &y1);
        let jzx = self.apply_j(&z_part, &x_part)?;
        let jzx_norm = self.m.inner().norm(&jzx);
        let jj = self.apply_j(&z_part, &jzx)?;
        let residual = &jj - y1.scale(self.m.inner().pairing(&jj, &y1));
        let residual_norm = self.m.inner().norm(&residual);
        let harmonic = jzx_norm <= self.tol;
        Ok(GeodesicVerdict {
            x_part,
            z_part,
            jzx_norm,
            residual_norm,
            harmonic,
            one_parameter: harmonic,
            tol: self.tol,
        })
    }
}
