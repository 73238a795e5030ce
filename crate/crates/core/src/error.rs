/// Errors for all analysis operations.
///
/// Variants split into two groups for callers that map them to process
/// exit codes: everything except [`Error::Numerical`] is a precondition
/// violation (bad input), while `Numerical` signals an internal failure
/// of an algorithm that should have succeeded on valid input.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("structure constants are not antisymmetric: max correction {0:.3e} exceeds 1e-12")]
    NotAntisymmetric(f64),

    #[error("matrix is not symmetric: max asymmetry {0:.3e}")]
    NotSymmetric(f64),

    #[error("matrix is not positive definite: smallest eigenvalue {0:.3e}")]
    NotPositiveDefinite(f64),

    #[error("vectors are numerically rank deficient (vector {0} dependent on its predecessors)")]
    RankDeficient(usize),

    #[error("subspace is not contained in the ambient subspace: residual {0:.3e}")]
    NotContained(f64),

    #[error("subspace is not closed under the bracket: residual {0:.3e}")]
    NotClosed(f64),

    #[error("subspace is not a subalgebra: residual {0:.3e}")]
    NotSubalgebra(f64),

    #[error("metric is not biinvariant: residual {0:.3e}")]
    NotBiinvariant(f64),

    #[error("abelian factor of the split is not central: residual {0:.3e}")]
    SplitFailed(f64),

    #[error("subspace is not semisimple: {0}")]
    NotSemisimple(String),

    #[error("subspace is not a Lie triple system: residual {0:.3e}")]
    NotLieTriple(f64),

    #[error("combined frame is not orthonormal for the metric: max deviation {0:.3e}")]
    FrameNotOrthonormal(f64),

    #[error("second fundamental form is not symmetric in its first two indices: {0:.3e}")]
    SecondFormAsymmetric(f64),

    #[error("no witness metric: the tangent subspace is harmonic for every biinvariant metric")]
    NoWitness,

    #[error("witness scale must be nonzero")]
    ZeroLambda,

    #[error("witness residual degenerately vanished for scale {0} after {1} doublings")]
    DegenerateLambda(f64, usize),

    #[error("algebra is not two-step nilpotent: {0}")]
    NotTwoStep(String),

    #[error("vector is not central: residual {0:.3e}")]
    NotCentral(f64),

    #[error("direction vector is zero")]
    ZeroVector,

    #[error("internal numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for bad-input errors; false for internal numerical failures.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
