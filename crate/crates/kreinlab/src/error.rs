use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is singular (rcond below {rcond:e})")]
    Singular { rcond: f64 },
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("operator is not invertible: {0}")]
    NotInvertible(String),
    #[error("rank-deficient channel map Pi")]
    RankDeficient,
    #[error("spectral parameter z = {z} lies too close to the spectrum of A0")]
    AtSpectrum { z: num_complex::Complex64 },
    #[error("beta0 + beta1 M(z) is numerically singular at z = {z}")]
    SingularBoundaryOperator { z: num_complex::Complex64 },
    #[error("Krein resolvent is numerically singular at sample z = {z}")]
    ResolventSingular { z: num_complex::Complex64 },
    #[error("need at least {needed} certification samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("Lambda is numerically singular")]
    SingularLambda,
    #[error("Pi* B Pi is numerically singular")]
    SingularPiBPi,
    #[error("M(z) + iI is numerically singular at z = {z}")]
    SingularShift { z: num_complex::Complex64 },
    #[error("resolvent pencil is numerically singular at z = {z}")]
    SingularPencil { z: num_complex::Complex64 },
    #[error("z = {z} lies on the branch cut [1, inf)")]
    OnBranchCut { z: num_complex::Complex64 },
    #[error("radius must be strictly positive, got {r}")]
    NonpositiveRadius { r: f64 },
    #[error("evaluation point coincides with a center or with the source point")]
    CoincidentPoints,
    #[error("coupling matrices must be real symmetric for a real-axis root scan")]
    NonRealCoupling,
    #[error("z = {z} is not a root of the secular function (sigma_min = {sigma_min:e})")]
    NotARoot {
        z: num_complex::Complex64,
        sigma_min: f64,
    },
    #[error("non-finite sample while scanning for brackets")]
    NonFiniteSample,
    #[error("bracket lost: function not finite inside the interval")]
    LostBracket,
    #[error("|f| vanishes on the contour; shrink or move the rectangle")]
    ZeroOnContour,
    #[error("phase tracking did not converge within the refinement budget")]
    NoPhaseConvergence,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
