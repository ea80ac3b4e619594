use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(String, String),
    #[error("graph is disconnected; components: {0:?}")]
    Disconnected(Vec<Vec<String>>),
    #[error("edge {{{0}, {1}}} has non-positive length {2}")]
    NonPositiveLength(String, String, i64),
    #[error("edge references unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{0}` listed twice")]
    DuplicateVertex(String),
    #[error("graph has no edges")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("matrix is not square or has wrong size (expected {expected}x{expected})")]
    Shape { expected: usize },
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("phase constant must be \"0\" or \"pi\", got `{0}`")]
    BadPhaseConstant(String),
    #[error("expected {expected} phase channels, got {got}")]
    ChannelCount { expected: usize, got: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("Kramers symmetry violated at k = {k}: |Γ(-k) - Γ(k)*| = {norm:e}")]
    KramersViolation { k: f64, norm: f64 },
    #[error("at least 8 samples required, got {0}")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoopError {
    #[error("vertex `{vertex}` has degree {expected} but its family has {got} channels")]
    DegreeMismatch {
        vertex: String,
        expected: usize,
        got: usize,
    },
    #[error("no scattering family for vertex `{0}`")]
    MissingFamily(String),
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("eigensolver failed to converge to the residual contract")]
    EigensolverFailure,
    #[error("trace refinement limit reached near k = {0}")]
    RefinementLimit(f64),
    #[error("solution set is not discrete: a branch stays at +1 near k = {0}")]
    DiscretenessViolated(f64),
    #[error("no eigenvalue at +1 for k = {0}")]
    NotACrossing(f64),
    #[error("local index is unstable at k = {0}")]
    IndexUnstable(f64),
    #[error("determinant winding is not an integer (residual {0:e})")]
    WindingResidual(f64),
    #[error("m + d0 + dpi = {0} is odd; band count undefined")]
    ParityViolation(i64),
    #[error("initial grid must have at least 64 points, got {0}")]
    GridTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("two retained minima are adjacent grid points near k = {0}")]
    GridTooCoarse(f64),
    #[error("grid size must be at least 10^4, got {0}")]
    GridTooSmall(usize),
    #[error("phase of branch {0} is not linear; exact prediction unavailable")]
    UnsupportedPhase(usize),
    #[error("branch {0} is identically at +1")]
    Continuum(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Crate-level error for pipelines that cross module boundaries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("instance: {0}")]
    Instance(String),
}
