use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not symmetric: {0}")]
    Asymmetric(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("expected {expected} finite eigenvalues, found {found}")]
    EigenCount { expected: usize, found: usize },
    #[error("barycentric denominator vanishes at z = {0}")]
    PoleHit(String),
    #[error("pole inside the domain: {0}")]
    PoleInsideDomain(String),
    #[error("node collides with a singularity of the transform: {0}")]
    NodeCollision(String),
    #[error("non-real node without conjugate partner: {0}")]
    MissingConjugate(String),
    #[error("nodes are not pairwise distinct: {0}")]
    DuplicateNodes(String),
    #[error("transform is not flagged conjugate-symmetric; reduced evaluation refused")]
    NotSymmetric,
    #[error("eigenvalue splitting is ambiguous: {0}")]
    SplittingAmbiguity(String),
    #[error("Riccati residual too large: {0}")]
    RiccatiResidual(String),
    #[error("malformed parameter file: {0}")]
    Format(String),
    #[error("unsupported schema version {0}")]
    Schema(u64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Asymmetric(_) => "asymmetric",
            Error::NoConvergence(_) => "no_convergence",
            Error::Singular(_) => "singular",
            Error::EigenCount { .. } => "eigen_count",
            Error::PoleHit(_) => "pole_hit",
            Error::PoleInsideDomain(_) => "pole_inside_domain",
            Error::NodeCollision(_) => "node_collision",
            Error::MissingConjugate(_) => "missing_conjugate",
            Error::DuplicateNodes(_) => "duplicate_nodes",
            Error::NotSymmetric => "not_symmetric",
            Error::SplittingAmbiguity(_) => "splitting_ambiguity",
            Error::RiccatiResidual(_) => "riccati_residual",
            Error::Format(_) => "format",
            Error::Schema(_) => "schema",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
