use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice mismatch between operands")]
    LatticeMismatch,
    #[error("unsupported dimension {0} (must be 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not in sl(2,R): {0}")]
    NotSl2r(String),
    #[error("principal logarithm undefined: eigenvalue on the closed negative real axis")]
    PrincipalBranch,
    #[error("matrix is not elliptic ({0})")]
    NotElliptic(MatrixClass),
    #[error("BCH inputs too large: ||X||+||Y|| = {0} > 1/4")]
    BchNorm(f64),
    #[error("degenerate column on sample grid")]
    DegenerateColumn,
    #[error("cocycle is not homotopic to the identity (degree {0:?})")]
    NotHomotopic(Vec<i64>),
    #[error("multiple resonances: {0:?} and {1:?}")]
    MultipleResonances(Vec<i64>, Vec<i64>),
    #[error("eta = {eta} below regime floor {floor}")]
    EtaBelowFloor { eta: f64, floor: f64 },
    #[error("fixed point did not converge after {iters} iterations (last update {last})")]
    NoConvergence { iters: usize, last: f64 },
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("smallness gate failed: {0}")]
    Gate(String),
    #[error("rotation number mismatch: {0}")]
    RotationMismatch(String),
    #[error("cocycle is uniformly hyperbolic")]
    UniformlyHyperbolic,
    #[error("Diophantine check failed at {0:?}")]
    DcFailed(Vec<i64>),
    #[error("ill-conditioned mode {mode:?}: divisor {divisor}")]
    SmallDivisor { mode: Vec<i64>, divisor: f64 },
    #[error("window overflow: {0}")]
    WindowOverflow(String),
    #[error("degenerate eigenfunction column")]
    DegenerateEigenfunction,
    #[error("empty input")]
    EmptyInput,
    #[error("{0} is not an endpoint of a bounded gap")]
    NotGapEndpoint(f64),
    #[error("sumset component count {0} exceeds cap")]
    SumsetBlowup(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MatrixClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl std::fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MatrixClass::Elliptic => "elliptic",
            MatrixClass::Parabolic => "parabolic",
            MatrixClass::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
