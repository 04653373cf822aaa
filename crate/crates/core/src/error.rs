use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TensorError {
    #[error("matrix is not positive definite (Cholesky failed)")]
    NonSpd,
    #[error("symmetric eigensolver did not converge")]
    NoConvergence,
    #[error("matrix has no singular value below the rank tolerance")]
    NotDegenerate,
    #[error("matrix has {0} singular values below the rank tolerance, expected one")]
    RankDeficient(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("linear system is singular")]
    Singular,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AmbientError {
    #[error("point {0:?} is outside the chart domain")]
    OutOfDomain(Vec<f64>),
    #[error("metric is singular at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("warping function is not positive on the declared interval (value {0})")]
    InvalidWarping(f64),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FrameError {
    #[error("induced metric does not have a one-dimensional radical: {0}")]
    NotNull(TensorError),
    #[error("screen metric is not positive definite")]
    DegenerateScreen,
    #[error("level-set screen requested off a GRW graph: {0}")]
    NotAGraph(String),
    #[error("frame field is not differentiable here: {0}")]
    JetFailure(String),
    #[error("parameter point {0:?} is outside the hypersurface domain")]
    OutOfDomain(Vec<f64>),
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CheckError {
    #[error("hypersurface is not null screen isoparametric (residual {0:e})")]
    NotIsoparametric(f64),
    #[error("Einstein precondition failed (residual {0:e})")]
    NotEinstein(f64),
    #[error("quasi-conformal fit not accepted (residual {0:e})")]
    NotQuasiConformal(f64),
    #[error("ambient curvature is not certified constant; refusing space-form identities")]
    UncertifiedCurvature,
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("bad catalog parameters: {0}")]
    BadParams(String),
    #[error("eikonal condition |grad f| = rho(f) violated (residual {residual:e} at {point:?})")]
    EikonalViolated { residual: f64, point: Vec<f64> },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit status: 1 identity failure, 2 construction error, 3 config error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::BadParams(_) | HarnessError::Io(_) => 3,
            HarnessError::Check(CheckError::Frame(_)) => 2,
            HarnessError::Check(_) => 1,
            _ => 2,
        }
    }
}
