use fanforms::exactalg::AlgebraError;
use fanforms::facering::FaceError;
use fanforms::fan::FanError;
use fanforms::gkm::GkmError;
use fanforms::piecewise::PiecewiseError;
use thiserror::Error;

/// Errors reported by the command line, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// A check ran and failed; the report has already been written.
    #[error("{0}")]
    Validation(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Malformed(_) => 3,
            CliError::Unsupported(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Parse(_)
            | AlgebraError::UnknownVariable(_)
            | AlgebraError::NegativeExponent(_)
            | AlgebraError::DuplicateVariable(_) => CliError::Malformed(e.to_string()),
            AlgebraError::SpaceMismatch | AlgebraError::TruncationMismatch(..) => CliError::Validation(e.to_string()),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<FanError> for CliError {
    fn from(e: FanError) -> Self {
        match e {
            FanError::NotNormalized { .. } | FanError::NotDivisive { .. } | FanError::NotSimplicial(..) => {
                CliError::Unsupported(e.to_string())
            }
            _ => CliError::Malformed(e.to_string()),
        }
    }
}

impl From<PiecewiseError> for CliError {
    fn from(e: PiecewiseError) -> Self {
        match e {
            PiecewiseError::Algebra(a) => a.into(),
            PiecewiseError::Fan(f) => f.into(),
            PiecewiseError::Mismatch | PiecewiseError::CoefficientRing { .. } => CliError::Validation(e.to_string()),
            PiecewiseError::ComponentCount { .. }
            | PiecewiseError::WrongSpace(_)
            | PiecewiseError::NotMaximal(_)
            | PiecewiseError::MissingComponent(_)
            | PiecewiseError::UnknownTheory(_)
            | PiecewiseError::Malformed(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}

impl From<GkmError> for CliError {
    fn from(e: GkmError) -> Self {
        match e {
            GkmError::Fan(f) => f.into(),
            GkmError::Algebra(a) => a.into(),
            GkmError::Piecewise(p) => p.into(),
            GkmError::Invalid(_) | GkmError::FanMismatch(_) => CliError::Validation(e.to_string()),
            GkmError::UnsupportedTheory(_) => CliError::Unsupported(e.to_string()),
            _ => CliError::Malformed(e.to_string()),
        }
    }
}

impl From<FaceError> for CliError {
    fn from(e: FaceError) -> Self {
        match e {
            FaceError::Algebra(a) => a.into(),
            FaceError::Piecewise(p) => p.into(),
            FaceError::Mismatch => CliError::Validation(e.to_string()),
            FaceError::NotMaximal(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Unsupported(e.to_string()),
        }
    }
}
