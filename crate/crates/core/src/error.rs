use thiserror::Error;

/// Errors raised by the library. Domain errors describe inputs the
/// mathematics rejects; resource errors describe exhausted search caps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("d = {0} does not define a quadratic field")]
    DegenerateD(i64),
    #[error("field with d = {0} is imaginary; its unit group is finite")]
    ImaginaryField(i64),
    #[error("continued fraction did not close within {0} steps")]
    IterationCap(u64),
    #[error("all generators are zero")]
    ZeroIdeal,
    #[error("principality search exceeded its cap of {0} steps")]
    SearchCapExceeded(u64),
    #[error("|D| = {0} exceeds the configured field size limit")]
    FieldTooLarge(i64),
    #[error("genus count {genus} disagrees with 2-rank {two_rank} of the narrow class group")]
    InconsistentCount { genus: usize, two_rank: usize },
    #[error("conjugate is not integral: entry ({row},{col}) coefficient of u^{power} is {value}")]
    NotIntegral {
        row: usize,
        col: usize,
        power: usize,
        value: String,
    },
    #[error("matrix is singular")]
    Singular,
    #[error("descent blocked by the non-principal prime {prime}")]
    Obstructed { prime: String },
    #[error("no Zariski cover found within candidate pool of size {bound}")]
    CoverNotFound { bound: usize },
    #[error("new generators still appear at the degree bound {0}")]
    BoundTooLow(u32),
    #[error("unknown generator name `{0}`")]
    UnknownGeneratorName(String),
    #[error("prime {0} ramifies in the twisting extension")]
    RamifiedFiber(String),
    #[error("{0} does not define an unramified quadratic extension of this field")]
    NotUnramified(String),
    #[error("parameter out of range: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by an exhausted search budget rather than by the input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::SearchCapExceeded(_)
                | Error::IterationCap(_)
                | Error::CoverNotFound { .. }
                | Error::BoundTooLow(_)
        )
    }

    /// Stable machine-readable tag, used in the CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::DegenerateD(_) => "DegenerateD",
            Error::ImaginaryField(_) => "ImaginaryField",
            Error::IterationCap(_) => "IterationCap",
            Error::ZeroIdeal => "ZeroIdeal",
            Error::SearchCapExceeded(_) => "SearchCapExceeded",
            Error::FieldTooLarge(_) => "FieldTooLarge",
            Error::InconsistentCount { .. } => "InconsistentCount",
            Error::NotIntegral { .. } => "NotIntegral",
            Error::Singular => "Singular",
            Error::Obstructed { .. } => "Obstructed",
            Error::CoverNotFound { .. } => "CoverNotFound",
            Error::BoundTooLow(_) => "BoundTooLow",
            Error::UnknownGeneratorName(_) => "UnknownGeneratorName",
            Error::RamifiedFiber(_) => "RamifiedFiber",
            Error::NotUnramified(_) => "NotUnramified",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
