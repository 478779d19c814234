use thiserror::Error;

/// Errors raised anywhere in the generation, simulation and grading pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),
    #[error("assignment is missing variable `{0}`")]
    MissingVariable(String),
    #[error("solver budget must be positive")]
    BudgetMustBePositive,
    #[error("brute-force domain too large ({0} assignments)")]
    DomainTooLarge(u128),
    #[error("sample infeasible: {0}")]
    SampleInfeasible(String),
    #[error("sample rejected: {0}")]
    SampleRejected(String),
    #[error("resample cap exceeded after {attempts} attempts for {task}")]
    ResampleCapExceeded { task: String, attempts: u32 },
    #[error("manifest is empty")]
    EmptyManifest,
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("invalid transition: {0}")]
    InvalidTransition(String),
    #[error("unknown entity: {0}")]
    UnknownEntity(String),
    #[error("unrealizable assignment: {0}")]
    UnrealizableAssignment(String),
    #[error("unknown rule id `{0}`")]
    UnknownRuleId(String),
    #[error("malformed task directory: {0}")]
    MalformedTaskDir(String),
    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),
    #[error("snapshot `{0}` does not match any task in the corpus")]
    UnmatchedSnapshot(String),
    #[error("corpus contains no tasks")]
    EmptyCorpus,
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
