use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("path does not exist: {}", .0.display())]
    MissingPath(PathBuf),

    #[error("no documents found under {}", .0.display())]
    NoDocuments(PathBuf),

    #[error("document `{id}` has an empty body ({})", path.display())]
    EmptyDocument { id: String, path: PathBuf },

    #[error("duplicate document id `{id}` ({})", path.display())]
    DuplicateId { id: String, path: PathBuf },

    #[error("{}: malformed delimited file: {message}", path.display())]
    Delimited { path: PathBuf, message: String },

    #[error("document `{0}` has no class label")]
    Unlabeled(String),

    #[error("training fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),

    #[error("training fraction yields no training documents for class `{0}`")]
    EmptyTrainingClass(String),

    #[error("at least {needed} classes are required, found {found}")]
    TooFewClasses { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot mine an empty transaction list")]
    EmptyTransactions,

    #[error("class `{0}` has no training transactions")]
    ClassWithoutTransactions(String),

    #[error("effective minimum support must be at least 1")]
    SupportBelowOne,

    #[error("word set {{{0}}} has zero occurrences in every class")]
    Unattributable(String),

    #[error("no frequent word sets were mined; lower the support threshold")]
    NoWordSets,

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("unsupported model format version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u64, supported: u64 },

    #[error("malformed model file at byte {offset}: {message}")]
    MalformedModel { offset: usize, message: String },

    #[error("invalid model contents: {0}")]
    InvalidModel(String),

    #[error("model checksum mismatch: recorded {recorded}, computed {computed}")]
    ChecksumMismatch { recorded: String, computed: String },

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("learning-curve fractions must be strictly increasing")]
    UnorderedFractions,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
