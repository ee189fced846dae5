use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("malformed dataset {path}: {message}")]
    Dataset { path: PathBuf, message: String },
    #[error("nothing to compare: the run produced no values")]
    EmptyRun,
    #[error("invalid file format: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] roi_core::Error),
}

impl LabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
