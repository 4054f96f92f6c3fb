use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("netpbm: {0}")]
    Format(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("energy: {0}")]
    Energy(String),
    #[error("graph: {0}")]
    Graph(String),
    #[error("solver stopped at its iteration cap: {0}")]
    SolverCap(String),
    #[error("evaluation: {0}")]
    Eval(String),
    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
