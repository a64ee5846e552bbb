use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("unparseable token {token:?} at {start}..{end}: {reason}")]
    Unparseable {
        token: String,
        start: usize,
        end: usize,
        reason: String,
    },

    #[error("clause references object {0:?} which is not in the scene")]
    UnknownObject(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("frame {0} has no pixel raster")]
    MissingRaster(u64),

    #[error("missing artifact: {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("corpus too small: need {needed} distinct descriptions, found {available} (short by {})", .needed - .available)]
    CorpusTooSmall { needed: usize, available: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("length mismatch: {predictions} predictions vs {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid episode: {0}")]
    InvalidEpisode(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("png decode: {0}")]
    PngDecode(#[from] png::DecodingError),

    #[error("png encode: {0}")]
    PngEncode(#[from] png::EncodingError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
