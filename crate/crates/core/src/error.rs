use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid n-gram order {0}, must be at least 1")]
    InvalidOrder(usize),
    #[error("degenerate bounding box {w}x{h}")]
    DegenerateBbox { w: u32, h: u32 },
    #[error("degenerate training set: {0}")]
    DegenerateTrainingSet(String),
    #[error("feature dimension mismatch: expected {expected}, got {actual}")]
    FeatureDimensionMismatch { expected: usize, actual: usize },
    #[error("image {width}x{height} is too small for a {side}px patch")]
    ImageTooSmall { width: u32, height: u32, side: u32 },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("malformed feature file: {0}")]
    MalformedFeatureFile(String),
    #[error("alpha {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("mask covers every pixel, nothing to anchor the fill")]
    NothingToAnchor,
    #[error("name column at x={x} has no id column to pair with")]
    UnmatchedColumn { x: u32 },
    #[error("duplicate shop id {0:?}")]
    DuplicateId(String),
    #[error("node {node} references unknown shop block {landmark}")]
    DanglingLandmark { node: usize, landmark: usize },
    #[error("brand {0:?} does not resolve to any shop id")]
    UnknownBrand(String),
    #[error("shop {0:?} is not observed from any node")]
    UnobservableShop(String),
    #[error("no path from node {from} to node {to}")]
    Unreachable { from: usize, to: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("ocr failure: {0}")]
    Ocr(String),
    #[error("malformed document {path}: {reason}")]
    MalformedDocument { path: PathBuf, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    /// Stable machine-readable category used by the command-line frontend.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidOrder(_) => "invalid-order",
            Error::DegenerateBbox { .. } => "degenerate-bbox",
            Error::DegenerateTrainingSet(_) => "degenerate-training-set",
            Error::FeatureDimensionMismatch { .. } => "feature-dimension-mismatch",
            Error::ImageTooSmall { .. } => "image-too-small",
            Error::EmptyInput(_) => "empty-input",
            Error::MalformedFeatureFile(_) => "malformed-feature-file",
            Error::InvalidAlpha(_) => "invalid-alpha",
            Error::EmptyDataset => "empty-dataset",
            Error::InvalidParams(_) => "invalid-params",
            Error::NothingToAnchor => "nothing-to-anchor",
            Error::UnmatchedColumn { .. } => "unmatched-column",
            Error::DuplicateId(_) => "duplicate-id",
            Error::DanglingLandmark { .. } => "dangling-landmark",
            Error::UnknownBrand(_) => "unknown-brand",
            Error::UnobservableShop(_) => "unobservable-shop",
            Error::Unreachable { .. } => "unreachable",
            Error::UnknownNode(_) => "unknown-node",
            Error::InvalidModel(_) => "invalid-model",
            Error::Ocr(_) => "ocr-failure",
            Error::MalformedDocument { .. } => "malformed-document",
            Error::Io { .. } => "io",
            Error::Image { .. } => "image",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    pub fn doc(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::MalformedDocument {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}
