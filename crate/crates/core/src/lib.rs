//! Storefront brand recognition by fusing text and style features, and
//! conversion of photographed mall indicator maps and shop lists into a
//! topological map for localisation and routing.
//!
//! The learning and navigation types are generic over [`Scalar`] (`f32` or
//! `f64`); the aliases below fix the common `f64` instantiation.

pub mod error;
pub mod fusion;
pub mod geom;
pub mod listparse;
pub mod logistic;
pub mod mapparse;
pub mod ocr;
pub mod raster;
pub mod scalar;
pub mod storefront;
pub mod stylefeat;
pub mod synth;
pub mod textfeat;
pub mod toponav;

pub use error::{Error, Result};
pub use geom::Rect;
pub use scalar::Scalar;

pub type TextDetection = textfeat::TextDetection<f64>;
pub type FpdModel = textfeat::FpdModel<f64>;
pub type StyleFeature = stylefeat::StyleFeature<f64>;
pub type LinearClassifier = fusion::LinearClassifier<f64>;
pub type FusionModel = fusion::FusionModel<f64>;
pub type FusionSample = fusion::FusionSample<f64>;
pub type TopoMap = toponav::TopoMap<f64>;
pub type LocationEstimate = toponav::LocationEstimate<f64>;
