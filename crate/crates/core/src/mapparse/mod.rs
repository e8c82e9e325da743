//! Indicator-map parsing: text removal, two-pass segmentation, road
//! identification and landmark node grouping.

pub mod component;
pub mod filter;
pub mod inpaint;
pub mod mser;
pub mod nodes;
mod pipeline;
pub mod rlsa;
pub mod road;
pub mod srm;

pub use component::{components_from_labels, MapComponent};
pub use filter::{filter_components, ComponentFilter};
pub use inpaint::inpaint_regions;
pub use mser::{detect_mser, MserParams, MserRegion, Polarity};
pub use nodes::{build_nodes, merge_small_nodes, observation_spots, RoadNode};
pub use pipeline::{default_radius, parse_map, render_nodes, MapParseConfig, ParsedMap, TextLabel};
pub use rlsa::{group_bbox, rlsa_cluster};
pub use road::{coverage_counts, extract_shop_blocks, score_road, RoadScoring, RoadTerms};
pub use srm::{srm_segment, ColorSpace, SrmParams};
