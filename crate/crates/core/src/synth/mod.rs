//! Seeded synthetic data with ground truth: storefront corpora, indicator
//! maps, shop lists and piecewise-constant segmentation fixtures.

pub mod font;
pub mod list;
pub mod mall;
pub mod segmap;
pub mod storefront;

pub use list::{generate_list, render_list, SynthList};
pub use mall::{generate_mall, MallParams, MallShop, Observation, RoadLayout, SynthMall};
pub use segmap::{generate_piecewise, PiecewiseMap};
pub use storefront::{generate_storefronts, Detection, StorefrontParams, StorefrontSample, DEFAULT_BRANDS};
