//! Road identification by road score and second-pass shop segmentation.

use image::RgbImage;

use super::component::{components_from_labels, MapComponent};
use super::srm::{srm_segment, SrmParams};
use crate::error::{Error, Result};
use crate::geom::{distance, Rect};

#[derive(Debug, Clone, PartialEq)]
pub struct RoadTerms {
    pub id: usize,
    /// Coverage over circumscribed-rectangle area, before normalisation.
    pub coverage_ratio: f64,
    pub holes: f64,
    pub deviation: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadScoring {
    pub terms: Vec<RoadTerms>,
    /// Id of the highest-scoring component, lowest id on ties.
    pub road_id: usize,
}

impl RoadScoring {
    pub fn scores(&self) -> Vec<(usize, f64)> {
        self.terms.iter().map(|t| (t.id, t.score)).collect()
    }
}

/// Number of other components with at least one pixel inside each
/// component's circumscribed rectangle.
pub fn coverage_counts(comps: &[MapComponent], width: u32, height: u32) -> Vec<usize> {
    let mut owner = vec![u32::MAX; width as usize * height as usize];
    for (k, c) in comps.iter().enumerate() {
        for &(x, y) in &c.pixels {
            owner[(y * width + x) as usize] = k as u32;
        }
    }
    let mut seen = vec![usize::MAX; comps.len()];
    comps
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut count = 0;
            for y in c.bbox.y..c.bbox.bottom() {
                for x in c.bbox.x..c.bbox.right() {
                    let o = owner[(y * width + x) as usize];
                    if o != u32::MAX && o as usize != i && seen[o as usize] != i {
                        seen[o as usize] = i;
                        count += 1;
                    }
                }
            }
            count
        })
        .collect()
}

fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Road score `coverage / area - holes - deviation`, each term min-max
/// normalised over all components. Writes coverage, deviation and score
/// back into the components.
pub fn score_road(comps: &mut [MapComponent], width: u32, height: u32) -> Result<RoadScoring> {
    if comps.is_empty() {
        return Err(Error::EmptyInput("components"));
    }
    let coverage = coverage_counts(comps, width, height);
    let center = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let ratio: Vec<f64> = comps
        .iter()
        .zip(&coverage)
        .map(|(c, &cov)| cov as f64 / c.bbox.area() as f64)
        .collect();
    let holes: Vec<f64> = comps.iter().map(|c| c.holes as f64).collect();
    let dev: Vec<f64> = comps.iter().map(|c| distance(c.centroid, center)).collect();
    let (nr, nh, nd) = (min_max(&ratio), min_max(&holes), min_max(&dev));

    let mut terms = Vec::with_capacity(comps.len());
    for (i, c) in comps.iter_mut().enumerate() {
        let score = nr[i] - nh[i] - nd[i];
        c.coverage = coverage[i];
        c.deviation = dev[i];
        c.road_score = score;
        terms.push(RoadTerms {
            id: c.id,
            coverage_ratio: ratio[i],
            holes: holes[i],
            deviation: dev[i],
            score,
        });
    }
    let road_id = terms
        .iter()
        .max_by(|a, b| {
            a.score
                .partial_cmp(&b.score)
                .expect("finite scores")
                .then_with(|| b.id.cmp(&a.id))
        })
        .expect("non-empty")
        .id;
    Ok(RoadScoring { terms, road_id })
}

/// Segment the road's circumscribed rectangle again at `params.q` and return
/// the non-road segments of at least `min_area` pixels, in full-image
/// coordinates with fresh ids `0..`.
pub fn extract_shop_blocks(
    image: &RgbImage,
    road: &MapComponent,
    params: &SrmParams,
    min_area: usize,
) -> Result<Vec<MapComponent>> {
    let b: Rect = road.bbox;
    let crop = image::imageops::crop_imm(image, b.x, b.y, b.w, b.h).to_image();
    let labels = srm_segment(&crop, params)?;
    let mut road_mask = vec![false; (b.w * b.h) as usize];
    for &(x, y) in &road.pixels {
        road_mask[((y - b.y) * b.w + (x - b.x)) as usize] = true;
    }
    let mut shops = Vec::new();
    for seg in components_from_labels(&labels) {
        if seg.area() < min_area {
            continue;
        }
        let on_road = seg
            .pixels
            .iter()
            .filter(|&&(x, y)| road_mask[(y * b.w + x) as usize])
            .count();
        if on_road * 2 > seg.area() {
            continue;
        }
        let pixels = seg.pixels.iter().map(|&(x, y)| (x + b.x, y + b.y)).collect();
        shops.push(MapComponent::from_pixels(shops.len(), pixels).expect("non-empty segment"));
    }
    Ok(shops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(id: usize, r: Rect) -> MapComponent {
        let px = (r.y..r.bottom()).flat_map(|y| (r.x..r.right()).map(move |x| (x, y))).collect();
        MapComponent::from_pixels(id, px).unwrap()
    }

    #[test]
    fn single_component_wins() {
        let mut c = vec![rect(7, Rect::new(0, 0, 4, 4))];
        let s = score_road(&mut c, 10, 10).unwrap();
        assert_eq!(s.road_id, 7);
        assert_eq!(s.terms[0].score, 0.0);
        assert!(score_road(&mut [], 10, 10).is_err());
    }

    #[test]
    fn identical_blobs_tie_to_lower_id() {
        let mut c = vec![rect(5, Rect::new(11, 4, 4, 4)), rect(2, Rect::new(5, 4, 4, 4))];
        let s = score_road(&mut c, 20, 12).unwrap();
        assert_eq!(s.terms[0].score, s.terms[1].score);
        assert_eq!(s.road_id, 2);
    }
}
