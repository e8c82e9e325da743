use serde::{Deserialize, Serialize};

use super::component::MapComponent;

/// Size, eccentricity and aspect-ratio gates for glyph candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentFilter {
    pub min_size: usize,
    pub max_size: usize,
    pub max_eccentricity: f64,
    pub min_aspect: f64,
    pub max_aspect: f64,
}

impl Default for ComponentFilter {
    fn default() -> Self {
        ComponentFilter {
            min_size: 15,
            max_size: usize::MAX,
            max_eccentricity: 0.995,
            min_aspect: 0.1,
            max_aspect: 4.0,
        }
    }
}

impl ComponentFilter {
    pub fn accepts(&self, c: &MapComponent) -> bool {
        let size = c.area();
        let aspect = c.aspect();
        (self.min_size..=self.max_size).contains(&size)
            && c.eccentricity() <= self.max_eccentricity
            && aspect >= self.min_aspect
            && aspect <= self.max_aspect
    }
}

pub fn filter_components(comps: Vec<MapComponent>, filter: &ComponentFilter) -> Vec<MapComponent> {
    comps.into_iter().filter(|c| filter.accepts(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;

    fn block(r: Rect) -> MapComponent {
        let px = (r.y..r.bottom()).flat_map(|y| (r.x..r.right()).map(move |x| (x, y))).collect();
        MapComponent::from_pixels(0, px).unwrap()
    }

    #[test]
    fn gates() {
        let f = ComponentFilter {
            min_size: 10,
            max_aspect: 10.0,
            max_eccentricity: 1.0,
            ..ComponentFilter::default()
        };
        assert!(filter_components(vec![], &f).is_empty());
        assert!(filter_components(vec![block(Rect::new(0, 0, 1, 1))], &f).is_empty());
        assert!(filter_components(vec![block(Rect::new(0, 0, 60, 2))], &f).is_empty());
        assert_eq!(filter_components(vec![block(Rect::new(0, 0, 5, 7))], &f).len(), 1);
        let round_only = ComponentFilter {
            max_eccentricity: 0.5,
            ..f
        };
        assert!(filter_components(vec![block(Rect::new(0, 0, 9, 3))], &round_only).is_empty());
    }
}
