use image::{Rgb, RgbImage};
use imageproc::drawing::{draw_filled_circle_mut, draw_line_segment_mut};
use mallnav_core::TopoMap;

const NODE: Rgb<u8> = Rgb([150, 150, 150]);
const PATH: Rgb<u8> = Rgb([220, 30, 30]);
const ORIGIN: Rgb<u8> = Rgb([20, 160, 40]);
const DEST: Rgb<u8> = Rgb([30, 60, 220]);

/// Route drawn over the map: every node centroid as a grey dot, the path as
/// red segments, origin green and destination blue. Without a background
/// the canvas just covers the node centroids.
pub fn draw_path(map: &TopoMap, path: &[usize], background: Option<RgbImage>) -> RgbImage {
    let mut img = background.unwrap_or_else(|| {
        let (w, h) = map.nodes.iter().fold((1.0f64, 1.0f64), |(w, h), n| {
            (w.max(n.centroid.0 + 8.0), h.max(n.centroid.1 + 8.0))
        });
        RgbImage::from_pixel(w.ceil() as u32, h.ceil() as u32, Rgb([255, 255, 255]))
    });
    let at = |id: usize| {
        let c = map.nodes[id].centroid;
        (c.0 as f32, c.1 as f32)
    };
    let dot = |id: usize| {
        let (x, y) = at(id);
        (x.round() as i32, y.round() as i32)
    };
    for n in &map.nodes {
        draw_filled_circle_mut(&mut img, dot(n.id), 1, NODE);
    }
    for w in path.windows(2) {
        let (p, q) = (at(w[0]), at(w[1]));
        draw_line_segment_mut(&mut img, p, q, PATH);
        draw_line_segment_mut(&mut img, (p.0 + 1.0, p.1), (q.0 + 1.0, q.1), PATH);
    }
    if let (Some(&first), Some(&last)) = (path.first(), path.last()) {
        draw_filled_circle_mut(&mut img, dot(first), 3, ORIGIN);
        draw_filled_circle_mut(&mut img, dot(last), 3, DEST);
    }
    img
}
