//! Observation spots and road nodes.
//!
//! Every road pixel records the shop blocks having a pixel within Euclidean
//! distance `radius` of it; 4-connected runs of pixels with identical
//! landmark sets form nodes.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::component::MapComponent;
use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::raster::{label_components, Connectivity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNode {
    pub id: usize,
    /// Raster order.
    pub pixels: Vec<(u32, u32)>,
    pub centroid: (f64, f64),
    /// Shop block ids, ascending.
    pub landmarks: Vec<usize>,
}

impl RoadNode {
    fn new(id: usize, mut pixels: Vec<(u32, u32)>, landmarks: Vec<usize>) -> Self {
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        let n = pixels.len() as f64;
        let (sx, sy) = pixels
            .iter()
            .fold((0f64, 0f64), |(a, b), &(x, y)| (a + x as f64, b + y as f64));
        RoadNode {
            id,
            pixels,
            centroid: (sx / n, sy / n),
            landmarks,
        }
    }
}

/// Offsets with `dx^2 + dy^2 <= r^2`.
pub fn disc_offsets(radius: u32) -> Vec<(i32, i32)> {
    let r = radius as i32;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Landmark set of every road pixel, in the road's pixel order.
pub fn observation_spots(road: &MapComponent, shops: &[MapComponent], radius: u32) -> Result<Vec<Vec<usize>>> {
    if radius < 1 {
        return Err(Error::InvalidParams("observation radius must be at least 1".into()));
    }
    let frame = road
        .bbox
        .union(&shops.iter().map(|s| s.bbox).reduce(|a, b| a.union(&b)).unwrap_or(road.bbox));
    let (fw, fh) = (frame.w as i64, frame.h as i64);
    let mut owner = vec![u32::MAX; frame.area() as usize];
    for (k, s) in shops.iter().enumerate() {
        for &(x, y) in &s.pixels {
            owner[((y - frame.y) * frame.w + (x - frame.x)) as usize] = k as u32;
        }
    }
    let disc = disc_offsets(radius);
    let mut seen = vec![usize::MAX; shops.len()];
    Ok(road
        .pixels
        .iter()
        .enumerate()
        .map(|(pi, &(x, y))| {
            let (lx, ly) = ((x - frame.x) as i64, (y - frame.y) as i64);
            let mut set = Vec::new();
            for &(dx, dy) in &disc {
                let (nx, ny) = (lx + dx as i64, ly + dy as i64);
                if nx < 0 || ny < 0 || nx >= fw || ny >= fh {
                    continue;
                }
                let o = owner[(ny * fw + nx) as usize];
                if o != u32::MAX && seen[o as usize] != pi {
                    seen[o as usize] = pi;
                    set.push(shops[o as usize].id);
                }
            }
            set.sort_unstable();
            set
        })
        .collect())
}

/// Group the road's observation spots into nodes ordered by their first
/// pixel in raster order; ids are `0..`.
pub fn build_nodes(road: &MapComponent, shops: &[MapComponent], radius: u32) -> Result<Vec<RoadNode>> {
    let spots = observation_spots(road, shops, radius)?;
    let b = road.bbox;
    let mut slot = vec![u32::MAX; b.area() as usize];
    for (k, &(x, y)) in road.pixels.iter().enumerate() {
        slot[((y - b.y) * b.w + (x - b.x)) as usize] = k as u32;
    }
    let (labels, count) = label_components(
        b.w,
        b.h,
        Connectivity::Four,
        |i| slot[i] != u32::MAX,
        |i, j| spots[slot[i] as usize] == spots[slot[j] as usize],
    );
    let mut pixels: Vec<Vec<(u32, u32)>> = vec![Vec::new(); count as usize];
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); count as usize];
    for (i, &l) in labels.iter().enumerate() {
        if l == u32::MAX {
            continue;
        }
        let (x, y) = (i as u32 % b.w + b.x, i as u32 / b.w + b.y);
        if pixels[l as usize].is_empty() {
            sets[l as usize] = spots[slot[i] as usize].clone();
        }
        pixels[l as usize].push((x, y));
    }
    Ok(pixels
        .into_iter()
        .zip(sets)
        .enumerate()
        .map(|(id, (px, set))| RoadNode::new(id, px, set))
        .collect())
}

/// Fold nodes under `min_pixels` into the 4-adjacent node sharing the most
/// boundary with them (lowest id on ties); the absorbing node keeps its
/// landmarks. Ids are reassigned `0..` in raster order.
pub fn merge_small_nodes(nodes: Vec<RoadNode>, min_pixels: usize) -> Vec<RoadNode> {
    if nodes.len() < 2 || min_pixels <= 1 {
        return nodes;
    }
    let frame = nodes
        .iter()
        .filter_map(|n| Rect::enclosing(&n.pixels))
        .reduce(|a, b| a.union(&b))
        .expect("non-empty nodes");
    let idx = |x: u32, y: u32| ((y - frame.y) * frame.w + (x - frame.x)) as usize;
    let mut owner = vec![usize::MAX; frame.area() as usize];
    for (k, n) in nodes.iter().enumerate() {
        for &(x, y) in &n.pixels {
            owner[idx(x, y)] = k;
        }
    }
    let mut target: Vec<usize> = (0..nodes.len()).collect();
    let resolve = |t: &[usize], mut k: usize| {
        while t[k] != k {
            k = t[k];
        }
        k
    };
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&k| (nodes[k].pixels.len(), k));
    let mut sizes: Vec<usize> = nodes.iter().map(|n| n.pixels.len()).collect();
    for k in order {
        if resolve(&target, k) != k || sizes[k] >= min_pixels {
            continue;
        }
        let mut border: HashMap<usize, usize> = HashMap::new();
        for &(x, y) in &nodes[k].pixels {
            let cand = [
                (x.wrapping_sub(1), y),
                (x + 1, y),
                (x, y.wrapping_sub(1)),
                (x, y + 1),
            ];
            for (nx, ny) in cand {
                if !frame.contains(nx, ny) {
                    continue;
                }
                let o = owner[idx(nx, ny)];
                if o == usize::MAX {
                    continue;
                }
                let r = resolve(&target, o);
                if r != k {
                    *border.entry(r).or_default() += 1;
                }
            }
        }
        if let Some((&best, _)) = border.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))) {
            target[k] = best;
            sizes[best] += sizes[k];
        }
    }
    let mut merged: Vec<(Vec<(u32, u32)>, Vec<usize>)> = Vec::new();
    let mut slot = vec![usize::MAX; nodes.len()];
    let roots: Vec<usize> = (0..nodes.len()).map(|k| resolve(&target, k)).collect();
    for (k, n) in nodes.iter().enumerate() {
        let r = roots[k];
        if slot[r] == usize::MAX {
            slot[r] = merged.len();
            merged.push((Vec::new(), nodes[r].landmarks.clone()));
        }
        merged[slot[r]].0.extend_from_slice(&n.pixels);
    }
    let mut out: Vec<RoadNode> = merged
        .into_iter()
        .map(|(px, lm)| RoadNode::new(0, px, lm))
        .collect();
    out.sort_by_key(|n| (n.pixels[0].1, n.pixels[0].0));
    for (i, n) in out.iter_mut().enumerate() {
        n.id = i;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(id: usize, r: Rect) -> MapComponent {
        let px = (r.y..r.bottom()).flat_map(|y| (r.x..r.right()).map(move |x| (x, y))).collect();
        MapComponent::from_pixels(id, px).unwrap()
    }

    #[test]
    fn zero_radius_is_rejected() {
        let road = rect(0, Rect::new(0, 0, 5, 1));
        assert!(build_nodes(&road, &[], 0).is_err());
    }

    #[test]
    fn corridor_with_one_side_shop() {
        // Corridor y in 10..13, x in 0..60; shop A above it, x in 20..30.
        let road = rect(0, Rect::new(0, 10, 60, 3));
        let shops = vec![rect(4, Rect::new(20, 0, 10, 10))];
        let nodes = build_nodes(&road, &shops, 2).unwrap();
        let sets: Vec<&[usize]> = nodes.iter().map(|n| n.landmarks.as_slice()).collect();
        // The row out of reach joins both free stretches into one node.
        assert_eq!(sets, vec![&[][..], &[4][..]]);
    }

    #[test]
    fn small_nodes_fold_into_neighbours() {
        let road = rect(0, Rect::new(0, 0, 20, 1));
        let mk = |id, xs: std::ops::Range<u32>, lm: Vec<usize>| RoadNode::new(id, xs.map(|x| (x, 0)).collect(), lm);
        let nodes = vec![mk(0, 0..9, vec![]), mk(1, 9..11, vec![1]), mk(2, 11..20, vec![2])];
        let _ = road;
        let merged = merge_small_nodes(nodes, 5);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.iter().map(|n| n.pixels.len()).sum::<usize>(), 20);
    }
}
