//! Brute-force reference implementations shared by the integration tests
//! and the acceptance harness. Each one is written from the definition,
//! without reusing the library's data structures or shortcuts.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use mallnav_core::listparse::NameIdMap;
use mallnav_core::mapparse::MapComponent;
use mallnav_core::toponav::{TopoEdge, TopoMap, TopoNode};
use mallnav_core::Rect;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// True when two labelings induce the same partition of the pixels.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ab: HashMap<u32, u32> = HashMap::new();
    let mut ba: HashMap<u32, u32> = HashMap::new();
    a.iter().zip(b).all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

/// Road score of every component evaluated term by term: coverage counted
/// by scanning every other component's pixels, holes by flood-filling the
/// complement of the bounding box, deviation from the image centre.
pub fn road_scores(comps: &[MapComponent], width: u32, height: u32) -> Vec<f64> {
    let ratio: Vec<f64> = comps
        .iter()
        .map(|c| {
            let b = c.bbox;
            let covered = comps
                .iter()
                .filter(|o| o.id != c.id)
                .filter(|o| o.pixels.iter().any(|&(x, y)| x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h))
                .count();
            covered as f64 / (b.w as f64 * b.h as f64)
        })
        .collect();
    let holes: Vec<f64> = comps.iter().map(|c| holes(&c.pixels, c.bbox) as f64).collect();
    let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let dev: Vec<f64> = comps
        .iter()
        .map(|c| {
            let n = c.pixels.len() as f64;
            let mx = c.pixels.iter().map(|p| p.0 as f64).sum::<f64>() / n;
            let my = c.pixels.iter().map(|p| p.1 as f64).sum::<f64>() / n;
            ((mx - cx).powi(2) + (my - cy).powi(2)).sqrt()
        })
        .collect();
    let norm = |v: &[f64]| -> Vec<f64> {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        v.iter().map(|x| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 }).collect()
    };
    let (r, h, d) = (norm(&ratio), norm(&holes), norm(&dev));
    (0..comps.len()).map(|i| r[i] - h[i] - d[i]).collect()
}

/// Enclosed 8-connected background regions of a pixel set within `bbox`.
pub fn holes(pixels: &[(u32, u32)], bbox: Rect) -> usize {
    let fg: BTreeSet<(u32, u32)> = pixels.iter().copied().collect();
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut count = 0;
    for y in bbox.y..bbox.y + bbox.h {
        for x in bbox.x..bbox.x + bbox.w {
            if fg.contains(&(x, y)) || seen.contains(&(x, y)) {
                continue;
            }
            let mut stack = vec![(x, y)];
            seen.insert((x, y));
            let mut border = false;
            while let Some((px, py)) = stack.pop() {
                if px == bbox.x || py == bbox.y || px + 1 == bbox.x + bbox.w || py + 1 == bbox.y + bbox.h {
                    border = true;
                }
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (px as i64 + dx, py as i64 + dy);
                        if nx < bbox.x as i64 || ny < bbox.y as i64 {
                            continue;
                        }
                        let q = (nx as u32, ny as u32);
                        if q.0 >= bbox.x + bbox.w || q.1 >= bbox.y + bbox.h || fg.contains(&q) || !seen.insert(q) {
                            continue;
                        }
                        stack.push(q);
                    }
                }
            }
            if !border {
                count += 1;
            }
        }
    }
    count
}

/// Nodes from first principles: a road pixel sees a shop when some shop
/// pixel lies within Euclidean distance `r`; 4-neighbours with equal sets
/// share a node. Returned as (pixel set, landmark ids), sorted.
pub fn nodes(road: &[(u32, u32)], shops: &[MapComponent], r: u32) -> Vec<(BTreeSet<(u32, u32)>, Vec<usize>)> {
    let r2 = (r as i64).pow(2);
    let sees: BTreeMap<(u32, u32), Vec<usize>> = road
        .iter()
        .map(|&(x, y)| {
            let mut set: Vec<usize> = shops
                .iter()
                .filter(|s| {
                    s.pixels
                        .iter()
                        .any(|&(sx, sy)| (sx as i64 - x as i64).pow(2) + (sy as i64 - y as i64).pow(2) <= r2)
                })
                .map(|s| s.id)
                .collect();
            set.sort();
            ((x, y), set)
        })
        .collect();
    let mut done: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut out = Vec::new();
    for (&p, set) in &sees {
        if done.contains(&p) {
            continue;
        }
        let mut group = BTreeSet::new();
        let mut stack = vec![p];
        done.insert(p);
        while let Some((x, y)) = stack.pop() {
            group.insert((x, y));
            let around = [
                (x.wrapping_sub(1), y),
                (x + 1, y),
                (x, y.wrapping_sub(1)),
                (x, y + 1),
            ];
            for q in around {
                if sees.get(&q) == Some(set) && done.insert(q) {
                    stack.push(q);
                }
            }
        }
        out.push((group, set.clone()));
    }
    out.sort();
    out
}

/// All-pairs shortest path costs; `None` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<Option<f64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0.0);
    }
    for &(a, b, w) in edges {
        for (u, v) in [(a, b), (b, a)] {
            if d[u][v].is_none_or(|c| w < c) {
                d[u][v] = Some(w);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Random map of 1-12 nodes with integer edge weights, so path sums are
/// exact in floating point. Some graphs are disconnected.
pub fn random_graph(seed: u64) -> (TopoMap<f64>, Vec<(usize, usize, f64)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let p = rng.gen_range(0.15..0.6);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b, rng.gen_range(1..=20) as f64));
            }
        }
    }
    let map = TopoMap {
        nodes: (0..n)
            .map(|id| TopoNode {
                id,
                centroid: (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)),
                pixel_count: 1,
                landmarks: Vec::new(),
            })
            .collect(),
        edges: edges.iter().map(|&(a, b, weight)| TopoEdge { a, b, weight }).collect(),
        name_id: NameIdMap::new(Vec::new()).unwrap(),
        shop_centroids: BTreeMap::new(),
    };
    (map, edges)
}

/// Random road (union of bars) and shop rectangles on a grid of at most
/// 200 x 200, with the road and shops disjoint.
pub fn node_fixture(seed: u64) -> (MapComponent, Vec<MapComponent>, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (rng.gen_range(30..=200u32), rng.gen_range(30..=200u32));
    let mut road = BTreeSet::new();
    let bars = rng.gen_range(1..=3);
    for k in 0..bars {
        let t = rng.gen_range(2..=8u32);
        if k % 2 == 0 {
            let y = rng.gen_range(0..h - t);
            for yy in y..y + t {
                for x in 0..w {
                    road.insert((x, yy));
                }
            }
        } else {
            let x = rng.gen_range(0..w - t);
            for xx in x..x + t {
                for y in 0..h {
                    road.insert((xx, y));
                }
            }
        }
    }
    let mut taken = road.clone();
    let mut shops = Vec::new();
    for _ in 0..rng.gen_range(1..=10) {
        let (sw, sh) = (rng.gen_range(2..=30u32.min(w)), rng.gen_range(2..=30u32.min(h)));
        let (x, y) = (rng.gen_range(0..=w - sw), rng.gen_range(0..=h - sh));
        let px: Vec<(u32, u32)> = (y..y + sh)
            .flat_map(|yy| (x..x + sw).map(move |xx| (xx, yy)))
            .filter(|p| !taken.contains(p))
            .collect();
        taken.extend(px.iter().copied());
        let id = 100 + shops.len();
        if let Some(c) = MapComponent::from_pixels(id, px) {
            shops.push(c);
        }
    }
    let road = MapComponent::from_pixels(0, road.into_iter().collect()).expect("road has pixels");
    (road, shops, rng.gen_range(1..=12))
}
