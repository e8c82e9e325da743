//! Maximally stable extremal regions from a union-find component tree.
//!
//! Pixels are added in increasing intensity; every level at which a
//! connected set of `{I <= t}` grows or merges becomes a tree node. The
//! variation of a node with area `|R|` at level `t` is
//! `(|R+| - |R|) / |R|`, where `R+` is its largest ancestor at a level no
//! higher than `t + delta`. A node is kept when its variation is no larger
//! than its parent's or any child's; of two kept nodes on one branch whose
//! areas differ by less than 20%, the larger is dropped. Bright regions are
//! the dark regions of the inverted image.

use image::GrayImage;
use serde::{Deserialize, Serialize};

use super::component::MapComponent;
use crate::error::{Error, Result};
use crate::raster::invert;

const NONE: u32 = u32::MAX;
const MIN_DIVERSITY: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MserParams {
    pub delta: u8,
    pub min_area: usize,
    pub max_area: usize,
    pub max_variation: f64,
}

impl MserParams {
    /// Defaults for a `width` x `height` photo: delta 5, areas 15 px to 1% of
    /// the image, variation 0.25.
    pub fn for_image(width: u32, height: u32) -> Self {
        MserParams {
            delta: 5,
            min_area: 15,
            max_area: ((width as usize * height as usize) / 100).max(15),
            max_variation: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Darker than its surroundings.
    Dark,
    Bright,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::Dark => Polarity::Bright,
            Polarity::Bright => Polarity::Dark,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MserRegion {
    pub polarity: Polarity,
    /// Threshold level of the region in its own polarity.
    pub level: u8,
    pub variation: f64,
    pub component: MapComponent,
}

/// Dark regions first, then bright; within a polarity by raster order of
/// the first pixel. Component ids follow that order.
pub fn detect_mser(image: &GrayImage, params: &MserParams) -> Result<Vec<MserRegion>> {
    if params.min_area > params.max_area {
        return Err(Error::InvalidParams(format!(
            "min_area {} exceeds max_area {}",
            params.min_area, params.max_area
        )));
    }
    let mut out = extremal(image, params, Polarity::Dark);
    out.extend(extremal(&invert(image), params, Polarity::Bright));
    for (i, r) in out.iter_mut().enumerate() {
        r.component.id = i;
    }
    Ok(out)
}

struct Tree {
    level: Vec<u8>,
    area: Vec<u32>,
    parent: Vec<u32>,
    first_child: Vec<u32>,
    last_child: Vec<u32>,
    next_sibling: Vec<u32>,
    // Pixels owned directly by a node, as a linked list through `next_pixel`.
    head: Vec<u32>,
    tail: Vec<u32>,
    next_pixel: Vec<u32>,
    alive: Vec<bool>,
}

impl Tree {
    fn push_child(&mut self, parent: u32, child: u32) {
        let (p, c) = (parent as usize, child as usize);
        self.next_sibling[c] = NONE;
        if self.first_child[p] == NONE {
            self.first_child[p] = child;
        } else {
            self.next_sibling[self.last_child[p] as usize] = child;
        }
        self.last_child[p] = child;
    }

    fn absorb(&mut self, into: u32, from: u32) {
        let (a, b) = (into as usize, from as usize);
        self.area[a] += self.area[b];
        if self.first_child[b] != NONE {
            if self.first_child[a] == NONE {
                self.first_child[a] = self.first_child[b];
            } else {
                self.next_sibling[self.last_child[a] as usize] = self.first_child[b];
            }
            self.last_child[a] = self.last_child[b];
        }
        if self.head[b] != NONE {
            self.next_pixel[self.tail[a] as usize] = self.head[b];
            self.tail[a] = self.tail[b];
        }
        self.alive[b] = false;
    }

    fn children(&self, n: u32) -> impl Iterator<Item = u32> + '_ {
        let mut c = self.first_child[n as usize];
        std::iter::from_fn(move || {
            if c == NONE {
                return None;
            }
            let cur = c;
            c = self.next_sibling[c as usize];
            Some(cur)
        })
    }
}

fn find(uf: &mut [u32], mut p: u32) -> u32 {
    while uf[p as usize] != p {
        let gp = uf[uf[p as usize] as usize];
        uf[p as usize] = gp;
        p = gp;
    }
    p
}

fn build_tree(image: &GrayImage) -> Tree {
    let (w, h) = image.dimensions();
    let n = (w * h) as usize;
    let data = image.as_raw();
    let mut buckets = vec![Vec::new(); 256];
    for (i, &v) in data.iter().enumerate() {
        buckets[v as usize].push(i as u32);
    }

    let mut t = Tree {
        level: Vec::with_capacity(n),
        area: Vec::with_capacity(n),
        parent: Vec::new(),
        first_child: Vec::with_capacity(n),
        last_child: Vec::with_capacity(n),
        next_sibling: Vec::with_capacity(n),
        head: Vec::with_capacity(n),
        tail: Vec::with_capacity(n),
        next_pixel: vec![NONE; n],
        alive: Vec::with_capacity(n),
    };
    let mut uf: Vec<u32> = (0..n as u32).collect();
    let mut node_of = vec![NONE; n];
    let mut done = vec![false; n];

    for (level, bucket) in buckets.iter().enumerate() {
        for &p in bucket {
            let np = t.level.len() as u32;
            t.level.push(level as u8);
            t.area.push(1);
            t.first_child.push(NONE);
            t.last_child.push(NONE);
            t.next_sibling.push(NONE);
            t.head.push(p);
            t.tail.push(p);
            t.alive.push(true);
            node_of[p as usize] = np;
            done[p as usize] = true;

            let (x, y) = (p % w, p / w);
            let mut neighbours = [NONE; 4];
            if x > 0 {
                neighbours[0] = p - 1;
            }
            if x + 1 < w {
                neighbours[1] = p + 1;
            }
            if y > 0 {
                neighbours[2] = p - w;
            }
            if y + 1 < h {
                neighbours[3] = p + w;
            }
            for q in neighbours {
                if q == NONE || !done[q as usize] {
                    continue;
                }
                let (rp, rq) = (find(&mut uf, p), find(&mut uf, q));
                if rp == rq {
                    continue;
                }
                let a = node_of[rp as usize];
                let b = node_of[rq as usize];
                if t.level[b as usize] as usize == level {
                    t.absorb(a, b);
                } else {
                    t.area[a as usize] += t.area[b as usize];
                    t.push_child(a, b);
                }
                uf[rq as usize] = rp;
                node_of[rp as usize] = a;
            }
        }
    }

    let count = t.level.len();
    t.parent = vec![NONE; count];
    for node in 0..count as u32 {
        if !t.alive[node as usize] {
            continue;
        }
        let kids: Vec<u32> = t.children(node).collect();
        for c in kids {
            t.parent[c as usize] = node;
        }
    }
    t
}

fn extremal(image: &GrayImage, params: &MserParams, polarity: Polarity) -> Vec<MserRegion> {
    let (w, h) = image.dimensions();
    let total = (w * h) as usize;
    if total == 0 {
        return Vec::new();
    }
    let t = build_tree(image);
    let count = t.level.len();
    let mut variation = vec![f64::INFINITY; count];
    for n in 0..count {
        if !t.alive[n] {
            continue;
        }
        let limit = t.level[n] as u32 + params.delta as u32;
        let mut m = n;
        while t.parent[m] != NONE && t.level[t.parent[m] as usize] as u32 <= limit {
            m = t.parent[m] as usize;
        }
        variation[n] = (t.area[m] - t.area[n]) as f64 / t.area[n] as f64;
    }

    let mut picked = Vec::new();
    for n in 0..count {
        if !t.alive[n] {
            continue;
        }
        let area = t.area[n] as usize;
        if area < params.min_area || area > params.max_area || area == total {
            continue;
        }
        let v = variation[n];
        if v > params.max_variation {
            continue;
        }
        let p = t.parent[n];
        if p != NONE && v > variation[p as usize] {
            continue;
        }
        if t.children(n as u32).any(|c| v > variation[c as usize]) {
            continue;
        }
        picked.push(n as u32);
    }

    let mut selected = vec![false; count];
    for &n in &picked {
        selected[n as usize] = true;
    }
    let mut dropped = vec![false; count];
    for &n in &picked {
        let mut a = t.parent[n as usize];
        while a != NONE && !selected[a as usize] {
            a = t.parent[a as usize];
        }
        if a != NONE {
            let (an, aa) = (t.area[n as usize] as f64, t.area[a as usize] as f64);
            if (aa - an) / an < MIN_DIVERSITY {
                dropped[a as usize] = true;
            }
        }
    }
    picked.retain(|&n| !dropped[n as usize]);

    let mut regions: Vec<MserRegion> = picked
        .into_iter()
        .map(|n| {
            let mut pixels = Vec::with_capacity(t.area[n as usize] as usize);
            let mut stack = vec![n];
            while let Some(m) = stack.pop() {
                let mut p = t.head[m as usize];
                while p != NONE {
                    pixels.push((p % w, p / w));
                    p = t.next_pixel[p as usize];
                }
                stack.extend(t.children(m));
            }
            MserRegion {
                polarity,
                level: t.level[n as usize],
                variation: variation[n as usize],
                component: MapComponent::from_pixels(0, pixels).expect("non-empty region"),
            }
        })
        .collect();
    regions.sort_by_key(|r| {
        let (x, y) = r.component.pixels[0];
        (y, x, r.component.area())
    });
    regions
}
