//! Run-length smoothing over component boxes: boxes bridged by a short
//! horizontal run (with shared rows) or a short vertical run (with shared
//! columns) join the same group, transitively.

use super::component::MapComponent;
use crate::geom::Rect;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn linked(a: &Rect, b: &Rect, h_gap: u32, v_gap: u32) -> bool {
    (a.vertical_overlap(b) > 0 && a.horizontal_gap(b) <= h_gap)
        || (a.horizontal_overlap(b) > 0 && a.vertical_gap(b) <= v_gap)
}

/// Groups ordered by the top-left of their union box; members by x.
pub fn rlsa_cluster(comps: &[MapComponent], h_gap: u32, v_gap: u32) -> Vec<Vec<MapComponent>> {
    let n = comps.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if linked(&comps[i].bbox, &comps[j].bbox, h_gap, v_gap) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<MapComponent>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(comps[i].clone());
    }
    for g in &mut groups {
        g.sort_by_key(|c| (c.bbox.x, c.bbox.y));
    }
    groups.sort_by_key(|g| {
        let b = group_bbox(g);
        (b.y, b.x)
    });
    groups
}

pub fn group_bbox(group: &[MapComponent]) -> Rect {
    group
        .iter()
        .map(|c| c.bbox)
        .reduce(|a, b| a.union(&b))
        .unwrap_or_default()
}
