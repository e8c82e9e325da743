//! Topological map assembly, localization from recognised brands,
//! position refinement and shortest paths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::listparse::NameIdMap;
use crate::mapparse::{MapComponent, RoadNode};
use crate::scalar::Scalar;

pub const TOPOMAP_FORMAT: &str = "mallnav-topomap";
pub const TOPOMAP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TopoNode<T> {
    pub id: usize,
    pub centroid: (T, T),
    pub pixel_count: usize,
    /// Shop ids, ascending.
    pub landmarks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TopoEdge<T> {
    /// Always `a < b`.
    pub a: usize,
    pub b: usize,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TopoMap<T> {
    pub nodes: Vec<TopoNode<T>>,
    pub edges: Vec<TopoEdge<T>>,
    pub name_id: NameIdMap,
    pub shop_centroids: BTreeMap<String, (T, T)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LocationEstimate<T> {
    pub candidate_nodes: Vec<usize>,
    pub refined_point: Option<(T, T)>,
}

/// Shop id for each block: its recognised label, or `block-<id>` when
/// unlabelled or when the label was already taken by another block.
pub fn shop_ids(shops: &[MapComponent]) -> Vec<String> {
    let mut taken = BTreeSet::new();
    shops
        .iter()
        .map(|s| match &s.label {
            Some(l) if !l.is_empty() && taken.insert(l.clone()) => l.clone(),
            _ => format!("block-{}", s.id),
        })
        .collect()
}

fn point<T: Scalar>(p: (f64, f64)) -> (T, T) {
    (T::lit(p.0), T::lit(p.1))
}

fn dist<T: Scalar>(a: (T, T), b: (T, T)) -> T {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    (dx * dx + dy * dy).sqrt()
}

/// Pairs of node indices whose pixel sets are 4-adjacent, ascending.
pub fn adjacent_pairs(nodes: &[RoadNode]) -> BTreeSet<(usize, usize)> {
    let mut owner: HashMap<(u32, u32), usize> = HashMap::new();
    for (k, n) in nodes.iter().enumerate() {
        for &p in &n.pixels {
            owner.insert(p, k);
        }
    }
    let mut pairs = BTreeSet::new();
    for (k, n) in nodes.iter().enumerate() {
        for &(x, y) in &n.pixels {
            for q in [(x + 1, y), (x, y + 1)] {
                if let Some(&o) = owner.get(&q) {
                    if o != k {
                        pairs.insert((k.min(o), k.max(o)));
                    }
                }
            }
        }
    }
    pairs
}

/// One vertex per node, in node order; edges between 4-adjacent nodes
/// weighted by centroid distance. Node ids are their positions.
pub fn build_graph<T: Scalar>(nodes: &[RoadNode], name_id: NameIdMap, shops: &[MapComponent]) -> Result<TopoMap<T>> {
    let ids = shop_ids(shops);
    let by_block: HashMap<usize, usize> = shops.iter().enumerate().map(|(k, s)| (s.id, k)).collect();
    let mut topo_nodes: Vec<TopoNode<T>> = Vec::with_capacity(nodes.len());
    for (k, n) in nodes.iter().enumerate() {
        let mut landmarks = n
            .landmarks
            .iter()
            .map(|l| {
                by_block
                    .get(l)
                    .map(|&s| ids[s].clone())
                    .ok_or(Error::DanglingLandmark { node: n.id, landmark: *l })
            })
            .collect::<Result<Vec<_>>>()?;
        landmarks.sort();
        topo_nodes.push(TopoNode {
            id: k,
            centroid: point(n.centroid),
            pixel_count: n.pixels.len(),
            landmarks,
        });
    }
    let edges = adjacent_pairs(nodes)
        .into_iter()
        .map(|(a, b)| TopoEdge {
            a,
            b,
            weight: dist(topo_nodes[a].centroid, topo_nodes[b].centroid).max(T::epsilon()),
        })
        .collect();
    let shop_centroids = shops
        .iter()
        .zip(&ids)
        .map(|(s, id)| (id.clone(), point(s.centroid)))
        .collect();
    Ok(TopoMap {
        nodes: topo_nodes,
        edges,
        name_id,
        shop_centroids,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct Document<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    map: TopoMap<T>,
}

impl<T: Scalar> TopoMap<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        for (k, n) in self.nodes.iter().enumerate() {
            if n.id != k {
                return bad(format!("node at position {k} has id {}", n.id));
            }
        }
        for e in &self.edges {
            if e.a >= e.b || e.b >= self.nodes.len() {
                return bad(format!("edge ({}, {}) is a self-loop, reversed or dangling", e.a, e.b));
            }
            if !(e.weight > T::zero()) || !e.weight.is_finite() {
                return bad(format!("edge ({}, {}) has non-positive weight", e.a, e.b));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            format: TOPOMAP_FORMAT.into(),
            version: TOPOMAP_VERSION,
            map: self.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable map")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Document<T> = serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))?;
        if doc.format != TOPOMAP_FORMAT || doc.version != TOPOMAP_VERSION {
            return Err(Error::InvalidModel(format!(
                "expected {TOPOMAP_FORMAT} v{TOPOMAP_VERSION}, found {} v{}",
                doc.format, doc.version
            )));
        }
        doc.map.validate()?;
        Ok(doc.map)
    }

    /// Neighbours of every node, ascending by id.
    pub fn adjacency(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        for a in &mut adj {
            a.sort_by_key(|&(n, _)| n);
        }
        adj
    }

    /// Shop id for a brand; unlisted brands may also name a shop id directly.
    pub fn resolve_brand(&self, brand: &str, max_distance: usize) -> Result<String> {
        if let Some(id) = self.name_id.resolve(brand, max_distance) {
            return Ok(id.to_string());
        }
        if self.shop_centroids.contains_key(brand.trim()) {
            return Ok(brand.trim().to_string());
        }
        Err(Error::UnknownBrand(brand.to_string()))
    }

    /// Nodes observing `shop_id`, ascending.
    pub fn observers(&self, shop_id: &str) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| n.landmarks.iter().any(|l| l == shop_id))
            .map(|n| n.id)
            .collect()
    }

    /// Node whose centroid is closest to `p`, lowest id on ties.
    pub fn nearest_node(&self, p: (T, T)) -> Option<usize> {
        self.nodes
            .iter()
            .map(|n| (dist(n.centroid, p), n.id))
            .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
    }
}

/// Candidate nodes for a single recognised brand.
pub fn localize<T: Scalar>(brand: &str, map: &TopoMap<T>, max_distance: usize) -> Result<LocationEstimate<T>> {
    let shop = map.resolve_brand(brand, max_distance)?;
    let candidate_nodes = map.observers(&shop);
    if candidate_nodes.is_empty() {
        return Err(Error::UnobservableShop(shop));
    }
    Ok(LocationEstimate {
        candidate_nodes,
        refined_point: None,
    })
}

/// Candidate nodes for several brands seen from one place: the nodes
/// observing all of them, or failing that every node observing any, ranked
/// by how many brands it observes (then by id).
pub fn localize_multi<T: Scalar>(brands: &[&str], map: &TopoMap<T>, max_distance: usize) -> Result<LocationEstimate<T>> {
    if brands.is_empty() {
        return Err(Error::EmptyInput("brands"));
    }
    let mut hits: BTreeMap<usize, usize> = BTreeMap::new();
    for b in brands {
        for n in localize(b, map, max_distance)?.candidate_nodes {
            *hits.entry(n).or_default() += 1;
        }
    }
    let all: Vec<usize> = hits.iter().filter(|(_, &c)| c == brands.len()).map(|(&n, _)| n).collect();
    let candidate_nodes = if all.is_empty() {
        let mut ranked: Vec<(usize, usize)> = hits.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.into_iter().map(|(n, _)| n).collect()
    } else {
        all
    };
    Ok(LocationEstimate {
        candidate_nodes,
        refined_point: None,
    })
}

/// Inverse-distance weighted mean of candidate centroids, weights
/// `1 / (d + epsilon)` with `d` the distance to the shop centroid.
pub fn refine_position<T: Scalar>(
    estimate: &LocationEstimate<T>,
    shop_id: &str,
    map: &TopoMap<T>,
    epsilon: T,
) -> Result<(T, T)> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidParams("epsilon must be positive".into()));
    }
    let shop = *map
        .shop_centroids
        .get(shop_id)
        .ok_or_else(|| Error::UnknownBrand(shop_id.to_string()))?;
    if estimate.candidate_nodes.is_empty() {
        return Err(Error::UnobservableShop(shop_id.to_string()));
    }
    let (mut sw, mut sx, mut sy) = (T::zero(), T::zero(), T::zero());
    for &id in &estimate.candidate_nodes {
        let c = map.nodes.get(id).ok_or(Error::UnknownNode(id))?.centroid;
        let w = T::one() / (dist(c, shop) + epsilon);
        sw += w;
        sx += w * c.0;
        sy += w * c.1;
    }
    Ok((sx / sw, sy / sw))
}

/// Dijkstra from `origin`. The next node settled is the closest, lowest id
/// on ties; among equal-cost routes the one through the lower-id
/// predecessor is kept.
pub fn shortest_path<T: Scalar>(map: &TopoMap<T>, origin: usize, dest: usize) -> Result<(Vec<usize>, T)> {
    let n = map.nodes.len();
    for id in [origin, dest] {
        if id >= n {
            return Err(Error::UnknownNode(id));
        }
    }
    let adj = map.adjacency();
    let mut best: Vec<Option<T>> = vec![None; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    best[origin] = Some(T::zero());
    loop {
        let next = (0..n)
            .filter(|&k| !done[k])
            .filter_map(|k| best[k].map(|d| (d, k)))
            .min_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
        let Some((d, u)) = next else { break };
        done[u] = true;
        if u == dest {
            break;
        }
        for &(v, w) in &adj[u] {
            if done[v] {
                continue;
            }
            let cand = d + w;
            let better = match best[v] {
                None => true,
                Some(old) => cand < old || (cand == old && u < prev[v]),
            };
            if better {
                best[v] = Some(cand);
                prev[v] = u;
            }
        }
    }
    let cost = match (done[dest], best[dest]) {
        (true, Some(c)) => c,
        _ => return Err(Error::Unreachable { from: origin, to: dest }),
    };
    let mut path = vec![dest];
    while *path.last().expect("non-empty") != origin {
        path.push(prev[*path.last().expect("non-empty")]);
    }
    path.reverse();
    Ok((path, cost))
}
