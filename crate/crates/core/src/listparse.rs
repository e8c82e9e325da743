//! Shop-list parsing: Otsu binarisation, recursive XY-cut, column pairing
//! and line matching into a name-ID map.

use std::collections::BTreeSet;

use image::{GrayImage, RgbImage};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Rect;
use crate::ocr::OcrEngine;
use crate::raster::{to_gray, Mask};

pub const DEFAULT_ID_PATTERN: &str = r"^[A-Za-z]{1,2}[0-9]{1,3}$";

/// Threshold maximising between-class variance; ink is `<= t`.
pub fn otsu_threshold(gray: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for p in gray.pixels() {
        hist[p.0[0] as usize] += 1;
    }
    let total: u64 = hist.iter().sum();
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0u64, 0f64);
    let (mut best, mut best_t) = (-1f64, 0u8);
    for t in 0..256 {
        w0 += hist[t];
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let m0 = sum0 / w0 as f64;
        let m1 = (sum_all - sum0) / w1 as f64;
        let between = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
        if between > best {
            best = between;
            best_t = t as u8;
        }
    }
    best_t
}

/// Ink mask of dark print on a light page. A uniform page has no ink.
pub fn binarize(image: &RgbImage) -> Mask {
    let gray = to_gray(image);
    let (lo, hi) = gray
        .pixels()
        .fold((255u8, 0u8), |(lo, hi), p| (lo.min(p.0[0]), hi.max(p.0[0])));
    if lo == hi {
        return Mask::new(gray.width(), gray.height());
    }
    let t = otsu_threshold(&gray);
    Mask::from_fn(gray.width(), gray.height(), |x, y| gray.get_pixel(x, y).0[0] <= t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    NameColumn,
    IdColumn,
    Mixed,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutBlock {
    pub bbox: Rect,
    pub kind: BlockKind,
    pub children: Vec<LayoutBlock>,
}

impl LayoutBlock {
    fn leaf(bbox: Rect) -> Self {
        LayoutBlock {
            bbox,
            kind: BlockKind::Unknown,
            children: Vec::new(),
        }
    }

    pub fn leaves(&self) -> Vec<&LayoutBlock> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    /// Children lie side by side, i.e. the block was cut vertically.
    fn split_vertically(&self) -> bool {
        self.children.len() > 1 && self.children.windows(2).all(|w| w[0].bbox.right() <= w[1].bbox.x)
    }

    /// Maximal inked blocks not cut into side-by-side parts, left to right.
    pub fn columns(&self, ink: &Mask) -> Vec<&LayoutBlock> {
        if self.split_vertically() || self.children.len() == 1 {
            self.children.iter().flat_map(|c| c.columns(ink)).collect()
        } else if tighten(ink, self.bbox).is_none() {
            Vec::new()
        } else {
            vec![self]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct XyCutParams {
    /// Minimum blank run of columns for a vertical cut.
    pub min_gap_x: u32,
    /// Minimum blank run of rows for a horizontal cut.
    pub min_gap_y: u32,
    /// Blocks narrower or shorter than this are not cut.
    pub min_block: u32,
}

impl XyCutParams {
    pub fn uniform(min_gap: u32, min_block: u32) -> Self {
        XyCutParams {
            min_gap_x: min_gap,
            min_gap_y: min_gap,
            min_block,
        }
    }

    /// 2% of the page width for vertical cuts, 0.6 x the median text-line
    /// height for horizontal cuts.
    pub fn for_page(ink: &Mask) -> Self {
        let full = Rect::new(0, 0, ink.width, ink.height);
        let runs = ink_runs(&row_profile(ink, full));
        let mut heights: Vec<u32> = runs.iter().map(|&(a, b)| b - a).collect();
        heights.sort_unstable();
        let median = heights.get(heights.len() / 2).copied().unwrap_or(1) as f64;
        XyCutParams {
            min_gap_x: ((ink.width as f64 * 0.02).round() as u32).max(1),
            min_gap_y: ((median * 0.6).round() as u32).max(1),
            min_block: 2,
        }
    }
}

fn row_profile(ink: &Mask, b: Rect) -> Vec<u32> {
    (b.y..b.bottom())
        .map(|y| (b.x..b.right()).filter(|&x| ink.get(x, y)).count() as u32)
        .collect()
}

fn col_profile(ink: &Mask, b: Rect) -> Vec<u32> {
    (b.x..b.right())
        .map(|x| (b.y..b.bottom()).filter(|&y| ink.get(x, y)).count() as u32)
        .collect()
}

/// Half-open index ranges of non-zero entries.
fn ink_runs(profile: &[u32]) -> Vec<(u32, u32)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &v) in profile.iter().enumerate() {
        match (v > 0, start) {
            (true, None) => start = Some(i as u32),
            (false, Some(s)) => {
                runs.push((s, i as u32));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, profile.len() as u32));
    }
    runs
}

/// Tight box around the ink inside `b`.
pub fn tighten(ink: &Mask, b: Rect) -> Option<Rect> {
    let rows = ink_runs(&row_profile(ink, b));
    let cols = ink_runs(&col_profile(ink, b));
    let (y0, y1) = (rows.first()?.0, rows.last()?.1);
    let (x0, x1) = (cols.first()?.0, cols.last()?.1);
    Some(Rect::from_corners(b.x + x0, b.y + y0, b.x + x1, b.y + y1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// Spans between blank runs of at least `min_gap`, plus the widest such run.
fn split_spans(profile: &[u32], min_gap: u32) -> (Vec<(u32, u32)>, u32) {
    let runs = ink_runs(profile);
    let mut spans = Vec::new();
    let mut widest = 0;
    let mut cur = runs[0];
    for &r in &runs[1..] {
        let gap = r.0 - cur.1;
        if gap >= min_gap {
            widest = widest.max(gap);
            spans.push(cur);
            cur = r;
        } else {
            cur.1 = r.1;
        }
    }
    spans.push(cur);
    (spans, widest)
}

fn cut(ink: &Mask, b: Rect, params: &XyCutParams, last: Option<Axis>) -> LayoutBlock {
    let mut block = LayoutBlock::leaf(b);
    if b.w < params.min_block || b.h < params.min_block {
        return block;
    }
    let (xs, gx) = split_spans(&col_profile(ink, b), params.min_gap_x);
    let (ys, gy) = split_spans(&row_profile(ink, b), params.min_gap_y);
    let axis = match (xs.len() > 1, ys.len() > 1) {
        (false, false) => return block,
        (true, false) => Axis::X,
        (false, true) => Axis::Y,
        _ if gx != gy => {
            if gx > gy {
                Axis::X
            } else {
                Axis::Y
            }
        }
        _ => match last {
            Some(Axis::X) => Axis::Y,
            _ => Axis::X,
        },
    };
    let parts: Vec<Rect> = match axis {
        Axis::X => xs.iter().map(|&(a, e)| Rect::from_corners(b.x + a, b.y, b.x + e, b.bottom())).collect(),
        Axis::Y => ys.iter().map(|&(a, e)| Rect::from_corners(b.x, b.y + a, b.right(), b.y + e)).collect(),
    };
    block.children = parts
        .into_iter()
        .filter_map(|p| tighten(ink, p))
        .map(|p| cut(ink, p, params, Some(axis)))
        .collect();
    block
}

/// Recursive XY-cut of the whole page. The root spans the page; its
/// descendants are tight around their ink. A blank page gives a root
/// without children.
pub fn xy_cut(ink: &Mask, params: &XyCutParams) -> LayoutBlock {
    let page = Rect::new(0, 0, ink.width, ink.height);
    xy_cut_region(ink, page, params)
}

/// XY-cut restricted to `region`, whose bbox is kept as the root box.
pub fn xy_cut_region(ink: &Mask, region: Rect, params: &XyCutParams) -> LayoutBlock {
    match tighten(ink, region) {
        None => LayoutBlock::leaf(region),
        Some(t) => {
            let inner = cut(ink, t, params, None);
            if t == region {
                inner
            } else {
                LayoutBlock {
                    bbox: region,
                    kind: BlockKind::Unknown,
                    children: vec![inner],
                }
            }
        }
    }
}

/// Text lines inside `b` by horizontal projection, each tight.
pub fn extract_lines(ink: &Mask, b: Rect, min_gap: u32) -> Vec<Rect> {
    let Some(t) = tighten(ink, b) else {
        return Vec::new();
    };
    let (spans, _) = split_spans(&row_profile(ink, t), min_gap.max(1));
    spans
        .iter()
        .filter_map(|&(a, e)| tighten(ink, Rect::from_corners(t.x, t.y + a, t.right(), t.y + e)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ListParseConfig {
    pub id_pattern: Regex,
    /// `None` derives the parameters from the page.
    pub xy: Option<XyCutParams>,
    pub max_edit_distance: usize,
}

impl Default for ListParseConfig {
    fn default() -> Self {
        ListParseConfig {
            id_pattern: Regex::new(DEFAULT_ID_PATTERN).expect("valid pattern"),
            xy: None,
            max_edit_distance: 2,
        }
    }
}

/// Kind of a single recognised line.
pub fn classify_text(text: &str, id_pattern: &Regex) -> BlockKind {
    let words: Vec<&str> = text.split_whitespace().collect();
    match words.as_slice() {
        [] => BlockKind::Unknown,
        [w] if id_pattern.is_match(w) => BlockKind::IdColumn,
        [.., last] if id_pattern.is_match(last) && words[..words.len() - 1].iter().any(|w| has_alpha(w)) => {
            BlockKind::Mixed
        }
        _ if words.iter().any(|w| has_alpha(w)) => BlockKind::NameColumn,
        _ => BlockKind::Unknown,
    }
}

fn has_alpha(w: &str) -> bool {
    w.chars().any(char::is_alphabetic)
}

/// Majority kind over the block's lines; `Unknown` without a majority.
pub fn classify_block(
    block: &LayoutBlock,
    ink: &Mask,
    image: &RgbImage,
    ocr: &dyn OcrEngine,
    cfg: &ListParseConfig,
    min_gap_y: u32,
) -> Result<BlockKind> {
    let lines = extract_lines(ink, block.bbox, min_gap_y);
    let mut counts = [0usize; 4];
    for l in &lines {
        let text = ocr.recognize(image, *l)?.text;
        counts[classify_text(&text, &cfg.id_pattern) as usize] += 1;
    }
    let kinds = [BlockKind::NameColumn, BlockKind::IdColumn, BlockKind::Mixed];
    Ok(kinds
        .into_iter()
        .find(|&k| counts[k as usize] * 2 > lines.len())
        .unwrap_or(BlockKind::Unknown))
}

/// Split `b` at its widest internal blank column run.
fn split_widest(ink: &Mask, b: Rect) -> Option<(Rect, Rect)> {
    let t = tighten(ink, b)?;
    let runs = ink_runs(&col_profile(ink, t));
    let (k, _) = runs
        .windows(2)
        .enumerate()
        .map(|(k, w)| (k, w[1].0 - w[0].1))
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))?;
    let left = Rect::from_corners(t.x, t.y, t.x + runs[k].1, t.bottom());
    let right = Rect::from_corners(t.x + runs[k + 1].0, t.y, t.right(), t.bottom());
    Some((tighten(ink, left)?, tighten(ink, right)?))
}

/// Classify the column blocks, split mixed ones at their internal gap and
/// pair every name column with the nearest free id column.
pub fn pair_columns(
    blocks: &[&LayoutBlock],
    ink: &Mask,
    image: &RgbImage,
    ocr: &dyn OcrEngine,
    cfg: &ListParseConfig,
    min_gap_y: u32,
) -> Result<Vec<(LayoutBlock, LayoutBlock)>> {
    let mut names = Vec::new();
    let mut ids = Vec::new();
    for block in blocks {
        let kind = classify_block(block, ink, image, ocr, cfg, min_gap_y)?;
        let mut b = LayoutBlock {
            kind,
            ..(*block).clone()
        };
        match kind {
            BlockKind::NameColumn => names.push(b),
            BlockKind::IdColumn => ids.push(b),
            BlockKind::Mixed => {
                if let Some((l, r)) = split_widest(ink, b.bbox) {
                    let part = |bbox, kind| LayoutBlock {
                        bbox,
                        kind,
                        children: Vec::new(),
                    };
                    names.push(part(l, BlockKind::NameColumn));
                    ids.push(part(r, BlockKind::IdColumn));
                } else {
                    b.kind = BlockKind::Unknown;
                }
            }
            BlockKind::Unknown => {}
        }
    }
    let mut used = vec![false; ids.len()];
    let mut pairs = Vec::new();
    for name in names {
        let best = ids
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, id)| (name.bbox.horizontal_gap(&id.bbox), k))
            .min();
        match best {
            Some((_, k)) => {
                used[k] = true;
                pairs.push((name, ids[k].clone()));
            }
            None => return Err(Error::UnmatchedColumn { x: name.bbox.x }),
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameIdEntry {
    pub shop_id: String,
    pub shop_name: String,
}

/// Shop name and id dictionary with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameIdMap {
    entries: Vec<NameIdEntry>,
}

impl NameIdMap {
    pub fn new(entries: Vec<NameIdEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if e.shop_name.trim().is_empty() {
                return Err(Error::EmptyInput("shop name"));
            }
            if !seen.insert(e.shop_id.as_str()) {
                return Err(Error::DuplicateId(e.shop_id.clone()));
            }
        }
        Ok(NameIdMap { entries })
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(id, name)| NameIdEntry {
                    shop_id: id.into(),
                    shop_name: name.into(),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[NameIdEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn name_of(&self, shop_id: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.shop_id == shop_id)
            .map(|e| e.shop_name.as_str())
    }

    /// Shop id for a brand: case-folded exact name match first, then the
    /// smallest edit distance up to `max_distance` (earliest entry on ties).
    pub fn resolve(&self, brand: &str, max_distance: usize) -> Option<&str> {
        let key = brand.trim().to_lowercase();
        if let Some(e) = self.entries.iter().find(|e| e.shop_name.trim().to_lowercase() == key) {
            return Some(&e.shop_id);
        }
        self.entries
            .iter()
            .enumerate()
            .map(|(k, e)| (strsim::levenshtein(&e.shop_name.trim().to_lowercase(), &key), k))
            .filter(|&(d, _)| d <= max_distance)
            .min()
            .map(|(_, k)| self.entries[k].shop_id.as_str())
    }

    /// `shop_id<TAB>shop_name` lines under a header row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("shop_id\tshop_name\n");
        for e in &self.entries {
            out.push_str(&format!("{}\t{}\n", e.shop_id, e.shop_name));
        }
        out
    }

    /// Inverse of [`NameIdMap::to_tsv`]; the header row is optional.
    pub fn from_tsv(text: &str) -> std::result::Result<Self, String> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || (n == 0 && line == "shop_id\tshop_name") {
                continue;
            }
            let (id, name) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected two tab-separated fields", n + 1))?;
            pairs.push((id.to_string(), name.to_string()));
        }
        Self::from_pairs(pairs).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineSide {
    Name,
    Id,
}

/// A line left without a partner, or whose id text is not an id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrphanLine {
    pub side: LineSide,
    pub bbox: Rect,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineMatch {
    pub shop_id: String,
    pub shop_name: String,
    pub id_bbox: Rect,
    pub name_bbox: Rect,
}

fn overlaps_enough(a: &Rect, b: &Rect) -> bool {
    let ov = a.vertical_overlap(b) as u64;
    ov > 0 && ov * 2 >= a.h.min(b.h) as u64
}

/// Match name lines with id lines overlapping at least half of the
/// smaller height, in top-to-bottom order.
pub fn parse_lines(
    pair: &(LayoutBlock, LayoutBlock),
    ink: &Mask,
    image: &RgbImage,
    ocr: &dyn OcrEngine,
    cfg: &ListParseConfig,
    min_gap_y: u32,
) -> Result<(Vec<LineMatch>, Vec<OrphanLine>)> {
    let read = |b: Rect| -> Result<String> { Ok(ocr.recognize(image, b)?.text.trim().to_string()) };
    let names = extract_lines(ink, pair.0.bbox, min_gap_y);
    let ids = extract_lines(ink, pair.1.bbox, min_gap_y);
    let mut matches = Vec::new();
    let mut orphans = Vec::new();
    let mut id_used = vec![false; ids.len()];
    for n in &names {
        let partner = ids
            .iter()
            .enumerate()
            .find(|(k, i)| !id_used[*k] && overlaps_enough(n, i))
            .map(|(k, _)| k);
        let name_text = read(*n)?;
        match partner {
            Some(k) => {
                id_used[k] = true;
                let id_text = read(ids[k])?;
                if cfg.id_pattern.is_match(&id_text) && !name_text.is_empty() {
                    matches.push(LineMatch {
                        shop_id: id_text,
                        shop_name: name_text,
                        id_bbox: ids[k],
                        name_bbox: *n,
                    });
                } else {
                    orphans.push(OrphanLine {
                        side: LineSide::Name,
                        bbox: *n,
                        text: name_text,
                    });
                    orphans.push(OrphanLine {
                        side: LineSide::Id,
                        bbox: ids[k],
                        text: id_text,
                    });
                }
            }
            None => orphans.push(OrphanLine {
                side: LineSide::Name,
                bbox: *n,
                text: name_text,
            }),
        }
    }
    for (k, i) in ids.iter().enumerate() {
        if !id_used[k] {
            orphans.push(OrphanLine {
                side: LineSide::Id,
                bbox: *i,
                text: read(*i)?,
            });
        }
    }
    Ok((matches, orphans))
}

#[derive(Debug, Clone)]
pub struct ParsedList {
    pub layout: LayoutBlock,
    pub pairs: Vec<(LayoutBlock, LayoutBlock)>,
    pub map: NameIdMap,
    pub matches: Vec<LineMatch>,
    pub orphans: Vec<OrphanLine>,
}

pub fn parse_list(image: &RgbImage, ocr: &dyn OcrEngine, cfg: &ListParseConfig) -> Result<ParsedList> {
    let ink = binarize(image);
    let params = cfg.xy.unwrap_or_else(|| XyCutParams::for_page(&ink));
    let layout = xy_cut(&ink, &params);
    let columns = layout.columns(&ink);
    let pairs = pair_columns(&columns, &ink, image, ocr, cfg, params.min_gap_y)?;
    let mut matches = Vec::new();
    let mut orphans = Vec::new();
    for pair in &pairs {
        let (m, o) = parse_lines(pair, &ink, image, ocr, cfg, params.min_gap_y)?;
        matches.extend(m);
        orphans.extend(o);
    }
    let map = NameIdMap::from_pairs(matches.iter().map(|m| (m.shop_id.clone(), m.shop_name.clone())))?;
    Ok(ParsedList {
        layout,
        pairs,
        map,
        matches,
        orphans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(w: u32, h: u32, boxes: &[Rect]) -> Mask {
        Mask::from_fn(w, h, |x, y| boxes.iter().any(|b| b.contains(x, y)))
    }

    #[test]
    fn blank_page_is_an_empty_root() {
        let root = xy_cut(&Mask::new(40, 30), &XyCutParams::uniform(3, 2));
        assert!(root.children.is_empty());
        assert!(root.columns(&Mask::new(40, 30)).is_empty());
    }

    #[test]
    fn gutter_splits_two_columns() {
        let ink = page(200, 60, &[Rect::new(10, 10, 50, 40), Rect::new(100, 10, 50, 40)]);
        let root = xy_cut(&ink, &XyCutParams::uniform(20, 2));
        assert_eq!(root.children.len(), 1);
        let inner = &root.children[0];
        assert_eq!(inner.children.len(), 2);
        assert_eq!(root.columns(&ink).len(), 2);
    }

    #[test]
    fn leaves_recut_to_themselves() {
        let ink = page(100, 100, &[Rect::new(5, 5, 20, 8), Rect::new(5, 20, 20, 8), Rect::new(60, 5, 20, 8)]);
        let p = XyCutParams::uniform(4, 2);
        let root = xy_cut(&ink, &p);
        for leaf in root.leaves() {
            let again = xy_cut_region(&ink, leaf.bbox, &p);
            assert!(again.children.is_empty());
            assert_eq!(again.bbox, leaf.bbox);
        }
    }

    #[test]
    fn text_classes() {
        let re = Regex::new(DEFAULT_ID_PATTERN).unwrap();
        assert_eq!(classify_text("B12", &re), BlockKind::IdColumn);
        assert_eq!(classify_text("NIKE", &re), BlockKind::NameColumn);
        assert_eq!(classify_text("NIKE B12", &re), BlockKind::Mixed);
        assert_eq!(classify_text("", &re), BlockKind::Unknown);
        assert_eq!(classify_text("1234", &re), BlockKind::Unknown);
    }

    #[test]
    fn name_resolution() {
        let m = NameIdMap::from_pairs([("A1", "Adidas"), ("B2", "Nike")]).unwrap();
        assert_eq!(m.resolve("ADIDAS", 2), Some("A1"));
        assert_eq!(m.resolve("Adldas", 2), Some("A1"));
        assert_eq!(m.resolve("Puma", 2), None);
        assert!(matches!(
            NameIdMap::from_pairs([("A1", "x"), ("A1", "y")]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn otsu_separates_two_levels() {
        let g = GrayImage::from_fn(10, 10, |x, _| image::Luma([if x < 3 { 20 } else { 230 }]));
        let t = otsu_threshold(&g);
        assert!((20..230).contains(&t));
    }

    #[test]
    fn name_map_tsv_round_trip() {
        let m = NameIdMap::from_pairs([("A1", "Nike"), ("B22", "Le Coq")]).unwrap();
        assert_eq!(NameIdMap::from_tsv(&m.to_tsv()).unwrap(), m);
        assert!(NameIdMap::from_tsv("A1 Nike\n").is_err());
        assert!(NameIdMap::from_tsv("A1\tNike\nA1\tPuma\n").is_err());
    }
}
