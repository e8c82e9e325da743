use std::path::{Path, PathBuf};

use clap::Args;
use image::{Rgb, RgbImage};
use mallnav_core::listparse::{parse_list as parse_list_image, ListParseConfig, NameIdMap};
use mallnav_core::mapparse::{parse_map, render_nodes, MapParseConfig, ParsedMap};
use mallnav_core::ocr::{CommandOcr, OcrEngine, SidecarOcr};
use mallnav_core::raster::{load_rgb, save_png};
use mallnav_core::toponav::{build_graph, localize_multi, refine_position, shortest_path};
use mallnav_core::{Error, Result, TopoMap};
use serde::Serialize;

use crate::overlay::draw_path;
use crate::{emit, ensure_dir, read_text};

#[derive(Args)]
pub struct BuildMapArgs {
    /// Indicator map photograph.
    #[arg(long)]
    image: PathBuf,
    /// Shop name/id table from `parse-list`.
    #[arg(long)]
    names: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// OCR program run on each crop; defaults to the `<image>.ocr.tsv` sidecar.
    #[arg(long)]
    ocr_command: Option<String>,
    /// Observation radius in pixels; derived from the shop blocks by default.
    #[arg(long)]
    radius: Option<u32>,
    #[arg(long, default_value_t = 16.0)]
    q_road: f64,
    #[arg(long, default_value_t = 512.0)]
    q_shops: f64,
    /// Nodes smaller than this many pixels are merged into a neighbour.
    #[arg(long, default_value_t = 5)]
    min_node_pixels: usize,
    /// Writes text mask, inpainted map, segmentation and node images here.
    #[arg(long)]
    debug_dir: Option<PathBuf>,
    /// PNG with node id + 1 encoded as 24-bit RGB per road pixel, 0 elsewhere.
    #[arg(long)]
    node_raster: Option<PathBuf>,
}

#[derive(Args)]
pub struct ParseListArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    ocr_command: Option<String>,
    /// Name/id table; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lines left unpaired (headers, notes), as TSV.
    #[arg(long)]
    orphans: Option<PathBuf>,
}

#[derive(Args)]
pub struct LocalizeArgs {
    /// Topological map document from `build-map`.
    #[arg(long)]
    map: PathBuf,
    /// Recognised brand; repeat for several storefronts seen from one spot.
    #[arg(long, required = true)]
    brand: Vec<String>,
    /// Largest edit distance when matching a brand to the shop list.
    #[arg(long, default_value_t = 2)]
    max_dist: usize,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct NavigateArgs {
    #[arg(long)]
    map: PathBuf,
    /// Origin node, as `N3` or `3`.
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Background for the overlay; a blank canvas when omitted.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    overlay: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn ocr_engine(image: &Path, command: Option<&str>) -> Result<Box<dyn OcrEngine>> {
    Ok(match command {
        Some(c) => Box::new(CommandOcr::parse(c)?),
        None => Box::new(SidecarOcr::for_image(image)?),
    })
}

fn load_map(path: &Path) -> Result<TopoMap> {
    TopoMap::from_json(&read_text(path)?).map_err(|e| match e {
        Error::InvalidModel(reason) => Error::doc(path, reason),
        other => other,
    })
}

pub fn build_map(a: BuildMapArgs) -> Result<()> {
    let image = load_rgb(&a.image)?;
    let ocr = ocr_engine(&a.image, a.ocr_command.as_deref())?;
    let names = match &a.names {
        Some(p) => NameIdMap::from_tsv(&read_text(p)?).map_err(|r| Error::doc(p, r))?,
        None => NameIdMap::new(Vec::new())?,
    };
    let cfg = MapParseConfig {
        q_road: a.q_road,
        q_shops: a.q_shops,
        radius: a.radius,
        min_node_pixels: a.min_node_pixels,
        ..MapParseConfig::default()
    };
    let parsed = parse_map(&image, ocr.as_ref(), &cfg)?;
    let topo: TopoMap = build_graph(&parsed.nodes, names, &parsed.shops)?;
    let mut doc = topo.to_json();
    doc.push('\n');
    crate::write_text(&a.out, &doc)?;
    if let Some(dir) = &a.debug_dir {
        write_debug(dir, &parsed)?;
    }
    if let Some(p) = &a.node_raster {
        save_png(&node_raster(&parsed), p)?;
    }
    println!(
        "map\t{} nodes\t{} edges\t{} shops\tradius {}\t{}",
        topo.nodes.len(),
        topo.edges.len(),
        parsed.shops.len(),
        parsed.radius,
        a.out.display()
    );
    Ok(())
}

fn write_debug(dir: &PathBuf, p: &ParsedMap) -> Result<()> {
    ensure_dir(dir)?;
    save_png(&p.text_mask.to_image(), &dir.join("text_mask.png"))?;
    save_png(&p.inpainted, &dir.join("inpainted.png"))?;
    save_png(&p.segments.to_image(), &dir.join("segments.png"))?;
    save_png(&render_nodes(p), &dir.join("nodes.png"))
}

fn node_raster(p: &ParsedMap) -> RgbImage {
    let mut img = RgbImage::new(p.width, p.height);
    for n in &p.nodes {
        let v = n.id as u32 + 1;
        let c = Rgb([(v >> 16) as u8, (v >> 8) as u8, v as u8]);
        for &(x, y) in &n.pixels {
            img.put_pixel(x, y, c);
        }
    }
    img
}

pub fn parse_list(a: ParseListArgs) -> Result<()> {
    let image = load_rgb(&a.image)?;
    let ocr = ocr_engine(&a.image, a.ocr_command.as_deref())?;
    let parsed = parse_list_image(&image, ocr.as_ref(), &ListParseConfig::default())?;
    emit(a.out.as_deref(), &parsed.map.to_tsv())?;
    let mut orphans = String::from("side\tx\ty\tw\th\ttext\n");
    for o in &parsed.orphans {
        let side = match o.side {
            mallnav_core::listparse::LineSide::Name => "name",
            mallnav_core::listparse::LineSide::Id => "id",
        };
        let b = o.bbox;
        orphans.push_str(&format!("{side}\t{}\t{}\t{}\t{}\t{}\n", b.x, b.y, b.w, b.h, o.text));
    }
    match &a.orphans {
        Some(p) => crate::write_text(p, &orphans)?,
        None => {
            for o in &parsed.orphans {
                eprintln!("orphan\t{}", o.text);
            }
        }
    }
    if a.out.is_some() {
        println!("list\t{} entries\t{} orphans", parsed.map.len(), parsed.orphans.len());
    }
    Ok(())
}

#[derive(Serialize)]
struct Localization<'a> {
    brands: &'a [String],
    shop_ids: Vec<String>,
    candidates: Vec<usize>,
    /// Refined against the first brand's shop.
    refined_point: (f64, f64),
}

pub fn localize(a: LocalizeArgs) -> Result<()> {
    let map = load_map(&a.map)?;
    let shop_ids = a
        .brand
        .iter()
        .map(|b| map.resolve_brand(b, a.max_dist))
        .collect::<Result<Vec<_>>>()?;
    let brands: Vec<&str> = a.brand.iter().map(String::as_str).collect();
    let est = localize_multi(&brands, &map, a.max_dist)?;
    let refined_point = refine_position(&est, &shop_ids[0], &map, a.epsilon)?;
    let doc = Localization {
        brands: &a.brand,
        shop_ids,
        candidates: est.candidate_nodes,
        refined_point,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serialisable");
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn node_arg(s: &str) -> Result<usize> {
    let t = s.trim();
    let digits = t.strip_prefix(['N', 'n']).unwrap_or(t);
    digits
        .parse()
        .map_err(|_| Error::InvalidParams(format!("node {s:?} is not of the form N<id> or <id>")))
}

pub fn navigate(a: NavigateArgs) -> Result<()> {
    let map = load_map(&a.map)?;
    let (from, to) = (node_arg(&a.from)?, node_arg(&a.to)?);
    let (path, cost) = shortest_path(&map, from, to)?;
    let mut text = String::from("step\tnode\tx\ty\tcost\n");
    let adj = map.adjacency();
    let mut acc = 0.0;
    for (k, &n) in path.iter().enumerate() {
        if k > 0 {
            let prev = path[k - 1];
            acc += adj[prev].iter().find(|&&(v, _)| v == n).map_or(0.0, |&(_, w)| w);
        }
        let c = map.nodes[n].centroid;
        text.push_str(&format!("{k}\tN{n}\t{:.3}\t{:.3}\t{acc:.6}\n", c.0, c.1));
    }
    text.push_str(&format!("# total\t{cost:.6}\n"));
    emit(a.out.as_deref(), &text)?;
    if let Some(p) = &a.overlay {
        let background = a.image.as_deref().map(load_rgb).transpose()?;
        save_png(&draw_path(&map, &path, background), p)?;
    }
    Ok(())
}
