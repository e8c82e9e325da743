use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use mallnav_core::geom::Rect;
use mallnav_core::ocr::SidecarOcr;
use mallnav_core::raster::save_png;
use mallnav_core::storefront::{save_corpus, Storefront};
use mallnav_core::synth::{
    generate_list, generate_mall, generate_storefronts, render_list, MallParams, MallShop, Observation, RoadLayout,
    StorefrontParams,
};
use mallnav_core::Result;
use serde::Serialize;

use crate::{ensure_dir, write_text};

#[derive(Args)]
pub struct GenSynthArgs {
    #[command(subcommand)]
    what: What,
}

#[derive(Subcommand)]
enum What {
    /// Storefront corpus: images plus corpus.json with planted detections.
    Storefronts(StorefrontArgs),
    /// Indicator map, matching shop list, OCR sidecars and truth.json.
    Mall(MallArgs),
    /// A standalone two-column shop list with its manifest.
    List(ListArgs),
}

#[derive(Args)]
struct StorefrontArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50)]
    per_class: usize,
    /// Comma-separated brand names; defaults to ten built-in brands.
    #[arg(long, value_delimiter = ',')]
    brands: Vec<String>,
    #[arg(long, default_value_t = 0.55)]
    p_text: f64,
    #[arg(long, default_value_t = 0.55)]
    p_style: f64,
    #[arg(long, default_value_t = 0.2)]
    false_positive_rate: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Ring,
    Corridor,
    Cross,
}

#[derive(Args)]
struct MallArgs {
    #[arg(long)]
    out: PathBuf,
    /// Random when omitted.
    #[arg(long, value_enum)]
    layout: Option<Layout>,
    #[arg(long)]
    no_service_blocks: bool,
}

#[derive(Args)]
struct ListArgs {
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct MallTruth<'a> {
    format: &'static str,
    version: u32,
    layout: RoadLayout,
    width: u32,
    height: u32,
    road: &'a [Rect],
    road_width: u32,
    shops: &'a [MallShop],
    services: &'a [Rect],
    legends: &'a [Rect],
    observations: &'a [Observation],
}

#[derive(Serialize)]
struct ListTruth<'a> {
    format: &'static str,
    version: u32,
    header: Option<&'a str>,
    entries: Vec<(&'a str, &'a str)>,
}

pub fn gen_synth(args: GenSynthArgs, seed: u64) -> Result<()> {
    match args.what {
        What::Storefronts(a) => {
            let mut params = StorefrontParams {
                per_class: a.per_class,
                p_text: a.p_text,
                p_style: a.p_style,
                false_positive_rate: a.false_positive_rate,
                ..StorefrontParams::default()
            };
            if !a.brands.is_empty() {
                params.brands = a.brands;
            }
            check_params(&params)?;
            let items: Vec<Storefront> = generate_storefronts(&params, seed).iter().map(Storefront::from_sample).collect();
            ensure_dir(&a.out)?;
            let corpus = save_corpus(&a.out, &items)?;
            println!("storefronts\t{}\t{}", corpus.entries.len(), a.out.display());
            Ok(())
        }
        What::Mall(a) => {
            let params = MallParams {
                layout: a.layout.map(|l| match l {
                    Layout::Ring => RoadLayout::Ring,
                    Layout::Corridor => RoadLayout::Corridor,
                    Layout::Cross => RoadLayout::Cross,
                }),
                service_blocks: !a.no_service_blocks,
                ..MallParams::default()
            };
            let mall = generate_mall(&params, seed);
            ensure_dir(&a.out)?;
            let map_path = a.out.join("map.png");
            save_png(&mall.image, &map_path)?;
            write_text(&SidecarOcr::sidecar_path(&map_path), &mall.ocr.to_tsv())?;

            let entries: Vec<(String, String)> =
                mall.shops.iter().map(|s| (s.shop_id.clone(), s.name.clone())).collect();
            let list = render_list(&entries, Some("SHOPS"), 60, 640);
            let list_path = a.out.join("list.png");
            save_png(&list.image, &list_path)?;
            write_text(&SidecarOcr::sidecar_path(&list_path), &list.ocr.to_tsv())?;

            let (width, height) = mall.image.dimensions();
            let truth = MallTruth {
                format: "mallnav-mall-truth",
                version: 1,
                layout: mall.layout,
                width,
                height,
                road: &mall.road,
                road_width: mall.road_width,
                shops: &mall.shops,
                services: &mall.services,
                legends: &mall.legends,
                observations: &mall.observations,
            };
            write_text(&a.out.join("truth.json"), &pretty(&truth))?;
            println!("mall\t{:?}\t{} shops\t{}", mall.layout, mall.shops.len(), a.out.display());
            Ok(())
        }
        What::List(a) => {
            let list = generate_list(seed);
            ensure_dir(&a.out)?;
            let path = a.out.join("list.png");
            save_png(&list.image, &path)?;
            write_text(&SidecarOcr::sidecar_path(&path), &list.ocr.to_tsv())?;
            let truth = ListTruth {
                format: "mallnav-list-truth",
                version: 1,
                header: list.header.as_deref(),
                entries: list.entries.iter().map(|(i, n)| (i.as_str(), n.as_str())).collect(),
            };
            write_text(&a.out.join("truth.json"), &pretty(&truth))?;
            println!("list\t{} rows\t{}", list.entries.len(), a.out.display());
            Ok(())
        }
    }
}

fn check_params(p: &StorefrontParams) -> Result<()> {
    let bad = |what: &str| Err(mallnav_core::Error::InvalidParams(what.into()));
    if p.brands.len() < 2 {
        return bad("at least two brands are needed");
    }
    if p.per_class == 0 {
        return bad("per-class must be positive");
    }
    for (name, v) in [("p-text", p.p_text), ("p-style", p.p_style)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(mallnav_core::Error::InvalidParams(format!("{name} {v} outside [0, 1]")));
        }
    }
    if !(0.0..0.5).contains(&p.false_positive_rate) {
        return bad("false-positive-rate must lie in [0, 0.5)");
    }
    Ok(())
}

fn pretty<S: Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("manifest serialises");
    s.push('\n');
    s
}
