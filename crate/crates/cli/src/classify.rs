use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use mallnav_core::fusion::{default_alpha_grid, evaluate_accuracy, FusionMode};
use mallnav_core::logistic::TrainConfig;
use mallnav_core::ocr::SidecarOcr;
use mallnav_core::raster::load_rgb;
use mallnav_core::storefront::{
    featurize, score_fpd, split, train_fpd_on, train_models, training_brands, vocabulary, ClassifierBundle, Corpus,
    CorpusDetection, CorpusEntry, Split, StyleProvider, Storefront, TextPipeline,
};
use mallnav_core::stylefeat::load_patch_features;
use mallnav_core::stylefeat::{PatchSpec, BUILTIN_DIM};
use mallnav_core::textfeat::NGramVocabulary;
use mallnav_core::{Error, Result};

use crate::{emit, read_text};

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Text,
    Style,
    Early,
    Late,
}

impl From<Mode> for FusionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Text => FusionMode::TextOnly,
            Mode::Style => FusionMode::StyleOnly,
            Mode::Early => FusionMode::Early,
            Mode::Late => FusionMode::Late,
        }
    }
}

/// Options shared by `train` and `eval`.
#[derive(Args)]
pub struct Training {
    /// Corpus directory holding corpus.json.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "late")]
    mode: Mode,
    /// Longest n-gram kept in the text feature.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Canonical n-gram vocabulary, one gram per line; built from the
    /// training brands when omitted.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// MGFT style features; the built-in descriptor is used when omitted.
    #[arg(long)]
    features: Option<PathBuf>,
    /// Detections with FPD probability at or above this are kept.
    #[arg(long, default_value_t = 0.5)]
    fpd_threshold: f64,
    /// Use every detection unfiltered.
    #[arg(long)]
    no_fpd: bool,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    reg: f64,
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    training: Training,
    /// Classifier document.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    training: Training,
    /// Accuracy report as TSV; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichSplit {
    Train,
    Test,
    All,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Classifier document from `train`.
    #[arg(long)]
    model: PathBuf,
    /// Classify the items of a corpus.
    #[arg(long, conflicts_with = "image")]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "test")]
    split: WhichSplit,
    /// Classify one storefront image.
    #[arg(long, requires = "detections")]
    image: Option<PathBuf>,
    /// Text detections for `--image`, one `x y w h text` line each.
    #[arg(long)]
    detections: Option<PathBuf>,
    /// MGFT style features, required when the model was trained on them.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Prepared {
    items: Vec<Storefront>,
    vocab: NGramVocabulary,
    style: StyleProvider,
    cfg: TrainConfig<f64>,
}

fn style_provider(features: Option<&Path>, seed: u64) -> Result<StyleProvider> {
    match features {
        Some(p) => StyleProvider::from_feature_file(&load_patch_features(p)?),
        None => Ok(StyleProvider::Builtin(PatchSpec {
            seed,
            ..PatchSpec::default()
        })),
    }
}

fn prepare(t: &Training, seed: u64) -> Result<Prepared> {
    if t.k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    if t.iters == 0 || !(t.reg >= 0.0) {
        return Err(Error::InvalidParams("iters must be positive and reg non-negative".into()));
    }
    let items = Corpus::load(&t.corpus)?.load_images()?;
    let canonical = t.vocab.as_deref().map(NGramVocabulary::load).transpose()?;
    let vocab = vocabulary(&training_brands(&items), canonical)?;
    Ok(Prepared {
        items,
        vocab,
        style: style_provider(t.features.as_deref(), seed)?,
        cfg: TrainConfig {
            reg: t.reg,
            iters: t.iters,
            seed,
            ..TrainConfig::default()
        },
    })
}

fn pipeline(t: &Training, p: &Prepared, train: &[&Storefront]) -> Result<TextPipeline<f64>> {
    let fpd = if t.no_fpd {
        None
    } else {
        Some(train_fpd_on(train, &p.vocab, &p.cfg, t.fpd_threshold)?)
    };
    TextPipeline::new(p.vocab.clone(), t.k, fpd)
}

pub fn train(a: TrainArgs, seed: u64) -> Result<()> {
    let t = &a.training;
    let p = prepare(t, seed)?;
    let train = split(&p.items, Split::Train);
    let text = pipeline(t, &p, &train)?;
    let samples = featurize(&train, &text, &p.style)?;
    let models = train_models(&samples, &default_alpha_grid(), &p.cfg, t.k)?;
    let model = models.model(t.mode.into())?;
    let bundle = ClassifierBundle {
        vocab: p.vocab.grams().to_vec(),
        vocab_hash: p.vocab.hash(),
        k: t.k,
        patch: match &p.style {
            StyleProvider::Builtin(spec) => *spec,
            StyleProvider::Precomputed(_) => PatchSpec::default(),
        },
        style_dim: match &p.style {
            StyleProvider::Builtin(_) => BUILTIN_DIM,
            StyleProvider::Precomputed(_) => 0,
        },
        fpd: text.fpd.clone(),
        model,
    };
    crate::write_text(&a.out, &bundle.to_json())?;
    println!(
        "model\t{}\tk {}\talpha {:.1}\t{} train samples\t{}",
        bundle.model.mode,
        t.k,
        bundle.model.alpha,
        samples.len(),
        a.out.display()
    );
    Ok(())
}

pub fn classify(a: ClassifyArgs) -> Result<()> {
    let bundle = ClassifierBundle::<f64>::from_json(&read_text(&a.model)?).map_err(|e| match e {
        Error::InvalidModel(r) => Error::doc(&a.model, r),
        other => other,
    })?;
    let text = bundle.text_pipeline()?;
    let style = match (&a.features, bundle.style_dim) {
        (Some(p), _) => style_provider(Some(p), 0)?,
        (None, 0) => {
            return Err(Error::InvalidParams(
                "model was trained on exporter features; pass --features".into(),
            ))
        }
        (None, _) => StyleProvider::Builtin(bundle.patch),
    };
    let items: Vec<Storefront> = match (&a.corpus, &a.image) {
        (Some(dir), _) => {
            let all = Corpus::load(dir)?.load_images()?;
            match a.split {
                WhichSplit::All => all,
                WhichSplit::Train => split(&all, Split::Train).into_iter().cloned().collect(),
                WhichSplit::Test => split(&all, Split::Test).into_iter().cloned().collect(),
            }
        }
        (None, Some(img)) => vec![single(img, a.detections.as_deref().expect("clap enforces"))?],
        (None, None) => return Err(Error::InvalidParams("give --corpus or --image".into())),
    };
    let refs: Vec<&Storefront> = items.iter().collect();
    let samples = featurize(&refs, &text, &style)?;
    let mut out = String::from("id\tpredicted\tscore\ttruth\n");
    for (s, f) in items.iter().zip(&samples) {
        let p = bundle.model.classify(&f.text, &f.style)?;
        let truth = if a.corpus.is_some() { s.entry.brand.as_str() } else { "" };
        out.push_str(&format!("{}\t{}\t{:.6}\t{truth}\n", s.entry.id, p.label, p.scores[p.index]));
    }
    emit(a.out.as_deref(), &out)
}

fn single(image: &Path, detections: &Path) -> Result<Storefront> {
    let dets = SidecarOcr::parse(&read_text(detections)?).map_err(|r| Error::doc(detections, r))?;
    let id = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    Ok(Storefront {
        entry: CorpusEntry {
            id,
            brand: String::new(),
            split: Split::Test,
            image: image.display().to_string(),
            detections: dets
                .entries
                .into_iter()
                .map(|e| CorpusDetection {
                    bbox: e.bbox,
                    text: e.text,
                    is_text: None,
                })
                .collect(),
        },
        image: load_rgb(image)?,
    })
}

pub fn eval(a: EvalArgs, seed: u64) -> Result<()> {
    let t = &a.training;
    let p = prepare(t, seed)?;
    let train = split(&p.items, Split::Train);
    let test = split(&p.items, Split::Test);
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let text = pipeline(t, &p, &train)?;
    let ftr = featurize(&train, &text, &p.style)?;
    let fte = featurize(&test, &text, &p.style)?;
    let grid = default_alpha_grid();
    let models = train_models(&ftr, &grid, &p.cfg, t.k)?;
    let chosen: FusionMode = t.mode.into();

    let mut out = format!("# k={}\ttrain={}\ttest={}\n", t.k, ftr.len(), fte.len());
    out.push_str("section\tkey\tvalue\tselected\n");
    for mode in [FusionMode::TextOnly, FusionMode::StyleOnly, FusionMode::Early, FusionMode::Late] {
        let acc = evaluate_accuracy(&models.model(mode)?, &fte)?;
        let mark = if mode == chosen { "*" } else { "" };
        out.push_str(&format!("accuracy\t{mode}\t{acc:.6}\t{mark}\n"));
    }
    for (alpha, acc) in models.alpha_curve(&fte, &grid)? {
        let mark = if alpha == models.alpha { "*" } else { "" };
        out.push_str(&format!("alpha\t{alpha:.1}\t{acc:.6}\t{mark}\n"));
    }
    if let Some(fpd) = &text.fpd {
        let s = score_fpd(&test, &p.vocab, fpd)?;
        out.push_str(&format!("fpd\trecall\t{:.6}\t\n", s.recall));
        out.push_str(&format!("fpd\trejection\t{:.6}\t\n", s.rejection));
    }
    out.push_str(&format!("dim\ttext\t{}\t\n", text.vocab_k.len()));
    out.push_str(&format!("dim\tstyle\t{}\t\n", fte.first().map_or(0, |f| f.style.len())));
    emit(a.report.as_deref(), &out)
}
