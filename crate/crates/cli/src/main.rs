//! `mallnav`: storefront classification and indicator-map navigation.
//!
//! Every subcommand takes `--seed`; equal inputs and seed give byte-equal
//! outputs. Module errors exit with status 1 after printing
//! `error[<category>]: <message>`; usage errors exit with status 2.

mod classify;
mod map;
mod overlay;
mod synth;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mallnav_core::{Error, Result};

#[derive(Parser)]
#[command(name = "mallnav", version, about = "Storefront classification and mall-map navigation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
pub struct Common {
    /// Source of all randomness.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an indicator map into a topological map document.
    BuildMap(map::BuildMapArgs),
    /// Parse a rendered shop list into a name/id table.
    ParseList(map::ParseListArgs),
    /// Train a storefront classifier on a corpus.
    Train(classify::TrainArgs),
    /// Classify storefront images with a trained classifier.
    Classify(classify::ClassifyArgs),
    /// Candidate nodes and refined position for recognised brands.
    Localize(map::LocalizeArgs),
    /// Shortest path between two nodes of a topological map.
    Navigate(map::NavigateArgs),
    /// Train on the train split and report test accuracy per fusion mode.
    Eval(classify::EvalArgs),
    /// Generate synthetic data with ground truth.
    GenSynth(synth::GenSynthArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.common.seed;
    let result = match cli.command {
        Command::BuildMap(a) => map::build_map(a),
        Command::ParseList(a) => map::parse_list(a),
        Command::Train(a) => classify::train(a, seed),
        Command::Classify(a) => classify::classify(a),
        Command::Localize(a) => map::localize(a),
        Command::Navigate(a) => map::navigate(a),
        Command::Eval(a) => classify::eval(a, seed),
        Command::GenSynth(a) => synth::gen_synth(a, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(1)
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => std::fs::create_dir_all(p).map_err(|e| Error::io(p, e)),
        _ => Ok(()),
    }
}

pub fn ensure_dir(dir: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Print to stdout, or write to `out` when given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
