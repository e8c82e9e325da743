//! OCR adapters: a subprocess recognizer and a sidecar-file stub.

use std::path::{Path, PathBuf};
use std::process::Command;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Rect;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrResult {
    pub region: Rect,
    pub text: String,
    pub confidence: f64,
}

pub trait OcrEngine: Send + Sync {
    /// Recognize the text inside `region` of `image`.
    fn recognize(&self, image: &RgbImage, region: Rect) -> Result<OcrResult>;
}

fn clamp_region(region: Rect, image: &RgbImage) -> Rect {
    let full = Rect::new(0, 0, image.width(), image.height());
    region.intersection(&full).unwrap_or_default()
}

/// One annotated text box from a sidecar file.
#[derive(Debug, Clone, PartialEq)]
pub struct SidecarEntry {
    pub bbox: Rect,
    pub text: String,
}

/// Reads `x y w h text` lines; the text is the rest of the line and may
/// contain spaces. Blank lines and lines starting with `#` are skipped.
#[derive(Debug, Clone, Default)]
pub struct SidecarOcr {
    pub entries: Vec<SidecarEntry>,
}

impl SidecarOcr {
    /// Sidecar path for an image: `<image>.ocr.tsv`.
    pub fn sidecar_path(image: &Path) -> PathBuf {
        let mut s = image.as_os_str().to_owned();
        s.push(".ocr.tsv");
        PathBuf::from(s)
    }

    pub fn for_image(image: &Path) -> Result<Self> {
        Self::load(&Self::sidecar_path(image))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|reason| Error::doc(path, reason))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(5, [' ', '\t']);
            let mut num = || -> std::result::Result<u32, String> {
                parts
                    .next()
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| format!("line {}: expected x y w h text", n + 1))
            };
            let (x, y, w, h) = (num()?, num()?, num()?, num()?);
            let text = parts.next().unwrap_or("").trim().to_string();
            entries.push(SidecarEntry {
                bbox: Rect::new(x, y, w, h),
                text,
            });
        }
        Ok(SidecarOcr { entries })
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{} {} {} {} {}\n", e.bbox.x, e.bbox.y, e.bbox.w, e.bbox.h, e.text))
            .collect()
    }
}

impl OcrEngine for SidecarOcr {
    /// Joins, left to right, the texts of entries lying at least half inside
    /// the region.
    fn recognize(&self, image: &RgbImage, region: Rect) -> Result<OcrResult> {
        let region = clamp_region(region, image);
        let mut hits: Vec<&SidecarEntry> = self
            .entries
            .iter()
            .filter(|e| {
                let inside = e.bbox.intersection(&region).map_or(0, |r| r.area());
                e.bbox.area() > 0 && inside * 2 >= e.bbox.area()
            })
            .collect();
        hits.sort_by_key(|e| (e.bbox.x, e.bbox.y));
        let text = hits.iter().map(|e| e.text.as_str()).collect::<Vec<_>>().join(" ");
        Ok(OcrResult {
            region,
            confidence: if hits.is_empty() { 0.0 } else { 1.0 },
            text,
        })
    }
}

/// Runs `program args.. <crop.png>` and takes trimmed stdout as the text.
#[derive(Debug, Clone)]
pub struct CommandOcr {
    pub program: String,
    pub args: Vec<String>,
}

impl CommandOcr {
    /// Split a command line on whitespace.
    pub fn parse(command: &str) -> Result<Self> {
        let mut words = command.split_whitespace().map(String::from);
        let program = words
            .next()
            .ok_or_else(|| Error::InvalidParams("empty OCR command".into()))?;
        Ok(CommandOcr {
            program,
            args: words.collect(),
        })
    }
}

impl OcrEngine for CommandOcr {
    fn recognize(&self, image: &RgbImage, region: Rect) -> Result<OcrResult> {
        let region = clamp_region(region, image);
        if region.is_empty() {
            return Err(Error::Ocr("empty region".into()));
        }
        let crop = image::imageops::crop_imm(image, region.x, region.y, region.w, region.h).to_image();
        let file = tempfile::Builder::new()
            .suffix(".png")
            .tempfile()
            .map_err(|e| Error::io(Path::new("<ocr crop>"), e))?;
        crop.save_with_format(file.path(), image::ImageFormat::Png)
            .map_err(|e| Error::Ocr(e.to_string()))?;
        let out = Command::new(&self.program)
            .args(&self.args)
            .arg(file.path())
            .output()
            .map_err(|e| Error::Ocr(format!("{}: {e}", self.program)))?;
        if !out.status.success() {
            return Err(Error::Ocr(format!("{} exited with {}", self.program, out.status)));
        }
        let text = String::from_utf8_lossy(&out.stdout).trim().to_string();
        Ok(OcrResult {
            region,
            confidence: if text.is_empty() { 0.0 } else { 1.0 },
            text,
        })
    }
}
