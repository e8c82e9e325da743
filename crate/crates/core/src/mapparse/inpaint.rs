//! Diffusion fill of masked pixels.
//!
//! Each 4-connected masked region starts at the mean of the unmasked pixels
//! bordering it; Gauss-Seidel sweeps then replace every masked pixel by the
//! mean of its four neighbours until the largest update falls below
//! `TOLERANCE` or `iters` sweeps have run.

use image::{ImageBuffer, Pixel};

use crate::error::{Error, Result};
use crate::raster::{label_components, Connectivity, Mask};

const TOLERANCE: f32 = 1e-3;

pub fn inpaint_regions<P>(
    image: &ImageBuffer<P, Vec<u8>>,
    mask: &Mask,
    iters: usize,
) -> Result<ImageBuffer<P, Vec<u8>>>
where
    P: Pixel<Subpixel = u8>,
{
    let (w, h) = image.dimensions();
    if mask.width != w || mask.height != h {
        return Err(Error::InvalidParams(format!(
            "mask {}x{} does not match image {w}x{h}",
            mask.width, mask.height
        )));
    }
    let masked = mask.count();
    if masked == 0 {
        return Ok(image.clone());
    }
    if masked == mask.data.len() {
        return Err(Error::NothingToAnchor);
    }

    let ch = P::CHANNEL_COUNT as usize;
    let raw = image.as_raw();
    let mut buf: Vec<f32> = raw.iter().map(|&v| v as f32).collect();
    let (labels, count) = label_components(w, h, Connectivity::Four, |i| mask.data[i], |_, _| true);

    // Seed every region with the mean of its unmasked border.
    let mut sums = vec![0f64; count as usize * ch];
    let mut hits = vec![0u64; count as usize];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            if mask.data[i] {
                continue;
            }
            let mut seen = [u32::MAX; 4];
            for (k, (nx, ny)) in neighbours(x, y, w, h).enumerate() {
                let j = (ny * w + nx) as usize;
                let l = labels[j];
                if l != u32::MAX && !seen.contains(&l) {
                    seen[k] = l;
                    hits[l as usize] += 1;
                    for c in 0..ch {
                        sums[l as usize * ch + c] += raw[i * ch + c] as f64;
                    }
                }
            }
        }
    }
    for (i, &l) in labels.iter().enumerate() {
        if l != u32::MAX {
            for c in 0..ch {
                buf[i * ch + c] = (sums[l as usize * ch + c] / hits[l as usize].max(1) as f64) as f32;
            }
        }
    }

    let order: Vec<u32> = (0..w * h).filter(|&i| mask.data[i as usize]).collect();
    for _ in 0..iters {
        let mut delta = 0f32;
        for &i in &order {
            let (x, y) = (i % w, i / w);
            let mut acc = [0f32; 4];
            let mut k = 0f32;
            for (nx, ny) in neighbours(x, y, w, h) {
                let j = (ny * w + nx) as usize;
                for c in 0..ch {
                    acc[c] += buf[j * ch + c];
                }
                k += 1.0;
            }
            for c in 0..ch {
                let v = acc[c] / k;
                let cur = &mut buf[i as usize * ch + c];
                delta = delta.max((v - *cur).abs());
                *cur = v;
            }
        }
        if delta < TOLERANCE {
            break;
        }
    }

    let mut out = raw.clone();
    for &i in &order {
        for c in 0..ch {
            let idx = i as usize * ch + c;
            out[idx] = buf[idx].round().clamp(0.0, 255.0) as u8;
        }
    }
    Ok(ImageBuffer::from_raw(w, h, out).expect("same dimensions"))
}

fn neighbours(x: u32, y: u32, w: u32, h: u32) -> impl Iterator<Item = (u32, u32)> {
    let cand = [
        (x.wrapping_sub(1), y),
        (x + 1, y),
        (x, y.wrapping_sub(1)),
        (x, y + 1),
    ];
    cand.into_iter().filter(move |&(a, b)| a < w && b < h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{GrayImage, Luma, Rgb, RgbImage};

    #[test]
    fn empty_mask_is_identity() {
        let img = RgbImage::from_fn(9, 7, |x, y| Rgb([x as u8 * 20, y as u8 * 30, 7]));
        assert_eq!(inpaint_regions(&img, &Mask::new(9, 7), 50).unwrap(), img);
    }

    #[test]
    fn uniform_stays_uniform() {
        let img = GrayImage::from_pixel(12, 12, Luma([77]));
        let mask = Mask::from_fn(12, 12, |x, y| x > 3 && y < 8);
        assert_eq!(inpaint_regions(&img, &mask, 100).unwrap(), img);
    }

    #[test]
    fn full_mask_and_size_mismatch() {
        let img = GrayImage::new(4, 4);
        assert!(matches!(
            inpaint_regions(&img, &Mask::from_fn(4, 4, |_, _| true), 5),
            Err(Error::NothingToAnchor)
        ));
        assert!(inpaint_regions(&img, &Mask::new(3, 4), 5).is_err());
    }

    #[test]
    fn gradient_boundary_is_interpolated() {
        // Row-constant ramp; the fill of a hole should stay near the ramp.
        let img = GrayImage::from_fn(30, 30, |_, y| Luma([(y * 8) as u8]));
        let mask = Mask::from_fn(30, 30, |x, y| (10..20).contains(&x) && (10..20).contains(&y));
        let out = inpaint_regions(&img, &mask, 2000).unwrap();
        for y in 10..20 {
            let v = out.get_pixel(15, y).0[0] as i32;
            assert!((v - (y * 8) as i32).abs() <= 3, "row {y}: {v}");
        }
    }
}
