//! PNG and binary PNM (PGM/PPM) input and output at 8 or 16 bits.
//!
//! Loading converts any supported source to 16-bit samples first, so 8-bit
//! codes arrive as `k * 257 / 65535 == k / 255` exactly; samples are then
//! snapped to the [`ImageF`](crate::raster::ImageF) grid, preserving exact
//! integer round-trips at both depths. Saving quantizes with round-half-up.

use std::path::Path;

use image::{ImageBuffer, Luma, Rgb};

use crate::error::{Error, Result};
use crate::raster::ImageF;

/// Output sample depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

/// File format, detected from the output extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Png,
    Pgm,
    Ppm,
}

fn format_of(path: &Path) -> Result<Format> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => Ok(Format::Png),
        "pgm" => Ok(Format::Pgm),
        "ppm" => Ok(Format::Ppm),
        _ => Err(Error::InvalidParameter(format!(
            "unsupported image extension {:?} (expected png, pgm, or ppm)",
            path
        ))),
    }
}

/// Loads a PNG, PGM, or PPM image as a unit-range raster.
///
/// Gray sources (with or without alpha) become 1-channel rasters, color
/// sources 3-channel; alpha is discarded.
///
/// # Errors
/// `Io` when the file cannot be read, `Image` when decoding fails.
pub fn load_image(path: &Path) -> Result<ImageF> {
    let img = image::open(path)?;
    if img.color().has_color() {
        let rgb = img.to_rgb16();
        let (w, h) = (rgb.width() as usize, rgb.height() as usize);
        let raw = rgb.into_raw();
        let n = w * h;
        let mut data = vec![0.0; n * 3];
        for i in 0..n {
            for c in 0..3 {
                data[c * n + i] = raw[i * 3 + c] as f64 / 65535.0;
            }
        }
        ImageF::from_vec(w, h, 3, data)
    } else {
        let gray = img.to_luma16();
        let (w, h) = (gray.width() as usize, gray.height() as usize);
        let data = gray.into_raw().iter().map(|&v| v as f64 / 65535.0).collect();
        ImageF::from_vec(w, h, 1, data)
    }
}

/// Saves a raster as PNG, PGM, or PPM at the requested depth.
///
/// The format follows the file extension. PGM requires a 1-channel raster
/// and PPM a 3-channel one; PNG accepts both. Samples are quantized with
/// round-half-up.
///
/// # Errors
/// `InvalidParameter` for an unsupported extension or a channel/format
/// mismatch, `Io`/`Image` on write or encode failures.
pub fn save_image(path: &Path, img: &ImageF, depth: BitDepth) -> Result<()> {
    let format = format_of(path)?;
    match (format, img.channels()) {
        (Format::Pgm, c) if c != 1 => {
            return Err(Error::InvalidParameter(format!(
                "pgm stores a single channel, image has {c}"
            )))
        }
        (Format::Ppm, c) if c != 3 => {
            return Err(Error::InvalidParameter(format!(
                "ppm stores three channels, image has {c}"
            )))
        }
        _ => {}
    }
    let (w, h) = (img.width() as u32, img.height() as u32);
    match (format, depth) {
        (Format::Png, BitDepth::Eight) => {
            if img.channels() == 1 {
                let buf: ImageBuffer<Luma<u8>, _> =
                    ImageBuffer::from_raw(w, h, interleave8(img)).unwrap();
                buf.save(path)?;
            } else {
                let buf: ImageBuffer<Rgb<u8>, _> =
                    ImageBuffer::from_raw(w, h, interleave8(img)).unwrap();
                buf.save(path)?;
            }
        }
        (Format::Png, BitDepth::Sixteen) => {
            if img.channels() == 1 {
                let buf: ImageBuffer<Luma<u16>, _> =
                    ImageBuffer::from_raw(w, h, interleave16(img)).unwrap();
                buf.save(path)?;
            } else {
                let buf: ImageBuffer<Rgb<u16>, _> =
                    ImageBuffer::from_raw(w, h, interleave16(img)).unwrap();
                buf.save(path)?;
            }
        }
        (Format::Pgm, depth) | (Format::Ppm, depth) => save_pnm(path, img, depth)?,
    }
    Ok(())
}

/// Writes raw binary PNM (P5/P6); the image crate decodes but does not
/// encode 16-bit PNM, and the format is a header plus big-endian samples.
fn save_pnm(path: &Path, img: &ImageF, depth: BitDepth) -> Result<()> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let maxval = match depth {
        BitDepth::Eight => 255u32,
        BitDepth::Sixteen => 65535,
    };
    let mut bytes = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    match depth {
        BitDepth::Eight => bytes.extend_from_slice(&interleave8(img)),
        BitDepth::Sixteen => {
            for s in interleave16(img) {
                bytes.extend_from_slice(&s.to_be_bytes());
            }
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

fn interleave8(img: &ImageF) -> Vec<u8> {
    let n = img.pixel_count();
    let c = img.channels();
    let mut out = vec![0u8; n * c];
    for ch in 0..c {
        let plane = img.plane(ch);
        for i in 0..n {
            out[i * c + ch] = (plane[i] * 255.0).round() as u8;
        }
    }
    out
}

fn interleave16(img: &ImageF) -> Vec<u16> {
    let n = img.pixel_count();
    let c = img.channels();
    let mut out = vec![0u16; n * c];
    for ch in 0..c {
        let plane = img.plane(ch);
        for i in 0..n {
            out[i * c + ch] = (plane[i] * 65535.0).round() as u16;
        }
    }
    out
}
