//! Frame directories (`frame_%06d.png`), raw float sidecars and kernel files.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, RgbImage};
use stvsr_core::{Kernel3D, VideoTensor};

use crate::error::{io_err, CliError, Result};

pub const SIDECAR_MAGIC: &[u8; 8] = b"VTF32\0\0\0";

pub fn frame_name(index: usize, ext: &str) -> String {
    format!("frame_{index:06}.{ext}")
}

fn frame_index(name: &str, ext: &str) -> Option<usize> {
    let digits = name.strip_prefix("frame_")?.strip_suffix(ext)?.strip_suffix('.')?;
    if digits.len() == 6 && digits.bytes().all(|b| b.is_ascii_digit()) {
        digits.parse().ok()
    } else {
        None
    }
}

fn input_err(path: impl Into<PathBuf>, message: impl Into<String>) -> CliError {
    CliError::Input { path: path.into(), message: message.into() }
}

/// Indices of `frame_NNNNNN.<ext>` files in `dir`, checked to run 0..n.
fn contiguous_indices(dir: &Path, ext: &str) -> Result<usize> {
    let mut found = BTreeSet::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if let Some(i) = entry.file_name().to_str().and_then(|n| frame_index(n, ext)) {
            found.insert(i);
        }
    }
    if found.is_empty() {
        return Err(input_err(dir, format!("no frame_NNNNNN.{ext} files")));
    }
    if let Some(missing) = (0..found.len()).find(|i| !found.contains(i)) {
        return Err(input_err(dir.join(frame_name(missing, ext)), format!("missing frame index {missing}")));
    }
    Ok(found.len())
}

/// Reads an 8-bit RGB or grayscale PNG sequence into `[0, 1]`.
pub fn read_frames(dir: &Path) -> Result<VideoTensor> {
    let count = contiguous_indices(dir, "png")?;
    let mut shape: Option<(u32, u32, usize)> = None;
    let mut data = Vec::new();
    for t in 0..count {
        let path = dir.join(frame_name(t, "png"));
        let img = image::open(&path).map_err(|source| CliError::Image { path: path.clone(), source })?;
        let (w, h) = (img.width(), img.height());
        let samples = match img {
            DynamicImage::ImageLuma8(g) => (1, g.into_raw()),
            DynamicImage::ImageRgb8(c) => (3, c.into_raw()),
            other => {
                return Err(input_err(
                    &path,
                    format!("unsupported pixel format {:?}, need 8-bit RGB or grayscale", other.color()),
                ))
            }
        };
        let this = (h, w, samples.0);
        match shape {
            None => shape = Some(this),
            Some(first) if first != this => {
                return Err(input_err(
                    &path,
                    format!("{h}x{w}x{} differs from first frame {}x{}x{}", this.2, first.0, first.1, first.2),
                ))
            }
            _ => {}
        }
        data.extend(samples.1.iter().map(|&b| b as f64 / 255.0));
    }
    let (h, w, c) = shape.expect("at least one frame");
    Ok(VideoTensor::from_vec([count, h as usize, w as usize], c, data)?)
}

/// `round(clamp(x, 0, 1) * 255)`, with ties going away from zero.
pub fn quantize(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes one PNG per frame, plus a float sidecar per frame when `sidecars` is set.
pub fn write_frames(v: &VideoTensor, dir: &Path, sidecars: bool) -> Result<()> {
    let [frames, h, w, c] = v.dims();
    if c != 1 && c != 3 {
        return Err(input_err(dir, format!("cannot store {c} channels as PNG")));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for t in 0..frames {
        let frame = v.frame(t);
        let bytes: Vec<u8> = frame.iter().map(|&x| quantize(x)).collect();
        let path = dir.join(frame_name(t, "png"));
        let saved = if c == 1 {
            GrayImage::from_raw(w as u32, h as u32, bytes).expect("buffer size").save(&path)
        } else {
            RgbImage::from_raw(w as u32, h as u32, bytes).expect("buffer size").save(&path)
        };
        saved.map_err(|source| CliError::Image { path: path.clone(), source })?;
        if sidecars {
            write_sidecar(&dir.join(frame_name(t, "f32")), [h, w, c], frame)?;
        }
    }
    Ok(())
}

pub fn encode_sidecar(dims: [usize; 3], values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 4 * values.len());
    out.extend_from_slice(SIDECAR_MAGIC);
    for d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn write_sidecar(path: &Path, dims: [usize; 3], values: &[f64]) -> Result<()> {
    fs::write(path, encode_sidecar(dims, values)).map_err(io_err(path))
}

/// Returns `(h, w, c)` and the samples in (h, w, c) order.
pub fn read_sidecar(path: &Path) -> Result<([usize; 3], Vec<f32>)> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() < 20 || &bytes[..8] != SIDECAR_MAGIC {
        return Err(input_err(path, "not a VTF32 sidecar"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap()) as usize;
    let dims = [word(0), word(1), word(2)];
    let body = &bytes[20..];
    if body.len() != 4 * dims.iter().product::<usize>() {
        return Err(input_err(path, format!("payload does not match dims {dims:?}")));
    }
    let values = body.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap())).collect();
    Ok((dims, values))
}

/// Loads every `frame_NNNNNN.f32` in `dir` as one tensor.
pub fn read_sidecars(dir: &Path) -> Result<VideoTensor> {
    let count = contiguous_indices(dir, "f32")?;
    let mut first = None;
    let mut data = Vec::new();
    for t in 0..count {
        let path = dir.join(frame_name(t, "f32"));
        let (dims, values) = read_sidecar(&path)?;
        if *first.get_or_insert(dims) != dims {
            return Err(input_err(&path, "dims differ from first sidecar"));
        }
        data.extend(values.iter().map(|&v| v as f64));
    }
    let [h, w, c] = first.expect("at least one sidecar");
    Ok(VideoTensor::from_vec([count, h, w], c, data)?)
}

pub fn read_kernel(path: &Path) -> Result<Kernel3D> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Kernel3D::from_text(&text).map_err(|e| input_err(path, e.to_string()))
}

pub fn write_kernel(path: &Path, kernel: &Kernel3D) -> Result<()> {
    fs::write(path, kernel.to_text()).map_err(io_err(path))
}
