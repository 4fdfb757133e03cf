//! Escape-time rendering of Julia and Mandelbrot sets to binary PGM.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RenderMode {
    Julia { c_re: f64, c_im: f64 },
    Mandelbrot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenderConfig {
    pub center_re: f64,
    pub center_im: f64,
    pub width: f64,
    pub pixels_w: usize,
    pub pixels_h: usize,
    pub max_iter: u32,
    pub escape_radius: f64,
    #[serde(flatten)]
    pub mode: RenderMode,
}

impl RenderConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.pixels_w < 16 || self.pixels_h < 16 {
            return Err("pixels must be at least 16x16".into());
        }
        if !(self.width > 0.0) {
            return Err("width must be positive".into());
        }
        Ok(())
    }
}

/// Escape-time iteration count, clamped to 8-bit grayscale; interior = 0.
fn escape_shade(mut z: Complex64, c: Complex64, max_iter: u32, radius: f64) -> u8 {
    let r2 = radius * radius;
    for k in 0..max_iter {
        if z.norm_sqr() > r2 {
            return (k.min(255)) as u8;
        }
        z = z * z + c;
    }
    0
}

/// Renders the configured frame row-parallel; output is independent of the
/// worker count because every pixel is a pure function of its coordinates.
pub fn render(cfg: &RenderConfig) -> Vec<u8> {
    let (w, h) = (cfg.pixels_w, cfg.pixels_h);
    let height_world = cfg.width * (h as f64) / (w as f64);
    let mut buf = vec![0u8; w * h];
    buf.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        let im = cfg.center_im + height_world * ((j as f64 + 0.5) / h as f64 - 0.5);
        for (i, px) in row.iter_mut().enumerate() {
            let re = cfg.center_re + cfg.width * ((i as f64 + 0.5) / w as f64 - 0.5);
            let p = Complex64::new(re, im);
            *px = match cfg.mode {
                RenderMode::Julia { c_re, c_im } => {
                    let c = Complex64::new(c_re, c_im);
                    let radius = cfg.escape_radius.max(2.0 + c.norm());
                    escape_shade(p, c, cfg.max_iter, radius)
                }
                RenderMode::Mandelbrot => {
                    let radius = cfg.escape_radius.max(2.0 + p.norm());
                    escape_shade(Complex64::new(0.0, 0.0), p, cfg.max_iter, radius)
                }
            };
        }
    });
    buf
}

/// Binary PGM (P5) encoding.
pub fn to_pgm(cfg: &RenderConfig, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", cfg.pixels_w, cfg.pixels_h).into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Parses a P5 buffer back into (width, height, pixels).
pub fn from_pgm(data: &[u8]) -> Result<(usize, usize, Vec<u8>), String> {
    let header_end = data
        .windows(1)
        .enumerate()
        .scan(0usize, |newlines, (i, w)| {
            if w[0] == b'\n' {
                *newlines += 1;
            }
            Some((i, *newlines))
        })
        .find(|&(_, n)| n == 3)
        .map(|(i, _)| i + 1)
        .ok_or("truncated header")?;
    let header = std::str::from_utf8(&data[..header_end]).map_err(|e| e.to_string())?;
    let mut lines = header.lines();
    if lines.next() != Some("P5") {
        return Err("not a P5 file".into());
    }
    let dims: Vec<usize> = lines
        .next()
        .ok_or("missing dimensions")?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| "bad dimension".to_string()))
        .collect::<Result<_, _>>()?;
    if dims.len() != 2 {
        return Err("bad dimension line".into());
    }
    let pixels = data[header_end..].to_vec();
    if pixels.len() != dims[0] * dims[1] {
        return Err("pixel payload size mismatch".into());
    }
    Ok((dims[0], dims[1], pixels))
}
