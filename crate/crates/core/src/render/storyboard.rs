//! Keyframe grids with frame-index labels.

use super::{select_keyframes, RenderConfig, Rgb};
use crate::error::{Error, Result};
use crate::trajectory::Frame;

/// 5×7 digit glyphs, one byte per row, low five bits, MSB on the left.
const DIGITS: [[u8; 7]; 10] = [
    [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
    [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
    [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
    [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
    [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
    [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
    [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
    [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
    [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
    [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
];

const PAD: u32 = 2;

/// (rows, columns) for a supported keyframe count.
pub fn grid_layout(n: usize) -> Option<(u32, u32)> {
    match n {
        2 => Some((1, 2)),
        4 => Some((2, 2)),
        9 => Some((3, 3)),
        _ => None,
    }
}

struct Raster {
    width: u32,
    px: Vec<u8>,
}

impl Raster {
    fn put(&mut self, x: u32, y: u32, c: Rgb) {
        let i = ((y * self.width + x) * 3) as usize;
        self.px[i..i + 3].copy_from_slice(&c);
    }

    fn text(&mut self, x0: u32, y0: u32, s: &str, scale: u32, c: Rgb) {
        for (k, ch) in s.chars().enumerate() {
            let Some(d) = ch.to_digit(10) else { continue };
            let gx = x0 + k as u32 * 6 * scale;
            for (row, bits) in DIGITS[d as usize].iter().enumerate() {
                for col in 0..5u32 {
                    if bits & (0x10 >> col) != 0 {
                        for sy in 0..scale {
                            for sx in 0..scale {
                                self.put(gx + col * scale + sx, y0 + row as u32 * scale + sy, c);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Selected keyframes laid out in reading order, each cell scaled uniformly
/// (nearest neighbour) to the first frame's size and captioned with its
/// frame index.
pub fn render_storyboard(frames: &[Frame], n: usize, cfg: &RenderConfig) -> Result<Frame> {
    let (rows, cols) = grid_layout(n)
        .ok_or_else(|| Error::InvalidArgument(format!("storyboard size {n} is not one of 2, 4, 9")))?;
    let picks = select_keyframes(frames, n, cfg.keyframe_seed)?;
    let (cw, ch) = (frames[0].width, frames[0].height);
    let scale = (cw / 160).max(1);
    let label_h = 7 * scale + 2 * PAD;
    let widest = picks.iter().map(|&i| frames[i].index.to_string().len() as u32).max().unwrap_or(1);
    if cw < widest * 6 * scale + PAD || ch == 0 {
        return Err(Error::InvalidArgument(format!("frames of {cw}×{ch} are too small to label")));
    }
    let cell_h = ch + label_h;
    let (width, height) = (cw * cols, cell_h * rows);
    let mut out = Raster {
        width,
        px: cfg.background.repeat((width * height) as usize),
    };
    for (slot, &i) in picks.iter().enumerate() {
        let f = &frames[i];
        let src = f.pixels.as_ref().ok_or(Error::MissingRaster(f.index))?;
        let (ox, oy) = ((slot as u32 % cols) * cw, (slot as u32 / cols) * cell_h);
        out.text(ox + PAD, oy + PAD, &f.index.to_string(), scale, cfg.label_color);
        // fit and centre, keeping the aspect ratio
        let s = (cw as f64 / f.width as f64).min(ch as f64 / f.height as f64);
        let (dw, dh) = (((f.width as f64 * s).round() as u32).max(1), ((f.height as f64 * s).round() as u32).max(1));
        let (dx, dy) = ((cw - dw.min(cw)) / 2, (ch - dh.min(ch)) / 2);
        for y in 0..dh.min(ch) {
            let sy = ((y as u64 * f.height as u64) / dh as u64) as u32;
            for x in 0..dw.min(cw) {
                let sx = ((x as u64 * f.width as u64) / dw as u64) as u32;
                let k = ((sy * f.width + sx) * 3) as usize;
                out.put(ox + dx + x, oy + label_h + dy + y, [src[k], src[k + 1], src[k + 2]]);
            }
        }
    }
    Ok(Frame {
        index: 0,
        width,
        height,
        pixels: Some(out.px),
    })
}
