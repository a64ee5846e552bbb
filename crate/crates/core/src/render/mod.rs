//! Trajectory visualizations as deterministic 8-bit RGB PNG images.

mod keyframes;
mod storyboard;

use std::fs;
use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use keyframes::{embed, select_keyframes};
pub use storyboard::{grid_layout, render_storyboard};

use crate::error::{Error, Result};
use crate::trajectory::{Episode, Frame, KeypointTrack, Point};

pub type Rgb = [u8; 3];

/// Twelve evenly spaced hues at full saturation.
pub const RAINBOW: [Rgb; 12] = [
    [255, 0, 0],
    [255, 128, 0],
    [255, 255, 0],
    [128, 255, 0],
    [0, 255, 0],
    [0, 255, 128],
    [0, 255, 255],
    [0, 128, 255],
    [0, 0, 255],
    [128, 0, 255],
    [255, 0, 255],
    [255, 0, 128],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    pub line_width: u32,
    pub endpoint_radius: u32,
    pub start_color: Rgb,
    pub end_color: Rgb,
    pub endpoint_color: Rgb,
    pub flow_palette: Vec<Rgb>,
    /// Canvas used when an episode has no frames.
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub background: Rgb,
    pub label_color: Rgb,
    /// Seed for keyframe clustering.
    pub keyframe_seed: u64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            line_width: 4,
            endpoint_radius: 6,
            start_color: [255, 255, 255],
            end_color: [0, 255, 0],
            endpoint_color: [255, 0, 0],
            flow_palette: RAINBOW.to_vec(),
            canvas_width: 640,
            canvas_height: 640,
            background: [40, 40, 40],
            label_color: [255, 255, 255],
            keyframe_seed: 0,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.line_width < 1 {
            return Err(Error::Config("line_width must be at least 1".into()));
        }
        if self.canvas_width < 1 || self.canvas_height < 1 {
            return Err(Error::Config("canvas dimensions must be positive".into()));
        }
        if self.flow_palette.is_empty() {
            return Err(Error::Config("flow_palette is empty".into()));
        }
        for (i, a) in self.flow_palette.iter().enumerate() {
            if self.flow_palette[..i].contains(a) {
                return Err(Error::Config(format!("flow_palette repeats {a:?}")));
            }
        }
        Ok(())
    }

    pub fn blank(&self, index: u64) -> Frame {
        Frame::filled(index, self.canvas_width, self.canvas_height, self.background)
    }
}

/// Per-channel `a + (b - a)·t`, rounded half up.
pub fn lerp_color(a: Rgb, b: Rgb, t: f64) -> Rgb {
    let ch = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t + 0.5).floor().clamp(0.0, 255.0) as u8;
    [ch(a[0], b[0]), ch(a[1], b[1]), ch(a[2], b[2])]
}

/// Color of segment `i` out of `m` along the start→end gradient.
pub fn gradient_color(cfg: &RenderConfig, i: usize, m: usize) -> Rgb {
    let t = if m > 1 { i as f64 / (m - 1) as f64 } else { 0.0 };
    lerp_color(cfg.start_color, cfg.end_color, t)
}

/// Mutable RGB raster borrowed from a frame.
struct Canvas<'a> {
    width: i64,
    height: i64,
    px: &'a mut [u8],
}

impl<'a> Canvas<'a> {
    fn of(frame: &'a mut Frame) -> Result<Canvas<'a>> {
        let (w, h) = (frame.width as i64, frame.height as i64);
        let index = frame.index;
        let px = frame.pixels.as_mut().ok_or(Error::MissingRaster(index))?;
        Ok(Canvas { width: w, height: h, px })
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x < 0 || y < 0 || x >= self.width || y >= self.height {
            return;
        }
        let i = ((y * self.width + x) * 3) as usize;
        self.px[i..i + 3].copy_from_slice(&c);
    }

    /// Filled disc of radius `r` (r = 0 is a single pixel).
    fn disc(&mut self, cx: i64, cy: i64, r: f64, c: Rgb) {
        let ri = r.floor() as i64;
        if cx + ri < 0 || cy + ri < 0 || cx - ri >= self.width || cy - ri >= self.height {
            return;
        }
        for dy in -ri..=ri {
            for dx in -ri..=ri {
                if (dx * dx + dy * dy) as f64 <= r * r {
                    self.put(cx + dx, cy + dy, c);
                }
            }
        }
    }

    /// Integer Bresenham line stamped with a disc brush of radius `width / 2`.
    fn line(&mut self, a: (i64, i64), b: (i64, i64), width: u32, c: Rgb) {
        let r = width as f64 / 2.0;
        let (mut x, mut y) = a;
        let dx = (b.0 - a.0).abs();
        let dy = -(b.1 - a.1).abs();
        let sx = if a.0 < b.0 { 1 } else { -1 };
        let sy = if a.1 < b.1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.disc(x, y, r, c);
            if (x, y) == b {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

fn pixel(p: Point) -> (i64, i64) {
    (p.x.round() as i64, p.y.round() as i64)
}

/// Liang-Barsky clip of segment `a`-`b` to the frame grown by `margin`.
/// Segments already inside come back unchanged.
fn clip(a: Point, b: Point, width: u32, height: u32, margin: f64) -> Option<(Point, Point)> {
    let (x0, y0) = (-margin, -margin);
    let (x1, y1) = (width as f64 + margin, height as f64 + margin);
    let inside = |p: Point| (x0..=x1).contains(&p.x) && (y0..=y1).contains(&p.y);
    if inside(a) && inside(b) {
        return Some((a, b));
    }
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.x, a.x - x0), (d.x, x1 - a.x), (-d.y, a.y - y0), (d.y, y1 - a.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then(|| (a + d * t0, a + d * t1))
}

fn draw_segment(canvas: &mut Canvas, a: Point, b: Point, width: u32, c: Rgb) {
    let margin = width as f64 + 1.0;
    if let Some((a, b)) = clip(a, b, canvas.width as u32, canvas.height as u32, margin) {
        canvas.line(pixel(a), pixel(b), width, c);
    }
}

fn check_track(track: &KeypointTrack) -> Result<Vec<Point>> {
    let pts = track.points();
    if pts.is_empty() {
        return Err(Error::InvalidArgument(format!("track {} has no samples", track.keypoint_id)));
    }
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("track {} has non-finite samples", track.keypoint_id)));
    }
    Ok(pts)
}

/// The track drawn over `base` as a white-to-green polyline ending in a red
/// disc. Samples outside the frame are clipped.
pub fn render_keypoint_overlay(base: &Frame, track: &KeypointTrack, cfg: &RenderConfig) -> Result<Frame> {
    let pts = check_track(track)?;
    let mut out = base.clone();
    let mut canvas = Canvas::of(&mut out)?;
    let m = pts.len() - 1;
    for (i, w) in pts.windows(2).enumerate() {
        draw_segment(&mut canvas, w[0], w[1], cfg.line_width, gradient_color(cfg, i, m));
    }
    if m == 0 {
        let (x, y) = pixel(pts[0]);
        canvas.disc(x, y, cfg.line_width as f64 / 2.0, cfg.start_color);
    }
    let (x, y) = pixel(pts[m]);
    canvas.disc(x, y, cfg.endpoint_radius as f64, cfg.endpoint_color);
    Ok(out)
}

/// Every track as a constant-color polyline, `palette[keypoint_id mod len]`,
/// drawn in ascending keypoint order.
pub fn render_flow_overlay(base: &Frame, tracks: &[KeypointTrack], cfg: &RenderConfig) -> Result<Frame> {
    if tracks.is_empty() {
        return Err(Error::InvalidArgument("flow overlay needs at least one track".into()));
    }
    let mut order: Vec<&KeypointTrack> = tracks.iter().collect();
    order.sort_by_key(|t| t.keypoint_id);
    let mut out = base.clone();
    let mut canvas = Canvas::of(&mut out)?;
    for t in order {
        let pts = check_track(t)?;
        let c = cfg.flow_palette[t.keypoint_id as usize % cfg.flow_palette.len()];
        for w in pts.windows(2) {
            draw_segment(&mut canvas, w[0], w[1], cfg.line_width, c);
        }
        if pts.len() == 1 {
            let (x, y) = pixel(pts[0]);
            canvas.disc(x, y, cfg.line_width as f64 / 2.0, c);
        }
    }
    Ok(out)
}

/// 8-bit RGB, no interlacing, fixed filter and compression.
pub fn encode_png(frame: &Frame) -> Result<Vec<u8>> {
    let px = frame.pixels.as_ref().ok_or(Error::MissingRaster(frame.index))?;
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, frame.width, frame.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_compression(png::Compression::Balanced);
        enc.set_filter(png::Filter::Sub);
        let mut w = enc.write_header()?;
        w.write_image_data(px)?;
    }
    Ok(buf)
}

/// Decodes any 8/16-bit PNG into an RGB frame.
pub fn decode_png(bytes: &[u8], index: u64) -> Result<Frame> {
    let mut dec = png::Decoder::new(Cursor::new(bytes));
    dec.set_transformations(png::Transformations::normalize_to_color8());
    let mut reader = dec.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf)?;
    buf.truncate(info.buffer_size());
    let rgb: Vec<u8> = match info.color_type {
        png::ColorType::Rgb => buf,
        png::ColorType::Rgba => buf.chunks_exact(4).flat_map(|c| [c[0], c[1], c[2]]).collect(),
        png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|c| [c[0], c[0], c[0]]).collect(),
        png::ColorType::Indexed => {
            return Err(Error::InvalidArgument("indexed PNG was not expanded".into()));
        }
    };
    Ok(Frame {
        index,
        width: info.width,
        height: info.height,
        pixels: Some(rgb),
    })
}

pub fn write_png(frame: &Frame, path: &Path) -> Result<()> {
    let bytes = encode_png(frame)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_png(path: &Path, index: u64) -> Result<Frame> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_png(&bytes, index)
}

/// Loads every `frame_NNNNNN.png` in `dir`, sorted by frame index.
pub fn read_frames_dir(dir: &Path) -> Result<Vec<Frame>> {
    let mut found: Vec<(u64, std::path::PathBuf)> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?;
            let digits = name.strip_prefix("frame_")?.strip_suffix(".png")?;
            if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            Some((digits.parse().ok()?, p))
        })
        .collect();
    found.sort();
    found.iter().map(|(i, p)| read_png(p, *i)).collect()
}

/// Which visualization to produce for an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    Keypoint,
    Flow,
    Storyboard(usize),
}

impl Representation {
    pub fn parse(mode: &str, n: usize) -> Result<Representation> {
        match mode {
            "keypoint" => Ok(Representation::Keypoint),
            "flow" => Ok(Representation::Flow),
            "storyboard" if grid_layout(n).is_some() => Ok(Representation::Storyboard(n)),
            "storyboard" => Err(Error::InvalidArgument(format!("storyboard size {n} is not one of 2, 4, 9"))),
            other => Err(Error::InvalidArgument(format!("unknown representation {other:?}"))),
        }
    }

    pub fn mode(self) -> &'static str {
        match self {
            Representation::Keypoint => "keypoint",
            Representation::Flow => "flow",
            Representation::Storyboard(_) => "storyboard",
        }
    }
}

/// Frames used as the drawing surface for an episode.
///
/// Episodes that carry frames (in memory or in `frames_dir`) use them. Others
/// get stand-in frames on the configured canvas: scene regions filled in a
/// muted color and the point of interest as a disc, one frame for each of up
/// to 24 evenly spaced samples.
pub fn episode_frames(ep: &Episode, cfg: &RenderConfig) -> Result<Vec<Frame>> {
    if let Some(f) = ep.frames.as_ref().filter(|f| !f.is_empty()) {
        return Ok(f.clone());
    }
    if let Some(dir) = &ep.frames_dir {
        let frames = read_frames_dir(dir)?;
        if !frames.is_empty() {
            return Ok(frames);
        }
    }
    let track = ep
        .trajectory
        .poi_track()
        .ok_or_else(|| Error::InvalidEpisode(format!("{}: no point-of-interest track", ep.id)))?;
    let pts = check_track(track)?;
    let count = pts.len().min(24);
    let mut base = cfg.blank(0);
    {
        let mut canvas = Canvas::of(&mut base)?;
        for o in &ep.scene {
            let (x0, y0, x1, y1) = o.region.bounds();
            let (x0, y0) = pixel(Point::new(x0, y0));
            let (x1, y1) = pixel(Point::new(x1, y1));
            for y in y0.max(0)..=y1.min(canvas.height - 1) {
                for x in x0.max(0)..=x1.min(canvas.width - 1) {
                    canvas.put(x, y, SCENE_FILL);
                }
            }
        }
    }
    (0..count)
        .map(|k| {
            let i = if count > 1 { k * (pts.len() - 1) / (count - 1) } else { 0 };
            let mut f = base.clone();
            f.index = track.samples[i].t.max(0.0).round() as u64;
            let mut canvas = Canvas::of(&mut f)?;
            let (x, y) = pixel(pts[i]);
            canvas.disc(x, y, cfg.endpoint_radius as f64, cfg.label_color);
            Ok(f)
        })
        .collect()
}

const SCENE_FILL: Rgb = [70, 70, 110];

/// One representation of an episode; overlays are drawn over its first frame.
pub fn render_episode(ep: &Episode, rep: Representation, cfg: &RenderConfig) -> Result<Frame> {
    let frames = episode_frames(ep, cfg)?;
    match rep {
        Representation::Keypoint => {
            let track = ep
                .trajectory
                .poi_track()
                .ok_or_else(|| Error::InvalidEpisode(format!("{}: no point-of-interest track", ep.id)))?;
            render_keypoint_overlay(&frames[0], track, cfg)
        }
        Representation::Flow => render_flow_overlay(&frames[0], &ep.trajectory.tracks, cfg),
        Representation::Storyboard(n) => render_storyboard(&frames, n, cfg),
    }
}

/// File name used for an episode's rendering: `<id>_<mode>.png`.
pub fn image_name(ep: &Episode, rep: Representation) -> String {
    format!("{}_{}.png", ep.id, rep.mode())
}

/// Renders `ep` into `dir` and returns the written path.
pub fn render_to(ep: &Episode, rep: Representation, dir: &Path, cfg: &RenderConfig) -> Result<std::path::PathBuf> {
    let path = dir.join(image_name(ep, rep));
    write_png(&render_episode(ep, rep, cfg)?, &path)?;
    Ok(path)
}
