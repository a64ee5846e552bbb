//! Data model for keypoint trajectories, scenes and episodes.
//!
//! Coordinates are image coordinates throughout: origin at the top-left
//! corner, `x` to the right and `y` increasing downward. Trajectories are
//! stored in absolute pixels; analysis code normalizes internally.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::ops::{Add, Mul, Sub};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product. In image coordinates a
    /// positive value means `other` lies visually clockwise of `self`.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| Point::new(self.x / n, self.y / n))
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    /// Unit normal pointing to the visual right of `self` as a heading.
    pub fn right_normal(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// The eight image-plane directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compass {
    Up,
    Down,
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
}

impl Compass {
    pub const ALL: [Compass; 8] = [
        Compass::Right,
        Compass::DownRight,
        Compass::Down,
        Compass::DownLeft,
        Compass::Left,
        Compass::UpLeft,
        Compass::Up,
        Compass::UpRight,
    ];

    pub fn unit(self) -> Point {
        let d = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Compass::Up => Point::new(0.0, -1.0),
            Compass::Down => Point::new(0.0, 1.0),
            Compass::Left => Point::new(-1.0, 0.0),
            Compass::Right => Point::new(1.0, 0.0),
            Compass::UpLeft => Point::new(-d, -d),
            Compass::UpRight => Point::new(d, -d),
            Compass::DownLeft => Point::new(-d, d),
            Compass::DownRight => Point::new(d, d),
        }
    }

    /// Nearest of the eight directions to a displacement, `None` for a zero vector.
    pub fn classify(v: Point) -> Option<Compass> {
        if v.norm() == 0.0 || !v.is_finite() {
            return None;
        }
        // atan2 in image coordinates: 0 = right, +pi/2 = down.
        let angle = v.y.atan2(v.x);
        let sector = (angle / std::f64::consts::FRAC_PI_4).round() as i64;
        Some(Compass::ALL[sector.rem_euclid(8) as usize])
    }

    pub fn opposite(self) -> Compass {
        match self {
            Compass::Up => Compass::Down,
            Compass::Down => Compass::Up,
            Compass::Left => Compass::Right,
            Compass::Right => Compass::Left,
            Compass::UpLeft => Compass::DownRight,
            Compass::UpRight => Compass::DownLeft,
            Compass::DownLeft => Compass::UpRight,
            Compass::DownRight => Compass::UpLeft,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Compass::Up => "up",
            Compass::Down => "down",
            Compass::Left => "left",
            Compass::Right => "right",
            Compass::UpLeft => "up-left",
            Compass::UpRight => "up-right",
            Compass::DownLeft => "down-left",
            Compass::DownRight => "down-right",
        }
    }
}

impl fmt::Display for Compass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Compass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Compass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown direction {s:?}")))
    }
}

/// One observation of a keypoint. `t` is the frame index; it is kept as a
/// float so that arc-length resampling can interpolate it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub const fn new(t: f64, x: f64, y: f64) -> Self {
        Sample { t, x, y }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

impl From<[f64; 3]> for Sample {
    fn from([t, x, y]: [f64; 3]) -> Self {
        Sample { t, x, y }
    }
}

impl From<Sample> for [f64; 3] {
    fn from(s: Sample) -> Self {
        [s.t, s.x, s.y]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeypointTrack {
    pub keypoint_id: u32,
    pub samples: Vec<Sample>,
}

impl KeypointTrack {
    pub fn new(keypoint_id: u32, samples: Vec<Sample>) -> Self {
        KeypointTrack {
            keypoint_id,
            samples,
        }
    }

    /// Track with frame indices `0..points.len()`.
    pub fn from_points(keypoint_id: u32, points: &[Point]) -> Self {
        let samples = points
            .iter()
            .enumerate()
            .map(|(i, p)| Sample::new(i as f64, p.x, p.y))
            .collect();
        KeypointTrack::new(keypoint_id, samples)
    }

    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(Sample::point).collect()
    }

    pub fn arc_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].point().dist(w[1].point()))
            .sum()
    }

    fn check(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "track {} has {} samples, need at least 2",
                self.keypoint_id,
                self.samples.len()
            )));
        }
        if let Some(s) = self.samples.iter().find(|s| !s.point().is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "track {} has a non-finite sample at t={}",
                self.keypoint_id, s.t
            )));
        }
        if self.samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidArgument(format!(
                "track {} frame indices are not strictly increasing",
                self.keypoint_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub point_of_interest: u32,
    pub tracks: Vec<KeypointTrack>,
}

impl Trajectory {
    pub fn single(track: KeypointTrack) -> Self {
        Trajectory {
            point_of_interest: track.keypoint_id,
            tracks: vec![track],
        }
    }

    pub fn poi_track(&self) -> Option<&KeypointTrack> {
        self.tracks
            .iter()
            .find(|t| t.keypoint_id == self.point_of_interest)
    }

    /// Applies `f` to every sample position of every track.
    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Trajectory {
        let tracks = self
            .tracks
            .iter()
            .map(|tr| KeypointTrack {
                keypoint_id: tr.keypoint_id,
                samples: tr
                    .samples
                    .iter()
                    .map(|s| {
                        let p = f(s.point());
                        Sample::new(s.t, p.x, p.y)
                    })
                    .collect(),
            })
            .collect();
        Trajectory {
            point_of_interest: self.point_of_interest,
            tracks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Box { x0: f64, y0: f64, x1: f64, y1: f64 },
    Polygon { points: Vec<[f64; 2]> },
}

impl Region {
    pub fn boxed(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Region::Box {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Region::Box { x0, y0, x1, y1 } => vec![
                Point::new(*x0, *y0),
                Point::new(*x1, *y0),
                Point::new(*x1, *y1),
                Point::new(*x0, *y1),
            ],
            Region::Polygon { points } => points.iter().map(|p| Point::new(p[0], p[1])).collect(),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Region::Box { x0, y0, x1, y1 } => (x1 - x0) * (y1 - y0),
            Region::Polygon { .. } => {
                let v = self.vertices();
                if v.len() < 3 {
                    return 0.0;
                }
                let twice: f64 = (0..v.len())
                    .map(|i| v[i].cross(v[(i + 1) % v.len()]))
                    .sum();
                twice.abs() / 2.0
            }
        }
    }

    pub fn centroid(&self) -> Point {
        let v = self.vertices();
        match self {
            Region::Box { .. } => Point::new((v[0].x + v[2].x) / 2.0, (v[0].y + v[2].y) / 2.0),
            Region::Polygon { .. } => {
                let mut a = 0.0;
                let mut c = Point::default();
                for i in 0..v.len() {
                    let (p, q) = (v[i], v[(i + 1) % v.len()]);
                    let w = p.cross(q);
                    a += w;
                    c = c + (p + q) * w;
                }
                if a.abs() < f64::EPSILON {
                    let n = v.len().max(1) as f64;
                    v.iter().fold(Point::default(), |acc, p| acc + *p) * (1.0 / n)
                } else {
                    c * (1.0 / (3.0 * a))
                }
            }
        }
    }

    /// Strict interior test; points on the boundary are outside.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Region::Box { x0, y0, x1, y1 } => p.x > *x0 && p.x < *x1 && p.y > *y0 && p.y < *y1,
            Region::Polygon { .. } => {
                let v = self.vertices();
                if v.len() < 3 || self.boundary_distance(p) == 0.0 {
                    return false;
                }
                let mut inside = false;
                let mut j = v.len() - 1;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[j]);
                    if (a.y > p.y) != (b.y > p.y)
                        && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x
                    {
                        inside = !inside;
                    }
                    j = i;
                }
                inside
            }
        }
    }

    fn boundary_distance(&self, p: Point) -> f64 {
        let v = self.vertices();
        (0..v.len())
            .map(|i| point_segment_distance(p, v[i], v[(i + 1) % v.len()]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance from `p` to the region, zero inside or on the boundary.
    pub fn distance(&self, p: Point) -> f64 {
        if self.contains(p) {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    /// Whether the closed segment `a`-`b` touches the region's interior or boundary.
    pub fn intersects_segment(&self, a: Point, b: Point) -> bool {
        if self.contains(a) || self.contains(b) {
            return true;
        }
        let v = self.vertices();
        (0..v.len()).any(|i| segments_intersect(a, b, v[i], v[(i + 1) % v.len()]))
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        bounds_of(self.vertices().into_iter())
    }

    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> Region {
        match self {
            Region::Box { x0, y0, x1, y1 } => {
                let a = f(Point::new(*x0, *y0));
                let b = f(Point::new(*x1, *y1));
                Region::boxed(a.x, a.y, b.x, b.y)
            }
            Region::Polygon { points } => Region::Polygon {
                points: points
                    .iter()
                    .map(|p| {
                        let q = f(Point::new(p[0], p[1]));
                        [q.x, q.y]
                    })
                    .collect(),
            },
        }
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o = |a: Point, b: Point, c: Point| (b - a).cross(c - a);
    let on = |a: Point, b: Point, c: Point| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    let (d1, d2, d3, d4) = (o(q1, q2, p1), o(q1, q2, p2), o(p1, p2, q1), o(p1, p2, q2));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on(q1, q2, p1))
        || (d2 == 0.0 && on(q1, q2, p2))
        || (d3 == 0.0 && on(p1, p2, q1))
        || (d4 == 0.0 && on(p1, p2, q2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub label: String,
    pub region: Region,
}

impl SceneObject {
    pub fn new(label: impl Into<String>, region: Region) -> Self {
        SceneObject {
            label: label.into(),
            region,
        }
    }
}

/// An image observation. `pixels` is row-major RGB8 when present.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub index: u64,
    pub width: u32,
    pub height: u32,
    pub pixels: Option<Vec<u8>>,
}

impl Frame {
    pub fn filled(index: u64, width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let pixels = rgb
            .iter()
            .copied()
            .cycle()
            .take(width as usize * height as usize * 3)
            .collect();
        Frame {
            index,
            width,
            height,
            pixels: Some(pixels),
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> Option<[u8; 3]> {
        let px = self.pixels.as_ref()?;
        if x >= self.width || y >= self.height {
            return None;
        }
        let i = (y as usize * self.width as usize + x as usize) * 3;
        Some([px[i], px[i + 1], px[i + 2]])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: String,
    pub task_instruction: String,
    pub motion_description: String,
    #[serde(default)]
    pub category: String,
    #[serde(default)]
    pub scene: Vec<SceneObject>,
    pub trajectory: Trajectory,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames_dir: Option<PathBuf>,
    /// Image direction that "forward" refers to; up when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward_heading: Option<Compass>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub metadata: serde_json::Map<String, serde_json::Value>,
    #[serde(skip)]
    pub frames: Option<Vec<Frame>>,
}

impl Episode {
    pub fn from_json(text: &str) -> Result<Episode> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Reads one episode file. A relative `frames_dir` is resolved against the
    /// file's directory; frames themselves are loaded lazily.
    pub fn load(path: &Path) -> Result<Episode> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut ep = Episode::from_json(&text)?;
        if let (Some(dir), Some(parent)) = (ep.frames_dir.as_ref(), path.parent()) {
            if dir.is_relative() {
                ep.frames_dir = Some(parent.join(dir));
            }
        }
        Ok(ep)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    /// Loads `frame_%06d.png` files from `frames_dir`, sorted by index.
    pub fn load_frames(&mut self) -> Result<&[Frame]> {
        if self.frames.is_none() {
            let frames = match &self.frames_dir {
                Some(dir) => crate::render::read_frames_dir(dir)?,
                None => Vec::new(),
            };
            self.frames = Some(frames);
        }
        Ok(self.frames.as_deref().unwrap_or_default())
    }
}

/// Loads every `*.json` episode in a directory, sorted by episode id.
pub fn load_corpus(dir: &Path) -> Result<Vec<Episode>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut episodes = paths
        .iter()
        .map(|p| Episode::load(p))
        .collect::<Result<Vec<_>>>()?;
    episodes.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = episodes.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::InvalidEpisode(format!("duplicate episode id {:?}", w[0].id)));
    }
    Ok(episodes)
}

/// Resamples a track to `n` samples spaced equally in arc length.
///
/// The first and last samples are kept exactly; frame indices are
/// interpolated along with the positions.
pub fn resample_arclength(track: &KeypointTrack, n: usize) -> Result<KeypointTrack> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("resample count {n} < 2")));
    }
    track.check()?;
    let s = &track.samples;
    let mut cum = Vec::with_capacity(s.len());
    cum.push(0.0);
    for w in s.windows(2) {
        cum.push(cum.last().unwrap() + w[0].point().dist(w[1].point()));
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return Err(Error::DegeneratePath(format!(
            "track {} has zero arc length",
            track.keypoint_id
        )));
    }

    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        if i == 0 {
            out.push(s[0]);
            continue;
        }
        if i == n - 1 {
            out.push(s[s.len() - 1]);
            continue;
        }
        let target = total * i as f64 / (n - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < target {
            seg += 1;
        }
        // skip zero-length segments so interpolation is well defined
        while cum[seg + 1] - cum[seg] <= 0.0 && seg + 2 < cum.len() {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let u = ((target - cum[seg]) / len).clamp(0.0, 1.0);
        let (a, b) = (s[seg], s[seg + 1]);
        out.push(Sample::new(
            a.t + (b.t - a.t) * u,
            a.x + (b.x - a.x) * u,
            a.y + (b.y - a.y) * u,
        ));
    }
    Ok(KeypointTrack::new(track.keypoint_id, out))
}

/// Tight axis-aligned bounds `(min_x, min_y, max_x, max_y)`.
pub fn bounding_box(track: &KeypointTrack) -> (f64, f64, f64, f64) {
    bounds_of(track.samples.iter().map(Sample::point))
}

pub(crate) fn bounds_of(points: impl Iterator<Item = Point>) -> (f64, f64, f64, f64) {
    points.fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationCode {
    EmptyId,
    EmptyTaskInstruction,
    EmptyMotionDescription,
    EmptyTracks,
    TrackTooShort,
    NonIncreasingTime,
    NonFiniteCoordinate,
    MissingPoiTrack,
    FrameRangeMismatch,
    EmptyLabel,
    DegenerateRegion,
    InvalidFrameSize,
    PixelLengthMismatch,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::EmptyId => "empty-id",
            ViolationCode::EmptyTaskInstruction => "empty-task-instruction",
            ViolationCode::EmptyMotionDescription => "empty-motion-description",
            ViolationCode::EmptyTracks => "empty-tracks",
            ViolationCode::TrackTooShort => "track-too-short",
            ViolationCode::NonIncreasingTime => "non-increasing-time",
            ViolationCode::NonFiniteCoordinate => "non-finite-coordinate",
            ViolationCode::MissingPoiTrack => "missing-poi-track",
            ViolationCode::FrameRangeMismatch => "frame-range-mismatch",
            ViolationCode::EmptyLabel => "empty-label",
            ViolationCode::DegenerateRegion => "degenerate-region",
            ViolationCode::InvalidFrameSize => "invalid-frame-size",
            ViolationCode::PixelLengthMismatch => "pixel-length-mismatch",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

/// Checks every type invariant of an episode; an empty list means valid.
pub fn validate_episode(ep: &Episode) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, detail: String| out.push(Violation { code, detail });

    if ep.id.trim().is_empty() {
        push(ViolationCode::EmptyId, "episode id is empty".into());
    }
    if ep.task_instruction.trim().is_empty() {
        push(ViolationCode::EmptyTaskInstruction, "task instruction is empty".into());
    }
    if ep.motion_description.trim().is_empty() {
        push(ViolationCode::EmptyMotionDescription, "motion description is empty".into());
    }

    let traj = &ep.trajectory;
    if traj.tracks.is_empty() {
        push(ViolationCode::EmptyTracks, "trajectory has no tracks".into());
    }
    for tr in &traj.tracks {
        let k = tr.keypoint_id;
        if tr.samples.len() < 2 {
            push(
                ViolationCode::TrackTooShort,
                format!("track {k} has {} samples", tr.samples.len()),
            );
        }
        if tr.samples.windows(2).any(|w| w[1].t <= w[0].t) {
            push(ViolationCode::NonIncreasingTime, format!("track {k}"));
        }
        if tr.samples.iter().any(|s| !s.point().is_finite() || !s.t.is_finite()) {
            push(ViolationCode::NonFiniteCoordinate, format!("track {k}"));
        }
    }
    if !traj.tracks.is_empty() && traj.poi_track().is_none() {
        push(
            ViolationCode::MissingPoiTrack,
            format!("no track with keypoint id {}", traj.point_of_interest),
        );
    }
    let ranges: HashSet<(u64, u64)> = traj
        .tracks
        .iter()
        .filter_map(|tr| Some((tr.samples.first()?.t.to_bits(), tr.samples.last()?.t.to_bits())))
        .collect();
    if ranges.len() > 1 {
        push(
            ViolationCode::FrameRangeMismatch,
            "tracks cover different frame ranges".into(),
        );
    }

    for obj in &ep.scene {
        if obj.label.trim().is_empty() {
            push(ViolationCode::EmptyLabel, "scene object with empty label".into());
        }
        let area = obj.region.area();
        if !(area > 0.0 && area.is_finite()) {
            push(
                ViolationCode::DegenerateRegion,
                format!("region of {:?} has area {area}", obj.label),
            );
        }
    }

    for frame in ep.frames.iter().flatten() {
        if frame.width == 0 || frame.height == 0 {
            push(
                ViolationCode::InvalidFrameSize,
                format!("frame {} is {}x{}", frame.index, frame.width, frame.height),
            );
        }
        if let Some(px) = &frame.pixels {
            let want = frame.width as usize * frame.height as usize * 3;
            if px.len() != want {
                push(
                    ViolationCode::PixelLengthMismatch,
                    format!("frame {}: {} bytes, expected {want}", frame.index, px.len()),
                );
            }
        }
    }
    out
}
