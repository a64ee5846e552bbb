//! Geometric feature extraction on normalized, resampled point sequences.

use std::f64::consts::{PI, TAU};
use std::ops::Range;

use serde::Serialize;

use super::AnalyzerConfig;
use crate::dsl::{Side, Turn};
use crate::error::{Error, Result};
use crate::trajectory::{
    bounds_of, resample_arclength, Compass, KeypointTrack, Point, SceneObject, Trajectory,
};

/// Analysis-ready copy of a trajectory: resampled to a fixed count and
/// normalized so the bounding box starts at the origin with unit diagonal.
#[derive(Debug, Clone)]
pub(crate) struct Prepared {
    pub points: Vec<Point>,
    pub arc: Vec<f64>,
    pub scale: f64,
    pub scene: Vec<SceneObject>,
    pub legs: Vec<Range<usize>>,
}

pub(crate) fn prepare(traj: &Trajectory, scene: &[SceneObject], cfg: &AnalyzerConfig) -> Result<Prepared> {
    let track = traj
        .poi_track()
        .ok_or_else(|| Error::DegeneratePath("no point-of-interest track".into()))?;
    let mut pts = track.points();
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegeneratePath("non-finite coordinate".into()));
    }
    pts.dedup();
    if pts.len() < 2 {
        return Err(Error::DegeneratePath("fewer than two distinct samples".into()));
    }
    let (x0, y0, x1, y1) = bounds_of(pts.iter().copied());
    let diag = (x1 - x0).hypot(y1 - y0);
    if !(diag > 0.0) {
        return Err(Error::DegeneratePath("zero extent".into()));
    }
    let origin = Point::new(x0, y0);
    let norm = |p: Point| (p - origin) * (1.0 / diag);
    let collapsed = KeypointTrack::from_points(track.keypoint_id, &pts);
    let points: Vec<Point> = resample_arclength(&collapsed, cfg.n_analysis.max(8))?
        .points()
        .into_iter()
        .map(norm)
        .collect();
    let arc = cumulative_arc(&points);
    let scene = scene
        .iter()
        .map(|o| SceneObject::new(o.label.clone(), o.region.map_points(norm)))
        .collect();
    let legs = split_legs(&points, &arc, cfg);
    Ok(Prepared {
        points,
        arc,
        scale: diag,
        scene,
        legs,
    })
}

pub(crate) fn cumulative_arc(points: &[Point]) -> Vec<f64> {
    let mut arc = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += p.dist(points[i - 1]);
        }
        arc.push(acc);
    }
    arc
}

/// Signed smallest angle from `b` to `a`, in `(-π, π]`.
fn wrap(a: f64) -> f64 {
    let mut d = (a + PI).rem_euclid(TAU) - PI;
    if d <= -PI {
        d += TAU;
    }
    d
}

fn angle_between(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// Heading of each displacement after a centered moving average of unit
/// vectors over `window` displacements.
pub(crate) fn smoothed_headings(points: &[Point], window: usize) -> Vec<f64> {
    let mut units: Vec<Option<Point>> = points.windows(2).map(|w| (w[1] - w[0]).normalized()).collect();
    // zero displacements borrow the nearest earlier (else later) heading
    let mut last = None;
    for u in units.iter_mut() {
        match u {
            Some(v) => last = Some(*v),
            None => *u = last,
        }
    }
    let mut next = None;
    for u in units.iter_mut().rev() {
        match u {
            Some(v) => next = Some(*v),
            None => *u = next,
        }
    }
    let units: Vec<Point> = units.into_iter().map(|u| u.unwrap_or(Point::new(1.0, 0.0))).collect();
    let half = window / 2;
    (0..units.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(units.len());
            let s = units[lo..hi].iter().fold(Point::default(), |a, &b| a + b);
            let v = if s.norm() > 1e-9 { s } else { units[i] };
            v.y.atan2(v.x)
        })
        .collect()
}

/// Raw legs: split on sustained heading change, then merge short pieces.
/// Ranges are half-open over sample indices and partition `0..n`.
pub(crate) fn split_legs(points: &[Point], arc: &[f64], cfg: &AnalyzerConfig) -> Vec<Range<usize>> {
    let n = points.len();
    let h = smoothed_headings(points, cfg.smoothing_window);
    let m = h.len();
    let thr = cfg.split_angle_deg.to_radians();
    let persist = cfg.split_persistence.max(1);
    let mut cuts = vec![0usize];
    let mut reference = h[0];
    let mut i = 1;
    while i < m {
        if i + persist <= m && (i..i + persist).all(|j| angle_between(h[j], reference) > thr) {
            cuts.push(i);
            reference = h[i];
        }
        i += 1;
    }
    cuts.push(n);
    let mut legs: Vec<Range<usize>> = cuts.windows(2).map(|w| w[0]..w[1]).collect();

    let total = arc[n - 1];
    let length = |r: &Range<usize>| arc[r.end.min(n - 1)] - arc[r.start];
    while legs.len() > 1 {
        let (k, shortest) = legs
            .iter()
            .enumerate()
            .map(|(k, r)| (k, length(r)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        if shortest >= cfg.min_segment_fraction * total {
            break;
        }
        let net = |r: &Range<usize>| points[r.end.min(n - 1)] - points[r.start];
        let similarity = |a: &Range<usize>, b: &Range<usize>| {
            let (u, v) = (net(a), net(b));
            match (u.normalized(), v.normalized()) {
                (Some(u), Some(v)) => u.dot(v),
                _ => -2.0,
            }
        };
        let into_prev = if k == 0 {
            false
        } else if k + 1 == legs.len() {
            true
        } else {
            similarity(&legs[k], &legs[k - 1]) >= similarity(&legs[k], &legs[k + 1])
        };
        let r = legs.remove(k);
        if into_prev {
            legs[k - 1].end = r.end;
        } else {
            legs[k].start = r.start;
        }
    }
    legs
}

/// Points of a half-open sample range including the following boundary sample.
pub(crate) fn span_points(points: &[Point], span: &Range<usize>) -> Range<usize> {
    span.start..(span.end.min(points.len() - 1) + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityEvidence {
    /// +1 bulging to the visual left of the directed chord, -1 to the right, 0 flat.
    pub sign: i8,
    pub confidence: f64,
    /// Largest signed chord deviation relative to chord length.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    /// Half-open sample range in the resampled trajectory.
    pub span: Range<usize>,
    pub dominant_direction: Option<Compass>,
    pub magnitude: f64,
    pub net_displacement: Point,
    /// Set when consecutive reversing legs were merged into one block.
    pub oscillating: bool,
    pub legs: usize,
    pub convexity: ConvexityEvidence,
}

pub(crate) fn convexity(pts: &[Point], cfg: &AnalyzerConfig) -> ConvexityEvidence {
    let flat = ConvexityEvidence {
        sign: 0,
        confidence: 0.0,
        deviation: 0.0,
    };
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let chord = b - a;
    let Some(u) = chord.normalized() else { return flat };
    let left = u.right_normal() * -1.0;
    let dev = pts
        .iter()
        .map(|&p| (p - a).dot(left) / chord.norm())
        .fold(0.0f64, |best, d| if d.abs() > best.abs() { d } else { best });
    if dev == 0.0 {
        return flat;
    }
    ConvexityEvidence {
        sign: if dev > 0.0 { 1 } else { -1 },
        confidence: (dev.abs() / cfg.bulge_confidence).min(1.0),
        deviation: dev,
    }
}

pub(crate) fn make_segment(points: &[Point], span: Range<usize>, legs: usize, cfg: &AnalyzerConfig) -> Segment {
    let r = span_points(points, &span);
    let pts = &points[r];
    let net = pts[pts.len() - 1] - pts[0];
    Segment {
        span,
        dominant_direction: Compass::classify(net),
        magnitude: net.norm(),
        net_displacement: net,
        oscillating: legs > 1,
        legs,
        convexity: convexity(pts, cfg),
    }
}

/// Groups runs of reversing legs (turn above 100°) into oscillating blocks.
pub(crate) fn blocks(points: &[Point], legs: &[Range<usize>], cfg: &AnalyzerConfig) -> Vec<Segment> {
    let n = points.len();
    let net = |r: &Range<usize>| points[r.end.min(n - 1)] - points[r.start];
    let reverses = |a: &Range<usize>, b: &Range<usize>| match (net(a).normalized(), net(b).normalized()) {
        (Some(u), Some(v)) => u.dot(v) < (100f64).to_radians().cos(),
        _ => false,
    };
    let mut out = Vec::new();
    let mut k = 0;
    while k < legs.len() {
        let mut e = k;
        while e + 1 < legs.len() && reverses(&legs[e], &legs[e + 1]) {
            e += 1;
        }
        out.push(make_segment(points, legs[k].start..legs[e].end, e - k + 1, cfg));
        k = e + 1;
    }
    out
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    least_squares(xs, ys).1
}

/// Half-cycles of a sweeping oscillation: sign alternations of the detrended
/// projection, with a hysteresis band of `eps`. Amplitude is peak-to-peak.
pub(crate) fn sweep_oscillations(pts: &[Point], arc: &[f64], axis: Point, eps: f64) -> (u32, f64) {
    let proj: Vec<f64> = pts.iter().map(|p| p.dot(axis)).collect();
    let (a, b) = least_squares(arc, &proj);
    let mut state = 0i8;
    let mut crossings = 0u32;
    let mut peaks = Vec::new();
    let mut peak = 0.0f64;
    for (r, s) in proj.iter().zip(arc) {
        let r = r - (a + b * s);
        let now = if r > eps {
            1
        } else if r < -eps {
            -1
        } else {
            state
        };
        if now != state {
            if state != 0 {
                crossings += 1;
                peaks.push(peak);
            }
            state = now;
            peak = 0.0;
        }
        if state != 0 && r.abs() > peak {
            peak = r.abs();
        }
    }
    if state != 0 {
        peaks.push(peak);
    }
    if crossings == 0 {
        return (0, 0.0);
    }
    (crossings, 2.0 * peaks.iter().sum::<f64>() / peaks.len() as f64)
}

/// Monotone legs of the projection onto `axis` (zigzag with hysteresis).
/// Amplitude is the mean leg extent.
pub(crate) fn leg_oscillations(pts: &[Point], axis: Point, eps: f64) -> (u32, f64) {
    let proj: Vec<f64> = pts.iter().map(|p| p.dot(axis)).collect();
    let mut pivots = Vec::new();
    let (mut hi, mut lo) = (proj[0], proj[0]);
    let mut dir = 0i8;
    let mut ext = proj[0];
    for &v in &proj[1..] {
        match dir {
            0 => {
                hi = hi.max(v);
                lo = lo.min(v);
                if hi - lo > eps {
                    if v == hi {
                        dir = 1;
                        pivots.push(lo);
                    } else {
                        dir = -1;
                        pivots.push(hi);
                    }
                    ext = v;
                }
            }
            1 => {
                if v > ext {
                    ext = v;
                } else if ext - v > eps {
                    pivots.push(ext);
                    dir = -1;
                    ext = v;
                }
            }
            _ => {
                if v < ext {
                    ext = v;
                } else if v - ext > eps {
                    pivots.push(ext);
                    dir = 1;
                    ext = v;
                }
            }
        }
    }
    if dir == 0 {
        return (0, 0.0);
    }
    pivots.push(ext);
    let legs = pivots.len() - 1;
    let amp = pivots.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / legs as f64;
    (legs as u32, amp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub total_turning: f64,
    pub revolution_count: u32,
    pub direction: Option<Turn>,
}

impl Winding {
    pub(crate) fn from_total(total: f64) -> Winding {
        let direction = if total.abs() < 1e-9 {
            None
        } else if total > 0.0 {
            Some(Turn::Clockwise)
        } else {
            Some(Turn::CounterClockwise)
        };
        Winding {
            total_turning: total,
            revolution_count: (total.abs() / TAU).round() as u32,
            direction,
        }
    }
}

pub(crate) fn is_collinear(pts: &[Point]) -> bool {
    let a = pts[0];
    let far = pts
        .iter()
        .copied()
        .fold(a, |best, p| if p.dist(a) > best.dist(a) { p } else { best });
    let Some(u) = (far - a).normalized() else { return true };
    pts.iter().all(|&p| (p - a).cross(u).abs() < 1e-9)
}

/// Total signed turning between consecutive displacements. A path whose end
/// returns to its start also counts the closing turn.
pub(crate) fn winding(pts: &[Point], cfg: &AnalyzerConfig) -> Winding {
    if pts.len() < 3 || is_collinear(pts) {
        return Winding {
            total_turning: 0.0,
            revolution_count: 0,
            direction: None,
        };
    }
    let d: Vec<Point> = pts
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|v| v.norm() > 1e-12)
        .collect();
    let turn = |a: Point, b: Point| a.cross(b).atan2(a.dot(b));
    let mut total: f64 = d.windows(2).map(|w| turn(w[0], w[1])).sum();
    if d.len() >= 3 && pts[0].dist(pts[pts.len() - 1]) < cfg.closure_tolerance {
        total += turn(d[d.len() - 1], d[0]);
    }
    Winding::from_total(total)
}

pub(crate) fn centroid(pts: &[Point]) -> Point {
    pts.iter().fold(Point::default(), |a, &b| a + b) * (1.0 / pts.len() as f64)
}

/// Signed angle swept by the position vector around the centroid; positive
/// is visually clockwise.
pub(crate) fn centroid_sweep(pts: &[Point]) -> f64 {
    let c = centroid(pts);
    let mut total = 0.0;
    let mut prev: Option<Point> = None;
    for &p in pts {
        let v = p - c;
        if v.norm() < 1e-12 {
            continue;
        }
        if let Some(u) = prev {
            total += u.cross(v).atan2(u.dot(v));
        }
        prev = Some(v);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundingEvent {
    pub object: String,
    pub min_distance: f64,
    /// Least-squares slope of distance against arc length, normalized units.
    pub distance_slope: f64,
    pub entered_region: bool,
    pub passing_side: Option<Side>,
    pub chord_crossed: bool,
    /// Distance from the straight chord to the region (0 when crossed).
    pub chord_distance: f64,
}

pub(crate) fn grounding(pts: &[Point], arc: &[f64], obj: &SceneObject) -> GroundingEvent {
    let region = &obj.region;
    let dist: Vec<f64> = pts.iter().map(|&p| region.distance(p)).collect();
    let (closest, min_distance) = dist
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best });
    let arc0 = arc[0];
    let rel: Vec<f64> = arc.iter().map(|s| s - arc0).collect();
    let (_, distance_slope) = least_squares(&rel, &dist);
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let chord_crossed = region.intersects_segment(a, b);
    let chord_distance = if chord_crossed {
        0.0
    } else {
        region
            .vertices()
            .iter()
            .map(|&v| crate::trajectory::point_segment_distance(v, a, b))
            .fold(f64::INFINITY, f64::min)
            .min(region.distance(a))
            .min(region.distance(b))
    };
    let passing_side = (b - a).normalized().and_then(|u| {
        let side = (pts[closest] - region.centroid()).dot(u.right_normal());
        if side.abs() < 1e-9 {
            None
        } else if side > 0.0 {
            Some(Side::Right)
        } else {
            Some(Side::Left)
        }
    });
    GroundingEvent {
        object: obj.label.clone(),
        min_distance,
        distance_slope,
        entered_region: pts.iter().any(|&p| region.contains(p)),
        passing_side,
        chord_crossed,
        chord_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_range() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-0.5) + 0.5).abs() < 1e-12);
        assert!((angle_between(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn leg_counter_counts_monotone_runs() {
        let pts: Vec<Point> = [0.0, 1.0, 0.0, 1.0]
            .iter()
            .map(|&y| Point::new(0.0, y))
            .collect();
        let (legs, amp) = leg_oscillations(&pts, Point::new(0.0, 1.0), 0.02);
        assert_eq!(legs, 3);
        assert!((amp - 1.0).abs() < 1e-12);
        let flat = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert_eq!(leg_oscillations(&flat, Point::new(0.0, 1.0), 0.02), (0, 0.0));
    }

    #[test]
    fn least_squares_fits_line() {
        let (a, b) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((a - 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
    }
}
