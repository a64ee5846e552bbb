//! Fixtures shared by several test targets.
#![allow(dead_code)]

use motif_core::generators::{box_obstacle, gen_composite, GeneratorKind, GeneratorParams, Leg};
use motif_core::render::{gradient_color, render_flow_overlay, render_keypoint_overlay, RenderConfig};
use motif_core::trajectory::{Frame, KeypointTrack, Point, SceneObject, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Descriptions from the task list, with `<obstacle>` filled in.
pub const TASK_LIST: [&str; 26] = [
    "move in the shortest path",
    "make a detour to the left and follow the walkway, avoiding moving over the grass",
    "make a detour to the right of the long table, avoiding collision with chairs",
    "make a triangular motion clockwise",
    "move upward and to the right",
    "move up and down 4 times",
    "completely flip the object to the right and flip it back to its initial state",
    "move downward and to the left",
    "move downward while getting farther from the box, then move to the left",
    "make 2 circular motions counter-clockwise",
    "move upward, then move downward while making diagonal oscillations",
    "move to the right and move to the left, repeating this sequence 2 times",
    "move to the right, making diagonal oscillations",
    "move to the right",
    "move upward and to the left",
    "move to the left and to the right",
    "move to the left while making back and forth oscillations",
    "move downward and to the right following a concave curve",
    "move downward while making horizontal oscillations",
    "make 5 strokes downward, increasing the starting height of each stroke",
    "move downward and to the right following a convex curve",
    "make a circular motion clockwise, move upward, then move downward and to the right",
    "move to the right shortly, then move to the left following a concave curve",
    "make a circular motion clockwise, gradually increasing the radius of the circle",
    "make a circular motion clockwise",
    "move upward",
];

/// Descriptions from the worked trajectory examples, body text and the
/// refinement walk-through.
pub const EXAMPLES: [&str; 22] = [
    "move downward, then move to the left",
    "move farther from the laptop, move downward, then move to the left",
    "move downward and to the left, passing over the laptop",
    "move over the laptop",
    "move downward, while making horizontal oscillations",
    "move downward, while making side-to-side movements",
    "move downward",
    "move downward, while making vertical oscillations",
    "move to the left, while making vertical oscillations and alternating rotations",
    "move to the left, while making vertical oscillations",
    "move to the left, while making vertical shaking movements",
    "move to the left in a straight line",
    "make a detour to the right of the manhole",
    "move forward, making a detour to the right of the manhole",
    "move forward in the shortest path",
    "move forward in a straight line, moving over the manhole",
    "move downward and farther from the laptop, then move to the left",
    "move downward, getting closer to the laptop, and then move to the left",
    "move farther from the laptop",
    "move to the left",
    "move to the left while making vertical oscillations",
    "move downward and farther from the laptop",
];

pub fn track(id: u32, pts: &[(f64, f64)]) -> KeypointTrack {
    let pts: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
    KeypointTrack::from_points(id, &pts)
}

/// Frame with per-pixel noise so any stray write shows up.
pub fn noisy(index: u64, w: u32, h: u32, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = Frame::filled(index, w, h, [0, 0, 0]);
    for v in f.pixels.as_mut().unwrap().iter_mut() {
        *v = rng.random();
    }
    f
}

/// Distance from `p` to the polyline, computed independently of the library.
pub fn polyline_distance(p: (f64, f64), pts: &[(f64, f64)]) -> f64 {
    let seg = |a: (f64, f64), b: (f64, f64)| {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
        ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
    };
    if pts.len() == 1 {
        return seg(pts[0], pts[0]);
    }
    pts.windows(2).map(|w| seg(w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// x-monotone track stepping at least `3 · line_width` to the right each sample.
pub fn monotone_track(rng: &mut ChaCha8Rng, w: u32, h: u32, lw: u32) -> Vec<(f64, f64)> {
    let step = 3.0 * lw as f64;
    let mut x = rng.random_range(5.0..20.0);
    let mut pts = Vec::new();
    while x < w as f64 - 10.0 && pts.len() < 30 {
        pts.push((x, rng.random_range(10.0..h as f64 - 10.0)));
        x += rng.random_range(step..step * 3.0);
    }
    pts
}

fn leg(a: (f64, f64), b: (f64, f64)) -> Leg {
    Leg::new(
        GeneratorKind::Line,
        GeneratorParams { start: Point::new(a.0, a.1), end: Point::new(b.0, b.1), n: 40, ..Default::default() },
    )
}

/// The cup path from the pick-and-place example: down, then left, with the
/// laptop above and to the left of the path.
pub fn cup_scene() -> (Trajectory, Vec<SceneObject>) {
    let g = gen_composite(&[leg((0.6, 0.3), (0.6, 0.8)), leg((0.6, 0.8), (0.2, 0.8))]).unwrap();
    (g.trajectory, vec![box_obstacle("laptop", 0.1, 0.1, 0.4, 0.35)])
}

/// Renders `cases` random x-monotone tracks and checks each segment midpoint
/// against the gradient, which must run white to green to red.
pub fn assert_gradient_monotone(cases: usize, seed: u64) {
    let c = RenderConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let pts = monotone_track(&mut rng, 320, 200, c.line_width);
        let base = Frame::filled(0, 320, 200, [0, 0, 0]);
        let out = render_keypoint_overlay(&base, &track(0, &pts), &c).unwrap();
        let m = pts.len() - 1;
        let last = pts[m];
        let mut seen = Vec::new();
        for i in 0..m {
            let (a, b) = (pts[i], pts[i + 1]);
            let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            // the end disc is drawn last and may cover the final midpoint
            if ((mid.0 - last.0).powi(2) + (mid.1 - last.1).powi(2)).sqrt() <= c.endpoint_radius as f64 + 2.0 {
                continue;
            }
            let px = out.pixel(mid.0.round() as u32, mid.1.round() as u32).unwrap();
            assert_eq!(px, gradient_color(&c, i, m), "segment {i} of {m}");
            seen.push(px);
        }
        assert!(seen.len() >= 2);
        for w in seen.windows(2) {
            assert!(w[1][1] >= w[0][1], "green must not fall: {seen:?}");
            assert!(w[1][0] <= w[0][0] && w[1][2] <= w[0][2], "red/blue must not rise: {seen:?}");
        }
    }
}

/// Renders `cases` random tracks, some leaving the frame, over noise and
/// checks every pixel beyond the stroke reach is bitwise unchanged.
pub fn assert_envelope_untouched(cases: u64, seed: u64) {
    let c = RenderConfig::default();
    let reach = (c.line_width + c.endpoint_radius) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..cases {
        let (w, h) = (160, 120);
        let n = rng.random_range(1..12);
        // some samples fall outside the frame to exercise clipping
        let pts: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.random_range(-30.0..190.0), rng.random_range(-30.0..150.0))).collect();
        let base = noisy(0, w, h, k);
        let outs = [
            render_keypoint_overlay(&base, &track(0, &pts), &c).unwrap(),
            render_flow_overlay(&base, &[track(3, &pts)], &c).unwrap(),
        ];
        for out in &outs {
            for y in 0..h {
                for x in 0..w {
                    if polyline_distance((x as f64, y as f64), &pts) > reach {
                        assert_eq!(out.pixel(x, y), base.pixel(x, y), "({x},{y}) on {pts:?}");
                    }
                }
            }
        }
    }
}

pub struct Fixture {
    pub name: &'static str,
    pub preds: &'static [u8],
    pub labels: &'static [u8],
    /// (tp, fp, tn, fn)
    pub counts: (u64, u64, u64, u64),
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

/// Confusions counted by hand; ratios written as fractions of those counts.
pub const FIXTURES: [Fixture; 10] = [
    Fixture { name: "documented", preds: &[1, 1, 0, 1], labels: &[1, 0, 0, 0], counts: (1, 2, 1, 0), precision: Some(1.0 / 3.0), recall: Some(1.0) },
    Fixture { name: "perfect", preds: &[1, 0, 1, 0], labels: &[1, 0, 1, 0], counts: (2, 0, 2, 0), precision: Some(1.0), recall: Some(1.0) },
    Fixture { name: "never says yes", preds: &[0, 0, 0], labels: &[1, 0, 1], counts: (0, 0, 1, 2), precision: None, recall: Some(0.0) },
    Fixture { name: "no positives at all", preds: &[0, 0], labels: &[0, 0], counts: (0, 0, 2, 0), precision: None, recall: None },
    Fixture { name: "only false alarms", preds: &[1, 1], labels: &[0, 0], counts: (0, 2, 0, 0), precision: Some(0.0), recall: None },
    Fixture { name: "inverted", preds: &[0, 1, 0, 1], labels: &[1, 0, 1, 0], counts: (0, 2, 0, 2), precision: Some(0.0), recall: Some(0.0) },
    Fixture { name: "single hit", preds: &[1], labels: &[1], counts: (1, 0, 0, 0), precision: Some(1.0), recall: Some(1.0) },
    Fixture { name: "single miss", preds: &[0], labels: &[1], counts: (0, 0, 0, 1), precision: None, recall: Some(0.0) },
    Fixture { name: "says yes to everything", preds: &[1, 1, 1, 1, 1, 1, 1], labels: &[1, 0, 0, 1, 0, 0, 0], counts: (2, 5, 0, 0), precision: Some(2.0 / 7.0), recall: Some(1.0) },
    Fixture { name: "one in eleven", preds: &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], labels: &[1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0], counts: (1, 1, 7, 2), precision: Some(1.0 / 2.0), recall: Some(1.0 / 3.0) },
];

/// Equal ratios, or both undefined.
pub fn same_ratio(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() < 1e-12,
        _ => false,
    }
}
