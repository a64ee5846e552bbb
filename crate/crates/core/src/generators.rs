//! Parametric trajectory generators in unit-square coordinates.
//!
//! The shaking generators follow the published code-as-policies functions
//! leg for leg: a leg of `n` samples is concatenated `frequency` times with
//! every odd leg reversed, so junction samples appear twice.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dsl::{
    format_description, Axis, Convexity, Grounding, MotionAst, Primitive, Side, Step, Turn,
};
use crate::error::{Error, Result};
use crate::trajectory::{Compass, Episode, KeypointTrack, Point, Region, SceneObject, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorParams {
    /// Samples per leg (per revolution for circles).
    pub n: usize,
    /// Carried as metadata only; never affects geometry.
    pub time_dt: f64,
    pub start: Point,
    pub end: Point,
    pub amplitude: f64,
    pub frequency: u32,
    /// Constant translation added across a shaking motion, spread evenly over its samples.
    pub drift: Option<Point>,
    pub center: Point,
    pub radius: f64,
    pub turn: Turn,
    pub count: u32,
    pub convexity: Convexity,
    pub bulge: f64,
    pub side: Side,
    pub clearance: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n: 32,
            time_dt: 1.5,
            start: Point::new(0.0, 0.5),
            end: Point::new(0.5, 1.0),
            amplitude: 0.1,
            frequency: 2,
            drift: None,
            center: Point::new(0.5, 0.5),
            radius: 0.2,
            turn: Turn::Clockwise,
            count: 1,
            convexity: Convexity::Convex,
            bulge: 0.1,
            side: Side::Right,
            clearance: 0.05,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n = {} < 2", self.n)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidArgument("noise_sigma must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    Line,
    VerticalShaking,
    HorizontalShaking,
    Circle,
    Arc,
    Detour,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::Line,
        GeneratorKind::VerticalShaking,
        GeneratorKind::HorizontalShaking,
        GeneratorKind::Circle,
        GeneratorKind::Arc,
        GeneratorKind::Detour,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Line => "line",
            GeneratorKind::VerticalShaking => "vertical-shaking",
            GeneratorKind::HorizontalShaking => "horizontal-shaking",
            GeneratorKind::Circle => "circle",
            GeneratorKind::Arc => "arc",
            GeneratorKind::Detour => "detour",
        }
    }

    pub fn from_name(s: &str) -> Option<GeneratorKind> {
        let s = s.replace('_', "-");
        GeneratorKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// A generated trajectory with the motion it realizes. Coordinates are in
/// the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub trajectory: Trajectory,
    pub ast: MotionAst,
    pub scene: Vec<SceneObject>,
}

impl Generated {
    fn new(points: Vec<Point>, ast: MotionAst) -> Self {
        Generated {
            trajectory: Trajectory::single(KeypointTrack::from_points(0, &points)),
            ast,
            scene: Vec::new(),
        }
    }

    pub fn points(&self) -> Vec<Point> {
        self.trajectory.tracks[0].points()
    }

    /// Episode in pixel coordinates on a `canvas` × `canvas` image.
    pub fn into_episode(
        self,
        id: impl Into<String>,
        task_instruction: impl Into<String>,
        category: impl Into<String>,
        canvas: f64,
    ) -> Episode {
        let scale = |p: Point| p * canvas;
        Episode {
            id: id.into(),
            task_instruction: task_instruction.into(),
            motion_description: format_description(&self.ast),
            category: category.into(),
            scene: self
                .scene
                .iter()
                .map(|o| SceneObject::new(o.label.clone(), o.region.map_points(scale)))
                .collect(),
            trajectory: self.trajectory.map_points(scale),
            frames_dir: None,
            forward_heading: None,
            metadata: Default::default(),
            frames: None,
        }
    }
}

/// `numpy.linspace(a, b, n)` per coordinate.
fn linspace(a: Point, b: Point, n: usize) -> Vec<Point> {
    let step = (b - a) * (1.0 / (n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                Point::new(a.x + step.x * i as f64, a.y + step.y * i as f64)
            }
        })
        .collect()
}

fn jitter(points: &mut [Point], sigma: f64, seed: u64) {
    if sigma <= 0.0 || points.len() < 3 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma checked finite and positive");
    let last = points.len() - 1;
    for p in &mut points[1..last] {
        p.x += normal.sample(&mut rng);
        p.y += normal.sample(&mut rng);
    }
}

fn direction_of(v: Point) -> Result<Compass> {
    Compass::classify(v).ok_or_else(|| Error::DegeneratePath("start equals end".into()))
}

/// Straight line from `start` to `end` with `n` equally spaced samples.
pub fn gen_line(p: &GeneratorParams) -> Result<Generated> {
    p.check()?;
    let dir = direction_of(p.end - p.start)?;
    let mut pts = linspace(p.start, p.end, p.n);
    jitter(&mut pts, p.noise_sigma, p.seed);
    Ok(Generated::new(
        pts,
        MotionAst::single(Step::new(Primitive::Translate { direction: dir.into() })),
    ))
}

fn shaking(p: &GeneratorParams, axis: Axis) -> Result<Generated> {
    p.check()?;
    if !(p.amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!("amplitude {} <= 0", p.amplitude)));
    }
    if p.frequency < 1 {
        return Err(Error::InvalidArgument("frequency must be at least 1".into()));
    }
    let offset = match axis {
        Axis::Vertical => Point::new(0.0, p.amplitude),
        _ => Point::new(p.amplitude, 0.0),
    };
    let leg = linspace(p.start, p.start + offset, p.n);
    let mut pts = Vec::with_capacity(p.n * p.frequency as usize);
    for i in 0..p.frequency {
        if i % 2 == 0 {
            pts.extend(leg.iter().copied());
        } else {
            pts.extend(leg.iter().rev().copied());
        }
    }
    let oscillate = Primitive::Oscillate {
        axis: Some(axis),
        count: Some(p.frequency),
    };
    let ast = match p.drift {
        None => MotionAst::single(Step::new(oscillate)),
        Some(drift) => {
            if p.frequency < 2 {
                return Err(Error::InvalidArgument(
                    "a drifting shake needs at least two legs".into(),
                ));
            }
            let dir = direction_of(drift)?;
            let last = (pts.len() - 1) as f64;
            for (k, q) in pts.iter_mut().enumerate() {
                *q = *q + drift * (k as f64 / last);
            }
            MotionAst::single(Step::new(Primitive::Translate { direction: dir.into() }).with(oscillate))
        }
    };
    jitter(&mut pts, p.noise_sigma, p.seed);
    Ok(Generated::new(pts, ast))
}

/// Up-and-down legs starting at `start`, `n` samples each, `frequency` legs.
pub fn gen_vertical_shaking(p: &GeneratorParams) -> Result<Generated> {
    shaking(p, Axis::Vertical)
}

/// Side-to-side legs starting at `start`, `n` samples each, `frequency` legs.
pub fn gen_horizontal_shaking(p: &GeneratorParams) -> Result<Generated> {
    shaking(p, Axis::Horizontal)
}

/// `count` revolutions around `center`, `n` samples per revolution plus the
/// closing sample, starting at angle 0 (the rightmost point).
pub fn gen_circle(p: &GeneratorParams) -> Result<Generated> {
    p.check()?;
    if !(p.radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {} <= 0", p.radius)));
    }
    if p.count < 1 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    // with y pointing down, increasing angle runs visually clockwise
    let sign = match p.turn {
        Turn::Clockwise => 1.0,
        Turn::CounterClockwise => -1.0,
    };
    let total = p.n * p.count as usize;
    let mut pts: Vec<Point> = (0..=total)
        .map(|k| {
            if k == total {
                return p.center + Point::new(p.radius, 0.0);
            }
            let a = sign * std::f64::consts::TAU * k as f64 / p.n as f64;
            p.center + Point::new(p.radius * a.cos(), p.radius * a.sin())
        })
        .collect();
    jitter(&mut pts, p.noise_sigma, p.seed);
    let ast = MotionAst::single(Step::new(Primitive::Rotate {
        turn: p.turn,
        count: p.count,
        shape: crate::dsl::LoopShape::Circle,
    }));
    Ok(Generated::new(pts, ast))
}

/// Parabolic arc from `start` to `end` whose midpoint sits `bulge` off the
/// chord. Convex arcs bulge to the visual left of the directed chord.
pub fn gen_arc(p: &GeneratorParams) -> Result<Generated> {
    p.check()?;
    let chord = p.end - p.start;
    let dir = direction_of(chord)?;
    if p.bulge == 0.0 {
        return gen_line(p);
    }
    if !(p.bulge > 0.0) {
        return Err(Error::InvalidArgument(format!("bulge {} < 0", p.bulge)));
    }
    let u = chord.normalized().expect("non-zero chord");
    let left = u.right_normal() * -1.0;
    let normal = match p.convexity {
        Convexity::Convex => left,
        Convexity::Concave => left * -1.0,
    };
    let mut pts = linspace(p.start, p.end, p.n);
    let last = (p.n - 1) as f64;
    for (i, q) in pts.iter_mut().enumerate() {
        let s = i as f64 / last;
        *q = *q + normal * (4.0 * s * (1.0 - s) * p.bulge);
    }
    jitter(&mut pts, p.noise_sigma, p.seed);
    let ast = MotionAst::single(Step::new(Primitive::Curve {
        direction: dir.into(),
        convexity: p.convexity,
    }));
    Ok(Generated::new(pts, ast))
}

/// Path from `start` to `end` that steps around `obstacle` on `side`,
/// keeping at least `clearance` from it.
pub fn gen_detour(p: &GeneratorParams, obstacle: &SceneObject) -> Result<Generated> {
    p.check()?;
    let chord = p.end - p.start;
    let dir = direction_of(chord)?;
    let region = &obstacle.region;
    if !region.intersects_segment(p.start, p.end) {
        return Err(Error::InvalidArgument(format!(
            "obstacle {:?} does not block the straight path",
            obstacle.label
        )));
    }
    if region.contains(p.start) || region.contains(p.end) {
        return Err(Error::Infeasible("start or end lies inside the obstacle".into()));
    }
    let u = chord.normalized().expect("non-zero chord");
    let normal = match p.side {
        Side::Right => u.right_normal(),
        Side::Left => u.right_normal() * -1.0,
    };
    let verts = region.vertices();
    let along = |q: Point| (q - p.start).dot(u);
    let across = |q: Point| (q - p.start).dot(normal);
    let lo = verts.iter().map(|&v| along(v)).fold(f64::INFINITY, f64::min) - p.clearance;
    let hi = verts.iter().map(|&v| along(v)).fold(f64::NEG_INFINITY, f64::max) + p.clearance;
    let off = verts.iter().map(|&v| across(v)).fold(f64::NEG_INFINITY, f64::max) + p.clearance;
    // go straight until just short of the obstacle, sidestep steeply, pass
    // it, and step back onto the chord
    let ramp = 0.25 * off;
    let chord_len = chord.norm();
    let (lo, hi) = (lo.max(0.0), hi.min(chord_len));
    let a = p.start + u * lo + normal * off;
    let b = p.start + u * hi + normal * off;
    let inside_view = |q: Point| (0.0..=1.0).contains(&q.x) && (0.0..=1.0).contains(&q.y);
    if !inside_view(a) || !inside_view(b) {
        return Err(Error::Infeasible(format!(
            "no room to pass the {:?} on the {}",
            obstacle.label,
            p.side.name()
        )));
    }
    let mut corners = vec![p.start];
    if lo - ramp > 0.0 {
        corners.push(p.start + u * (lo - ramp));
    }
    corners.extend([a, b]);
    if hi + ramp < chord_len {
        corners.push(p.start + u * (hi + ramp));
    }
    corners.push(p.end);
    let track = KeypointTrack::from_points(0, &corners);
    let mut pts = crate::trajectory::resample_arclength(&track, p.n)?.points();
    jitter(&mut pts, p.noise_sigma, p.seed);
    if pts.iter().any(|&q| region.contains(q)) {
        return Err(Error::Infeasible(format!("detour crosses the {:?}", obstacle.label)));
    }
    let ast = MotionAst::single(Step::new(Primitive::Translate { direction: dir.into() }).with(
        Grounding::Detour {
            object: Some(obstacle.label.clone()),
            side: p.side,
        },
    ));
    let mut g = Generated::new(pts, ast);
    g.scene.push(obstacle.clone());
    Ok(g)
}

/// One leg of a composite motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub kind: GeneratorKind,
    pub params: GeneratorParams,
    pub obstacle: Option<SceneObject>,
}

impl Leg {
    pub fn new(kind: GeneratorKind, params: GeneratorParams) -> Self {
        Leg {
            kind,
            params,
            obstacle: None,
        }
    }
}

pub fn generate(kind: GeneratorKind, p: &GeneratorParams, obstacle: Option<&SceneObject>) -> Result<Generated> {
    match kind {
        GeneratorKind::Line => gen_line(p),
        GeneratorKind::VerticalShaking => gen_vertical_shaking(p),
        GeneratorKind::HorizontalShaking => gen_horizontal_shaking(p),
        GeneratorKind::Circle => gen_circle(p),
        GeneratorKind::Arc => gen_arc(p),
        GeneratorKind::Detour => {
            let obstacle = obstacle
                .ok_or_else(|| Error::InvalidArgument("detour needs an obstacle".into()))?;
            gen_detour(p, obstacle)
        }
    }
}

/// Concatenates legs in order. Each leg is shifted so it starts where the
/// previous one ended; the shared junction sample is kept twice.
pub fn gen_composite(legs: &[Leg]) -> Result<Generated> {
    if legs.is_empty() {
        return Err(Error::InvalidArgument("composite needs at least one leg".into()));
    }
    let mut pts: Vec<Point> = Vec::new();
    let mut steps = Vec::new();
    let mut scene: Vec<SceneObject> = Vec::new();
    for leg in legs {
        let g = generate(leg.kind, &leg.params, leg.obstacle.as_ref())?;
        let leg_pts = g.points();
        let shift = match pts.last() {
            Some(&end) => end - leg_pts[0],
            None => Point::default(),
        };
        pts.extend(leg_pts.into_iter().map(|q| q + shift));
        scene.extend(g.scene.into_iter().map(|o| {
            SceneObject::new(o.label, o.region.map_points(|q| q + shift))
        }));
        steps.extend(g.ast.steps);
    }
    let mut g = Generated::new(pts, MotionAst::new(steps));
    g.scene = scene;
    Ok(g)
}

/// Convenience for tests and the CLI: an axis-aligned box obstacle.
pub fn box_obstacle(label: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> SceneObject {
    SceneObject::new(label, Region::boxed(x0, y0, x1, y1))
}

/// Families drawn by [`synthetic_episode`], in rotation.
const FAMILIES: [&str; 9] = [
    "line",
    "vertical-shaking",
    "horizontal-shaking",
    "vertical-sweep",
    "horizontal-sweep",
    "circle",
    "arc",
    "detour",
    "composite",
];

const OBSTACLES: [&str; 5] = ["manhole", "table", "puddle", "cone", "grass"];

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    rng.random_range(lo..hi)
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    use rand::Rng;
    &items[rng.random_range(0..items.len())]
}

fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Point {
    Point::new(uniform(rng, lo, hi), uniform(rng, lo, hi))
}

/// A start/end pair at least `min_len` apart inside `[lo, hi]²`.
fn random_chord(rng: &mut ChaCha8Rng, lo: f64, hi: f64, min_len: f64) -> (Point, Point) {
    loop {
        let (a, b) = (random_point(rng, lo, hi), random_point(rng, lo, hi));
        if a.dist(b) >= min_len {
            return (a, b);
        }
    }
}

fn draw(family: &str, rng: &mut ChaCha8Rng) -> Result<(Generated, &'static str, &'static str)> {
    use rand::Rng;
    let base = GeneratorParams {
        n: rng.random_range(16..48),
        ..GeneratorParams::default()
    };
    Ok(match family {
        "line" => {
            let (start, end) = random_chord(rng, 0.1, 0.9, 0.3);
            (gen_line(&GeneratorParams { start, end, ..base })?, "draw path", "move the marker across the board")
        }
        "vertical-shaking" | "horizontal-shaking" => {
            let p = GeneratorParams {
                start: random_point(rng, 0.2, 0.6),
                amplitude: uniform(rng, 0.1, 0.3),
                frequency: rng.random_range(2..=6),
                n: rng.random_range(8..24),
                ..base
            };
            let g = if family == "vertical-shaking" { gen_vertical_shaking(&p)? } else { gen_horizontal_shaking(&p)? };
            (g, "shake", "shake the bottle")
        }
        "vertical-sweep" => {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let p = GeneratorParams {
                start: Point::new(if sign > 0.0 { 0.2 } else { 0.8 }, uniform(rng, 0.3, 0.6)),
                amplitude: uniform(rng, 0.1, 0.2),
                frequency: rng.random_range(3..=6),
                drift: Some(Point::new(sign * uniform(rng, 0.4, 0.6), 0.0)),
                n: rng.random_range(8..20),
                ..base
            };
            (gen_vertical_shaking(&p)?, "spread condiment", "sprinkle parsley on pizza")
        }
        "horizontal-sweep" => {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let p = GeneratorParams {
                start: Point::new(uniform(rng, 0.3, 0.6), if sign > 0.0 { 0.2 } else { 0.8 }),
                amplitude: uniform(rng, 0.1, 0.2),
                frequency: rng.random_range(3..=6),
                drift: Some(Point::new(0.0, sign * uniform(rng, 0.4, 0.6))),
                n: rng.random_range(8..20),
                ..base
            };
            (gen_horizontal_shaking(&p)?, "brush hair", "brush hair")
        }
        "circle" => {
            let p = GeneratorParams {
                center: random_point(rng, 0.4, 0.6),
                radius: uniform(rng, 0.15, 0.3),
                count: rng.random_range(1..=3),
                turn: if rng.random_bool(0.5) { Turn::Clockwise } else { Turn::CounterClockwise },
                n: rng.random_range(24..64),
                ..base
            };
            (gen_circle(&p)?, "stir", "stir the soup")
        }
        "arc" => {
            let (start, end) = random_chord(rng, 0.15, 0.85, 0.4);
            let p = GeneratorParams {
                start,
                end,
                bulge: uniform(rng, 0.15, 0.3) * start.dist(end),
                convexity: if rng.random_bool(0.5) { Convexity::Convex } else { Convexity::Concave },
                ..base
            };
            (gen_arc(&p)?, "handover", "hand the brush to the person")
        }
        "detour" => loop {
            let vertical = rng.random_bool(0.5);
            let forward = rng.random_bool(0.5);
            let c = uniform(rng, 0.4, 0.6);
            let (a, b) = if vertical {
                (Point::new(c, 0.9), Point::new(c, 0.1))
            } else {
                (Point::new(0.1, c), Point::new(0.9, c))
            };
            let (start, end) = if forward { (a, b) } else { (b, a) };
            let mid = Point::new(uniform(rng, 0.4, 0.6), uniform(rng, 0.4, 0.6));
            let (hw, hh) = (uniform(rng, 0.05, 0.12), uniform(rng, 0.05, 0.12));
            let obstacle = box_obstacle(pick(rng, &OBSTACLES), mid.x - hw, mid.y - hh, mid.x + hw, mid.y + hh);
            let p = GeneratorParams {
                start,
                end,
                side: if rng.random_bool(0.5) { Side::Left } else { Side::Right },
                clearance: uniform(rng, 0.04, 0.08),
                n: rng.random_range(64..96),
                ..base.clone()
            };
            match gen_detour(&p, &obstacle) {
                Ok(g) => break (g, "navigation", "deliver lemonade"),
                Err(Error::Infeasible(_) | Error::InvalidArgument(_)) => continue,
                Err(e) => return Err(e),
            }
        },
        _ => loop {
            // two or three straight legs joined at right angles
            let legs_n = rng.random_range(2..=3);
            let mut dir = *pick(rng, &Compass::ALL);
            let mut at = random_point(rng, 0.3, 0.7);
            let mut legs = Vec::new();
            let mut ok = true;
            for k in 0..legs_n {
                if k > 0 {
                    let turns = [2usize, 6];
                    let idx = Compass::ALL.iter().position(|&c| c == dir).unwrap();
                    dir = Compass::ALL[(idx + *pick(rng, &turns)) % 8];
                }
                let len = uniform(rng, 0.25, 0.4);
                let end = at + dir.unit() * len;
                if !(0.05..=0.95).contains(&end.x) || !(0.05..=0.95).contains(&end.y) {
                    ok = false;
                    break;
                }
                legs.push(Leg::new(GeneratorKind::Line, GeneratorParams { start: at, end, ..base.clone() }));
                at = end;
            }
            if ok {
                break (gen_composite(&legs)?, "pick and place", "pick up the cup and place it");
            }
        },
    })
}

/// One seeded synthetic episode; family chosen by `index` in rotation.
/// Coordinates are scaled to a `canvas`-pixel square.
pub fn synthetic_episode(index: usize, seed: u64, canvas: f64) -> Result<Episode> {
    let family = FAMILIES[index % FAMILIES.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index as u64);
    let (g, category, task) = draw(family, &mut rng)?;
    let mut ep = g.into_episode(format!("syn-{index:04}"), task, category, canvas);
    ep.metadata.insert("generator".into(), family.into());
    Ok(ep)
}

/// `count` synthetic episodes covering every generator family.
pub fn synthetic_corpus(count: usize, seed: u64, canvas: f64) -> Result<Vec<Episode>> {
    (0..count).map(|i| synthetic_episode(i, seed, canvas)).collect()
}
