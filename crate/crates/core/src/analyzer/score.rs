//! Per-clause scoring rubrics.

use std::f64::consts::TAU;

use super::features::{
    centroid, centroid_sweep, grounding, leg_oscillations, sweep_oscillations,
    GroundingEvent,
};
use super::{AnalyzerConfig, MotionFeatures};
use crate::dsl::{Axis, Clause, Grounding, LoopShape, Primitive, Quantity, Step, Trend};
use crate::error::{Error, Result};
use crate::trajectory::{Compass, Point, SceneObject};

/// What a clause needs to know about the step it belongs to.
#[derive(Debug, Clone, Default)]
pub struct StepContext {
    /// The step's primary moves the agent somewhere (translate, curve, straight),
    /// so oscillation modifiers ride on top of a sweep.
    pub translating: bool,
    /// A radius progression accompanies a rotation; circularity is not expected.
    pub radius_varies: bool,
    /// Object named by an `avoiding` clause in the same step.
    pub avoid_target: Option<String>,
    /// Image direction for "forward"; up when unset.
    pub forward: Option<Compass>,
}

impl StepContext {
    pub fn of_step(step: &Step, forward: Option<Compass>) -> Self {
        let translating = matches!(
            step.primary,
            Clause::Path(Primitive::Translate { .. } | Primitive::Curve { .. } | Primitive::Straight)
        );
        let radius_varies = step.clauses().any(|c| {
            matches!(
                c,
                Clause::Path(Primitive::Progression {
                    quantity: Quantity::Radius,
                    ..
                })
            )
        });
        let avoid_target = step.clauses().find_map(|c| match c {
            Clause::Ground(Grounding::Avoid { object }) => Some(object.clone()),
            _ => None,
        });
        StepContext {
            translating,
            radius_varies,
            avoid_target,
            forward,
        }
    }

    /// Context for a clause scored on its own, outside any step.
    pub fn of_clause(clause: &Clause) -> Self {
        StepContext::of_step(&Step::new(clause.clone()), None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub score: f64,
    pub evidence: String,
}

fn scored(score: f64, evidence: String) -> Result<Scored> {
    Ok(Scored {
        score: score.clamp(0.0, 1.0),
        evidence,
    })
}

fn count_factor(observed: u32, wanted: u32, decay: f64) -> f64 {
    (1.0 - decay * (observed as f64 - wanted as f64).abs()).max(0.0)
}

fn heading_deg(v: Point) -> f64 {
    // compass-style angle with up = 90°, as seen on screen
    (-v.y).atan2(v.x).to_degrees().rem_euclid(360.0)
}

fn direction_score(f: &MotionFeatures, dir: Compass) -> (f64, String) {
    let net = f.net();
    match net.normalized() {
        Some(u) => {
            // full credit inside the compass sector, none past the neighbouring one
            let off = u.dot(dir.unit()).clamp(-1.0, 1.0).acos().to_degrees();
            let c = ((67.5 - off) / 45.0).clamp(0.0, 1.0);
            (c, format!("net heading {:.1}°, {off:.1}° off {}, score {:.3}", heading_deg(net), dir.name(), c))
        }
        None => (0.0, "no net displacement".into()),
    }
}

fn unit(v: Point) -> Point {
    v.normalized().unwrap_or(Point::new(1.0, 0.0))
}

const DIAG_A: Point = Point { x: std::f64::consts::FRAC_1_SQRT_2, y: std::f64::consts::FRAC_1_SQRT_2 };
const DIAG_B: Point = Point { x: std::f64::consts::FRAC_1_SQRT_2, y: -std::f64::consts::FRAC_1_SQRT_2 };

/// Direction of greatest reach from the first sample.
fn reach_axis(pts: &[Point]) -> Point {
    let a = pts[0];
    let far = pts
        .iter()
        .copied()
        .fold(a, |best, p| if p.dist(a) > best.dist(a) { p } else { best });
    unit(far - a)
}

fn oscillation_axes(f: &MotionFeatures, axis: Option<Axis>, sweeping: bool) -> Vec<Point> {
    match axis {
        Some(Axis::Horizontal) => vec![Point::new(1.0, 0.0)],
        Some(Axis::Vertical) => vec![Point::new(0.0, 1.0)],
        Some(Axis::Diagonal) => vec![DIAG_A, DIAG_B],
        Some(Axis::BackAndForth) => vec![if sweeping { unit(f.net()) } else { reach_axis(&f.points) }],
        None => {
            let mut v = vec![Point::new(1.0, 0.0), Point::new(0.0, 1.0), DIAG_A, DIAG_B];
            if sweeping {
                v.push(unit(f.net()).right_normal());
            }
            v
        }
    }
}

fn count_on(f: &MotionFeatures, a: Point, sweeping: bool, cfg: &AnalyzerConfig) -> (u32, f64) {
    if sweeping {
        sweep_oscillations(&f.points, &f.arc, a, cfg.eps_amp)
    } else {
        leg_oscillations(&f.points, a, cfg.eps_amp)
    }
}

/// Oscillation count on the axes a clause names, in the mode the step implies.
pub(crate) fn oscillation_count(
    f: &MotionFeatures,
    axis: Option<Axis>,
    sweeping: bool,
    cfg: &AnalyzerConfig,
) -> (u32, f64) {
    oscillation_axes(f, axis, sweeping)
        .into_iter()
        .map(|a| count_on(f, a, sweeping, cfg))
        .fold((0, 0.0), |best, cur| {
            if cur.0 > best.0 || (cur.0 == best.0 && cur.1 > best.1) {
                cur
            } else {
                best
            }
        })
}

/// Extent across `a` relative to extent along it.
fn cross_ratio(pts: &[Point], a: Point) -> f64 {
    let n = a.right_normal();
    let extent = |d: Point| {
        let (lo, hi) = pts
            .iter()
            .map(|p| p.dot(d))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let along = extent(a);
    if along <= 0.0 {
        f64::INFINITY
    } else {
        extent(n) / along
    }
}

/// Shaking in place stays on its axis: full credit while the sideways
/// extent is at most half the extent along the axis, none at parity.
fn purity(ratio: f64) -> f64 {
    ((0.75 - ratio) / 0.5).clamp(0.0, 1.0)
}

/// A sweep must travel: full credit once the net displacement is 1.5 times
/// the peak-to-peak amplitude, none below half of it.
fn travel(net: f64, amp: f64) -> f64 {
    if amp <= 0.0 {
        return 1.0;
    }
    (net / amp - 0.5).clamp(0.0, 1.0)
}

const BEND_CHUNKS: usize = 12;

/// How the path bends, read off the centroids of equal-length chunks:
/// (|net turning| / total turning, largest share of the turning inside any
/// quarter of the path). A single curve bends one way, spread along its length.
fn bend_profile(pts: &[Point]) -> (f64, f64) {
    let n = pts.len();
    if n < BEND_CHUNKS * 2 {
        return (1.0, 0.0);
    }
    let centers: Vec<Point> = (0..BEND_CHUNKS)
        .map(|k| centroid(&pts[k * n / BEND_CHUNKS..(k + 1) * n / BEND_CHUNKS]))
        .collect();
    let heading: Vec<f64> = centers.windows(2).map(|w| (w[1].y - w[0].y).atan2(w[1].x - w[0].x)).collect();
    let turns: Vec<f64> = heading
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            (d + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
        })
        .collect();
    let total: f64 = turns.iter().map(|t| t.abs()).sum();
    if total <= 1e-9 {
        return (1.0, 0.0);
    }
    let net = turns.iter().sum::<f64>().abs();
    let w = (turns.len() / 4).max(1);
    let peak = turns
        .windows(w)
        .map(|s| s.iter().map(|t| t.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (net / total, peak / total)
}

/// Full credit when the turning is one-sided (ratio ≥ 0.7) and not bunched
/// into a corner (quarter share ≤ 0.55); none at 0.45 or 0.75 respectively.
fn smooth_bend(consistency: f64, spread: f64) -> f64 {
    let one_way = ((consistency - 0.45) / 0.25).clamp(0.0, 1.0);
    let gradual = ((0.75 - spread) / 0.2).clamp(0.0, 1.0);
    one_way * gradual
}

/// Net displacement over arc length.
fn efficiency(f: &MotionFeatures) -> f64 {
    let arc = f.arc[f.arc.len() - 1] - f.arc[0];
    if arc <= 0.0 {
        0.0
    } else {
        f.net().norm() / arc
    }
}

fn same_label(a: &str, b: &str) -> bool {
    let norm = |s: &str| {
        let s = s.trim().to_lowercase();
        s.strip_suffix('s').map(str::to_string).unwrap_or(s)
    };
    a.trim().eq_ignore_ascii_case(b.trim()) || norm(a) == norm(b)
}

fn find_object<'a>(f: &'a MotionFeatures, label: &str) -> Result<&'a SceneObject> {
    f.scene
        .iter()
        .find(|o| same_label(&o.label, label))
        .ok_or_else(|| Error::UnknownObject(label.to_string()))
}

fn event(f: &MotionFeatures, label: &str) -> Result<GroundingEvent> {
    let obj = find_object(f, label)?;
    Ok(grounding(&f.points, &f.arc, obj))
}

fn avoid_score(e: &GroundingEvent, eps: f64) -> f64 {
    if e.entered_region {
        0.0
    } else {
        (0.5 + 0.5 * e.min_distance / eps).min(1.0)
    }
}

/// Slope score: 0 when flat or wrong-signed, 1 once the slope reaches twice ε.
fn trend_score(slope: f64, eps: f64) -> f64 {
    (slope / (2.0 * eps)).clamp(0.0, 1.0)
}

pub(crate) fn score_clause(
    f: &MotionFeatures,
    clause: &Clause,
    ctx: &StepContext,
    cfg: &AnalyzerConfig,
) -> Result<Scored> {
    let forward = ctx.forward.unwrap_or(cfg.forward);
    match clause {
        Clause::Path(p) => score_primitive(f, p, ctx, forward, cfg),
        Clause::Ground(g) => score_grounding(f, g, ctx, cfg),
    }
}

fn score_primitive(
    f: &MotionFeatures,
    p: &Primitive,
    ctx: &StepContext,
    forward: Compass,
    cfg: &AnalyzerConfig,
) -> Result<Scored> {
    match p {
        Primitive::Translate { direction } => {
            let (s, ev) = direction_score(f, direction.resolve(forward));
            scored(s, ev)
        }
        Primitive::Curve {
            direction,
            convexity,
        } => {
            let (d, ev) = direction_score(f, direction.resolve(forward));
            let cv = super::features::convexity(&f.points, cfg);
            let want = match convexity {
                crate::dsl::Convexity::Convex => 1,
                crate::dsl::Convexity::Concave => -1,
            };
            let c = if cv.sign == want { cv.confidence } else { 0.0 };
            // past a semicircle the path is a loop, not a curve
            let e = efficiency(f);
            let open = ((e - 0.4) / 0.2).clamp(0.0, 1.0);
            let (one_way, spread) = bend_profile(&f.points);
            let bend = smooth_bend(one_way, spread);
            scored(
                (d * c).sqrt() * open * bend,
                format!(
                    "{ev}; bulge {:+.3} of chord, convexity score {:.3}, net/arc {e:.3}, bend {bend:.3}",
                    cv.deviation, c
                ),
            )
        }
        Primitive::Rotate { turn, count, shape } => {
            let sweep = centroid_sweep(&f.points);
            // a straight pass through the centroid sweeps π; demand most of a loop
            let revs = (sweep.abs() / TAU + 0.25).floor() as u32;
            let observed = if sweep > 0.0 {
                crate::dsl::Turn::Clockwise
            } else {
                crate::dsl::Turn::CounterClockwise
            };
            if revs == 0 || observed != *turn {
                return scored(
                    0.0,
                    format!("swept {:.2} rad around the centroid ({} loops)", sweep, revs),
                );
            }
            let k = count_factor(revs, *count, cfg.cycle_decay);
            let q = if *shape == LoopShape::Circle && !ctx.radius_varies {
                let c = centroid(&f.points);
                let r: Vec<f64> = f.points.iter().map(|&p| p.dist(c)).collect();
                let mean = r.iter().sum::<f64>() / r.len() as f64;
                let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / r.len() as f64;
                let cv = if mean > 0.0 { var.sqrt() / mean } else { 1.0 };
                (1.0 - cv / cfg.circularity_tolerance).clamp(0.0, 1.0)
            } else {
                1.0
            };
            scored(
                k * q,
                format!("{revs} loops {}, count score {k:.3}, roundness {q:.3}", observed.name()),
            )
        }
        Primitive::Oscillate { axis, count } => {
            let sweeping = ctx.translating;
            let mut best: Option<(f64, u32, f64, f64)> = None;
            for a in oscillation_axes(f, *axis, sweeping) {
                let (obs, amp) = count_on(f, a, sweeping, cfg);
                let c = match count {
                    Some(c) => count_factor(obs, *c, cfg.cycle_decay),
                    None if obs >= 2 => 1.0,
                    None => count_factor(obs, 2, cfg.cycle_decay),
                };
                let q = if sweeping {
                    travel(f.net().norm(), amp)
                } else {
                    purity(cross_ratio(&f.points, a))
                };
                if best.is_none_or(|b| c * q > b.0) {
                    best = Some((c * q, obs, amp, q));
                }
            }
            let (s, obs, amp, q) = best.unwrap_or((0.0, 0, 0.0, 0.0));
            if sweeping {
                scored(s, format!("{obs} half-cycles, mean amplitude {amp:.3}, travel score {q:.3}"))
            } else {
                scored(s, format!("{obs} legs, mean amplitude {amp:.3}, on-axis score {q:.3}"))
            }
        }
        Primitive::Repeat { sequence, count } => score_repeat(f, sequence, *count, ctx, cfg),
        Primitive::Straight => {
            let (a, b) = (f.points[0], f.points[f.points.len() - 1]);
            let chord = b - a;
            let Some(u) = chord.normalized() else {
                return scored(0.0, "start and end coincide".into());
            };
            let dev = f.points.iter().map(|&p| (p - a).cross(u).abs()).fold(0.0, f64::max) / chord.norm();
            let s = 1.0 - (dev - cfg.straight_tolerance) / cfg.straight_falloff;
            scored(s, format!("max chord deviation {dev:.3} of chord length"))
        }
        Primitive::Flip { direction, back } => {
            let start = f.points[0];
            let far = f
                .points
                .iter()
                .copied()
                .fold(start, |best, p| if p.dist(start) > best.dist(start) { p } else { best });
            let out = far - start;
            let Some(u) = out.normalized() else {
                return scored(0.0, "no excursion".into());
            };
            let d = u.dot(direction.resolve(forward).unit()).clamp(0.0, 1.0);
            let r = if *back {
                let gap = f.points[f.points.len() - 1].dist(start) / out.norm();
                ((0.75 - gap) / 0.5).clamp(0.0, 1.0)
            } else {
                1.0
            };
            scored(d * r, format!("excursion cosine {d:.3}, return score {r:.3}"))
        }
        Primitive::Twist => scored(
            1.0,
            "alternating wrist rotations are not observable from 2D keypoints; not scored".into(),
        ),
        Primitive::Progression {
            quantity,
            increasing,
        } => {
            let sign = if *increasing { 1.0 } else { -1.0 };
            match quantity {
                Quantity::Radius => {
                    let c = centroid(&f.points);
                    let r: Vec<f64> = f.points.iter().map(|&p| p.dist(c)).collect();
                    let slope = super::features::slope(&f.arc, &r);
                    let s = trend_score(sign * slope, cfg.eps_slope);
                    scored(s, format!("radius slope {slope:+.4} per unit arc"))
                }
                Quantity::StrokeStartHeight => {
                    let strokes = f.strokes();
                    if strokes.len() < 2 {
                        return scored(0.0, format!("{} strokes found", strokes.len()));
                    }
                    // rising start height means decreasing image y
                    let good = strokes
                        .windows(2)
                        .filter(|w| sign * (w[0].y - w[1].y) > cfg.eps_amp)
                        .count();
                    let s = good as f64 / (strokes.len() - 1) as f64;
                    scored(s, format!("{good} of {} stroke starts move as stated", strokes.len() - 1))
                }
            }
        }
    }
}

fn score_repeat(
    f: &MotionFeatures,
    sequence: &[Primitive],
    count: u32,
    ctx: &StepContext,
    cfg: &AnalyzerConfig,
) -> Result<Scored> {
    let legs = f.leg_features();
    let mut reps = 0u32;
    let mut pos = 0usize;
    let mut matched = Vec::new();
    for leg in &legs {
        let elem = &sequence[pos];
        let elem_ctx = StepContext {
            translating: matches!(elem, Primitive::Translate { .. } | Primitive::Curve { .. }),
            ..ctx.clone()
        };
        let s = score_primitive(leg, elem, &elem_ctx, ctx.forward.unwrap_or(cfg.forward), cfg)?.score;
        if s >= cfg.threshold {
            matched.push(s);
            pos += 1;
            if pos == sequence.len() {
                reps += 1;
                pos = 0;
            }
        }
    }
    if matched.is_empty() {
        return scored(0.0, format!("no leg of {} matches the repeated motion", legs.len()));
    }
    let quality = matched.iter().sum::<f64>() / matched.len() as f64;
    let k = count_factor(reps, count, cfg.cycle_decay);
    scored(k * quality, format!("{reps} repetitions over {} legs, match quality {quality:.3}", legs.len()))
}

fn score_grounding(f: &MotionFeatures, g: &Grounding, ctx: &StepContext, cfg: &AnalyzerConfig) -> Result<Scored> {
    let eps = cfg.eps_margin;
    match g {
        Grounding::MoveOver { object } => {
            let e = event(f, object)?;
            let s = if e.entered_region {
                1.0
            } else {
                (0.5 - 0.5 * e.min_distance / eps).max(0.0)
            };
            scored(s, format!("entered {}: {}, closest {:.3}", object, e.entered_region, e.min_distance))
        }
        Grounding::Avoid { object } => {
            let e = event(f, object)?;
            scored(
                avoid_score(&e, eps),
                format!("entered {}: {}, closest {:.3}", object, e.entered_region, e.min_distance),
            )
        }
        Grounding::DistanceTrend { object, trend } => {
            let e = event(f, object)?;
            let sign = match trend {
                Trend::Farther => 1.0,
                Trend::Closer => -1.0,
            };
            scored(
                trend_score(sign * e.distance_slope, cfg.eps_slope),
                format!("distance to {} changes {:+.4} per unit arc", object, e.distance_slope),
            )
        }
        Grounding::FollowPath { object } => {
            let obj = find_object(f, object)?;
            let near = f.points.iter().filter(|&&p| obj.region.distance(p) <= eps).count();
            let frac = near as f64 / f.points.len() as f64;
            scored(frac / 0.8, format!("{:.0}% of the path on the {}", 100.0 * frac, object))
        }
        Grounding::Detour { object, side } => {
            let label = match object {
                Some(o) => o.clone(),
                None => match (&ctx.avoid_target, f.scene.as_slice()) {
                    (Some(t), _) => t.clone(),
                    (None, [only]) => only.label.clone(),
                    _ => return Err(Error::UnknownObject("<unspecified detour obstacle>".into())),
                },
            };
            let e = event(f, &label)?;
            let clear = avoid_score(&e, eps);
            let crossed = (1.0 - e.chord_distance / eps).max(0.0);
            let side_ok = if e.passing_side == Some(*side) { 1.0 } else { 0.0 };
            scored(
                clear * crossed * side_ok,
                format!(
                    "passed the {label} on the {}, chord blocked: {}, clearance score {clear:.3}",
                    e.passing_side.map(|s| s.name()).unwrap_or("neither side"),
                    e.chord_crossed
                ),
            )
        }
    }
}
