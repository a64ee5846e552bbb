//! Rule-based motion discriminator.
//!
//! A trajectory is resampled by arc length, normalized to a unit bounding-box
//! diagonal, split into legs on sustained heading changes, and matched step by
//! step against a parsed motion description. Every threshold lives in
//! [`AnalyzerConfig`].
//!
//! Oscillations are counted in half-cycles: one monotone sweep along the axis
//! is one count, so "up and down" is 2. The amplitude cut `eps_amp` decides
//! which wiggles are too small to count as an oscillation at all.

mod discriminate;
mod features;
mod score;

use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use discriminate::{discriminate, discriminate_episode, rank, ClauseScore, Verdict};
pub use features::{ConvexityEvidence, GroundingEvent, Segment, Winding};
pub use score::StepContext;

use crate::dsl::{Axis, Clause};
use crate::error::Result;
use crate::trajectory::{Point, SceneObject, Trajectory};
use features::{Prepared, prepare};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalyzerConfig {
    /// Decision threshold θ on the verdict score.
    pub threshold: f64,
    pub n_analysis: usize,
    pub smoothing_window: usize,
    pub split_angle_deg: f64,
    pub split_persistence: usize,
    /// Legs shorter than this fraction of total arc length merge into a neighbor.
    pub min_segment_fraction: f64,
    /// Smallest oscillation excursion that counts, as a fraction of the bbox diagonal.
    pub eps_amp: f64,
    /// Distance-vs-arc slope below which a trend reads as flat.
    pub eps_slope: f64,
    /// Soft margin for region proximity, as a fraction of the bbox diagonal.
    pub eps_margin: f64,
    /// Multiplier applied per leg left unexplained by the description.
    pub surplus_penalty: f64,
    /// Arc fraction that counts as one more unexplained leg when weighing surplus.
    pub surplus_unit: f64,
    /// Score lost per unit of count mismatch (cycles, loops, repetitions).
    pub cycle_decay: f64,
    pub straight_tolerance: f64,
    pub straight_falloff: f64,
    /// Chord-relative bulge at which a curve's convexity is fully trusted.
    pub bulge_confidence: f64,
    /// End-to-start gap under which a path counts as closed.
    pub closure_tolerance: f64,
    /// Radial coefficient of variation at which a loop stops counting as a circle.
    pub circularity_tolerance: f64,
    /// What "forward" means when an episode does not say.
    pub forward: crate::trajectory::Compass,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            threshold: 0.7,
            n_analysis: 256,
            smoothing_window: 5,
            split_angle_deg: 60.0,
            split_persistence: 3,
            min_segment_fraction: 0.05,
            eps_amp: 0.02,
            eps_slope: 0.01,
            eps_margin: 0.02,
            surplus_penalty: 0.8,
            surplus_unit: 0.15,
            cycle_decay: 0.5,
            straight_tolerance: 0.05,
            straight_falloff: 0.10,
            bulge_confidence: 0.05,
            closure_tolerance: 0.02,
            circularity_tolerance: 0.5,
            forward: crate::trajectory::Compass::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisOscillation {
    pub axis: String,
    pub cycle_count: u32,
    pub mean_amplitude: f64,
}

/// Features of a trajectory or of one span of it.
///
/// Summary fields (`segments`, `oscillations`, `winding`, `grounding_events`)
/// are filled by [`extract_features`]; lengths there are in input units.
/// Clause scoring works from the normalized samples kept alongside.
#[derive(Debug, Clone, Serialize)]
pub struct MotionFeatures {
    pub segments: Vec<Segment>,
    pub oscillations: Vec<AxisOscillation>,
    pub winding: Winding,
    pub grounding_events: Vec<GroundingEvent>,
    #[serde(skip)]
    points: Vec<Point>,
    #[serde(skip)]
    arc: Vec<f64>,
    #[serde(skip)]
    scene: Vec<SceneObject>,
    /// Legs relative to `points`.
    #[serde(skip)]
    legs: Vec<Range<usize>>,
}

impl MotionFeatures {
    /// Features over the legs `legs` of a prepared trajectory.
    fn span(prep: &Prepared, legs: Range<usize>) -> MotionFeatures {
        let first = prep.legs[legs.start].start;
        let last = prep.legs[legs.end - 1].end;
        let r = features::span_points(&prep.points, &(first..last));
        let local = prep.legs[legs]
            .iter()
            .map(|l| (l.start - first)..(l.end - first))
            .collect();
        MotionFeatures {
            segments: Vec::new(),
            oscillations: Vec::new(),
            winding: Winding::from_total(0.0),
            grounding_events: Vec::new(),
            points: prep.points[r.clone()].to_vec(),
            arc: prep.arc[r].to_vec(),
            scene: prep.scene.clone(),
            legs: local,
        }
    }

    fn net(&self) -> Point {
        self.points[self.points.len() - 1] - self.points[0]
    }

    fn leg_features(&self) -> Vec<MotionFeatures> {
        self.legs
            .iter()
            .map(|l| {
                let r = features::span_points(&self.points, l);
                MotionFeatures {
                    segments: Vec::new(),
                    oscillations: Vec::new(),
                    winding: Winding::from_total(0.0),
                    grounding_events: Vec::new(),
                    points: self.points[r.clone()].to_vec(),
                    arc: self.arc[r].to_vec(),
                    scene: self.scene.clone(),
                    legs: std::iter::once(0..l.end - l.start).collect(),
                }
            })
            .collect()
    }

    /// Start points of the legs that run the same way as the longest leg.
    fn strokes(&self) -> Vec<Point> {
        let nets: Vec<(Point, Point)> = self
            .legs
            .iter()
            .map(|l| {
                let r = features::span_points(&self.points, l);
                (self.points[r.start], self.points[r.end - 1] - self.points[r.start])
            })
            .collect();
        let Some(longest) = nets
            .iter()
            .map(|(_, v)| *v)
            .fold(None, |best: Option<Point>, v| match best {
                Some(b) if b.norm() >= v.norm() => Some(b),
                _ => Some(v),
            })
            .and_then(|v| v.normalized())
        else {
            return Vec::new();
        };
        nets.into_iter()
            .filter(|(_, v)| v.normalized().is_some_and(|u| u.dot(longest) >= 0.7))
            .map(|(s, _)| s)
            .collect()
    }
}

fn whole(prep: &Prepared) -> MotionFeatures {
    MotionFeatures::span(prep, 0..prep.legs.len())
}

/// Temporal segments of the point-of-interest track. Runs of reversing legs
/// come back as one oscillating block.
pub fn segment_primitives(traj: &Trajectory, cfg: &AnalyzerConfig) -> Result<Vec<Segment>> {
    let prep = prepare(traj, &[], cfg)?;
    Ok(scaled_segments(&prep, cfg))
}

fn scaled_segments(prep: &Prepared, cfg: &AnalyzerConfig) -> Vec<Segment> {
    features::blocks(&prep.points, &prep.legs, cfg)
        .into_iter()
        .map(|mut s| {
            s.net_displacement = s.net_displacement * prep.scale;
            s.magnitude *= prep.scale;
            s
        })
        .collect()
}

/// Oscillation count and mean amplitude (input units).
///
/// With a named axis, counts monotone legs along that axis, as for pure
/// shaking. Without one, counts sign alternations of the detrended
/// projection perpendicular to the net displacement, as for a sweep.
pub fn count_oscillations(traj: &Trajectory, axis: Option<Axis>, cfg: &AnalyzerConfig) -> Result<(u32, f64)> {
    let prep = prepare(traj, &[], cfg)?;
    let f = whole(&prep);
    let (count, amp) = match axis {
        Some(_) => score::oscillation_count(&f, axis, false, cfg),
        None => match f.net().normalized() {
            Some(u) => features::sweep_oscillations(&f.points, &f.arc, u.right_normal(), cfg.eps_amp),
            None => (0, 0.0),
        },
    };
    Ok((count, amp * prep.scale))
}

pub fn winding(traj: &Trajectory, cfg: &AnalyzerConfig) -> Result<Winding> {
    let prep = prepare(traj, &[], cfg)?;
    Ok(features::winding(&prep.points, cfg))
}

/// Per-object proximity events; distances in input units.
pub fn grounding_events(traj: &Trajectory, scene: &[SceneObject], cfg: &AnalyzerConfig) -> Result<Vec<GroundingEvent>> {
    let prep = prepare(traj, scene, cfg)?;
    Ok(scaled_events(&prep))
}

fn scaled_events(prep: &Prepared) -> Vec<GroundingEvent> {
    prep.scene
        .iter()
        .map(|o| {
            let mut e = features::grounding(&prep.points, &prep.arc, o);
            e.min_distance *= prep.scale;
            e.chord_distance *= prep.scale;
            e
        })
        .collect()
}

/// Full feature summary of a trajectory.
pub fn extract_features(traj: &Trajectory, scene: &[SceneObject], cfg: &AnalyzerConfig) -> Result<MotionFeatures> {
    let prep = prepare(traj, scene, cfg)?;
    let mut f = whole(&prep);
    f.segments = scaled_segments(&prep, cfg);
    f.winding = features::winding(&prep.points, cfg);
    f.grounding_events = scaled_events(&prep);
    let mut osc = vec![
        ("horizontal", score::oscillation_count(&f, Some(Axis::Horizontal), false, cfg)),
        ("vertical", score::oscillation_count(&f, Some(Axis::Vertical), false, cfg)),
    ];
    if let Some(u) = f.net().normalized() {
        let perpendicular = features::sweep_oscillations(&f.points, &f.arc, u.right_normal(), cfg.eps_amp);
        osc.push(("perpendicular", perpendicular));
    }
    f.oscillations = osc
        .into_iter()
        .map(|(axis, (cycle_count, amp))| AxisOscillation {
            axis: axis.to_string(),
            cycle_count,
            mean_amplitude: amp * prep.scale,
        })
        .collect();
    Ok(f)
}

/// Scores one clause against features, with the clause taken as its own step.
pub fn check_clause(features: &MotionFeatures, clause: &Clause, cfg: &AnalyzerConfig) -> Result<f64> {
    let ctx = StepContext::of_clause(clause);
    Ok(score::score_clause(features, clause, &ctx, cfg)?.score)
}

/// Like [`check_clause`], with step context and the evidence string.
pub fn check_clause_in(
    features: &MotionFeatures,
    clause: &Clause,
    ctx: &StepContext,
    cfg: &AnalyzerConfig,
) -> Result<(f64, String)> {
    let s = score::score_clause(features, clause, ctx, cfg)?;
    Ok((s.score, s.evidence))
}
