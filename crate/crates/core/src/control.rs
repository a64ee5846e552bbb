//! Closed-loop refinement: propose a generated motion, score it against the
//! description, and adjust the proposal until it is accepted.
//!
//! The first proposal comes from a fixed lookup on the first step's primary
//! clause. After a rejection the loop switches generator family when the
//! weakest clause belongs to a different family, then runs coordinate descent
//! over a fixed grid of frequency, amplitude and direction.

use serde::Serialize;

use crate::analyzer::{discriminate, AnalyzerConfig, Verdict};
use crate::dsl::{Axis, Clause, Grounding, MotionAst, Primitive, Step};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorKind, GeneratorParams};
use crate::trajectory::{Compass, Point, SceneObject, Trajectory};

pub const FREQUENCIES: [u32; 6] = [1, 2, 3, 4, 5, 6];
pub const AMPLITUDES: [f64; 4] = [0.05, 0.1, 0.15, 0.2];

const CENTER: Point = Point { x: 0.5, y: 0.5 };
/// Length of the motion's main translation in the unit square.
const REACH: f64 = 0.4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyCandidate {
    pub generator_name: String,
    pub params: GeneratorParams,
    pub turn: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopTurn {
    pub candidate: PolicyCandidate,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Accepted,
    BudgetExhausted,
    /// Every grid move was tried without improvement before the budget ran out.
    GridExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopTrace {
    pub task: String,
    pub turns: Vec<LoopTurn>,
    pub terminated: bool,
    pub reason: StopReason,
}

impl LoopTrace {
    pub fn accepted(&self) -> Option<&LoopTurn> {
        match self.reason {
            StopReason::Accepted => self.turns.last(),
            _ => None,
        }
    }
}

/// What a step asks for, gathered across its clauses.
#[derive(Debug, Default)]
struct Wants {
    direction: Option<Compass>,
    oscillate: Option<(Option<Axis>, Option<u32>)>,
    rotate: Option<(crate::dsl::Turn, u32)>,
    curve: Option<(Compass, crate::dsl::Convexity)>,
    detour: Option<(Option<String>, crate::dsl::Side)>,
}

impl Wants {
    fn of(step: &Step, forward: Compass) -> Wants {
        let mut w = Wants::default();
        for c in step.clauses() {
            match c {
                Clause::Path(Primitive::Translate { direction }) => w.direction = Some(direction.resolve(forward)),
                Clause::Path(Primitive::Oscillate { axis, count }) => w.oscillate = Some((*axis, *count)),
                Clause::Path(Primitive::Rotate { turn, count, .. }) => w.rotate = Some((*turn, *count)),
                Clause::Path(Primitive::Curve { direction, convexity }) => {
                    w.curve = Some((direction.resolve(forward), *convexity))
                }
                Clause::Ground(Grounding::Detour { object, side }) => w.detour = Some((object.clone(), *side)),
                _ => {}
            }
        }
        w
    }
}

fn is_vertical(c: Compass) -> bool {
    matches!(c, Compass::Up | Compass::Down)
}

/// Generator family for the first proposal, keyed on the primary clause.
/// A translation that carries oscillations is read as shaking along the
/// direction of travel.
pub fn family_for(step: &Step, forward: Compass) -> GeneratorKind {
    let w = Wants::of(step, forward);
    match &step.primary {
        Clause::Path(Primitive::Translate { .. }) => {
            let dir = w.direction.unwrap_or(Compass::Right);
            if w.oscillate.is_some() {
                if is_vertical(dir) {
                    GeneratorKind::VerticalShaking
                } else {
                    GeneratorKind::HorizontalShaking
                }
            } else if w.curve.is_some() {
                GeneratorKind::Arc
            } else if w.detour.is_some() {
                GeneratorKind::Detour
            } else {
                GeneratorKind::Line
            }
        }
        Clause::Path(p) => clause_family(p).unwrap_or(GeneratorKind::Line),
        Clause::Ground(Grounding::Detour { .. } | Grounding::Avoid { .. }) => GeneratorKind::Detour,
        Clause::Ground(_) => GeneratorKind::Line,
    }
}

/// The family a primitive can only be realized by, if any.
fn clause_family(p: &Primitive) -> Option<GeneratorKind> {
    match p {
        Primitive::Oscillate {
            axis: Some(Axis::Vertical),
            ..
        } => Some(GeneratorKind::VerticalShaking),
        Primitive::Oscillate {
            axis: Some(Axis::Horizontal),
            ..
        } => Some(GeneratorKind::HorizontalShaking),
        Primitive::Rotate { .. } => Some(GeneratorKind::Circle),
        Primitive::Curve { .. } => Some(GeneratorKind::Arc),
        Primitive::Straight => Some(GeneratorKind::Line),
        _ => None,
    }
}

fn find_object<'a>(scene: &'a [SceneObject], label: Option<&str>) -> Option<&'a SceneObject> {
    match label {
        Some(l) => scene.iter().find(|o| o.label.eq_ignore_ascii_case(l)),
        None if scene.len() == 1 => scene.first(),
        None => None,
    }
}

/// Parameters for `kind` that realize what the step asks for as directly as
/// the family allows.
fn seed_params(kind: GeneratorKind, w: &Wants, scene: &[SceneObject]) -> GeneratorParams {
    let mut p = GeneratorParams::default();
    let dir = w.direction.or(w.curve.map(|c| c.0)).unwrap_or(Compass::Right);
    let v = dir.unit() * REACH;
    p.start = CENTER - v * 0.5;
    p.end = CENTER + v * 0.5;
    match kind {
        GeneratorKind::VerticalShaking | GeneratorKind::HorizontalShaking => {
            let count = w.oscillate.and_then(|o| o.1).unwrap_or(4);
            p.frequency = count.max(2);
            p.n = 16;
            p.drift = w.direction.map(|_| v);
            if p.drift.is_none() {
                p.start = CENTER;
            }
        }
        GeneratorKind::Circle => {
            if let Some((turn, count)) = w.rotate {
                p.turn = turn;
                p.count = count;
            }
            p.n = 48;
        }
        GeneratorKind::Arc => {
            if let Some((_, convexity)) = w.curve {
                p.convexity = convexity;
            }
            p.bulge = 0.2 * REACH;
        }
        GeneratorKind::Detour => {
            if let Some((label, side)) = &w.detour {
                p.side = *side;
                if let Some(o) = find_object(scene, label.as_deref()) {
                    let c = o.region.centroid();
                    p.start = c - v;
                    p.end = c + v;
                }
            }
            p.n = 80;
        }
        GeneratorKind::Line => {}
    }
    p
}

/// One grid coordinate and its values, applied to a parameter set.
#[derive(Debug, Clone, Copy)]
enum Coord {
    Frequency,
    Amplitude,
    Direction,
}

fn coords(kind: GeneratorKind, p: &GeneratorParams) -> Vec<Coord> {
    match kind {
        GeneratorKind::VerticalShaking | GeneratorKind::HorizontalShaking => {
            let mut c = vec![Coord::Frequency, Coord::Amplitude];
            if p.drift.is_some() {
                c.push(Coord::Direction);
            }
            c
        }
        GeneratorKind::Circle => vec![Coord::Frequency],
        GeneratorKind::Arc => vec![Coord::Amplitude, Coord::Direction],
        GeneratorKind::Line => vec![Coord::Direction],
        GeneratorKind::Detour => Vec::new(),
    }
}

fn grid(kind: GeneratorKind, p: &GeneratorParams, coord: Coord) -> Vec<GeneratorParams> {
    let mid = (p.start + p.end) * 0.5;
    match coord {
        Coord::Frequency => FREQUENCIES
            .iter()
            .map(|&f| {
                let mut q = p.clone();
                if kind == GeneratorKind::Circle {
                    q.count = f;
                } else {
                    q.frequency = f;
                }
                q
            })
            .collect(),
        Coord::Amplitude => AMPLITUDES
            .iter()
            .map(|&a| {
                let mut q = p.clone();
                if kind == GeneratorKind::Arc {
                    q.bulge = a;
                } else {
                    q.amplitude = a;
                }
                q
            })
            .collect(),
        Coord::Direction => Compass::ALL
            .iter()
            .map(|c| {
                let v = c.unit() * REACH;
                let mut q = p.clone();
                if q.drift.is_some() {
                    q.drift = Some(v);
                    q.start = CENTER - v * 0.5;
                } else {
                    q.start = mid - v * 0.5;
                    q.end = mid + v * 0.5;
                }
                q
            })
            .collect(),
    }
}

struct Search<'a> {
    ast: &'a MotionAst,
    scene: &'a [SceneObject],
    cfg: &'a AnalyzerConfig,
    budget: usize,
    theta_loop: f64,
    trace: LoopTrace,
    seen: Vec<(GeneratorKind, GeneratorParams)>,
}

enum Outcome {
    Accepted,
    Budget,
    Scored(f64),
}

impl Search<'_> {
    fn trajectory(&self, kind: GeneratorKind, p: &GeneratorParams) -> Result<Trajectory> {
        let obstacle = match kind {
            GeneratorKind::Detour => {
                let label = self.ast.steps.iter().flat_map(|s| s.clauses()).find_map(|c| match c {
                    Clause::Ground(Grounding::Detour { object, .. }) => object.clone(),
                    _ => None,
                });
                find_object(self.scene, label.as_deref())
            }
            _ => None,
        };
        Ok(generate(kind, p, obstacle)?.trajectory)
    }

    /// Generates and scores one candidate, recording it as a turn.
    fn try_candidate(&mut self, kind: GeneratorKind, p: GeneratorParams) -> Outcome {
        if self.trace.turns.len() >= self.budget {
            return Outcome::Budget;
        }
        if self.seen.iter().any(|(k, q)| *k == kind && *q == p) {
            return Outcome::Scored(f64::NEG_INFINITY);
        }
        self.seen.push((kind, p.clone()));
        let verdict = match self.trajectory(kind, &p) {
            Ok(t) => discriminate(&t, self.scene, self.ast, self.cfg),
            Err(e) => Err(e),
        };
        let verdict = verdict.unwrap_or_else(|e| Verdict {
            label: 0,
            score: 0.0,
            clause_scores: vec![crate::analyzer::ClauseScore {
                clause: String::new(),
                score: 0.0,
                evidence: e.to_string(),
            }],
            surplus_segments: 0,
            surplus_weight: 0,
        });
        let score = verdict.score;
        let turn = self.trace.turns.len() + 1;
        self.trace.turns.push(LoopTurn {
            candidate: PolicyCandidate {
                generator_name: kind.name().to_string(),
                params: p,
                turn,
            },
            verdict,
        });
        if score >= self.theta_loop {
            Outcome::Accepted
        } else {
            Outcome::Scored(score)
        }
    }

    fn finish(mut self, reason: StopReason) -> LoopTrace {
        self.trace.terminated = reason != StopReason::GridExhausted;
        self.trace.reason = reason;
        self.trace
    }
}

/// Searches generator parameters until the analyzer accepts the motion with
/// score at least `theta_loop`, evaluating at most `budget` candidates.
pub fn refine(
    task: &str,
    ast: &MotionAst,
    scene: &[SceneObject],
    budget: usize,
    theta_loop: f64,
    cfg: &AnalyzerConfig,
) -> Result<LoopTrace> {
    if ast.steps.is_empty() {
        return Err(Error::InvalidArgument("motion description has no steps".into()));
    }
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let step = &ast.steps[0];
    let wants = Wants::of(step, cfg.forward);
    let mut s = Search {
        ast,
        scene,
        cfg,
        budget,
        theta_loop,
        trace: LoopTrace {
            task: task.to_string(),
            turns: Vec::new(),
            terminated: false,
            reason: StopReason::BudgetExhausted,
        },
        seen: Vec::new(),
    };

    let mut kind = family_for(step, cfg.forward);
    let mut params = seed_params(kind, &wants, scene);
    let mut current = match s.try_candidate(kind, params.clone()) {
        Outcome::Accepted => return Ok(s.finish(StopReason::Accepted)),
        Outcome::Budget => return Ok(s.finish(StopReason::BudgetExhausted)),
        Outcome::Scored(v) => v,
    };

    // switch family while the weakest clause names one we are not using
    let mut tried = vec![kind];
    loop {
        let last = s.trace.turns.last().map(|t| &t.verdict);
        let Some(next) = weakest_family(step, last, kind, theta_loop) else { break };
        if tried.contains(&next) {
            break;
        }
        tried.push(next);
        let p = seed_params(next, &wants, scene);
        match s.try_candidate(next, p.clone()) {
            Outcome::Accepted => return Ok(s.finish(StopReason::Accepted)),
            Outcome::Budget => return Ok(s.finish(StopReason::BudgetExhausted)),
            Outcome::Scored(v) => {
                if v >= current {
                    kind = next;
                    params = p;
                    current = v;
                }
            }
        }
    }

    // coordinate descent; accept the first grid point that clears the bar
    loop {
        let mut improved = false;
        for coord in coords(kind, &params) {
            let mut best: Option<(f64, GeneratorParams)> = None;
            for q in grid(kind, &params, coord) {
                match s.try_candidate(kind, q.clone()) {
                    Outcome::Accepted => return Ok(s.finish(StopReason::Accepted)),
                    Outcome::Budget => return Ok(s.finish(StopReason::BudgetExhausted)),
                    Outcome::Scored(v) => {
                        if v > current && best.as_ref().is_none_or(|b| v > b.0) {
                            best = Some((v, q));
                        }
                    }
                }
            }
            if let Some((v, q)) = best {
                current = v;
                params = q;
                improved = true;
            }
        }
        if !improved {
            return Ok(s.finish(StopReason::GridExhausted));
        }
    }
}

/// Family pinned down by the weakest failing clause of the step, when it
/// differs from `current`.
fn weakest_family(step: &Step, verdict: Option<&Verdict>, current: GeneratorKind, theta: f64) -> Option<GeneratorKind> {
    let verdict = verdict?;
    step.clauses()
        .zip(&verdict.clause_scores)
        .filter(|(_, s)| s.score < theta)
        .filter_map(|(c, s)| {
            let family = match c {
                Clause::Path(p) => clause_family(p),
                Clause::Ground(Grounding::Detour { .. }) => Some(GeneratorKind::Detour),
                Clause::Ground(_) => None,
            }?;
            (family != current).then_some((s.score, family))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, f)| f)
}
