//! Step-to-segment alignment and the final verdict.

use std::collections::HashMap;
use std::ops::Range;

use serde::Serialize;

use super::features::{prepare, Prepared};
use super::score::{score_clause, StepContext};
use super::{AnalyzerConfig, MotionFeatures};
use crate::dsl::{format_clause, Clause, Grounding, MotionAst, Primitive, Step};
use crate::error::Result;
use crate::trajectory::{Compass, Episode, SceneObject, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseScore {
    pub clause: String,
    pub score: f64,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub label: u8,
    pub score: f64,
    #[serde(rename = "clauses")]
    pub clause_scores: Vec<ClauseScore>,
    /// Legs no step accounted for.
    pub surplus_segments: usize,
    /// Exponent applied to the surplus penalty: each unexplained leg counts
    /// once, or once per `surplus_unit` of arc length it covers if longer.
    pub surplus_weight: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    /// Describes the relation to an object along whatever the next step does.
    Overlay,
    /// One straight leg.
    Single,
    /// Any run of legs (oscillations, loops, curves, repetitions, detours).
    Group,
}

fn role(step: &Step) -> Role {
    if matches!(
        step.primary,
        Clause::Ground(Grounding::MoveOver { .. } | Grounding::DistanceTrend { .. } | Grounding::Avoid { .. })
    ) {
        return Role::Overlay;
    }
    let multi_leg = step.clauses().any(|c| match c {
        Clause::Path(p) => matches!(
            p,
            Primitive::Oscillate { .. }
                | Primitive::Rotate { .. }
                | Primitive::Curve { .. }
                | Primitive::Repeat { .. }
                | Primitive::Flip { .. }
                | Primitive::Progression { .. }
        ),
        Clause::Ground(g) => matches!(g, Grounding::Detour { .. } | Grounding::FollowPath { .. }),
    });
    if multi_leg {
        Role::Group
    } else {
        Role::Single
    }
}

struct StepResult {
    score: f64,
    clauses: Vec<ClauseScore>,
}

fn evaluate(
    prep: &Prepared,
    step: &Step,
    legs: Range<usize>,
    forward: Option<Compass>,
    cfg: &AnalyzerConfig,
) -> Result<StepResult> {
    let f = MotionFeatures::span(prep, legs);
    let ctx = StepContext::of_step(step, forward);
    let mut clauses = Vec::new();
    for c in step.clauses() {
        let s = score_clause(&f, c, &ctx, cfg)?;
        clauses.push(ClauseScore {
            clause: format_clause(c),
            score: s.score,
            evidence: s.evidence,
        });
    }
    let score = if clauses.iter().any(|c| c.score <= 0.0) {
        0.0
    } else {
        (clauses.iter().map(|c| c.score.ln()).sum::<f64>() / clauses.len() as f64).exp()
    };
    Ok(StepResult { score, clauses })
}

#[derive(Debug, Clone, Copy)]
enum Move {
    Unmatched,
    Surplus,
    Take(usize),
}

/// Leg range per step (None for overlays), then surplus legs and their weight.
type Alignment = (Vec<Option<Range<usize>>>, usize, usize);

/// Order-preserving alignment of leg-consuming steps to legs, maximizing
/// the summed step score for every surplus count.
fn align(
    prep: &Prepared,
    steps: &[&Step],
    forward: Option<Compass>,
    cfg: &AnalyzerConfig,
    total_steps: usize,
) -> Result<Alignment> {
    let m = prep.legs.len();
    let k_n = steps.len();
    let w = leg_weights(prep, cfg);
    // tail[j] = weight of leaving legs j.. unexplained
    let mut tail = vec![0; m + 1];
    for j in (0..m).rev() {
        tail[j] = tail[j + 1] + w[j];
    }
    let cap = tail[0];
    let idx = |k: usize, j: usize, s: usize| (k * (m + 1) + j) * (cap + 1) + s;
    let size = (k_n + 1) * (m + 1) * (cap + 1);
    let mut best: Vec<Option<f64>> = vec![None; size];
    let mut back: Vec<Option<Move>> = vec![None; size];
    let mut cache: HashMap<(usize, usize, usize), f64> = HashMap::new();
    best[idx(0, 0, 0)] = Some(0.0);

    let relax = |best: &mut Vec<Option<f64>>, back: &mut Vec<Option<Move>>, at: usize, v: f64, mv: Move| {
        if best[at].is_none_or(|b| v > b) {
            best[at] = Some(v);
            back[at] = Some(mv);
        }
    };

    for k in 0..=k_n {
        for j in 0..=m {
            for s in 0..=cap {
                let Some(cur) = best[idx(k, j, s)] else { continue };
                if j < m && s + w[j] <= cap {
                    relax(&mut best, &mut back, idx(k, j + 1, s + w[j]), cur, Move::Surplus);
                }
                if k == k_n {
                    continue;
                }
                let max_g = match role(steps[k]) {
                    Role::Single => 1.min(m - j),
                    _ => m - j,
                };
                for g in 1..=max_g {
                    let sc = match cache.get(&(k, j, g)) {
                        Some(v) => *v,
                        None => {
                            let v = evaluate(prep, steps[k], j..j + g, forward, cfg)?.score;
                            cache.insert((k, j, g), v);
                            v
                        }
                    };
                    relax(&mut best, &mut back, idx(k + 1, j + g, s), cur + sc, Move::Take(g));
                }
                // after the takes, so a zero-score match beats leaving the step unmatched
                relax(&mut best, &mut back, idx(k + 1, j, s), cur, Move::Unmatched);
            }
        }
    }

    let mut choice: Option<(f64, usize, usize)> = None;
    // on ties prefer consuming more legs, then less surplus
    for j in (0..=m).rev() {
        for s in 0..=cap {
            if let Some(sum) = best[idx(k_n, j, s)] {
                let surplus = s + tail[j];
                let v = sum / total_steps as f64 * cfg.surplus_penalty.powi(surplus as i32);
                if choice.is_none_or(|(b, _, _)| v > b) {
                    choice = Some((v, j, s));
                }
            }
        }
    }
    let (_, mut j, mut s) = choice.expect("the all-unmatched path always exists");
    let weight = s + tail[j];
    let mut count = m - j;
    let mut spans = vec![None; k_n];
    let mut k = k_n;
    while k > 0 || j > 0 {
        match back[idx(k, j, s)].expect("reachable state has a predecessor") {
            Move::Surplus => {
                j -= 1;
                s -= w[j];
                count += 1;
            }
            Move::Unmatched => k -= 1,
            Move::Take(g) => {
                k -= 1;
                j -= g;
                spans[k] = Some(j..j + g);
            }
        }
    }
    Ok((spans, count, weight))
}

/// Surplus weight of each leg: one, or its arc fraction in `surplus_unit`s
/// (rounded) when that is larger.
fn leg_weights(prep: &Prepared, cfg: &AnalyzerConfig) -> Vec<usize> {
    let total = prep.arc[prep.arc.len() - 1];
    prep.legs
        .iter()
        .map(|l| {
            let end = l.end.min(prep.arc.len() - 1);
            let frac = (prep.arc[end] - prep.arc[l.start]) / total;
            ((frac / cfg.surplus_unit).round() as usize).max(1)
        })
        .collect()
}

/// Scores a trajectory against a motion description.
pub fn discriminate(
    traj: &Trajectory,
    scene: &[SceneObject],
    ast: &MotionAst,
    cfg: &AnalyzerConfig,
) -> Result<Verdict> {
    discriminate_with(traj, scene, ast, None, cfg)
}

/// [`discriminate`] using the episode's scene and forward heading.
pub fn discriminate_episode(ep: &Episode, ast: &MotionAst, cfg: &AnalyzerConfig) -> Result<Verdict> {
    discriminate_with(&ep.trajectory, &ep.scene, ast, ep.forward_heading, cfg)
}

fn discriminate_with(
    traj: &Trajectory,
    scene: &[SceneObject],
    ast: &MotionAst,
    forward: Option<Compass>,
    cfg: &AnalyzerConfig,
) -> Result<Verdict> {
    let prep = prepare(traj, scene, cfg)?;
    let n_steps = ast.steps.len().max(1);
    let consuming: Vec<usize> = (0..ast.steps.len())
        .filter(|&i| role(&ast.steps[i]) != Role::Overlay)
        .collect();
    let steps: Vec<&Step> = consuming.iter().map(|&i| &ast.steps[i]).collect();
    let (spans, surplus, weight) = if steps.is_empty() {
        (Vec::new(), 0, 0)
    } else {
        align(&prep, &steps, forward, cfg, n_steps)?
    };
    let mut span_of: Vec<Option<Range<usize>>> = vec![None; ast.steps.len()];
    for (pos, &i) in consuming.iter().enumerate() {
        span_of[i] = spans[pos].clone();
    }
    let all = 0..prep.legs.len();

    let mut total = 0.0;
    let mut clause_scores = Vec::new();
    for (i, step) in ast.steps.iter().enumerate() {
        let span = if role(step) == Role::Overlay {
            let next = consuming.iter().find(|&&c| c > i);
            let prev = consuming.iter().rev().find(|&&c| c < i);
            Some(
                next.or(prev)
                    .and_then(|&c| span_of[c].clone())
                    .unwrap_or_else(|| all.clone()),
            )
        } else {
            span_of[i].clone()
        };
        match span {
            Some(legs) => {
                let r = evaluate(&prep, step, legs, forward, cfg)?;
                total += r.score;
                clause_scores.extend(r.clauses);
            }
            None => {
                // still resolve object references so unknown labels surface
                let r = evaluate(&prep, step, all.clone(), forward, cfg)?;
                clause_scores.extend(r.clauses.into_iter().map(|c| ClauseScore {
                    score: 0.0,
                    evidence: "no segment left for this step".into(),
                    ..c
                }));
            }
        }
    }
    let score = (total / n_steps as f64 * cfg.surplus_penalty.powi(weight as i32)).clamp(0.0, 1.0);
    Ok(Verdict {
        label: u8::from(score >= cfg.threshold),
        score,
        clause_scores,
        surplus_segments: surplus,
        surplus_weight: weight,
    })
}

/// Indices ordered by descending verdict score, ties by input order.
/// A trajectory that cannot be analyzed scores 0.
pub fn rank(
    trajectories: &[Trajectory],
    scene: &[SceneObject],
    ast: &MotionAst,
    cfg: &AnalyzerConfig,
) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = trajectories
        .iter()
        .enumerate()
        .map(|(i, t)| (i, discriminate(t, scene, ast, cfg).map(|v| v.score).unwrap_or(0.0)))
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}
