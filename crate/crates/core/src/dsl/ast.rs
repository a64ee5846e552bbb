use std::fmt;

use serde::{Deserialize, Serialize};

use crate::trajectory::Compass;

/// Direction of a translation. `Forward` is resolved against the episode's
/// forward heading at analysis time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Image(Compass),
    Forward,
}

impl Direction {
    pub fn resolve(self, forward: Compass) -> Compass {
        match self {
            Direction::Image(c) => c,
            Direction::Forward => forward,
        }
    }
}

impl From<Compass> for Direction {
    fn from(c: Compass) -> Self {
        Direction::Image(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Turn {
    Clockwise,
    CounterClockwise,
}

impl Turn {
    pub fn name(self) -> &'static str {
        match self {
            Turn::Clockwise => "clockwise",
            Turn::CounterClockwise => "counter-clockwise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Horizontal,
    Vertical,
    Diagonal,
    BackAndForth,
}

/// Closed figure traced by a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopShape {
    Circle,
    Triangle,
    Square,
}

/// What grows or shrinks over a progression modifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Radius,
    StrokeStartHeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Closer,
    Farther,
}

/// Path-shape vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Primitive {
    Translate {
        direction: Direction,
    },
    Curve {
        direction: Direction,
        convexity: Convexity,
    },
    Rotate {
        turn: Turn,
        count: u32,
        shape: LoopShape,
    },
    Oscillate {
        axis: Option<Axis>,
        count: Option<u32>,
    },
    Repeat {
        sequence: Vec<Primitive>,
        count: u32,
    },
    /// "in a straight line", "in the shortest path".
    Straight,
    Flip {
        direction: Direction,
        back: bool,
    },
    /// Alternating wrist rotations; no 2D keypoint signature.
    Twist,
    Progression {
        quantity: Quantity,
        increasing: bool,
    },
}

/// Scene-relative vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Grounding {
    MoveOver { object: String },
    Detour { object: Option<String>, side: Side },
    DistanceTrend { object: String, trend: Trend },
    FollowPath { object: String },
    Avoid { object: String },
}

impl Grounding {
    pub fn object(&self) -> Option<&str> {
        match self {
            Grounding::MoveOver { object }
            | Grounding::DistanceTrend { object, .. }
            | Grounding::FollowPath { object }
            | Grounding::Avoid { object } => Some(object),
            Grounding::Detour { object, .. } => object.as_deref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Clause {
    Path(Primitive),
    Ground(Grounding),
}

impl Clause {
    pub fn contains_repeat(&self) -> bool {
        matches!(self, Clause::Path(Primitive::Repeat { .. }))
    }
}

impl From<Primitive> for Clause {
    fn from(p: Primitive) -> Self {
        Clause::Path(p)
    }
}

impl From<Grounding> for Clause {
    fn from(g: Grounding) -> Self {
        Clause::Ground(g)
    }
}

/// One temporally ordered step: a dominant clause plus clauses that hold
/// at the same time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub primary: Clause,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modifiers: Vec<Clause>,
}

impl Step {
    pub fn new(primary: impl Into<Clause>) -> Self {
        Step {
            primary: primary.into(),
            modifiers: Vec::new(),
        }
    }

    pub fn with(mut self, modifier: impl Into<Clause>) -> Self {
        self.modifiers.push(modifier.into());
        self
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        std::iter::once(&self.primary).chain(self.modifiers.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MotionAst {
    pub steps: Vec<Step>,
}

impl MotionAst {
    pub fn new(steps: Vec<Step>) -> Self {
        MotionAst { steps }
    }

    pub fn single(step: Step) -> Self {
        MotionAst { steps: vec![step] }
    }

    /// Structural invariants: non-empty, counts ≥ 1, non-empty repeats,
    /// no repeat in modifier position.
    pub fn check(&self) -> Result<(), String> {
        if self.steps.is_empty() {
            return Err("motion has no steps".into());
        }
        fn prim_ok(p: &Primitive) -> Result<(), String> {
            match p {
                Primitive::Rotate { count: 0, .. }
                | Primitive::Oscillate { count: Some(0), .. }
                | Primitive::Repeat { count: 0, .. } => Err("count must be at least 1".into()),
                Primitive::Repeat { sequence, .. } if sequence.is_empty() => {
                    Err("repeat of an empty sequence".into())
                }
                Primitive::Repeat { sequence, .. } => sequence.iter().try_for_each(prim_ok),
                _ => Ok(()),
            }
        }
        for step in &self.steps {
            for (i, clause) in step.clauses().enumerate() {
                match clause {
                    Clause::Path(p) => {
                        if i > 0 && clause.contains_repeat() {
                            return Err("a modifier cannot contain a repeat".into());
                        }
                        prim_ok(p)?;
                    }
                    Clause::Ground(g) => {
                        if g.object().is_some_and(|o| o.trim().is_empty()) {
                            return Err("grounding clause with empty object".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for MotionAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format_description(self))
    }
}
