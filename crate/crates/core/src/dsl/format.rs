use super::ast::*;
use crate::trajectory::Compass;

fn direction_phrase(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "forward",
        Direction::Image(c) => match c {
            Compass::Up => "upward",
            Compass::Down => "downward",
            Compass::Left => "to the left",
            Compass::Right => "to the right",
            Compass::UpLeft => "upward and to the left",
            Compass::UpRight => "upward and to the right",
            Compass::DownLeft => "downward and to the left",
            Compass::DownRight => "downward and to the right",
        },
    }
}

/// Verb in base form for primaries and in -ing form for modifiers.
fn verb(base: &'static str, participle: bool) -> &'static str {
    if !participle {
        return base;
    }
    match base {
        "move" => "moving",
        "make" => "making",
        "flip" => "flipping",
        "follow" => "following",
        "avoid" => "avoiding",
        "increase" => "increasing",
        "decrease" => "decreasing",
        other => other,
    }
}

fn primitive(p: &Primitive, participle: bool) -> String {
    let mv = verb("move", participle);
    let mk = verb("make", participle);
    match p {
        Primitive::Translate { direction } => format!("{mv} {}", direction_phrase(*direction)),
        Primitive::Curve {
            direction,
            convexity,
        } => {
            let c = match convexity {
                Convexity::Convex => "convex",
                Convexity::Concave => "concave",
            };
            format!("{mv} {} following a {c} curve", direction_phrase(*direction))
        }
        Primitive::Rotate { turn, count, shape } => {
            let noun = match shape {
                LoopShape::Circle => "circular",
                LoopShape::Triangle => "triangular",
                LoopShape::Square => "square",
            };
            if *count == 1 {
                format!("{mk} a {noun} motion {}", turn.name())
            } else {
                format!("{mk} {count} {noun} motions {}", turn.name())
            }
        }
        Primitive::Oscillate { axis, count } => {
            let mut s = String::from(mk);
            match axis {
                Some(Axis::Vertical) => s.push_str(" vertical"),
                Some(Axis::Horizontal) => s.push_str(" horizontal"),
                Some(Axis::Diagonal) => s.push_str(" diagonal"),
                Some(Axis::BackAndForth) => s.push_str(" back and forth"),
                None => {}
            }
            s.push_str(" oscillations");
            if let Some(n) = count {
                s.push_str(&format!(" {n} times"));
            }
            s
        }
        Primitive::Repeat { sequence, count } => match sequence.as_slice() {
            [Primitive::Translate { direction }] => {
                let noun = if *count == 1 { "stroke" } else { "strokes" };
                format!("{mk} {count} {noun} {}", direction_phrase(*direction))
            }
            _ => {
                let body: Vec<String> = sequence.iter().map(|p| primitive(p, participle)).collect();
                format!("{}, repeating this sequence {count} times", body.join(" and "))
            }
        },
        Primitive::Straight => format!("{mv} in a straight line"),
        Primitive::Flip { direction, back } => {
            let fl = verb("flip", participle);
            let mut s = format!("{fl} the object {}", direction_phrase(*direction));
            if *back {
                s.push_str(&format!(" and {fl} it back to its initial state"));
            }
            s
        }
        Primitive::Twist => format!("{mk} alternating rotations"),
        Primitive::Progression {
            quantity,
            increasing,
        } => {
            let v = verb(if *increasing { "increase" } else { "decrease" }, participle);
            match quantity {
                Quantity::Radius => format!("{v} the radius of the circle"),
                Quantity::StrokeStartHeight => format!("{v} the starting height of each stroke"),
            }
        }
    }
}

fn grounding(g: &Grounding, participle: bool) -> String {
    match g {
        Grounding::MoveOver { object } => format!("{} over the {object}", verb("move", participle)),
        Grounding::Detour { object, side } => {
            let mut s = format!("{} a detour to the {}", verb("make", participle), side.name());
            if let Some(o) = object {
                s.push_str(&format!(" of the {o}"));
            }
            s
        }
        Grounding::DistanceTrend { object, trend } => {
            let rel = match trend {
                Trend::Closer => "closer to",
                Trend::Farther => "farther from",
            };
            format!("{} {rel} the {object}", verb("move", participle))
        }
        Grounding::FollowPath { object } => format!("{} the {object}", verb("follow", participle)),
        Grounding::Avoid { object } => format!("{} the {object}", verb("avoid", participle)),
    }
}

fn clause(c: &Clause, participle: bool) -> String {
    match c {
        Clause::Path(p) => primitive(p, participle),
        Clause::Ground(g) => grounding(g, participle),
    }
}

/// Canonical lowercase text for a motion; parsing it yields the same AST.
pub fn format_description(ast: &MotionAst) -> String {
    ast.steps
        .iter()
        .map(|step| {
            let mut s = clause(&step.primary, false);
            for m in &step.modifiers {
                s.push_str(", ");
                s.push_str(&clause(m, true));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(", then ")
}

/// Text for a single clause, used in verdict reports.
pub fn format_clause(c: &Clause) -> String {
    clause(c, false)
}
