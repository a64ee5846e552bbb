//! Recursive-descent parser for the controlled motion vocabulary.

use std::sync::OnceLock;

use super::ast::*;
use crate::error::{Error, Result};
use crate::trajectory::Compass;

const VOCABULARY: &str = include_str!("../../data/vocabulary.txt");

#[derive(Debug, Clone, PartialEq)]
struct Token {
    text: String,
    start: usize,
    end: usize,
}

/// Synonym table loaded from the shipped vocabulary file.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub version: u32,
    rules: Vec<(Vec<String>, Vec<String>)>,
}

impl Vocabulary {
    pub fn parse(text: &str) -> Result<Vocabulary> {
        let mut version = 0;
        let mut rules = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(v) = line.strip_prefix("@version") {
                version = v.trim().parse().map_err(|_| {
                    Error::InvalidArgument(format!("vocabulary line {}: bad version", lineno + 1))
                })?;
                continue;
            }
            let (lhs, rhs) = line.split_once("=>").ok_or_else(|| {
                Error::InvalidArgument(format!("vocabulary line {}: missing `=>`", lineno + 1))
            })?;
            let words = |s: &str| -> Vec<String> { lex(s).into_iter().map(|t| t.text).collect() };
            let (lhs, rhs) = (words(lhs), words(rhs));
            if lhs.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "vocabulary line {}: empty phrase",
                    lineno + 1
                )));
            }
            rules.push((lhs, rhs));
        }
        // longest phrase wins when several match at one position
        rules.sort_by_key(|r| std::cmp::Reverse(r.0.len()));
        Ok(Vocabulary { version, rules })
    }

    pub fn builtin() -> &'static Vocabulary {
        static VOCAB: OnceLock<Vocabulary> = OnceLock::new();
        VOCAB.get_or_init(|| Vocabulary::parse(VOCABULARY).expect("shipped vocabulary parses"))
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn rewrite(&self, tokens: Vec<Token>) -> Vec<Token> {
        let mut out = Vec::with_capacity(tokens.len());
        let mut i = 0;
        'outer: while i < tokens.len() {
            for (lhs, rhs) in &self.rules {
                let n = lhs.len();
                if i + n <= tokens.len() && tokens[i..i + n].iter().zip(lhs).all(|(t, w)| &t.text == w) {
                    let (start, end) = (tokens[i].start, tokens[i + n - 1].end);
                    out.extend(rhs.iter().map(|w| Token {
                        text: w.clone(),
                        start,
                        end,
                    }));
                    i += n;
                    continue 'outer;
                }
            }
            out.push(tokens[i].clone());
            i += 1;
        }
        out
    }
}

fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() || c == '.' {
            chars.next();
        } else if c == ',' || c == ';' {
            chars.next();
            out.push(Token {
                text: ",".into(),
                start: i,
                end: i + 1,
            });
        } else if c == '<' {
            let mut end = i;
            let mut word = String::new();
            for (j, d) in chars.by_ref() {
                word.extend(d.to_lowercase());
                end = j + d.len_utf8();
                if d == '>' {
                    break;
                }
            }
            out.push(Token {
                text: word,
                start: i,
                end,
            });
        } else if c.is_alphanumeric() || c == '\'' || c == '-' {
            let mut end = i;
            let mut word = String::new();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '\'' || d == '-' {
                    word.extend(d.to_lowercase());
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token {
                text: word,
                start: i,
                end,
            });
        } else {
            chars.next();
            out.push(Token {
                text: c.to_string(),
                start: i,
                end: i + c.len_utf8(),
            });
        }
    }
    out
}

const FINITE_VERBS: &[&str] = &["move", "make", "flip", "follow", "avoid", "increase", "decrease"];
const PARTICIPLES: &[&str] = &[
    "moving",
    "making",
    "flipping",
    "following",
    "avoiding",
    "increasing",
    "decreasing",
];
const FILLERS: &[&str] = &["completely", "gradually", "slowly", "smoothly"];
const OBJECT_STOP: &[&str] = &[",", "then", "and", "while"];

fn base_verb(word: &str) -> Option<&'static str> {
    FINITE_VERBS
        .iter()
        .zip(PARTICIPLES)
        .find(|(v, p)| **v == word || **p == word)
        .map(|(v, _)| *v)
}

fn number_word(word: &str) -> Option<u32> {
    const WORDS: [&str; 10] = [
        "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    ];
    word.parse::<u32>()
        .ok()
        .or_else(|| WORDS.iter().position(|w| *w == word).map(|i| i as u32 + 1))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> Option<&str> {
        self.toks.get(self.pos + k).map(|t| t.text.as_str())
    }

    fn at(&self, word: &str) -> bool {
        self.peek() == Some(word)
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.at(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_seq(&mut self, words: &[&str]) -> bool {
        let ok = words
            .iter()
            .enumerate()
            .all(|(k, w)| self.peek_at(k) == Some(*w));
        if ok {
            self.pos += words.len();
        }
        ok
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        let (token, start, end) = match self.toks.get(self.pos) {
            Some(t) => (t.text.clone(), t.start, t.end),
            None => ("<end>".to_string(), self.len, self.len),
        };
        Error::Unparseable {
            token,
            start,
            end,
            reason: reason.into(),
        }
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        if self.eat(word) {
            Ok(())
        } else {
            Err(self.error(format!("expected {word:?}")))
        }
    }

    fn skip_fillers(&mut self) {
        while self.peek().is_some_and(|w| FILLERS.contains(&w)) {
            self.pos += 1;
        }
    }

    fn description(&mut self) -> Result<MotionAst> {
        let mut steps = vec![self.step()?];
        // first step of the current "then" group, the scope of "repeating this sequence"
        let mut group_start = 0;
        loop {
            self.modifiers(steps.last_mut().unwrap())?;
            if self.peek().is_none() {
                break;
            }
            let comma = self.eat(",");
            let and = self.eat("and");
            if self.eat("then") {
                group_start = steps.len();
                steps.push(self.step()?);
                continue;
            }
            if comma && !and && self.at("repeating") {
                let count = self.repeating()?;
                let body = steps.split_off(group_start);
                steps.push(wrap_repeat(body, count).map_err(|r| self.error(r))?);
                continue;
            }
            self.skip_fillers();
            if (comma || and) && self.peek().is_some_and(|w| FINITE_VERBS.contains(&w)) {
                steps.push(self.step()?);
                continue;
            }
            return Err(self.error("expected `then`, a new motion, or a modifier"));
        }
        Ok(MotionAst::new(steps))
    }

    fn repeating(&mut self) -> Result<u32> {
        self.expect("repeating")?;
        self.eat("this");
        let _ = self.eat("sequence") || self.eat("motion") || self.eat("pattern");
        let n = self.count()?;
        self.expect("times")?;
        Ok(n)
    }

    fn step(&mut self) -> Result<Step> {
        self.skip_fillers();
        let verb = match self.peek() {
            Some(w) if FINITE_VERBS.contains(&w) => base_verb(w).unwrap(),
            _ => return Err(self.error("expected a motion verb")),
        };
        self.pos += 1;
        let primary = self.verb_phrase(verb)?;
        Ok(Step::new(primary))
    }

    fn count(&mut self) -> Result<u32> {
        match self.peek().and_then(number_word) {
            Some(0) => Err(self.error("count must be at least 1")),
            Some(n) => {
                self.pos += 1;
                Ok(n)
            }
            None => Err(self.error("expected a count")),
        }
    }

    /// "N times" after a primitive.
    fn times(&mut self) -> Option<u32> {
        let n = self.peek().and_then(number_word)?;
        if n >= 1 && self.peek_at(1) == Some("times") {
            self.pos += 2;
            Some(n)
        } else {
            None
        }
    }

    fn verb_phrase(&mut self, verb: &str) -> Result<Clause> {
        match verb {
            "move" => self.move_phrase(),
            "make" => self.make_phrase(),
            "flip" => self.flip_phrase().map(Clause::Path),
            "follow" => {
                if self.at("a") && matches!(self.peek_at(1), Some("convex" | "concave")) {
                    return Err(self.error("a curve needs a direction, e.g. `move upward following a convex curve`"));
                }
                Ok(Grounding::FollowPath { object: self.object()? }.into())
            }
            "avoid" => Ok(Grounding::Avoid { object: self.object()? }.into()),
            "increase" | "decrease" => self.progression(verb == "increase").map(Clause::Path),
            _ => unreachable!("verb list is closed"),
        }
    }

    fn object(&mut self) -> Result<String> {
        let _ = self.eat("the") || self.eat("a") || self.eat("an");
        let mut words = Vec::new();
        while let Some(w) = self.peek() {
            if OBJECT_STOP.contains(&w) || PARTICIPLES.contains(&w) {
                break;
            }
            words.push(w.to_string());
            self.pos += 1;
        }
        if words.is_empty() {
            return Err(self.error("expected an object name"));
        }
        Ok(words.join(" "))
    }

    /// A single direction word or phrase, or an oscillation axis in disguise.
    fn direction(&mut self) -> Option<DirWord> {
        let d = match self.peek()? {
            "upward" | "up" => DirWord::Dir(Compass::Up.into()),
            "downward" | "down" => DirWord::Dir(Compass::Down.into()),
            "left" => DirWord::Dir(Compass::Left.into()),
            "right" => DirWord::Dir(Compass::Right.into()),
            "forward" => DirWord::Dir(Direction::Forward),
            "side-to-side" => DirWord::Axis(Axis::Horizontal),
            "back-and-forth" => DirWord::Axis(Axis::BackAndForth),
            "to" if self.peek_at(1) == Some("the")
                && matches!(self.peek_at(2), Some("left" | "right")) =>
            {
                self.pos += 2;
                return self.direction();
            }
            _ => return None,
        };
        self.pos += 1;
        Some(d)
    }

    fn starts_direction(&self) -> bool {
        match self.peek() {
            Some("upward" | "up" | "downward" | "down" | "left" | "right" | "forward") => true,
            Some("to") => {
                self.peek_at(1) == Some("the") && matches!(self.peek_at(2), Some("left" | "right"))
            }
            _ => false,
        }
    }

    fn compound_direction(&mut self) -> Result<Primitive> {
        let first = self
            .direction()
            .ok_or_else(|| self.error("expected a direction"))?;
        let mut words = vec![first];
        while self.at("and") {
            let save = self.pos;
            self.pos += 1;
            if self.starts_direction() {
                words.push(self.direction().unwrap());
            } else {
                self.pos = save;
                break;
            }
        }
        combine_directions(&words).map_err(|r| self.error(r))
    }

    fn move_phrase(&mut self) -> Result<Clause> {
        if self.eat("over") {
            return Ok(Grounding::MoveOver { object: self.object()? }.into());
        }
        if self.eat_seq(&["farther", "from"]) {
            let object = self.object()?;
            return Ok(Grounding::DistanceTrend { object, trend: Trend::Farther }.into());
        }
        if self.eat_seq(&["closer", "to"]) {
            let object = self.object()?;
            return Ok(Grounding::DistanceTrend { object, trend: Trend::Closer }.into());
        }
        if self.eat_seq(&["in", "a", "straight", "line"]) {
            return Ok(Primitive::Straight.into());
        }
        let mut prim = self.compound_direction()?;
        self.eat("shortly");
        if let Some(n) = self.times() {
            prim = match prim {
                Primitive::Oscillate { axis, .. } => Primitive::Oscillate { axis, count: Some(n) },
                other => Primitive::Repeat {
                    sequence: vec![other],
                    count: n,
                },
            };
        }
        if self.at("following") && self.peek_at(1) == Some("a") {
            self.pos += 2;
            let convexity = self.convexity()?;
            self.expect("curve")?;
            prim = match prim {
                Primitive::Translate { direction } => Primitive::Curve { direction, convexity },
                _ => return Err(self.error("only a straight translation can follow a curve")),
            };
        }
        Ok(prim.into())
    }

    fn convexity(&mut self) -> Result<Convexity> {
        if self.eat("convex") {
            Ok(Convexity::Convex)
        } else if self.eat("concave") {
            Ok(Convexity::Concave)
        } else {
            Err(self.error("expected `convex` or `concave`"))
        }
    }

    fn turn(&mut self) -> Option<Turn> {
        if self.eat("clockwise") {
            Some(Turn::Clockwise)
        } else if self.eat("counter-clockwise") {
            Some(Turn::CounterClockwise)
        } else {
            None
        }
    }

    fn make_phrase(&mut self) -> Result<Clause> {
        if self.eat("a") || self.eat("an") {
            if self.eat("detour") {
                return self.detour().map(Clause::Ground);
            }
            return self.rotation(1).map(Clause::Path);
        }
        if self.peek().and_then(number_word).is_some() {
            let n = self.count()?;
            if self.eat("strokes") || self.eat("stroke") {
                let dir = match self.compound_direction()? {
                    p @ (Primitive::Translate { .. } | Primitive::Curve { .. }) => p,
                    _ => return Err(self.error("strokes need a single direction")),
                };
                return Ok(Primitive::Repeat {
                    sequence: vec![dir],
                    count: n,
                }
                .into());
            }
            return self.rotation(n).map(Clause::Path);
        }
        if self.eat_seq(&["alternating", "rotations"]) {
            return Ok(Primitive::Twist.into());
        }
        let axis = match self.peek() {
            Some("vertical" | "up-and-down") => Some(Axis::Vertical),
            Some("horizontal" | "side-to-side") => Some(Axis::Horizontal),
            Some("diagonal") => Some(Axis::Diagonal),
            Some("back-and-forth") => Some(Axis::BackAndForth),
            _ => None,
        };
        if axis.is_some() {
            self.pos += 1;
        }
        if !self.eat("oscillations") {
            return Err(self.error("expected a circular motion, a detour, strokes or oscillations"));
        }
        let count = self.times();
        Ok(Primitive::Oscillate { axis, count }.into())
    }

    fn rotation(&mut self, count: u32) -> Result<Primitive> {
        let early_turn = self.turn();
        let shape = match self.peek() {
            Some("circular") => LoopShape::Circle,
            Some("triangular") => LoopShape::Triangle,
            Some("square") => LoopShape::Square,
            _ => return Err(self.error("expected a circular, triangular or square motion")),
        };
        self.pos += 1;
        if !(self.eat("motion") || self.eat("motions")) {
            return Err(self.error("expected `motion`"));
        }
        let turn = match early_turn.or_else(|| self.turn()) {
            Some(t) => t,
            None => return Err(self.error("expected `clockwise` or `counter-clockwise`")),
        };
        let count = match self.times() {
            Some(n) => count * n,
            None => count,
        };
        Ok(Primitive::Rotate { turn, count, shape })
    }

    fn side(&mut self) -> Result<Side> {
        if self.eat("left") {
            Ok(Side::Left)
        } else if self.eat("right") {
            Ok(Side::Right)
        } else {
            Err(self.error("expected `left` or `right`"))
        }
    }

    fn detour(&mut self) -> Result<Grounding> {
        self.expect("to")?;
        self.expect("the")?;
        let side = self.side()?;
        let object = if self.eat("of") { Some(self.object()?) } else { None };
        Ok(Grounding::Detour { object, side })
    }

    fn flip_phrase(&mut self) -> Result<Primitive> {
        self.expect("the")?;
        self.expect("object")?;
        let direction = match self.compound_direction()? {
            Primitive::Translate { direction } => direction,
            _ => return Err(self.error("flip needs a single direction")),
        };
        let back = self.at("and")
            && matches!(self.peek_at(1), Some("flip" | "flipping"))
            && self.peek_at(2) == Some("it")
            && self.peek_at(3) == Some("back");
        if back {
            self.pos += 4;
            if self.eat("to") {
                self.eat("its");
                let _ = self.eat("initial") || self.eat("original");
                let _ = self.eat("state") || self.eat("position");
            }
        }
        Ok(Primitive::Flip { direction, back })
    }

    fn progression(&mut self, increasing: bool) -> Result<Primitive> {
        self.expect("the")?;
        let quantity = if self.eat("radius") {
            if self.eat("of") {
                let _ = self.eat("the") || self.eat("each");
                let _ = self.eat("circle") || self.eat("circles");
            }
            Quantity::Radius
        } else if self.eat_seq(&["starting", "height"]) {
            if self.eat("of") {
                let _ = self.eat("each") || self.eat("the");
                let _ = self.eat("stroke") || self.eat("strokes");
            }
            Quantity::StrokeStartHeight
        } else {
            return Err(self.error("expected `radius` or `starting height`"));
        };
        Ok(Primitive::Progression { quantity, increasing })
    }

    /// Clauses that hold during the current step.
    fn modifiers(&mut self, step: &mut Step) -> Result<()> {
        loop {
            let save = self.pos;
            let introduced = if self.eat("while") {
                true
            } else if self.at(",") || self.at("and") {
                self.pos += 1;
                self.skip_fillers();
                if self.eat("while") || self.starts_modifier() {
                    true
                } else {
                    self.pos = save;
                    return Ok(());
                }
            } else {
                self.skip_fillers();
                self.starts_modifier()
            };
            if !introduced {
                self.pos = save;
                return Ok(());
            }
            self.skip_fillers();
            // "following a convex curve" reshapes the step's translation
            if self.at("following") && self.peek_at(1) == Some("a") {
                self.pos += 2;
                let convexity = self.convexity()?;
                self.expect("curve")?;
                match &step.primary {
                    Clause::Path(Primitive::Translate { direction }) if step.modifiers.is_empty() => {
                        step.primary = Primitive::Curve {
                            direction: *direction,
                            convexity,
                        }
                        .into();
                        continue;
                    }
                    _ => return Err(self.error("a curve modifier needs a preceding translation")),
                }
            }
            let clause = self.modifier_phrase()?;
            if clause.contains_repeat() {
                return Err(self.error("a repeated sequence cannot be a modifier"));
            }
            step.modifiers.push(clause);
        }
    }

    fn starts_modifier(&self) -> bool {
        match self.peek() {
            Some(w) if PARTICIPLES.contains(&w) => true,
            Some("farther" | "closer") => true,
            Some("alternating") => self.peek_at(1) == Some("rotations"),
            Some("in") => self.peek_at(1) == Some("a") && self.peek_at(2) == Some("straight"),
            _ => false,
        }
    }

    fn modifier_phrase(&mut self) -> Result<Clause> {
        match self.peek() {
            Some("farther" | "closer") => self.move_phrase(),
            Some("alternating") => {
                self.pos += 2;
                Ok(Primitive::Twist.into())
            }
            Some("in") => {
                self.pos += 4;
                Ok(Primitive::Straight.into())
            }
            Some(w) => {
                let verb = base_verb(w).ok_or_else(|| self.error("expected a modifier"))?;
                self.pos += 1;
                self.verb_phrase(verb)
            }
            None => Err(self.error("expected a modifier")),
        }
    }
}

enum DirWord {
    Dir(Direction),
    Axis(Axis),
}

fn combine_directions(words: &[DirWord]) -> Result<Primitive, String> {
    use Compass::*;
    match words {
        [DirWord::Dir(d)] => Ok(Primitive::Translate { direction: *d }),
        [DirWord::Axis(axis)] => Ok(Primitive::Oscillate {
            axis: Some(*axis),
            count: None,
        }),
        [DirWord::Dir(Direction::Image(a)), DirWord::Dir(Direction::Image(b))] => {
            let diag = match (a, b) {
                (Up, Left) | (Left, Up) => UpLeft,
                (Up, Right) | (Right, Up) => UpRight,
                (Down, Left) | (Left, Down) => DownLeft,
                (Down, Right) | (Right, Down) => DownRight,
                (Up, Down) | (Down, Up) => {
                    return Ok(Primitive::Oscillate {
                        axis: Some(Axis::Vertical),
                        count: None,
                    })
                }
                (Left, Right) | (Right, Left) => {
                    return Ok(Primitive::Oscillate {
                        axis: Some(Axis::Horizontal),
                        count: None,
                    })
                }
                _ => return Err(format!("cannot combine directions {a} and {b}")),
            };
            Ok(Primitive::Translate {
                direction: diag.into(),
            })
        }
        _ => Err("unsupported direction combination".into()),
    }
}

fn wrap_repeat(body: Vec<Step>, count: u32) -> Result<Step, String> {
    let mut sequence = Vec::with_capacity(body.len());
    for step in body {
        match step {
            Step {
                primary: Clause::Path(p),
                modifiers,
            } if modifiers.is_empty() => sequence.push(p),
            _ => return Err("only plain path motions can be repeated".into()),
        }
    }
    if sequence.is_empty() {
        return Err("nothing to repeat".into());
    }
    Ok(Step::new(Primitive::Repeat { sequence, count }))
}

/// Parses a motion description into its AST.
pub fn parse_description(text: &str) -> Result<MotionAst> {
    if text.trim().is_empty() {
        return Err(Error::InvalidArgument("empty motion description".into()));
    }
    let toks = Vocabulary::builtin().rewrite(lex(text));
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let ast = p.description()?;
    ast.check().map_err(Error::InvalidArgument)?;
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: Compass) -> Primitive {
        Primitive::Translate { direction: c.into() }
    }

    #[test]
    fn sequence_with_then() {
        let ast = parse_description("move downward, then move to the left").unwrap();
        assert_eq!(
            ast,
            MotionAst::new(vec![Step::new(t(Compass::Down)), Step::new(t(Compass::Left))])
        );
    }

    #[test]
    fn while_attaches_modifier() {
        let ast = parse_description("move to the left while making vertical oscillations").unwrap();
        let want = Step::new(t(Compass::Left)).with(Primitive::Oscillate {
            axis: Some(Axis::Vertical),
            count: None,
        });
        assert_eq!(ast, MotionAst::single(want));
    }

    #[test]
    fn counted_rotation() {
        let ast = parse_description("make 2 circular motions counter-clockwise").unwrap();
        assert_eq!(
            ast,
            MotionAst::single(Step::new(Primitive::Rotate {
                turn: Turn::CounterClockwise,
                count: 2,
                shape: LoopShape::Circle,
            }))
        );
        let words = parse_description("make two circular motions counterclockwise").unwrap();
        assert_eq!(words, ast);
    }

    #[test]
    fn grounded_modifier() {
        let ast =
            parse_description("move downward and farther from the laptop, then move to the left")
                .unwrap();
        let first = Step::new(t(Compass::Down)).with(Grounding::DistanceTrend {
            object: "laptop".into(),
            trend: Trend::Farther,
        });
        assert_eq!(ast, MotionAst::new(vec![first, Step::new(t(Compass::Left))]));
    }

    #[test]
    fn case_insensitive() {
        assert_eq!(
            parse_description("Move Downward, THEN move to the LEFT").unwrap(),
            parse_description("move downward, then move to the left").unwrap()
        );
    }

    #[test]
    fn count_binds_to_oscillation() {
        let ast = parse_description("move up and down 4 times").unwrap();
        assert_eq!(
            ast,
            MotionAst::single(Step::new(Primitive::Oscillate {
                axis: Some(Axis::Vertical),
                count: Some(4),
            }))
        );
    }

    #[test]
    fn synonyms_normalize() {
        let a = parse_description("move downward, while making side-to-side movements").unwrap();
        let b = parse_description("move downward while making horizontal oscillations").unwrap();
        assert_eq!(a, b);
        let c = parse_description("move to the left, while making vertical shaking movements").unwrap();
        let d = parse_description("move to the left while making vertical oscillations").unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn repeated_sequence() {
        let ast = parse_description(
            "move to the right and move to the left, repeating this sequence 2 times",
        )
        .unwrap();
        assert_eq!(
            ast,
            MotionAst::single(Step::new(Primitive::Repeat {
                sequence: vec![t(Compass::Right), t(Compass::Left)],
                count: 2,
            }))
        );
    }

    #[test]
    fn errors_carry_spans() {
        match parse_description("move sideways") {
            Err(Error::Unparseable { token, start, end, .. }) => {
                assert_eq!(token, "sideways");
                assert_eq!((start, end), (5, 13));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_description("   "), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            parse_description("make 0 circular motions clockwise"),
            Err(Error::Unparseable { .. })
        ));
    }

    #[test]
    fn vocabulary_file_is_versioned() {
        let v = Vocabulary::builtin();
        assert_eq!(v.version, 1);
        assert!(!v.is_empty());
        assert!(Vocabulary::parse("a b c").is_err());
    }
}
