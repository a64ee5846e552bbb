use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use motif_core::analyzer::discriminate_episode;
use motif_core::config::Config;
use motif_core::control::refine;
use motif_core::dataset::{build_samples, emit_dataset, read_dataset, split_corpus, DatasetMeta, SIMILARITY_BACKEND};
use motif_core::dsl::{parse_description, Convexity, Side, Turn};
use motif_core::eval::{category_report, join_predictions, Prediction};
use motif_core::generators::{box_obstacle, generate, synthetic_corpus, GeneratorKind, GeneratorParams};
use motif_core::render::{render_to, Representation};
use motif_core::trajectory::{load_corpus, Episode, Point, SceneObject};
use motif_core::{Error, Result};

#[derive(Parser)]
#[command(name = "motif", version, about = "Trajectory-level motion checks, renderings and datasets")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Key = value overrides; falls back to $MOTIF_CONFIG.
    #[arg(long, global = true, env = "MOTIF_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads for per-episode work (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated episode, or a seeded synthetic corpus.
    Generate(Box<GenerateArgs>),
    /// Draw an episode as a keypoint overlay, flow overlay or storyboard.
    Render(RenderArgs),
    /// Score episodes against motion descriptions.
    Discriminate(DiscriminateArgs),
    /// Order episodes by how well they follow one description.
    Rank(RankArgs),
    /// Build the positive/negative sample set from a corpus.
    BuildDataset(BuildArgs),
    /// Precision and recall of predictions against a dataset.
    Evaluate(EvaluateArgs),
    /// Search generator parameters until a description is satisfied.
    Refine(RefineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TurnArg {
    Cw,
    Ccw,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvexityArg {
    Convex,
    Concave,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Keypoint,
    Flow,
    Storyboard,
}

impl Mode {
    fn representation(self, n: usize) -> Result<Representation> {
        let name = match self {
            Mode::Keypoint => "keypoint",
            Mode::Flow => "flow",
            Mode::Storyboard => "storyboard",
        };
        Representation::parse(name, n)
    }
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    Ok(Point::new(x, y))
}

fn parse_obstacle(s: &str) -> std::result::Result<SceneObject, String> {
    let (label, rest) = s.split_once(':').ok_or("expected label:x0,y0,x1,y1")?;
    let v: Vec<f64> = rest
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad coordinate in {s:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != 4 {
        return Err("expected label:x0,y0,x1,y1".into());
    }
    Ok(box_obstacle(label, v[0], v[1], v[2], v[3]))
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator family (line, vertical-shaking, horizontal-shaking, circle, arc, detour).
    #[arg(long, required_unless_present = "corpus")]
    kind: Option<String>,
    /// Instead of one episode, write this many synthetic episodes into --out.
    #[arg(long)]
    corpus: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (one episode) or directory (corpus).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "gen-0000")]
    id: String,
    #[arg(long, default_value = "move the object")]
    task: String,
    #[arg(long, default_value = "generated")]
    category: String,
    /// Side of the square canvas, in pixels, the unit coordinates are scaled to.
    #[arg(long, default_value_t = 640.0)]
    canvas: f64,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_parser = parse_point)]
    start: Option<Point>,
    #[arg(long, value_parser = parse_point)]
    end: Option<Point>,
    #[arg(long, value_parser = parse_point)]
    center: Option<Point>,
    #[arg(long, value_parser = parse_point)]
    drift: Option<Point>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    frequency: Option<u32>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    count: Option<u32>,
    #[arg(long, value_enum)]
    turn: Option<TurnArg>,
    #[arg(long, value_enum)]
    convexity: Option<ConvexityArg>,
    #[arg(long)]
    bulge: Option<f64>,
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    #[arg(long)]
    clearance: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    /// Obstacle for detours, as label:x0,y0,x1,y1 in unit coordinates.
    #[arg(long, value_parser = parse_obstacle)]
    obstacle: Option<SceneObject>,
}

impl GenerateArgs {
    fn params(&self) -> GeneratorParams {
        let d = GeneratorParams::default();
        GeneratorParams {
            n: self.n.unwrap_or(d.n),
            start: self.start.unwrap_or(d.start),
            end: self.end.unwrap_or(d.end),
            center: self.center.unwrap_or(d.center),
            drift: self.drift.or(d.drift),
            amplitude: self.amplitude.unwrap_or(d.amplitude),
            frequency: self.frequency.unwrap_or(d.frequency),
            radius: self.radius.unwrap_or(d.radius),
            count: self.count.unwrap_or(d.count),
            turn: match self.turn {
                Some(TurnArg::Cw) => Turn::Clockwise,
                Some(TurnArg::Ccw) => Turn::CounterClockwise,
                None => d.turn,
            },
            convexity: match self.convexity {
                Some(ConvexityArg::Convex) => Convexity::Convex,
                Some(ConvexityArg::Concave) => Convexity::Concave,
                None => d.convexity,
            },
            bulge: self.bulge.unwrap_or(d.bulge),
            side: match self.side {
                Some(SideArg::Left) => Side::Left,
                Some(SideArg::Right) => Side::Right,
                None => d.side,
            },
            clearance: self.clearance.unwrap_or(d.clearance),
            noise_sigma: self.noise.unwrap_or(d.noise_sigma),
            seed: self.seed,
            ..d
        }
    }
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, required_unless_present = "corpus")]
    episode: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "keypoint")]
    mode: Mode,
    /// Storyboard size: 2, 4 or 9.
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct DiscriminateArgs {
    #[arg(long, conflicts_with = "corpus")]
    episode: Option<PathBuf>,
    /// Description to check; the episode's own when omitted.
    #[arg(long, requires = "episode")]
    description: Option<String>,
    /// Score a whole corpus, one JSON line per (episode, description).
    #[arg(long, required_unless_present = "episode")]
    corpus: Option<PathBuf>,
    /// With --corpus: score the dataset's samples instead of own descriptions.
    #[arg(long, requires = "corpus")]
    dataset: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    description: String,
    #[arg(long, num_args = 1.., required_unless_present = "corpus")]
    episodes: Vec<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    n_neg: Option<usize>,
    #[arg(long, value_enum, default_value = "keypoint")]
    representation: Mode,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Where renderings go; defaults to an `images` directory beside --out.
    #[arg(long)]
    images_dir: Option<PathBuf>,
    /// Also write train/val/test files with these ratios, e.g. 0.8,0.1,0.1.
    #[arg(long)]
    split: Option<String>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
}

#[derive(Args)]
struct RefineArgs {
    #[arg(long)]
    task: String,
    #[arg(long)]
    description: String,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    theta_loop: Option<f64>,
    /// Borrow the scene of this episode file.
    #[arg(long)]
    scene: Option<PathBuf>,
}

fn out_line(out: &mut impl Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{value}").map_err(|e| Error::io("<stdout>", e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn episodes_from(corpus: Option<&Path>, files: &[PathBuf]) -> Result<Vec<Episode>> {
    match corpus {
        Some(dir) => load_corpus(dir),
        None => files.iter().map(|p| Episode::load(p)).collect(),
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    match cli.command {
        Command::Generate(a) => {
            if let Some(count) = a.corpus {
                ensure_dir(&a.out)?;
                for ep in synthetic_corpus(count, a.seed, a.canvas)? {
                    let path = a.out.join(format!("{}.json", ep.id));
                    ep.save(&path)?;
                    out_line(&mut out, &json!({"id": ep.id, "path": path, "description": ep.motion_description}))?;
                }
                return Ok(());
            }
            let name = a.kind.as_deref().unwrap_or_default();
            let kind = GeneratorKind::from_name(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown generator {name:?}")))?;
            let g = generate(kind, &a.params(), a.obstacle.as_ref())?;
            let ep = g.into_episode(a.id.clone(), a.task.clone(), a.category.clone(), a.canvas);
            ep.save(&a.out)?;
            out_line(&mut out, &json!({"id": ep.id, "path": a.out, "description": ep.motion_description}))?;
        }
        Command::Render(a) => {
            let rep = a.mode.representation(a.n)?;
            let episodes = episodes_from(a.corpus.as_deref(), a.episode.as_slice())?;
            ensure_dir(&a.out_dir)?;
            let paths = episodes
                .par_iter()
                .map(|ep| render_to(ep, rep, &a.out_dir, &cfg.render))
                .collect::<Result<Vec<_>>>()?;
            for p in paths {
                out_line(&mut out, &json!({"path": p}))?;
            }
        }
        Command::Discriminate(a) => {
            if let Some(path) = &a.episode {
                let ep = Episode::load(path)?;
                let desc = a.description.as_deref().unwrap_or(&ep.motion_description);
                let v = discriminate_episode(&ep, &parse_description(desc)?, &cfg.analyzer)?;
                let mut value = serde_json::to_value(&v)?;
                value["episode_id"] = json!(ep.id);
                value["description"] = json!(desc);
                out_line(&mut out, &value)?;
                return Ok(());
            }
            let episodes = load_corpus(a.corpus.as_deref().expect("clap requires corpus"))?;
            let pairs: Vec<(&Episode, String)> = match &a.dataset {
                Some(d) => {
                    let samples = read_dataset(d)?;
                    samples
                        .iter()
                        .map(|s| {
                            let ep = episodes.iter().find(|e| e.id == s.episode_id).ok_or_else(|| {
                                Error::InvalidArgument(format!("dataset episode {:?} is not in the corpus", s.episode_id))
                            })?;
                            Ok((ep, s.motion_description.clone()))
                        })
                        .collect::<Result<_>>()?
                }
                None => episodes.iter().map(|e| (e, e.motion_description.clone())).collect(),
            };
            let lines: Vec<serde_json::Value> = pairs
                .par_iter()
                .map(|(ep, desc)| {
                    // descriptions that fail to parse or name missing objects are rejections
                    let (label, score) = match parse_description(desc).and_then(|ast| discriminate_episode(ep, &ast, &cfg.analyzer)) {
                        Ok(v) => (v.label, v.score),
                        Err(e @ Error::DegeneratePath(_)) => return Err(e),
                        Err(_) => (0, 0.0),
                    };
                    Ok(json!({"episode_id": ep.id, "description": desc, "label": label, "score": score}))
                })
                .collect::<Result<_>>()?;
            for l in &lines {
                out_line(&mut out, l)?;
            }
        }
        Command::Rank(a) => {
            let episodes = episodes_from(a.corpus.as_deref(), &a.episodes)?;
            let ast = parse_description(&a.description)?;
            let mut scored: Vec<(usize, f64)> = episodes
                .par_iter()
                .enumerate()
                .map(|(i, ep)| (i, discriminate_episode(ep, &ast, &cfg.analyzer).map(|v| v.score).unwrap_or(0.0)))
                .collect();
            scored.sort_by(|x, y| y.1.total_cmp(&x.1));
            for (rank, (i, score)) in scored.into_iter().enumerate() {
                out_line(&mut out, &json!({"rank": rank + 1, "episode_id": episodes[i].id, "score": score}))?;
            }
        }
        Command::BuildDataset(a) => {
            let n_neg = a.n_neg.unwrap_or(cfg.dataset.n_neg);
            let rep = a.representation.representation(a.n)?;
            let episodes = load_corpus(&a.corpus)?;
            let images = a.images_dir.clone().unwrap_or_else(|| {
                a.out.parent().map(|p| p.join("images")).unwrap_or_else(|| PathBuf::from("images"))
            });
            ensure_dir(&images)?;
            episodes
                .par_iter()
                .map(|ep| render_to(ep, rep, &images, &cfg.render).map(|_| ()))
                .collect::<Result<Vec<_>>>()?;
            let image_for = |ep: &Episode| images.join(motif_core::render::image_name(ep, rep));
            let samples = build_samples(&episodes, image_for, n_neg)?;
            emit_dataset(&samples, &a.out)?;
            let meta = DatasetMeta {
                episodes: episodes.len(),
                samples: samples.len(),
                n_neg,
                representation: rep.mode().to_string(),
                similarity: SIMILARITY_BACKEND.to_string(),
            };
            let meta_path = a.out.with_extension("meta.json");
            fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n").map_err(|e| Error::io(&meta_path, e))?;
            if let Some(ratios) = &a.split {
                let r: Vec<f64> = ratios
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad split ratio in {ratios:?}"))))
                    .collect::<Result<_>>()?;
                if r.len() != 3 {
                    return Err(Error::InvalidArgument("split needs three ratios".into()));
                }
                let (train, val, test) = split_corpus(&episodes, (r[0], r[1], r[2]), cfg.dataset.split_seed)?;
                for (name, part) in [("train", train), ("val", val), ("test", test)] {
                    let ids: std::collections::HashSet<&str> = part.iter().map(|e| e.id.as_str()).collect();
                    let subset: Vec<_> = samples.iter().filter(|s| ids.contains(s.episode_id.as_str())).cloned().collect();
                    emit_dataset(&subset, &a.out.with_extension(format!("{name}.jsonl")))?;
                }
            }
            out_line(&mut out, &serde_json::to_value(&meta)?)?;
        }
        Command::Evaluate(a) => {
            let samples = read_dataset(&a.dataset)?;
            let text = fs::read_to_string(&a.predictions).map_err(|e| Error::io(&a.predictions, e))?;
            let preds: Vec<Prediction> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| Ok(serde_json::from_str(l)?))
                .collect::<Result<_>>()?;
            let predicted = join_predictions(&samples, &preds)?;
            let labels: Vec<u8> = samples.iter().map(|s| s.label).collect();
            let categories: Vec<String> = samples.iter().map(|s| s.category.clone()).collect();
            let report = category_report(&categories, &predicted, &labels)?;
            write!(out, "{}", report.to_table()).map_err(|e| Error::io("<stdout>", e))?;
            out_line(&mut out, &serde_json::to_value(&report)?)?;
        }
        Command::Refine(a) => {
            let ast = parse_description(&a.description)?;
            let scene = match &a.scene {
                Some(p) => Episode::load(p)?.scene,
                None => Vec::new(),
            };
            let budget = a.budget.unwrap_or(cfg.refine.budget);
            let theta = a.theta_loop.unwrap_or(cfg.refine.theta_loop);
            let trace = refine(&a.task, &ast, &scene, budget, theta, &cfg.analyzer)?;
            for t in &trace.turns {
                out_line(&mut out, &serde_json::to_value(t)?)?;
            }
            out_line(
                &mut out,
                &json!({"task": trace.task, "terminated": trace.terminated, "reason": trace.reason, "turns": trace.turns.len()}),
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("motif: {e}");
            ExitCode::from(1)
        }
    }
}
